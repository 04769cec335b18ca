#include "redsim/trace.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "json.hpp"

namespace redsim::trace {

namespace {

double round12(double v) {
    const double r = std::round(v * 1e12) / 1e12;
    return r == 0.0 ? 0.0 : r; // normalize -0
}

std::uint64_t fnv1a(const std::string& data) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

} // namespace

std::vector<Complex> canonical_amplitudes(const StateVector& s) {
    const Vec& a = s.amplitudes();
    Complex phase{1.0, 0.0};
    for (Index k = 0; k < a.size(); ++k) {
        if (std::abs(a[k]) > 1e-9) {
            phase = a[k] / std::abs(a[k]);
            break;
        }
    }
    std::vector<Complex> out(static_cast<std::size_t>(a.size()));
    for (Index k = 0; k < a.size(); ++k) {
        const Complex v = a[k] / phase;
        out[static_cast<std::size_t>(k)] = Complex(round12(v.real()), round12(v.imag()));
    }
    return out;
}

std::string state_digest(const StateVector& s) {
    const auto amps = canonical_amplitudes(s);
    std::string buf;
    buf.reserve(amps.size() * 24);
    char tmp[64];
    for (const Complex& c : amps) {
        std::snprintf(tmp, sizeof(tmp), "%.12f,%.12f;", c.real(), c.imag());
        buf += tmp;
    }
    std::snprintf(tmp, sizeof(tmp), "%016llx",
                  static_cast<unsigned long long>(fnv1a(buf)));
    return std::string(tmp);
}

void write_jsonl(const RunTrace& t, std::ostream& os) {
    nlohmann::json meta{{"type", "meta"},
                        {"scenario", t.scenario},
                        {"seed", t.seed},
                        {"version", t.version}};
    os << meta.dump() << '\n';
    for (const auto& rec : t.records) {
        nlohmann::json line{{"type", "record"},
                            {"stage", rec.stage},
                            {"description", rec.description}};
        if (rec.state_digest) line["state_digest"] = *rec.state_digest;
        if (rec.amplitudes) {
            nlohmann::json amps = nlohmann::json::array();
            for (const Complex& c : *rec.amplitudes)
                amps.push_back({c.real(), c.imag()});
            line["amplitudes"] = std::move(amps);
        }
        if (!rec.outcomes_json.empty())
            line["outcomes"] = nlohmann::json::parse(rec.outcomes_json);
        if (!rec.probabilities_json.empty())
            line["probabilities"] = nlohmann::json::parse(rec.probabilities_json);
        os << line.dump() << '\n';
    }
    if (!t.summary_json.empty()) {
        nlohmann::json s = nlohmann::json::parse(t.summary_json);
        s["type"] = "summary";
        os << s.dump() << '\n';
    }
}

} // namespace redsim::trace
