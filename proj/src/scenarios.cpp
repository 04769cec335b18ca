#include "redsim/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "redsim/csl.hpp"
#include "redsim/grw.hpp"
#include "redsim/protocol.hpp"
#include "redsim/staged_protocol.hpp"
#include "redsim/stats.hpp"
#include "redsim/toy_model.hpp"

namespace redsim::scenarios {

using nlohmann::json;

namespace {

constexpr double kSignificance = 0.001;

Complex parse_complex(const json& v, const char* field) {
    if (v.is_number()) return Complex(v.get<double>(), 0.0);
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
        return Complex(v[0].get<double>(), v[1].get<double>());
    throw std::invalid_argument(std::string("param '") + field +
                                "': expected a number or [re, im] pair");
}

trace::TraceRecord counts_record(const std::string& description,
                                 const std::vector<std::string>& labels,
                                 const std::vector<std::size_t>& counts,
                                 const std::vector<double>& expected,
                                 const std::string& source) {
    trace::TraceRecord rec;
    rec.stage = "counts";
    rec.description = description;
    rec.outcomes_json = json{{"labels", labels}, {"counts", counts}}.dump();
    rec.probabilities_json = json{{"expected", expected}, {"source", source}}.dump();
    return rec;
}

trace::TraceRecord invariant_record(const std::string& description, bool pass,
                                    const json& detail = json::object()) {
    trace::TraceRecord rec;
    rec.stage = "invariant";
    rec.description = description;
    json out{{"pass", pass}};
    if (!detail.empty()) out["detail"] = detail;
    rec.outcomes_json = out.dump();
    return rec;
}

trace::TraceRecord state_record(const std::string& stage, const std::string& description,
                                const StateVector& s, bool dump_amplitudes) {
    trace::TraceRecord rec;
    rec.stage = stage;
    rec.description = description;
    rec.state_digest = trace::state_digest(s);
    if (dump_amplitudes) rec.amplitudes = trace::canonical_amplitudes(s);
    return rec;
}

// ---- tz / t2 ---------------------------------------------------------------

StateVector system_from_params(const json& p) {
    const bool any = p.contains("alpha") || p.contains("beta") || p.contains("gamma") ||
                     p.contains("delta");
    // With no amplitudes given, default to the uppermost product state.
    const Complex a =
        p.contains("alpha") ? parse_complex(p["alpha"], "alpha") : Complex(any ? 0 : 1, 0);
    const Complex b = p.contains("beta") ? parse_complex(p["beta"], "beta") : Complex(0, 0);
    const Complex c = p.contains("gamma") ? parse_complex(p["gamma"], "gamma") : Complex(0, 0);
    const Complex d = p.contains("delta") ? parse_complex(p["delta"], "delta") : Complex(0, 0);
    StateVector s = protocol::system_superposition(a, b, c, d);
    if (s.norm() <= 0.0) throw std::invalid_argument("param amplitudes: zero state");
    return s.normalized();
}

void run_tz(const ScenarioFile& file, const json& p, trace::RunTrace& t) {
    const StateVector system = system_from_params(p);
    Rng rng(*file.seed);

    const Vec& amps = system.amplitudes();
    const std::vector<double> expected{std::norm(amps[0]),
                                       std::norm(amps[1]) + std::norm(amps[2]),
                                       std::norm(amps[3])};
    std::vector<std::size_t> counts(3, 0);
    std::vector<std::size_t> omega3_counts(3, 0);
    bool eigen_ok = true;
    for (std::size_t trial = 0; trial < file.trials; ++trial) {
        Rng trial_rng = rng.split(trial);
        const auto res = protocol::run_tz_protocol(system, trial_rng);
        counts[static_cast<std::size_t>(1 - res.inferred_tz)] += 1;
        omega3_counts[static_cast<std::size_t>(1 - res.omega3)] += 1;
        const StateVector mapped = protocol::total_isospin_z().apply(res.reduced_system);
        const StateVector scaled = res.reduced_system.scaled(res.inferred_tz);
        if ((mapped.amplitudes() - scaled.amplitudes()).norm() > 1e-9) eigen_ok = false;
    }
    t.records.push_back(counts_record("inferred total isospin z component",
                                      {"+1", "0", "-1"}, counts, expected,
                                      "exact branch weights of the input amplitudes"));
    t.records.push_back(counts_record("single-probe outcome marginal",
                                      {"+1", "0", "-1"}, omega3_counts,
                                      {1.0 / 3, 1.0 / 3, 1.0 / 3},
                                      "uniform marginal of the coupled probe"));
    t.records.push_back(invariant_record("reduced state is an eigenstate of the inferred value",
                                         eigen_ok));
}

void run_t2(const ScenarioFile& file, const json& p, trace::RunTrace& t) {
    const StateVector system = system_from_params(p);
    Rng rng(*file.seed);

    const auto exact = protocol::t2_class_probabilities(system);
    std::vector<std::size_t> counts(4, 0);
    for (std::size_t trial = 0; trial < file.trials; ++trial) {
        Rng trial_rng = rng.split(trial);
        const auto res = protocol::run_t2_protocol(system, trial_rng);
        counts[static_cast<std::size_t>(res.classification)] += 1;
    }
    t.records.push_back(counts_record(
        "reduction classification", {"Singlet", "UpUp", "DownDown", "TripletZ"}, counts,
        {exact[0], exact[1], exact[2], exact[3]}, "exact classification weights"));
}

void run_signaling(const ScenarioFile& file, const json& p, trace::RunTrace& t) {
    const std::string mode_name = p.value("mode", "t2");
    protocol::NonlocalMode mode;
    if (mode_name == "t2") {
        mode = protocol::NonlocalMode::T2;
    } else if (mode_name == "tz") {
        mode = protocol::NonlocalMode::Tz;
    } else if (mode_name == "none") {
        mode = protocol::NonlocalMode::None;
    } else {
        throw std::invalid_argument("param 'mode': expected t2, tz or none");
    }
    Rng rng(*file.seed);

    std::array<std::vector<std::size_t>, 2> counts{std::vector<std::size_t>(2, 0),
                                                   std::vector<std::size_t>(2, 0)};
    for (int flip = 0; flip < 2; ++flip) {
        Rng side_rng = rng.split(static_cast<std::uint64_t>(flip));
        for (std::size_t trial = 0; trial < file.trials; ++trial) {
            Rng trial_rng = side_rng.split(trial);
            const int v = protocol::signaling_scenario(flip == 1, mode, trial_rng);
            counts[static_cast<std::size_t>(flip)][v == 1 ? 0 : 1] += 1;
        }
    }
    const std::vector<double> expected =
        (mode == protocol::NonlocalMode::T2) ? std::vector<double>{0.5, 0.5}
                                             : std::vector<double>{1.0, 0.0};
    t.records.push_back(counts_record("particle-2 z outcome, no flip", {"+1", "-1"}, counts[0],
                                      expected, "post-measurement branch weights"));
    t.records.push_back(counts_record("particle-2 z outcome, flipped", {"+1", "-1"}, counts[1],
                                      expected, "post-measurement branch weights"));

    std::size_t dof = 0;
    const double stat = chi2_homogeneity(counts[0], counts[1], &dof);
    const bool pass = dof == 0 || stat <= chi2_critical(dof, kSignificance);
    t.records.push_back(invariant_record(
        "flip leaves the outcome distribution unchanged", pass,
        json{{"chi2", stat}, {"dof", dof}}));
}

// ---- grw -------------------------------------------------------------------

void run_grw(const ScenarioFile& file, const json& p, trace::RunTrace& t) {
    const std::string mode = p.value("mode", "two-lump");
    grw::GrwParams params;
    params.lambda = p.value("lambda", 1.0);
    params.alpha = p.value("alpha", 1.0);
    Rng rng(*file.seed);

    if (mode == "two-lump") {
        const Index points = p.value("points", 256);
        const double spacing = p.value("spacing", 0.15);
        const double width = p.value("width", 0.25);
        const double separation = p.value("separation", 20.0);
        params.masses = {1.0};
        const double origin = -spacing * static_cast<double>(points - 1) / 2.0;
        const auto left =
            grw::GridWavefunction::gaussian(points, spacing, origin, -separation / 2, width);
        const auto right =
            grw::GridWavefunction::gaussian(points, spacing, origin, separation / 2, width);
        const auto psi = grw::GridWavefunction::superpose(left, right, 1.0, 1.0);

        std::vector<std::size_t> counts(2, 0);
        for (std::size_t trial = 0; trial < file.trials; ++trial) {
            Rng trial_rng = rng.split(trial);
            const auto [center, post] = grw::grw_hit(psi, 0, params, trial_rng);
            counts[center < 0.0 ? 0 : 1] += 1;
            (void)post;
        }
        t.records.push_back(counts_record("localization side", {"left", "right"}, counts,
                                          {0.5, 0.5}, "symmetric two-lump state"));
    } else if (mode == "evolve") {
        const Index points = p.value("points", 64);
        const double spacing = p.value("spacing", 0.2);
        const double duration = p.value("duration", 100.0);
        params.masses = p.contains("masses") ? p["masses"].get<std::vector<double>>()
                                             : std::vector<double>{1.0};
        std::vector<grw::GridWavefunction> singles;
        const double origin = -spacing * static_cast<double>(points - 1) / 2.0;
        for (std::size_t i = 0; i < params.masses.size(); ++i)
            singles.push_back(grw::GridWavefunction::gaussian(points, spacing, origin, 0.0, 0.5));
        const auto psi = grw::GridWavefunction::product(singles);
        const auto traj = grw::grw_evolve(psi, duration, params, rng);
        for (const auto& hit : traj.hits) {
            trace::TraceRecord rec;
            rec.stage = "hit";
            rec.description = "localization";
            rec.outcomes_json =
                json{{"t", hit.time}, {"particle", hit.particle}, {"center", hit.center}}.dump();
            t.records.push_back(std::move(rec));
        }
        const double expected_hits = params.total_rate() * duration;
        const double dev = std::abs(static_cast<double>(traj.hits.size()) - expected_hits);
        const bool pass = dev <= 4.0 * std::sqrt(expected_hits) + 1.0;
        t.records.push_back(invariant_record("hit count consistent with the total rate", pass,
                                             json{{"hits", traj.hits.size()},
                                                  {"expected", expected_hits}}));
    } else {
        throw std::invalid_argument("param 'mode': expected two-lump or evolve");
    }
}

// ---- csl -------------------------------------------------------------------

void run_csl(const ScenarioFile& file, const json& p, trace::RunTrace& t) {
    const std::vector<double> weights =
        p.contains("weights") ? p["weights"].get<std::vector<double>>()
                              : std::vector<double>{0.8, 0.2};
    if (weights.size() < 2) throw std::invalid_argument("param 'weights': need at least 2");
    std::vector<double> eigenvalues;
    if (p.contains("eigenvalues")) {
        eigenvalues = p["eigenvalues"].get<std::vector<double>>();
    } else {
        for (std::size_t k = 0; k < weights.size(); ++k)
            eigenvalues.push_back(k == 0 ? 1.0 : -static_cast<double>(k));
    }
    if (eigenvalues.size() != weights.size())
        throw std::invalid_argument("param 'eigenvalues': size must match weights");

    const Index dim = static_cast<Index>(weights.size());
    Mat a = Mat::Zero(dim, dim);
    Vec init(dim);
    double total = 0.0;
    for (double w : weights) total += w;
    for (Index k = 0; k < dim; ++k) {
        a(k, k) = eigenvalues[static_cast<std::size_t>(k)];
        init[k] = std::sqrt(weights[static_cast<std::size_t>(k)] / total);
    }
    csl::CslProcess process(Operator(Mat::Zero(dim, dim), {dim}, OpKind::Hermitian),
                            {Operator(a, {dim}, OpKind::Hermitian)}, p.value("gamma", 1.0));

    csl::CslRunConfig cfg;
    cfg.total_time = p.value("time", 10.0);
    cfg.dt = p.value("dt", 0.01);
    cfg.n_members = file.trials;
    cfg.n_records = p.value("records", 10);
    const std::string mode = p.value("mode", "cooked");
    if (mode == "raw") {
        cfg.mode = csl::NoiseMode::Raw;
    } else if (mode == "resampled") {
        cfg.mode = csl::NoiseMode::Resampled;
    } else if (mode == "cooked") {
        cfg.mode = csl::NoiseMode::CookedDrift;
    } else {
        throw std::invalid_argument("param 'mode': expected raw, resampled or cooked");
    }

    Rng rng(*file.seed);
    const StateVector initial(init, {dim});
    const auto result = csl_run(initial, process, cfg, rng);

    const std::size_t emit_members = std::min<std::size_t>(p.value("emit_members", 8), 1000);
    for (const auto& rec : result.records) {
        json line{{"t", rec.time},
                  {"raw_norm2_mean", rec.raw_norm2_mean},
                  {"manifold_probs", rec.manifold_probs}};
        trace::TraceRecord tr;
        tr.stage = "ensemble";
        tr.description = "recorded time";
        tr.outcomes_json = line.dump();
        t.records.push_back(std::move(tr));
    }
    for (std::size_t m = 0; m < std::min(emit_members, result.members.size()); ++m) {
        const auto& mem = result.members[m];
        json line{{"t", cfg.total_time},
                  {"member_id", m},
                  {"norm2", mem.state.norm2()},
                  {"raw_weight", mem.raw_weight},
                  {"manifold_weights", process.manifold_weights(mem.state)}};
        trace::TraceRecord tr;
        tr.stage = "trajectory";
        tr.description = "final member state";
        tr.outcomes_json = line.dump();
        t.records.push_back(std::move(tr));
    }

    std::vector<std::string> labels(weights.size());
    std::vector<double> expected(weights.size(), 0.0);
    for (std::size_t k = 0; k < weights.size(); ++k) {
        const std::size_t idx = process.manifold_index({eigenvalues[k]});
        labels[idx] = "eigenvalue " + std::to_string(eigenvalues[k]);
        expected[idx] = weights[k] / total;
    }
    std::vector<std::size_t> settled(weights.size(), 0);
    for (std::size_t k = 0; k < result.final_frequencies.size(); ++k)
        settled[k] = static_cast<std::size_t>(
            std::lround(result.final_frequencies[k] * static_cast<double>(cfg.n_members)));
    t.records.push_back(counts_record("cooked reduction frequencies", labels, settled, expected,
                                      "initial manifold weights"));

    if (cfg.mode == csl::NoiseMode::Raw) {
        bool ok = true;
        for (const auto& rec : result.records)
            if (std::abs(rec.raw_norm2_mean - 1.0) > 4.0 * rec.raw_norm2_stderr + 1e-9) ok = false;
        t.records.push_back(
            invariant_record("raw ensemble mean of ||psi||^2 stays at 1", ok));
    }
}

// ---- toy model -------------------------------------------------------------

toy::ScenarioConfig two_particle_config(const json& p) {
    const double v = p.value("velocity", 0.5);
    const double t_left = p.value("t_left", 2.0);
    const double t_right = p.value("t_right", 2.0);
    toy::ScenarioConfig cfg{
        {toy::WorldLine{{0.0, 0.0}, -v}, toy::WorldLine{{0.0, 0.0}, v}},
        {toy::Apparatus{"B", 0, {-v * t_left, t_left}, p.value("g_left", true)},
         toy::Apparatus{"A", 1, {v * t_right, t_right}, p.value("g_right", true)}},
        toy::two_particle_singlet(),
        spacetime::SpacelikeSurface::constant_time(0.0)};
    cfg.validate();
    return cfg;
}

void run_toy_one(const ScenarioFile& file, const json& p, trace::RunTrace& t) {
    const Complex plus = p.contains("plus_amp") ? parse_complex(p["plus_amp"], "plus_amp")
                                                : Complex(1.0, 0.0);
    const Complex minus = p.contains("minus_amp") ? parse_complex(p["minus_amp"], "minus_amp")
                                                  : Complex(1.0, 0.0);
    const double t_app = p.value("apparatus_t", 1.0);
    StateVector initial = toy::one_particle_state(plus, minus).normalized();
    toy::ScenarioConfig cfg{{toy::WorldLine{{0.0, 0.0}, 0.0}},
                            {toy::Apparatus{"A", 0, {0.0, t_app}, true}},
                            initial,
                            spacetime::SpacelikeSurface::constant_time(0.0)};
    cfg.validate();

    Rng rng(*file.seed);
    const double p_plus = std::norm(initial.amplitudes()[0]);
    std::vector<std::size_t> counts(2, 0);
    bool verdicts_ok = true;
    for (std::size_t trial = 0; trial < file.trials; ++trial) {
        Rng trial_rng = rng.split(trial);
        toy::EventLog log;
        const auto before =
            toy::property_at({0.0, t_app / 2}, 0, cfg, log, trial_rng);
        const auto after = toy::property_at({0.0, t_app + 1.0}, 0, cfg, log, trial_rng);
        if (before.definite || !after.definite) verdicts_ok = false;
        if (after.value != log.at("A").value) verdicts_ok = false;
        counts[after.value == 1 ? 0 : 1] += 1;
    }
    t.records.push_back(counts_record("registered outcome", {"+1", "-1"}, counts,
                                      {p_plus, 1.0 - p_plus}, "initial amplitudes"));
    t.records.push_back(invariant_record(
        "indefinite before the device, definite and matching after", verdicts_ok));
}

void run_toy_two(const ScenarioFile& file, const json& p, trace::RunTrace& t) {
    toy::ScenarioConfig cfg = two_particle_config(p);
    Rng rng(*file.seed);

    double top = 0.0;
    for (const auto& app : cfg.apparatuses) top = std::max(top, app.location.t);
    const auto above = spacetime::SpacelikeSurface::constant_time(top + 1.0);

    std::vector<std::size_t> joint(4, 0); // (B,A) in {++, +-, -+, --}
    std::size_t same = 0;
    for (std::size_t trial = 0; trial < file.trials; ++trial) {
        Rng trial_rng = rng.split(trial);
        toy::EventLog log;
        toy::state_on_surface(cfg, above, log, trial_rng);
        int b = 0, a = 0;
        if (log.has("B")) b = log.at("B").value;
        if (log.has("A")) a = log.at("A").value;
        if (b != 0 && a != 0) {
            joint[static_cast<std::size_t>((b == 1 ? 0 : 2) + (a == 1 ? 0 : 1))] += 1;
            if (a == b) ++same;
        }
    }
    const bool both_on = cfg.apparatus("A").on && cfg.apparatus("B").on;
    if (both_on) {
        t.records.push_back(counts_record("joint outcomes (left, right)",
                                          {"++", "+-", "-+", "--"}, joint,
                                          {0.0, 0.5, 0.5, 0.0}, "strict anticorrelation"));
        t.records.push_back(invariant_record("no equal-outcome pair", same == 0,
                                             json{{"same_outcome_trials", same}}));
    }
}

void run_toy_stats(const ScenarioFile& file, const json& p, trace::RunTrace& t) {
    toy::ScenarioConfig cfg = two_particle_config(p);
    Rng rng(*file.seed);
    const auto stats = toy::stats_parameter_independence(cfg, file.trials, rng);

    const char* side_names[2] = {"left", "right"};
    bool all_half = true;
    json table = json::array();
    for (int side = 0; side < 2; ++side)
        for (int g = 0; g < 2; ++g)
            for (int o = 0; o < 2; ++o) {
                const double freq = stats.p[side][g][o];
                table.push_back(json{{"side", side_names[side]},
                                     {"other_switch", g},
                                     {"outcome", o == 0 ? "+1" : "-1"},
                                     {"frequency", freq},
                                     {"expected", 0.5}});
                if (std::abs(freq - 0.5) > 3.0 * binomial_stddev(0.5, file.trials))
                    all_half = false;
            }
    trace::TraceRecord rec;
    rec.stage = "table";
    rec.description = "outcome frequencies by the other side's switch";
    rec.outcomes_json = table.dump();
    t.records.push_back(std::move(rec));
    t.records.push_back(invariant_record("all eight entries within 3 sigma of 1/2", all_half));
    t.records.push_back(invariant_record("no equal-outcome pair in both-on runs",
                                         stats.same_outcome_both_on == 0,
                                         json{{"same", stats.same_outcome_both_on}}));
}

void run_counterfactual(const ScenarioFile& file, const json& p, trace::RunTrace& t) {
    toy::ScenarioConfig both_on = two_particle_config(p);
    toy::ScenarioConfig left_off = both_on.with_switch("B", false);
    Rng rng(file.seed.value_or(0));

    double top = 0.0;
    for (const auto& app : both_on.apparatuses) top = std::max(top, app.location.t);
    const auto above = spacetime::SpacelikeSurface::constant_time(top + 1.0);

    // Case 1: both devices on, no hypothetical — plain inference.
    toy::EventLog log1;
    toy::state_on_surface(both_on, above, log1, rng);
    const auto v1 = toy::counterfactual_classify(
        {std::nullopt, "A", -log1.at("A").value}, both_on, log1);

    // Case 2: left device off; supposing it on at its space-like location.
    toy::EventLog log2;
    toy::state_on_surface(left_off, above, log2, rng);
    const auto v2 = toy::counterfactual_classify(
        {both_on.apparatus("B").location, "A", -log2.at("A").value}, left_off, log2);

    // Case 3: left device off; supposing one inside the right outcome's
    // causal future, on particle 1's world line.
    const double t_future = p.value("t_future", 8.0);
    const spacetime::Point t_point{left_off.particles[0].position_at(t_future), t_future};
    const auto v3 = toy::counterfactual_classify({t_point, "A", -log2.at("A").value}, left_off,
                                                 log2);

    auto verdict_name = [](toy::ClaimVerdict v) {
        return v == toy::ClaimVerdict::Legitimate ? "Legitimate" : "Illegitimate";
    };
    trace::TraceRecord rec;
    rec.stage = "verdicts";
    rec.description = "claim classification";
    rec.outcomes_json = json{{"actual_config", verdict_name(v1)},
                             {"spacelike_supposition", verdict_name(v2)},
                             {"future_supposition", verdict_name(v3)}}
                            .dump();
    t.records.push_back(std::move(rec));
    t.records.push_back(invariant_record(
        "verdicts follow the causal-past accessibility rule",
        v1 == toy::ClaimVerdict::Legitimate && v2 == toy::ClaimVerdict::Illegitimate &&
            v3 == toy::ClaimVerdict::Legitimate));

    // Deterministic-completion disagreement report.
    toy::HiddenVariableModel model;
    model.only_right_outcome = p.contains("only_right")
                                   ? p["only_right"].get<std::vector<int>>()
                                   : std::vector<int>{1, 1, -1, -1};
    model.both_on_right_outcome = p.contains("both_on_right")
                                      ? p["both_on_right"].get<std::vector<int>>()
                                      : std::vector<int>{1, -1, 1, -1};
    const auto report = toy::hv_counterfactual_demo(model);
    json lambdas = json::array();
    bool all_disagree = !report.empty();
    for (const auto& d : report) {
        lambdas.push_back(json{{"lambda", d.lambda},
                               {"same_lambda_left", d.same_lambda_left},
                               {"same_outcome_left", d.same_outcome_left_prediction},
                               {"selection_includes_minus_worlds",
                                d.selection_includes_minus_worlds}});
        if (!d.criteria_disagree) all_disagree = false;
    }
    trace::TraceRecord hv;
    hv.stage = "hidden-variable";
    hv.description = "accessibility criteria comparison";
    hv.outcomes_json = lambdas.dump();
    t.records.push_back(std::move(hv));
    t.records.push_back(
        invariant_record("the two accessibility criteria disagree on every flipped value",
                         all_disagree));
}

// ---- relativistic-t2 -------------------------------------------------------

void run_relativistic(const ScenarioFile& file, const json& p, trace::RunTrace& t) {
    std::optional<std::array<int, 3>> forced;
    if (p.contains("forced")) {
        const auto f = p["forced"].get<std::vector<int>>();
        if (f.size() != 3)
            throw std::invalid_argument("param 'forced': expected three outcomes");
        forced = std::array<int, 3>{f[0], f[1], f[2]};
    }
    const bool dump = p.value("dump_amplitudes", false);

    if (forced) {
        Rng rng(file.seed.value_or(0));
        const auto run = staged::run_full(forced, rng);
        const char* names[4] = {"sigma0", "sigma1", "sigma2", "final"};
        for (const auto& stage : run.stages)
            t.records.push_back(state_record(names[static_cast<int>(stage.tag)],
                                             "staged state", stage.state, dump));
        trace::TraceRecord rec;
        rec.stage = "outcomes";
        rec.description = "probe configuration";
        rec.outcomes_json = json{{"right", run.right_omegas}, {"all", run.final_omegas}}.dump();
        t.records.push_back(std::move(rec));
        t.records.push_back(invariant_record("pair sums zero and final system anticorrelated",
                                             true));
        return;
    }

    Rng rng(*file.seed);
    // Exact triple distribution, then a sampled sweep against it.
    const auto sigma1 = staged::evolve_sigma1(staged::initial_staged());
    std::vector<double> expected;
    std::vector<std::string> labels;
    for (int w6 = 1; w6 >= -1; --w6)
        for (int w4 = 1; w4 >= -1; --w4)
            for (int w6s = 1; w6s >= -1; --w6s) {
                expected.push_back(
                    staged::forced_triple_probability(sigma1, {w6, w4, w6s}));
                labels.push_back(std::to_string(w6) + "," + std::to_string(w4) + "," +
                                 std::to_string(w6s));
            }
    std::vector<std::size_t> counts(27, 0);
    bool invariants_ok = true;
    for (std::size_t trial = 0; trial < file.trials; ++trial) {
        Rng trial_rng = rng.split(trial);
        try {
            const auto run = staged::run_full(std::nullopt, trial_rng);
            const std::size_t idx =
                static_cast<std::size_t>((1 - run.right_omegas[0]) * 9 +
                                         (1 - run.right_omegas[1]) * 3 + (1 - run.right_omegas[2]));
            counts[idx] += 1;
        } catch (const std::logic_error&) {
            invariants_ok = false;
        }
    }
    t.records.push_back(counts_record("right-wing outcome triples", labels, counts, expected,
                                      "exact projection weights"));
    t.records.push_back(invariant_record(
        "every run ends anticorrelated with zero pair sums", invariants_ok));
}

} // namespace

const std::vector<std::string>& scenario_names() {
    static const std::vector<std::string> names{
        "tz",      "t2",        "signaling",      "grw",           "csl",
        "toy-one", "toy-two",   "toy-stats",      "counterfactual", "relativistic-t2"};
    return names;
}

bool needs_seed(const std::string& scenario, const std::string& params_json) {
    if (scenario == "counterfactual") return false;
    if (scenario == "relativistic-t2") {
        const json p = json::parse(params_json);
        return !p.contains("forced");
    }
    return true;
}

ScenarioFile parse_scenario_file(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("scenario file: ") + e.what());
    }
    if (!j.is_object()) throw std::invalid_argument("scenario file: expected an object");
    if (!j.contains("scenario") || !j["scenario"].is_string())
        throw std::invalid_argument("scenario file: missing string field 'scenario'");
    ScenarioFile f;
    f.scenario = j["scenario"].get<std::string>();
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned())
            throw std::invalid_argument("scenario file: field 'seed' must be an unsigned integer");
        f.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("trials")) {
        if (!j["trials"].is_number_unsigned() || j["trials"].get<std::uint64_t>() == 0)
            throw std::invalid_argument("scenario file: field 'trials' must be a positive integer");
        f.trials = j["trials"].get<std::size_t>();
    }
    if (j.contains("output")) {
        if (!j["output"].is_string())
            throw std::invalid_argument("scenario file: field 'output' must be a string");
        f.output = j["output"].get<std::string>();
    }
    f.params_json = j.value("params", json::object()).dump();
    return f;
}

std::string emit_summary(const trace::RunTrace& t) {
    if (t.records.empty()) return "{}";
    json tables = json::array();
    json invariants = json::array();
    bool pass = true;
    for (const auto& rec : t.records) {
        if (rec.stage == "counts") {
            const json out = json::parse(rec.outcomes_json);
            const json prob = json::parse(rec.probabilities_json);
            const auto counts = out["counts"].get<std::vector<std::size_t>>();
            const auto expected = prob["expected"].get<std::vector<double>>();
            std::size_t total = 0;
            for (auto c : counts) total += c;
            json freqs = json::array();
            for (auto c : counts)
                freqs.push_back(total ? static_cast<double>(c) / static_cast<double>(total) : 0.0);
            std::size_t dof = 0;
            for (double e : expected)
                if (e > 0.0) ++dof;
            json entry{{"description", rec.description},
                       {"labels", out["labels"]},
                       {"counts", counts},
                       {"frequencies", freqs},
                       {"expected", expected},
                       {"source", prob["source"]}};
            if (dof >= 2 && total > 0) {
                const double stat = chi2_statistic(counts, expected);
                const double critical = chi2_critical(dof - 1, kSignificance);
                entry["chi2"] = stat;
                entry["chi2_critical"] = critical;
                entry["pass"] = stat <= critical;
                if (stat > critical) pass = false;
            }
            tables.push_back(std::move(entry));
        } else if (rec.stage == "table") {
            tables.push_back(
                json{{"description", rec.description}, {"entries", json::parse(rec.outcomes_json)}});
        } else if (rec.stage == "invariant") {
            const json out = json::parse(rec.outcomes_json);
            json entry{{"description", rec.description}, {"pass", out["pass"]}};
            if (out.contains("detail")) entry["detail"] = out["detail"];
            invariants.push_back(std::move(entry));
            if (!out["pass"].get<bool>()) pass = false;
        }
    }
    return json{{"tables", tables}, {"invariants", invariants}, {"pass", pass}}.dump();
}

ScenarioResult run_scenario(const ScenarioFile& file) {
    ScenarioResult result;
    result.trace.scenario = file.scenario;
    result.trace.seed = file.seed.value_or(0);

    const auto& names = scenario_names();
    if (std::find(names.begin(), names.end(), file.scenario) == names.end()) {
        result.exit_code = kConfigError;
        std::ostringstream msg;
        msg << "unknown scenario '" << file.scenario << "'; valid names:";
        for (const auto& n : names) msg << ' ' << n;
        result.message = msg.str();
        return result;
    }

    json params;
    try {
        params = json::parse(file.params_json);
        if (!params.is_object()) throw std::invalid_argument("params: expected an object");
        if (needs_seed(file.scenario, file.params_json) && !file.seed) {
            throw std::invalid_argument("a seed is required for stochastic scenarios");
        }
    } catch (const std::exception& e) {
        result.exit_code = kConfigError;
        result.message = e.what();
        return result;
    }

    try {
        if (file.scenario == "tz") {
            run_tz(file, params, result.trace);
        } else if (file.scenario == "t2") {
            run_t2(file, params, result.trace);
        } else if (file.scenario == "signaling") {
            run_signaling(file, params, result.trace);
        } else if (file.scenario == "grw") {
            run_grw(file, params, result.trace);
        } else if (file.scenario == "csl") {
            run_csl(file, params, result.trace);
        } else if (file.scenario == "toy-one") {
            run_toy_one(file, params, result.trace);
        } else if (file.scenario == "toy-two") {
            run_toy_two(file, params, result.trace);
        } else if (file.scenario == "toy-stats") {
            run_toy_stats(file, params, result.trace);
        } else if (file.scenario == "counterfactual") {
            run_counterfactual(file, params, result.trace);
        } else if (file.scenario == "relativistic-t2") {
            run_relativistic(file, params, result.trace);
        }
    } catch (const std::invalid_argument& e) {
        result.exit_code = kConfigError;
        result.message = e.what();
        return result;
    } catch (const std::exception& e) {
        result.exit_code = kInvariantFailure;
        result.message = e.what();
        return result;
    }

    result.trace.summary_json = emit_summary(result.trace);
    if (!result.trace.summary_json.empty() && result.trace.summary_json != "{}") {
        const json summary = json::parse(result.trace.summary_json);
        if (summary.contains("pass") && !summary["pass"].get<bool>()) {
            result.exit_code = kInvariantFailure;
            result.message = "invariant failure (see summary)";
        }
    }

    if (!file.output.empty()) {
        if (file.output == "-") {
            trace::write_jsonl(result.trace, std::cout);
        } else {
            std::ofstream os(file.output);
            if (!os) {
                result.exit_code = kConfigError;
                result.message = "cannot open output file " + file.output;
                return result;
            }
            trace::write_jsonl(result.trace, os);
        }
    }
    if (result.message.empty())
        result.message = result.exit_code == kOk ? "ok" : "invariant failure";
    return result;
}

} // namespace redsim::scenarios
