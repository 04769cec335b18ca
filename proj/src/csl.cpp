#include "redsim/csl.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace redsim::csl {

namespace {

// Common eigenmanifolds of a commuting hermitian family, found by refining
// the eigenspaces of each operator in turn.
std::vector<Manifold> common_manifolds(const std::vector<Operator>& a_ops, Index dim) {
    struct Block {
        std::vector<double> values;
        Mat basis; // columns: orthonormal basis of the block
    };
    std::vector<Block> blocks{{std::vector<double>{}, Mat::Identity(dim, dim)}};
    const double tol = 1e-8;
    for (const auto& a : a_ops) {
        std::vector<Block> next;
        for (const auto& blk : blocks) {
            const Mat restricted = blk.basis.adjoint() * a.entries() * blk.basis;
            Eigen::SelfAdjointEigenSolver<Mat> solver(restricted);
            const auto& vals = solver.eigenvalues();
            const Mat vecs = blk.basis * solver.eigenvectors();
            Index start = 0;
            while (start < vals.size()) {
                Index stop = start + 1;
                while (stop < vals.size() && vals[stop] - vals[start] < tol) ++stop;
                Block b;
                b.values = blk.values;
                b.values.push_back(vals.segment(start, stop - start).mean());
                b.basis = vecs.middleCols(start, stop - start);
                next.push_back(std::move(b));
                start = stop;
            }
        }
        blocks = std::move(next);
    }
    std::vector<Manifold> out;
    out.reserve(blocks.size());
    for (auto& blk : blocks)
        out.push_back(Manifold{std::move(blk.values), blk.basis * blk.basis.adjoint()});
    return out;
}

} // namespace

CslProcess::CslProcess(Operator hamiltonian, std::vector<Operator> a_ops, double gamma)
    : h_(std::move(hamiltonian)), a_ops_(std::move(a_ops)), gamma_(gamma) {
    if (gamma_ < 0.0) throw std::invalid_argument("CslProcess: gamma must be nonnegative");
    const Index n = h_.dim();
    for (const auto& a : a_ops_) {
        if (a.dim() != n) throw std::invalid_argument("CslProcess: operator dimension mismatch");
        if (a.hermiticity_defect() > kStructuralTol)
            throw std::invalid_argument("CslProcess: reduction operators must be hermitian");
    }
    for (std::size_t i = 0; i < a_ops_.size(); ++i)
        for (std::size_t j = i + 1; j < a_ops_.size(); ++j) {
            const Mat comm = a_ops_[i].entries() * a_ops_[j].entries() -
                             a_ops_[j].entries() * a_ops_[i].entries();
            if (comm.cwiseAbs().maxCoeff() > kStructuralTol)
                throw std::invalid_argument("CslProcess: reduction operators must commute");
        }
    drift_ = Complex(0.0, -1.0) * h_.entries();
    for (const auto& a : a_ops_) drift_ -= 0.5 * gamma_ * (a.entries() * a.entries());
    manifolds_ = common_manifolds(a_ops_, n);
}

void CslProcess::step(CslEnsembleMember& member, double dt, Rng& rng, NoiseMode mode,
                      bool record_noise) const {
    if (dt <= 0.0) throw std::invalid_argument("CslProcess::step: dt must be positive");
    const Vec& psi = member.state.amplitudes();
    const double sigma = std::sqrt(gamma_ * dt);

    Vec dpsi = drift_ * psi * dt;
    if (record_noise && member.noise_history.size() != a_ops_.size())
        member.noise_history.assign(a_ops_.size(), {});

    const double n2 = psi.squaredNorm();
    for (std::size_t i = 0; i < a_ops_.size(); ++i) {
        double shift = 0.0;
        if (mode == NoiseMode::CookedDrift) {
            const double expect =
                std::real(Complex(psi.dot(a_ops_[i].entries() * psi))) / n2;
            shift = 2.0 * gamma_ * expect * dt;
        }
        const double dw = rng.gaussian(shift, sigma);
        dpsi += dw * (a_ops_[i].entries() * psi);
        member.log_raw_density -= dw * dw / (2.0 * gamma_ * dt);
        if (record_noise) member.noise_history[i].push_back(dw);
    }

    StateVector next(psi + dpsi, member.state.factor_dims());
    if (mode == NoiseMode::CookedDrift) next = next.normalized();
    member.state = std::move(next);
}

std::size_t CslProcess::manifold_index(const std::vector<double>& eigenvalues, double tol) const {
    for (std::size_t k = 0; k < manifolds_.size(); ++k) {
        const auto& vals = manifolds_[k].eigenvalues;
        if (vals.size() != eigenvalues.size()) continue;
        bool match = true;
        for (std::size_t i = 0; i < vals.size(); ++i)
            if (std::abs(vals[i] - eigenvalues[i]) > tol) match = false;
        if (match) return k;
    }
    throw std::out_of_range("CslProcess: no manifold with those eigenvalues");
}

std::vector<double> CslProcess::manifold_weights(const StateVector& psi) const {
    std::vector<double> w(manifolds_.size());
    for (std::size_t k = 0; k < manifolds_.size(); ++k) {
        const Vec proj = manifolds_[k].projector * psi.amplitudes();
        w[k] = proj.squaredNorm();
    }
    return w;
}

namespace {

double effective_sample_size(const std::vector<double>& weights) {
    double s = 0.0, s2 = 0.0;
    for (double w : weights) {
        s += w;
        s2 += w * w;
    }
    return (s2 > 0.0) ? s * s / s2 : 0.0;
}

// Systematic resampling by the cooked weights; selected states are
// renormalized and their importance weights reset.
void resample(std::vector<CslEnsembleMember>& members, Rng& rng) {
    const std::size_t n = members.size();
    std::vector<double> cooked(n);
    double total = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
        cooked[m] = members[m].raw_weight * members[m].state.norm2();
        total += cooked[m];
    }
    if (total <= 0.0) throw std::runtime_error("csl resample: ensemble has zero cooked mass");
    const double step = total / static_cast<double>(n);
    double u = rng.uniform() * step;
    std::vector<CslEnsembleMember> next;
    next.reserve(n);
    double acc = 0.0;
    std::size_t src = 0;
    for (std::size_t m = 0; m < n; ++m) {
        const double target = u + static_cast<double>(m) * step;
        while (acc + cooked[src] <= target && src + 1 < n) acc += cooked[src++];
        CslEnsembleMember picked = members[src];
        picked.state = picked.state.normalized();
        picked.raw_weight = 1.0;
        next.push_back(std::move(picked));
    }
    members = std::move(next);
}

} // namespace

CslRunResult csl_run(const StateVector& initial, const CslProcess& process,
                     const CslRunConfig& config, Rng& rng) {
    if (!initial.is_normalized())
        throw std::invalid_argument("csl_run: initial state not normalized");
    if (config.n_members == 0) throw std::invalid_argument("csl_run: empty ensemble");

    const std::size_t steps =
        static_cast<std::size_t>(std::ceil(config.total_time / config.dt - 1e-12));
    std::vector<std::size_t> record_steps;
    record_steps.push_back(0);
    for (std::size_t r = 1; r <= config.n_records; ++r)
        record_steps.push_back(steps * r / config.n_records);

    std::vector<CslEnsembleMember> members;
    members.reserve(config.n_members);
    std::vector<Rng> streams;
    streams.reserve(config.n_members);
    for (std::size_t m = 0; m < config.n_members; ++m) {
        members.push_back(CslEnsembleMember{initial, 1.0, 0.0, {}});
        streams.push_back(rng.split(m));
    }
    Rng resample_rng = rng.split(config.n_members + 1);

    CslRunResult result;
    auto record_now = [&](double t) {
        CslRecord rec;
        rec.time = t;
        double mean = 0.0, m2 = 0.0;
        std::vector<double> probs(process.manifolds().size(), 0.0);
        double cooked_total = 0.0;
        for (const auto& mem : members) {
            const double n2 = mem.state.norm2();
            mean += n2;
            m2 += n2 * n2;
            const double cooked = mem.raw_weight * n2;
            cooked_total += cooked;
            const auto w = process.manifold_weights(mem.state);
            for (std::size_t k = 0; k < probs.size(); ++k)
                probs[k] += mem.raw_weight * w[k];
        }
        const double n = static_cast<double>(members.size());
        mean /= n;
        const double var = std::max(0.0, m2 / n - mean * mean);
        rec.raw_norm2_mean = mean;
        rec.raw_norm2_stderr = std::sqrt(var / n);
        for (double& p : probs) p /= cooked_total;
        rec.manifold_probs = std::move(probs);
        result.records.push_back(std::move(rec));
    };

    record_now(0.0);
    std::size_t next_record = 1;
    for (std::size_t s = 1; s <= steps; ++s) {
        for (std::size_t m = 0; m < members.size(); ++m)
            process.step(members[m], config.dt, streams[m],
                         config.mode == NoiseMode::Resampled ? NoiseMode::Raw : config.mode,
                         config.record_noise);
        if (config.mode == NoiseMode::Resampled) {
            std::vector<double> cooked(members.size());
            for (std::size_t m = 0; m < members.size(); ++m)
                cooked[m] = members[m].raw_weight * members[m].state.norm2();
            if (effective_sample_size(cooked) <
                config.resample_ess_fraction * static_cast<double>(members.size()))
                resample(members, resample_rng);
        }
        while (next_record < record_steps.size() && record_steps[next_record] == s) {
            record_now(static_cast<double>(s) * config.dt);
            ++next_record;
        }
    }

    // Final reduction bookkeeping: a member counts as settled in a manifold
    // once that manifold holds nearly all of its norm.
    std::vector<double> freq(process.manifolds().size(), 0.0);
    double cooked_total = 0.0;
    std::vector<double> cooked(members.size());
    for (std::size_t m = 0; m < members.size(); ++m) {
        cooked[m] = members[m].raw_weight * members[m].state.norm2();
        cooked_total += cooked[m];
    }
    for (std::size_t m = 0; m < members.size(); ++m) {
        const auto w = process.manifold_weights(members[m].state);
        const double n2 = members[m].state.norm2();
        for (std::size_t k = 0; k < freq.size(); ++k) {
            if (w[k] / n2 >= config.settled_threshold) {
                freq[k] += cooked[m] / cooked_total;
                break;
            }
        }
    }
    result.final_frequencies = std::move(freq);
    result.final_effective_sample_size = effective_sample_size(cooked);
    result.members = std::move(members);
    return result;
}

double grw_equivalent_gamma(double lambda, double alpha) {
    return lambda * std::pow(4.0 * std::numbers::pi / alpha, 1.5);
}

std::vector<Operator> mass_density_ops(const std::vector<double>& site_positions,
                                       const std::vector<double>& particle_masses,
                                       double alpha) {
    if (site_positions.empty() || particle_masses.empty())
        throw std::invalid_argument("mass_density_ops: empty lattice or particle list");
    if (alpha <= 0.0) throw std::invalid_argument("mass_density_ops: alpha must be positive");

    const Index sites = static_cast<Index>(site_positions.size());
    const std::size_t n_particles = particle_masses.size();
    std::vector<Index> dims(n_particles, sites);
    const Index dim = product_dim(dims);
    const double pref = std::sqrt(alpha / (2.0 * std::numbers::pi));

    std::vector<Operator> ops;
    ops.reserve(site_positions.size());
    for (double r : site_positions) {
        Mat m = Mat::Zero(dim, dim);
        for (Index flat = 0; flat < dim; ++flat) {
            Index rem = flat;
            double value = 0.0;
            for (std::size_t p = n_particles; p-- > 0;) {
                const Index q = rem % sites;
                rem /= sites;
                const double d = site_positions[static_cast<std::size_t>(q)] - r;
                value += particle_masses[p] * pref * std::exp(-0.5 * alpha * d * d);
            }
            m(flat, flat) = value;
        }
        ops.emplace_back(std::move(m), dims, OpKind::Hermitian);
    }
    return ops;
}

} // namespace redsim::csl
