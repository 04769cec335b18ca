// Acceptance suite: every release criterion in one binary, one PASS/FAIL
// line each. Exit status is the number of failed criteria.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "redsim/csl.hpp"
#include "redsim/grw.hpp"
#include "redsim/protocol.hpp"
#include "redsim/staged_protocol.hpp"
#include "redsim/stats.hpp"
#include "redsim/toy_model.hpp"

using namespace redsim;
using namespace redsim::protocol;

namespace {

const Complex kI{0.0, 1.0};

struct Check {
    bool ok = true;
    std::ostringstream detail;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            detail << (detail.tellp() > 0 ? "; " : "") << what;
        }
    }
};

StateVector blockstate(const StateVector& sys, const StateVector& p36, const StateVector& p24,
                       const StateVector& p36s) {
    return kron(kron(kron(sys, p36), p24), p36s);
}

StateVector pair_combo(Complex up, Complex center, Complex down) {
    return pair_state_for_tz(1).scaled(up).plus(probe_pair_state().scaled(center)).plus(
        pair_state_for_tz(-1).scaled(down));
}

StateVector pair_basis(int wa, int wb) {
    const std::array<Index, 2> digits{probe_index(wa), probe_index(wb)};
    return StateVector::basis_state({3, 3}, digits);
}

double phase_aligned_diff(const StateVector& a, const StateVector& b) {
    Complex phase = a.inner(b);
    if (std::abs(phase) == 0.0) return 2.0;
    phase /= std::abs(phase);
    return (a.amplitudes() * phase - b.amplitudes()).cwiseAbs().maxCoeff();
}

StateVector expected_after_u(int which) {
    const StateVector& phi = probe_pair_state();
    const StateVector& up = pair_state_for_tz(1);
    const StateVector& down = pair_state_for_tz(-1);
    const double h = 0.5 / std::sqrt(2.0);
    switch (which) {
        case 0:
            return blockstate(system_basis(0), up, pair_combo(0.25, 0.5, 0.25), up)
                .plus(blockstate(system_basis(3), up, pair_combo(-0.25, 0.5, -0.25), down))
                .plus(blockstate(triplet_z_state(), up, pair_combo(kI * h, 0.0, -kI * h), phi));
        case 3:
            return blockstate(system_basis(0), down, pair_combo(-0.25, 0.5, -0.25), up)
                .plus(blockstate(system_basis(3), down, pair_combo(0.25, 0.5, 0.25), down))
                .plus(blockstate(triplet_z_state(), down, pair_combo(-kI * h, 0.0, kI * h), phi));
        default:
            return blockstate(system_basis(0), phi, pair_combo(-kI * h, 0.0, kI * h), up)
                .plus(blockstate(system_basis(3), phi, pair_combo(kI * h, 0.0, -kI * h), down))
                .plus(blockstate(triplet_z_state(), phi, pair_combo(0.5, 0.0, 0.5), phi));
    }
}

// ---- criterion 1: exact protocol algebra ------------------------------------

void criterion_1(Check& c) {
    c.require(u_z_full().unitarity_defect() <= 1e-10, "z coupling unitarity");
    c.require(u_y_full().unitarity_defect() <= 1e-10, "y coupling unitarity");
    c.require(u_z_star_full().unitarity_defect() <= 1e-10, "second z coupling unitarity");
    c.require(u_total().unitarity_defect() <= 1e-10, "total coupling unitarity");

    // the four product-basis actions of the z coupling
    struct Case {
        int basis;
        const StateVector* probe;
    };
    const Case cases[] = {{0, &pair_state_for_tz(1)},
                          {3, &pair_state_for_tz(-1)},
                          {1, &probe_pair_state()},
                          {2, &probe_pair_state()}};
    for (const auto& cs : cases) {
        const StateVector out = tz_unitary().apply(kron(system_basis(cs.basis), probe_pair_state()));
        const StateVector expect = kron(system_basis(cs.basis), *cs.probe);
        c.require((out.amplitudes() - expect.amplitudes()).cwiseAbs().maxCoeff() <= 1e-10,
                  "z-coupling action on basis state " + std::to_string(cs.basis));
    }

    // the anticorrelated fixed point and the three branch expansions
    const StateVector singlet_out = apply_u_total(singlet_state());
    const StateVector singlet_expect = blockstate(singlet_state(), probe_pair_state(),
                                                  probe_pair_state(), probe_pair_state());
    c.require(phase_aligned_diff(singlet_out, singlet_expect) <= 1e-10,
              "anticorrelated state expansion");
    const char* names[3] = {"up-up expansion", "down-down expansion", "triplet expansion"};
    const int which[3] = {0, 3, 4};
    for (int k = 0; k < 3; ++k) {
        const StateVector in = which[k] == 4 ? triplet_z_state() : system_basis(which[k]);
        c.require(phase_aligned_diff(apply_u_total(in), expected_after_u(which[k])) <= 1e-10,
                  names[k]);
    }
}

// ---- criterion 2: classification soundness ----------------------------------

void criterion_2(Check& c) {
    // z-protocol sum rule against the branch eigenvalue, all probe outcomes
    const int tz_of_basis[4] = {1, 0, 0, -1};
    for (int b = 0; b < 4; ++b) {
        const StateVector out = tz_unitary().apply(kron(system_basis(b), probe_pair_state()));
        for (Index pa = 0; pa < 3; ++pa)
            for (Index pb = 0; pb < 3; ++pb) {
                double mass = 0.0;
                for (Index s = 0; s < 4; ++s) {
                    const std::array<Index, 4> digits{s / 2, s % 2, pa, pb};
                    mass += std::norm(out.amplitude(digits));
                }
                if (mass < 1e-20) continue;
                c.require(classify_tz(probe_omega(pa) + probe_omega(pb)) == tz_of_basis[b],
                          "sum rule mismatch");
            }
    }

    // full classification table against brute-force branch projection
    std::size_t mismatches = 0;
    for (int b = 0; b < 4; ++b) {
        const StateVector out = apply_u_total(system_basis(b));
        const Vec& a = out.amplitudes();
        for (Index tuple = 0; tuple < kProbeTupleCount; ++tuple) {
            Vec sys(4);
            double mass = 0.0;
            for (Index s = 0; s < 4; ++s) {
                sys[s] = a[s * kProbeTupleCount + tuple];
                mass += std::norm(sys[s]);
            }
            if (mass < 1e-20) continue;
            std::array<int, 6> w{};
            Index rem = tuple;
            for (std::size_t k = 6; k-- > 0;) {
                w[k] = probe_omega(rem % 3);
                rem /= 3;
            }
            const T2Class cls = classify_t2(w[0] + w[1], w[2] + w[3], w[4] + w[5]);
            const StateVector reduced = StateVector(sys, {2, 2}).normalized();
            if (reduced.overlap(canonical_state(cls)) < 1.0 - 1e-10) ++mismatches;
        }
    }
    c.require(mismatches == 0,
              "classification/projection mismatches: " + std::to_string(mismatches));
}

// ---- criterion 3: no-signaling ----------------------------------------------

void criterion_3(Check& c) {
    const std::size_t n = 100000;
    Rng rng(31);
    for (NonlocalMode mode : {NonlocalMode::Tz, NonlocalMode::T2}) {
        std::array<std::array<std::size_t, 2>, 2> counts{};
        for (int flip = 0; flip < 2; ++flip)
            for (std::size_t trial = 0; trial < n; ++trial) {
                Rng r = rng.split((static_cast<std::uint64_t>(mode) * 2 + flip) * n + trial);
                const int v = signaling_scenario(flip == 1, mode, r);
                ++counts[static_cast<std::size_t>(flip)][v == 1 ? 0 : 1];
            }
        std::size_t dof = 0;
        const double stat = chi2_homogeneity(counts[0], counts[1], &dof);
        const bool indistinguishable = dof == 0 || stat <= chi2_critical(dof, 0.001);
        c.require(indistinguishable, "flip distinguishable in protocol mode");
        if (mode == NonlocalMode::T2) {
            for (int flip = 0; flip < 2; ++flip) {
                const double freq = double(counts[flip][0]) / double(n);
                c.require(std::abs(freq - 0.5) <= 3.0 * binomial_stddev(0.5, n),
                          "full-protocol outcome frequency off 1/2");
            }
        } else {
            c.require(counts[0][0] == n && counts[1][0] == n,
                      "z-protocol outcome not certain");
        }
    }
}

// ---- criterion 4: staged worked cases ---------------------------------------

void criterion_4(Check& c) {
    using namespace redsim::staged;
    const StagedState s1 = evolve_sigma1(initial_staged());

    const StagedState f000 = evolve_final(reduce_right(s1, {0, 0, 0}));
    const StateVector e000 =
        blockstate(singlet_state(), pair_basis(0, 0), pair_basis(0, 0), pair_basis(0, 0));
    c.require(phase_aligned_diff(f000.state, e000) <= 1e-10, "all-zero worked case");

    const StagedState f100 = evolve_final(reduce_right(s1, {1, 0, 0}));
    const StateVector e100 =
        blockstate(singlet_state(), pair_basis(-1, 1), pair_basis(0, 0), pair_basis(0, 0));
    c.require(phase_aligned_diff(f100.state, e100) <= 1e-10, "one-nonzero worked case");

    Rng rng(41);
    std::size_t reachable = 0;
    for (int w6 = -1; w6 <= 1; ++w6)
        for (int w4 = -1; w4 <= 1; ++w4)
            for (int w6s = -1; w6s <= 1; ++w6s) {
                const std::array<int, 3> triple{w6, w4, w6s};
                if (forced_triple_probability(s1, triple) <= 0.0) continue;
                ++reachable;
                const auto run = run_full(triple, rng);
                c.require(run.final_omegas[0] + run.final_omegas[1] == 0 &&
                              run.final_omegas[2] + run.final_omegas[3] == 0 &&
                              run.final_omegas[4] + run.final_omegas[5] == 0,
                          "pair sums nonzero in forced sweep");
                c.require(run.final_system.overlap(singlet_state()) >= 1.0 - 1e-10,
                          "final system not anticorrelated in forced sweep");
            }
    c.require(reachable >= 2, "forced sweep found too few reachable triples");
}

// ---- criterion 5: hit dynamics ----------------------------------------------

void criterion_5(Check& c) {
    using namespace redsim::grw;
    const double s = 0.25, d = 20.0, alpha = 1.0;
    const Index points = 256;
    const double spacing = 0.15;
    const double origin = -spacing * double(points - 1) / 2.0;
    const auto left = GridWavefunction::gaussian(points, spacing, origin, -d / 2, s);
    const auto right = GridWavefunction::gaussian(points, spacing, origin, d / 2, s);
    const auto psi = GridWavefunction::superpose(left, right, 1.0, 1.0);
    GrwParams params{1.0, alpha, {1.0}};

    // analytic center-density oracle
    const double shrink = 1.0 + 2.0 * alpha * s * s;
    std::vector<double> oracle(static_cast<std::size_t>(points));
    double oracle_total = 0.0;
    for (Index j = 0; j < points; ++j) {
        const double x = psi.position(0, j);
        oracle[static_cast<std::size_t>(j)] =
            std::exp(-alpha * (x + d / 2) * (x + d / 2) / shrink) +
            std::exp(-alpha * (x - d / 2) * (x - d / 2) / shrink);
        oracle_total += oracle[static_cast<std::size_t>(j)];
    }
    for (double& v : oracle) v /= oracle_total;

    Rng rng(51);
    const std::size_t n = 10000;
    std::size_t left_count = 0;
    std::vector<std::size_t> center_counts(oracle.size(), 0);
    for (std::size_t trial = 0; trial < n; ++trial) {
        Rng r = rng.split(trial);
        const auto [center, post] = grw_hit(psi, 0, params, r);
        if (center < 0) ++left_count;
        const Index j = static_cast<Index>(std::lround((center - psi.position(0, 0)) / spacing));
        ++center_counts[static_cast<std::size_t>(j)];
    }
    c.require(std::abs(double(left_count) / double(n) - 0.5) <= 3.0 * binomial_stddev(0.5, n),
              "two-lump frequencies off 1/2");
    c.require(ks_statistic_discrete(center_counts, oracle) <= ks_critical(n, 0.001),
              "center distribution fails KS against the analytic density");

    // inter-hit times exponential at lambda * m / m0
    GrwParams timing{0.5, alpha, {2.0}}; // rate 1.0
    const auto small = GridWavefunction::gaussian(64, 0.3, -9.45, 0.0, 0.5);
    const auto traj = grw_evolve(small, 4000.0, timing, rng);
    std::vector<double> gaps;
    double prev = 0.0;
    for (const auto& h : traj.hits) {
        gaps.push_back(h.time - prev);
        prev = h.time;
    }
    std::sort(gaps.begin(), gaps.end());
    std::vector<double> cdf(gaps.size());
    for (std::size_t k = 0; k < gaps.size(); ++k) cdf[k] = 1.0 - std::exp(-gaps[k]);
    c.require(ks_statistic(gaps, cdf) <= ks_critical(gaps.size(), 0.001),
              "inter-hit times fail the exponential KS test");

    // constituent-count amplification
    GrwParams multi{1.0, alpha, {1.0, 1.0, 1.0}};
    std::vector<GridWavefunction> singles(3,
                                          GridWavefunction::gaussian(16, 0.5, -3.75, 0.0, 0.5));
    const auto lump = GridWavefunction::product(singles);
    const auto multi_traj = grw_evolve(lump, 400.0, multi, rng);
    const double expected_hits = 3.0 * 400.0;
    c.require(std::abs(double(multi_traj.hits.size()) - expected_hits) <=
                  3.0 * std::sqrt(expected_hits),
              "total rate not amplified by the constituent count");
}

// ---- criterion 6: continuous reduction --------------------------------------

void criterion_6(Check& c) {
    using namespace redsim::csl;
    Mat a = Mat::Zero(2, 2);
    a(0, 0) = 1.0;
    a(1, 1) = -1.0;
    const CslProcess process(Operator(Mat::Zero(2, 2), {2}, OpKind::Hermitian),
                             {Operator(a, {2}, OpKind::Hermitian)}, 1.0);
    Vec init(2);
    init << std::sqrt(0.8), std::sqrt(0.2);
    const StateVector initial(init, {2});
    const std::size_t plus = process.manifold_index({1.0});

    // cooked reduction frequencies at gamma * t = 10
    CslRunConfig cooked;
    cooked.total_time = 10.0;
    cooked.dt = 0.01;
    cooked.n_members = 10000;
    cooked.n_records = 4;
    cooked.mode = NoiseMode::CookedDrift;
    Rng rng(61);
    const auto run = csl_run(initial, process, cooked, rng);
    c.require(std::abs(run.final_frequencies[plus] - 0.8) <=
                  3.0 * binomial_stddev(0.8, cooked.n_members),
              "reduction frequency off the initial weight");
    c.require(run.final_frequencies[0] + run.final_frequencies[1] >= 0.999,
              "trajectories left unreduced at gamma t = 10");

    // raw-measure martingale at every recorded time
    CslRunConfig raw;
    raw.total_time = 1.0;
    raw.dt = 0.01;
    raw.n_members = 10000;
    raw.n_records = 10;
    raw.mode = NoiseMode::Raw;
    Rng rng2(62);
    const auto raw_run = csl_run(initial, process, raw, rng2);
    for (const auto& rec : raw_run.records) {
        if (rec.time == 0.0) continue;
        c.require(std::abs(rec.raw_norm2_mean - 1.0) <= 3.0 * rec.raw_norm2_stderr,
                  "raw mean of ||psi||^2 drifted at t = " + std::to_string(rec.time));
    }

    // dt-halving stability
    CslRunConfig half = cooked;
    half.dt = 0.005;
    Rng rng3(63);
    const auto fine = csl_run(initial, process, half, rng3);
    const double band = 3.0 * std::sqrt(2.0) * binomial_stddev(0.8, cooked.n_members);
    c.require(std::abs(fine.final_frequencies[plus] - run.final_frequencies[plus]) <= band,
              "reduction frequencies unstable under dt halving");
}

// ---- criterion 7: toy-model statistics and consistency -----------------------

toy::ScenarioConfig standard_pair(bool left_on, bool right_on) {
    toy::ScenarioConfig cfg{{toy::WorldLine{{0.0, 0.0}, -0.5}, toy::WorldLine{{0.0, 0.0}, 0.5}},
                            {toy::Apparatus{"B", 0, {-1.0, 2.0}, left_on},
                             toy::Apparatus{"A", 1, {1.0, 2.0}, right_on}},
                            toy::two_particle_singlet(),
                            spacetime::SpacelikeSurface::constant_time(0.0, -500.0, 500.0)};
    cfg.validate();
    return cfg;
}

void criterion_7(Check& c) {
    using namespace redsim::toy;
    const auto cfg = standard_pair(true, true);
    const auto above = spacetime::SpacelikeSurface::constant_time(10.0, -500.0, 500.0);

    // perfect anticorrelation over 1e5 both-on runs
    Rng rng(71);
    std::size_t same = 0;
    for (std::size_t trial = 0; trial < 100000; ++trial) {
        Rng r = rng.split(trial);
        EventLog log;
        state_on_surface(cfg, above, log, r);
        if (log.at("A").value == log.at("B").value) ++same;
    }
    c.require(same == 0, "equal-outcome events: " + std::to_string(same));

    // all eight conditional entries at 1/2
    Rng rng2(72);
    const std::size_t n = 100000;
    const auto stats = stats_parameter_independence(cfg, n, rng2);
    for (int side = 0; side < 2; ++side)
        for (int g = 0; g < 2; ++g)
            for (int o = 0; o < 2; ++o)
                c.require(std::abs(stats.p[side][g][o] - 0.5) <= 3.0 * binomial_stddev(0.5, n),
                          "conditional outcome frequency off 1/2");

    // composition consistency over random intermediate surfaces
    Rng rng3(73);
    for (int rep = 0; rep < 1000; ++rep) {
        Rng r = rng3.split(rep);
        std::vector<spacetime::Point> knots;
        double x = -30.0, t = r.uniform(0.0, 6.0);
        knots.push_back({x, t});
        for (int s = 0; s < 5; ++s) {
            x += 12.0;
            t = std::min(9.0, std::max(0.0, t + r.uniform(-0.9, 0.9) * 12.0));
            knots.push_back({x, t});
        }
        const auto mid = spacetime::SpacelikeSurface::pointwise_max(
            spacetime::SpacelikeSurface(std::move(knots)), cfg.sigma0);
        EventLog log;
        const StateVector direct = state_on_surface(cfg, above, log, r);
        EventLog replay = log;
        state_on_surface(cfg, mid, replay, r);
        const StateVector via = state_on_surface(cfg, above, replay, r);
        if ((via.amplitudes() - direct.amplitudes()).norm() != 0.0) {
            c.require(false, "composition consistency broken");
            break;
        }
    }

    // boost invariance of causal verdicts
    Rng rng4(74);
    for (int rep = 0; rep < 1000; ++rep) {
        Rng r = rng4.split(rep);
        const double v = r.uniform(-0.8, 0.8);
        const spacetime::Point p{r.uniform(-6.0, 6.0), r.uniform(0.0, 8.0)};
        ScenarioConfig boosted = cfg;
        boosted.sigma0 = cfg.sigma0.boosted(v);
        for (auto& wl : boosted.particles) {
            wl.origin = spacetime::boost(wl.origin, v);
            wl.velocity = (wl.velocity - v) / (1.0 - wl.velocity * v);
        }
        for (auto& app : boosted.apparatuses) app.location = spacetime::boost(app.location, v);
        EventLog log;
        log.set_pair_branch(r.bernoulli(0.5) ? 1 : -1);
        EventLog blog = log;
        const auto plain = property_at(p, 0, cfg, log, r);
        const auto moved = property_at(spacetime::boost(p, v), 0, boosted, blog, r);
        if (plain.definite != moved.definite ||
            (plain.definite && plain.value != moved.value)) {
            c.require(false, "verdict changed under a boost");
            break;
        }
    }
}

// ---- criterion 8: property attribution --------------------------------------

void criterion_8(Check& c) {
    using namespace redsim::toy;
    Rng rng(81);
    for (int rep = 0; rep < 1000; ++rep) {
        Rng r = rng.split(rep);
        const double v = r.uniform(0.2, 0.7);
        const double t_r = r.uniform(1.0, 4.0);
        ScenarioConfig cfg{{WorldLine{{0.0, 0.0}, -v}, WorldLine{{0.0, 0.0}, v}},
                           {Apparatus{"A", 1, {v * t_r, t_r}, true}},
                           two_particle_singlet(),
                           spacetime::SpacelikeSurface::constant_time(0.0, -500.0, 500.0)};
        cfg.validate();
        EventLog log;

        // before any measurement
        const double t_before = r.uniform(0.05, 0.9) * t_r;
        const auto early =
            property_at({-v * t_before, t_before}, 0, cfg, log, r);
        c.require(!early.definite, "definite before any measurement");

        // space-like to the measurement point
        const double t_max = t_r * (1.0 + v) / (1.0 - v);
        const double t_side = t_r + r.uniform(0.05, 0.90) * (t_max - t_r);
        const spacetime::Point side{-v * t_side, t_side};
        c.require(spacetime::relate(cfg.apparatus("A").location, side) ==
                      spacetime::CausalRelation::Spacelike,
                  "geometry setup: not space-like");
        const auto mid = property_at(side, 0, cfg, log, r);
        c.require(!mid.definite, "definite at space-like separation");

        // inside the future light cone of the measurement
        const double t_in = t_max * r.uniform(1.05, 1.6);
        const spacetime::Point in_cone{-v * t_in, t_in};
        c.require(spacetime::relate(cfg.apparatus("A").location, in_cone) ==
                      spacetime::CausalRelation::TimelikeFuture,
                  "geometry setup: not time-like future");
        const auto late = property_at(in_cone, 0, cfg, log, r);
        c.require(late.definite, "indefinite inside the future cone");
        if (late.definite) c.require(late.value == -log.at("A").value, "wrong correlated value");

        // device pointer states are always definite (Ready before, outcome after)
        const auto before = apparatus_event_at("A", t_r * 0.5, cfg, log, r);
        c.require(before == ApparatusEvent::Ready, "device not ready before triggering");
        const auto after = apparatus_event_at("A", t_r + 0.5, cfg, log, r);
        c.require(after != ApparatusEvent::Ready, "device undefined after triggering");
    }
}

// ---- criterion 9: counterfactual verdicts -----------------------------------

void criterion_9(Check& c) {
    using namespace redsim::toy;
    Rng rng(91);
    const auto both = standard_pair(true, true);
    const auto right_only = standard_pair(false, true);
    const auto above = spacetime::SpacelikeSurface::constant_time(10.0, -500.0, 500.0);

    EventLog log_both, log_right;
    state_on_surface(both, above, log_both, rng);
    state_on_surface(right_only, above, log_right, rng);

    c.require(counterfactual_classify({std::nullopt, "A", -log_both.at("A").value}, both,
                                      log_both) == ClaimVerdict::Legitimate,
              "actual-configuration claim not legitimate");
    c.require(counterfactual_classify(
                  {both.apparatus("B").location, "A", -log_right.at("A").value}, right_only,
                  log_right) == ClaimVerdict::Illegitimate,
              "space-like supposition not illegitimate");
    const spacetime::Point t_point{right_only.particles[0].position_at(8.0), 8.0};
    c.require(counterfactual_classify({t_point, "A", -log_right.at("A").value}, right_only,
                                      log_right) == ClaimVerdict::Legitimate,
              "future-cone supposition not legitimate");

    // deterministic completion: both criteria flagged on every flipped value
    HiddenVariableModel model;
    model.only_right_outcome = {1, 1, -1, -1};
    model.both_on_right_outcome = {1, -1, 1, -1};
    const auto report = hv_counterfactual_demo(model);
    c.require(report.size() == model.flip_set().size() && !report.empty(),
              "disagreement report misses flipped values");
    for (const auto& d : report) {
        c.require(d.criteria_disagree, "criteria agree on a flipped value");
        c.require(d.same_lambda_left == 1 && d.same_outcome_left_prediction == -1,
                  "wrong predicted outcomes");
        c.require(d.selection_includes_minus_worlds,
                  "same-outcome selection misses opposite-preparation worlds");
    }
}

struct Criterion {
    int number;
    const char* name;
    double time_limit_s; // 0 = none stated
    std::function<void(Check&)> run;
};

} // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "exact protocol algebra", 5.0, criterion_1},
        {2, "classification soundness", 30.0, criterion_2},
        {3, "no-signaling", 0.0, criterion_3},
        {4, "staged worked cases", 60.0, criterion_4},
        {5, "hit dynamics", 0.0, criterion_5},
        {6, "continuous reduction", 0.0, criterion_6},
        {7, "toy-model statistics and consistency", 0.0, criterion_7},
        {8, "property attribution", 0.0, criterion_8},
        {9, "counterfactual verdicts", 0.0, criterion_9},
    };

    int failures = 0;
    for (const auto& crit : criteria) {
        Check check;
        const auto start = std::chrono::steady_clock::now();
        try {
            crit.run(check);
        } catch (const std::exception& e) {
            check.require(false, std::string("exception: ") + e.what());
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (crit.time_limit_s > 0.0 && elapsed > crit.time_limit_s)
            check.require(false, "exceeded the time limit");
        if (check.ok) {
            std::printf("PASS criterion %d (%s) [%.2fs]\n", crit.number, crit.name, elapsed);
        } else {
            std::printf("FAIL criterion %d (%s) [%.2fs]: %s\n", crit.number, crit.name, elapsed,
                        check.detail.str().c_str());
            ++failures;
        }
    }
    return failures;
}
