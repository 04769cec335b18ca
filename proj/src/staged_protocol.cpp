#include "redsim/staged_protocol.hpp"

#include <cmath>
#include <stdexcept>

namespace redsim::staged {

using namespace redsim::protocol;

namespace {

constexpr std::array<std::size_t, 3> kRightProbeSlots{3, 5, 7}; // probes 6, 4*, 6*
constexpr std::array<std::size_t, 3> kLeftProbeSlots{2, 4, 6};  // probes 3, 2*, 3*

CompositeOperator make_side_factor(std::size_t particle_slot, std::size_t z_probe_slot,
                                   std::size_t y_probe_slot, std::size_t z_star_probe_slot) {
    return CompositeOperator(
        t2_dims(), {SlotFactor{pair_coupling(Axis::Z), {particle_slot, z_probe_slot}},
                    SlotFactor{pair_coupling(Axis::Y), {particle_slot, y_probe_slot}},
                    SlotFactor{pair_coupling(Axis::Z), {particle_slot, z_star_probe_slot}}});
}

} // namespace

const CompositeOperator& u_factor(Side side) {
    static const CompositeOperator right = make_side_factor(1, 3, 5, 7);
    static const CompositeOperator left = make_side_factor(0, 2, 4, 6);
    return side == Side::Right ? right : left;
}

StagedState initial_staged() { return initial_staged(singlet_state()); }

StagedState initial_staged(const StateVector& system) {
    if (!system.is_normalized())
        throw std::invalid_argument("initial_staged: system not normalized");
    return StagedState{Stage::Sigma0, full_initial(system), std::nullopt};
}

StagedState evolve_sigma1(const StagedState& at_sigma0) {
    if (at_sigma0.surface_tag != Stage::Sigma0)
        throw std::invalid_argument("evolve_sigma1: expected a sigma0 state");
    return StagedState{Stage::Sigma1, u_factor(Side::Right).apply(at_sigma0.state),
                       at_sigma0.forced_outcomes};
}

namespace {

StateVector project_right(const StateVector& state, const std::array<int, 3>& triple,
                          double* probability) {
    StateVector cur = state;
    for (std::size_t k = 0; k < 3; ++k)
        cur = project_slot(cur, kRightProbeSlots[k], probe_index(triple[k]));
    if (probability) *probability = cur.norm2();
    return cur;
}

} // namespace

double forced_triple_probability(const StagedState& at_sigma1, const std::array<int, 3>& triple) {
    if (at_sigma1.surface_tag != Stage::Sigma1)
        throw std::invalid_argument("forced_triple_probability: expected a sigma1 state");
    double p = 0.0;
    project_right(at_sigma1.state, triple, &p);
    return p;
}

StagedState reduce_right(const StagedState& at_sigma1, const std::array<int, 3>& forced) {
    if (at_sigma1.surface_tag != Stage::Sigma1)
        throw std::invalid_argument("reduce_right: expected a sigma1 state");
    double p = 0.0;
    StateVector projected = project_right(at_sigma1.state, forced, &p);
    if (p <= 1e-300)
        throw std::invalid_argument("reduce_right: forced outcome triple has zero probability");
    return StagedState{Stage::Sigma2, projected.normalized(), forced};
}

StagedState reduce_right(const StagedState& at_sigma1, Rng& rng) {
    if (at_sigma1.surface_tag != Stage::Sigma1)
        throw std::invalid_argument("reduce_right: expected a sigma1 state");
    static const std::array<double, 3> omega_labels{1.0, 0.0, -1.0};
    StateVector cur = at_sigma1.state;
    std::array<int, 3> outcome{};
    for (std::size_t k = 0; k < 3; ++k) {
        const MeasurementOutcome m = measure_slot(cur, kRightProbeSlots[k], omega_labels, rng);
        outcome[k] = static_cast<int>(m.eigenvalue_label);
        cur = m.post_state;
    }
    return StagedState{Stage::Sigma2, std::move(cur), outcome};
}

StagedState evolve_final(const StagedState& at_sigma2, Rng& rng) {
    if (at_sigma2.surface_tag != Stage::Sigma2)
        throw std::invalid_argument("evolve_final: expected a sigma2 state");
    static const std::array<double, 3> omega_labels{1.0, 0.0, -1.0};
    StateVector cur = u_factor(Side::Left).apply(at_sigma2.state);
    for (std::size_t slot : kLeftProbeSlots)
        cur = measure_slot(cur, slot, omega_labels, rng).post_state;
    return StagedState{Stage::Final, std::move(cur), at_sigma2.forced_outcomes};
}

StagedState evolve_final(const StagedState& at_sigma2) {
    if (at_sigma2.surface_tag != Stage::Sigma2)
        throw std::invalid_argument("evolve_final: expected a sigma2 state");
    StateVector evolved = u_factor(Side::Left).apply(at_sigma2.state);

    // The left detectors must find every probe already definite.
    const Vec& a = evolved.amplitudes();
    double best = 0.0;
    Index best_tuple = -1;
    for (Index tuple = 0; tuple < kProbeTupleCount; ++tuple) {
        double mass = 0.0;
        for (Index s = 0; s < 4; ++s) mass += std::norm(a[s * kProbeTupleCount + tuple]);
        if (mass > best) {
            best = mass;
            best_tuple = tuple;
        }
    }
    if (best < 1.0 - kStructuralTol)
        throw std::logic_error("evolve_final: probe factor is not a basis configuration");
    (void)best_tuple;
    return StagedState{Stage::Final, std::move(evolved), at_sigma2.forced_outcomes};
}

std::array<int, 6> read_probe_configuration(const StagedState& final_state) {
    if (final_state.surface_tag != Stage::Final)
        throw std::invalid_argument("read_probe_configuration: expected a final state");
    const Vec& a = final_state.state.amplitudes();
    for (Index tuple = 0; tuple < kProbeTupleCount; ++tuple) {
        double mass = 0.0;
        for (Index s = 0; s < 4; ++s) mass += std::norm(a[s * kProbeTupleCount + tuple]);
        if (mass >= 1.0 - kStructuralTol) {
            std::array<int, 6> omegas{};
            Index rem = tuple;
            for (std::size_t k = 6; k-- > 0;) {
                omegas[k] = probe_omega(rem % 3);
                rem /= 3;
            }
            return omegas;
        }
    }
    throw std::logic_error("read_probe_configuration: no definite probe configuration");
}

StateVector system_factor(const StagedState& final_state) {
    if (final_state.surface_tag != Stage::Final)
        throw std::invalid_argument("system_factor: expected a final state");
    const Vec& a = final_state.state.amplitudes();
    const std::array<int, 6> omegas = read_probe_configuration(final_state);
    Index tuple = 0;
    for (int w : omegas) tuple = tuple * 3 + probe_index(w);
    Vec sys(4);
    for (Index s = 0; s < 4; ++s) sys[s] = a[s * kProbeTupleCount + tuple];
    return StateVector(std::move(sys), {2, 2}).normalized();
}

RunOutcome run_staged(const StateVector& system, const std::optional<std::array<int, 3>>& forced,
                      Rng& rng) {
    StagedState s0 = initial_staged(system);
    StagedState s1 = evolve_sigma1(s0);
    StagedState s2 = forced ? reduce_right(s1, *forced) : reduce_right(s1, rng);
    StagedState fin = evolve_final(s2, rng);
    RunOutcome out{*s2.forced_outcomes,
                   read_probe_configuration(fin),
                   system_factor(fin),
                   {RunRecord{Stage::Sigma0, std::move(s0.state)},
                    RunRecord{Stage::Sigma1, std::move(s1.state)},
                    RunRecord{Stage::Sigma2, std::move(s2.state)},
                    RunRecord{Stage::Final, std::move(fin.state)}}};
    return out;
}

spacetime::SpacelikeSurface pair_attribution_surface(const spacetime::Point& a,
                                                     const spacetime::Point& b,
                                                     const spacetime::SpacelikeSurface& initial) {
    return spacetime::SpacelikeSurface::pointwise_max(past_cone_surface(a, initial),
                                                      past_cone_surface(b, initial));
}

PairAttribution t2_attribution(const spacetime::Point& query_a, const spacetime::Point& query_b,
                               const spacetime::Point& left_interaction,
                               const spacetime::Point& right_interaction,
                               const spacetime::SpacelikeSurface& initial) {
    const auto sigma = pair_attribution_surface(query_a, query_b, initial);
    const bool left = in_volume(left_interaction, sigma, initial);
    const bool right = in_volume(right_interaction, sigma, initial);
    if (left && right) return PairAttribution::DefiniteFinal;
    if (left || right) return PairAttribution::Indefinite;
    return PairAttribution::DefiniteInitial;
}

RunOutcome run_full(const std::optional<std::array<int, 3>>& forced, Rng& rng) {
    StagedState s0 = initial_staged(singlet_state());
    StagedState s1 = evolve_sigma1(s0);
    StagedState s2 = forced ? reduce_right(s1, *forced) : reduce_right(s1, rng);
    // The left detectors must find the probes already definite here.
    StagedState fin = evolve_final(s2);
    RunOutcome out{*s2.forced_outcomes,
                   read_probe_configuration(fin),
                   system_factor(fin),
                   {RunRecord{Stage::Sigma0, std::move(s0.state)},
                    RunRecord{Stage::Sigma1, std::move(s1.state)},
                    RunRecord{Stage::Sigma2, std::move(s2.state)},
                    RunRecord{Stage::Final, std::move(fin.state)}}};
    const auto& w = out.final_omegas;
    if (w[0] + w[1] != 0 || w[2] + w[3] != 0 || w[4] + w[5] != 0)
        throw std::logic_error("run_full: probe pair outcomes do not sum to zero");
    if (out.final_system.overlap(singlet_state()) < 1.0 - kStructuralTol)
        throw std::logic_error("run_full: final system is not the anticorrelated state");
    return out;
}

} // namespace redsim::staged
