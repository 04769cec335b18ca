#include "redsim/protocol.hpp"

#include <cmath>
#include <stdexcept>

namespace redsim::protocol {

namespace {
const double kInvSqrt3 = 1.0 / std::sqrt(3.0);
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);
const Complex kI{0.0, 1.0};
} // namespace

int probe_omega(Index index) {
    if (index < 0 || index > 2) throw std::out_of_range("probe_omega: bad index");
    return 1 - static_cast<int>(index);
}

Index probe_index(int omega) {
    if (omega < -1 || omega > 1) throw std::out_of_range("probe_index: bad omega");
    return static_cast<Index>(1 - omega);
}

const Operator& probe_lower() {
    static const Operator op = [] {
        Mat m = Mat::Zero(3, 3);
        m(1, 0) = 1.0; // |+1> -> |0>
        m(2, 1) = 1.0; // |0>  -> |-1>
        m(0, 2) = 1.0; // |-1> -> |+1>
        return Operator(std::move(m), {3}, OpKind::Unitary);
    }();
    return op;
}

const Operator& probe_raise() {
    static const Operator op = probe_lower().adjoint();
    return op;
}

Operator spin_projector(Axis axis, int sign) {
    if (sign != 1 && sign != -1) throw std::invalid_argument("spin_projector: sign must be +-1");
    Mat m(2, 2);
    if (axis == Axis::Z) {
        m = Mat::Zero(2, 2);
        m(sign == 1 ? 0 : 1, sign == 1 ? 0 : 1) = 1.0;
    } else {
        // |y+-><y+-| with |y+-> = (|u> +- i|d>)/sqrt(2)
        const double s = (sign == 1) ? 1.0 : -1.0;
        m(0, 0) = 0.5;
        m(0, 1) = -s * kI * 0.5;
        m(1, 0) = s * kI * 0.5;
        m(1, 1) = 0.5;
    }
    return Operator(std::move(m), {2}, OpKind::Projector);
}

const StateVector& probe_pair_state() {
    static const StateVector phi = [] {
        Vec v = Vec::Zero(9);
        // (+1,-1): indices (0,2); (0,0): (1,1); (-1,+1): (2,0)
        v[0 * 3 + 2] = kInvSqrt3;
        v[1 * 3 + 1] = kInvSqrt3;
        v[2 * 3 + 0] = kInvSqrt3;
        return StateVector(std::move(v), {3, 3});
    }();
    return phi;
}

const StateVector& pair_state_for_tz(int tz) {
    static const StateVector up = [] {
        Vec v = Vec::Zero(9);
        v[2 * 3 + 2] = kInvSqrt3; // (-1,-1)
        v[1 * 3 + 0] = kInvSqrt3; // (0,+1)
        v[0 * 3 + 1] = kInvSqrt3; // (+1,0)
        return StateVector(std::move(v), {3, 3});
    }();
    static const StateVector down = [] {
        Vec v = Vec::Zero(9);
        v[0 * 3 + 0] = kInvSqrt3; // (+1,+1)
        v[1 * 3 + 2] = kInvSqrt3; // (0,-1)
        v[2 * 3 + 1] = kInvSqrt3; // (-1,0)
        return StateVector(std::move(v), {3, 3});
    }();
    switch (tz) {
        case 0: return probe_pair_state();
        case 1: return up;
        case -1: return down;
        default: throw std::out_of_range("pair_state_for_tz: tz must be -1, 0 or +1");
    }
}

StateVector system_basis(int index) {
    if (index < 0 || index > 3) throw std::out_of_range("system_basis: bad index");
    Vec v = Vec::Zero(4);
    v[index] = 1.0;
    return StateVector(std::move(v), {2, 2});
}

const StateVector& singlet_state() {
    static const StateVector s = [] {
        Vec v = Vec::Zero(4);
        v[1] = kInvSqrt2;  // |ud>
        v[2] = -kInvSqrt2; // |du>
        return StateVector(std::move(v), {2, 2});
    }();
    return s;
}

const StateVector& triplet_z_state() {
    static const StateVector t = [] {
        Vec v = Vec::Zero(4);
        v[1] = kInvSqrt2;
        v[2] = kInvSqrt2;
        return StateVector(std::move(v), {2, 2});
    }();
    return t;
}

StateVector system_superposition(Complex a_uu, Complex b_ud, Complex c_du, Complex d_dd) {
    Vec v(4);
    v << a_uu, b_ud, c_du, d_dd;
    return StateVector(std::move(v), {2, 2});
}

const Operator& total_isospin_z() {
    static const Operator tz = [] {
        Mat m = Mat::Zero(4, 4);
        m(0, 0) = 1.0;
        m(3, 3) = -1.0;
        return Operator(std::move(m), {2, 2}, OpKind::Hermitian);
    }();
    return tz;
}

const Operator& total_isospin_squared() {
    static const Operator t2 = [] {
        // 2 * (identity - singlet projector)
        Mat m = 2.0 * Mat::Identity(4, 4);
        const Vec& s = singlet_state().amplitudes();
        m -= 2.0 * (s * s.adjoint());
        return Operator(std::move(m), {2, 2}, OpKind::Hermitian);
    }();
    return t2;
}

std::vector<Operator> t2z_projectors() {
    std::vector<Operator> ps;
    ps.push_back(kron(Operator::identity({2}), spin_projector(Axis::Z, 1)));
    ps.push_back(kron(Operator::identity({2}), spin_projector(Axis::Z, -1)));
    return ps;
}

Operator pair_coupling(Axis axis) {
    const Mat m = kron(spin_projector(axis, 1), probe_lower()).entries() +
                  kron(spin_projector(axis, -1), probe_raise()).entries();
    return Operator(m, {2, 3}, OpKind::Unitary);
}

Operator build_pair_unitary(Axis axis, const std::vector<Index>& dims,
                            std::size_t particle1_slot, std::size_t probe_a_slot,
                            std::size_t particle2_slot, std::size_t probe_b_slot) {
    const std::array<std::size_t, 4> slots{particle1_slot, probe_a_slot, particle2_slot,
                                           probe_b_slot};
    for (std::size_t i = 0; i < slots.size(); ++i)
        for (std::size_t j = i + 1; j < slots.size(); ++j)
            if (slots[i] == slots[j])
                throw std::invalid_argument("build_pair_unitary: slot collision");
    const Operator coupling = pair_coupling(axis);
    CompositeOperator embedded(
        dims, {SlotFactor{coupling, {particle1_slot, probe_a_slot}},
               SlotFactor{coupling, {particle2_slot, probe_b_slot}}});
    return Operator(embedded.to_dense(), dims, OpKind::Unitary);
}

const std::vector<Index>& tz_dims() {
    static const std::vector<Index> dims{2, 2, 3, 3};
    return dims;
}

const Operator& tz_unitary() {
    static const Operator u = build_pair_unitary(Axis::Z, tz_dims(), 0, 2, 1, 3);
    return u;
}

int classify_tz(int omega_sum) {
    switch (omega_sum) {
        case 0: return 0;
        case 1:
        case -2: return 1;
        case 2:
        case -1: return -1;
        default: throw std::out_of_range("classify_tz: sum out of range");
    }
}

TzResult run_tz_protocol(const StateVector& system, Rng& rng) {
    if (system.dim() != kSystemDim)
        throw std::invalid_argument("run_tz_protocol: system must be 4-dimensional");
    if (!system.is_normalized())
        throw std::invalid_argument("run_tz_protocol: system not normalized");

    const StateVector joint = tz_unitary().apply(kron(system, probe_pair_state()));
    static const std::array<double, 3> omega_labels{1.0, 0.0, -1.0};

    const MeasurementOutcome m3 = measure_slot(joint, 2, omega_labels, rng);
    const MeasurementOutcome m6 = measure_slot(m3.post_state, 3, omega_labels, rng);

    const int omega3 = static_cast<int>(m3.eigenvalue_label);
    const int omega6 = static_cast<int>(m6.eigenvalue_label);
    const int sum = omega3 + omega6;
    const int tz = classify_tz(sum);

    // Both probe slots are now definite; the system factor is the remainder.
    Vec sys = Vec::Zero(4);
    const Vec& a = m6.post_state.amplitudes();
    const Index probe_block = probe_index(omega3) * 3 + probe_index(omega6);
    for (Index s = 0; s < 4; ++s) sys[s] = a[s * 9 + probe_block];
    StateVector reduced(std::move(sys), {2, 2});
    reduced = reduced.normalized();

    return TzResult{omega3, omega6, sum, tz, std::move(reduced)};
}

const std::vector<Index>& t2_dims() {
    static const std::vector<Index> dims{2, 2, 3, 3, 3, 3, 3, 3};
    return dims;
}

namespace {

CompositeOperator make_pair_composite(Axis axis, std::size_t probe_a_slot,
                                      std::size_t probe_b_slot) {
    const Operator coupling = pair_coupling(axis);
    return CompositeOperator(t2_dims(), {SlotFactor{coupling, {0, probe_a_slot}},
                                         SlotFactor{coupling, {1, probe_b_slot}}});
}

} // namespace

const CompositeOperator& u_z_full() {
    static const CompositeOperator u = make_pair_composite(Axis::Z, 2, 3);
    return u;
}

const CompositeOperator& u_y_full() {
    static const CompositeOperator u = make_pair_composite(Axis::Y, 4, 5);
    return u;
}

const CompositeOperator& u_z_star_full() {
    static const CompositeOperator u = make_pair_composite(Axis::Z, 6, 7);
    return u;
}

const CompositeOperator& u_total() {
    static const CompositeOperator u = [] {
        std::vector<SlotFactor> factors;
        for (const auto& part : {u_z_full(), u_y_full(), u_z_star_full()})
            for (const auto& f : part.factors()) factors.push_back(f);
        return CompositeOperator(t2_dims(), std::move(factors));
    }();
    return u;
}

const StateVector& probe_assembly_state() {
    static const StateVector phi =
        kron(kron(probe_pair_state(), probe_pair_state()), probe_pair_state());
    return phi;
}

StateVector full_initial(const StateVector& system) {
    if (system.dim() != kSystemDim)
        throw std::invalid_argument("full_initial: system must be 4-dimensional");
    return kron(system, probe_assembly_state());
}

const StateVector& u_total_branch(int system_basis_index) {
    static const std::array<StateVector, 4> branches = [] {
        std::array<StateVector, 4> out{
            u_total().apply(full_initial(system_basis(0))),
            u_total().apply(full_initial(system_basis(1))),
            u_total().apply(full_initial(system_basis(2))),
            u_total().apply(full_initial(system_basis(3)))};
        return out;
    }();
    if (system_basis_index < 0 || system_basis_index > 3)
        throw std::out_of_range("u_total_branch: bad index");
    return branches[static_cast<std::size_t>(system_basis_index)];
}

StateVector apply_u_total(const StateVector& system) {
    if (system.dim() != kSystemDim)
        throw std::invalid_argument("apply_u_total: system must be 4-dimensional");
    Vec out = Vec::Zero(kFullDim);
    for (int b = 0; b < 4; ++b) {
        const Complex c = system.amplitudes()[b];
        if (c != 0.0) out += c * u_total_branch(b).amplitudes();
    }
    return StateVector(std::move(out), t2_dims());
}

ProbeAssembly make_probe_assembly() {
    return ProbeAssembly{{"3,6", "2*,4*", "3*,6*"}, probe_assembly_state()};
}

T2Class classify_t2(int sum_36, int sum_24s, int sum_36s) {
    if (sum_36 == 0 && sum_24s == 0 && sum_36s == 0) return T2Class::Singlet;
    if (sum_36s == 1 || sum_36s == -2) return T2Class::UpUp;
    if (sum_36s == 2 || sum_36s == -1) return T2Class::DownDown;
    if (sum_36s == 0 && sum_24s != 0) return T2Class::TripletZ;
    throw std::logic_error("classify_t2: outcome pattern unreachable by any branch");
}

const StateVector& canonical_state(T2Class c) {
    static const StateVector uu = system_basis(0);
    static const StateVector dd = system_basis(3);
    switch (c) {
        case T2Class::Singlet: return singlet_state();
        case T2Class::UpUp: return uu;
        case T2Class::DownDown: return dd;
        case T2Class::TripletZ: return triplet_z_state();
    }
    throw std::logic_error("canonical_state: bad class");
}

std::string to_string(T2Class c) {
    switch (c) {
        case T2Class::Singlet: return "Singlet";
        case T2Class::UpUp: return "UpUp";
        case T2Class::DownDown: return "DownDown";
        case T2Class::TripletZ: return "TripletZ";
    }
    return "?";
}

namespace {

// Pair sums of a flat probe tuple (digits of slots 3,6,2*,4*,3*,6*).
struct PairSums {
    int s36, s24s, s36s;
};

PairSums tuple_sums(Index tuple) {
    std::array<int, 6> w{};
    for (std::size_t k = 6; k-- > 0;) {
        w[k] = probe_omega(tuple % 3);
        tuple /= 3;
    }
    return PairSums{w[0] + w[1], w[2] + w[3], w[4] + w[5]};
}

std::array<int, 6> tuple_omegas(Index tuple) {
    std::array<int, 6> w{};
    for (std::size_t k = 6; k-- > 0;) {
        w[k] = probe_omega(tuple % 3);
        tuple /= 3;
    }
    return w;
}

} // namespace

std::array<double, 4> t2_class_probabilities(const StateVector& system) {
    const StateVector evolved = apply_u_total(system.normalized());
    const Vec& a = evolved.amplitudes();
    std::array<double, 4> probs{};
    for (Index tuple = 0; tuple < kProbeTupleCount; ++tuple) {
        double mass = 0.0;
        for (Index s = 0; s < 4; ++s) mass += std::norm(a[s * kProbeTupleCount + tuple]);
        if (mass == 0.0) continue;
        const PairSums sums = tuple_sums(tuple);
        const T2Class c = classify_t2(sums.s36, sums.s24s, sums.s36s);
        probs[static_cast<std::size_t>(c)] += mass;
    }
    return probs;
}

T2Result run_t2_protocol(const StateVector& system, Rng& rng) {
    if (system.dim() != kSystemDim)
        throw std::invalid_argument("run_t2_protocol: system must be 4-dimensional");
    if (!system.is_normalized())
        throw std::invalid_argument("run_t2_protocol: system not normalized");

    const StateVector evolved = apply_u_total(system);
    const Vec& a = evolved.amplitudes();

    // Joint detection of the six probes: sample the probe tuple directly.
    std::vector<double> tuple_mass(static_cast<std::size_t>(kProbeTupleCount), 0.0);
    for (Index tuple = 0; tuple < kProbeTupleCount; ++tuple) {
        double mass = 0.0;
        for (Index s = 0; s < 4; ++s) mass += std::norm(a[s * kProbeTupleCount + tuple]);
        tuple_mass[static_cast<std::size_t>(tuple)] = mass;
    }
    const Index tuple = static_cast<Index>(rng.categorical(tuple_mass));

    const std::array<int, 6> omegas = tuple_omegas(tuple);
    const PairSums sums = tuple_sums(tuple);
    const T2Class c = classify_t2(sums.s36, sums.s24s, sums.s36s);

    Vec sys(4);
    for (Index s = 0; s < 4; ++s) sys[s] = a[s * kProbeTupleCount + tuple];
    StateVector reduced = StateVector(std::move(sys), {2, 2}).normalized();

    if (reduced.overlap(canonical_state(c)) < 1.0 - kStructuralTol)
        throw std::logic_error("run_t2_protocol: reduced state disagrees with classification");

    return T2Result{omegas, c, std::move(reduced)};
}

namespace {

// Distribution of the final T_2z detection for one fixed scenario
// configuration: classification probabilities of the pre-measurement state
// together with the conditional chance of T_2z = +1 in each class.
struct SignalingCache {
    std::array<double, 4> class_cdf{};
    std::array<double, 4> p_plus_given_class{};
};

SignalingCache make_signaling_cache(bool flip, NonlocalMode mode) {
    const StateVector initial = flip ? system_basis(2) : system_basis(0); // |du> vs |uu>
    SignalingCache cache{};
    std::array<double, 4> probs{};
    switch (mode) {
        case NonlocalMode::None:
            // No reduction step: the system stays in `initial`.
            probs = {1.0, 0.0, 0.0, 0.0};
            cache.p_plus_given_class = {1.0, 1.0, 1.0, 1.0}; // particle 2 is up either way
            break;
        case NonlocalMode::Tz: {
            // The z protocol leaves each z-basis component untouched, so the
            // reduced system equals `initial` and particle 2 stays up.
            probs = {1.0, 0.0, 0.0, 0.0};
            cache.p_plus_given_class = {1.0, 1.0, 1.0, 1.0};
            break;
        }
        case NonlocalMode::T2: {
            probs = t2_class_probabilities(initial);
            for (std::size_t k = 0; k < 4; ++k) {
                const StateVector& post = canonical_state(static_cast<T2Class>(k));
                const auto dist = slot_distribution(post, 1);
                cache.p_plus_given_class[k] = dist[0];
            }
            break;
        }
    }
    double acc = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
        acc += probs[k];
        cache.class_cdf[k] = acc;
    }
    return cache;
}

} // namespace

int signaling_scenario(bool flip, NonlocalMode mode, Rng& rng) {
    static const std::array<SignalingCache, 6> caches = [] {
        std::array<SignalingCache, 6> out;
        for (int f = 0; f < 2; ++f)
            for (int m = 0; m < 3; ++m)
                out[static_cast<std::size_t>(f * 3 + m)] =
                    make_signaling_cache(f != 0, static_cast<NonlocalMode>(m));
        return out;
    }();
    const auto& cache =
        caches[static_cast<std::size_t>((flip ? 1 : 0) * 3 + static_cast<int>(mode))];
    const std::size_t cls = rng.from_cdf(cache.class_cdf);
    return rng.bernoulli(cache.p_plus_given_class[cls]) ? 1 : -1;
}

} // namespace redsim::protocol
