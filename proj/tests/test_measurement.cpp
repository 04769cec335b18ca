#include "doctest.h"

#include <cmath>

#include "redsim/measurement.hpp"
#include "redsim/stats.hpp"

using namespace redsim;

namespace {

std::vector<Operator> basis_projectors(Index n) {
    std::vector<Operator> ps;
    for (Index k = 0; k < n; ++k) {
        Mat m = Mat::Zero(n, n);
        m(k, k) = 1.0;
        ps.emplace_back(std::move(m), std::vector<Index>{n}, OpKind::Projector);
    }
    return ps;
}

} // namespace

TEST_CASE("measuring an eigenstate is deterministic") {
    Vec v(2);
    v << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    const StateVector plus(v, {2});
    Mat pp = plus.amplitudes() * plus.amplitudes().adjoint();
    Mat pm = Mat::Identity(2, 2) - pp;
    const std::vector<Operator> family{Operator(pp, {2}, OpKind::Projector),
                                       Operator(pm, {2}, OpKind::Projector)};
    Rng rng(3);
    for (int i = 0; i < 50; ++i) {
        const auto out = measure_projective(plus, family, rng);
        CHECK(out.outcome_index == 0);
        CHECK(out.probability == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("incomplete or non-orthogonal families are rejected") {
    const StateVector s = StateVector::basis_state({2}, std::vector<Index>{0});
    Rng rng(4);
    auto ps = basis_projectors(2);
    ps.pop_back();
    CHECK_THROWS_AS(measure_projective(s, ps, rng), std::invalid_argument);

    Mat half = 0.5 * Mat::Identity(2, 2);
    const std::vector<Operator> bad{Operator(half, {2}), Operator(half, {2})};
    CHECK_THROWS_AS(measure_projective(s, bad, rng), std::invalid_argument);
}

TEST_CASE("outcome frequencies follow the squared amplitudes (chi-squared at 0.001)") {
    Vec v(2);
    const double a = 0.6, b = 0.8;
    v << a, b;
    const StateVector psi(v, {2});
    const auto family = basis_projectors(2);
    Rng rng(2718);
    std::vector<std::size_t> counts(2, 0);
    const std::size_t n = 100000;
    for (std::size_t i = 0; i < n; ++i) ++counts[measure_projective(psi, family, rng).outcome_index];
    const double stat = chi2_statistic(counts, std::vector<double>{a * a, b * b});
    CHECK(stat <= chi2_critical(1, 0.001));
}

TEST_CASE("replay determinism: identical seed, identical outcome sequence") {
    Vec v(3);
    v << 0.5, Complex(0.0, 0.5), std::sqrt(0.5);
    const StateVector psi(v, {3});
    const auto family = basis_projectors(3);
    Rng r1(42), r2(42);
    for (int i = 0; i < 200; ++i) {
        const auto a = measure_projective(psi, family, r1);
        const auto b = measure_projective(psi, family, r2);
        CHECK(a.outcome_index == b.outcome_index);
        CHECK(a.probability == b.probability);
        CHECK((a.post_state.amplitudes() - b.post_state.amplitudes()).norm() == 0.0);
    }
}

TEST_CASE("post state is the normalized projection") {
    Vec v(4);
    v << 0.5, 0.5, 0.5, 0.5;
    const StateVector psi(v, {2, 2});
    Rng rng(5);
    const auto out = measure_slot(psi, 0, rng);
    CHECK(out.post_state.is_normalized(1e-12));
    CHECK(out.probability == doctest::Approx(0.5));
    // the unmeasured slot keeps its superposition
    const auto dist = slot_distribution(out.post_state, 1);
    CHECK(dist[0] == doctest::Approx(0.5));
    CHECK(dist[1] == doctest::Approx(0.5));
}

TEST_CASE("measure_slot agrees with measure_projective on slot projectors") {
    Vec v(6);
    v << 0.1, Complex(0.3, 0.2), 0.4, Complex(0.0, 0.5), 0.6, 0.2;
    const StateVector psi = StateVector(v, {2, 3}).normalized();

    // slot-1 projectors as dense operators
    std::vector<Operator> family;
    for (Index k = 0; k < 3; ++k) {
        Mat pk = Mat::Zero(3, 3);
        pk(k, k) = 1.0;
        family.push_back(kron(Operator::identity({2}), Operator(pk, {3}, OpKind::Projector)));
    }
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        Rng r1(seed), r2(seed);
        const auto a = measure_slot(psi, 1, r1);
        const auto b = measure_projective(psi, family, r2);
        CHECK(a.outcome_index == b.outcome_index);
        CHECK(a.probability == doctest::Approx(b.probability).epsilon(1e-12));
        CHECK((a.post_state.amplitudes() - b.post_state.amplitudes()).cwiseAbs().maxCoeff() <=
              1e-12);
    }
}
