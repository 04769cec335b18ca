#include "redsim/measurement.hpp"

#include <cmath>
#include <stdexcept>

namespace redsim {

namespace {

void check_complete_family(const StateVector& s, const std::vector<Operator>& projectors) {
    if (projectors.empty())
        throw std::invalid_argument("measure_projective: empty projector family");
    const Index n = s.dim();
    Mat sum = Mat::Zero(n, n);
    for (const auto& p : projectors) {
        if (p.dim() != n)
            throw std::invalid_argument("measure_projective: projector dimension mismatch");
        if (p.projector_defect() > kStructuralTol)
            throw std::invalid_argument("measure_projective: family member is not a projector");
        sum += p.entries();
    }
    const double defect = (sum - Mat::Identity(n, n)).cwiseAbs().maxCoeff();
    if (defect > kStructuralTol)
        throw std::invalid_argument("measure_projective: projectors do not sum to identity");
    // Hermitian idempotents that resolve the identity are automatically
    // mutually orthogonal, so no pairwise products are needed here.
    if (!s.is_normalized())
        throw std::invalid_argument("measure_projective: state not normalized");
}

} // namespace

MeasurementOutcome measure_projective(const StateVector& s,
                                      const std::vector<Operator>& projectors, Rng& rng) {
    std::vector<double> labels(projectors.size());
    for (std::size_t k = 0; k < labels.size(); ++k) labels[k] = static_cast<double>(k);
    return measure_projective(s, projectors, labels, rng);
}

MeasurementOutcome measure_projective(const StateVector& s,
                                      const std::vector<Operator>& projectors,
                                      std::span<const double> eigenvalue_labels, Rng& rng) {
    check_complete_family(s, projectors);
    if (eigenvalue_labels.size() != projectors.size())
        throw std::invalid_argument("measure_projective: label count mismatch");

    std::vector<StateVector> projected;
    std::vector<double> probs(projectors.size());
    projected.reserve(projectors.size());
    for (std::size_t k = 0; k < projectors.size(); ++k) {
        projected.push_back(projectors[k].apply(s));
        probs[k] = projected.back().norm2();
    }
    const std::size_t k = rng.categorical(probs);
    return MeasurementOutcome{static_cast<int>(k), eigenvalue_labels[k], probs[k],
                              projected[k].normalized()};
}

std::vector<double> slot_distribution(const StateVector& s, std::size_t slot) {
    const auto& dims = s.factor_dims();
    if (slot >= dims.size()) throw std::invalid_argument("slot_distribution: slot out of range");
    Index inner = 1;
    for (std::size_t k = slot + 1; k < dims.size(); ++k) inner *= dims[k];
    const Index d = dims[slot];
    std::vector<double> probs(static_cast<std::size_t>(d), 0.0);
    const Vec& a = s.amplitudes();
    for (Index i = 0; i < s.dim(); ++i) {
        const Index digit = (i / inner) % d;
        probs[static_cast<std::size_t>(digit)] += std::norm(a[i]);
    }
    return probs;
}

StateVector project_slot(const StateVector& s, std::size_t slot, Index value) {
    const auto& dims = s.factor_dims();
    if (slot >= dims.size()) throw std::invalid_argument("project_slot: slot out of range");
    if (value < 0 || value >= dims[slot])
        throw std::invalid_argument("project_slot: value out of range");
    Index inner = 1;
    for (std::size_t k = slot + 1; k < dims.size(); ++k) inner *= dims[k];
    const Index d = dims[slot];
    Vec out = Vec::Zero(s.dim());
    const Vec& a = s.amplitudes();
    for (Index i = 0; i < s.dim(); ++i) {
        if ((i / inner) % d == value) out[i] = a[i];
    }
    return StateVector(std::move(out), dims, s.factor_labels());
}

MeasurementOutcome measure_slot(const StateVector& s, std::size_t slot, Rng& rng) {
    const auto& dims = s.factor_dims();
    if (slot >= dims.size()) throw std::invalid_argument("measure_slot: slot out of range");
    std::vector<double> labels(static_cast<std::size_t>(dims[slot]));
    for (std::size_t k = 0; k < labels.size(); ++k) labels[k] = static_cast<double>(k);
    return measure_slot(s, slot, labels, rng);
}

MeasurementOutcome measure_slot(const StateVector& s, std::size_t slot,
                                std::span<const double> eigenvalue_labels, Rng& rng) {
    if (!s.is_normalized())
        throw std::invalid_argument("measure_slot: state not normalized");
    const auto probs = slot_distribution(s, slot);
    if (eigenvalue_labels.size() != probs.size())
        throw std::invalid_argument("measure_slot: label count mismatch");
    const std::size_t k = rng.categorical(probs);
    StateVector post = project_slot(s, slot, static_cast<Index>(k)).normalized();
    return MeasurementOutcome{static_cast<int>(k), eigenvalue_labels[k], probs[k],
                              std::move(post)};
}

} // namespace redsim
