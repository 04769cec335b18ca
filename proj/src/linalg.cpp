#include "redsim/linalg.hpp"

#include <algorithm>
#include <stdexcept>

namespace redsim {

Index product_dim(std::span<const Index> dims) {
    Index p = 1;
    for (Index d : dims) {
        if (d <= 0) throw std::invalid_argument("factor dimensions must be positive");
        p *= d;
    }
    return p;
}

Index flat_index(std::span<const Index> dims, std::span<const Index> digits) {
    if (dims.size() != digits.size())
        throw std::invalid_argument("flat_index: digit count != factor count");
    Index flat = 0;
    for (std::size_t k = 0; k < dims.size(); ++k) {
        if (digits[k] < 0 || digits[k] >= dims[k])
            throw std::out_of_range("flat_index: digit out of range");
        flat = flat * dims[k] + digits[k];
    }
    return flat;
}

std::vector<Index> unflatten(std::span<const Index> dims, Index flat) {
    std::vector<Index> digits(dims.size());
    for (std::size_t k = dims.size(); k-- > 0;) {
        digits[k] = flat % dims[k];
        flat /= dims[k];
    }
    return digits;
}

StateVector::StateVector(Vec amplitudes, std::vector<Index> factor_dims)
    : amps_(std::move(amplitudes)), dims_(std::move(factor_dims)) {
    if (product_dim(dims_) != amps_.size())
        throw std::invalid_argument("StateVector: amplitude count != product of factor dims");
}

StateVector::StateVector(Vec amplitudes, std::vector<Index> factor_dims,
                         std::vector<std::string> factor_labels)
    : StateVector(std::move(amplitudes), std::move(factor_dims)) {
    if (!factor_labels.empty() && factor_labels.size() != dims_.size())
        throw std::invalid_argument("StateVector: label count != factor count");
    labels_ = std::move(factor_labels);
}

StateVector StateVector::basis_state(std::vector<Index> factor_dims,
                                     std::span<const Index> digits) {
    Vec v = Vec::Zero(product_dim(factor_dims));
    v[flat_index(factor_dims, digits)] = 1.0;
    return StateVector(std::move(v), std::move(factor_dims));
}

Complex StateVector::amplitude(std::span<const Index> digits) const {
    return amps_[flat_index(dims_, digits)];
}

bool StateVector::is_normalized(double tol) const {
    return std::abs(norm2() - 1.0) <= tol;
}

StateVector StateVector::normalized() const {
    const double n = norm();
    if (n <= 0.0) throw std::runtime_error("cannot normalize a zero state");
    return StateVector(amps_ / n, dims_, labels_);
}

Complex StateVector::inner(const StateVector& other) const {
    if (dim() != other.dim())
        throw std::invalid_argument("inner: dimension mismatch");
    return amps_.dot(other.amps_); // Eigen's dot conjugates the left argument
}

double StateVector::overlap(const StateVector& other) const {
    return std::abs(inner(other));
}

StateVector StateVector::scaled(Complex c) const {
    return StateVector(amps_ * c, dims_, labels_);
}

StateVector StateVector::plus(const StateVector& other) const {
    if (dim() != other.dim())
        throw std::invalid_argument("plus: dimension mismatch");
    return StateVector(amps_ + other.amps_, dims_, labels_);
}

namespace {

OpKind checked_kind(const Mat& m, OpKind kind) {
    if (m.rows() != m.cols())
        throw std::invalid_argument("Operator: matrix must be square");
    switch (kind) {
        case OpKind::General:
            break;
        case OpKind::Unitary: {
            const double d = (m.adjoint() * m - Mat::Identity(m.rows(), m.cols()))
                                 .cwiseAbs()
                                 .maxCoeff();
            if (d > kStructuralTol)
                throw std::invalid_argument("Operator: unitary flag violated");
            break;
        }
        case OpKind::Hermitian: {
            const double d = (m - m.adjoint()).cwiseAbs().maxCoeff();
            if (d > kStructuralTol)
                throw std::invalid_argument("Operator: hermitian flag violated");
            break;
        }
        case OpKind::Projector: {
            const double dh = (m - m.adjoint()).cwiseAbs().maxCoeff();
            const double di = (m * m - m).cwiseAbs().maxCoeff();
            if (dh > kStructuralTol || di > kStructuralTol)
                throw std::invalid_argument("Operator: projector flag violated");
            break;
        }
    }
    return kind;
}

} // namespace

Operator::Operator(Mat entries, std::vector<Index> factor_dims, OpKind kind)
    : entries_(std::move(entries)), dims_(std::move(factor_dims)) {
    if (product_dim(dims_) != entries_.rows())
        throw std::invalid_argument("Operator: size != product of factor dims");
    kind_ = checked_kind(entries_, kind);
}

Operator Operator::identity(std::vector<Index> factor_dims) {
    const Index n = product_dim(factor_dims);
    return Operator(Mat::Identity(n, n), std::move(factor_dims), OpKind::Unitary);
}

StateVector Operator::apply(const StateVector& s) const {
    if (s.dim() != dim())
        throw std::invalid_argument("apply: operator/state dimension mismatch");
    return StateVector(entries_ * s.amplitudes(), s.factor_dims(), s.factor_labels());
}

Operator Operator::adjoint() const {
    // Unitarity, hermiticity and idempotence all survive adjoints.
    return Operator(entries_.adjoint(), dims_, kind_);
}

Operator Operator::compose(const Operator& rhs) const {
    if (dim() != rhs.dim() || dims_ != rhs.dims_)
        throw std::invalid_argument("compose: factor dimension mismatch");
    const OpKind k = (kind_ == OpKind::Unitary && rhs.kind_ == OpKind::Unitary)
                         ? OpKind::Unitary
                         : OpKind::General;
    return Operator(entries_ * rhs.entries_, dims_, k);
}

double Operator::unitarity_defect() const {
    return (entries_.adjoint() * entries_ - Mat::Identity(dim(), dim()))
        .cwiseAbs()
        .maxCoeff();
}

double Operator::hermiticity_defect() const {
    return (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff();
}

double Operator::projector_defect() const {
    const double dh = hermiticity_defect();
    const double di = (entries_ * entries_ - entries_).cwiseAbs().maxCoeff();
    return std::max(dh, di);
}

bool is_unitary(const Operator& op, double tol) { return op.unitarity_defect() <= tol; }
bool is_hermitian(const Operator& op, double tol) { return op.hermiticity_defect() <= tol; }
bool is_projector(const Operator& op, double tol) { return op.projector_defect() <= tol; }

StateVector kron(const StateVector& a, const StateVector& b) {
    Vec out(a.dim() * b.dim());
    for (Index i = 0; i < a.dim(); ++i)
        for (Index j = 0; j < b.dim(); ++j)
            out[i * b.dim() + j] = a.amplitudes()[i] * b.amplitudes()[j];
    std::vector<Index> dims = a.factor_dims();
    dims.insert(dims.end(), b.factor_dims().begin(), b.factor_dims().end());
    return StateVector(std::move(out), std::move(dims));
}

Operator kron(const Operator& a, const Operator& b) {
    const Index na = a.dim(), nb = b.dim();
    Mat out(na * nb, na * nb);
    for (Index i = 0; i < na; ++i)
        for (Index j = 0; j < na; ++j)
            out.block(i * nb, j * nb, nb, nb) = a.entries()(i, j) * b.entries();
    std::vector<Index> dims = a.factor_dims();
    dims.insert(dims.end(), b.factor_dims().begin(), b.factor_dims().end());
    const OpKind k = (a.kind() == b.kind() &&
                      (a.kind() == OpKind::Unitary || a.kind() == OpKind::Projector ||
                       a.kind() == OpKind::Hermitian))
                         ? a.kind()
                         : OpKind::General;
    return Operator(std::move(out), std::move(dims), k);
}

namespace {

// Strides of each tensor slot in the flat index (left factor most significant).
std::vector<Index> slot_strides(std::span<const Index> dims) {
    std::vector<Index> strides(dims.size());
    Index acc = 1;
    for (std::size_t k = dims.size(); k-- > 0;) {
        strides[k] = acc;
        acc *= dims[k];
    }
    return strides;
}

} // namespace

StateVector apply_on_slots(const Operator& factor, std::span<const std::size_t> slots,
                           const StateVector& state) {
    const auto& dims = state.factor_dims();
    for (std::size_t s : slots) {
        if (s >= dims.size()) throw std::invalid_argument("apply_on_slots: slot out of range");
    }
    for (std::size_t i = 0; i < slots.size(); ++i)
        for (std::size_t j = i + 1; j < slots.size(); ++j)
            if (slots[i] == slots[j])
                throw std::invalid_argument("apply_on_slots: slot collision");
    const auto& fdims = factor.factor_dims();
    if (fdims.size() != slots.size())
        throw std::invalid_argument("apply_on_slots: factor rank != slot count");
    for (std::size_t k = 0; k < slots.size(); ++k)
        if (fdims[k] != dims[slots[k]])
            throw std::invalid_argument("apply_on_slots: factor dims do not match slots");

    const auto strides = slot_strides(dims);
    const Index sub_dim = factor.dim();

    // Flat offset of every sub-index pattern of the selected slots.
    std::vector<Index> offsets(static_cast<std::size_t>(sub_dim));
    for (Index m = 0; m < sub_dim; ++m) {
        Index rem = m, off = 0;
        for (std::size_t k = slots.size(); k-- > 0;) {
            off += (rem % fdims[k]) * strides[slots[k]];
            rem /= fdims[k];
        }
        offsets[static_cast<std::size_t>(m)] = off;
    }

    // Enumerate base indices: all flat indices whose selected-slot digits are 0.
    std::vector<std::size_t> rest;
    for (std::size_t k = 0; k < dims.size(); ++k)
        if (std::find(slots.begin(), slots.end(), k) == slots.end()) rest.push_back(k);

    const Index n_rest = state.dim() / sub_dim;
    const Vec& in = state.amplitudes();
    Vec out = Vec::Zero(state.dim());
    Vec sub(sub_dim), subout(sub_dim);
    const Mat& f = factor.entries();

    std::vector<Index> rest_digits(rest.size(), 0);
    for (Index r = 0; r < n_rest; ++r) {
        Index base = 0;
        for (std::size_t k = 0; k < rest.size(); ++k) base += rest_digits[k] * strides[rest[k]];

        for (Index m = 0; m < sub_dim; ++m) sub[m] = in[base + offsets[static_cast<std::size_t>(m)]];
        subout.noalias() = f * sub;
        for (Index m = 0; m < sub_dim; ++m) out[base + offsets[static_cast<std::size_t>(m)]] = subout[m];

        // odometer over the untouched slots
        for (std::size_t k = rest.size(); k-- > 0;) {
            if (++rest_digits[k] < dims[rest[k]]) break;
            rest_digits[k] = 0;
        }
    }
    return StateVector(std::move(out), dims, state.factor_labels());
}

CompositeOperator::CompositeOperator(std::vector<Index> dims, std::vector<SlotFactor> factors)
    : dims_(std::move(dims)), factors_(std::move(factors)), dim_(product_dim(dims_)) {
    // Validate factor/slot shapes eagerly by a dry run on dimensions.
    for (const auto& f : factors_) {
        if (f.slots.size() != f.op.factor_dims().size())
            throw std::invalid_argument("CompositeOperator: factor rank != slot count");
        for (std::size_t k = 0; k < f.slots.size(); ++k) {
            if (f.slots[k] >= dims_.size())
                throw std::invalid_argument("CompositeOperator: slot out of range");
            if (f.op.factor_dims()[k] != dims_[f.slots[k]])
                throw std::invalid_argument("CompositeOperator: factor dims do not match slots");
        }
    }
}

StateVector CompositeOperator::apply(const StateVector& s) const {
    if (s.dim() != dim_) throw std::invalid_argument("CompositeOperator: dimension mismatch");
    StateVector cur = s;
    for (const auto& f : factors_) cur = apply_on_slots(f.op, f.slots, cur);
    return cur;
}

StateVector CompositeOperator::apply_adjoint(const StateVector& s) const {
    if (s.dim() != dim_) throw std::invalid_argument("CompositeOperator: dimension mismatch");
    StateVector cur = s;
    for (auto it = factors_.rbegin(); it != factors_.rend(); ++it)
        cur = apply_on_slots(it->op.adjoint(), it->slots, cur);
    return cur;
}

double CompositeOperator::unitarity_defect() const {
    double worst = 0.0;
    for (Index k = 0; k < dim_; ++k) {
        Vec e = Vec::Zero(dim_);
        e[k] = 1.0;
        const StateVector col = apply(StateVector(std::move(e), dims_));
        const StateVector back = apply_adjoint(col);
        for (Index j = 0; j < dim_; ++j) {
            const Complex expect = (j == k) ? Complex(1.0, 0.0) : Complex(0.0, 0.0);
            worst = std::max(worst, std::abs(back.amplitudes()[j] - expect));
        }
    }
    return worst;
}

Mat CompositeOperator::to_dense() const {
    Mat m(dim_, dim_);
    for (Index k = 0; k < dim_; ++k) {
        Vec e = Vec::Zero(dim_);
        e[k] = 1.0;
        m.col(k) = apply(StateVector(std::move(e), dims_)).amplitudes();
    }
    return m;
}

} // namespace redsim
