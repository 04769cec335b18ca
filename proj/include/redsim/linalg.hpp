#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace redsim {

using Complex = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;
using Index = Eigen::Index;

/// Tolerance for structural checks (normalization, unitarity, projectors).
inline constexpr double kStructuralTol = 1e-10;
/// Tolerance for algebraic identities evaluated in double precision.
inline constexpr double kAlgebraicTol = 1e-12;

/// Flat index of a multi-index in the lexicographic tensor convention used
/// throughout: the LEFT factor is the most significant digit.
Index flat_index(std::span<const Index> dims, std::span<const Index> digits);
/// Inverse of flat_index.
std::vector<Index> unflatten(std::span<const Index> dims, Index flat);
Index product_dim(std::span<const Index> dims);

/// Complex-amplitude vector over a labeled tensor-product basis.
///
/// The factor-dimension list is part of the value: an 18-dimensional vector
/// with factors (2, 3, 3) is a different thing from one with factors (2, 9).
class StateVector {
public:
    StateVector(Vec amplitudes, std::vector<Index> factor_dims);
    StateVector(Vec amplitudes, std::vector<Index> factor_dims,
                std::vector<std::string> factor_labels);

    /// Basis state |digits...> of the given product space.
    static StateVector basis_state(std::vector<Index> factor_dims,
                                   std::span<const Index> digits);

    const Vec& amplitudes() const { return amps_; }
    const std::vector<Index>& factor_dims() const { return dims_; }
    const std::vector<std::string>& factor_labels() const { return labels_; }
    Index dim() const { return amps_.size(); }
    std::size_t num_factors() const { return dims_.size(); }

    Complex amplitude(std::span<const Index> digits) const;

    double norm() const { return amps_.norm(); }
    double norm2() const { return amps_.squaredNorm(); }
    bool is_normalized(double tol = kStructuralTol) const;
    StateVector normalized() const;

    Complex inner(const StateVector& other) const;

    /// |overlap|, insensitive to a global phase on either side.
    double overlap(const StateVector& other) const;

    StateVector scaled(Complex c) const;
    StateVector plus(const StateVector& other) const;

private:
    Vec amps_;
    std::vector<Index> dims_;
    std::vector<std::string> labels_;
};

enum class OpKind { General, Unitary, Hermitian, Projector };

/// Dense complex square matrix over the same labeled tensor-product basis.
/// A kind flag other than General is verified at construction.
class Operator {
public:
    Operator(Mat entries, std::vector<Index> factor_dims, OpKind kind = OpKind::General);

    static Operator identity(std::vector<Index> factor_dims);

    const Mat& entries() const { return entries_; }
    const std::vector<Index>& factor_dims() const { return dims_; }
    OpKind kind() const { return kind_; }
    Index dim() const { return entries_.rows(); }

    /// Exact matrix-vector product. Normalization of the result is NOT
    /// enforced (norm-decreasing evolutions are legitimate callers).
    StateVector apply(const StateVector& s) const;

    Operator adjoint() const;
    Operator compose(const Operator& rhs) const; // this * rhs

    double unitarity_defect() const;   // max |(U†U - 1)_jk|
    double hermiticity_defect() const; // max |(A - A†)_jk|
    double projector_defect() const;   // max of hermiticity and |(P² - P)_jk|

private:
    Mat entries_;
    std::vector<Index> dims_;
    OpKind kind_;
};

bool is_unitary(const Operator& op, double tol = kStructuralTol);
bool is_hermitian(const Operator& op, double tol = kStructuralTol);
bool is_projector(const Operator& op, double tol = kStructuralTol);

StateVector kron(const StateVector& a, const StateVector& b);
Operator kron(const Operator& a, const Operator& b);

/// Apply `factor` to the named tensor slots of `state`, identity elsewhere.
/// factor.factor_dims() must match the dimensions of the selected slots, in
/// order. Slots need not be adjacent. Throws on slot collisions or size
/// mismatch.
StateVector apply_on_slots(const Operator& factor, std::span<const std::size_t> slots,
                           const StateVector& state);

struct SlotFactor {
    Operator op;
    std::vector<std::size_t> slots;
};

/// Ordered product of slot-embedded factors over a fixed product space;
/// factors[0] acts first. Keeps large unitaries as compositions so that the
/// hot path stays matrix-vector sized, and the full matrix is never formed.
class CompositeOperator {
public:
    CompositeOperator(std::vector<Index> dims, std::vector<SlotFactor> factors);

    StateVector apply(const StateVector& s) const;
    /// Apply the adjoint of the whole product.
    StateVector apply_adjoint(const StateVector& s) const;

    /// max-norm unitarity defect of the composed operator, evaluated column
    /// by column as ||U†U e_k - e_k||_inf without forming the matrix.
    double unitarity_defect() const;

    /// Dense matrix of the composition. Intended for small total dimensions.
    Mat to_dense() const;

    const std::vector<Index>& dims() const { return dims_; }
    const std::vector<SlotFactor>& factors() const { return factors_; }
    Index dim() const { return dim_; }

private:
    std::vector<Index> dims_;
    std::vector<SlotFactor> factors_;
    Index dim_;
};

} // namespace redsim
