#pragma once

#include <complex>
#include <cstddef>
#include <vector>

// Dense complex linear algebra used throughout gamekin: Kronecker products,
// partial traces over tensor factors, Hermitian eigendecomposition, Gibbs
// exponentials e^{beta H}/Z, and the normalized operator inner product
// (A,B) = Tr(A^dag B) / n.

namespace gamekin {

using cplx = std::complex<double>;

class ComplexMatrix {
public:
    ComplexMatrix() = default;
    ComplexMatrix(std::size_t rows, std::size_t cols);
    ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries);

    static ComplexMatrix identity(std::size_t n);
    static ComplexMatrix diagonal(const std::vector<cplx>& diag);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool square() const { return rows_ == cols_ && rows_ > 0; }

    cplx operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }
    cplx& operator()(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }
    const std::vector<cplx>& entries() const { return entries_; }

    ComplexMatrix adjoint() const;
    cplx trace() const;
    double max_abs() const;

    // max-abs of M - M^dag; 0 for an exactly Hermitian matrix
    double hermiticity_defect() const;
    bool exactly_diagonal() const;
    std::vector<cplx> diagonal_entries() const;

    ComplexMatrix& operator+=(const ComplexMatrix& other);
    ComplexMatrix& operator-=(const ComplexMatrix& other);
    ComplexMatrix& operator*=(cplx scalar);

    friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
    friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
    friend ComplexMatrix operator*(ComplexMatrix a, cplx s) { return a *= s; }
    friend ComplexMatrix operator*(cplx s, ComplexMatrix a) { return a *= s; }
    friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> entries_;
};

// Tensor-factor dimensions L_1..L_N of a product space, player 1 slowest in
// the row-major flattening used everywhere.
class DimensionProfile {
public:
    explicit DimensionProfile(std::vector<std::size_t> dims);

    std::size_t players() const { return dims_.size(); }
    std::size_t dim(std::size_t i) const { return dims_[i]; }
    std::size_t total() const;
    const std::vector<std::size_t>& dims() const { return dims_; }

    bool operator==(const DimensionProfile&) const = default;

private:
    std::vector<std::size_t> dims_;
};

struct EigenSystem {
    std::vector<double> values;  // ascending
    ComplexMatrix vectors;       // orthonormal columns, phase-canonical
};

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

// Trace out every factor except `keep`: M'_{ab} = sum_nu M_{(..nu..a..),(..nu..b..)}
ComplexMatrix partial_trace(const ComplexMatrix& m, const DimensionProfile& profile,
                            std::size_t keep);

// Hermitian eigendecomposition. Inputs with max-abs asymmetry above
// 1e-9 * max(1, ||h||_max) are rejected; within tolerance the matrix is
// symmetrized as (h + h^dag)/2 first. Eigenvalues ascend; each eigenvector is
// scaled so its largest-magnitude entry is real positive.
EigenSystem eig_hermitian(const ComplexMatrix& h);

// e^{beta h} / Tr(e^{beta h}) for Hermitian h and finite beta >= 0, computed
// through the eigendecomposition with the maximum eigenvalue shifted out
// before exponentiating so large beta cannot overflow. Exactly diagonal
// inputs stay exactly diagonal.
ComplexMatrix gibbs_exp(const ComplexMatrix& h, double beta);

// (a, b) = Tr(a^dag b) / n on n x n matrices. The 1/n factor normalizes the
// commonly used unitary operator bases (identity, flips) to unit length.
cplx op_inner(const ComplexMatrix& a, const ComplexMatrix& b);

}  // namespace gamekin
