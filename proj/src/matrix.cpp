#include "gamekin/matrix.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace gamekin {

namespace {

void require_finite(const std::vector<cplx>& entries, const char* what) {
    for (const cplx& z : entries) {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw std::invalid_argument(std::string(what) + ": non-finite entry");
    }
}

void require_same_shape(const ComplexMatrix& a, const ComplexMatrix& b, const char* what) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument(std::string(what) + ": shape mismatch");
}

double hermiticity_tolerance(const ComplexMatrix& h) {
    return 1e-9 * std::max(1.0, h.max_abs());
}

}  // namespace

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), entries_(rows * cols, cplx(0.0, 0.0)) {
    if (rows == 0 || cols == 0) throw std::invalid_argument("ComplexMatrix: empty shape");
}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (rows == 0 || cols == 0) throw std::invalid_argument("ComplexMatrix: empty shape");
    if (entries_.size() != rows * cols)
        throw std::invalid_argument("ComplexMatrix: entry count does not match shape");
    require_finite(entries_, "ComplexMatrix");
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

ComplexMatrix ComplexMatrix::diagonal(const std::vector<cplx>& diag) {
    require_finite(diag, "ComplexMatrix::diagonal");
    ComplexMatrix m(diag.size(), diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
    return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
    ComplexMatrix out(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) out(c, r) = std::conj((*this)(r, c));
    return out;
}

cplx ComplexMatrix::trace() const {
    if (!square()) throw std::invalid_argument("trace: matrix not square");
    cplx t = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
    return t;
}

double ComplexMatrix::max_abs() const {
    double m = 0.0;
    for (const cplx& z : entries_) m = std::max(m, std::abs(z));
    return m;
}

double ComplexMatrix::hermiticity_defect() const {
    if (!square()) throw std::invalid_argument("hermiticity_defect: matrix not square");
    double d = 0.0;
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c)
            d = std::max(d, std::abs((*this)(r, c) - std::conj((*this)(c, r))));
    return d;
}

bool ComplexMatrix::exactly_diagonal() const {
    if (!square()) return false;
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c)
            if (r != c && (*this)(r, c) != cplx(0.0, 0.0)) return false;
    return true;
}

std::vector<cplx> ComplexMatrix::diagonal_entries() const {
    if (!square()) throw std::invalid_argument("diagonal_entries: matrix not square");
    std::vector<cplx> d(rows_);
    for (std::size_t i = 0; i < rows_; ++i) d[i] = (*this)(i, i);
    return d;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& other) {
    require_same_shape(*this, other, "operator+");
    for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] += other.entries_[i];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& other) {
    require_same_shape(*this, other, "operator-");
    for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] -= other.entries_[i];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(cplx scalar) {
    for (cplx& z : entries_) z *= scalar;
    return *this;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("operator*: inner dimension mismatch");
    ComplexMatrix out(a.rows(), b.cols());
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const cplx ark = a(r, k);
            if (ark == cplx(0.0, 0.0)) continue;
            for (std::size_t c = 0; c < b.cols(); ++c) out(r, c) += ark * b(k, c);
        }
    return out;
}

DimensionProfile::DimensionProfile(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
    if (dims_.empty()) throw std::invalid_argument("DimensionProfile: no factors");
    for (std::size_t d : dims_)
        if (d == 0) throw std::invalid_argument("DimensionProfile: zero dimension");
}

std::size_t DimensionProfile::total() const {
    std::size_t p = 1;
    for (std::size_t d : dims_) p *= d;
    return p;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) {
            const cplx aij = a(i, j);
            if (aij == cplx(0.0, 0.0)) continue;
            for (std::size_t k = 0; k < b.rows(); ++k)
                for (std::size_t l = 0; l < b.cols(); ++l)
                    out(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
        }
    return out;
}

ComplexMatrix partial_trace(const ComplexMatrix& m, const DimensionProfile& profile,
                            std::size_t keep) {
    if (!m.square()) throw std::invalid_argument("partial_trace: matrix not square");
    if (m.rows() != profile.total())
        throw std::invalid_argument("partial_trace: matrix side does not match profile");
    if (keep >= profile.players()) throw std::invalid_argument("partial_trace: keep out of range");

    const std::size_t n = profile.players();
    std::vector<std::size_t> stride(n, 1);
    for (std::size_t j = n; j-- > 1;) stride[j - 1] = stride[j] * profile.dim(j);

    const std::size_t lk = profile.dim(keep);
    ComplexMatrix out(lk, lk);

    // odometer over the traced factors
    std::vector<std::size_t> idx(n, 0);
    while (true) {
        std::size_t base = 0;
        for (std::size_t j = 0; j < n; ++j)
            if (j != keep) base += idx[j] * stride[j];
        for (std::size_t a = 0; a < lk; ++a)
            for (std::size_t b = 0; b < lk; ++b)
                out(a, b) += m(base + a * stride[keep], base + b * stride[keep]);

        std::size_t j = n;
        while (j-- > 0) {
            if (j == keep) continue;
            if (++idx[j] < profile.dim(j)) break;
            idx[j] = 0;
        }
        bool done = true;
        for (std::size_t t = 0; t < n; ++t)
            if (t != keep && idx[t] != 0) { done = false; break; }
        if (done) break;
    }
    return out;
}

EigenSystem eig_hermitian(const ComplexMatrix& h) {
    if (!h.square()) throw std::invalid_argument("eig_hermitian: matrix not square");
    const double defect = h.hermiticity_defect();
    const double tol = hermiticity_tolerance(h);
    if (defect > tol) {
        std::ostringstream msg;
        msg << "eig_hermitian: input not Hermitian (max asymmetry " << defect
            << " exceeds tolerance " << tol << ")";
        throw std::invalid_argument(msg.str());
    }

    const std::size_t n = h.rows();
    Eigen::MatrixXcd a(n, n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c)
            a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                0.5 * (h(r, c) + std::conj(h(c, r)));

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(a);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("eig_hermitian: eigensolver did not converge");

    EigenSystem out;
    out.values.resize(n);
    out.vectors = ComplexMatrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = solver.eigenvalues()(static_cast<Eigen::Index>(k));
        // phase convention: largest-magnitude entry real positive
        std::size_t arg = 0;
        double best = -1.0;
        for (std::size_t r = 0; r < n; ++r) {
            const double mag =
                std::abs(solver.eigenvectors()(static_cast<Eigen::Index>(r),
                                               static_cast<Eigen::Index>(k)));
            if (mag > best) { best = mag; arg = r; }
        }
        const cplx pivot = solver.eigenvectors()(static_cast<Eigen::Index>(arg),
                                                 static_cast<Eigen::Index>(k));
        const cplx phase = std::conj(pivot) / std::abs(pivot);
        for (std::size_t r = 0; r < n; ++r)
            out.vectors(r, k) = phase * solver.eigenvectors()(static_cast<Eigen::Index>(r),
                                                              static_cast<Eigen::Index>(k));
    }
    return out;
}

ComplexMatrix gibbs_exp(const ComplexMatrix& h, double beta) {
    if (!h.square()) throw std::invalid_argument("gibbs_exp: matrix not square");
    if (!std::isfinite(beta)) throw std::invalid_argument("gibbs_exp: beta must be finite");
    if (beta < 0.0) throw std::invalid_argument("gibbs_exp: beta must be nonnegative");

    const std::size_t n = h.rows();

    if (h.exactly_diagonal()) {
        if (h.hermiticity_defect() > hermiticity_tolerance(h))
            throw std::invalid_argument("gibbs_exp: input not Hermitian");
        std::vector<cplx> d = h.diagonal_entries();
        double top = d[0].real();
        for (const cplx& z : d) top = std::max(top, z.real());
        std::vector<double> w(n);
        double z_sum = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            w[k] = std::exp(beta * (d[k].real() - top));
            z_sum += w[k];
        }
        ComplexMatrix out(n, n);
        for (std::size_t k = 0; k < n; ++k) out(k, k) = w[k] / z_sum;
        return out;
    }

    const EigenSystem es = eig_hermitian(h);
    const double top = es.values.back();
    std::vector<double> w(n);
    double z_sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        w[k] = std::exp(beta * (es.values[k] - top));
        z_sum += w[k];
    }

    ComplexMatrix out(n, n);
    for (std::size_t r = 0; r < n; ++r) {
        double diag = 0.0;
        for (std::size_t k = 0; k < n; ++k) diag += (w[k] / z_sum) * std::norm(es.vectors(r, k));
        out(r, r) = diag;
        for (std::size_t c = r + 1; c < n; ++c) {
            cplx v = 0.0;
            for (std::size_t k = 0; k < n; ++k)
                v += (w[k] / z_sum) * es.vectors(r, k) * std::conj(es.vectors(c, k));
            out(r, c) = v;
            out(c, r) = std::conj(v);
        }
    }
    return out;
}

cplx op_inner(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (!a.square() || !b.square() || a.rows() != b.rows())
        throw std::invalid_argument("op_inner: operands must be square with equal dims");
    cplx s = 0.0;
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < a.cols(); ++c) s += std::conj(a(r, c)) * b(r, c);
    return s / static_cast<double>(a.rows());
}

}  // namespace gamekin
