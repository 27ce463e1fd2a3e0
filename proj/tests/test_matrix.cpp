#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "gamekin/matrix.hpp"

using namespace gamekin;

namespace {

std::mt19937 rng(20240917u);

ComplexMatrix random_matrix(std::size_t rows, std::size_t cols) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    ComplexMatrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) m(r, c) = cplx(u(rng), u(rng));
    return m;
}

ComplexMatrix random_hermitian(std::size_t n) {
    ComplexMatrix g = random_matrix(n, n);
    ComplexMatrix h(n, n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) h(r, c) = 0.5 * (g(r, c) + std::conj(g(c, r)));
    return h;
}

double max_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
    REQUIRE(a.rows() == b.rows());
    REQUIRE(a.cols() == b.cols());
    double d = 0.0;
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < a.cols(); ++c) d = std::max(d, std::abs(a(r, c) - b(r, c)));
    return d;
}

// fixture with spectrum {-2, 0, 0, 2}; the +/-2 eigenvectors are
// [1,0,1,0]/sqrt(2) and [0,-i,0,1]/sqrt(2)
ComplexMatrix spectrum_fixture() {
    const cplx i(0.0, 1.0);
    return ComplexMatrix(4, 4,
                         {1, 0, 1, 0,
                          0, -1, 0, i,
                          1, 0, 1, 0,
                          0, -i, 0, -1});
}

ComplexMatrix projector(const std::vector<cplx>& v) {
    ComplexMatrix p(v.size(), v.size());
    for (std::size_t r = 0; r < v.size(); ++r)
        for (std::size_t c = 0; c < v.size(); ++c) p(r, c) = v[r] * std::conj(v[c]);
    return p;
}

}  // namespace

TEST_CASE("matrix constructors validate their input") {
    CHECK_THROWS_AS(ComplexMatrix(0, 2), std::invalid_argument);
    CHECK_THROWS_AS(ComplexMatrix(2, 2, {1.0, 2.0}), std::invalid_argument);
    const double inf = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(ComplexMatrix(1, 2, {cplx(inf, 0.0), 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(ComplexMatrix(1, 1, {cplx(0.0, std::nan(""))}), std::invalid_argument);

    const ComplexMatrix id = ComplexMatrix::identity(3);
    CHECK(id(0, 0) == cplx(1.0));
    CHECK(id(1, 0) == cplx(0.0));
    CHECK(id.trace() == cplx(3.0));

    const ComplexMatrix d = ComplexMatrix::diagonal({cplx(1, 2), cplx(-3, 0)});
    CHECK(d(0, 0) == cplx(1, 2));
    CHECK(d(1, 1) == cplx(-3, 0));
    CHECK(d(0, 1) == cplx(0.0));
    CHECK(d.exactly_diagonal());
}

TEST_CASE("adjoint conjugate-transposes and hermiticity defect measures asymmetry") {
    const ComplexMatrix m(2, 3, {cplx(1, 1), 2, 3, 4, cplx(0, -2), 6});
    const ComplexMatrix a = m.adjoint();
    CHECK(a.rows() == 3);
    CHECK(a.cols() == 2);
    CHECK(a(0, 0) == cplx(1, -1));
    CHECK(a(1, 1) == cplx(0, 2));

    CHECK(random_hermitian(5).hermiticity_defect() == 0.0);
    const ComplexMatrix n(2, 2, {0, 1, 0, 0});
    CHECK(n.hermiticity_defect() == doctest::Approx(1.0));
}

TEST_CASE("dimension profile rejects empty and zero factors") {
    CHECK_THROWS_AS(DimensionProfile({}), std::invalid_argument);
    CHECK_THROWS_AS(DimensionProfile({2, 0}), std::invalid_argument);
    const DimensionProfile p({2, 3, 4});
    CHECK(p.players() == 3);
    CHECK(p.total() == 24);
    CHECK(p.dim(1) == 3);
}

TEST_CASE("kronecker product matches the four-index formula") {
    const ComplexMatrix a = random_matrix(2, 3);
    const ComplexMatrix b = random_matrix(3, 2);
    const ComplexMatrix k = kron(a, b);
    REQUIRE(k.rows() == 6);
    REQUIRE(k.cols() == 6);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            for (std::size_t p = 0; p < 3; ++p)
                for (std::size_t q = 0; q < 2; ++q)
                    CHECK(k(i * 3 + p, j * 2 + q) == a(i, j) * b(p, q));

    CHECK(max_diff(kron(ComplexMatrix::identity(2), ComplexMatrix::identity(3)),
                   ComplexMatrix::identity(6)) == 0.0);

    const ComplexMatrix sa = random_matrix(3, 3);
    const ComplexMatrix sb = random_matrix(4, 4);
    CHECK(std::abs(kron(sa, sb).trace() - sa.trace() * sb.trace()) < 1e-13);
}

TEST_CASE("partial trace of a kronecker product factors") {
    const ComplexMatrix a = random_hermitian(2);
    const ComplexMatrix b = random_hermitian(3);
    const ComplexMatrix ab = kron(a, b);
    const DimensionProfile profile({2, 3});

    ComplexMatrix want_a = a;
    want_a *= b.trace();
    CHECK(max_diff(partial_trace(ab, profile, 0), want_a) < 1e-13);

    ComplexMatrix want_b = b;
    want_b *= a.trace();
    CHECK(max_diff(partial_trace(ab, profile, 1), want_b) < 1e-13);

    const ComplexMatrix c = random_hermitian(2);
    const ComplexMatrix abc = kron(kron(a, b), c);
    ComplexMatrix want_mid = b;
    want_mid *= a.trace() * c.trace();
    CHECK(max_diff(partial_trace(abc, DimensionProfile({2, 3, 2}), 1), want_mid) < 1e-13);
}

TEST_CASE("partial trace matches the explicit index sum") {
    const ComplexMatrix m = random_matrix(6, 6);
    const DimensionProfile profile({2, 3});

    ComplexMatrix keep_first(2, 2);
    for (std::size_t a = 0; a < 2; ++a)
        for (std::size_t b = 0; b < 2; ++b) {
            cplx s = 0.0;
            for (std::size_t nu = 0; nu < 3; ++nu) s += m(a * 3 + nu, b * 3 + nu);
            keep_first(a, b) = s;
        }
    CHECK(max_diff(partial_trace(m, profile, 0), keep_first) < 1e-14);

    ComplexMatrix keep_second(3, 3);
    for (std::size_t mu = 0; mu < 3; ++mu)
        for (std::size_t nu = 0; nu < 3; ++nu) {
            cplx s = 0.0;
            for (std::size_t a = 0; a < 2; ++a) s += m(a * 3 + mu, a * 3 + nu);
            keep_second(mu, nu) = s;
        }
    CHECK(max_diff(partial_trace(m, profile, 1), keep_second) < 1e-14);

    CHECK(std::abs(partial_trace(m, profile, 0).trace() - m.trace()) < 1e-13);
    CHECK(std::abs(partial_trace(m, profile, 1).trace() - m.trace()) < 1e-13);

    CHECK_THROWS_AS(partial_trace(m, profile, 2), std::invalid_argument);
    CHECK_THROWS_AS(partial_trace(m, DimensionProfile({2, 2}), 0), std::invalid_argument);
}

TEST_CASE("eigensystem of a diagonal matrix sorts values and picks basis vectors") {
    const ComplexMatrix h = ComplexMatrix::diagonal({-2, -5, 0, -4});
    const EigenSystem es = eig_hermitian(h);
    REQUIRE(es.values.size() == 4);
    CHECK(es.values[0] == doctest::Approx(-5.0));
    CHECK(es.values[1] == doctest::Approx(-4.0));
    CHECK(es.values[2] == doctest::Approx(-2.0));
    CHECK(es.values[3] == doctest::Approx(0.0));

    const std::size_t slots[4] = {1, 3, 0, 2};
    for (std::size_t col = 0; col < 4; ++col)
        for (std::size_t row = 0; row < 4; ++row) {
            const double want = row == slots[col] ? 1.0 : 0.0;
            CHECK(std::abs(es.vectors(row, col) - cplx(want)) < 1e-12);
        }
}

TEST_CASE("eigensystem recovers the known eigenpairs of the spectrum fixture") {
    const ComplexMatrix h = spectrum_fixture();
    const EigenSystem es = eig_hermitian(h);
    CHECK(es.values[0] == doctest::Approx(-2.0));
    CHECK(es.values[1] == doctest::Approx(0.0));
    CHECK(es.values[2] == doctest::Approx(0.0));
    CHECK(es.values[3] == doctest::Approx(2.0));

    const double s = 1.0 / std::sqrt(2.0);
    const std::vector<cplx> minus = {0.0, cplx(0.0, -s), 0.0, s};
    const std::vector<cplx> plus = {s, 0.0, s, 0.0};

    cplx overlap_minus = 0.0, overlap_plus = 0.0;
    for (std::size_t r = 0; r < 4; ++r) {
        overlap_minus += std::conj(minus[r]) * es.vectors(r, 0);
        overlap_plus += std::conj(plus[r]) * es.vectors(r, 3);
    }
    CHECK(std::abs(overlap_minus) == doctest::Approx(1.0));
    CHECK(std::abs(overlap_plus) == doctest::Approx(1.0));
}

TEST_CASE("eigensystem satisfies reconstruction, orthonormality, and phase convention") {
    for (const std::size_t n : {1u, 2u, 3u, 5u, 8u, 16u}) {
        const ComplexMatrix h = random_hermitian(n);
        const EigenSystem es = eig_hermitian(h);

        for (std::size_t k = 0; k + 1 < n; ++k) CHECK(es.values[k] <= es.values[k + 1]);

        ComplexMatrix recon(n, n);
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < n; ++c) {
                cplx s = 0.0;
                for (std::size_t k = 0; k < n; ++k)
                    s += es.vectors(r, k) * es.values[k] * std::conj(es.vectors(c, k));
                recon(r, c) = s;
            }
        CHECK(max_diff(recon, h) < 1e-10 * std::max(1.0, h.max_abs()));

        const ComplexMatrix gram = es.vectors.adjoint() * es.vectors;
        CHECK(max_diff(gram, ComplexMatrix::identity(n)) < 1e-12);

        for (std::size_t k = 0; k < n; ++k) {
            std::size_t pivot = 0;
            for (std::size_t r = 1; r < n; ++r)
                if (std::abs(es.vectors(r, k)) > std::abs(es.vectors(pivot, k))) pivot = r;
            CHECK(es.vectors(pivot, k).real() > 0.0);
            CHECK(std::abs(es.vectors(pivot, k).imag()) < 1e-12);
        }
    }

    CHECK(max_diff(eig_hermitian(ComplexMatrix::identity(4)).vectors,
                   ComplexMatrix::identity(4)) < 1e-12);
}

TEST_CASE("eigensystem rejects non-hermitian input and reports the asymmetry") {
    const ComplexMatrix n(2, 2, {0, 1, 0, 0});
    CHECK_THROWS_WITH_AS(eig_hermitian(n),
                         doctest::Contains("max asymmetry 1"), std::invalid_argument);

    ComplexMatrix nearly = random_hermitian(3);
    nearly(0, 1) += cplx(1e-12, 0.0);
    CHECK_NOTHROW(eig_hermitian(nearly));
}

TEST_CASE("gibbs at beta zero is maximally mixed") {
    const ComplexMatrix rho = gibbs_exp(random_hermitian(4), 0.0);
    ComplexMatrix want = ComplexMatrix::identity(4);
    want *= cplx(0.25);
    CHECK(max_diff(rho, want) < 1e-14);
}

TEST_CASE("gibbs on a diagonal matrix matches the scalar formula and stays diagonal") {
    const ComplexMatrix h = ComplexMatrix::diagonal({1, -1});
    const ComplexMatrix rho = gibbs_exp(h, std::log(2.0));
    CHECK(std::abs(rho(0, 0) - cplx(0.8)) < 1e-14);
    CHECK(std::abs(rho(1, 1) - cplx(0.2)) < 1e-14);
    CHECK(rho.exactly_diagonal());
    CHECK(rho(0, 1) == cplx(0.0));

    const ComplexMatrix big = gibbs_exp(ComplexMatrix::diagonal({3, -1, 0, 2}), 400.0);
    CHECK(std::abs(big(0, 0) - cplx(1.0)) < 1e-14);
    CHECK(big.exactly_diagonal());
}

TEST_CASE("gibbs matches the projector formula on the spectrum fixture") {
    const double s = 1.0 / std::sqrt(2.0);
    const ComplexMatrix p_plus = projector({s, 0.0, s, 0.0});
    const ComplexMatrix p_minus = projector({0.0, cplx(0.0, -s), 0.0, s});

    const double beta = 0.7;
    const double z = std::exp(2.0 * beta) + std::exp(-2.0 * beta) + 2.0;
    ComplexMatrix kernel = ComplexMatrix::identity(4);
    kernel -= p_plus;
    kernel -= p_minus;
    ComplexMatrix want = p_plus;
    want *= std::exp(2.0 * beta);
    ComplexMatrix cold = p_minus;
    cold *= std::exp(-2.0 * beta);
    want += cold;
    want += kernel;
    want *= 1.0 / z;

    CHECK(max_diff(gibbs_exp(spectrum_fixture(), beta), want) < 1e-12);
}

TEST_CASE("gibbs output is a valid density matrix that commutes with its input") {
    for (const double beta : {0.5, 5.0, 50.0}) {
        const ComplexMatrix h = random_hermitian(5);
        const ComplexMatrix rho = gibbs_exp(h, beta);

        CHECK(std::abs(rho.trace() - cplx(1.0)) < 1e-12);
        CHECK(rho.hermiticity_defect() < 1e-15);

        const EigenSystem es = eig_hermitian(rho);
        double sum = 0.0;
        for (const double v : es.values) {
            CHECK(v > -1e-14);
            sum += v;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));

        ComplexMatrix comm = rho * h;
        comm -= h * rho;
        CHECK(comm.max_abs() < 1e-9 * std::max(1.0, h.max_abs()));
    }
}

TEST_CASE("gibbs rejects negative, infinite, and nan beta") {
    const ComplexMatrix h = ComplexMatrix::identity(2);
    CHECK_THROWS_AS(gibbs_exp(h, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(gibbs_exp(h, std::numeric_limits<double>::infinity()),
                    std::invalid_argument);
    CHECK_THROWS_AS(gibbs_exp(h, std::nan("")), std::invalid_argument);
    CHECK_THROWS_AS(gibbs_exp(ComplexMatrix(2, 2, {0, 1, 0, 0}), 1.0),
                    std::invalid_argument);
}

TEST_CASE("operator inner product normalizes unitary bases to unit length") {
    const ComplexMatrix id = ComplexMatrix::identity(2);
    const ComplexMatrix sx(2, 2, {0, 1, 1, 0});
    const cplx i(0.0, 1.0);
    const ComplexMatrix sy(2, 2, {0, -i, i, 0});
    const ComplexMatrix sz = ComplexMatrix::diagonal({1, -1});

    CHECK(op_inner(id, id) == cplx(1.0));
    CHECK(op_inner(sx, sx) == cplx(1.0));
    CHECK(op_inner(sy, sy) == cplx(1.0));
    CHECK(op_inner(id, sx) == cplx(0.0));
    CHECK(op_inner(sx, sz) == cplx(0.0));
    CHECK(std::abs(op_inner(sy, sz)) == 0.0);

    const ComplexMatrix a = random_matrix(3, 3);
    const ComplexMatrix b = random_matrix(3, 3);
    CHECK(std::abs(op_inner(a, b) - std::conj(op_inner(b, a))) < 1e-15);
    CHECK(op_inner(a, a).real() > 0.0);
    CHECK(std::abs(op_inner(a, a).imag()) < 1e-15);

    CHECK_THROWS_AS(op_inner(a, random_matrix(2, 2)), std::invalid_argument);
}
