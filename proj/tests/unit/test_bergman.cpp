#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "test_util.hpp"

#include "curvlab/bergman.hpp"
#include "curvlab/errors.hpp"
#include "curvlab/positivity.hpp"

using namespace curvlab;
using namespace testutil;

namespace {

constexpr double kPi = std::numbers::pi;

ComplexMatrix eye(int r) { return ComplexMatrix::Identity(r, r); }

// lower incomplete gamma(a + 1, 1) by its positive series
double gamma_lower_1(int a) {
    double term = 1.0 / (a + 1), sum = term;
    for (int k = 1; k < 60; ++k) {
        term /= (a + 1 + k);
        sum += term;
    }
    return std::exp(-1.0) * sum;
}

WeightFamily gaussian(double c, int r = 1) {
    return WeightFamily::constant(r, [c, r](cplx z) { return ComplexMatrix(std::exp(-c * std::norm(z)) * eye(r)); });
}

}  // namespace

TEST_CASE("Gauss-Legendre rule") {
    const GaussRule g = gauss_legendre(3);
    CHECK(g.nodes[0] == doctest::Approx(-std::sqrt(0.6)).epsilon(1e-15));
    CHECK(g.nodes[1] == doctest::Approx(0.0));
    CHECK(g.weights[1] == doctest::Approx(8.0 / 9.0).epsilon(1e-15));
    CHECK(g.weights[2] == doctest::Approx(5.0 / 9.0).epsilon(1e-15));
    for (int n : {1, 4, 9, 20}) {
        const GaussRule h = gauss_legendre(n, 0.5, 2.0);
        for (int deg = 0; deg < 2 * n; ++deg) {
            double q = 0;
            for (int i = 0; i < n; ++i) q += h.weights[i] * std::pow(h.nodes[i], deg);
            const double exact = (std::pow(2.0, deg + 1) - std::pow(0.5, deg + 1)) / (deg + 1);
            CHECK(q == doctest::Approx(exact).epsilon(1e-13));
        }
    }
}

TEST_CASE("disk grid integrates area and monomials") {
    for (auto br : {std::vector<double>{}, std::vector<double>{0.3}, graded_breaks(0.01)}) {
        const DomainGrid grid(6, 8, br);
        double area = 0;
        for (double w : grid.weights()) {
            CHECK(w > 0);
            area += w;
        }
        CHECK(std::abs(area - kPi) < 1e-12);
    }
    CHECK_THROWS_AS(DomainGrid(4, 4, {1.5}), InputError);
    const std::vector<double> gb = graded_breaks(0.05);
    for (std::size_t i = 0; i + 1 < gb.size(); ++i) CHECK(gb[i + 1] / gb[i] <= 2.0 + 1e-12);
}

TEST_CASE("Gram of the flat weight is diagonal") {
    const WeightFamily w = WeightFamily::constant(1, [](cplx) { return eye(1); });
    const HermitianMatrix g = gram(w, ComplexVector::Zero(1), {2, 1}, DomainGrid(8, 16));
    for (int a = 0; a <= 2; ++a)
        for (int b = 0; b <= 2; ++b)
            CHECK(std::abs(g(a, b) - (a == b ? cplx(kPi / (a + 1)) : cplx(0))) < 1e-13);
}

TEST_CASE("Gram of the Gaussian weight") {
    const HermitianMatrix g = gram(gaussian(1.0), ComplexVector::Zero(1), {6, 1}, DomainGrid(24, 16));
    for (int a = 0; a <= 6; ++a) CHECK(g(a, a).real() == doctest::Approx(kPi * gamma_lower_1(a)).epsilon(1e-12));
    CHECK(hermitian_residual(g.matrix()) == 0.0);
    CHECK(min_eigenvalue(g) > 0);

    // independent radial oracle: composite Simpson on 2 pi rho^{2a+1} e^{-rho^2}
    const int n = 4000;
    for (int a : {0, 3, 6}) {
        double s = 0;
        for (int i = 0; i <= n; ++i) {
            const double x = double(i) / n;
            const double f = 2 * kPi * std::pow(x, 2 * a + 1) * std::exp(-x * x);
            s += f * (i == 0 || i == n ? 1 : (i % 2 ? 4 : 2));
        }
        CHECK(g(a, a).real() == doctest::Approx(s / (3.0 * n)).epsilon(1e-10));
    }
}

TEST_CASE("Gram is quadrature-stable, t-independent and deterministic") {
    const WeightFamily w = WeightFamily::constant(2, [](cplx z) {
        ComplexMatrix m(2, 2);
        m << 2 + std::norm(z), 0.3 * z, 0.3 * std::conj(z), 1.0;
        return m;
    });
    const BasisSpec b{12, 2};
    const DomainGrid grid(30, 64);
    const HermitianMatrix g = gram(w, ComplexVector::Zero(1), b, grid);
    const HermitianMatrix g2 = gram(w, ComplexVector::Zero(1), b, grid.refined());
    CHECK((g.matrix() - g2.matrix()).norm() < 1e-8 * g.matrix().norm());
    ComplexVector t(1);
    t(0) = cplx(0.3, -0.2);
    CHECK((gram(w, t, b, grid).matrix() - g.matrix()).norm() == 0.0);
    const HermitianMatrix gp = gram(w, ComplexVector::Zero(1), b, grid, Exec::parallel);
    CHECK((gp.matrix() - g.matrix()).norm() == 0.0);

    const WeightFamily bad = WeightFamily::constant(1, [](cplx z) { return ComplexMatrix(eye(1) * (z.real() - 0.5)); });
    CHECK_THROWS_AS(gram(bad, ComplexVector::Zero(1), {2, 1}, grid), DegenerateMetricError);
}

TEST_CASE("minimal extension") {
    const WeightFamily flat1 = WeightFamily::constant(1, [](cplx) { return eye(1); });
    const BasisSpec b1{6, 1};
    const HermitianMatrix g1 = gram(flat1, ComplexVector::Zero(1), b1, DomainGrid(8, 16));
    ComplexVector f0(1);
    f0 << 1.0;
    const Extension e = minimal_extension(g1, point_evaluation(b1, 0), f0);
    CHECK(e.norm2 == doctest::Approx(kPi).epsilon(1e-13));
    CHECK(std::abs(e.coeffs(0) - 1.0) < 1e-13);
    CHECK(e.coeffs.tail(6).norm() < 1e-13);
    CHECK(minimal_extension(g1, point_evaluation(b1, 0), ComplexVector::Zero(1)).norm2 == 0.0);

    const WeightFamily flat2 = WeightFamily::constant(2, [](cplx) { return eye(2); });
    const BasisSpec b2{4, 2};
    const HermitianMatrix g2 = gram(flat2, ComplexVector::Zero(1), b2, DomainGrid(8, 16));
    ComplexVector f2(2);
    f2 << 1.0, 0.0;
    const Extension e2 = minimal_extension(g2, point_evaluation(b2, 0), f2);
    CHECK(e2.norm2 == doctest::Approx(kPi).epsilon(1e-13));
    for (int a = 0; a <= 4; ++a) CHECK(std::abs(e2.coeffs(b2.index(a, 1))) < 1e-13);

    ComplexMatrix dup(2, 7);
    dup.row(0) = point_evaluation(b1, 0).row(0);
    dup.row(1) = dup.row(0);
    CHECK_THROWS_AS(minimal_extension(g1, dup, ComplexVector::Ones(2)), InputError);
}

TEST_CASE("minimal extension against a null-space oracle") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 5; ++trial) {
        const int n = 8, m = 3;
        const HermitianMatrix g(random_pd(rng, n));
        const ComplexMatrix a = random_matrix(rng, m, n);
        const ComplexVector f0 = random_vector(rng, m);
        const Extension e = minimal_extension(g, a, f0);
        CHECK((a * e.coeffs - f0).norm() < 1e-10);

        // c = c_p + N x with A N = 0; minimize over x by normal equations
        Eigen::FullPivLU<ComplexMatrix> lu(a);
        const ComplexVector cp = lu.solve(f0);
        const ComplexMatrix nsp = lu.kernel();
        // norm c^T G conj(c) = y^dag G y with y = conj(c)
        const ComplexMatrix nb = nsp.conjugate();
        const ComplexVector yp = cp.conjugate();
        const ComplexVector x = (nb.adjoint() * g.matrix() * nb).ldlt().solve(-nb.adjoint() * g.matrix() * yp);
        const ComplexVector y = yp + nb * x;
        const double oracle = (y.adjoint() * g.matrix() * y)(0, 0).real();
        CHECK(e.norm2 == doctest::Approx(oracle).epsilon(1e-9));
    }
}

TEST_CASE("minimal norm does not increase with the degree") {
    const WeightFamily w = WeightFamily::constant(1, [](cplx z) { return ComplexMatrix(std::exp(-std::norm(z - 0.4)) * eye(1)); });
    ComplexVector f0(1);
    f0 << 1.0;
    double prev = std::numeric_limits<double>::infinity();
    for (int d = 0; d <= 10; d += 2) {
        const BasisSpec b{d, 1};
        const double v = minimal_extension(gram(w, ComplexVector::Zero(1), b, DomainGrid(24, 32)), point_evaluation(b, 0), f0).norm2;
        CHECK(v <= prev * (1 + 1e-12));
        prev = v;
    }
}

TEST_CASE("flat extension bound") {
    const DomainGrid grid(24, 32);
    ComplexVector one(1);
    one << 1.0;
    const OtBound flat = ot_bound_check(WeightFamily::constant(1, [](cplx) { return eye(1); }), one, 1.0, 12, grid);
    CHECK(flat.pass);
    CHECK(std::abs(flat.lhs / kPi - 1) < 5e-3);
    CHECK(flat.rhs == doctest::Approx(kPi));
    CHECK(flat.rhs_delta == doctest::Approx(2 * kPi));

    const OtBound gs = ot_bound_check(gaussian(1.0), one, 1.0, 12, grid);
    CHECK(gs.pass);
    CHECK(gs.slack > 0.5);
    CHECK(gs.lhs == doctest::Approx(kPi * (1 - std::exp(-1.0))).epsilon(1e-10));

    const WeightFamily diag2 = WeightFamily::constant(2, [](cplx z) {
        ComplexMatrix m = ComplexMatrix::Zero(2, 2);
        m(0, 0) = std::exp(-std::norm(z));
        m(1, 1) = std::exp(-2 * std::norm(z));
        return m;
    });
    ComplexVector f2(2);
    f2 << 1.0, 1.0;
    const OtBound d2 = ot_bound_check(diag2, f2, 1.0, 12, grid);
    CHECK(d2.pass);
    CHECK(d2.lhs < 2 * kPi);
    CHECK(d2.rhs == doctest::Approx(2 * kPi));

    CHECK_THROWS_AS(ot_bound_check(gaussian(-1.0), one, 1.0, 6, grid), ConfigError);
}

TEST_CASE("direct image curvature: t-independent weight") {
    const BiForm f = direct_image_curvature(gaussian(1.0), ComplexVector::Zero(1), {6, 1}, DomainGrid(24, 16));
    CHECK(f.matrix.matrix().norm() == 0.0);
}

TEST_CASE("direct image curvature of the shifted Gaussian") {
    // At t = 0 the Gram is diagonal with g_a = pi gamma(a+1, 1) and the
    // curvature is diagonal: g_a - g_{a+1} + g_a^2 / g_{a-1}.
    const int d = 6;
    const BiForm f = direct_image_curvature(shifted_gaussian_family(), ComplexVector::Zero(1), {d, 1}, DomainGrid(24, 32));
    auto g = [](int a) { return kPi * gamma_lower_1(a); };
    for (int a = 0; a <= d; ++a) {
        const double expect = g(a) - g(a + 1) + (a > 0 ? g(a) * g(a) / g(a - 1) : 0.0);
        CHECK(f.matrix(a, a).real() == doctest::Approx(expect).epsilon(1e-6));
    }
    CHECK(min_eigenvalue(f.matrix) >= -1e-6 * f.scale());

    ComplexVector far(1);
    far << 0.9995;
    CHECK_THROWS_AS(direct_image_curvature(shifted_gaussian_family(), far, {2, 1}, DomainGrid(8, 8)), InputError);
}

TEST_CASE("coupled rank-two family satisfies the hypotheses and has PSD direct image") {
    const WeightFamily w = coupled_gaussian_family(1.0);
    const HypothesisCheck hc = check_direct_image_hypotheses(w, 2, 12, 3);
    CHECK(hc.fiber_ok);
    CHECK(hc.total_ok);
    for (int d : {4, 6}) {
        const BiForm f = direct_image_curvature(w, ComplexVector::Zero(1), {d, 2}, DomainGrid(24, 32));
        CHECK(min_eigenvalue(f.matrix) >= -1e-4 * f.scale());
    }
    // coupling beyond 2 breaks plurisubharmonicity of one eigen-weight
    CHECK_FALSE(check_direct_image_hypotheses(coupled_gaussian_family(3.0), 2, 12, 3).total_ok);
}

TEST_CASE("dual norm track matches the radial closed form") {
    const double p = 8;
    const WeightFamily w = degeneration_family(p, 1, [](cplx) { return eye(1); });
    std::vector<double> ts;
    for (double t = -6; t <= -1 + 1e-12; t += 0.25) ts.push_back(t);
    ComplexVector sigma(1);
    sigma << 1.0;
    const DualNormTrack tr = dual_norm_track(w, eye(1), sigma, ts, 12, 24, 32);
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double g00 = kPi + kPi * (1 - std::exp((p - 1) * ts[i])) / (p - 1);
        CHECK(tr.log_norm2[i] == doctest::Approx(-std::log(g00)).epsilon(1e-10));
    }
    CHECK(tr.min_first_diff >= -1e-6);
    CHECK(tr.min_second_diff >= -1e-6);
    CHECK(std::exp(tr.log_norm2.front()) == doctest::Approx((p - 1) / (p * kPi)).epsilon(1e-9));

    const DualNormTrack tp = dual_norm_track(w, eye(1), sigma, ts, 12, 24, 32, Exec::parallel);
    CHECK(tp.log_norm2 == tr.log_norm2);
}

TEST_CASE("dual norm track: Gram entries against the closed form") {
    const double p = 8, t = -4;
    const WeightFamily w = degeneration_family(p, 1, [](cplx) { return eye(1); });
    ComplexVector tv(1);
    tv << t;
    const HermitianMatrix g = gram(w, tv, {12, 1}, grid_for(w, tv, 24, 32));
    const double s = std::exp(0.5 * t);
    for (int a = 0; a <= 12; ++a) {
        const double inner = std::pow(s, 2 * a + 2) / (2 * a + 2);
        const double e = 2 * a + 2 - 2 * p;
        const double outer = e == 0 ? -std::log(s) : (1 - std::pow(s, e)) / e;
        const double expect = std::exp(-t) * 2 * kPi * (inner + std::exp(p * t) * outer);
        CHECK(g(a, a).real() == doctest::Approx(expect).epsilon(1e-10));
    }
}

TEST_CASE("dual norm track is constant for a t-independent weight") {
    const WeightFamily w = WeightFamily::constant(2, [](cplx z) {
        ComplexMatrix m(2, 2);
        m << 1.0 + std::norm(z), 0.2 * z, 0.2 * std::conj(z), 1.0;
        return m;
    });
    ComplexVector sigma(2);
    sigma << 1.0, cplx(0, 1);
    const DualNormTrack tr = dual_norm_track(w, eye(2), sigma, {-3, -2, -1}, 6, 16, 32);
    CHECK(tr.log_norm2[0] == tr.log_norm2[1]);
    CHECK(tr.log_norm2[1] == tr.log_norm2[2]);
}

TEST_CASE("co-area limit") {
    for (double t : {-4.0, -10.0, -20.0})
        CHECK(std::abs(coarea_limit([](cplx) { return 1.0; }, t) - kPi) < 1e-14 * kPi);
    const double t = -10;
    CHECK(coarea_limit([](cplx z) { return 1 + std::norm(z); }, t) ==
          doctest::Approx(kPi + kPi * std::exp(t) / 2).epsilon(1e-13));
    const double v = coarea_limit([](cplx z) { return 1 + z.real(); }, t);
    CHECK(std::abs(v / kPi - 1) < 1e-3);
    CHECK(coarea_limit([](cplx z) { return std::norm(z); }, -12) < 1e-5);
}

TEST_CASE("liminf bound") {
    std::vector<double> s, nu, zero;
    const double step = 1e-4;
    for (int i = -200000; i <= 0; ++i) {
        s.push_back(i * step);
        nu.push_back(std::exp(i * step));
        zero.push_back(0);
    }
    const std::vector<double> te{-15, -10, -5, -1};
    for (double p : {2.0, 4.0, 8.0}) {
        const LiminfBound lb = liminf_bound_check(s, nu, p, te);
        for (std::size_t i = 0; i < te.size(); ++i)
            CHECK(lb.values[i] == doctest::Approx((1 - std::exp((p - 1) * te[i])) / (p - 1)).epsilon(1e-7));
        CHECK(std::abs(lb.tail_value - 1 / (p - 1)) < 1e-6);
        CHECK(lb.pass);
    }
    const LiminfBound z = liminf_bound_check(s, zero, 2, te);
    CHECK(z.min_value == 0.0);
    CHECK(z.pass);
    // off-grid evaluation point
    const LiminfBound off = liminf_bound_check(s, nu, 2, {-3.00005});
    CHECK(off.values[0] == doctest::Approx(1 - std::exp(-3.00005)).epsilon(1e-7));

    std::vector<double> dec = nu;
    dec[10] = dec[11] + 1;
    CHECK_THROWS_AS(liminf_bound_check(s, dec, 2, te), InputError);
    CHECK_THROWS_AS(liminf_bound_check(s, nu, 1.0, te), InputError);
}

TEST_CASE("homogeneous coefficients") {
    auto sample = [](auto fn, double rho, int m) {
        CircleSamples c;
        c.radius = rho;
        for (int k = 0; k < m; ++k) c.values.push_back(fn(std::polar(rho, 2 * kPi * k / m)));
        return c;
    };
    auto constant = [](cplx) { ComplexVector v(1); v << 3.0; return v; };
    auto a0 = homogeneous_coefficients({sample(constant, 0.5, 9)}, 4);
    CHECK(std::abs(a0[0](0) - 3.0) < 1e-14);
    for (int j = 1; j <= 4; ++j) CHECK(std::abs(a0[j](0)) < 1e-14);

    auto square = [](cplx w) { ComplexVector v(1); v << w * w; return v; };
    auto a2 = homogeneous_coefficients({sample(square, 0.7, 9), sample(square, 0.4, 11)}, 4);
    for (int j = 0; j <= 4; ++j) CHECK(std::abs(a2[j](0) - (j == 2 ? 1.0 : 0.0)) < 1e-13);

    std::mt19937_64 rng(5);
    std::vector<ComplexVector> coef;
    for (int j = 0; j <= 5; ++j) coef.push_back(random_vector(rng, 2));
    auto poly = [&](cplx w) {
        ComplexVector v = ComplexVector::Zero(2);
        cplx p = 1;
        for (const auto& c : coef) {
            v += p * c;
            p *= w;
        }
        return v;
    };
    const auto a = homogeneous_coefficients({sample(poly, 0.6, 13), sample(poly, 0.9, 16)}, 5);
    for (int j = 0; j <= 5; ++j) CHECK((a[j] - coef[j]).norm() < 1e-10);
    const CircleSamples held = sample(poly, 0.35, 7);
    for (int k = 0; k < 7; ++k) {
        const cplx w = std::polar(0.35, 2 * kPi * k / 7);
        ComplexVector v = ComplexVector::Zero(2);
        cplx p = 1;
        for (const auto& c : a) {
            v += p * c;
            p *= w;
        }
        CHECK((v - held.values[k]).norm() < 1e-8);
    }

    CHECK_THROWS_AS(homogeneous_coefficients({sample(poly, 0.6, 9)}, 5), InputError);
    CHECK_THROWS_AS(homogeneous_coefficients({sample(poly, 0.6, 11)}, 3), InputError);
    // degree 7 folds onto mode 0 with 7 angles; two radii expose it
    auto hi = [](cplx w) { ComplexVector v(1); v << 1.0 + std::pow(w, 7); return v; };
    CHECK_THROWS_AS(homogeneous_coefficients({sample(hi, 0.5, 7), sample(hi, 0.9, 7)}, 3), InputError);
}

TEST_CASE("weighted norm decomposition") {
    auto vec = [](std::initializer_list<cplx> xs) {
        std::vector<ComplexVector> out;
        for (cplx x : xs) {
            ComplexVector v(1);
            v << x;
            out.push_back(v);
        }
        return out;
    };
    const NormDecomposition c = weighted_norm_decomposition(vec({1.0}), 1.0);
    CHECK(c.quadrature == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(c.pass);
    CHECK(weighted_norm_decomposition(vec({0.0, 1.0}), 1.0).quadrature == doctest::Approx(1.0 / 3).epsilon(1e-10));
    CHECK(weighted_norm_decomposition(vec({1.0, 1.0}), 1.0).quadrature == doctest::Approx(0.5 + 1.0 / 3).epsilon(1e-10));

    std::mt19937_64 rng(8);
    std::vector<ComplexVector> a;
    for (int j = 0; j < 6; ++j) a.push_back(random_vector(rng, 3));
    for (double delta : {0.37, 1.0, 2.5}) {
        const NormDecomposition nd = weighted_norm_decomposition(a, delta);
        CHECK(nd.pass);
        // dropping the higher modes only lowers the value: the i = 0 term is a lower bound
        CHECK(nd.closed_form >= a[0].squaredNorm() / (delta + 1));
    }
    CHECK_THROWS_AS(weighted_norm_decomposition(a, 0.0), InputError);
}
