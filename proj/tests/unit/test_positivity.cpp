#include <cmath>
#include <random>

#include "doctest.h"
#include "test_util.hpp"

#include "curvlab/errors.hpp"
#include "curvlab/positivity.hpp"

using namespace curvlab;
using namespace testutil;

namespace {

BiForm at_origin(const MetricField& m) {
    return curvature_biform(chern_curvature(m, ComplexVector::Zero(m.n())));
}

BiForm random_form(std::mt19937_64& rng, int n, int r) {
    return BiForm(n, r, HermitianMatrix(random_hermitian(rng, n * r)));
}

}  // namespace

TEST_CASE("identity form") {
    const BiForm id = BiForm::identity(2, 3);
    CHECK(nakano_min(id) == doctest::Approx(1.0));
    for (int k = 1; k <= 2; ++k) {
        const Verdict v = rank_k_min({id, k});
        CHECK(v.min_value == doctest::Approx(1.0));
        CHECK(v.status == Status::positive);
        CHECK(v.converged);
        CHECK(is_k_positive(id, k));
    }
    CHECK(std::abs(brute_force_min(id, 1) - 1.0) < 1e-3);
}

TEST_CASE("quotient bundle thresholds at the origin") {
    // untwisted: Griffiths-nonnegative, not Nakano-nonnegative
    const BiForm q0 = at_origin(quotient_metric(3));
    CHECK(nakano_min(q0) < -0.5);
    const Verdict g0 = rank_k_min({q0, 1});
    CHECK(std::abs(g0.min_value) <= 1e-8 * q0.scale());
    CHECK(g0.status == Status::nonnegative);
    // witness xi (x) v with a . conj(b) = 0
    CHECK(g0.witness.rank() == 1);
    Eigen::JacobiSVD<ComplexMatrix> svd(g0.witness.coeffs, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const ComplexVector a = svd.matrixU().col(0);
    const ComplexVector b = svd.matrixV().col(0).conjugate() * svd.singularValues()(0);
    CHECK(std::abs((a.array() * b.conjugate().array()).sum()) < 1e-4);

    // Q (x) O(1): Griffiths-positive, not 2-positive
    const BiForm q1 = at_origin(twisted_quotient(3, 1));
    const Verdict g1 = rank_k_min({q1, 1});
    CHECK(g1.min_value > 1e-6);
    CHECK(g1.min_value == doctest::Approx(1.0));
    const Verdict n1 = rank_k_min({q1, 2});
    CHECK(n1.min_value <= 1e-8 * q1.scale());
    CHECK(n1.status != Status::positive);
    CHECK(std::abs(brute_force_min(q1, 1) - g1.min_value) < 1e-3);
    CHECK(std::abs(brute_force_min(q1, 2) - n1.min_value) < 1e-3);

    // Q (x) O(2): Nakano-positive
    const BiForm q2 = at_origin(twisted_quotient(3, 2));
    CHECK(nakano_min(q2) > 0);
    CHECK(is_k_positive(q2, 1));
    CHECK(is_k_positive(q2, 2));
}

TEST_CASE("chain for Q (x) O(1) with r = 4") {
    const BiForm q = at_origin(twisted_quotient(4, 1));
    const std::vector<double> c = chain(q);
    REQUIRE(c.size() == 3);
    CHECK(c[0] > 0);
    CHECK(c[1] <= 1e-8 * q.scale());
    CHECK(std::abs(c[2] - nakano_min(q)) < 1e-6 * q.scale());
    CHECK(std::abs(brute_force_min(q, 2) - c[1]) < 1e-3);
}

TEST_CASE("diagonal brute-force example") {
    ComplexMatrix d = ComplexMatrix::Zero(2, 2);
    d(0, 0) = 1.0;
    d(1, 1) = -1.0;
    const BiForm f(1, 2, HermitianMatrix(d));
    CHECK(std::abs(brute_force_min(f, 1) + 1.0) < 1e-3);
    CHECK(rank_k_min({f, 1}).min_value == doctest::Approx(-1.0));
}

TEST_CASE("rank_k_min agrees with brute force and is monotone on random forms") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 12; ++trial) {
        const int n = 2 + trial % 2, r = 2 + (trial / 2) % 2;
        const BiForm f = random_form(rng, n, r);
        const double s = f.scale();
        const std::vector<double> c = chain(f);
        for (std::size_t i = 1; i < c.size(); ++i) CHECK(c[i] <= c[i - 1] + 1e-12 * s);
        CHECK(std::abs(c.back() - nakano_min(f)) < 1e-6 * s);
        for (int k = 1; k < std::min(n, r); ++k) {
            const Verdict v = rank_k_min({f, k});
            CHECK(std::abs(brute_force_min(f, k, 20000) - v.min_value) < 1e-3 * s);
            CHECK(v.witness.rank() <= k);
            CHECK(std::abs(v.witness.norm() - 1.0) < 1e-12);
            CHECK(std::abs(f.value(v.witness) - v.min_value) <= 1e-9 * s);
        }
    }
}

TEST_CASE("serial and parallel paths agree exactly") {
    std::mt19937_64 rng(22);
    const BiForm f = random_form(rng, 3, 3);
    PositivityQuery a{f, 2};
    PositivityQuery b = a;
    b.exec = Exec::parallel;
    const Verdict va = rank_k_min(a), vb = rank_k_min(b);
    CHECK(va.min_value == vb.min_value);
    CHECK((va.witness.coeffs - vb.witness.coeffs).norm() == 0.0);
    CHECK(brute_force_min(f, 1, 5000, Exec::serial) == brute_force_min(f, 1, 5000, Exec::parallel));
}

TEST_CASE("rank_k_min is deterministic and clamps k") {
    std::mt19937_64 rng(23);
    const BiForm f = random_form(rng, 2, 3);
    CHECK(rank_k_min({f, 1}).min_value == rank_k_min({f, 1}).min_value);
    const Verdict v = rank_k_min({f, 5});
    CHECK(v.clamped);
    CHECK(v.k == 2);
    CHECK(std::abs(v.min_value - nakano_min(f)) < 1e-6 * f.scale());
    CHECK_THROWS_AS(rank_k_min({f, 0}), InputError);
    CHECK_THROWS_AS(brute_force_min(random_form(rng, 4, 4), 1), InputError);
}

TEST_CASE("verdicts are invariant under unitary changes of chart and frame") {
    std::mt19937_64 rng(24);
    for (int trial = 0; trial < 5; ++trial) {
        const int n = 2, r = 3;
        // shift so the k=1 minimum is well away from the decision boundary
        ComplexMatrix m = random_hermitian(rng, n * r);
        const BiForm f0(n, r, HermitianMatrix(m));
        const double g = rank_k_min({f0, 1}).min_value;
        m += (0.3 * (trial % 3 - 1) - g) * ComplexMatrix::Identity(n * r, n * r);
        const BiForm f(n, r, HermitianMatrix(m));
        const ComplexMatrix k = kron(random_unitary(rng, n), random_unitary(rng, r));
        const BiForm fu(n, r, HermitianMatrix(k.transpose() * m * k.conjugate()));
        for (int kk = 1; kk <= 2; ++kk) {
            const Verdict a = rank_k_min({f, kk}), b = rank_k_min({fu, kk});
            CHECK(a.status == b.status);
            CHECK(std::abs(a.min_value - b.min_value) < 1e-8 * f.scale());
        }
    }
}

TEST_CASE("frame gauge: conjugating the metric by a constant unitary") {
    std::mt19937_64 rng(25);
    const ComplexMatrix w = random_unitary(rng, 2);
    const MetricField q = twisted_quotient(3, 1);
    MatrixFn f = q.evaluator();
    const MetricField qw =
        MetricField(2, 2, [f, w](const ComplexVector& z) { return ComplexMatrix(w * f(z) * w.adjoint()); })
            .with_closed_form([q, w](const ComplexVector& z) {
                Jet j = q.jet(z);
                j.f = w * j.f * w.adjoint();
                for (auto& d : j.d) d = w * d * w.adjoint();
                for (auto& d : j.dd) d = w * d * w.adjoint();
                return j;
            });
    const ComplexVector z = ComplexVector::Constant(2, cplx(0.3, 0.1));
    const BiForm a = curvature_biform(chern_curvature(q, z));
    const BiForm b = curvature_biform(chern_curvature(qw, z));
    for (int k = 1; k <= 2; ++k) CHECK(rank_k_min({a, k}).status == rank_k_min({b, k}).status);
}

TEST_CASE("Griffiths test: log h(s,s) is plurisubharmonic for O(-1)") {
    const MetricField m = o_minus1_metric(3);
    std::mt19937_64 rng(26);
    for (int trial = 0; trial < 10; ++trial) {
        const ComplexVector c = random_vector(rng, 6);
        auto s = [&](const ComplexVector& z) {
            return c(0) + c(1) * z(0) + c(2) * z(1) + c(3) * z(0) * z(1) + c(4) * z(0) * z(0) +
                   c(5) * z(1) * z(1) * z(1);
        };
        const ComplexVector z = 0.5 * random_vector(rng, 2);
        if (std::abs(s(z)) < 1e-2) continue;
        const HermitianMatrix hess = complex_hessian(
            [&](const ComplexVector& p) { return std::log(std::norm(s(p)) * m(p)(0, 0).real()); }, z);
        CHECK(min_eigenvalue(hess) > -1e-6);
    }
}

TEST_CASE("second derivative of h(f_i, f_j) for sections with vanishing covariant derivative") {
    std::mt19937_64 rng(27);
    for (int trial = 0; trial < 4; ++trial) {
        const int n = 2, r = 2 + trial % 2, k = 2;
        std::vector<ComplexMatrix> bm(2 * n + 1);
        for (auto& b : bm) b = random_matrix(rng, r, r) / std::sqrt(double(r));
        const MetricField m(n, r, [bm, n, r](const ComplexVector& z) {
            ComplexMatrix a = bm[0];
            for (int i = 0; i < n; ++i) a += z(i) * bm[1 + i] + std::conj(z(i)) * bm[1 + n + i];
            return ComplexMatrix(a * a.adjoint() + 0.5 * ComplexMatrix::Identity(r, r));
        });
        const ComplexVector x = 0.3 * random_vector(rng, n) / std::sqrt(double(n));
        const Jet jx = m.jet(x);
        const ComplexMatrix hinv = jx.f.inverse();

        // f_a(z) = v_a + sum_i (z-x)_i c_{a,i} + quadratic terms
        std::vector<ComplexVector> v(k);
        std::vector<std::vector<ComplexVector>> c(k, std::vector<ComplexVector>(n));
        std::vector<ComplexMatrix> quad(k);
        for (int a = 0; a < k; ++a) {
            v[a] = random_vector(rng, r);
            for (int i = 0; i < n; ++i)
                c[a][i] = -(v[a].transpose() * jx.d[i] * hinv).transpose();
            quad[a] = random_matrix(rng, r, n * n);
        }
        auto section = [&](int a, const ComplexVector& z) {
            const ComplexVector dz = z - x;
            ComplexVector out = v[a];
            for (int i = 0; i < n; ++i) {
                out += dz(i) * c[a][i];
                for (int j = 0; j < n; ++j) out += dz(i) * dz(j) * quad[a].col(i * n + j);
            }
            return out;
        };
        double lhs_re = 0, lhs_im = 0;
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) {
                const Jet jj = fd_jet(
                    [&](const ComplexVector& z) {
                        return ComplexMatrix::Constant(
                            1, 1, (section(i, z).transpose() * m(z) * section(j, z).conjugate())(0, 0));
                    },
                    x);
                lhs_re += jj.dd[i * n + j](0, 0).real();
                lhs_im += jj.dd[i * n + j](0, 0).imag();
            }
        ComplexMatrix t(n, r);
        for (int i = 0; i < k; ++i) t.row(i) = v[i].transpose();
        const BiForm b = curvature_biform(chern_curvature(m, x));
        const double rhs = -b.value(TensorPoint(t));
        CHECK(std::abs(lhs_re - rhs) < 1e-4 * std::max(1.0, std::abs(rhs)));
        CHECK(std::abs(lhs_im) < 1e-4);
    }
}

TEST_CASE("q-subsets are lexicographic") {
    const auto s = q_subsets(4, 2);
    REQUIRE(s.size() == 6);
    CHECK(s[0] == std::vector<int>{0, 1});
    CHECK(s[1] == std::vector<int>{0, 2});
    CHECK(s[5] == std::vector<int>{2, 3});
}

TEST_CASE("Demailly operator: identity and q = 1") {
    const CurvaturePoint c = CurvaturePoint::from_biform(BiForm::identity(2, 2), HermitianMatrix::identity(2));
    const DemaillyResult d = demailly_check(c, HermitianMatrix::identity(2), 1, 2);
    CHECK((d.op.matrix() - ComplexMatrix::Identity(4, 4)).norm() < 1e-14);
    CHECK(d.positive);
    CHECK(d.theorem_applies);

    std::mt19937_64 rng(28);
    const ComplexMatrix q = random_hermitian(rng, 6);
    const CurvaturePoint c2 = CurvaturePoint::from_biform(BiForm(3, 2, HermitianMatrix(q)),
                                                          HermitianMatrix::identity(2));
    const DemaillyResult d2 = demailly_check(c2, HermitianMatrix::identity(3), 1, 1);
    CHECK((d2.op.matrix() - q.transpose()).norm() < 1e-12);
    CHECK_THROWS_AS(demailly_check(c2, HermitianMatrix(-ComplexMatrix::Identity(3, 3)), 1, 1), InputError);
    CHECK_THROWS_AS(demailly_check(c2, HermitianMatrix::identity(3), 4, 1), InputError);
}

TEST_CASE("Demailly operator on a line bundle: eigenvalues are q-sums") {
    // curvature eigenvalues (2, -1) with respect to g
    std::mt19937_64 rng(29);
    const ComplexMatrix g = random_pd(rng, 2);
    Eigen::LLT<ComplexMatrix> llt(g);
    const ComplexMatrix l = llt.matrixL();
    const ComplexMatrix u = random_unitary(rng, 2);
    RealVector lam(2);
    lam << 2.0, -1.0;
    // Theta = L U diag U^† L^† with g = L L^† has g-relative spectrum (2, -1)
    const ComplexMatrix theta = l * u * lam.cast<cplx>().asDiagonal() * u.adjoint() * l.adjoint();
    const double hval = 1.7;
    const CurvaturePoint c = CurvaturePoint::from_biform(
        BiForm(2, 1, HermitianMatrix(hval * theta)), HermitianMatrix(ComplexMatrix::Constant(1, 1, hval)));

    const DemaillyResult q1 = demailly_check(c, HermitianMatrix(g), 1, 1);
    const RealVector e1 = eigh(q1.op).values;
    CHECK(e1(0) == doctest::Approx(-1.0));
    CHECK(e1(1) == doctest::Approx(2.0));
    CHECK_FALSE(q1.positive);

    const DemaillyResult q2 = demailly_check(c, HermitianMatrix(g), 2, 1);
    CHECK(q2.op.dim() == 1);
    CHECK(q2.min_eigenvalue == doctest::Approx(1.0));
    CHECK(q2.positive);
    CHECK_FALSE(q2.theorem_applies);  // Omega itself is indefinite
}

TEST_CASE("Demailly operator on general q agrees with sums for split forms") {
    // Omega = diag over chart directions (x) diag over the frame: eigenvalues a_i + ... per (J, mu)
    const int n = 3, r = 2;
    RealVector a(n), b(r);
    a << 0.5, -0.2, 1.1;
    b << 1.0, 3.0;
    ComplexMatrix q = ComplexMatrix::Zero(n * r, n * r);
    for (int i = 0; i < n; ++i)
        for (int mu = 0; mu < r; ++mu) q(i * r + mu, i * r + mu) = a(i) * b(mu);
    const CurvaturePoint c = CurvaturePoint::from_biform(BiForm(n, r, HermitianMatrix(q)),
                                                         HermitianMatrix::identity(r));
    for (int qd = 1; qd <= n; ++qd) {
        const DemaillyResult d = demailly_check(c, HermitianMatrix::identity(n), qd, 1);
        std::vector<double> expect;
        for (const auto& J : q_subsets(n, qd))
            for (int mu = 0; mu < r; ++mu) {
                double s = 0;
                for (int j : J) s += a(j) * b(mu);
                expect.push_back(s);
            }
        std::sort(expect.begin(), expect.end());
        const RealVector got = eigh(d.op).values;
        for (std::size_t i = 0; i < expect.size(); ++i) CHECK(got(i) == doctest::Approx(expect[i]));
    }
}

TEST_CASE("Demailly positivity for sampled Nakano-positive forms") {
    std::mt19937_64 rng(30);
    for (int trial = 0; trial < 20; ++trial) {
        const ComplexMatrix q = random_pd(rng, 4, 0.05);
        const ComplexMatrix h = random_pd(rng, 2);
        // from_biform expects the form in the holomorphic frame of h
        const CurvaturePoint c = CurvaturePoint::from_biform(BiForm(2, 2, HermitianMatrix(q)), HermitianMatrix(h));
        const DemaillyResult d = demailly_check(c, HermitianMatrix(random_pd(rng, 2)), 1, 2);
        CHECK(d.theorem_applies);
        CHECK(d.positive);
        CHECK(hermitian_residual(d.op.matrix()) < 1e-12);
    }
}

TEST_CASE("harmonic-sum probe runs") {
    const MetricField a = twisted_quotient(3, 2);
    const MetricField b = tensor_line(twisted_quotient(3, 2), fubini_study_weight(3));
    const std::vector<ComplexVector> pts = {ComplexVector::Zero(2), ComplexVector::Constant(2, 0.3)};
    const std::vector<Verdict> v = harmonic_sum_probe(a, b, pts, 2);
    CHECK(v.size() == 2);
}
