#include "curvlab/bundle_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "curvlab/errors.hpp"

namespace curvlab {

namespace {

// Real direction a in C^n: a = 2i is Re z_i, a = 2i+1 is Im z_i.
ComplexVector real_direction(int n, int a) {
    ComplexVector e = ComplexVector::Zero(n);
    e(a / 2) = (a % 2 == 0) ? cplx(1, 0) : cplx(0, 1);
    return e;
}

}  // namespace

Jet fd_jet(const MatrixFn& f, const ComplexVector& z, double step, double chart_radius) {
    const int n = static_cast<int>(z.size());
    if (!(step > 0)) throw InputError("fd_jet: step must be positive");
    if (z.norm() + 2.0 * step > chart_radius)
        throw InputError("fd_jet: finite-difference stencil leaves the chart");

    const ComplexMatrix f0 = f(z);
    const int m = 2 * n;

    auto first = [&](int a, double eta) {
        const ComplexVector e = real_direction(n, a);
        return ComplexMatrix((f(z + eta * e) - f(z - eta * e)) / (2.0 * eta));
    };
    auto second = [&](int a, int b, double eta) {
        const ComplexVector ea = real_direction(n, a);
        if (a == b)
            return ComplexMatrix((f(z + eta * ea) - 2.0 * f0 + f(z - eta * ea)) / (eta * eta));
        const ComplexVector eb = real_direction(n, b);
        return ComplexMatrix((f(z + eta * (ea + eb)) - f(z + eta * (ea - eb)) -
                              f(z - eta * (ea - eb)) + f(z - eta * (ea + eb))) /
                             (4.0 * eta * eta));
    };
    auto rich = [](const ComplexMatrix& coarse, const ComplexMatrix& fine) {
        return ComplexMatrix((4.0 * fine - coarse) / 3.0);
    };

    std::vector<ComplexMatrix> d1(m);
    for (int a = 0; a < m; ++a) d1[a] = rich(first(a, step), first(a, step / 2));
    std::vector<ComplexMatrix> d2(m * m);
    for (int a = 0; a < m; ++a)
        for (int b = a; b < m; ++b) {
            d2[a * m + b] = rich(second(a, b, step), second(a, b, step / 2));
            d2[b * m + a] = d2[a * m + b];
        }

    Jet out{f0, std::vector<ComplexMatrix>(n), std::vector<ComplexMatrix>(n * n)};
    const cplx I(0, 1);
    for (int i = 0; i < n; ++i) out.d[i] = 0.5 * (d1[2 * i] - I * d1[2 * i + 1]);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const int xi = 2 * i, yi = 2 * i + 1, xj = 2 * j, yj = 2 * j + 1;
            out.dd[i * n + j] = 0.25 * (d2[xi * m + xj] + d2[yi * m + yj] +
                                        I * (d2[xi * m + yj] - d2[yi * m + xj]));
        }
    return out;
}

HermitianMatrix complex_hessian(const ScalarFn& f, const ComplexVector& z, double step,
                                double chart_radius) {
    const int n = static_cast<int>(z.size());
    const Jet j = fd_jet(
        [&](const ComplexVector& p) { return ComplexMatrix::Constant(1, 1, f(p)); }, z, step,
        chart_radius);
    ComplexMatrix h(n, n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) h(a, b) = j.dd[a * n + b](0, 0);
    return HermitianMatrix(h);
}

LineWeight::Derivs LineWeight::derivs(const ComplexVector& z, double step) const {
    if (z.size() != n) throw InputError("LineWeight: point has wrong dimension");
    if (closed_form) return closed_form(z);
    const Jet j = fd_jet(
        [&](const ComplexVector& p) { return ComplexMatrix::Constant(1, 1, phi(p)); }, z, step);
    Derivs out{j.f(0, 0).real(), ComplexVector(n), ComplexMatrix(n, n)};
    for (int a = 0; a < n; ++a) {
        out.d(a) = j.d[a](0, 0);
        for (int b = 0; b < n; ++b) out.dd(a, b) = j.dd[a * n + b](0, 0);
    }
    return out;
}

MetricField::MetricField(int n, int r, MatrixFn evaluator, double fd_step, double chart_radius)
    : n_(n), r_(r), eval_(std::move(evaluator)), step_(fd_step), radius_(chart_radius) {
    if (n < 1 || r < 1) throw InputError("MetricField: n and r must be positive");
    if (!(fd_step > 0)) throw InputError("MetricField: step must be positive");
}

MetricField MetricField::with_closed_form(std::function<Jet(const ComplexVector&)> jet) const {
    MetricField m = *this;
    m.jet_ = std::move(jet);
    return m;
}

ComplexMatrix MetricField::operator()(const ComplexVector& z) const {
    if (z.size() != n_) throw InputError("MetricField: point has wrong dimension");
    ComplexMatrix h = eval_(z);
    if (h.rows() != r_ || h.cols() != r_) throw InputError("MetricField: evaluator returned wrong size");
    for (Eigen::Index i = 0; i < h.size(); ++i)
        if (!std::isfinite(h(i).real()) || !std::isfinite(h(i).imag()))
            throw DegenerateMetricError("MetricField: non-finite metric value");
    h = 0.5 * (h + h.adjoint());
    Eigen::LLT<ComplexMatrix> llt(h);
    if (llt.info() != Eigen::Success)
        throw DegenerateMetricError("MetricField: metric is not positive definite");
    return h;
}

Jet MetricField::jet(const ComplexVector& z) const {
    if (z.size() != n_) throw InputError("MetricField: point has wrong dimension");
    if (z.norm() > radius_) throw InputError("MetricField: point outside the chart");
    if (jet_) {
        Jet j = jet_(z);
        (*this)(z);  // PD check
        return j;
    }
    return fd_jet([this](const ComplexVector& p) { return (*this)(p); }, z, step_, radius_);
}

BiForm::BiForm(int n_, int r_, HermitianMatrix m) : n(n_), r(r_), matrix(std::move(m)) {
    if (matrix.dim() != n * r) throw InputError("BiForm: matrix dimension is not n*r");
}

BiForm BiForm::identity(int n, int r) { return BiForm(n, r, HermitianMatrix::identity(n * r)); }

namespace {

// R_ij = -d_i dbar_j H + d_i H H^{-1} dbar_j H, with R_ij[mu][nu] = h(Theta_ij e_mu, e_nu).
std::vector<ComplexMatrix> curvature_matrices(const Jet& j, int n) {
    const Eigen::LLT<ComplexMatrix> llt(j.f);
    std::vector<ComplexMatrix> out(n * n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            out[a * n + b] = -j.dd[a * n + b] + j.d[a] * llt.solve(ComplexMatrix(j.d[b].adjoint()));
    return out;
}

ComplexMatrix assemble(const std::vector<ComplexMatrix>& rmats, int n, int r) {
    ComplexMatrix q(n * r, n * r);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) q.block(i * r, j * r, r, r) = rmats[i * n + j];
    return q;
}

std::vector<ComplexMatrix> biform_matrices(const CurvaturePoint& c) {
    const ComplexMatrix& h = c.h.matrix();
    std::vector<ComplexMatrix> out(c.table.size());
    for (std::size_t k = 0; k < c.table.size(); ++k) out[k] = c.table[k].transpose() * h;
    return out;
}

}  // namespace

CurvaturePoint chern_curvature(const MetricField& m, const ComplexVector& z) {
    const Jet j = m.jet(z);
    const int n = m.n();
    const std::vector<ComplexMatrix> rm = curvature_matrices(j, n);
    const ComplexMatrix hinv = j.f.inverse();
    CurvaturePoint c{z, HermitianMatrix(j.f), n, std::vector<ComplexMatrix>(n * n)};
    for (int k = 0; k < n * n; ++k) c.table[k] = (rm[k] * hinv).transpose();
    return c;
}

CurvaturePoint CurvaturePoint::from_biform(const BiForm& form, const HermitianMatrix& h) {
    if (h.dim() != form.r) throw InputError("from_biform: metric rank mismatch");
    const int n = form.n, r = form.r;
    const ComplexMatrix hinv = h.matrix().inverse();
    CurvaturePoint c{ComplexVector::Zero(n), h, n, std::vector<ComplexMatrix>(n * n)};
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            c.table[i * n + j] =
                (ComplexMatrix(form.matrix.matrix().block(i * r, j * r, r, r)) * hinv).transpose();
    return c;
}

BiForm curvature_biform(const CurvaturePoint& c) {
    const int r = c.r();
    return BiForm(c.n, r, HermitianMatrix(assemble(biform_matrices(c), c.n, r)));
}

double biform_hermitian_residual(const CurvaturePoint& c) {
    return hermitian_residual(assemble(biform_matrices(c), c.n, c.r()));
}

ComplexVector riesz(const ComplexMatrix& h, const ComplexVector& v) { return h * v.conjugate(); }

MetricField dual_metric(const MetricField& m) {
    MatrixFn inner = m.evaluator();
    return MetricField(
        m.n(), m.r(),
        [inner](const ComplexVector& z) {
            const ComplexMatrix h = inner(z);
            const RealVector s = singular_values(h);
            if (s(s.size() - 1) <= 0 || s(0) / s(s.size() - 1) > 1e10)
                throw DegenerateMetricError("dual_metric: metric is near-singular");
            return ComplexMatrix(h.inverse().transpose());
        },
        m.step(), m.chart_radius());
}

// ---------------------------------------------------------------------------
// Closed-form constructors. rho = 1 + |z|^2 throughout.

namespace {

struct ScalarJet {
    cplx f;
    ComplexVector d;   // d_i f
    ComplexVector db;  // dbar_i f
    ComplexMatrix dd;  // d_i dbar_j f
};

// Jet of F*H by the product rule.
Jet scale_jet(const ScalarJet& s, const Jet& h) {
    const int n = static_cast<int>(s.d.size());
    Jet out{s.f * h.f, std::vector<ComplexMatrix>(n), std::vector<ComplexMatrix>(n * n)};
    for (int i = 0; i < n; ++i) out.d[i] = s.d(i) * h.f + s.f * h.d[i];
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const ComplexMatrix dbar_j = h.d[j].adjoint();
            out.dd[i * n + j] = s.dd(i, j) * h.f + s.d(i) * dbar_j + s.db(j) * h.d[i] +
                                s.f * h.dd[i * n + j];
        }
    return out;
}

// e^{-phi} from the derivatives of phi.
ScalarJet exp_neg(const LineWeight::Derivs& p) {
    const double f = std::exp(-p.phi);
    const int n = static_cast<int>(p.d.size());
    ScalarJet s{f, -f * p.d, -f * p.d.conjugate(), ComplexMatrix(n, n)};
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) s.dd(i, j) = f * (p.d(i) * std::conj(p.d(j)) - p.dd(i, j));
    return s;
}

ScalarJet rho_power(const ComplexVector& z, int k) {
    // F = rho^{-k}
    const int n = static_cast<int>(z.size());
    const double rho = 1.0 + z.squaredNorm();
    const double f = std::pow(rho, -k);
    const double f1 = -k * std::pow(rho, -k - 1);
    const double f2 = -k * (-k - 1) * std::pow(rho, -k - 2);
    ScalarJet s{f, f1 * z.conjugate(), f1 * z, ComplexMatrix(n, n)};
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            s.dd(i, j) = f2 * z(j) * std::conj(z(i)) + (i == j ? f1 : 0.0);
    return s;
}

Jet quotient_jet(const ComplexVector& z) {
    const int n = static_cast<int>(z.size());
    const double rho = 1.0 + z.squaredNorm();
    const ComplexVector zb = z.conjugate();
    auto delta = [](int a, int b) { return a == b ? 1.0 : 0.0; };

    Jet j{ComplexMatrix(n, n), std::vector<ComplexMatrix>(n, ComplexMatrix(n, n)),
          std::vector<ComplexMatrix>(n * n, ComplexMatrix(n, n))};
    for (int mu = 0; mu < n; ++mu)
        for (int nu = 0; nu < n; ++nu) j.f(mu, nu) = delta(mu, nu) - zb(mu) * z(nu) / rho;
    for (int i = 0; i < n; ++i)
        for (int mu = 0; mu < n; ++mu)
            for (int nu = 0; nu < n; ++nu)
                j.d[i](mu, nu) = -zb(mu) * (delta(i, nu) / rho - z(nu) * zb(i) / (rho * rho));
    const double r2 = rho * rho, r3 = r2 * rho;
    for (int i = 0; i < n; ++i)
        for (int jj = 0; jj < n; ++jj)
            for (int mu = 0; mu < n; ++mu)
                for (int nu = 0; nu < n; ++nu)
                    j.dd[i * n + jj](mu, nu) =
                        -delta(i, nu) * (delta(jj, mu) / rho - zb(mu) * z(jj) / r2) +
                        z(nu) * (delta(jj, mu) * zb(i) / r2 + zb(mu) * delta(i, jj) / r2 -
                                 2.0 * zb(mu) * zb(i) * z(jj) / r3);
    return j;
}

void require_projective(int r, const char* what) {
    if (r < 2) throw InputError(std::string(what) + ": r must be at least 2");
}

}  // namespace

LineWeight fubini_study_weight(int r) {
    require_projective(r, "fubini_study_weight");
    LineWeight w;
    w.n = r - 1;
    w.phi = [](const ComplexVector& z) { return std::log1p(z.squaredNorm()); };
    w.closed_form = [](const ComplexVector& z) {
        const int n = static_cast<int>(z.size());
        const double rho = 1.0 + z.squaredNorm();
        LineWeight::Derivs d{std::log(rho), z.conjugate() / rho, ComplexMatrix(n, n)};
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                d.dd(i, j) = (i == j ? 1.0 / rho : 0.0) - std::conj(z(i)) * z(j) / (rho * rho);
        return d;
    };
    return w;
}

MetricField o_minus1_metric(int r) {
    require_projective(r, "o_minus1_metric");
    MetricField m(r - 1, 1, [](const ComplexVector& z) {
        return ComplexMatrix::Constant(1, 1, 1.0 + z.squaredNorm());
    });
    return m.with_closed_form([](const ComplexVector& z) {
        const int n = static_cast<int>(z.size());
        Jet j{ComplexMatrix::Constant(1, 1, 1.0 + z.squaredNorm()), {}, {}};
        for (int i = 0; i < n; ++i) j.d.push_back(ComplexMatrix::Constant(1, 1, std::conj(z(i))));
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k) j.dd.push_back(ComplexMatrix::Constant(1, 1, i == k ? 1.0 : 0.0));
        return j;
    });
}

MetricField quotient_metric(int r) {
    require_projective(r, "quotient_metric");
    MetricField m(r - 1, r - 1, [](const ComplexVector& z) { return quotient_jet(z).f; });
    return m.with_closed_form(quotient_jet);
}

MetricField twisted_quotient(int r, int k) {
    require_projective(r, "twisted_quotient");
    auto jet = [k](const ComplexVector& z) { return scale_jet(rho_power(z, k), quotient_jet(z)); };
    MetricField m(r - 1, r - 1, [jet](const ComplexVector& z) { return jet(z).f; });
    return m.with_closed_form(jet);
}

MetricField tangent_pn_metric(int n) {
    if (n < 1) throw InputError("tangent_pn_metric: n must be positive");
    auto g = [](const ComplexVector& z) {
        const int d = static_cast<int>(z.size());
        const double rho = 1.0 + z.squaredNorm();
        ComplexMatrix h(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                h(i, j) = (i == j ? 1.0 / rho : 0.0) - std::conj(z(i)) * z(j) / (rho * rho);
        return h;
    };
    MetricField m(n, n, g);
    // T P^n = Q (x) O(1) with the same metric; reuse those derivatives.
    return m.with_closed_form(
        [](const ComplexVector& z) { return scale_jet(rho_power(z, 1), quotient_jet(z)); });
}

MetricField split_bundle(const std::vector<LineWeight>& phis) {
    if (phis.empty()) throw InputError("split_bundle: no summands");
    const int n = phis.front().n;
    for (const auto& p : phis)
        if (p.n != n) throw InputError("split_bundle: weights on different dimensions");
    const int r = static_cast<int>(phis.size());
    MetricField m(n, r, [phis, r](const ComplexVector& z) {
        ComplexMatrix h = ComplexMatrix::Zero(r, r);
        for (int i = 0; i < r; ++i) h(i, i) = std::exp(-phis[i].phi(z));
        return h;
    });
    const bool closed = std::all_of(phis.begin(), phis.end(),
                                    [](const LineWeight& p) { return bool(p.closed_form); });
    if (!closed) return m;
    return m.with_closed_form([phis, n, r](const ComplexVector& z) {
        Jet j{ComplexMatrix::Zero(r, r), std::vector<ComplexMatrix>(n, ComplexMatrix::Zero(r, r)),
              std::vector<ComplexMatrix>(n * n, ComplexMatrix::Zero(r, r))};
        for (int k = 0; k < r; ++k) {
            const ScalarJet s = exp_neg(phis[k].closed_form(z));
            j.f(k, k) = s.f;
            for (int a = 0; a < n; ++a) j.d[a](k, k) = s.d(a);
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b) j.dd[a * n + b](k, k) = s.dd(a, b);
        }
        return j;
    });
}

MetricField conformal_twist(const MetricField& m, const LineWeight& psi) {
    if (psi.n != m.n()) throw InputError("conformal_twist: weight lives on another dimension");
    MatrixFn inner = m.evaluator();
    MetricField out(m.n(), m.r(),
                    [inner, psi](const ComplexVector& z) {
                        return ComplexMatrix(std::exp(-psi.phi(z)) * inner(z));
                    },
                    m.step(), m.chart_radius());
    if (!m.has_closed_form() || !psi.closed_form) return out;
    return out.with_closed_form([m, psi](const ComplexVector& z) {
        return scale_jet(exp_neg(psi.closed_form(z)), m.jet(z));
    });
}

MetricField tensor_line(const MetricField& m, const LineWeight& phi) { return conformal_twist(m, phi); }

LineWeight quadratic_weight(const ComplexMatrix& omega) {
    const ComplexMatrix om = 0.5 * (omega + omega.adjoint());
    LineWeight w;
    w.n = static_cast<int>(om.rows());
    w.phi = [om](const ComplexVector& z) { return (z.transpose() * om * z.conjugate())(0, 0).real(); };
    w.closed_form = [om](const ComplexVector& z) {
        return LineWeight::Derivs{(z.transpose() * om * z.conjugate())(0, 0).real(),
                                  om * z.conjugate(), om};
    };
    return w;
}

HermitianMatrix projectivized_twist_curvature(const std::vector<LineWeight>& phis,
                                              const ComplexVector& z, const ComplexVector& w,
                                              double step) {
    const int r = static_cast<int>(phis.size());
    if (r < 2) throw InputError("projectivized_twist_curvature: need at least two weights");
    const int n = static_cast<int>(z.size());
    if (w.size() != r - 1) throw InputError("projectivized_twist_curvature: fiber chart has dimension r-1");
    for (const auto& p : phis)
        if (p.n != n) throw InputError("projectivized_twist_curvature: weight dimension mismatch");
    if (z.norm() + 2 * step > kFiberChartRadius || w.norm() + 2 * step > kFiberChartRadius)
        throw InputError("projectivized_twist_curvature: stencil leaves the chart");

    auto phihat = [&](const ComplexVector& p) {
        const ComplexVector zz = p.head(n);
        double pairing = 0, sum_phi = 0;
        for (int i = 0; i < r; ++i) {
            const double ph = phis[i].phi(zz);
            const double s2 = (i == 0) ? 1.0 : std::norm(p(n + i - 1));
            pairing += std::exp(ph) * s2;
            sum_phi += ph;
        }
        return (r + 1) * std::log(pairing) - sum_phi;
    };
    ComplexVector p(n + r - 1);
    p << z, w;
    return complex_hessian(phihat, p, step);
}

SplitCriterion split_twist_criterion(const std::vector<HermitianMatrix>& omegas, int samples,
                                     unsigned long long seed, double tol) {
    const int r = static_cast<int>(omegas.size());
    if (r < 2) throw InputError("split_twist_criterion: need r >= 2");
    const int n = omegas.front().dim();
    ComplexMatrix sum = ComplexMatrix::Zero(n, n);
    double scale = 1.0;
    for (const auto& o : omegas) {
        if (o.dim() != n) throw InputError("split_twist_criterion: forms of different sizes");
        sum += o.matrix();
        scale = std::max(scale, o.scale());
    }
    const ComplexMatrix avg = sum / double(r + 1);

    SplitCriterion out;
    out.min_value = std::numeric_limits<double>::infinity();
    auto consider = [&](const RealVector& lam, const ComplexVector& xi, double val) {
        if (val < out.min_value) {
            out.min_value = val;
            out.lambda = lam;
            out.xi = xi;
        }
    };

    // The criterion is linear in lambda, so the vertices carry the minimum.
    for (int i = 0; i < r; ++i) {
        const EighResult e = eigh(HermitianMatrix(omegas[i].matrix() - avg));
        consider(RealVector::Unit(r, i), e.vectors.col(0), e.values(0));
    }

    std::mt19937_64 rng(seed);
    std::exponential_distribution<double> ex(1.0);
    std::normal_distribution<double> g;
    for (int s = 0; s < samples; ++s) {
        RealVector lam(r);
        for (int i = 0; i < r; ++i) lam(i) = ex(rng);
        lam /= lam.sum();
        ComplexVector xi(n);
        for (int a = 0; a < n; ++a) xi(a) = cplx(g(rng), g(rng));
        xi.normalize();
        ComplexMatrix form = -avg;
        for (int i = 0; i < r; ++i) form += lam(i) * omegas[i].matrix();
        consider(lam, xi, (xi.adjoint() * form * xi)(0, 0).real());
    }
    out.semipositive = out.min_value >= -tol * scale;
    if (out.semipositive) {
        out.lambda = RealVector();
        out.xi = ComplexVector();
    }
    return out;
}

}  // namespace curvlab
