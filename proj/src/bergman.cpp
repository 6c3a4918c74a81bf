#include "curvlab/bergman.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "curvlab/errors.hpp"
#include "curvlab/positivity.hpp"

namespace curvlab {

namespace {

constexpr double kPi = std::numbers::pi;

// Condition number of D^{-1/2} G D^{-1/2}, D = diag(G).
double equilibrated_condition(const ComplexMatrix& g, ComplexMatrix* scaled, RealVector* dscale) {
    const int n = static_cast<int>(g.rows());
    RealVector d(n);
    for (int i = 0; i < n; ++i) {
        const double v = g(i, i).real();
        if (!(v > 0)) return std::numeric_limits<double>::infinity();
        d(i) = 1 / std::sqrt(v);
    }
    ComplexMatrix s = d.asDiagonal() * g * d.asDiagonal();
    const RealVector ev = eigh(HermitianMatrix(s)).values;
    if (scaled) *scaled = s;
    if (dscale) *dscale = d;
    if (!(ev(0) > 0)) return std::numeric_limits<double>::infinity();
    return ev(n - 1) / ev(0);
}

}  // namespace

WeightFamily WeightFamily::constant(int r, std::function<ComplexMatrix(cplx)> h0) {
    WeightFamily w;
    w.r = r;
    w.m = 1;
    w.h = [h0 = std::move(h0)](cplx z, const ComplexVector&) { return h0(z); };
    return w;
}

DomainGrid grid_for(const WeightFamily& w, const ComplexVector& t, int n_r, int n_theta) {
    return DomainGrid(n_r, n_theta, w.breaks(t));
}

HermitianMatrix gram(const WeightFamily& w, const ComplexVector& t, const BasisSpec& b, const DomainGrid& grid,
                     Exec exec) {
    if (b.r != w.r) throw InputError("gram: basis rank differs from the weight rank");
    if (b.d < 0) throw InputError("gram: degree must be non-negative");
    const auto& pts = grid.points();
    const auto& wts = grid.weights();
    const int nodes = static_cast<int>(pts.size());
    const int r = b.r, deg = b.d, dim = b.size();

    std::vector<ComplexMatrix> hs(nodes);
    std::vector<char> bad(nodes, 0);
    auto eval = [&](int k) {
        hs[k] = w(pts[k], t);
        Eigen::LLT<ComplexMatrix> llt(hs[k]);
        bad[k] = hs[k].rows() != r || llt.info() != Eigen::Success;
    };
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
        for (int k = 0; k < nodes; ++k) eval(k);
    } else {
        for (int k = 0; k < nodes; ++k) eval(k);
    }
    for (int k = 0; k < nodes; ++k)
        if (bad[k]) throw DegenerateMetricError("gram: weight is not positive definite at a quadrature node");

    // moments[k][a] = z_k^a
    std::vector<cplx> pw(static_cast<std::size_t>(nodes) * (deg + 1));
    for (int k = 0; k < nodes; ++k) {
        cplx p = 1;
        for (int a = 0; a <= deg; ++a) {
            pw[k * (deg + 1) + a] = p;
            p *= pts[k];
        }
    }

    ComplexMatrix g = ComplexMatrix::Zero(dim, dim);
    auto row = [&](int a) {
        for (int bb = a; bb <= deg; ++bb) {
            ComplexMatrix acc = ComplexMatrix::Zero(r, r);
            for (int k = 0; k < nodes; ++k)
                acc += (wts[k] * pw[k * (deg + 1) + a] * std::conj(pw[k * (deg + 1) + bb])) * hs[k];
            g.block(a * r, bb * r, r, r) = acc;
            if (bb != a) g.block(bb * r, a * r, r, r) = acc.adjoint();
        }
    };
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
        for (int a = 0; a <= deg; ++a) row(a);
    } else {
        for (int a = 0; a <= deg; ++a) row(a);
    }
    return HermitianMatrix(g);
}

ComplexMatrix point_evaluation(const BasisSpec& b, cplx z0) {
    ComplexMatrix a = ComplexMatrix::Zero(b.r, b.size());
    cplx p = 1;
    for (int deg = 0; deg <= b.d; ++deg) {
        for (int mu = 0; mu < b.r; ++mu) a(mu, b.index(deg, mu)) = p;
        p *= z0;
    }
    return a;
}

Extension minimal_extension(const HermitianMatrix& g, const ComplexMatrix& a, const ComplexVector& f0) {
    const int n = g.dim();
    if (a.cols() != n || a.rows() != f0.size()) throw InputError("minimal_extension: shape mismatch");
    if (a.rows() > n) throw InputError("minimal_extension: more constraints than unknowns");
    const RealVector sv = singular_values(a);
    if (sv.size() == 0 || sv(sv.size() - 1) <= 1e-12 * std::max(1.0, sv(0)))
        throw InputError("minimal_extension: constraints are rank deficient");

    // With y = conj(c): minimize y^dagger G y subject to conj(A) y = conj(f0).
    Eigen::LLT<ComplexMatrix> llt(g.matrix());
    if (llt.info() != Eigen::Success) throw DegenerateMetricError("minimal_extension: Gram matrix is not positive definite");
    const ComplexMatrix ab = a.conjugate();
    const ComplexMatrix ginv_at = llt.solve(ab.adjoint());
    const ComplexMatrix m = ab * ginv_at;
    const ComplexVector lam = m.fullPivLu().solve(f0.conjugate());
    const ComplexVector y = ginv_at * lam;

    Extension e;
    e.coeffs = y.conjugate();
    e.norm2 = (y.adjoint() * g.matrix() * y)(0, 0).real();
    return e;
}

OtBound ot_bound_check(const WeightFamily& w, const ComplexVector& f0, double delta, int d, const DomainGrid& grid,
                       int curvature_samples) {
    if (!(delta > 0)) throw InputError("ot_bound_check: delta must be positive");
    if (f0.size() != w.r) throw InputError("ot_bound_check: f0 has the wrong size");
    const ComplexVector t0 = ComplexVector::Zero(w.m);

    const MetricField field(1, w.r, [&](const ComplexVector& z) { return w(z(0), t0); });
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0, 1);
    for (int s = 0; s < curvature_samples; ++s) {
        ComplexVector z(1);
        z(0) = s == 0 ? cplx(0) : std::polar(0.9 * std::sqrt(u(rng)), 2 * kPi * u(rng));
        const BiForm f = curvature_biform(chern_curvature(field, z));
        if (nakano_min(f) < -1e-6 * f.scale())
            throw ConfigError("ot_bound_check: weight curvature is not Nakano-nonnegative");
    }

    const BasisSpec b{d, w.r};
    const HermitianMatrix g = gram(w, t0, b, grid);
    const Extension e = minimal_extension(g, point_evaluation(b, 0), f0);
    const ComplexMatrix h0 = w(0, t0);
    const double hf = (f0.transpose() * h0 * f0.conjugate())(0, 0).real();

    OtBound o;
    o.lhs = e.norm2;
    o.rhs = kPi * hf;
    o.rhs_delta = kPi * (1 + delta) / delta * hf;
    o.slack = o.rhs - o.lhs;
    o.pass = o.lhs <= o.rhs * (1 + 2e-2);
    return o;
}

BiForm direct_image_curvature(const WeightFamily& w, const ComplexVector& t0, const BasisSpec& b,
                              const DomainGrid& grid, double step, double chart_radius) {
    if (w.m < 1 || w.m > 2) throw InputError("direct_image_curvature: base dimension must be 1 or 2");
    if (t0.size() != w.m) throw InputError("direct_image_curvature: t0 has the wrong size");
    const MatrixFn gfn = [&](const ComplexVector& t) {
        const DomainGrid gr = w.kinks ? DomainGrid(grid.n_r(), grid.n_theta(), w.breaks(t)) : grid;
        return gram(w, t, b, gr).matrix();
    };
    const MetricField field(w.m, b.size(), gfn, step, chart_radius);
    return curvature_biform(chern_curvature(field, t0));
}

HypothesisCheck check_direct_image_hypotheses(const WeightFamily& w, int k, int samples, unsigned long long seed,
                                              double tol) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0, 1);
    HypothesisCheck hc;
    hc.fiber_min = hc.total_min = std::numeric_limits<double>::infinity();
    for (int s = 0; s < samples; ++s) {
        const cplx z = std::polar(0.9 * std::sqrt(u(rng)), 2 * kPi * u(rng));
        ComplexVector t(w.m);
        for (int i = 0; i < w.m; ++i) t(i) = std::polar(0.5 * std::sqrt(u(rng)), 2 * kPi * u(rng));

        const MetricField fiber(1, w.r, [&](const ComplexVector& x) { return w(x(0), t); });
        ComplexVector zz(1);
        zz(0) = z;
        const BiForm ff = curvature_biform(chern_curvature(fiber, zz));
        hc.fiber_min = std::min(hc.fiber_min, nakano_min(ff) / ff.scale());

        const MetricField total(1 + w.m, w.r, [&](const ComplexVector& x) { return w(x(0), x.tail(w.m)); });
        ComplexVector zt(1 + w.m);
        zt << z, t;
        const BiForm tf = curvature_biform(chern_curvature(total, zt));
        hc.total_min = std::min(hc.total_min, rank_k_min({tf, k}).min_value / tf.scale());
    }
    hc.fiber_ok = hc.fiber_min >= -tol;
    hc.total_ok = hc.total_min >= -tol;
    return hc;
}

WeightFamily shifted_gaussian_family() {
    WeightFamily w;
    w.r = 1;
    w.m = 1;
    w.h = [](cplx z, const ComplexVector& t) {
        ComplexMatrix m(1, 1);
        m(0, 0) = std::exp(-std::norm(z - t(0)));
        return m;
    };
    return w;
}

WeightFamily coupled_gaussian_family(double c) {
    WeightFamily w;
    w.r = 2;
    w.m = 1;
    w.h = [c](cplx z, const ComplexVector& t) {
        const double a = c * (t(0) * std::conj(z)).real();
        const double e = std::exp(-std::norm(z) - std::norm(t(0)));
        ComplexMatrix m(2, 2);
        m << e * std::cosh(a), -e * std::sinh(a), -e * std::sinh(a), e * std::cosh(a);
        return m;
    };
    return w;
}

WeightFamily degeneration_family(double p, int r, std::function<ComplexMatrix(cplx)> h) {
    if (!(p > 0)) throw InputError("degeneration_family: p must be positive");
    WeightFamily w;
    w.r = r;
    w.m = 1;
    w.h = [p, h](cplx z, const ComplexVector& t) {
        const double tr = t(0).real();
        const double psi = std::max(std::log(std::norm(z)) - tr, 0.0);
        return ComplexMatrix(std::exp(-tr - p * psi) * h(z));
    };
    w.kinks = [](const ComplexVector& t) {
        const double s = std::exp(0.5 * t(0).real());
        return s < 1 ? graded_breaks(s) : std::vector<double>{};
    };
    return w;
}

DualNormTrack dual_norm_track(const WeightFamily& w, const ComplexMatrix& h0, const ComplexVector& sigma,
                              const std::vector<double>& ts, int d, int n_r, int n_theta, Exec exec) {
    if (sigma.size() != w.r || h0.rows() != w.r || h0.cols() != w.r)
        throw InputError("dual_norm_track: sigma or h0 has the wrong size");
    if (ts.empty()) throw InputError("dual_norm_track: empty t grid");
    const BasisSpec b{d, w.r};
    const int nt = static_cast<int>(ts.size());
    ComplexVector l = ComplexVector::Zero(b.size());
    l.head(w.r) = h0 * sigma.conjugate();

    std::vector<double> out(nt);
    std::vector<char> bad(nt, 0);
    auto one = [&](int i) {
        ComplexVector t(w.m);
        t.setZero();
        t(0) = ts[i];
        const HermitianMatrix g = gram(w, t, b, grid_for(w, t, n_r, n_theta));
        ComplexMatrix s;
        RealVector dsc;
        if (equilibrated_condition(g.matrix(), &s, &dsc) > 1e12) {
            bad[i] = 1;
            return;
        }
        const ComplexVector ls = dsc.asDiagonal() * l;
        const ComplexVector x = s.llt().solve(ls);
        out[i] = std::log((ls.adjoint() * x)(0, 0).real());
    };
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
        for (int i = 0; i < nt; ++i) one(i);
    } else {
        for (int i = 0; i < nt; ++i) one(i);
    }
    for (int i = 0; i < nt; ++i)
        if (bad[i]) throw DegenerateMetricError("dual_norm_track: Gram matrix is ill-conditioned");

    DualNormTrack tr;
    tr.t = ts;
    tr.log_norm2 = out;
    tr.min_first_diff = tr.min_second_diff = std::numeric_limits<double>::infinity();
    for (int i = 0; i + 1 < nt; ++i) tr.min_first_diff = std::min(tr.min_first_diff, out[i + 1] - out[i]);
    for (int i = 0; i + 2 < nt; ++i)
        tr.min_second_diff = std::min(tr.min_second_diff, out[i + 2] - 2 * out[i + 1] + out[i]);
    if (nt < 2) tr.min_first_diff = 0;
    if (nt < 3) tr.min_second_diff = 0;
    return tr;
}

double coarea_limit(const std::function<double(cplx)>& f, double t) {
    const double s = std::exp(0.5 * t);
    auto integrate = [&](int n_r, int n_theta) {
        const GaussRule g = gauss_legendre(n_r, 0, s);
        const double dth = 2 * kPi / n_theta;
        double acc = 0;
        for (int i = 0; i < n_r; ++i) {
            double ring = 0;
            for (int k = 0; k < n_theta; ++k) ring += f(std::polar(g.nodes[i], k * dth));
            acc += g.weights[i] * g.nodes[i] * ring * dth;
        }
        return std::exp(-t) * acc;
    };
    int n_r = 8, n_theta = 16;
    double prev = integrate(n_r, n_theta);
    while (n_r < 512) {
        n_r *= 2;
        n_theta *= 2;
        const double cur = integrate(n_r, n_theta);
        if (std::abs(cur - prev) <= 1e-13 * std::max(1.0, std::abs(cur))) return cur;
        prev = cur;
    }
    return prev;
}

LiminfBound liminf_bound_check(const std::vector<double>& s, const std::vector<double>& nu, double p,
                               const std::vector<double>& t_eval) {
    if (!(p > 1)) throw InputError("liminf_bound_check: p must exceed 1");
    if (s.size() != nu.size() || s.size() < 2) throw InputError("liminf_bound_check: need matching samples");
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        if (!(s[i + 1] > s[i])) throw InputError("liminf_bound_check: s grid must increase");
        if (nu[i + 1] < nu[i]) throw InputError("liminf_bound_check: nu must be non-decreasing");
    }
    if (t_eval.empty()) throw InputError("liminf_bound_check: no evaluation points");

    LiminfBound lb;
    lb.bound = 2 / (p - 1);
    lb.t = t_eval;
    for (double t : t_eval) {
        if (t < s.front() || t > s.back()) throw InputError("liminf_bound_check: t outside the sample range");
        // first node at or above t; the partial cell [t, s_j] uses linear nu
        const auto it = std::lower_bound(s.begin(), s.end(), t);
        std::size_t j = static_cast<std::size_t>(it - s.begin());
        double acc = 0;
        auto kern = [&](double x) { return std::exp(-p * (x - t)); };
        if (j > 0 && s[j] > t) {
            const double frac = (t - s[j - 1]) / (s[j] - s[j - 1]);
            const double nut = nu[j - 1] + frac * (nu[j] - nu[j - 1]);
            acc += 0.5 * (kern(t) + kern(s[j])) * (nu[j] - nut);
        }
        for (std::size_t i = j; i + 1 < s.size(); ++i) acc += 0.5 * (kern(s[i]) + kern(s[i + 1])) * (nu[i + 1] - nu[i]);
        lb.values.push_back(std::exp(-t) * acc);
    }
    lb.min_value = *std::min_element(lb.values.begin(), lb.values.end());
    const auto tail = std::min_element(t_eval.begin(), t_eval.end()) - t_eval.begin();
    lb.tail_value = lb.values[tail];
    lb.pass = lb.min_value <= lb.bound + 1e-9;
    return lb;
}

std::vector<ComplexVector> homogeneous_coefficients(const std::vector<CircleSamples>& circles, int jmax) {
    if (jmax < 0) throw InputError("homogeneous_coefficients: jmax must be non-negative");
    if (circles.empty()) throw InputError("homogeneous_coefficients: no samples");
    const int r = static_cast<int>(circles.front().values.empty() ? 0 : circles.front().values.front().size());

    std::vector<std::vector<ComplexVector>> per;
    double scale = 0;
    for (const auto& c : circles) {
        const int m = static_cast<int>(c.values.size());
        if (m < 2 * jmax + 1) throw InputError("homogeneous_coefficients: need at least 2 jmax + 1 angles");
        if (!(c.radius > 0)) throw InputError("homogeneous_coefficients: radius must be positive");
        std::vector<ComplexVector> modes(m, ComplexVector::Zero(r));
        for (int j = 0; j < m; ++j) {
            for (int k = 0; k < m; ++k) {
                if (c.values[k].size() != r) throw InputError("homogeneous_coefficients: inconsistent fiber rank");
                modes[j] += c.values[k] * std::polar(1.0, -2 * kPi * double(j) * k / m);
            }
            modes[j] /= double(m);
            scale = std::max(scale, modes[j].norm());
        }
        for (int j = jmax + 1; j < m; ++j)
            if (modes[j].norm() > 1e-9 * std::max(scale, 1e-300))
                throw InputError("homogeneous_coefficients: samples carry modes beyond jmax");
        std::vector<ComplexVector> a(jmax + 1);
        for (int j = 0; j <= jmax; ++j) a[j] = modes[j] / std::pow(c.radius, j);
        per.push_back(std::move(a));
    }

    std::vector<ComplexVector> avg(jmax + 1, ComplexVector::Zero(r));
    double amax = 0;
    for (const auto& a : per)
        for (int j = 0; j <= jmax; ++j) {
            avg[j] += a[j] / double(per.size());
            amax = std::max(amax, a[j].norm());
        }
    for (const auto& a : per)
        for (int j = 0; j <= jmax; ++j)
            if ((a[j] - avg[j]).norm() > 1e-8 * std::max(amax, 1e-300))
                throw InputError("homogeneous_coefficients: circles disagree (aliased data)");
    return avg;
}

NormDecomposition weighted_norm_decomposition(const std::vector<ComplexVector>& a, double delta) {
    if (!(delta > 0)) throw InputError("weighted_norm_decomposition: delta must be positive");
    if (a.empty()) throw InputError("weighted_norm_decomposition: no coefficients");
    const int jmax = static_cast<int>(a.size()) - 1;

    NormDecomposition nd;
    for (int i = 0; i <= jmax; ++i) nd.closed_form += a[i].squaredNorm() / (delta + i + 1);

    // u = |w|^2, measure dA / pi = du dtheta / (2 pi); u^delta is graded toward 0
    std::vector<double> edges{0.0};
    for (double b : graded_breaks(1e-16)) edges.push_back(b);
    edges.push_back(1.0);
    const int n_theta = 2 * jmax + 2;
    const int n_u = jmax + 12;
    double acc = 0;
    for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
        const GaussRule g = gauss_legendre(n_u, edges[e], edges[e + 1]);
        for (int i = 0; i < n_u; ++i) {
            const double rho = std::sqrt(g.nodes[i]);
            double ring = 0;
            for (int k = 0; k < n_theta; ++k) {
                const cplx w = std::polar(rho, 2 * kPi * k / n_theta);
                ComplexVector phi = ComplexVector::Zero(a[0].size());
                cplx p = 1;
                for (int j = 0; j <= jmax; ++j) {
                    phi += p * a[j];
                    p *= w;
                }
                ring += phi.squaredNorm();
            }
            acc += g.weights[i] * std::pow(g.nodes[i], delta) * ring / n_theta;
        }
    }
    nd.quadrature = acc;
    nd.pass = std::abs(nd.quadrature - nd.closed_form) <= 1e-6 * std::max(std::abs(nd.closed_form), 1e-300);
    return nd;
}

}  // namespace curvlab
