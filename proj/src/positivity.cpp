#include "curvlab/positivity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "curvlab/errors.hpp"

namespace curvlab {

std::string to_string(Status s) {
    switch (s) {
        case Status::positive: return "positive";
        case Status::nonnegative: return "nonnegative";
        case Status::indefinite: return "indefinite";
    }
    return "indefinite";
}

Status classify(double min_value, double scale, double tol) {
    if (min_value > tol * scale) return Status::positive;
    if (std::abs(min_value) <= tol * scale) return Status::nonnegative;
    return Status::indefinite;
}

double nakano_min(const BiForm& form) { return min_eigenvalue(form.matrix); }

namespace {

// Work in y = conj(vec T), so that value(T) = y^† Q y. With Y = A B^T:
//   for fixed B:  y = K_B a,  K_B[(i,mu),(i',alpha)] = delta_{ii'} B(mu,alpha)
//   for fixed A:  y = L_A b,  L_A[(i,mu),(mu',alpha)] = delta_{mu mu'} A(i,alpha)

ComplexMatrix orthonormal_columns(const ComplexMatrix& m) {
    Eigen::HouseholderQR<ComplexMatrix> qr(m);
    return qr.householderQ() * ComplexMatrix::Identity(m.rows(), m.cols());
}

ComplexMatrix upper_r(const ComplexMatrix& m) {
    Eigen::HouseholderQR<ComplexMatrix> qr(m);
    const ComplexMatrix full = qr.matrixQR().triangularView<Eigen::Upper>();
    return full.topRows(m.cols());
}

struct AltState {
    ComplexMatrix a, b;  // n x k, r x k
    double value;
    int iterations;
    bool converged;
};

struct Sub {
    double value;
    ComplexVector vec;
};

Sub smallest(const ComplexMatrix& m) {
    const EighResult e = eigh(HermitianMatrix(m));
    return {e.values(0), e.vectors.col(0)};
}

AltState alternate(const ComplexMatrix& q, int n, int r, int k, ComplexMatrix b, int max_iters,
                   double scale) {
    AltState s{ComplexMatrix::Zero(n, k), orthonormal_columns(b),
               std::numeric_limits<double>::infinity(), 0, false};
    const int dim = n * r;
    ComplexMatrix kb = ComplexMatrix::Zero(dim, n * k);
    ComplexMatrix la = ComplexMatrix::Zero(dim, r * k);
    for (int it = 1; it <= max_iters; ++it) {
        s.iterations = it;
        const double before = s.value;

        // A-step with B orthonormal.
        kb.setZero();
        for (int i = 0; i < n; ++i)
            for (int mu = 0; mu < r; ++mu)
                for (int al = 0; al < k; ++al) kb(i * r + mu, i * k + al) = s.b(mu, al);
        const Sub sa = smallest(kb.adjoint() * q * kb);
        for (int i = 0; i < n; ++i)
            for (int al = 0; al < k; ++al) s.a(i, al) = sa.vec(i * k + al);

        // Re-express Y = A B^T with orthonormal A.
        const ComplexMatrix ra = upper_r(s.a);
        s.a = orthonormal_columns(s.a);
        s.b = s.b * ra.transpose();

        // B-step with A orthonormal.
        la.setZero();
        for (int i = 0; i < n; ++i)
            for (int mu = 0; mu < r; ++mu)
                for (int al = 0; al < k; ++al) la(i * r + mu, mu * k + al) = s.a(i, al);
        const Sub sb = smallest(la.adjoint() * q * la);
        for (int mu = 0; mu < r; ++mu)
            for (int al = 0; al < k; ++al) s.b(mu, al) = sb.vec(mu * k + al);
        s.value = sb.value;

        const ComplexMatrix rb = upper_r(s.b);
        s.b = orthonormal_columns(s.b);
        s.a = s.a * rb.transpose();

        if (std::isfinite(before) && before - s.value <= 1e-14 * scale) {
            s.converged = true;
            break;
        }
    }
    return s;
}

TensorPoint witness_of(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix t = (a * b.transpose()).conjugate();
    const double nrm = t.norm();
    if (nrm > 0) t /= nrm;
    return TensorPoint(std::move(t));
}

ComplexMatrix random_start(unsigned long long seed, int restart, int r, int k) {
    std::seed_seq ss{static_cast<unsigned>(seed & 0xffffffffu), static_cast<unsigned>(seed >> 32),
                     static_cast<unsigned>(restart)};
    std::mt19937_64 rng(ss);
    std::normal_distribution<double> g;
    ComplexMatrix b(r, k);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < k; ++j) b(i, j) = cplx(g(rng), g(rng));
    return b;
}

Verdict finish(const PositivityQuery& q, const AltState& best, int k, bool clamped, bool any_converged) {
    Verdict v;
    v.witness = witness_of(best.a, best.b);
    v.min_value = q.form.value(v.witness);
    v.status = classify(v.min_value, q.form.scale(), q.tol);
    v.converged = any_converged;
    v.iterations = best.iterations;
    v.k = k;
    v.clamped = clamped;
    return v;
}

Verdict rank_k_min_from(const PositivityQuery& q, const std::vector<ComplexMatrix>& starts, int k,
                        bool clamped) {
    const int n = q.form.n, r = q.form.r;
    const ComplexMatrix& mat = q.form.matrix.matrix();
    const double scale = q.form.scale();
    const int count = static_cast<int>(starts.size());
    std::vector<AltState> runs(count);
    if (q.exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
        for (int i = 0; i < count; ++i) runs[i] = alternate(mat, n, r, k, starts[i], q.max_iters, scale);
    } else {
        for (int i = 0; i < count; ++i) runs[i] = alternate(mat, n, r, k, starts[i], q.max_iters, scale);
    }
    int best = 0;
    bool any = false;
    for (int i = 0; i < count; ++i) {
        any = any || runs[i].converged;
        if (runs[i].value < runs[best].value) best = i;
    }
    return finish(q, runs[best], k, clamped, any);
}

int clamp_k(const BiForm& form, int k, bool& clamped) {
    if (k < 1) throw InputError("rank_k_min: k must be at least 1");
    const int kmax = std::min(form.n, form.r);
    clamped = k > kmax;
    return std::min(k, kmax);
}

}  // namespace

Verdict rank_k_min(const PositivityQuery& q) {
    if (q.restarts < 1) throw InputError("rank_k_min: restarts must be at least 1");
    if (q.max_iters < 1) throw InputError("rank_k_min: max_iters must be at least 1");
    bool clamped = false;
    const int k = clamp_k(q.form, q.k, clamped);
    std::vector<ComplexMatrix> starts;
    starts.reserve(q.restarts);
    for (int i = 0; i < q.restarts; ++i) starts.push_back(random_start(q.seed, i, q.form.r, k));
    return rank_k_min_from(q, starts, k, clamped);
}

bool is_k_positive(const BiForm& form, int k, Exec exec) {
    PositivityQuery q{form, k};
    q.exec = exec;
    return rank_k_min(q).status == Status::positive;
}

std::vector<double> chain(const BiForm& form, Exec exec) {
    const int kmax = std::min(form.n, form.r);
    std::vector<double> out;
    ComplexMatrix warm_b;
    for (int k = 1; k <= kmax; ++k) {
        PositivityQuery q{form, k};
        q.exec = exec;
        std::vector<ComplexMatrix> starts;
        for (int i = 0; i < q.restarts; ++i) starts.push_back(random_start(q.seed, i, form.r, k));
        if (k > 1) {
            // previous witness plus a fresh column: its value is the previous minimum
            ComplexMatrix b(form.r, k);
            b.leftCols(k - 1) = warm_b;
            b.col(k - 1) = random_start(q.seed, -1, form.r, 1).col(0);
            starts.push_back(b);
        }
        const Verdict v = rank_k_min_from(q, starts, k, false);
        out.push_back(v.min_value);
        // B factor of the best witness: Y = conj(T) = U S V^† = (U S) conj(V)^T
        const ComplexMatrix y = v.witness.coeffs.conjugate();
        Eigen::JacobiSVD<ComplexMatrix> svd(y, Eigen::ComputeThinU | Eigen::ComputeThinV);
        warm_b = svd.matrixV().leftCols(k).conjugate();
    }
    return out;
}

// ---------------------------------------------------------------------------

namespace {

// Roberts' R_d sequence: x_m = frac(0.5 + m alpha), alpha_j = phi_d^{-(j+1)},
// phi_d the positive root of x^{d+1} = x + 1.
struct RSequence {
    std::vector<double> alpha;
    explicit RSequence(int d) : alpha(d) {
        double phi = 2.0;
        for (int i = 0; i < 60; ++i) phi = std::pow(1.0 + phi, 1.0 / (d + 1));
        for (int j = 0; j < d; ++j) alpha[j] = std::fmod(std::pow(1.0 / phi, j + 1), 1.0);
    }
    double coord(long long m, int j) const {
        const double x = 0.5 + static_cast<double>(m) * alpha[j];
        return x - std::floor(x);
    }
};

struct Factors {
    ComplexMatrix a, b;
};

double rayleigh(const ComplexMatrix& q, const ComplexMatrix& t) {
    // value(T) / ||T||^2 with value(T) = x^T Q conj(x)
    const int n = static_cast<int>(t.rows()), r = static_cast<int>(t.cols());
    ComplexVector x(n * r);
    for (int i = 0; i < n; ++i)
        for (int mu = 0; mu < r; ++mu) x(i * r + mu) = t(i, mu);
    const double nn = x.squaredNorm();
    if (nn == 0) return std::numeric_limits<double>::infinity();
    return (x.transpose() * q * x.conjugate())(0, 0).real() / nn;
}

Factors sample_factors(const RSequence& seq, long long m, int n, int r, int k) {
    // Box-Muller on consecutive coordinate pairs.
    Factors f{ComplexMatrix(n, k), ComplexMatrix(r, k)};
    int c = 0;
    auto gauss = [&]() {
        const double u1 = std::max(seq.coord(m, c), 1e-300), u2 = seq.coord(m, c + 1);
        c += 2;
        const double rad = std::sqrt(-2.0 * std::log(u1));
        return cplx(rad * std::cos(2 * M_PI * u2), rad * std::sin(2 * M_PI * u2));
    };
    for (int i = 0; i < n; ++i)
        for (int a = 0; a < k; ++a) f.a(i, a) = gauss();
    for (int i = 0; i < r; ++i)
        for (int a = 0; a < k; ++a) f.b(i, a) = gauss();
    return f;
}

double descend(const ComplexMatrix& q, Factors f, int iters) {
    const int n = static_cast<int>(f.a.rows()), r = static_cast<int>(f.b.rows());
    auto value = [&](const Factors& g) { return rayleigh(q, g.a * g.b.transpose()); };
    double fval = value(f);
    double step = 1.0;
    for (int it = 0; it < iters; ++it) {
        const ComplexMatrix t = f.a * f.b.transpose();
        const double nn = t.squaredNorm();
        ComplexVector x(n * r);
        for (int i = 0; i < n; ++i)
            for (int mu = 0; mu < r; ++mu) x(i * r + mu) = t(i, mu);
        const ComplexVector gx = (q.transpose() * x - fval * x) / nn;  // d f / d conj(x)
        ComplexMatrix g(n, r);
        for (int i = 0; i < n; ++i)
            for (int mu = 0; mu < r; ++mu) g(i, mu) = gx(i * r + mu);
        const ComplexMatrix ga = g * f.b.conjugate();
        const ComplexMatrix gb = g.transpose() * f.a.conjugate();
        const double gnorm2 = ga.squaredNorm() + gb.squaredNorm();
        if (gnorm2 < 1e-30) break;
        bool moved = false;
        for (int ls = 0; ls < 50; ++ls) {
            const Factors trial{f.a - step * ga, f.b - step * gb};
            const double tv = value(trial);
            if (tv <= fval - 1e-4 * step * gnorm2) {
                f = trial;
                fval = tv;
                moved = true;
                step *= 2.0;
                break;
            }
            step *= 0.5;
        }
        if (!moved) break;
        // keep the factors balanced so the gradient stays well scaled
        const double na = f.a.norm(), nb = f.b.norm();
        if (na > 0 && nb > 0) {
            const double s = std::sqrt(nb / na);
            f.a *= s;
            f.b /= s;
        }
    }
    return fval;
}

}  // namespace

double brute_force_min(const BiForm& form, int k_in, int samples, Exec exec) {
    const int n = form.n, r = form.r;
    if (n * r > 12) throw InputError("brute_force_min: n*r must be at most 12");
    if (samples < 1) throw InputError("brute_force_min: samples must be positive");
    if (k_in < 1) throw InputError("brute_force_min: k must be at least 1");
    const int k = std::min(k_in, std::min(n, r));
    const ComplexMatrix& q = form.matrix.matrix();
    const RSequence seq(2 * k * (n + r));

    std::vector<double> vals(samples);
    auto eval = [&](int m) {
        const Factors f = sample_factors(seq, m, n, r, k);
        vals[m] = rayleigh(q, f.a * f.b.transpose());
    };
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
        for (int m = 0; m < samples; ++m) eval(m);
    } else {
        for (int m = 0; m < samples; ++m) eval(m);
    }

    const int keep = std::min(samples, 20);
    std::vector<int> idx(samples);
    std::iota(idx.begin(), idx.end(), 0);
    std::partial_sort(idx.begin(), idx.begin() + keep, idx.end(), [&](int x, int y) {
        return vals[x] < vals[y] || (vals[x] == vals[y] && x < y);
    });
    std::vector<double> refined(keep);
    auto refine = [&](int i) {
        refined[i] = std::min(vals[idx[i]], descend(q, sample_factors(seq, idx[i], n, r, k), 3000));
    };
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
        for (int i = 0; i < keep; ++i) refine(i);
    } else {
        for (int i = 0; i < keep; ++i) refine(i);
    }
    return *std::min_element(refined.begin(), refined.end());
}

// ---------------------------------------------------------------------------

std::vector<std::vector<int>> q_subsets(int n, int q) {
    std::vector<std::vector<int>> out;
    if (q < 0 || q > n) return out;
    std::vector<int> cur(q);
    std::iota(cur.begin(), cur.end(), 0);
    while (true) {
        out.push_back(cur);
        int i = q - 1;
        while (i >= 0 && cur[i] == n - q + i) --i;
        if (i < 0) break;
        ++cur[i];
        for (int j = i + 1; j < q; ++j) cur[j] = cur[j - 1] + 1;
    }
    return out;
}

DemaillyResult demailly_check(const CurvaturePoint& c, const HermitianMatrix& g, int q, int k) {
    const int n = c.n, r = c.r();
    if (g.dim() != n) throw InputError("demailly_check: g has the wrong dimension");
    if (q < 1 || q > n) throw InputError("demailly_check: need 1 <= q <= n");
    const Eigen::LLT<ComplexMatrix> lg(g.matrix());
    if (lg.info() != Eigen::Success) throw InputError("demailly_check: g is not positive definite");
    const Eigen::LLT<ComplexMatrix> lh(c.h.matrix());
    if (lh.info() != Eigen::Success) throw InputError("demailly_check: h is not positive definite");

    // Orthonormal frames: P^T g conj(P) = I with P = L_g^{-T}; same for h.
    const ComplexMatrix lgm = lg.matrixL();
    const ComplexMatrix lhm = lh.matrixL();
    const ComplexMatrix p = lgm.inverse().transpose();
    const ComplexMatrix cf = lhm.inverse().transpose();
    const ComplexMatrix kk = kron(p, cf);
    const BiForm form = curvature_biform(c);
    const ComplexMatrix on = kk.transpose() * form.matrix.matrix() * kk.conjugate();

    // Omega^mu_{nu l jbar} = on[(l,nu),(j,mu)]
    const auto subsets = q_subsets(n, q);
    const int ns = static_cast<int>(subsets.size());
    auto index_of = [&](std::vector<int> s, int& sign) {
        sign = 1;
        for (std::size_t i = 0; i < s.size(); ++i)
            for (std::size_t j = i + 1; j < s.size(); ++j) {
                if (s[i] == s[j]) return -1;
                if (s[i] > s[j]) sign = -sign;
            }
        std::sort(s.begin(), s.end());
        return static_cast<int>(std::lower_bound(subsets.begin(), subsets.end(), s) - subsets.begin());
    };

    ComplexMatrix op = ComplexMatrix::Zero(ns * r, ns * r);
    for (int a = 0; a < ns; ++a) {
        const auto& J = subsets[a];
        for (int gam = 0; gam < q; ++gam) {
            for (int l = 0; l < n; ++l) {
                std::vector<int> repl = J;
                repl[gam] = l;
                int sign = 1;
                const int b = index_of(repl, sign);
                if (b < 0) continue;
                for (int mu = 0; mu < r; ++mu)
                    for (int nu = 0; nu < r; ++nu)
                        op(a * r + mu, b * r + nu) += double(sign) * on(l * r + nu, J[gam] * r + mu);
            }
        }
    }

    DemaillyResult out;
    out.op = HermitianMatrix(op);
    out.min_eigenvalue = min_eigenvalue(out.op);
    out.positive = out.min_eigenvalue > 0;
    if (k >= std::min(n - q + 1, r)) {
        PositivityQuery pq{form, std::min(k, std::min(n, r))};
        out.theorem_applies = rank_k_min(pq).status == Status::positive;
    }
    return out;
}

MetricField harmonic_sum(const MetricField& a, const MetricField& b) {
    if (a.n() != b.n() || a.r() != b.r()) throw InputError("harmonic_sum: shape mismatch");
    MatrixFn fa = a.evaluator(), fb = b.evaluator();
    return MetricField(a.n(), a.r(), [fa, fb](const ComplexVector& z) {
        return ComplexMatrix((fa(z).inverse() + fb(z).inverse()).inverse());
    });
}

std::vector<Verdict> harmonic_sum_probe(const MetricField& a, const MetricField& b,
                                        const std::vector<ComplexVector>& points, int k) {
    const MetricField h = harmonic_sum(a, b);
    std::vector<Verdict> out;
    for (const auto& z : points) out.push_back(rank_k_min({curvature_biform(chern_curvature(h, z)), k}));
    return out;
}

}  // namespace curvlab
