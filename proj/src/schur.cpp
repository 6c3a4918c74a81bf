#include "curvlab/schur.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>

#include "curvlab/errors.hpp"
#include "curvlab/positivity.hpp"

namespace curvlab {

BlockForm::BlockForm(int m1_, int m2_, int r_, HermitianMatrix m)
    : m1(m1_), m2(m2_), r(r_), matrix(std::move(m)) {
    if (m1 < 1 || m2 < 1 || r < 1) throw InputError("BlockForm: dimensions must be positive");
    if (matrix.dim() != (m1 + m2) * r) throw InputError("BlockForm: matrix has the wrong size");
}

namespace {

struct Blocks {
    ComplexMatrix q11, q12, q21, q22;
};

Blocks split(const BlockForm& b) {
    const int d1 = b.m1 * b.r, d2 = b.m2 * b.r;
    const ComplexMatrix& m = b.matrix.matrix();
    return {m.topLeftCorner(d1, d1), m.topRightCorner(d1, d2), m.bottomLeftCorner(d2, d1),
            m.bottomRightCorner(d2, d2)};
}

void require_pd(const ComplexMatrix& q22) {
    const RealVector ev = eigh(HermitianMatrix(q22)).values;
    if (ev(0) <= 0) throw PreconditionError("schur: lower block is not positive definite");
    if (ev(ev.size() - 1) / ev(0) > 1e10) throw PreconditionError("schur: lower block is ill-conditioned");
}

}  // namespace

BiForm schur_complement(const BlockForm& b) {
    const Blocks s = split(b);
    require_pd(s.q22);
    const Eigen::LLT<ComplexMatrix> llt(s.q22);
    return BiForm(b.m1, b.r, HermitianMatrix(s.q11 - s.q12 * llt.solve(s.q21)));
}

TensorPoint schur_completion(const BlockForm& b, const TensorPoint& t1) {
    if (t1.n() != b.m1 || t1.r() != b.r) throw InputError("schur_completion: T1 has the wrong shape");
    const Blocks s = split(b);
    require_pd(s.q22);
    const Eigen::LLT<ComplexMatrix> llt(s.q22);
    const ComplexVector t2 = -(llt.solve(s.q21)).conjugate() * t1.flat();
    return TensorPoint::from_flat(t2, b.m2, b.r);
}

double block_value(const BlockForm& b, const TensorPoint& t1, const TensorPoint& t2) {
    if (t1.n() != b.m1 || t2.n() != b.m2 || t1.r() != b.r || t2.r() != b.r)
        throw InputError("block_value: tensor shapes do not match the blocks");
    ComplexMatrix t(b.m1 + b.m2, b.r);
    t << t1.coeffs, t2.coeffs;
    return biform_apply(b.matrix, TensorPoint(t), TensorPoint(t)).real();
}

namespace {

constexpr int kMaxAttempts = 50;

ComplexMatrix gaussian(std::mt19937_64& rng, int rows, int cols) {
    std::normal_distribution<double> g;
    ComplexMatrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = cplx(g(rng), g(rng));
    return m;
}

ComplexMatrix hermitian_part(const ComplexMatrix& m) { return 0.5 * (m + m.adjoint()); }

// Random Hermitian G shifted by (margin - min_k G) I.
std::optional<ComplexMatrix> sample_general(std::mt19937_64& rng, const SchurTrial& t, double margin) {
    const int dim = (t.m1 + t.m2) * t.r;
    const ComplexMatrix gm = hermitian_part(gaussian(rng, dim, dim));
    const double mu = rank_k_min({BiForm(t.m1 + t.m2, t.r, HermitianMatrix(gm)), t.k}).min_value;
    return ComplexMatrix(gm + (margin - mu) * ComplexMatrix::Identity(dim, dim));
}

// J22 positive definite, J21 = J22 (C (x) Id), J11 random and shifted until the
// whole form has rank-k minimum >= margin. Shifting J11 by s moves the rank-k
// minimum by at most s; steps double until the target is reached.
std::optional<ComplexMatrix> sample_fiber_trivial(std::mt19937_64& rng, const SchurTrial& t, double margin) {
    const int d1 = t.m1 * t.r, d2 = t.m2 * t.r, dim = d1 + d2;
    const ComplexMatrix b = gaussian(rng, d2, d2);
    const ComplexMatrix j22 = b * b.adjoint() / double(d2) + 0.5 * ComplexMatrix::Identity(d2, d2);
    const ComplexMatrix c = gaussian(rng, t.m2, t.m1);
    const ComplexMatrix j21 = j22 * kron(c, ComplexMatrix::Identity(t.r, t.r));
    ComplexMatrix j(dim, dim);
    j.topLeftCorner(d1, d1) = hermitian_part(gaussian(rng, d1, d1));
    j.bottomRightCorner(d2, d2) = j22;
    j.bottomLeftCorner(d2, d1) = j21;
    j.topRightCorner(d1, d2) = j21.adjoint();
    double step = 0;
    for (int iter = 0; iter < 40; ++iter) {
        const ComplexMatrix q = j.transpose();
        const double mu = rank_k_min({BiForm(t.m1 + t.m2, t.r, HermitianMatrix(q)), t.k}).min_value;
        if (mu >= margin) return q;
        step = std::max(margin - mu, 2 * step);
        j.topLeftCorner(d1, d1) += step * ComplexMatrix::Identity(d1, d1);
    }
    return std::nullopt;
}

SchurTrial run_trial(int index, SchurDims max_dims, int k, unsigned long long seed, Coupling coupling,
                     int& rejected) {
    std::seed_seq ss{static_cast<unsigned>(seed & 0xffffffffu), static_cast<unsigned>(seed >> 32),
                     static_cast<unsigned>(index)};
    std::mt19937_64 rng(ss);
    std::uniform_real_distribution<double> unif(0.05, 0.5);

    SchurTrial t;
    t.index = index;
    t.m1 = std::uniform_int_distribution<int>(1, max_dims.m1)(rng);
    t.m2 = std::uniform_int_distribution<int>(1, max_dims.m2)(rng);
    t.r = std::uniform_int_distribution<int>(1, max_dims.r)(rng);
    t.k = std::min(k, std::min(t.m1 + t.m2, t.r));

    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        const double margin = unif(rng);
        const auto hm = coupling == Coupling::general ? sample_general(rng, t, margin)
                                                      : sample_fiber_trivial(rng, t, margin);
        if (!hm) {
            ++rejected;
            continue;
        }
        const BlockForm bf(t.m1, t.m2, t.r, HermitianMatrix(*hm));

        BiForm sc;
        try {
            sc = schur_complement(bf);
        } catch (const PreconditionError&) {
            ++rejected;
            continue;
        }
        t.form_min = margin;
        t.scale = sc.scale();
        const int kc = std::min(t.k, std::min(t.m1, t.r));
        t.complement_min = rank_k_min({sc, kc}).min_value;
        t.violation = t.complement_min <= -1e-8 * t.scale;

        for (int probe = 0; probe < 3; ++probe) {
            const TensorPoint t1(gaussian(rng, t.m1, t.r));
            const double lhs = block_value(bf, t1, schur_completion(bf, t1));
            const double rhs = sc.value(t1);
            const double res = std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs));
            t.completion_residual = std::max(t.completion_residual, res);
        }
        return t;
    }
    t.k = -1;  // marks an exhausted trial
    return t;
}

}  // namespace

SchurReport verify_schur_positivity(int trials, SchurDims max_dims, int k, unsigned long long seed,
                                    Exec exec, Coupling coupling) {
    if (trials < 1) throw InputError("verify_schur_positivity: trials must be positive");
    if (k < 1) throw InputError("verify_schur_positivity: k must be at least 1");
    if (max_dims.m1 < 1 || max_dims.m2 < 1 || max_dims.r < 1)
        throw InputError("verify_schur_positivity: dimensions must be positive");

    std::vector<SchurTrial> rec(trials);
    std::vector<int> rej(trials, 0);
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
        for (int i = 0; i < trials; ++i) rec[i] = run_trial(i, max_dims, k, seed, coupling, rej[i]);
    } else {
        for (int i = 0; i < trials; ++i) rec[i] = run_trial(i, max_dims, k, seed, coupling, rej[i]);
    }

    SchurReport rep;
    for (int i = 0; i < trials; ++i) {
        rep.rejected += rej[i];
        if (rec[i].k < 0) {
            rep.insufficient_samples = true;
            continue;
        }
        ++rep.trials;
        if (rec[i].violation) ++rep.violations;
        rep.max_completion_residual = std::max(rep.max_completion_residual, rec[i].completion_residual);
        rep.records.push_back(rec[i]);
    }
    return rep;
}

}  // namespace curvlab
