#pragma once

#include <vector>

#include "curvlab/bundle_geometry.hpp"
#include "curvlab/exec.hpp"

namespace curvlab {

// Hermitian form on (M1 + M2) (x) V in orthonormal coordinates. Base
// directions 0..m1-1 span M1 and m1..m1+m2-1 span M2; index (i, mu) -> i*r + mu.
struct BlockForm {
    int m1 = 0, m2 = 0, r = 0;
    HermitianMatrix matrix;

    BlockForm() = default;
    BlockForm(int m1, int m2, int r, HermitianMatrix m);
    BiForm as_biform() const { return BiForm(m1 + m2, r, matrix); }
};

// Q11 - Q12 Q22^{-1} Q21. Throws PreconditionError unless Q22 is positive
// definite with condition number <= 1e10.
BiForm schur_complement(const BlockForm& b);

// The T2 minimizing the form at T1 (+) T2: T2 = -conj(Q22^{-1} Q21) vec(T1).
TensorPoint schur_completion(const BlockForm& b, const TensorPoint& t1);

// Form evaluated on T1 (+) T2 (T1 is m1 x r, T2 is m2 x r).
double block_value(const BlockForm& b, const TensorPoint& t1, const TensorPoint& t2);

struct SchurTrial {
    int index = 0;
    int m1 = 0, m2 = 0, r = 0, k = 0;
    double form_min = 0;        // rank-k minimum of the sampled form
    double complement_min = 0;  // rank-k minimum of the complement
    double scale = 1;
    double completion_residual = 0;
    bool violation = false;
};

struct SchurReport {
    int trials = 0;
    int violations = 0;
    int rejected = 0;  // samples discarded because Q22 was not positive definite
    bool insufficient_samples = false;
    double max_completion_residual = 0;
    std::vector<SchurTrial> records;
};

struct SchurDims {
    int m1 = 2, m2 = 2, r = 3;
};

// general: Q is an arbitrary shifted random Hermitian form.
// fiber_trivial: the coupling satisfies J22^{-1} J21 = C (x) Id_V, so the
// completion of a rank-k T1 stays rank k.
enum class Coupling { general, fiber_trivial };

// Per trial: dimensions drawn uniformly up to max_dims, a k-positive form
// sampled by shifting a random Hermitian form, the complement tested for
// k-positivity and the completion identity checked at random T1.
SchurReport verify_schur_positivity(int trials, SchurDims max_dims, int k, unsigned long long seed,
                                    Exec exec = Exec::serial, Coupling coupling = Coupling::general);

}  // namespace curvlab
