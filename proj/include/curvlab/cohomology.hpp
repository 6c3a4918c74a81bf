#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace curvlab {

using Dim = std::int64_t;

// h^q(P^n, O(d)) by the Bott formula. Throws InputError for n < 1.
Dim hq_line(int n, int d, int q);

// Euler characteristic of O(d) on P^n as the polynomial C(n + d, n).
Dim euler_char_line(int n, int d);

struct LedgerTerm {
    std::string label;
    std::optional<Dim> dim;
    bool solved = false;  // filled in by propagation rather than given
};

// A long exact sequence of finite-dimensional spaces, bounded by zeros at both
// ends. Unknowns are solved only when they are the single unknown of a segment
// delimited by known zeros.
class LESLedger {
public:
    explicit LESLedger(std::vector<LedgerTerm> terms);

    // Returns the number of unknowns solved.
    int propagate();
    const std::vector<LedgerTerm>& terms() const { return terms_; }
    // Largest |alternating sum| over fully known zero-bounded segments.
    Dim exactness_residual() const;
    bool complete() const;

private:
    std::vector<std::vector<int>> segments() const;
    std::vector<LedgerTerm> terms_;
};

// 0 -> O(d-n-1) -> O(d-n)^{n+1} -> K (x) T(d) -> 0 in cohomology, with the
// line-bundle terms filled from the Bott formula. Order A_0, B_0, C_0, A_1, ...
LESLedger euler_sequence_ledger(int n, int d);

// h^q(P^n, K (x) T (x) O(d)), or nullopt if the ledger does not force it.
// Throws InputError for n < 2.
std::optional<Dim> hq_K_tensor_T(int n, int d, int q);

struct AdjointVerdict {
    std::optional<bool> surjective;
    std::optional<Dim> coker_dim;
    bool determined() const { return surjective.has_value(); }
};

// Restriction H^0(P^n, K (x) T (x) O(d)) -> H^0(S, (K (x) T (x) O(d))|_S) for a
// smooth hypersurface S of degree d. Its cokernel is the kernel of
// H^1(K (x) T) -> H^1(K (x) T (x) O(d)). Throws PreconditionError for d < 1.
AdjointVerdict adjoint_restriction_verdict(int n, int d);

}  // namespace curvlab
