#include "curvlab/cohomology.hpp"

#include <algorithm>

#include "curvlab/errors.hpp"

namespace curvlab {

namespace {

// C(a, b) for a >= 0, 0 <= b <= a.
Dim binom(Dim a, Dim b) {
    if (b < 0 || a < b) return 0;
    b = std::min(b, a - b);
    Dim r = 1;
    for (Dim i = 1; i <= b; ++i) r = r * (a - b + i) / i;
    return r;
}

}  // namespace

Dim hq_line(int n, int d, int q) {
    if (n < 1) throw InputError("hq_line: n must be at least 1");
    if (q < 0 || q > n) return 0;
    if (q == 0 && d >= 0) return binom(n + d, n);
    if (q == n && d <= -n - 1) return binom(-d - 1, n);
    return 0;
}

Dim euler_char_line(int n, int d) {
    if (n < 1) throw InputError("euler_char_line: n must be at least 1");
    // (d+1)(d+2)...(d+n)/n!, exact at every step
    Dim num = 1;
    for (int i = 1; i <= n; ++i) num = num * (d + i) / i;
    return num;
}

LESLedger::LESLedger(std::vector<LedgerTerm> terms) : terms_(std::move(terms)) {
    for (const auto& t : terms_)
        if (t.dim && *t.dim < 0) throw InputError("LESLedger: negative dimension");
}

std::vector<std::vector<int>> LESLedger::segments() const {
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    for (int i = 0; i < static_cast<int>(terms_.size()); ++i) {
        if (terms_[i].dim && *terms_[i].dim == 0) {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(i);
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

int LESLedger::propagate() {
    int solved = 0;
    for (bool progress = true; progress;) {
        progress = false;
        for (const auto& seg : segments()) {
            int unknown = -1, count = 0;
            Dim sum = 0;
            for (int k = 0; k < static_cast<int>(seg.size()); ++k) {
                const auto& t = terms_[seg[k]];
                if (!t.dim) {
                    unknown = k;
                    ++count;
                } else {
                    sum += (k % 2 ? -1 : 1) * *t.dim;
                }
            }
            if (count != 1) continue;
            const Dim v = (unknown % 2 ? 1 : -1) * sum;
            if (v < 0) throw Error("LESLedger: inconsistent data forces a negative dimension");
            terms_[seg[unknown]].dim = v;
            terms_[seg[unknown]].solved = true;
            ++solved;
            progress = true;
            break;  // segments change once a zero appears
        }
    }
    return solved;
}

Dim LESLedger::exactness_residual() const {
    Dim worst = 0;
    for (const auto& seg : segments()) {
        Dim sum = 0;
        bool known = true;
        for (int k = 0; k < static_cast<int>(seg.size()); ++k) {
            if (!terms_[seg[k]].dim) {
                known = false;
                break;
            }
            sum += (k % 2 ? -1 : 1) * *terms_[seg[k]].dim;
        }
        if (known) worst = std::max(worst, sum < 0 ? -sum : sum);
    }
    return worst;
}

bool LESLedger::complete() const {
    return std::all_of(terms_.begin(), terms_.end(), [](const LedgerTerm& t) { return t.dim.has_value(); });
}

LESLedger euler_sequence_ledger(int n, int d) {
    if (n < 2) throw InputError("euler_sequence_ledger: n must be at least 2");
    std::vector<LedgerTerm> terms;
    for (int q = 0; q <= n; ++q) {
        const std::string s = std::to_string(q);
        terms.push_back({"H" + s + "(O(" + std::to_string(d - n - 1) + "))", hq_line(n, d - n - 1, q)});
        terms.push_back({"H" + s + "(O(" + std::to_string(d - n) + ")^" + std::to_string(n + 1) + ")",
                         (n + 1) * hq_line(n, d - n, q)});
        terms.push_back({"H" + s + "(K*T(" + std::to_string(d) + "))", std::nullopt});
    }
    LESLedger l(std::move(terms));
    l.propagate();
    return l;
}

std::optional<Dim> hq_K_tensor_T(int n, int d, int q) {
    if (n < 2) throw InputError("hq_K_tensor_T: n must be at least 2");
    if (q < 0 || q > n) return Dim{0};
    return euler_sequence_ledger(n, d).terms()[3 * q + 2].dim;
}

AdjointVerdict adjoint_restriction_verdict(int n, int d) {
    if (d < 1) throw PreconditionError("adjoint_restriction_verdict: need a hypersurface of degree d >= 1");
    const auto h1 = hq_K_tensor_T(n, 0, 1);
    const auto h1d = hq_K_tensor_T(n, d, 1);
    AdjointVerdict v;
    if (h1 && *h1 == 0) {
        v.surjective = true;
        v.coker_dim = 0;
    } else if (h1 && h1d && *h1d == 0) {
        v.surjective = false;
        v.coker_dim = *h1;
    }
    return v;
}

}  // namespace curvlab
