#pragma once

#include <gtest/gtest.h>

#include <string>

#include "omega/budget.hpp"
#include "omega/error.hpp"
#include "omega/expr.hpp"
#include "omega/series.hpp"

namespace omega::test {

inline Series S(const std::string &text) { return read_series(text); }

/// Runs one randomized case under the per-trial budget of the checkers.
/// Returns false when a limit stopped it; verdicts are asserted inside.
template <class Fn> bool attempt(Fn &&fn) {
    BudgetScope scope(Budget{256, 4096, 8, 30000});
    try {
        fn();
        return true;
    } catch (const limit_error &) {
        return false;
    }
}

/// Counts conclusive cases; at least two thirds must be decided.
struct Tally {
    std::size_t done = 0, total = 0;
    template <class Fn> void operator()(Fn &&fn) {
        ++total;
        done += attempt(std::forward<Fn>(fn)) ? 1 : 0;
    }
    ~Tally() { EXPECT_GE(3 * done, 2 * total) << done << " of " << total << " cases decided"; }
};

/// First n terms of a and b agree exactly (coefficients and monomials).
inline ::testing::AssertionResult same_prefix(const Series &a, const Series &b, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        auto ta = a.term(i), tb = b.term(i);
        if (!ta && !tb)
            return ::testing::AssertionSuccess();
        if (!ta || !tb)
            return ::testing::AssertionFailure()
                   << "supports differ in length at term " << i << ": " << a.to_string(n) << " vs "
                   << b.to_string(n);
        if (cmp_monomial(ta->mono, tb->mono) != 0 || cmp_const(ta->coef, tb->coef) != 0)
            return ::testing::AssertionFailure()
                   << "term " << i << " differs: " << a.to_string(n) << " vs " << b.to_string(n);
    }
    return ::testing::AssertionSuccess();
}

/// Terms of a and b strictly above `bound` agree; cancellations below the
/// bound are not chased.
inline ::testing::AssertionResult same_above(const Series &a, const Series &b, const Monomial &bound) {
    for (std::size_t i = 0;; ++i) {
        auto ta = a.term_above(i, bound), tb = b.term_above(i, bound);
        if (!ta && !tb)
            return ::testing::AssertionSuccess();
        if (!ta || !tb || cmp_monomial(ta->mono, tb->mono) != 0 || cmp_const(ta->coef, tb->coef) != 0)
            return ::testing::AssertionFailure() << "term " << i << " above " << bound.to_string()
                                                 << " differs: " << a.to_string(6) << " vs "
                                                 << b.to_string(6);
    }
}

/// A monomial just below the first n terms of ref.
inline Monomial prefix_cut(const Series &ref, std::size_t n) {
    const Enumeration e = ref.enumerate(n + 1);
    const Monomial step = Monomial::x().pow(Constant(-static_cast<long>(n)));
    if (e.terms.size() > n)
        return e.terms[n].mono;
    return e.terms.empty() ? step : e.terms.back().mono * step;
}

/// a and b agree on the first n terms of ref, the side computed without
/// cancellation.
inline ::testing::AssertionResult same_on(const Series &a, const Series &ref, std::size_t n) {
    return same_above(a, ref, prefix_cut(ref, n));
}

inline ::testing::AssertionResult same_prefix(const Series &a, const std::string &b, std::size_t n = 10) {
    return same_prefix(a, read_series(b), n);
}

} // namespace omega::test
