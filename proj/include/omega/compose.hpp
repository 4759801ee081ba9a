#pragma once

#include <string>

#include "omega/analysis.hpp"

namespace omega {

/// Throws not_above_reals unless g > R.
void require_above_reals(const Series &g);

/// Right composition f o g. Throws not_above_reals unless g > R.
Series compose(const Series &f, const Series &g);

/// n-fold logarithm of g.
Series iterated_log(const Series &g, unsigned n);

/// Smallest n <= max_n such that the leading term of log^n(g) is 1 * l_k;
/// reports the pair (n, k).
std::optional<std::pair<unsigned, unsigned>> log_atomic_index(const Series &g, unsigned max_n);

/// k-th derivative.
Series derive_n(const Series &f, unsigned k);

/// Leading terms of f, f', ..., f^(last), shorter when a derivative
/// vanishes. Only finite prefixes of each derivative are expanded.
std::vector<Term> derivative_leads(const Series &f, unsigned last);

struct TaylorResult {
    Series partial_sum;
    Series remainder;
    Series bound;
    bool within_bound = false;
};

struct TaylorOptions {
    unsigned k_max = 16;
};

/// Partial Taylor sum of f o (x + delta) at order n with its exact
/// remainder and the bound (f^(n+1) o x) delta^(n+1). Throws
/// precondition_violated naming the failed condition.
TaylorResult taylor_expand(const Series &f, const Series &x, const Series &delta, unsigned n,
                           const TaylorOptions &opts = {});

enum class RadiusClass { eventually_decreasing, eventually_non_decreasing };

std::string to_string(RadiusClass r);

/// Classifies the Taylor terms (f^(k) o x) delta^k / k! as eventually strictly
/// decreasing for the dominance order or not, from the ratios
/// ((f^(k))^dagger o x) delta for k up to k_max.
RadiusClass radius_classify(const Series &f, const Series &x, const Series &delta,
                            unsigned k_max = 16);

struct FirstTermRatio {
    Series quotient;
    DominanceRel relation;
};

/// (f o (x + delta) - f o x) / delta compared with f' o x.
FirstTermRatio first_term_ratio(const Series &f, const Series &x, const Series &delta);

/// True when f is asymptotic to x^k for some 0 <= k <= k_max.
bool asymp_power_of_x(const Series &f, unsigned k_max);

} // namespace omega
