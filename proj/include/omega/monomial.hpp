#pragma once

#include <compare>

#include "omega/core.hpp"

namespace omega {

/// Total order on monomials, decided by comparing their logarithms.
/// Throws zero_test_inconclusive or budget_exhausted when the comparison
/// cannot be decided exactly.
std::strong_ordering cmp_monomial(const Monomial &a, const Monomial &b);

/// Sum of a_n * l_{n+1} plus the exponent; purely infinite or zero.
Series log_monomial(const Monomial &m);

/// Inverse of log_monomial. Throws not_purely_infinite when a term <= 1
/// is found.
Monomial exp_purely_infinite(const Series &p);

} // namespace omega
