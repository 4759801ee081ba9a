#pragma once

#include <compare>

#include "omega/core.hpp"
#include "omega/monomial.hpp"

namespace omega {

struct DominanceRel {
    enum class Relation { prec, asymp, succ };
    Relation relation = Relation::asymp;
    bool similar = false;

    friend bool operator==(const DominanceRel &, const DominanceRel &) = default;
};

std::string to_string(DominanceRel::Relation r);

Series operator+(const Series &a, const Series &b);
Series operator-(const Series &a);
Series operator-(const Series &a, const Series &b);
Series operator*(const Series &a, const Series &b);
Series operator/(const Series &a, const Series &b);

/// c * m * f.
Series scale(const Series &f, const Constant &c, const Monomial &m = Monomial());

/// r^-1 m^-1 sum (-eps)^n where f = r m (1 + eps). Throws zero_series.
Series invert(const Series &f);

/// f^c. Throws not_positive unless f > 0 or c is an integer.
Series power(const Series &f, const Constant &c);

/// First term. Throws zero_series.
Term leading_term(const Series &f);

/// Throws zero_series when either side is zero.
DominanceRel dominance(const Series &a, const Series &b);

/// Sign of the leading coefficient of a - b. Equal needs both supports to be
/// exhausted within the term budget, otherwise budget_exhausted.
std::strong_ordering compare(const Series &a, const Series &b);

/// compare(f, 0) as -1, 0, 1.
int sign(const Series &f);

/// Series of terms strictly dominating m.
Series truncate_above(const Series &f, const Monomial &m);

} // namespace omega
