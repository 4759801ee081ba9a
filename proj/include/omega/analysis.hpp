#pragma once

#include "omega/series.hpp"

namespace omega {

struct SeriesSplit {
    Series purely_infinite;
    Constant constant;
    Series infinitesimal;
};

/// Partition of the support into monomials > 1, = 1 and < 1.
SeriesSplit split(const Series &f);

Series exp_series(const Series &f);

/// Throws not_positive unless f > 0.
Series log_series(const Series &f);

/// The strongly linear derivation with x' = 1.
Series derive(const Series &f);

/// f' / f. Throws zero_series.
Series dagger(const Series &f);

/// m'/m for a monomial.
Series dagger(const Monomial &m);

/// Exponential rank over the canonical presentation. Throws
/// budget_exhausted when the support cannot be enumerated in full.
unsigned exp_rank(const Series &f);

} // namespace omega
