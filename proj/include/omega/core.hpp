#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "omega/constant.hpp"

namespace omega {

namespace detail {
struct MonoData;
class SeriesNode;
} // namespace detail

class Series;

/// Log-power word: sorted (n, a_n) pairs standing for the product of l_n^a_n,
/// where l_0 = x and l_{n+1} = log(l_n). Exponents are nonzero.
using Word = std::vector<std::pair<unsigned, Constant>>;

/// Canonical transmonomial  prod l_n^a_n * exp(expo)  with expo purely
/// infinite and free of terms c*l_{n+1} (those live in the word).
class Monomial {
public:
    /// The identity monomial 1.
    Monomial() = default;

    static Monomial x();
    /// l_n^a.
    static Monomial log_power(unsigned n, const Constant &a = Constant(1));
    /// Builds a canonical monomial; terms c*l_{n+1} of expo are folded into
    /// the word.
    static Monomial make(Word word, const Series &expo);

    const Word &word() const;
    const Series &expo() const;
    bool is_one() const { return data_ == nullptr; }
    /// True when the monomial is exactly l_n (exponent 1, no exp factor).
    std::optional<unsigned> as_log_atom() const;
    /// Nesting depth of exp factors.
    unsigned exp_height() const;

    Monomial inverse() const;
    Monomial pow(const Constant &c) const;
    friend Monomial operator*(const Monomial &a, const Monomial &b);
    friend Monomial operator/(const Monomial &a, const Monomial &b) { return a * b.inverse(); }

    /// Identity of the underlying node (cheap equality short cut).
    bool same(const Monomial &o) const { return data_ == o.data_; }
    const detail::MonoData *data() const { return data_.get(); }

    std::string to_string() const;

    explicit Monomial(std::shared_ptr<const detail::MonoData> d) : data_(std::move(d)) {}

private:
    std::shared_ptr<const detail::MonoData> data_;
};

struct Term {
    Constant coef;
    Monomial mono;
};

struct Enumeration {
    std::vector<Term> terms;
    bool exhausted = false;
};

/// Grid-based series with a lazily enumerated, strictly decreasing support.
/// The zero series has no node.
class Series {
public:
    Series() = default;
    explicit Series(const Constant &c);
    explicit Series(long v) : Series(Constant(v)) {}

    static Series x();
    /// l_n as a series.
    static Series log_iter(unsigned n);
    static Series monomial(const Monomial &m, const Constant &c = Constant(1));
    /// Finite series from terms in any order; equal monomials are merged.
    static Series from_terms(std::vector<Term> terms);

    /// True when the series is certified to be zero. May enumerate the first
    /// term of a lazy series.
    bool is_zero() const;
    /// True for series known to be finite sums without further enumeration.
    bool is_finite() const;

    /// The i-th term, or nothing once the support is exhausted.
    std::optional<Term> term(std::size_t i) const;
    /// The i-th term if it lies strictly above `bound`; cancellations below
    /// the bound are never chased.
    std::optional<Term> term_above(std::size_t i, const Monomial &bound) const;
    Enumeration enumerate(std::size_t n) const;

    /// Upper bound on the nesting of exp factors in the support.
    unsigned height() const;

    /// First n terms with a trailing "+ O(m)" marker when more follow.
    std::string to_string(std::size_t n = 8) const;

    const std::shared_ptr<detail::SeriesNode> &node() const { return node_; }
    bool same(const Series &o) const { return node_ == o.node_; }
    explicit Series(std::shared_ptr<detail::SeriesNode> n) : node_(std::move(n)) {}

private:
    std::shared_ptr<detail::SeriesNode> node_;
};

} // namespace omega
