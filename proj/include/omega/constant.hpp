#pragma once

#include <compare>
#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include <gmpxx.h>
#include <mpfr.h>

namespace omega {

/// Closed interval with MPFR endpoints, used as an enclosure of an exact real.
class Interval {
public:
    explicit Interval(mpfr_prec_t prec);
    Interval(const Interval &other);
    Interval(Interval &&other) noexcept;
    Interval &operator=(const Interval &other);
    Interval &operator=(Interval &&other) noexcept;
    ~Interval();

    static Interval point(const mpq_class &q, mpfr_prec_t prec);

    mpfr_srcptr lower() const { return lo_; }
    mpfr_srcptr upper() const { return hi_; }
    mpfr_ptr lower() { return lo_; }
    mpfr_ptr upper() { return hi_; }
    mpfr_prec_t precision() const { return mpfr_get_prec(lo_); }

    /// False when an endpoint is NaN (an undefined operation was attempted).
    bool valid() const;
    bool contains(const mpq_class &q) const;
    bool contains_zero() const;
    /// -1 or +1 when the interval excludes zero, 0 otherwise.
    int sign() const;
    bool subset_of(const Interval &other) const;
    bool intersects(const Interval &other) const;
    /// upper - lower, rounded up.
    double width() const;
    double midpoint() const;
    std::string to_string(int digits = 20) const;

private:
    mpfr_t lo_;
    mpfr_t hi_;
};

Interval operator+(const Interval &a, const Interval &b);
Interval operator-(const Interval &a);
Interval operator*(const Interval &a, const Interval &b);
/// NaN endpoints when the divisor straddles zero.
Interval reciprocal(const Interval &a);
Interval exp(const Interval &a);
/// NaN endpoints unless the argument is strictly positive.
Interval log(const Interval &a);
Interval pi_interval(mpfr_prec_t prec);

namespace detail {
struct ConstNode;
}

/// Exact real number from the closure of the rationals (and pi) under field
/// operations, exp and log, kept in a normal form: a quotient of polynomials
/// with rational coefficients over the atoms log(p) for primes p, pi, log(u)
/// for irreducible u, and at most one exp(...) factor per monomial.
///
/// Values are immutable and share structure; equality is structural equality
/// of normal forms.
class Constant {
public:
    Constant() = default;
    Constant(long v);
    explicit Constant(const mpq_class &q);

    static Constant rational(long num, long den = 1);
    static Constant pi();
    static Constant exp(const Constant &c);
    /// Throws domain_error unless c is provably positive.
    static Constant log(const Constant &c);
    /// base^e; integer exponents by repeated multiplication, otherwise
    /// exp(e log base) with base > 0.
    static Constant pow(const Constant &base, const Constant &e);

    bool is_zero() const { return node_ == nullptr; }
    bool is_one() const;
    bool is_rational() const;
    /// Only valid when is_rational().
    mpq_class as_rational() const;
    bool is_integer() const;

    /// Sign of the value: structural zero gives 0, otherwise interval
    /// refinement up to the budget precision. Throws zero_test_inconclusive.
    int sign() const;

    /// Raw enclosure at working precision `bits` (no width guarantee).
    Interval enclose(mpfr_prec_t bits) const;

    int structural_compare(const Constant &other) const;
    std::size_t hash() const;

    /// Text in the CLI constant grammar.
    std::string to_string() const;
    /// True when to_string() must be parenthesized as a factor.
    bool needs_parens() const;
    /// True when the printed form starts with a minus sign.
    bool looks_negative() const;

    friend Constant operator+(const Constant &a, const Constant &b);
    friend Constant operator-(const Constant &a, const Constant &b);
    friend Constant operator-(const Constant &a);
    friend Constant operator*(const Constant &a, const Constant &b);
    friend Constant operator/(const Constant &a, const Constant &b);
    Constant &operator+=(const Constant &o) { return *this = *this + o; }
    Constant &operator-=(const Constant &o) { return *this = *this - o; }
    Constant &operator*=(const Constant &o) { return *this = *this * o; }
    Constant &operator/=(const Constant &o) { return *this = *this / o; }

    friend bool operator==(const Constant &a, const Constant &b) {
        return a.structural_compare(b) == 0;
    }

    const detail::ConstNode *node() const { return node_.get(); }
    explicit Constant(std::shared_ptr<const detail::ConstNode> n) : node_(std::move(n)) {}

private:
    std::shared_ptr<const detail::ConstNode> node_;
};

/// Orders exact constants: Equal only when a - b is structurally zero.
/// Throws zero_test_inconclusive when refinement up to the budget precision
/// cannot separate them.
std::strong_ordering cmp_const(const Constant &a, const Constant &b);

/// Enclosure of c of width at most 2^(1-precision) * max(1, |c|). The result
/// is canonical: it is the smallest interval with `precision`-bit endpoints
/// containing c, so enclosures at higher precision nest inside lower ones.
Interval eval_const(const Constant &c, unsigned precision);

/// Unsimplified constant expression tree, as written by a user.
class ConstExpr {
public:
    enum class Kind { rational, pi, add, mul, div, neg, exp, log };

    static ConstExpr rational(const mpq_class &q);
    static ConstExpr pi();
    static ConstExpr add(ConstExpr a, ConstExpr b);
    static ConstExpr mul(ConstExpr a, ConstExpr b);
    static ConstExpr div(ConstExpr a, ConstExpr b);
    static ConstExpr neg(ConstExpr a);
    static ConstExpr exp(ConstExpr a);
    static ConstExpr log(ConstExpr a);

    Kind kind() const;
    const mpq_class &value() const;
    const std::vector<ConstExpr> &args() const;
    std::string to_string() const;

private:
    struct Node;
    std::shared_ptr<const Node> node_;
};

/// Applies the rewrite set (rational folding, exp/log cancellation, log of
/// products, exp additivity) by rebuilding bottom-up in normal form.
Constant simplify(const ConstExpr &e);
/// Normal forms are fixed points.
inline Constant simplify(const Constant &c) { return c; }
/// Raw interval evaluation of the unsimplified tree.
Interval enclose(const ConstExpr &e, mpfr_prec_t bits);
/// Expression tree that simplifies back to c.
ConstExpr to_expr(const Constant &c);

} // namespace omega
