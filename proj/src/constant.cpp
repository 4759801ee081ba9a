#include "omega/constant.hpp"

#include <atomic>
#include <functional>
#include <map>
#include <mutex>
#include <optional>

#include "omega/budget.hpp"
#include "omega/error.hpp"

namespace omega {
namespace detail {

struct Atom {
    enum class Kind { log_prime = 0, pi = 1, log = 2 };
    Kind kind = Kind::pi;
    mpz_class prime; // log_prime
    Constant arg;    // log: positive argument that does not decompose further
};

struct CMono {
    std::vector<std::pair<Atom, long>> factors; // sorted by atom, nonzero exponents
    Constant exp_arg;                           // zero when there is no exp factor

    bool is_unit() const { return factors.empty() && exp_arg.is_zero(); }
};

using Poly = std::vector<std::pair<CMono, mpq_class>>; // sorted by monomial, nonzero coefficients

struct ConstNode {
    Poly num;
    Poly den; // empty means 1
    std::size_t hash = 0;
    mutable std::atomic<int> sign_cache{2};
    mutable std::mutex mu;
    mutable std::optional<Interval> enclosure;
};

} // namespace detail

using detail::Atom;
using detail::CMono;
using detail::ConstNode;
using detail::Poly;

namespace {

// ---------------------------------------------------------------------------
// Structural order

int cmp_mpz(const mpz_class &a, const mpz_class &b) {
    int c = cmp(a, b);
    return (c > 0) - (c < 0);
}

int cmp_mpq(const mpq_class &a, const mpq_class &b) {
    int c = cmp(a, b);
    return (c > 0) - (c < 0);
}

int cmp_atom(const Atom &a, const Atom &b) {
    if (a.kind != b.kind)
        return a.kind < b.kind ? -1 : 1;
    switch (a.kind) {
    case Atom::Kind::log_prime:
        return cmp_mpz(a.prime, b.prime);
    case Atom::Kind::pi:
        return 0;
    case Atom::Kind::log:
        return a.arg.structural_compare(b.arg);
    }
    return 0;
}

int cmp_mono(const CMono &a, const CMono &b) {
    const std::size_t n = std::min(a.factors.size(), b.factors.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (int c = cmp_atom(a.factors[i].first, b.factors[i].first))
            return c;
        if (a.factors[i].second != b.factors[i].second)
            return a.factors[i].second < b.factors[i].second ? -1 : 1;
    }
    if (a.factors.size() != b.factors.size())
        return a.factors.size() < b.factors.size() ? -1 : 1;
    return a.exp_arg.structural_compare(b.exp_arg);
}

int cmp_poly(const Poly &a, const Poly &b) {
    const std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (int c = cmp_mono(a[i].first, b[i].first))
            return c;
        if (int c = cmp_mpq(a[i].second, b[i].second))
            return c;
    }
    if (a.size() != b.size())
        return a.size() < b.size() ? -1 : 1;
    return 0;
}

struct MonoLess {
    bool operator()(const CMono &a, const CMono &b) const { return cmp_mono(a, b) < 0; }
};

// ---------------------------------------------------------------------------
// Hashing

std::size_t mix(std::size_t h, std::size_t v) {
    return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

std::size_t hash_mpz(const mpz_class &z) {
    std::size_t h = std::hash<int>{}(mpz_sgn(z.get_mpz_t()));
    const std::size_t limbs = mpz_size(z.get_mpz_t());
    for (std::size_t i = 0; i < limbs; ++i)
        h = mix(h, static_cast<std::size_t>(mpz_getlimbn(z.get_mpz_t(), i)));
    return h;
}

std::size_t hash_mpq(const mpq_class &q) {
    return mix(hash_mpz(q.get_num()), hash_mpz(q.get_den()));
}

std::size_t hash_atom(const Atom &a) {
    std::size_t h = static_cast<std::size_t>(a.kind);
    if (a.kind == Atom::Kind::log_prime)
        h = mix(h, hash_mpz(a.prime));
    else if (a.kind == Atom::Kind::log)
        h = mix(h, a.arg.hash());
    return h;
}

std::size_t hash_mono(const CMono &m) {
    std::size_t h = 17;
    for (const auto &[atom, k] : m.factors)
        h = mix(mix(h, hash_atom(atom)), std::hash<long>{}(k));
    return mix(h, m.exp_arg.hash());
}

std::size_t hash_poly(const Poly &p) {
    std::size_t h = p.size();
    for (const auto &[m, q] : p)
        h = mix(mix(h, hash_mono(m)), hash_mpq(q));
    return h;
}

// ---------------------------------------------------------------------------
// Node construction

Constant make_node(Poly num, Poly den) {
    if (num.empty())
        return Constant();
    auto node = std::make_shared<ConstNode>();
    node->num = std::move(num);
    node->den = std::move(den);
    node->hash = mix(hash_poly(node->num), hash_poly(node->den));
    return Constant(std::shared_ptr<const ConstNode>(std::move(node)));
}

Constant from_poly(Poly p) { return make_node(std::move(p), {}); }

Constant from_mono(CMono m, mpq_class q = 1) {
    Poly p;
    p.emplace_back(std::move(m), std::move(q));
    return from_poly(std::move(p));
}

Constant from_atom(Atom a) {
    CMono m;
    m.factors.emplace_back(std::move(a), 1);
    return from_mono(std::move(m));
}

const Poly &unit_poly() {
    static const Poly p{{CMono{}, mpq_class(1)}};
    return p;
}

const Poly &num_of(const Constant &c) {
    static const Poly empty;
    return c.is_zero() ? empty : c.node()->num;
}

const Poly &den_of(const Constant &c) {
    if (c.is_zero() || c.node()->den.empty())
        return unit_poly();
    return c.node()->den;
}

bool has_den(const Constant &c) { return !c.is_zero() && !c.node()->den.empty(); }

Poly poly_add(const Poly &a, const Poly &b, int sign_b = 1) {
    Poly r;
    r.reserve(a.size() + b.size());
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        int c = i == a.size() ? 1 : j == b.size() ? -1 : cmp_mono(a[i].first, b[j].first);
        if (c < 0) {
            r.push_back(a[i++]);
        } else if (c > 0) {
            r.emplace_back(b[j].first, sign_b > 0 ? b[j].second : mpq_class(-b[j].second));
            ++j;
        } else {
            mpq_class s = sign_b > 0 ? mpq_class(a[i].second + b[j].second)
                                     : mpq_class(a[i].second - b[j].second);
            if (s != 0)
                r.emplace_back(a[i].first, s);
            ++i;
            ++j;
        }
    }
    return r;
}

Poly poly_scale(const Poly &a, const mpq_class &q) {
    Poly r;
    if (q == 0)
        return r;
    r.reserve(a.size());
    for (const auto &[m, c] : a)
        r.emplace_back(m, c * q);
    return r;
}

CMono mono_inverse(const CMono &m) {
    CMono r;
    r.factors = m.factors;
    for (auto &f : r.factors)
        f.second = -f.second;
    r.exp_arg = -m.exp_arg;
    return r;
}

Constant poly_mul(const Poly &a, const Poly &b);

// Product of two constant monomials. Merging two exp factors may expose
// exp(k log u) parts, so the result is a general constant.
Constant mono_product(const CMono &a, const CMono &b, const mpq_class &coef) {
    CMono r;
    std::size_t i = 0, j = 0;
    while (i < a.factors.size() || j < b.factors.size()) {
        int c = i == a.factors.size()   ? 1
                : j == b.factors.size() ? -1
                                        : cmp_atom(a.factors[i].first, b.factors[j].first);
        if (c < 0) {
            r.factors.push_back(a.factors[i++]);
        } else if (c > 0) {
            r.factors.push_back(b.factors[j++]);
        } else {
            long k = a.factors[i].second + b.factors[j].second;
            if (k != 0)
                r.factors.emplace_back(a.factors[i].first, k);
            ++i;
            ++j;
        }
    }
    if (a.exp_arg.is_zero() || b.exp_arg.is_zero()) {
        r.exp_arg = a.exp_arg.is_zero() ? b.exp_arg : a.exp_arg;
        return from_mono(std::move(r), coef);
    }
    Constant e = Constant::exp(a.exp_arg + b.exp_arg);
    return from_mono(std::move(r), coef) * e;
}

Constant poly_mul(const Poly &a, const Poly &b) {
    // Large constant products dominate the cost of deep expansions.
    charge_work(a.size() * b.size() / 16);
    std::map<CMono, mpq_class, MonoLess> acc;
    Constant extra;
    for (const auto &[ma, qa] : a) {
        for (const auto &[mb, qb] : b) {
            mpq_class q = qa * qb;
            if (!ma.exp_arg.is_zero() && !mb.exp_arg.is_zero()) {
                extra += mono_product(ma, mb, q);
                continue;
            }
            Constant prod = mono_product(ma, mb, q);
            // Single-term, denominator-free by construction.
            const auto &t = prod.node()->num.front();
            auto [it, inserted] = acc.emplace(t.first, t.second);
            if (!inserted)
                it->second += t.second;
        }
    }
    Poly p;
    for (auto &[m, q] : acc)
        if (q != 0)
            p.emplace_back(m, q);
    return from_poly(std::move(p)) + extra;
}

mpq_class leading_coef(const Poly &p) { return p.front().second; }

bool proportional(const Poly &a, const Poly &b, mpq_class &ratio) {
    if (a.size() != b.size())
        return false;
    ratio = a[0].second / b[0].second;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (cmp_mono(a[i].first, b[i].first) != 0)
            return false;
        if (a[i].second != ratio * b[i].second)
            return false;
    }
    return true;
}

// Normalizes num/den: monomial denominators fold into the numerator,
// otherwise the denominator is made monic.
Constant make_fraction(const Poly &num, const Poly &den) {
    if (num.empty())
        return Constant();
    if (den.empty() || (den.size() == 1 && den[0].first.is_unit() && den[0].second == 1))
        return from_poly(num);
    if (den.size() == 1) {
        Poly inv{{mono_inverse(den[0].first), mpq_class(1 / den[0].second)}};
        return poly_mul(num, inv);
    }
    mpq_class lc = leading_coef(den);
    Poly n = poly_scale(num, 1 / lc);
    Poly d = poly_scale(den, 1 / lc);
    mpq_class ratio;
    if (proportional(n, d, ratio))
        return Constant(ratio);
    return make_node(std::move(n), std::move(d));
}

Constant reciprocal_of(const Constant &c) {
    if (c.is_zero())
        throw domain_error("division by zero constant");
    return make_fraction(den_of(c), num_of(c));
}

// Quotient of two constants, each possibly carrying a denominator.
Constant quotient(const Constant &n, const Constant &d) {
    if (!has_den(n) && !has_den(d))
        return make_fraction(num_of(n), num_of(d));
    return n * reciprocal_of(d);
}

Constant pow_int(const Constant &b, long k) {
    if (k == 0)
        return Constant(1);
    if (k < 0)
        return reciprocal_of(pow_int(b, -k));
    Constant result(1), base = b;
    while (k > 0) {
        if (k & 1)
            result = result * base;
        k >>= 1;
        if (k)
            base = base * base;
    }
    return result;
}

// ---------------------------------------------------------------------------
// Logarithms of rationals

std::map<mpz_class, long> factorize(mpz_class n) {
    std::map<mpz_class, long> out;
    if (n < 0)
        n = -n;
    for (unsigned long p = 2; p < 1000000UL && n > 1; p += (p == 2 ? 1 : 2)) {
        if (mpz_class(p) * p > n)
            break;
        while (mpz_divisible_ui_p(n.get_mpz_t(), p)) {
            ++out[mpz_class(p)];
            n /= p;
        }
    }
    // A leftover that survived trial division stays as a single atom; it is
    // prime unless it has two factors above the trial bound.
    if (n > 1)
        ++out[n];
    return out;
}

Constant log_rational(const mpq_class &q) {
    if (q <= 0)
        throw domain_error("log of a non-positive rational");
    std::map<mpz_class, long> exps = factorize(q.get_num());
    for (const auto &[p, e] : factorize(q.get_den()))
        exps[p] -= e;
    Poly poly;
    for (const auto &[p, e] : exps) {
        if (e == 0)
            continue;
        Atom a;
        a.kind = Atom::Kind::log_prime;
        a.prime = p;
        CMono m;
        m.factors.emplace_back(std::move(a), 1);
        poly.emplace_back(std::move(m), mpq_class(e));
    }
    return from_poly(std::move(poly));
}

Constant log_abs_atom(const Atom &atom) {
    Constant v = from_atom(atom);
    if (v.sign() < 0)
        v = -v;
    Atom l;
    l.kind = Atom::Kind::log;
    l.arg = v;
    return from_atom(std::move(l));
}

// ---------------------------------------------------------------------------
// Interval evaluation

Interval eval_constant(const Constant &c, mpfr_prec_t prec);

Interval eval_atom(const Atom &a, mpfr_prec_t prec) {
    switch (a.kind) {
    case Atom::Kind::log_prime:
        return log(Interval::point(mpq_class(a.prime), prec));
    case Atom::Kind::pi:
        return pi_interval(prec);
    case Atom::Kind::log:
        return log(eval_constant(a.arg, prec));
    }
    return Interval(prec);
}

Interval ipow(const Interval &x, long k) {
    if (k < 0)
        return reciprocal(ipow(x, -k));
    Interval r = Interval::point(1, x.precision());
    for (long i = 0; i < k; ++i)
        r = r * x;
    return r;
}

Interval eval_mono(const CMono &m, mpfr_prec_t prec) {
    Interval r = Interval::point(1, prec);
    for (const auto &[atom, k] : m.factors)
        r = r * ipow(eval_atom(atom, prec), k);
    if (!m.exp_arg.is_zero())
        r = r * exp(eval_constant(m.exp_arg, prec));
    return r;
}

Interval eval_poly(const Poly &p, mpfr_prec_t prec) {
    Interval r = Interval::point(0, prec);
    for (const auto &[m, q] : p)
        r = r + Interval::point(q, prec) * eval_mono(m, prec);
    return r;
}

Interval eval_constant(const Constant &c, mpfr_prec_t prec) {
    if (c.is_zero())
        return Interval::point(0, prec);
    if (c.is_rational())
        return Interval::point(c.as_rational(), prec);
    const ConstNode *n = c.node();
    {
        std::lock_guard lock(n->mu);
        if (n->enclosure && n->enclosure->precision() >= prec)
            return *n->enclosure;
    }
    Interval r = eval_poly(n->num, prec);
    if (!n->den.empty())
        r = r * reciprocal(eval_poly(n->den, prec));
    if (r.valid()) {
        std::lock_guard lock(n->mu);
        if (!n->enclosure || n->enclosure->precision() < prec)
            n->enclosure = r;
    }
    return r;
}

// ---------------------------------------------------------------------------
// Printing

std::string constant_text(const Constant &c);

std::string atom_text(const Atom &a) {
    switch (a.kind) {
    case Atom::Kind::log_prime:
        return "log(" + a.prime.get_str() + ")";
    case Atom::Kind::pi:
        return "pi";
    case Atom::Kind::log:
        return "log(" + constant_text(a.arg) + ")";
    }
    return "?";
}

std::string mono_text(const CMono &m) {
    std::string s;
    for (const auto &[atom, k] : m.factors) {
        if (!s.empty())
            s += "*";
        s += atom_text(atom);
        if (k != 1)
            s += "^" + std::to_string(k);
    }
    if (!m.exp_arg.is_zero()) {
        if (!s.empty())
            s += "*";
        s += "exp(" + constant_text(m.exp_arg) + ")";
    }
    return s;
}

std::string poly_text(const Poly &p) {
    std::string s;
    bool first = true;
    for (const auto &[m, q] : p) {
        mpq_class a = abs(q);
        std::string body;
        if (m.is_unit())
            body = a.get_str();
        else if (a == 1)
            body = mono_text(m);
        else
            body = a.get_str() + "*" + mono_text(m);
        if (first)
            s += (q < 0 ? "-" : "") + body;
        else
            s += (q < 0 ? " - " : " + ") + body;
        first = false;
    }
    return s;
}

std::string constant_text(const Constant &c) {
    if (c.is_zero())
        return "0";
    const ConstNode *n = c.node();
    if (n->den.empty())
        return poly_text(n->num);
    std::string num = poly_text(n->num);
    if (n->num.size() > 1 || n->num[0].second < 0)
        num = "(" + num + ")";
    return num + "/(" + poly_text(n->den) + ")";
}

} // namespace

// ---------------------------------------------------------------------------
// Constant

Constant::Constant(long v) : Constant(mpq_class(v)) {}

Constant::Constant(const mpq_class &q) {
    if (q != 0) {
        mpq_class c = q;
        c.canonicalize();
        *this = from_mono(CMono{}, std::move(c));
    }
}

namespace {

const mpq_class &rat_ref(const Constant &c) { return c.node()->num[0].second; }

// Result of exact mpq arithmetic is already canonical.
Constant from_canonical(mpq_class q) {
    if (q == 0)
        return Constant();
    return from_mono(CMono{}, std::move(q));
}

} // namespace

Constant Constant::rational(long num, long den) {
    if (den == 0)
        throw domain_error("zero denominator");
    return Constant(mpq_class(num, den));
}

Constant Constant::pi() {
    Atom a;
    a.kind = Atom::Kind::pi;
    return from_atom(std::move(a));
}

bool Constant::is_rational() const {
    if (!node_)
        return true;
    return node_->den.empty() && node_->num.size() == 1 && node_->num[0].first.is_unit();
}

mpq_class Constant::as_rational() const {
    if (!node_)
        return 0;
    return node_->num[0].second;
}

bool Constant::is_one() const { return is_rational() && as_rational() == 1; }

bool Constant::is_integer() const {
    return is_rational() && as_rational().get_den() == 1;
}

Constant Constant::exp(const Constant &c) {
    if (c.is_zero())
        return Constant(1);
    if (has_den(c)) {
        CMono m;
        m.exp_arg = c;
        return from_mono(std::move(m));
    }
    Constant factor(1);
    Poly residual;
    for (const auto &[m, q] : c.node()->num) {
        const bool single = m.exp_arg.is_zero() && m.factors.size() == 1 &&
                            m.factors[0].second == 1 &&
                            m.factors[0].first.kind != Atom::Kind::pi;
        if (!single) {
            residual.emplace_back(m, q);
            continue;
        }
        mpz_class k;
        mpz_fdiv_q(k.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
        mpq_class frac = q - mpq_class(k);
        if (k != 0) {
            if (!k.fits_slong_p())
                throw domain_error("exponent too large");
            const Atom &atom = m.factors[0].first;
            if (atom.kind == Atom::Kind::log_prime) {
                mpz_class p;
                long kk = k.get_si();
                mpz_pow_ui(p.get_mpz_t(), atom.prime.get_mpz_t(), static_cast<unsigned long>(kk < 0 ? -kk : kk));
                factor = factor * (kk < 0 ? Constant(mpq_class(1, 1) / mpq_class(p)) : Constant(mpq_class(p)));
            } else {
                factor = factor * pow_int(atom.arg, k.get_si());
            }
        }
        if (frac != 0)
            residual.emplace_back(m, frac);
    }
    if (residual.empty())
        return factor;
    CMono e;
    e.exp_arg = from_poly(std::move(residual));
    return factor * from_mono(std::move(e));
}

Constant Constant::log(const Constant &c) {
    if (c.is_rational())
        return log_rational(c.as_rational());
    int s = 0;
    try {
        s = c.sign();
    } catch (const zero_test_inconclusive &) {
        throw domain_error("log argument could not be shown positive: " + c.to_string());
    }
    if (s <= 0)
        throw domain_error("log of a non-positive constant: " + c.to_string());
    const ConstNode *n = c.node();
    if (!n->den.empty()) {
        Constant num = from_poly(n->num);
        Constant den = from_poly(n->den);
        if (den.sign() < 0) {
            num = -num;
            den = -den;
        }
        return log(num) - log(den);
    }
    if (n->num.size() == 1) {
        const auto &[m, q] = n->num[0];
        Constant r = log_rational(abs(q));
        for (const auto &[atom, k] : m.factors)
            r = r + Constant(k) * log_abs_atom(atom);
        return r + m.exp_arg;
    }
    mpq_class lc = abs(leading_coef(n->num));
    Atom a;
    a.kind = Atom::Kind::log;
    a.arg = from_poly(poly_scale(n->num, 1 / lc));
    return log_rational(lc) + from_atom(std::move(a));
}

Constant Constant::pow(const Constant &base, const Constant &e) {
    if (e.is_zero())
        return Constant(1);
    if (e.is_integer()) {
        mpz_class k = e.as_rational().get_num();
        if (!k.fits_slong_p())
            throw domain_error("exponent too large");
        return pow_int(base, k.get_si());
    }
    return exp(e * log(base));
}

int Constant::sign() const {
    if (!node_)
        return 0;
    if (is_rational())
        return sgn(as_rational());
    int cached = node_->sign_cache.load(std::memory_order_relaxed);
    if (cached != 2)
        return cached;
    const unsigned max_bits = std::max(64u, current_budget().max_precision);
    for (unsigned bits = 64;; bits *= 2) {
        const unsigned b = std::min(bits, max_bits);
        int s = eval_constant(*this, b).sign();
        if (s != 0) {
            node_->sign_cache.store(s, std::memory_order_relaxed);
            return s;
        }
        if (b >= max_bits)
            break;
    }
    throw zero_test_inconclusive("cannot decide the sign of " + to_string() + " within " +
                                 std::to_string(max_bits) + " bits");
}

Interval Constant::enclose(mpfr_prec_t bits) const { return eval_constant(*this, bits); }

int Constant::structural_compare(const Constant &other) const {
    if (node_ == other.node_)
        return 0;
    if (!node_)
        return -1;
    if (!other.node_)
        return 1;
    if (node_->hash == other.node_->hash) {
        // fall through to a full comparison; equal hashes are not proof
    }
    if (int c = cmp_poly(node_->num, other.node_->num))
        return c;
    return cmp_poly(node_->den, other.node_->den);
}

std::size_t Constant::hash() const { return node_ ? node_->hash : 0; }

std::string Constant::to_string() const { return constant_text(*this); }

bool Constant::needs_parens() const {
    if (!node_)
        return false;
    return !node_->den.empty() || node_->num.size() > 1;
}

bool Constant::looks_negative() const {
    return node_ && node_->num.front().second < 0;
}

Constant operator+(const Constant &a, const Constant &b) {
    if (a.is_zero())
        return b;
    if (b.is_zero())
        return a;
    if (a.is_rational() && b.is_rational())
        return from_canonical(rat_ref(a) + rat_ref(b));
    if (!has_den(a) && !has_den(b))
        return from_poly(poly_add(num_of(a), num_of(b)));
    if (cmp_poly(den_of(a), den_of(b)) == 0)
        return make_fraction(poly_add(num_of(a), num_of(b)), den_of(a));
    Constant n = poly_mul(num_of(a), den_of(b)) + poly_mul(num_of(b), den_of(a));
    Constant d = poly_mul(den_of(a), den_of(b));
    return quotient(n, d);
}

Constant operator-(const Constant &a) {
    if (a.is_zero())
        return a;
    if (!has_den(a))
        return from_poly(poly_scale(num_of(a), -1));
    return make_node(poly_scale(num_of(a), -1), den_of(a));
}

Constant operator-(const Constant &a, const Constant &b) { return a + (-b); }

Constant operator*(const Constant &a, const Constant &b) {
    if (a.is_zero() || b.is_zero())
        return Constant();
    if (a.is_rational() && b.is_rational())
        return from_canonical(rat_ref(a) * rat_ref(b));
    if (a.is_rational())
        return has_den(b) ? make_node(poly_scale(num_of(b), a.as_rational()), den_of(b))
                          : from_poly(poly_scale(num_of(b), a.as_rational()));
    if (b.is_rational())
        return b * a;
    if (!has_den(a) && !has_den(b))
        return poly_mul(num_of(a), num_of(b));
    Constant n = poly_mul(num_of(a), num_of(b));
    Constant d = poly_mul(den_of(a), den_of(b));
    return quotient(n, d);
}

Constant operator/(const Constant &a, const Constant &b) {
    if (b.is_zero())
        throw domain_error("division by zero constant");
    if (a.is_rational() && b.is_rational())
        return Constant(mpq_class(a.as_rational() / b.as_rational()));
    if (b.is_rational())
        return a * Constant(mpq_class(1 / b.as_rational()));
    return a * reciprocal_of(b);
}

std::strong_ordering cmp_const(const Constant &a, const Constant &b) {
    if (a.is_rational() && b.is_rational()) {
        int c = cmp(a.as_rational(), b.as_rational());
        return c < 0 ? std::strong_ordering::less
                     : c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal;
    }
    Constant d = a - b;
    int s = d.sign();
    return s < 0 ? std::strong_ordering::less
                 : s > 0 ? std::strong_ordering::greater : std::strong_ordering::equal;
}

Interval eval_const(const Constant &c, unsigned precision) {
    if (precision < 1)
        throw domain_error("precision must be at least 1 bit");
    const mpfr_prec_t p = std::max<mpfr_prec_t>(precision, MPFR_PREC_MIN);
    if (c.is_rational())
        return Interval::point(c.as_rational(), p);
    const mpfr_prec_t cap = p + 2 * std::max(64u, current_budget().max_precision);
    Interval out(p);
    for (mpfr_prec_t w = p + 32;; w *= 2) {
        Interval raw = eval_constant(c, std::min(w, cap));
        if (raw.valid()) {
            mpfr_t dlo, dhi, ulo, uhi;
            mpfr_inits2(p, dlo, dhi, ulo, uhi, static_cast<mpfr_ptr>(nullptr));
            mpfr_set(dlo, raw.lower(), MPFR_RNDD);
            mpfr_set(dhi, raw.upper(), MPFR_RNDD);
            mpfr_set(ulo, raw.lower(), MPFR_RNDU);
            mpfr_set(uhi, raw.upper(), MPFR_RNDU);
            const bool stable = mpfr_equal_p(dlo, dhi) && mpfr_equal_p(ulo, uhi);
            mpfr_set(out.lower(), dlo, MPFR_RNDD);
            mpfr_set(out.upper(), uhi, MPFR_RNDU);
            mpfr_clears(dlo, dhi, ulo, uhi, static_cast<mpfr_ptr>(nullptr));
            if (stable || w >= cap)
                return out;
        } else if (w >= cap) {
            throw domain_error("constant could not be enclosed: " + c.to_string());
        }
    }
}

// ---------------------------------------------------------------------------
// ConstExpr

struct ConstExpr::Node {
    Kind kind;
    mpq_class value;
    std::vector<ConstExpr> args;
};

ConstExpr ConstExpr::rational(const mpq_class &q) {
    ConstExpr e;
    e.node_ = std::make_shared<const Node>(Node{Kind::rational, q, {}});
    return e;
}

ConstExpr ConstExpr::pi() {
    ConstExpr e;
    e.node_ = std::make_shared<const Node>(Node{Kind::pi, 0, {}});
    return e;
}

#define OMEGA_CONST_EXPR_NODE(name, kind_, ...)                                   \
    ConstExpr ConstExpr::name {                                                   \
        ConstExpr e;                                                              \
        e.node_ = std::make_shared<const Node>(Node{Kind::kind_, 0, {__VA_ARGS__}}); \
        return e;                                                                 \
    }

OMEGA_CONST_EXPR_NODE(add(ConstExpr a, ConstExpr b), add, std::move(a), std::move(b))
OMEGA_CONST_EXPR_NODE(mul(ConstExpr a, ConstExpr b), mul, std::move(a), std::move(b))
OMEGA_CONST_EXPR_NODE(div(ConstExpr a, ConstExpr b), div, std::move(a), std::move(b))
OMEGA_CONST_EXPR_NODE(neg(ConstExpr a), neg, std::move(a))
OMEGA_CONST_EXPR_NODE(exp(ConstExpr a), exp, std::move(a))
OMEGA_CONST_EXPR_NODE(log(ConstExpr a), log, std::move(a))

#undef OMEGA_CONST_EXPR_NODE

ConstExpr::Kind ConstExpr::kind() const { return node_->kind; }
const mpq_class &ConstExpr::value() const { return node_->value; }
const std::vector<ConstExpr> &ConstExpr::args() const { return node_->args; }

std::string ConstExpr::to_string() const {
    const auto &a = node_->args;
    switch (node_->kind) {
    case Kind::rational:
        return node_->value < 0 ? "(" + node_->value.get_str() + ")" : node_->value.get_str();
    case Kind::pi:
        return "pi";
    case Kind::add:
        return "(" + a[0].to_string() + " + " + a[1].to_string() + ")";
    case Kind::mul:
        return "(" + a[0].to_string() + "*" + a[1].to_string() + ")";
    case Kind::div:
        return "(" + a[0].to_string() + "/" + a[1].to_string() + ")";
    case Kind::neg:
        return "(-" + a[0].to_string() + ")";
    case Kind::exp:
        return "exp(" + a[0].to_string() + ")";
    case Kind::log:
        return "log(" + a[0].to_string() + ")";
    }
    return "?";
}

Constant simplify(const ConstExpr &e) {
    const auto &a = e.args();
    switch (e.kind()) {
    case ConstExpr::Kind::rational:
        return Constant(e.value());
    case ConstExpr::Kind::pi:
        return Constant::pi();
    case ConstExpr::Kind::add:
        return simplify(a[0]) + simplify(a[1]);
    case ConstExpr::Kind::mul:
        return simplify(a[0]) * simplify(a[1]);
    case ConstExpr::Kind::div:
        return simplify(a[0]) / simplify(a[1]);
    case ConstExpr::Kind::neg:
        return -simplify(a[0]);
    case ConstExpr::Kind::exp:
        return Constant::exp(simplify(a[0]));
    case ConstExpr::Kind::log:
        return Constant::log(simplify(a[0]));
    }
    return Constant();
}

Interval enclose(const ConstExpr &e, mpfr_prec_t bits) {
    const auto &a = e.args();
    switch (e.kind()) {
    case ConstExpr::Kind::rational:
        return Interval::point(e.value(), bits);
    case ConstExpr::Kind::pi:
        return pi_interval(bits);
    case ConstExpr::Kind::add:
        return enclose(a[0], bits) + enclose(a[1], bits);
    case ConstExpr::Kind::mul:
        return enclose(a[0], bits) * enclose(a[1], bits);
    case ConstExpr::Kind::div:
        return enclose(a[0], bits) * reciprocal(enclose(a[1], bits));
    case ConstExpr::Kind::neg:
        return -enclose(a[0], bits);
    case ConstExpr::Kind::exp:
        return exp(enclose(a[0], bits));
    case ConstExpr::Kind::log:
        return log(enclose(a[0], bits));
    }
    return Interval(bits);
}

namespace {

ConstExpr atom_expr(const Atom &a) {
    switch (a.kind) {
    case Atom::Kind::log_prime:
        return ConstExpr::log(ConstExpr::rational(mpq_class(a.prime)));
    case Atom::Kind::pi:
        return ConstExpr::pi();
    case Atom::Kind::log:
        return ConstExpr::log(to_expr(a.arg));
    }
    return ConstExpr::pi();
}

ConstExpr poly_expr(const Poly &p) {
    std::optional<ConstExpr> sum;
    for (const auto &[m, q] : p) {
        ConstExpr term = ConstExpr::rational(q);
        for (const auto &[atom, k] : m.factors) {
            ConstExpr f = atom_expr(atom);
            for (long i = 0; i < (k < 0 ? -k : k); ++i)
                term = k < 0 ? ConstExpr::div(term, f) : ConstExpr::mul(term, f);
        }
        if (!m.exp_arg.is_zero())
            term = ConstExpr::mul(term, ConstExpr::exp(to_expr(m.exp_arg)));
        sum = sum ? ConstExpr::add(*sum, term) : term;
    }
    return sum ? *sum : ConstExpr::rational(0);
}

} // namespace

ConstExpr to_expr(const Constant &c) {
    if (c.is_zero())
        return ConstExpr::rational(0);
    ConstExpr n = poly_expr(c.node()->num);
    if (c.node()->den.empty())
        return n;
    return ConstExpr::div(n, poly_expr(c.node()->den));
}

} // namespace omega
