#include "omega/verify.hpp"

#include <algorithm>
#include <atomic>
#include <functional>
#include <random>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "omega/error.hpp"
#include "omega/expr.hpp"

namespace omega {

namespace {

using Rel = DominanceRel::Relation;
using Inputs = std::vector<std::pair<std::string, std::string>>;

// ---------------------------------------------------------------------------
// Seeding

std::uint64_t splitmix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t name_hash(const std::string &s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s)
        h = (h ^ c) * 0x100000001b3ULL;
    return h;
}

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t salt, std::uint64_t trial,
                         std::uint64_t stream) {
    std::uint64_t z = splitmix(seed);
    z = splitmix(z ^ salt);
    z = splitmix(z ^ trial);
    z = splitmix(z ^ (stream * 0x632be59bd9b4e019ULL));
    return std::mt19937_64(z);
}

// ---------------------------------------------------------------------------
// Generation. Pieces carry the value next to the text it was built from.

struct Piece {
    Series v;
    std::string t;
};

std::string rat_text(const mpq_class &q) { return q.get_str(); }

std::string exponent_text(const mpq_class &q) {
    if (q.get_den() == 1)
        return q.get_str();
    return "(" + q.get_str() + ")";
}

std::string atom_text(unsigned n) {
    if (n == 0)
        return "x";
    if (n == 1)
        return "log(x)";
    return "log^" + std::to_string(n) + "(x)";
}

std::string coef_times(const mpq_class &c, const std::string &m) {
    if (m == "1")
        return rat_text(c);
    if (c == 1)
        return m;
    if (c == -1)
        return "-" + m;
    return rat_text(c) + "*" + m;
}

std::string join_sum(const std::vector<std::string> &terms) {
    std::string s;
    for (const auto &t : terms) {
        if (s.empty())
            s = t;
        else if (t[0] == '-')
            s += " - " + t.substr(1);
        else
            s += " + " + t;
    }
    return s.empty() ? "0" : s;
}

int mono_class(const Series &m) {
    auto c = cmp_monomial(leading_term(m).mono, Monomial());
    return c > 0 ? 1 : c < 0 ? -1 : 0;
}

class Gen {
public:
    Gen(const GenProfile &p, std::mt19937_64 rng) : p_(p), rng_(std::move(rng)) {}

    unsigned pick(unsigned n) { return static_cast<unsigned>(rng_() % n); }
    bool coin(unsigned num, unsigned den) { return pick(den) < num; }
    const mpq_class &coef() { return p_.coefficients[pick(p_.coefficients.size())]; }
    const mpq_class &expo() { return p_.exponents[pick(p_.exponents.size())]; }
    // Biased towards shallow towers: 0 half the time, then 1, then 2.
    unsigned depth() {
        static const unsigned bias[] = {0, 0, 0, 1, 1, 2};
        return std::min(bias[pick(6)], p_.max_exp_depth);
    }

    // Monomial built from log atoms and at most one exp factor.
    Piece monomial(unsigned depth) {
        Word w;
        std::vector<std::string> factors;
        // Inside exp arguments monomials use a single atom: products such as
        // x*log(x) there make composed exponents carry infinitely many
        // infinite terms, which no finite enumeration can split.
        const unsigned nfac = in_exp_ ? 1 : 1 + pick(std::min(2u, p_.max_generators));
        static const unsigned log_bias[] = {0, 0, 0, 1, 1, 2, 3};
        for (unsigned i = 0; i < nfac; ++i) {
            unsigned n = log_bias[pick(7)];
            n = std::min(n, p_.max_log_index);
            if (std::any_of(w.begin(), w.end(), [&](const auto &q) { return q.first == n; }))
                continue;
            const mpq_class &a = expo();
            w.emplace_back(n, Constant(a));
            factors.push_back(a == 1 ? atom_text(n) : atom_text(n) + "^" + exponent_text(a));
        }
        Series expo;
        if (depth > 0 && coin(1, 3)) {
            ++in_exp_;
            Piece g = j_positive(depth - 1, depth > 1 ? 1 : 2);
            --in_exp_;
            if (coin(1, 2)) {
                expo = g.v;
                factors.push_back("exp(" + g.t + ")");
            } else {
                expo = -g.v;
                factors.push_back("exp(-(" + g.t + "))");
            }
        }
        std::string t;
        for (const auto &f : factors)
            t += (t.empty() ? "" : "*") + f;
        return Piece{Series::monomial(Monomial::make(std::move(w), expo)), t.empty() ? "1" : t};
    }

    // Monomial on a given side of 1 (sign 1 above, -1 below).
    Piece monomial_side(unsigned depth, int side) {
        for (int tries = 0; tries < 12; ++tries) {
            Piece m = monomial(depth);
            if (mono_class(m.v) == side)
                return m;
        }
        return side > 0 ? Piece{Series::x(), "x"} : Piece{invert(Series::x()), "x^-1"};
    }

    // j_positive built from single-atom monomials, so that its compositions
    // keep finitely many infinite terms.
    Piece j_simple(unsigned depth, unsigned max_terms) {
        ++in_exp_;
        Piece p = j_positive(depth, max_terms);
        --in_exp_;
        return p;
    }

    // Purely infinite with a positive leading coefficient.
    Piece j_positive(unsigned depth, unsigned max_terms) {
        const unsigned k = 1 + pick(std::max(1u, std::min(max_terms, p_.max_terms)));
        std::vector<std::string> texts;
        Series v;
        for (unsigned i = 0; i < k; ++i) {
            Piece m = monomial_side(depth, 1);
            const mpq_class &c = coef();
            v = v + scale(m.v, Constant(c));
            texts.push_back(coef_times(c, m.t));
        }
        if (v.is_zero())
            return Piece{Series::x(), "x"};
        std::string t = join_sum(texts);
        if (leading_term(v).coef.sign() < 0)
            return Piece{-v, "-(" + t + ")"};
        return Piece{v, t};
    }

    // c * m * tail with tail an infinite series in an infinitesimal monomial.
    Piece infinite_piece(int side) {
        Piece u = monomial_side(std::min(depth(), 1u), -1);
        Piece m = side == 0 ? Piece{Series(1), "1"} : monomial_side(depth(), side);
        const mpq_class &c = coef();
        Series tail;
        std::string tt;
        if (coin(1, 2)) {
            tail = invert(Series(1) - u.v);
            tt = "1/(1 - " + u.t + ")";
        } else {
            tail = exp_series(u.v);
            tt = "exp(" + u.t + ")";
        }
        return Piece{scale(m.v * tail, Constant(c)), coef_times(c, m.t == "1" ? "(" + tt + ")" : m.t + "*(" + tt + ")")};
    }

    Piece sum_of(unsigned k, int side, bool allow_const, bool allow_tail) {
        std::vector<std::string> texts;
        Series v;
        for (unsigned i = 0; i < k; ++i) {
            if (allow_const && coin(1, 6)) {
                const mpq_class &c = coef();
                v = v + Series(Constant(c));
                texts.push_back(rat_text(c));
                continue;
            }
            const int s = side != 0 ? side : (coin(1, 2) ? 1 : -1);
            Piece m = monomial_side(depth(), s);
            const mpq_class &c = coef();
            v = v + scale(m.v, Constant(c));
            texts.push_back(coef_times(c, m.t));
        }
        if (allow_tail && coin(1, 5)) {
            Piece p = infinite_piece(side < 0 ? -1 : (coin(1, 2) ? 0 : -1));
            v = v + p.v;
            texts.push_back(p.t);
        }
        return Piece{v, join_sum(texts)};
    }

    Piece any() { return sum_of(1 + pick(p_.max_terms), 0, true, true); }
    Piece infinitesimal() { return sum_of(1 + pick(std::min(3u, p_.max_terms)), -1, false, true); }

    Piece above_reals() {
        // Kept short: arguments of compositions drive the cost of every
        // checker that uses them.
        Piece j = j_positive(std::min(depth(), 1u), 2);
        std::string t = j.t;
        Series v = j.v;
        if (coin(1, 3)) {
            const mpq_class &c = coef();
            v = v + Series(Constant(c));
            t = join_sum({t, rat_text(c)});
        }
        if (coin(1, 4)) {
            Piece e = monomial_side(0, -1);
            const mpq_class &c = coef();
            v = v + scale(e.v, Constant(c));
            t = join_sum({t, coef_times(c, e.t)});
        }
        return Piece{v, t};
    }

    // Positive series of any order of magnitude.
    Piece positive() {
        Piece m = monomial(depth());
        const mpq_class c = abs(coef());
        std::string t = coef_times(c, m.t);
        Series v = scale(m.v, Constant(c));
        if (coin(1, 3)) {
            Piece low = monomial_side(depth(), -1);
            const mpq_class &c2 = coef();
            v = v + scale(m.v * low.v, Constant(c2));
            t = join_sum({t, coef_times(c2, "(" + m.t + ")*" + low.t)});
        }
        return Piece{v, t};
    }

private:
    const GenProfile &p_;
    std::mt19937_64 rng_;
    unsigned in_exp_ = 0;
};

bool has_shape(const Series &v, Shape shape) {
    switch (shape) {
    case Shape::any:
        return true;
    case Shape::purely_infinite_positive: {
        if (v.is_zero() || !v.is_finite())
            return false;
        SeriesSplit s = split(v);
        return s.constant.is_zero() && s.infinitesimal.is_zero() && sign(v) > 0;
    }
    case Shape::above_reals: {
        auto t = v.term(0);
        return t && cmp_monomial(t->mono, Monomial()) > 0 && t->coef.sign() > 0;
    }
    case Shape::infinitesimal: {
        auto t = v.term(0);
        return t && cmp_monomial(t->mono, Monomial()) < 0;
    }
    }
    return false;
}

Piece gen_piece(Gen &g, Shape shape) {
    switch (shape) {
    case Shape::any:
        return g.any();
    case Shape::purely_infinite_positive:
        return g.j_simple(g.depth(), 3);
    case Shape::above_reals:
        return g.above_reals();
    case Shape::infinitesimal:
        return g.infinitesimal();
    }
    return g.any();
}

const char *fallback_text(Shape shape) {
    switch (shape) {
    case Shape::any:
    case Shape::purely_infinite_positive:
    case Shape::above_reals:
        return "x";
    case Shape::infinitesimal:
        return "x^-1";
    }
    return "x";
}

/// flat drops exp factors; used where the checker exponentiates a
/// composition.
Sample sample(const GenProfile &profile, std::uint64_t salt, std::uint64_t trial, Shape shape,
              std::uint64_t stream, bool flat = false) {
    GenProfile q = profile;
    if (flat)
        q.max_exp_depth = 0;
    for (std::uint64_t attempt = 0; attempt < 8; ++attempt) {
        Gen g(q, make_rng(profile.seed, salt, trial, stream * 16 + attempt));
        try {
            Piece p = gen_piece(g, shape);
            // The returned value is the elaboration of the text, so replays
            // see exactly the same series.
            Series v = read_series(p.t);
            if (has_shape(v, shape))
                return Sample{v, p.t};
        } catch (const error &) {
        }
    }
    return Sample{read_series(fallback_text(shape)), fallback_text(shape)};
}

// ---------------------------------------------------------------------------
// Comparison helpers

Verdict pass(std::vector<std::string> branches = {}) {
    return Verdict{Outcome::pass, {}, std::move(branches)};
}
Verdict fail(std::string why) { return Verdict{Outcome::fail, std::move(why), {}}; }
Verdict skip(std::string why) { return Verdict{Outcome::skip, std::move(why), {}}; }

Monomial x_pow(long k) { return Monomial::x().pow(Constant(k)); }

/// A monomial below the first n terms of ref. When d is given the bound is
/// raised to at least lead(ref) d^4, so that cancelling powers of an
/// infinitesimal led by d are only chased a few steps.
Monomial cutoff(const Series &ref, std::size_t n, const std::optional<Monomial> &d = {}) {
    Enumeration e = ref.enumerate(n + 1);
    Monomial b;
    if (e.terms.size() > n)
        b = e.terms[n].mono;
    else if (e.terms.empty())
        return x_pow(-static_cast<long>(n));
    else
        b = e.terms.back().mono * x_pow(-static_cast<long>(n));
    if (d) {
        Monomial floor = e.terms[0].mono * d->pow(Constant(4));
        if (cmp_monomial(floor, b) > 0)
            return floor;
    }
    return b;
}

/// Leading monomial of the infinitesimal part, if any.
std::optional<Monomial> small_lead(const Series &f) {
    if (f.is_zero())
        return std::nullopt;
    const Series &e = split(f).infinitesimal;
    if (e.is_zero())
        return std::nullopt;
    return leading_term(e).mono;
}

/// Leading monomial of f / lead(f) - 1, if any.
std::optional<Monomial> relative_lead(const Series &f) {
    Enumeration e = f.enumerate(2);
    if (e.terms.size() < 2)
        return std::nullopt;
    return e.terms[1].mono / e.terms[0].mono;
}

std::optional<Monomial> larger(const std::optional<Monomial> &a, const std::optional<Monomial> &b) {
    if (!a)
        return b;
    if (!b)
        return a;
    return cmp_monomial(*a, *b) >= 0 ? a : b;
}

/// a and b have the same terms above bound.
bool agree_above(const Series &a, const Series &b, const Monomial &bound) {
    for (std::size_t i = 0;; ++i) {
        auto ta = a.term_above(i, bound);
        auto tb = b.term_above(i, bound);
        if (!ta && !tb)
            return true;
        if (!ta || !tb)
            return false;
        if (cmp_monomial(ta->mono, tb->mono) != 0 || cmp_const(ta->coef, tb->coef) != 0)
            return false;
    }
}

/// Dominance where zero is below everything else.
Rel rel0(const Series &a, const Series &b) {
    const bool za = a.is_zero(), zb = b.is_zero();
    if (za && zb)
        return Rel::asymp;
    if (za)
        return Rel::prec;
    if (zb)
        return Rel::succ;
    return dominance(a, b).relation;
}

bool above_reals(const Series &g) {
    auto t = g.term(0);
    return t && cmp_monomial(t->mono, Monomial()) > 0 && t->coef.sign() > 0;
}

bool purely_infinite_positive(const Series &g) {
    if (g.is_zero() || sign(g) <= 0)
        return false;
    SeriesSplit s = split(g);
    return s.constant.is_zero() && s.infinitesimal.is_zero();
}

std::optional<Verdict> premise_xy(const Series &x, const Series &y) {
    if (!above_reals(y))
        return skip("y is not above the reals");
    if (compare(x, y) <= 0)
        return skip("x is not above y");
    return std::nullopt;
}

std::string series_text(const Series &s) { return s.to_string(4); }

// ---------------------------------------------------------------------------
// Iterated derivative estimates

Verdict iter_der_dagger(const Series &f) {
    const std::vector<Term> leads = derivative_leads(f, 10);
    auto lead_der = [&](unsigned k) {
        if (k >= leads.size())
            throw budget_exhausted("a derivative of f vanished");
        return leads[k];
    };
    const Term lf = leading_term(f);
    if (asymp_power_of_x(f, 16)) {
        // f ~ c x^k: each derivative divides by x until the constant.
        const Constant &a = lf.mono.is_one() ? Constant() : lf.mono.word()[0].second;
        const long k = a.is_zero() ? 0 : a.as_rational().get_num().get_si();
        for (long j = 0; j < std::min<long>(k, 3); ++j) {
            Term hi = lead_der(static_cast<unsigned>(j + 1)), lo = lead_der(static_cast<unsigned>(j));
            if (cmp_monomial(hi.mono, lo.mono * x_pow(-1)) != 0)
                return fail("f^(" + std::to_string(j + 1) + ") is not asymptotic to f^(" +
                            std::to_string(j) + ")/x");
        }
        return pass({"power"});
    }
    const Term lf1 = lead_der(1);
    const Monomial dag = lf1.mono / lf.mono;
    const Constant dag_c = lf1.coef / lf.coef;
    if (cmp_monomial(dag, x_pow(-1)) > 0) {
        for (unsigned n = 0; n <= 4; ++n) {
            Term lhs = lead_der(n + 1);
            Monomial rm = dag.pow(Constant(static_cast<long>(n + 1))) * lf.mono;
            Constant rc = Constant::pow(dag_c, Constant(static_cast<long>(n + 1))) * lf.coef;
            if (cmp_monomial(lhs.mono, rm) != 0 || cmp_const(lhs.coef, rc) != 0)
                return fail("f^(" + std::to_string(n + 1) + ") is not similar to (f^dagger)^" +
                            std::to_string(n + 1) + " f");
        }
        return pass({"large_dagger"});
    }
    for (unsigned l = 0; l <= 6; ++l) {
        bool ok = true;
        const Term fl = lead_der(l);
        for (unsigned n = l; n <= l + 3 && ok; ++n) {
            Term lhs = lead_der(n + 1);
            const long gap = static_cast<long>(n - l + 1);
            ok = cmp_monomial(lhs.mono, fl.mono * x_pow(-gap)) == 0 &&
                 cmp_monomial(lhs.mono, lf.mono * x_pow(-static_cast<long>(n + 1))) <= 0;
        }
        if (ok)
            return pass({"small_dagger"});
    }
    return fail("no l <= 6 gives f^(n+1) ~ f^(l)/x^(n-l+1) <= f/x^(n+1) for n = l..l+3");
}

// ---------------------------------------------------------------------------
// Checker registry

struct CheckerDef {
    std::string name;
    std::vector<std::string> inputs;
    std::function<Inputs(const GenProfile &, std::uint64_t)> gen;
    std::function<Verdict(const std::vector<Series> &, const Inputs &, unsigned)> run;
};

// x = y + d with y above the reals and d positive.
std::pair<std::string, std::string> gen_xy(const GenProfile &p, std::uint64_t salt,
                                           std::uint64_t trial) {
    // d = c lead(y) v with v ~ 1, v > 1 or v a small power of x and log(x),
    // which keeps the cancellation in f o x - f o y finite in most trials.
    Sample y = sample(p, salt, trial, Shape::above_reals, 10);
    Gen g(p, make_rng(p.seed, salt, trial, 11));
    const mpq_class c = abs(g.coef());
    std::string v;
    switch (g.pick(6)) {
    case 0:
    case 1:
    case 2:
        v = "1";
        break;
    case 3:
    case 4:
        v = g.monomial_side(std::min(g.depth(), 1u), 1).t;
        break;
    default:
        // A pure power of x: log-scale ratios here would give x o y
        // infinitely many infinite terms.
        v = "x^-" + exponent_text(abs(g.expo()));
    }
    const std::string lead = Series::monomial(leading_term(y.value).mono).to_string();
    return {"(" + y.text + ") + " + coef_times(c, "(" + lead + ")*" + v), y.text};
}

std::string non_power(const GenProfile &p, std::uint64_t salt, std::uint64_t trial) {
    Sample f = sample(p, salt, trial, Shape::any, 0);
    for (std::uint64_t s = 1; s < 6 && asymp_power_of_x(f.value, p.k_max); ++s)
        f = sample(p, salt, trial, Shape::any, 100 + s);
    return f.text;
}

Monomial lead_mono(const Series &s) { return leading_term(s).mono; }

std::string mono_text(const Monomial &m, const mpq_class &c) {
    return Series::monomial(m, Constant(c)).to_string();
}

const std::vector<CheckerDef> &registry() {
    static const std::vector<CheckerDef> defs = [] {
        std::vector<CheckerDef> d;
        d.push_back({"algebra",
                     {"f", "g", "h"},
                     [](const GenProfile &p, std::uint64_t t) {
                         const auto salt = name_hash("algebra");
                         return Inputs{{"f", sample(p, salt, t, Shape::any, 0).text},
                                       {"g", sample(p, salt, t, Shape::any, 1).text},
                                       {"h", sample(p, salt, t, Shape::any, 2).text}};
                     },
                     [](const std::vector<Series> &s, const Inputs &, unsigned) {
                         return check_algebra(s[0], s[1], s[2]);
                     }});
        d.push_back({"derivation",
                     {"f", "g", "u"},
                     [](const GenProfile &p, std::uint64_t t) {
                         const auto salt = name_hash("derivation");
                         return Inputs{{"f", sample(p, salt, t, Shape::any, 0).text},
                                       {"g", sample(p, salt, t, Shape::above_reals, 1).text},
                                       {"u", sample(p, salt, t, Shape::infinitesimal, 2).text}};
                     },
                     [](const std::vector<Series> &s, const Inputs &, unsigned) {
                         return check_derivation_laws(s[0], s[1], s[2]);
                     }});
        d.push_back({"monotonicity",
                     {"f", "x", "y"},
                     [](const GenProfile &p, std::uint64_t t) {
                         const auto salt = name_hash("monotonicity");
                         auto [x, y] = gen_xy(p, salt, t);
                         return Inputs{{"f", sample(p, salt, t, Shape::any, 0).text}, {"x", x}, {"y", y}};
                     },
                     [](const std::vector<Series> &s, const Inputs &, unsigned) {
                         return check_monotonicity(s[0], s[1], s[2]);
                     }});
        d.push_back({"monotonicity_j",
                     {"gamma", "x", "y"},
                     [](const GenProfile &p, std::uint64_t t) {
                         const auto salt = name_hash("monotonicity_j");
                         auto [x, y] = gen_xy(p, salt, t);
                         return Inputs{
                             {"gamma", sample(p, salt, t, Shape::purely_infinite_positive, 0).text},
                             {"x", x},
                             {"y", y}};
                     },
                     [](const std::vector<Series> &s, const Inputs &, unsigned) {
                         return check_monotonicity_J(s[0], s[1], s[2]);
                     }});
        d.push_back({"gap",
                     {"f", "g", "x", "y"},
                     [](const GenProfile &p, std::uint64_t t) {
                         const auto salt = name_hash("gap");
                         auto [x, y] = gen_xy(p, salt, t);
                         Gen g(p, make_rng(p.seed, salt, t, 12));
                         Sample f = sample(p, salt, t, Shape::any, 0, g.coin(1, 2));
                         std::string ft = f.text;
                         if (f.value.is_zero() || lead_mono(f.value).is_one())
                             ft = "(" + ft + ")*x";
                         std::string gt;
                         switch (g.pick(3)) {
                         case 0:
                             gt = rat_text(g.coef());
                             break;
                         case 1:
                             gt = "(" + ft + ")*(" + sample(p, salt, t, Shape::infinitesimal, 1).text + ")";
                             break;
                         default: {
                             // An independent g, resampled until it lies below f.
                             const Series fv = read_series(ft);
                             gt = "(" + ft + ")*(" + sample(p, salt, t, Shape::infinitesimal, 1).text + ")";
                             for (std::uint64_t k = 2; k < 8; ++k) {
                                 Sample c = sample(p, salt, t, Shape::any, k);
                                 if (rel0(c.value, fv) == Rel::prec) {
                                     gt = c.text;
                                     break;
                                 }
                             }
                         }
                         }
                         return Inputs{{"f", ft}, {"g", gt}, {"x", x}, {"y", y}};
                     },
                     [](const std::vector<Series> &s, const Inputs &, unsigned) {
                         return check_gap(s[0], s[1], s[2], s[3]);
                     }});
        d.push_back({"gap_j",
                     {"gamma", "delta", "x", "y"},
                     [](const GenProfile &p, std::uint64_t t) {
                         const auto salt = name_hash("gap_j");
                         auto [x, y] = gen_xy(p, salt, t);
                         Sample a = sample(p, salt, t, Shape::purely_infinite_positive, 0, true);
                         Sample b = sample(p, salt, t, Shape::purely_infinite_positive, 1, true);
                         std::string gamma, delta;
                         Gen g(p, make_rng(p.seed, salt, t, 12));
                         if (g.coin(1, 2)) {
                             // gamma = delta + a positive purely infinite part.
                             gamma = "(" + a.text + ") + (" + b.text + ")";
                             delta = a.text;
                         } else if (compare(a.value, b.value) >= 0) {
                             gamma = a.text;
                             delta = b.text;
                         } else {
                             gamma = b.text;
                             delta = a.text;
                         }
                         return Inputs{{"gamma", gamma}, {"delta", delta}, {"x", x}, {"y", y}};
                     },
                     [](const std::vector<Series> &s, const Inputs &, unsigned) {
                         return check_gap_J(s[0], s[1], s[2], s[3]);
                     }});
        for (const char *name : {"weak_mvp", "small_gaps"}) {
            const std::string n = name;
            d.push_back({n,
                         {"gamma", "x", "y"},
                         [n](const GenProfile &p, std::uint64_t t) {
                             const auto salt = name_hash(n);
                             auto [x, y] = gen_xy(p, salt, t);
                             Gen g(p, make_rng(p.seed, salt, t, 13));
                             if (n == "weak_mvp" && g.coin(1, 2)) {
                                 // x - y ~ v / (gamma' o y) with v <= 1 reaches the
                                 // branch where gamma o x - gamma o y <= 1.
                                 Sample gamma = sample(p, salt, t, Shape::purely_infinite_positive, 0, true);
                                 Sample ys = sample(p, salt, t, Shape::above_reals, 10);
                                 Monomial m = lead_mono(compose(derive(gamma.value), ys.value)).inverse();
                                 if (g.coin(1, 2))
                                     m = m * x_pow(-1 - static_cast<long>(g.pick(2)));
                                 const std::string d = mono_text(m, abs(g.coef()));
                                 return Inputs{{"gamma", gamma.text},
                                               {"x", "(" + ys.text + ") + " + d},
                                               {"y", ys.text}};
                             }
                             return Inputs{
                                 {"gamma", sample(p, salt, t, Shape::purely_infinite_positive, 0,
                                                  n == "small_gaps")
                                               .text},
                                 {"x", x},
                                 {"y", y}};
                         },
                         [n](const std::vector<Series> &s, const Inputs &, unsigned) {
                             return n == "weak_mvp" ? check_weak_mvp(s[0], s[1], s[2])
                                                    : check_small_gaps(s[0], s[1], s[2]);
                         }});
        }
        d.push_back({"taylor",
                     {"f", "x", "delta", "n"},
                     [](const GenProfile &p, std::uint64_t t) {
                         const auto salt = name_hash("taylor");
                         std::string ft = non_power(p, salt, t);
                         Series f = read_series(ft);
                         // Arguments with a leading coefficient other than 1
                         // put log(c) into log o x, and the remainder then
                         // cancels through infinitely many powers of 1/log;
                         // most trials use x or x + c.
                         Gen g(p, make_rng(p.seed, salt, t, 12));
                         std::string xt;
                         switch (g.pick(6)) {
                         case 0:
                         case 1:
                             xt = "x";
                             break;
                         case 2:
                         case 3:
                             xt = join_sum({"x", rat_text(g.coef())});
                             break;
                         case 4:
                             xt = join_sum({"x", coef_times(g.coef(), "x^-" + exponent_text(abs(g.expo())))});
                             break;
                         default:
                             xt = sample(p, salt, t, Shape::above_reals, 1).text;
                         }
                         const Series x = read_series(xt);
                         // delta = c min(1/h, lead(x)) / lead(x) v with h = f^dagger o x
                         // and v <= 1, so that h delta < 1 and delta < x.
                         const Monomial lx = lead_mono(x);
                         const Monomial h_inv = lead_mono(compose(dagger(f), x)).inverse();
                         Monomial m = (cmp_monomial(h_inv, lx) < 0 ? h_inv : lx) / lx;
                         if (g.coin(1, 2))
                             m = m * lead_mono(g.monomial_side(0, -1).v);
                         const std::string n = std::to_string(g.pick(4));
                         return Inputs{{"f", ft}, {"x", xt}, {"delta", mono_text(m, g.coef())}, {"n", n}};
                     },
                     [](const std::vector<Series> &s, const Inputs &in, unsigned k_max) {
                         return check_taylor_suite(s[0], s[1], s[2],
                                                   static_cast<unsigned>(std::stoul(in[3].second)), k_max);
                     }});
        d.push_back({"radius_negative",
                     {"f", "x", "delta"},
                     [](const GenProfile &p, std::uint64_t t) {
                         const auto salt = name_hash("radius_negative");
                         std::string ft = non_power(p, salt, t);
                         Sample x = sample(p, salt, t, Shape::above_reals, 1);
                         Series f = read_series(ft);
                         Gen g(p, make_rng(p.seed, salt, t, 12));
                         // Violates delta < x or (f^dagger o x) delta < 1.
                         Monomial m;
                         if (g.coin(1, 2))
                             m = lead_mono(x.value);
                         else
                             m = lead_mono(compose(dagger(f), x.value)).inverse();
                         if (g.coin(1, 2))
                             m = m * lead_mono(g.monomial_side(g.depth(), 1).v);
                         return Inputs{{"f", ft}, {"x", x.text}, {"delta", mono_text(m, g.coef())}};
                     },
                     [](const std::vector<Series> &s, const Inputs &, unsigned k_max) {
                         return check_radius_negative(s[0], s[1], s[2], k_max);
                     }});
        d.push_back({"exp_rank",
                     {"f", "g"},
                     [](const GenProfile &p, std::uint64_t t) {
                         const auto salt = name_hash("exp_rank");
                         Inputs in;
                         for (std::uint64_t k = 0; k < 2; ++k) {
                             Gen g(p, make_rng(p.seed, salt, t, 20 + k));
                             std::string text;
                             if (g.coin(1, 3)) {
                                 text = atom_text(g.pick(p.max_log_index + 1));
                             } else {
                                 Gen h(p, make_rng(p.seed, salt, t, 30 + k));
                                 text = h.sum_of(1 + h.pick(4), 0, true, false).t;
                             }
                             in.emplace_back(k == 0 ? "f" : "g", text);
                         }
                         return in;
                     },
                     [](const std::vector<Series> &s, const Inputs &, unsigned) {
                         return check_exp_rank(s[0], s[1]);
                     }});
        return d;
    }();
    return defs;
}

const CheckerDef &find_checker(const std::string &name) {
    for (const auto &d : registry())
        if (d.name == name)
            return d;
    throw domain_error("unknown checker '" + name + "'");
}

Verdict guarded(const std::function<Verdict()> &body) {
    try {
        return body();
    } catch (const limit_error &e) {
        return Verdict{Outcome::budget, e.what(), {}};
    } catch (const ElaborateError &e) {
        return Verdict{e.is_limit() ? Outcome::budget : Outcome::skip, e.what(), {}};
    } catch (const error &e) {
        return Verdict{Outcome::skip, e.what(), {}};
    } catch (const std::exception &e) {
        return Verdict{Outcome::fail, std::string("internal error: ") + e.what(), {}};
    }
}

} // namespace

// ---------------------------------------------------------------------------
// Public generation

Sample gen_series(const GenProfile &profile, std::uint64_t trial, Shape shape, std::uint64_t stream) {
    return sample(profile, 0, trial, shape, stream);
}

std::string to_string(Outcome o) {
    switch (o) {
    case Outcome::pass: return "pass";
    case Outcome::fail: return "fail";
    case Outcome::skip: return "skip";
    case Outcome::budget: return "budget";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Checkers

Verdict check_algebra(const Series &f, const Series &g, const Series &h) {
    constexpr std::size_t N = 10;
    auto same = [&](const Series &a, const Series &b, const Series &ref) {
        return agree_above(a, b, cutoff(ref, N));
    };
    if (!same((f + g) + h, f + (g + h), f + (g + h)))
        return fail("addition is not associative");
    if (!same(f + g, g + f, g + f))
        return fail("addition is not commutative");
    if (!same((f * g) * h, f * (g * h), f * (g * h)))
        return fail("multiplication is not associative");
    if (!same(f * g, g * f, g * f))
        return fail("multiplication is not commutative");
    if (!same(f * (g + h), f * g + f * h, f * g + f * h))
        return fail("multiplication does not distribute over addition");
    if (!same(f + (-f), Series(), f))
        return fail("f - f is not zero");
    std::vector<std::string> branches;
    if (!f.is_zero()) {
        Series inv = invert(f);
        if (!agree_above(f * inv, Series(1), leading_term(f).mono * cutoff(inv, N)))
            return fail("f * invert(f) is not 1");
        const int sf = sign(f), sg = g.is_zero() ? 0 : sign(g);
        if (sg != 0 && sign(f * g) != sf * sg)
            return fail("sign of a product is not the product of signs");
    }
    const auto c = compare(f, g);
    if (c != 0 && compare(f + h, g + h) != c)
        return fail("order is not compatible with addition");
    const auto df = small_lead(f);
    if (!agree_above(log_series(exp_series(f)), f, cutoff(f, N, larger(df, relative_lead(exp_series(f))))))
        return fail("log(exp(f)) differs from f");
    if (!f.is_zero()) {
        const Series p = sign(f) > 0 ? f : -f;
        if (!agree_above(exp_series(log_series(p)), p, cutoff(p, N, relative_lead(p))))
            return fail("exp(log(f)) differs from f");
        branches.push_back("exp_log");
    }
    const Series eg = exp_series(f) * exp_series(g);
    if (!agree_above(exp_series(f + g), eg, cutoff(eg, N, larger(df, small_lead(g)))))
        return fail("exp(f + g) differs from exp(f) exp(g)");
    return pass(branches);
}

Verdict check_derivation_laws(const Series &f, const Series &g, const Series &u) {
    constexpr std::size_t N = 10;
    if (!above_reals(g))
        return skip("g is not above the reals");
    if (!u.is_zero() && cmp_monomial(leading_term(u).mono, Monomial()) >= 0)
        return skip("u is not infinitesimal");
    auto same = [&](const Series &a, const Series &b) { return agree_above(a, b, cutoff(b, N)); };
    const Series df = derive(f), dg = derive(g);
    if (!same(derive(f + g), df + dg))
        return fail("derivation is not additive");
    if (!same(derive(f * g), df * g + f * dg))
        return fail("Leibniz rule fails");
    if (!same(derive(compose(f, g)), compose(df, g) * dg))
        return fail("chain rule fails");

    // H-field implications on F with 1 not asymptotic to F.
    Series F = f;
    if (F.is_zero())
        F = Series::x();
    else if (leading_term(F).mono.is_one())
        F = F * Series::x();
    const Series dF = derive(F);
    const Series G1 = F * u;
    if (!u.is_zero() && rel0(dF, derive(G1)) != Rel::succ)
        return fail("f > g but f' is not > g'");
    const Series G2 = scale(F, Constant(2)) + F * u;
    if (rel0(dF, derive(G2)) == Rel::prec)
        return fail("f >= g but f' is not >= g'");
    const Series G3 = F + F * u;
    if (!dominance(dF, derive(G3)).similar)
        return fail("f ~ g but f' is not ~ g'");
    if (rel0(derive(u), Series(1)) != Rel::prec)
        return fail("u < 1 but u' is not < 1");
    if (sign(dg) <= 0)
        return fail("g > R but g' is not positive");

    return iter_der_dagger(F);
}

Verdict check_monotonicity(const Series &f, const Series &x, const Series &y) {
    if (auto s = premise_xy(x, y))
        return *s;
    const Series df = derive(f);
    const int want = df.is_zero() ? 0 : sign(df);
    const Series diff = compose(f, x) - compose(f, y);
    const int got = diff.is_zero() ? 0 : sign(diff);
    if (got != want)
        return fail("sign(f o x - f o y) = " + std::to_string(got) + " but sign(f') = " +
                    std::to_string(want));
    return pass({want > 0 ? "increasing" : want < 0 ? "decreasing" : "constant"});
}

Verdict check_monotonicity_J(const Series &gamma, const Series &x, const Series &y) {
    if (!purely_infinite_positive(gamma))
        return skip("gamma is not a positive purely infinite series");
    if (auto s = premise_xy(x, y))
        return *s;
    if (compare(compose(gamma, x), compose(gamma, y)) <= 0)
        return fail("gamma o x is not above gamma o y");
    return pass();
}

Verdict check_gap(const Series &f, const Series &g, const Series &x, const Series &y) {
    if (f.is_zero() || leading_term(f).mono.is_one())
        return skip("f is asymptotic to a constant");
    if (rel0(g, f) != Rel::prec)
        return skip("g is not dominated by f");
    if (auto s = premise_xy(x, y))
        return *s;
    const Series L = compose(f, x) - compose(f, y);
    const Series R = compose(g, x) - compose(g, y);
    if (R.is_zero()) {
        if (L.is_zero())
            return fail("f o x - f o y is zero");
        return pass({"constant_g"});
    }
    if (rel0(L, R) != Rel::succ)
        return fail("f o x - f o y does not dominate g o x - g o y");
    return pass({"general"});
}

Verdict check_gap_J(const Series &gamma, const Series &delta, const Series &x, const Series &y) {
    if (!purely_infinite_positive(gamma) || !purely_infinite_positive(delta))
        return skip("gamma or delta is not a positive purely infinite series");
    if (compare(gamma, delta) <= 0)
        return skip("gamma is not above delta");
    if (auto s = premise_xy(x, y))
        return *s;
    const Series L = exp_series(compose(gamma, x)) - exp_series(compose(gamma, y));
    const Series R = exp_series(compose(delta, x)) - exp_series(compose(delta, y));
    if (rel0(L, R) != Rel::succ)
        return fail("e^(gamma o x) - e^(gamma o y) does not dominate e^(delta o x) - e^(delta o y)");
    return pass();
}

Verdict check_weak_mvp(const Series &gamma, const Series &x, const Series &y) {
    if (!purely_infinite_positive(gamma))
        return skip("gamma is not a positive purely infinite series");
    if (auto s = premise_xy(x, y))
        return *s;
    const Series D = compose(gamma, x) - compose(gamma, y);
    const Series d = x - y;
    const Series gp = compose(derive(gamma), y);
    const Series one(1);
    const Rel r = rel0(D, one);
    std::vector<std::string> branches;
    if (r != Rel::succ) {
        if (rel0(D * invert(d), gp) == Rel::succ)
            return fail("small branch: (gamma o x - gamma o y)/(x - y) is not <= gamma' o y");
        branches.push_back("small");
    }
    if (r != Rel::prec) {
        if (rel0(gp * d, one) == Rel::prec)
            return fail("large branch: (gamma' o y)(x - y) is not >= 1");
        branches.push_back("large");
    }
    return pass(branches);
}

Verdict check_small_gaps(const Series &gamma, const Series &x, const Series &y) {
    if (!purely_infinite_positive(gamma))
        return skip("gamma is not a positive purely infinite series");
    if (auto s = premise_xy(x, y))
        return *s;
    const Series ey = exp_series(-compose(gamma, y));
    const Series L = (exp_series(-compose(gamma, x)) - ey) * invert(x - y);
    const Series R = ey * compose(derive(gamma), y);
    if (rel0(L, R) == Rel::succ)
        return fail("(e^(-gamma o x) - e^(-gamma o y))/(x - y) is not <= (e^-gamma)' o y");
    return pass();
}

Verdict check_taylor_suite(const Series &f, const Series &x, const Series &delta, unsigned n,
                           unsigned k_max) {
    TaylorOptions opts;
    opts.k_max = k_max;
    for (unsigned i = 0; i <= n; ++i) {
        TaylorResult r = taylor_expand(f, x, delta, i, opts);
        if (!r.within_bound)
            return fail("order " + std::to_string(i) + ": remainder " + series_text(r.remainder) +
                        " is not <= " + series_text(r.bound));
    }
    FirstTermRatio q = first_term_ratio(f, x, delta);
    if (!q.relation.similar)
        return fail("difference quotient is not similar to f' o x");
    if (radius_classify(f, x, delta, k_max) != RadiusClass::eventually_decreasing)
        return fail("Taylor terms are not eventually decreasing inside the region");
    return pass({"order_" + std::to_string(n)});
}

Verdict check_radius_negative(const Series &f, const Series &x, const Series &delta, unsigned k_max) {
    if (asymp_power_of_x(f, k_max))
        return skip("f is asymptotic to a power of x");
    if (!above_reals(x))
        return skip("x is not above the reals");
    if (delta.is_zero())
        return skip("delta is zero");
    const bool big_delta = rel0(delta, x) != Rel::prec;
    const bool big_ratio = rel0(compose(dagger(f), x) * delta, Series(1)) != Rel::prec;
    if (!big_delta && !big_ratio)
        return skip("delta satisfies the Taylor condition");
    if (radius_classify(f, x, delta, k_max) != RadiusClass::eventually_non_decreasing)
        return fail("Taylor terms decrease outside the region");
    return pass({big_delta ? "delta_not_below_x" : "ratio_not_below_1"});
}

Verdict check_exp_rank(const Series &f, const Series &g) {
    const unsigned ef = exp_rank(f), eg = exp_rank(g);
    const Series s = f + g;
    const unsigned es = exp_rank(s);
    if (ef == 0 && eg == 0) {
        bool log_atomic = s.is_zero();
        if (!log_atomic) {
            auto t = s.term(0);
            log_atomic = !s.term(1) && t->coef.is_one() && t->mono.as_log_atom().has_value();
        }
        const unsigned want = log_atomic ? 0 : 1;
        if (es != want)
            return fail("ER(f) = ER(g) = 0 but ER(f + g) = " + std::to_string(es));
        return pass({"both_zero"});
    }
    if (es > std::max(ef, eg))
        return fail("ER(f + g) = " + std::to_string(es) + " exceeds max(" + std::to_string(ef) + ", " +
                    std::to_string(eg) + ")");
    return pass({"general"});
}

// ---------------------------------------------------------------------------
// Runner

std::size_t SuiteReport::failed() const {
    std::size_t n = 0;
    for (const auto &c : checkers)
        n += c.failed;
    return n;
}

const std::vector<std::string> &suite_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto &d : registry())
            v.push_back(d.name);
        return v;
    }();
    return names;
}

Inputs trial_inputs(const std::string &checker, const GenProfile &profile, std::uint64_t trial) {
    BudgetScope scope(profile.budget);
    return find_checker(checker).gen(profile, trial);
}

Verdict run_checker(const std::string &checker, const Inputs &inputs, unsigned k_max) {
    const CheckerDef &def = find_checker(checker);
    return guarded([&] {
        std::vector<Series> args;
        for (const auto &name : def.inputs) {
            auto it = std::find_if(inputs.begin(), inputs.end(),
                                   [&](const auto &p) { return p.first == name; });
            if (it == inputs.end())
                throw domain_error("missing input '" + name + "'");
            if (name == "n")
                args.emplace_back();
            else
                args.push_back(read_series(it->second));
        }
        Inputs ordered;
        for (const auto &name : def.inputs)
            for (const auto &p : inputs)
                if (p.first == name)
                    ordered.push_back(p);
        return def.run(args, ordered, k_max);
    });
}

Verdict replay(const std::string &checker, const Witness &w, const GenProfile &profile) {
    BudgetScope scope(profile.budget);
    return run_checker(checker, w.inputs, profile.k_max);
}

SuiteReport run_suite(const GenProfile &profile, const std::vector<std::string> &which,
                      std::size_t trials) {
    for (const auto &name : which)
        find_checker(name);
    SuiteReport report;
    report.profile = profile;
    report.trials = trials;
    for (const auto &name : which) {
        struct Result {
            Inputs inputs;
            Verdict verdict;
        };
        std::vector<Result> results(trials);
        auto one = [&](std::size_t t) {
            Result &r = results[t];
            r.verdict = guarded([&] {
                r.inputs = trial_inputs(name, profile, t);
                return Verdict{};
            });
            if (r.verdict.outcome != Outcome::pass)
                return;
            BudgetScope scope(profile.budget);
            r.verdict = run_checker(name, r.inputs, profile.k_max);
        };
        const unsigned jobs = std::max(1u, profile.jobs);
        if (jobs == 1) {
            for (std::size_t t = 0; t < trials; ++t)
                one(t);
        } else {
            std::atomic<std::size_t> next{0};
            std::vector<std::thread> pool;
            for (unsigned j = 0; j < jobs; ++j)
                pool.emplace_back([&] {
                    for (std::size_t t; (t = next++) < trials;)
                        one(t);
                });
            for (auto &th : pool)
                th.join();
        }
        CheckReport c;
        c.name = name;
        for (std::size_t t = 0; t < trials; ++t) {
            const Result &r = results[t];
            ++c.attempted;
            switch (r.verdict.outcome) {
            case Outcome::pass:
                ++c.completed;
                break;
            case Outcome::fail:
                ++c.completed;
                ++c.failed;
                c.failures.push_back(Witness{t, r.inputs, r.verdict.detail});
                break;
            case Outcome::skip:
                ++c.skipped;
                break;
            case Outcome::budget:
                ++c.budget;
                break;
            }
            for (const auto &b : r.verdict.branches)
                ++c.branches[b];
        }
        report.checkers.push_back(std::move(c));
    }
    return report;
}

std::string to_json(const SuiteReport &r, int indent) {
    using nlohmann::ordered_json;
    ordered_json j;
    j["format_version"] = 1;
    j["seed"] = r.profile.seed;
    j["trials"] = r.trials;
    ordered_json prof;
    prof["max_exp_depth"] = r.profile.max_exp_depth;
    prof["max_log_index"] = r.profile.max_log_index;
    prof["max_generators"] = r.profile.max_generators;
    prof["max_terms"] = r.profile.max_terms;
    ordered_json coefs = ordered_json::array(), expos = ordered_json::array();
    for (const auto &q : r.profile.coefficients)
        coefs.push_back(q.get_str());
    for (const auto &q : r.profile.exponents)
        expos.push_back(q.get_str());
    prof["coefficients"] = coefs;
    prof["exponents"] = expos;
    prof["budget"] = {{"max_terms", r.profile.budget.max_terms},
                      {"max_bits", r.profile.budget.max_precision},
                      {"max_depth", r.profile.budget.max_depth},
                      {"max_work", r.profile.budget.max_work}};
    prof["k_max"] = r.profile.k_max;
    j["profile"] = prof;
    ordered_json checkers = ordered_json::array();
    for (const auto &c : r.checkers) {
        ordered_json o;
        o["name"] = c.name;
        o["attempted"] = c.attempted;
        o["completed"] = c.completed;
        o["skipped"] = c.skipped;
        o["budget"] = c.budget;
        o["failed"] = c.failed;
        if (c.name == "taylor" || c.name == "radius_negative")
            o["power_check_k_max"] = r.profile.k_max;
        ordered_json br = ordered_json::object();
        for (const auto &[k, v] : c.branches)
            br[k] = v;
        o["branches"] = br;
        ordered_json fs = ordered_json::array();
        for (const auto &w : c.failures) {
            ordered_json in = ordered_json::object();
            for (const auto &[k, v] : w.inputs)
                in[k] = v;
            fs.push_back({{"trial", w.trial}, {"inputs", in}, {"detail", w.detail}});
        }
        o["failures"] = fs;
        checkers.push_back(o);
    }
    j["checkers"] = checkers;
    j["failed"] = r.failed();
    return j.dump(indent);
}

std::string to_text(const SuiteReport &r) {
    std::ostringstream os;
    os << "seed " << r.profile.seed << ", " << r.trials << " trials per checker\n";
    for (const auto &c : r.checkers) {
        os << c.name << ": attempted " << c.attempted << ", completed " << c.completed << ", skipped "
           << c.skipped << ", budget " << c.budget << ", failed " << c.failed;
        if (!c.branches.empty()) {
            os << " [";
            bool first = true;
            for (const auto &[k, v] : c.branches) {
                os << (first ? "" : ", ") << k << " " << v;
                first = false;
            }
            os << "]";
        }
        os << "\n";
        for (const auto &w : c.failures) {
            os << "  trial " << w.trial << ": " << w.detail << "\n";
            for (const auto &[k, v] : w.inputs)
                os << "    " << k << " = " << v << "\n";
        }
    }
    os << (r.failed() == 0 ? "all checks passed" : std::to_string(r.failed()) + " failures") << "\n";
    return os.str();
}

} // namespace omega
