#include "omega/compose.hpp"

#include <mutex>

#include "node.hpp"
#include "omega/budget.hpp"
#include "omega/error.hpp"

namespace omega {

namespace {

const Monomial one;

bool is_variable(const Series &g) {
    auto t = g.term(0);
    if (!t || !t->coef.is_one() || t->mono.as_log_atom() != 0u)
        return false;
    return !g.term(1);
}

template <class Memo>
std::optional<Series> memo_find(std::mutex &mu, const Memo &memo, const Series &g) {
    std::lock_guard lock(mu);
    for (const auto &[key, val] : memo)
        if (key.same(g))
            return val;
    return std::nullopt;
}

template <class Memo>
Series memo_store(std::mutex &mu, Memo &memo, const Series &g, Series r) {
    std::lock_guard lock(mu);
    for (const auto &[key, val] : memo)
        if (key.same(g))
            return val;
    // Bounded: shared monomials such as l_n meet many unrelated arguments.
    if (memo.size() >= 32)
        memo.erase(memo.begin());
    memo.emplace_back(g, r);
    return r;
}

Series compose_monomial(const Monomial &m, const Series &g) {
    const detail::MonoData *d = m.data();
    if (!d)
        return Series(1);
    if (auto hit = memo_find(d->mu, d->compose_memo, g))
        return *hit;
    Series r = Series(1);
    for (const auto &[n, a] : d->word)
        r = r * power(iterated_log(g, n), a);
    if (!d->expo.is_zero())
        r = r * exp_series(compose(d->expo, g));
    return memo_store(d->mu, d->compose_memo, g, std::move(r));
}

Series compose_uncached(const Series &f, const Series &g) {
    auto piece = [g](const Term &t) { return scale(compose_monomial(t.mono, g), t.coef); };
    if (f.is_finite()) {
        std::vector<Series> parts;
        for (std::size_t i = 0;; ++i) {
            auto t = f.term(i);
            if (!t)
                break;
            parts.push_back(piece(*t));
        }
        return detail::sum_all(std::move(parts));
    }
    return detail::make_series(std::make_shared<detail::LazySumNode>(
        [f, piece](std::size_t k) -> std::optional<Series> {
            auto t = f.term(k);
            if (!t)
                return std::nullopt;
            return piece(*t);
        },
        f.height() + g.height()));
}

Term lead_of(const Series &f, const char *what) {
    auto t = f.term(0);
    if (!t)
        throw precondition_violated(what, std::string(what) + ": series is zero");
    return *t;
}

bool prec_one(const Series &f) {
    auto t = f.term(0);
    return !t || cmp_monomial(t->mono, one) < 0;
}

// Leading term of h o x, computed from the leading term of h.
Term composed_lead(const Series &h, const Series &x) {
    const Term t = leading_term(h);
    return leading_term(scale(compose_monomial(t.mono, x), t.coef));
}

} // namespace

void require_above_reals(const Series &g) {
    auto t = g.term(0);
    if (!t || cmp_monomial(t->mono, one) <= 0 || t->coef.sign() <= 0)
        throw not_above_reals("argument is not above every real: " + g.to_string(4));
}

Series compose(const Series &f, const Series &g) {
    require_above_reals(g);
    if (!f.node())
        return Series();
    if (is_variable(g))
        return f;
    auto *n = f.node().get();
    if (auto hit = memo_find(n->memo_mu, n->compose_memo, g))
        return *hit;
    return memo_store(n->memo_mu, n->compose_memo, g, compose_uncached(f, g));
}

Series iterated_log(const Series &g, unsigned n) {
    require_above_reals(g);
    if (n == 0)
        return g;
    if (n > current_budget().max_depth)
        throw depth_exceeded("iterated log depth " + std::to_string(n) + " exceeds the depth budget");
    auto *node = g.node().get();
    {
        std::lock_guard lock(node->memo_mu);
        if (node->log_iter_memo.size() >= n)
            return node->log_iter_memo[n - 1];
    }
    Series cur;
    unsigned k;
    {
        std::lock_guard lock(node->memo_mu);
        k = static_cast<unsigned>(node->log_iter_memo.size());
        cur = k == 0 ? g : node->log_iter_memo.back();
    }
    std::vector<Series> fresh;
    for (; k < n; ++k) {
        if (k > 0)
            require_above_reals(cur);
        cur = log_series(cur);
        fresh.push_back(cur);
    }
    std::lock_guard lock(node->memo_mu);
    std::size_t have = node->log_iter_memo.size();
    std::size_t start = n - fresh.size();
    for (std::size_t i = have; i < n; ++i)
        node->log_iter_memo.push_back(fresh[i - start]);
    return node->log_iter_memo[n - 1];
}

std::optional<std::pair<unsigned, unsigned>> log_atomic_index(const Series &g, unsigned max_n) {
    for (unsigned n = 0; n <= max_n; ++n) {
        Series h = iterated_log(g, n);
        auto t = h.term(0);
        if (t && t->coef.is_one())
            if (auto k = t->mono.as_log_atom())
                return std::pair{n, *k};
    }
    return std::nullopt;
}

Series derive_n(const Series &f, unsigned k) {
    Series r = f;
    for (unsigned i = 0; i < k; ++i)
        r = derive(r);
    return r;
}

namespace {

// Leading terms of f, f', ..., f^(last) from exact prefixes of width terms.
// If t < m with m not ~ 1 then t' < m', so the terms of the derivative of a
// prefix that lie above the derivative of its last term are exact.
std::optional<std::vector<Term>> leads_with(const Series &f, unsigned last, std::size_t width) {
    std::vector<Term> p;
    bool whole = true;
    for (std::size_t i = 0;; ++i) {
        auto t = f.term(i);
        if (!t)
            break;
        if (p.size() >= width && !p.back().mono.is_one()) {
            whole = false;
            break;
        }
        p.push_back(*t);
    }
    std::vector<Term> leads;
    for (unsigned k = 0;; ++k) {
        if (p.empty())
            return whole ? std::optional(leads) : std::nullopt;
        leads.push_back(p.front());
        if (k == last)
            return leads;
        if (!whole && p.back().mono.is_one())
            p.pop_back();
        if (p.empty())
            return std::nullopt;
        const Series d = derive(Series::from_terms(p));
        std::vector<Term> next;
        if (whole) {
            for (std::size_t i = 0; next.size() < width; ++i) {
                auto t = d.term(i);
                if (!t)
                    break;
                next.push_back(*t);
            }
            whole = next.size() < width || !d.term(width);
        } else {
            const Monomial cut = leading_term(derive(Series::monomial(p.back().mono, p.back().coef))).mono;
            for (std::size_t i = 0; next.size() < width; ++i) {
                auto t = d.term_above(i, cut);
                if (!t)
                    break;
                next.push_back(*t);
            }
        }
        p = std::move(next);
    }
}

} // namespace

std::vector<Term> derivative_leads(const Series &f, unsigned last) {
    for (std::size_t width = 4;; width *= 2) {
        if (auto r = leads_with(f, last, width))
            return *r;
        if (width >= detail::term_budget())
            throw budget_exhausted("leading terms of the derivatives need more than " +
                                   std::to_string(width) + " terms");
    }
}

bool asymp_power_of_x(const Series &f, unsigned k_max) {
    auto t = f.term(0);
    if (!t)
        return false;
    if (t->mono.is_one())
        return true;
    const Word &w = t->mono.word();
    if (!t->mono.expo().is_zero() || w.size() != 1 || w[0].first != 0)
        return false;
    const Constant &a = w[0].second;
    if (!a.is_integer() || a.sign() < 0)
        return false;
    return a.as_rational() <= k_max;
}

TaylorResult taylor_expand(const Series &f, const Series &x, const Series &delta, unsigned n,
                           const TaylorOptions &opts) {
    try {
        require_above_reals(x);
    } catch (const not_above_reals &) {
        throw precondition_violated("x_above_reals", "x is not above every real");
    }
    if (delta.is_zero())
        throw precondition_violated("delta_nonzero", "delta is zero");
    if (dominance(delta, x).relation != DominanceRel::Relation::prec)
        throw precondition_violated("delta_prec_x", "delta is not dominated by x");
    if (asymp_power_of_x(f, opts.k_max))
        throw precondition_violated("f_not_power_of_x",
                                    "f is asymptotic to a power x^k with k <= " +
                                        std::to_string(opts.k_max));
    if (!prec_one(compose(dagger(f), x) * delta))
        throw precondition_violated("dagger_delta_prec_one", "(f^dagger o x) delta is not dominated by 1");

    TaylorResult r;
    std::vector<Series> parts;
    Series deriv = f, dpow(1);
    Constant inv_fact(1);
    for (unsigned i = 0; i <= n; ++i) {
        if (i > 0) {
            deriv = derive(deriv);
            dpow = dpow * delta;
            inv_fact = inv_fact / Constant(static_cast<long>(i));
        }
        parts.push_back(scale(compose(deriv, x) * dpow, inv_fact));
    }
    r.partial_sum = detail::sum_all(std::move(parts));
    r.remainder = compose(f, x + delta) - r.partial_sum;
    r.bound = compose(derive(deriv), x) * (dpow * delta);
    r.within_bound = r.remainder.is_zero() || r.bound.is_zero()
                         ? r.remainder.is_zero()
                         : dominance(r.remainder, r.bound).relation != DominanceRel::Relation::succ;
    return r;
}

std::string to_string(RadiusClass r) {
    return r == RadiusClass::eventually_decreasing ? "eventually_decreasing"
                                                   : "eventually_non_decreasing";
}

RadiusClass radius_classify(const Series &f, const Series &x, const Series &delta, unsigned k_max) {
    require_above_reals(x);
    if (delta.is_zero())
        throw precondition_violated("delta_nonzero", "delta is zero");
    if (asymp_power_of_x(f, k_max))
        throw precondition_violated("f_not_power_of_x", "f is asymptotic to a power x^k");
    const Monomial dm = leading_term(delta).mono;
    // Ratio of consecutive Taylor terms is ((f^(k))^dagger o x) delta / (k+1);
    // only its leading monomial matters.
    const unsigned first = k_max >= 3 ? k_max - 3 : 0;
    const std::vector<Term> leads = derivative_leads(f, k_max);
    std::optional<Monomial> prev;
    bool decreasing = true;
    for (unsigned k = first; k <= k_max; ++k) {
        if (k >= leads.size())
            return RadiusClass::eventually_decreasing;
        Monomial cur = composed_lead(Series::monomial(leads[k].mono, leads[k].coef), x).mono;
        if (prev && cmp_monomial(cur / *prev * dm, one) >= 0)
            decreasing = false;
        prev = cur;
    }
    return decreasing ? RadiusClass::eventually_decreasing : RadiusClass::eventually_non_decreasing;
}

FirstTermRatio first_term_ratio(const Series &f, const Series &x, const Series &delta) {
    require_above_reals(x);
    if (delta.is_zero())
        throw precondition_violated("delta_nonzero", "delta is zero");
    if (f.is_zero() || lead_of(f, "f").mono.is_one())
        throw precondition_violated("f_not_asymp_one", "f is asymptotic to a constant");
    if (dominance(delta, x).relation != DominanceRel::Relation::prec)
        throw precondition_violated("delta_prec_x", "delta is not dominated by x");
    if (!prec_one(compose(dagger(f), x) * delta))
        throw precondition_violated("dagger_delta_prec_one", "(f^dagger o x) delta is not dominated by 1");
    FirstTermRatio r;
    r.quotient = (compose(f, x + delta) - compose(f, x)) * invert(delta);
    r.relation = dominance(r.quotient, compose(derive(f), x));
    return r;
}

} // namespace omega
