#include "omega/analysis.hpp"

#include <algorithm>

#include "node.hpp"
#include "omega/budget.hpp"
#include "omega/error.hpp"

namespace omega {

using detail::log_atom;
using detail::make_series;

namespace {

const Monomial one;

SeriesSplit split_stream(const Series &f) {
    SeriesSplit r;
    auto lead = f.term(0);
    if (!lead)
        return r;
    if (cmp_monomial(lead->mono, one) < 0) {
        r.infinitesimal = f;
        return r;
    }
    if (!f.is_finite()) {
        auto fl = f.node()->floor();
        if (fl && cmp_monomial(*fl, one) > 0) {
            r.purely_infinite = f;
            return r;
        }
    }
    std::vector<Term> above;
    const std::size_t limit = detail::term_budget();
    for (std::size_t i = 0;; ++i) {
        auto t = f.term(i);
        if (!t)
            break;
        auto c = cmp_monomial(t->mono, one);
        if (c > 0) {
            if (i + 1 >= limit)
                throw budget_exhausted("split cannot reach the constant part within the term budget");
            above.push_back(std::move(*t));
            continue;
        }
        if (c == 0) {
            r.constant = t->coef;
            r.infinitesimal = detail::tail(f, i + 1);
        } else {
            r.infinitesimal = detail::tail(f, i);
        }
        break;
    }
    r.purely_infinite = Series::from_terms(std::move(above));
    return r;
}

SeriesSplit split_uncached(const Series &f) {
    if (auto *add = dynamic_cast<const detail::AddNode *>(f.node().get())) {
        SeriesSplit a = split(add->lhs()), b = split(add->rhs());
        return SeriesSplit{a.purely_infinite + b.purely_infinite, a.constant + b.constant,
                           a.infinitesimal + b.infinitesimal};
    }
    if (auto *sc = dynamic_cast<const detail::ScaleNode *>(f.node().get()); sc && sc->mono().is_one()) {
        SeriesSplit a = split(sc->arg());
        return SeriesSplit{scale(a.purely_infinite, sc->coef()), sc->coef() * a.constant,
                           scale(a.infinitesimal, sc->coef())};
    }
    return split_stream(f);
}

Constant inverse_factorial(std::size_t n) {
    mpz_class f = 1;
    for (std::size_t k = 2; k <= n; ++k)
        f *= static_cast<unsigned long>(k);
    return Constant(mpq_class(mpz_class(1), f));
}

Series derive_uncached(const Series &f) {
    auto piece = [](const Term &t) {
        if (t.mono.is_one())
            return Series();
        return scale(dagger(t.mono), t.coef, t.mono);
    };
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
    return make_series(std::make_shared<detail::LazySumNode>(
        [f, piece](std::size_t k) -> std::optional<Series> {
            auto t = f.term(k);
            if (!t)
                return std::nullopt;
            return piece(*t);
        },
        f.height()));
}

unsigned rank_of(const Series &f, unsigned depth) {
    if (f.is_zero())
        return 0;
    if (depth > 64)
        throw depth_exceeded("exponential rank recursion too deep");
    Enumeration e = f.enumerate(detail::term_budget());
    if (!e.exhausted)
        throw budget_exhausted("exponential rank needs the full support");
    if (e.terms.size() == 1 && e.terms[0].coef.is_one() && e.terms[0].mono.as_log_atom())
        return 0;
    unsigned r = 0;
    for (const auto &t : e.terms)
        r = std::max(r, rank_of(log_monomial(t.mono), depth + 1) + 1);
    return r;
}

} // namespace

SeriesSplit split(const Series &f) {
    if (!f.node())
        return {};
    auto *n = f.node().get();
    {
        std::lock_guard lock(n->memo_mu);
        if (n->split_memo)
            return *n->split_memo;
    }
    SeriesSplit r = split_uncached(f);
    std::lock_guard lock(n->memo_mu);
    if (!n->split_memo)
        n->split_memo = r;
    return *n->split_memo;
}

Series exp_series(const Series &f) {
    if (!f.node())
        return Series(1);
    auto *n = f.node().get();
    {
        std::lock_guard lock(n->memo_mu);
        if (n->exp_memo)
            return *n->exp_memo;
    }
    SeriesSplit s = split(f);
    Monomial m = exp_purely_infinite(s.purely_infinite);
    if (m.exp_height() > current_budget().max_depth)
        throw depth_exceeded("exponential height " + std::to_string(m.exp_height()) +
                             " exceeds the depth budget");
    Series body = detail::taylor(s.infinitesimal, inverse_factorial, std::nullopt);
    Series r = scale(body, Constant::exp(s.constant), m);
    std::lock_guard lock(n->memo_mu);
    if (!n->exp_memo)
        n->exp_memo = r;
    return *n->exp_memo;
}

Series log_series(const Series &f) {
    auto lead = f.term(0);
    if (!lead)
        throw not_positive("log of the zero series");
    if (lead->coef.sign() <= 0)
        throw not_positive("log of a negative series");
    const Constant rinv = Constant(1) / lead->coef;
    Series eps = scale(detail::tail(f, 1), rinv, lead->mono.inverse());
    Series body = detail::taylor(
        eps,
        [](std::size_t n) {
            if (n == 0)
                return Constant();
            return Constant(mpq_class(n % 2 ? 1 : -1, static_cast<unsigned long>(n)));
        },
        std::nullopt);
    return (log_monomial(lead->mono) + Series(Constant::log(lead->coef))) + body;
}

Series dagger(const Monomial &m) {
    const detail::MonoData *d = m.data();
    if (!d)
        return Series();
    {
        std::lock_guard lock(d->mu);
        if (d->dagger_memo)
            return *d->dagger_memo;
    }
    std::vector<Term> terms;
    for (const auto &[n, a] : d->word) {
        Word w;
        for (unsigned k = 0; k <= n; ++k)
            w.emplace_back(k, Constant(-1));
        terms.push_back(Term{a, Monomial::make(std::move(w), Series())});
    }
    Series r = Series::from_terms(std::move(terms)) + derive(d->expo);
    std::lock_guard lock(d->mu);
    if (!d->dagger_memo)
        d->dagger_memo = r;
    return *d->dagger_memo;
}

Series derive(const Series &f) {
    if (!f.node())
        return Series();
    auto *n = f.node().get();
    {
        std::lock_guard lock(n->memo_mu);
        if (n->derive_memo)
            return *n->derive_memo;
    }
    Series r = derive_uncached(f);
    std::lock_guard lock(n->memo_mu);
    if (!n->derive_memo)
        n->derive_memo = r;
    return *n->derive_memo;
}

Series dagger(const Series &f) {
    if (f.is_zero())
        throw zero_series("logarithmic derivative of zero");
    return derive(f) * invert(f);
}

unsigned exp_rank(const Series &f) { return rank_of(f, 0); }

} // namespace omega
