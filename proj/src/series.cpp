#include "omega/series.hpp"

#include <algorithm>
#include <stdexcept>

#include "node.hpp"
#include "omega/budget.hpp"
#include "omega/error.hpp"

namespace omega {

using detail::mono_equal;
using detail::mono_less;
using detail::SeriesNode;

namespace detail {

namespace {

std::optional<Monomial> min_mono(const std::optional<Monomial> &a, const std::optional<Monomial> &b) {
    if (!a || !b)
        return std::nullopt;
    return mono_less(*a, *b) ? a : b;
}

} // namespace

SeriesNode::SeriesNode(std::vector<Term> terms, unsigned height)
    : terms_(std::move(terms)), done_(true), finite_(true), height_(height) {}

std::optional<Term> SeriesNode::produce(const Monomial *, bool &) { return std::nullopt; }

std::optional<Term> SeriesNode::fetch(std::size_t i, const Monomial *bound) {
    std::lock_guard lock(mu_);
    while (terms_.size() <= i) {
        if (poison_)
            std::rethrow_exception(poison_);
        if (done_)
            return std::nullopt;
        if (bound && !terms_.empty() && cmp_monomial(terms_.back().mono, *bound) <= 0)
            return std::nullopt;
        if (busy_)
            throw std::logic_error("re-entrant series enumeration");
        charge_work();
        busy_ = true;
        try {
            bool below = false;
            auto t = produce(bound, below);
            busy_ = false;
            if (!t) {
                if (below)
                    return std::nullopt;
                done_ = true;
                break;
            }
            if (!terms_.empty()) {
                bool ordered = true;
                try {
                    ordered = mono_less(t->mono, terms_.back().mono);
                } catch (const limit_error &) {
                }
                if (!ordered)
                    throw std::logic_error("series support is not strictly decreasing at " +
                                           t->mono.to_string());
            }
            terms_.push_back(std::move(*t));
        } catch (...) {
            busy_ = false;
            poison_ = std::current_exception();
            throw;
        }
    }
    if (i >= terms_.size())
        return std::nullopt;
    if (bound && cmp_monomial(terms_[i].mono, *bound) <= 0)
        return std::nullopt;
    return terms_[i];
}

std::optional<Term> SeriesNode::term(std::size_t i) { return fetch(i, nullptr); }

std::optional<Term> SeriesNode::term_above(std::size_t i, const Monomial &bound) {
    return fetch(i, &bound);
}

std::optional<Monomial> SeriesNode::floor() {
    std::lock_guard lock(mu_);
    if (floor_done_)
        return floor_;
    if (done_ && !terms_.empty()) {
        floor_ = terms_.back().mono;
    } else {
        try {
            floor_ = compute_floor();
        } catch (const limit_error &) {
            floor_ = std::nullopt;
        }
    }
    floor_done_ = true;
    return floor_;
}

namespace {

std::optional<Term> get(const Series &s, std::size_t i, const Monomial *bound) {
    return bound ? s.term_above(i, *bound) : s.term(i);
}

} // namespace

// ---------------------------------------------------------------------------

AddNode::AddNode(Series a, Series b)
    : SeriesNode(std::max(a.height(), b.height())), a_(std::move(a)), b_(std::move(b)) {}

std::optional<Term> AddNode::produce(const Monomial *bound, bool &below) {
    for (std::size_t cancels = 0;;) {
        auto ta = get(a_, i_, bound), tb = get(b_, j_, bound);
        if (!ta && !tb) {
            below = bound != nullptr;
            return std::nullopt;
        }
        if (!tb) {
            ++i_;
            return ta;
        }
        if (!ta) {
            ++j_;
            return tb;
        }
        auto c = cmp_monomial(ta->mono, tb->mono);
        if (c > 0) {
            ++i_;
            return ta;
        }
        if (c < 0) {
            ++j_;
            return tb;
        }
        ++i_;
        ++j_;
        Constant s = ta->coef + tb->coef;
        if (!s.is_zero())
            return Term{s, ta->mono};
        if (++cancels > term_budget())
            throw budget_exhausted("cancellation in a sum exceeds the term budget");
        charge_work();
    }
}

std::optional<Monomial> AddNode::compute_floor() {
    return min_mono(a_.node()->floor(), b_.node()->floor());
}

ScaleNode::ScaleNode(Constant c, Monomial m, Series a)
    : SeriesNode(std::max(m.exp_height(), a.height())), c_(std::move(c)), m_(std::move(m)),
      a_(std::move(a)) {}

std::optional<Term> ScaleNode::produce(const Monomial *bound, bool &below) {
    std::optional<Monomial> inner;
    if (bound)
        inner = m_.inverse() * *bound;
    auto t = get(a_, i_, inner ? &*inner : nullptr);
    if (!t) {
        below = bound != nullptr;
        return std::nullopt;
    }
    ++i_;
    return Term{c_ * t->coef, m_ * t->mono};
}

std::optional<Monomial> ScaleNode::compute_floor() {
    auto f = a_.node()->floor();
    if (!f)
        return std::nullopt;
    return m_ * *f;
}

MulNode::MulNode(Series a, Series b)
    : SeriesNode(std::max(a.height(), b.height())), a_(std::move(a)), b_(std::move(b)) {}

void MulNode::push(std::size_t i, std::size_t j) {
    charge_work();
    auto ta = a_.term(i);
    if (!ta)
        return;
    auto tb = b_.term(j);
    if (!tb)
        return;
    frontier_.push_back(Cell{i, j, Term{ta->coef * tb->coef, ta->mono * tb->mono}});
}

std::optional<Term> MulNode::produce(const Monomial *bound, bool &below) {
    if (!started_) {
        started_ = true;
        push(0, 0);
    }
    for (std::size_t cancels = 0;;) {
        if (frontier_.empty())
            return std::nullopt;
        std::size_t best = 0;
        for (std::size_t k = 1; k < frontier_.size(); ++k)
            if (mono_less(frontier_[best].t.mono, frontier_[k].t.mono))
                best = k;
        const Monomial m = frontier_[best].t.mono;
        if (bound && cmp_monomial(m, *bound) <= 0) {
            below = true;
            return std::nullopt;
        }
        std::vector<Cell> taken, kept;
        for (std::size_t k = 0; k < frontier_.size(); ++k) {
            if (k == best || mono_equal(frontier_[k].t.mono, m))
                taken.push_back(std::move(frontier_[k]));
            else
                kept.push_back(std::move(frontier_[k]));
        }
        frontier_ = std::move(kept);
        Constant s;
        for (const auto &cell : taken) {
            s += cell.t.coef;
            push(cell.i, cell.j + 1);
            if (cell.j == 0)
                push(cell.i + 1, 0);
        }
        if (!s.is_zero())
            return Term{s, m};
        if (++cancels > term_budget())
            throw budget_exhausted("cancellation in a product exceeds the term budget");
        charge_work();
    }
}

std::optional<Monomial> MulNode::compute_floor() {
    auto fa = a_.node()->floor();
    if (!fa)
        return std::nullopt;
    auto fb = b_.node()->floor();
    if (!fb)
        return std::nullopt;
    return *fa * *fb;
}

LazySumNode::LazySumNode(Generator gen, unsigned height)
    : SeriesNode(height), gen_(std::move(gen)) {}

std::optional<Term> LazySumNode::produce(const Monomial *bound, bool &below) {
    const std::size_t budget = term_budget();
    for (std::size_t cancels = 0;;) {
        std::vector<std::optional<Term>> cur(items_.size());
        std::optional<Monomial> cand;
        for (std::size_t k = 0; k < items_.size(); ++k) {
            cur[k] = get(items_[k], pos_[k], bound);
            if (cur[k] && (!cand || mono_less(*cand, cur[k]->mono)))
                cand = cur[k]->mono;
        }
        // Pull items until the newest lead is strictly below the candidate;
        // later items cannot reach it.
        std::size_t pulled = 0;
        while (!gen_done_) {
            if (cand && last_lead_ && mono_less(*last_lead_, *cand))
                break;
            if (bound && last_lead_ && cmp_monomial(*last_lead_, *bound) <= 0)
                break;
            auto s = gen_(next_++);
            if (!s) {
                gen_done_ = true;
                break;
            }
            if (++pulled > budget)
                throw budget_exhausted("lazy sum needs more items than the term budget");
            auto lead = s->term(0);
            if (!lead)
                continue;
            if (last_lead_ && mono_less(*last_lead_, lead->mono))
                throw std::logic_error("lazy sum items are not ordered by leading monomial");
            last_lead_ = lead->mono;
            items_.push_back(*s);
            pos_.push_back(0);
            if (bound && cmp_monomial(lead->mono, *bound) <= 0)
                lead.reset();
            cur.push_back(lead);
            if (lead && (!cand || mono_less(*cand, lead->mono)))
                cand = lead->mono;
        }
        if (!cand) {
            below = bound != nullptr;
            return std::nullopt;
        }
        Constant sum;
        for (std::size_t k = 0; k < items_.size(); ++k) {
            if (cur[k] && mono_equal(cur[k]->mono, *cand)) {
                sum += cur[k]->coef;
                ++pos_[k];
            }
        }
        if (!sum.is_zero())
            return Term{sum, *cand};
        if (++cancels > budget)
            throw budget_exhausted("cancellation in a lazy sum exceeds the term budget");
        charge_work();
    }
}

namespace {

LazySumNode::Generator taylor_generator(Series eps, TaylorNode::Coefficients coef,
                                        std::optional<std::size_t> last) {
    auto powers = std::make_shared<std::vector<Series>>();
    powers->push_back(Series(1));
    return [eps = std::move(eps), coef = std::move(coef), last,
            powers](std::size_t n) -> std::optional<Series> {
        if (last && n > *last)
            return std::nullopt;
        while (powers->size() <= n)
            powers->push_back(powers->back() * eps);
        Constant c = coef(n);
        if (c.is_zero())
            return Series();
        return scale((*powers)[n], c);
    };
}

} // namespace

TaylorNode::TaylorNode(Series eps, Coefficients coef, std::optional<std::size_t> last)
    : LazySumNode(taylor_generator(eps, std::move(coef), last), eps.height()), eps_(eps) {}

std::optional<Monomial> TaylorNode::compute_floor() {
    auto fe = eps_.node()->floor();
    if (!fe || cmp_monomial(*fe, Monomial()) >= 0)
        return std::nullopt;
    // eps^n >= fe^n > exp(log(fe) * l_3) for every n.
    Series psi = log_monomial(*fe);
    return Monomial::make({}, scale(psi, Constant(1), log_atom(3)));
}

TailNode::TailNode(Series a, std::size_t k) : SeriesNode(a.height()), a_(std::move(a)), k_(k) {}

std::optional<Term> TailNode::produce(const Monomial *bound, bool &below) {
    auto t = get(a_, k_, bound);
    if (!t) {
        below = bound != nullptr;
        return std::nullopt;
    }
    ++k_;
    return t;
}

std::optional<Monomial> TailNode::compute_floor() { return a_.node()->floor(); }

AboveNode::AboveNode(Series a, Monomial bound)
    : SeriesNode(a.height()), a_(std::move(a)), bound_(std::move(bound)) {}

std::optional<Term> AboveNode::produce(const Monomial *bound, bool &below) {
    const bool outer = bound && cmp_monomial(*bound, bound_) > 0;
    auto t = a_.term_above(i_, outer ? *bound : bound_);
    if (!t) {
        below = outer;
        return std::nullopt;
    }
    ++i_;
    return t;
}

std::optional<Monomial> AboveNode::compute_floor() { return bound_; }

Series make_series(std::shared_ptr<SeriesNode> n) { return Series(std::move(n)); }

Series make_lazy(const Series &s) {
    if (s.is_zero())
        return s;
    return make_series(std::make_shared<LazySumNode>(
        [s](std::size_t k) -> std::optional<Series> {
            if (k == 0)
                return s;
            return std::nullopt;
        },
        s.height()));
}

Series sum_all(std::vector<Series> parts) {
    std::erase_if(parts, [](const Series &s) { return !s.node(); });
    if (parts.empty())
        return Series();
    while (parts.size() > 1) {
        std::vector<Series> next;
        for (std::size_t i = 0; i + 1 < parts.size(); i += 2)
            next.push_back(parts[i] + parts[i + 1]);
        if (parts.size() % 2)
            next.push_back(parts.back());
        parts = std::move(next);
    }
    return parts.front();
}

Series taylor(const Series &eps, TaylorNode::Coefficients coef, std::optional<std::size_t> last) {
    if (eps.is_zero())
        return Series(coef(0));
    return make_series(std::make_shared<TaylorNode>(eps, std::move(coef), last));
}

Series tail(const Series &f, std::size_t k) {
    if (f.is_finite()) {
        std::vector<Term> rest;
        for (std::size_t i = k;; ++i) {
            auto t = f.term(i);
            if (!t)
                break;
            rest.push_back(std::move(*t));
        }
        if (rest.empty())
            return Series();
        unsigned h = 0;
        for (const auto &t : rest)
            h = std::max(h, t.mono.exp_height());
        return make_series(std::make_shared<SeriesNode>(std::move(rest), h));
    }
    return make_series(std::make_shared<TailNode>(f, k));
}

} // namespace detail

using detail::make_series;

namespace {

Series finite_from_sorted(std::vector<Term> terms) {
    if (terms.empty())
        return Series();
    unsigned h = 0;
    for (const auto &t : terms)
        h = std::max(h, t.mono.exp_height());
    return make_series(std::make_shared<SeriesNode>(std::move(terms), h));
}

std::vector<Term> all_terms(const Series &f) {
    std::vector<Term> out;
    for (std::size_t i = 0;; ++i) {
        auto t = f.term(i);
        if (!t)
            break;
        out.push_back(std::move(*t));
    }
    return out;
}

const std::size_t eager_product_limit = 256;

std::strong_ordering from_sign(int s) {
    return s < 0 ? std::strong_ordering::less
                 : s > 0 ? std::strong_ordering::greater : std::strong_ordering::equal;
}

} // namespace

// ---------------------------------------------------------------------------
// Series

Series::Series(const Constant &c) {
    if (!c.is_zero())
        node_ = std::make_shared<SeriesNode>(std::vector<Term>{Term{c, Monomial()}}, 0);
}

Series Series::x() { return monomial(Monomial::x()); }

Series Series::log_iter(unsigned n) {
    if (n > current_budget().max_depth)
        throw depth_exceeded("log depth " + std::to_string(n) + " exceeds the depth budget");
    return monomial(detail::log_atom(n));
}

Series Series::monomial(const Monomial &m, const Constant &c) {
    if (c.is_zero())
        return Series();
    return finite_from_sorted({Term{c, m}});
}

Series Series::from_terms(std::vector<Term> terms) {
    std::erase_if(terms, [](const Term &t) { return t.coef.is_zero(); });
    std::stable_sort(terms.begin(), terms.end(),
                     [](const Term &a, const Term &b) { return mono_less(b.mono, a.mono); });
    std::vector<Term> merged;
    for (auto &t : terms) {
        if (!merged.empty() && mono_equal(merged.back().mono, t.mono)) {
            merged.back().coef += t.coef;
            if (merged.back().coef.is_zero())
                merged.pop_back();
        } else {
            merged.push_back(std::move(t));
        }
    }
    return finite_from_sorted(std::move(merged));
}

bool Series::is_zero() const { return !node_ || !node_->term(0); }

bool Series::is_finite() const { return !node_ || node_->finite(); }

std::optional<Term> Series::term(std::size_t i) const {
    if (!node_)
        return std::nullopt;
    return node_->term(i);
}

std::optional<Term> Series::term_above(std::size_t i, const Monomial &bound) const {
    if (!node_)
        return std::nullopt;
    return node_->term_above(i, bound);
}

Enumeration Series::enumerate(std::size_t n) const {
    Enumeration e;
    for (std::size_t i = 0; i < n; ++i) {
        auto t = term(i);
        if (!t) {
            e.exhausted = true;
            return e;
        }
        e.terms.push_back(std::move(*t));
    }
    e.exhausted = !term(n);
    return e;
}

unsigned Series::height() const { return node_ ? node_->height() : 0; }

namespace {

std::string coef_text(const Constant &a) {
    return a.needs_parens() ? "(" + a.to_string() + ")" : a.to_string();
}

} // namespace

std::string Series::to_string(std::size_t n) const {
    Enumeration e = enumerate(n);
    if (e.terms.empty() && e.exhausted)
        return "0";
    std::string s;
    bool first = true;
    for (const auto &t : e.terms) {
        const bool neg = t.coef.looks_negative();
        const Constant a = neg ? -t.coef : t.coef;
        std::string body;
        if (t.mono.is_one())
            body = coef_text(a);
        else if (a.is_one())
            body = t.mono.to_string();
        else
            body = coef_text(a) + "*" + t.mono.to_string();
        if (first)
            s += (neg ? "-" : "") + body;
        else
            s += (neg ? " - " : " + ") + body;
        first = false;
    }
    if (!e.exhausted) {
        auto next = term(n);
        s += (s.empty() ? "O(" : " + O(") + next->mono.to_string() + ")";
    }
    return s;
}

// ---------------------------------------------------------------------------
// Arithmetic

Series operator+(const Series &a, const Series &b) {
    if (!a.node())
        return b;
    if (!b.node())
        return a;
    if (a.is_finite() && b.is_finite()) {
        std::vector<Term> r;
        std::size_t i = 0, j = 0;
        for (;;) {
            auto ta = a.term(i), tb = b.term(j);
            if (!ta && !tb)
                break;
            std::strong_ordering c = !ta   ? std::strong_ordering::less
                                     : !tb ? std::strong_ordering::greater
                                           : cmp_monomial(ta->mono, tb->mono);
            if (c > 0) {
                r.push_back(*ta);
                ++i;
            } else if (c < 0) {
                r.push_back(*tb);
                ++j;
            } else {
                Constant s = ta->coef + tb->coef;
                if (!s.is_zero())
                    r.push_back(Term{s, ta->mono});
                ++i;
                ++j;
            }
        }
        return finite_from_sorted(std::move(r));
    }
    return make_series(std::make_shared<detail::AddNode>(a, b));
}

Series operator-(const Series &a) { return scale(a, Constant(-1)); }

Series operator-(const Series &a, const Series &b) { return a + (-b); }

Series scale(const Series &f, const Constant &c, const Monomial &m) {
    if (!f.node() || c.is_zero())
        return Series();
    if (c.is_one() && m.is_one())
        return f;
    if (f.is_finite()) {
        std::vector<Term> r;
        for (const auto &t : all_terms(f))
            r.push_back(Term{c * t.coef, m * t.mono});
        return finite_from_sorted(std::move(r));
    }
    if (auto *s = dynamic_cast<const detail::ScaleNode *>(f.node().get()))
        return make_series(std::make_shared<detail::ScaleNode>(c * s->coef(), m * s->mono(), s->arg()));
    return make_series(std::make_shared<detail::ScaleNode>(c, m, f));
}

Series operator*(const Series &a, const Series &b) {
    if (!a.node() || !b.node())
        return Series();
    if (a.is_finite() && b.is_finite()) {
        auto ta = all_terms(a), tb = all_terms(b);
        if (ta.size() == 1)
            return scale(b, ta[0].coef, ta[0].mono);
        if (tb.size() == 1)
            return scale(a, tb[0].coef, tb[0].mono);
        if (ta.size() * tb.size() <= eager_product_limit) {
            std::vector<Term> r;
            for (const auto &x : ta)
                for (const auto &y : tb)
                    r.push_back(Term{x.coef * y.coef, x.mono * y.mono});
            return Series::from_terms(std::move(r));
        }
    } else if (a.is_finite() || b.is_finite()) {
        const Series &fin = a.is_finite() ? a : b;
        const Series &other = a.is_finite() ? b : a;
        auto t0 = fin.term(0);
        if (!fin.term(1))
            return scale(other, t0->coef, t0->mono);
    }
    return make_series(std::make_shared<detail::MulNode>(a, b));
}

Series operator/(const Series &a, const Series &b) { return a * invert(b); }

Term leading_term(const Series &f) {
    auto t = f.term(0);
    if (!t)
        throw zero_series("leading term of the zero series");
    return *t;
}

Series invert(const Series &f) {
    const Term lead = leading_term(f);
    const Constant rinv = Constant(1) / lead.coef;
    const Monomial minv = lead.mono.inverse();
    Series eps = scale(detail::tail(f, 1), rinv, minv);
    Series geo = detail::taylor(
        eps, [](std::size_t n) { return Constant(n % 2 ? -1 : 1); }, std::nullopt);
    return scale(geo, rinv, minv);
}

Series power(const Series &f, const Constant &c) {
    if (c.is_zero())
        return Series(1);
    if (c.is_one())
        return f;
    if (f.is_zero())
        throw not_positive("power of the zero series");
    const Term lead = leading_term(f);
    if (!c.is_integer() && lead.coef.sign() <= 0)
        throw not_positive("non-integer power of a negative series");
    const Constant rinv = Constant(1) / lead.coef;
    Series eps = scale(detail::tail(f, 1), rinv, lead.mono.inverse());
    std::optional<std::size_t> last;
    if (c.is_integer() && c.sign() > 0)
        last = c.as_rational().get_num().get_ui();
    auto binom = std::make_shared<std::vector<Constant>>(1, Constant(1));
    Series body = detail::taylor(
        eps,
        [c, binom](std::size_t n) {
            while (binom->size() <= n) {
                const long k = static_cast<long>(binom->size());
                binom->push_back(binom->back() * (c - Constant(k - 1)) / Constant(k));
            }
            return (*binom)[n];
        },
        last);
    return scale(body, Constant::pow(lead.coef, c), lead.mono.pow(c));
}

// ---------------------------------------------------------------------------
// Order

std::string to_string(DominanceRel::Relation r) {
    switch (r) {
    case DominanceRel::Relation::prec:
        return "prec";
    case DominanceRel::Relation::asymp:
        return "asymp";
    case DominanceRel::Relation::succ:
        return "succ";
    }
    return "?";
}

DominanceRel dominance(const Series &a, const Series &b) {
    const Term ta = leading_term(a);
    const Term tb = leading_term(b);
    auto c = cmp_monomial(ta.mono, tb.mono);
    DominanceRel r;
    if (c < 0)
        r.relation = DominanceRel::Relation::prec;
    else if (c > 0)
        r.relation = DominanceRel::Relation::succ;
    else {
        r.relation = DominanceRel::Relation::asymp;
        r.similar = cmp_const(ta.coef, tb.coef) == 0;
    }
    return r;
}

std::strong_ordering compare(const Series &a, const Series &b) {
    if (a.same(b))
        return std::strong_ordering::equal;
    const std::size_t limit = detail::term_budget();
    for (std::size_t i = 0;; ++i) {
        if (i >= limit)
            throw budget_exhausted("comparison needs more than " + std::to_string(limit) + " terms");
        auto ta = a.term(i), tb = b.term(i);
        if (!ta && !tb)
            return std::strong_ordering::equal;
        if (!tb)
            return from_sign(ta->coef.sign());
        if (!ta)
            return from_sign(-tb->coef.sign());
        auto c = cmp_monomial(ta->mono, tb->mono);
        if (c > 0)
            return from_sign(ta->coef.sign());
        if (c < 0)
            return from_sign(-tb->coef.sign());
        auto k = cmp_const(ta->coef, tb->coef);
        if (k != 0)
            return k;
    }
}

int sign(const Series &f) {
    auto c = compare(f, Series());
    return c < 0 ? -1 : c > 0 ? 1 : 0;
}

Series truncate_above(const Series &f, const Monomial &m) {
    if (f.is_finite()) {
        std::vector<Term> r;
        for (const auto &t : all_terms(f))
            if (cmp_monomial(t.mono, m) > 0)
                r.push_back(t);
        return finite_from_sorted(std::move(r));
    }
    return make_series(std::make_shared<detail::AboveNode>(f, m));
}

} // namespace omega
