#include "omega/monomial.hpp"

#include <array>
#include <mutex>

#include "node.hpp"
#include "omega/budget.hpp"
#include "omega/error.hpp"
#include "omega/series.hpp"

namespace omega {

using detail::log_atom;
using detail::MonoData;

namespace {

Word word_add(const Word &a, const Word &b) {
    Word r;
    r.reserve(a.size() + b.size());
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
            r.push_back(a[i++]);
        } else if (i == a.size() || b[j].first < a[i].first) {
            r.push_back(b[j++]);
        } else {
            Constant s = a[i].second + b[j].second;
            if (!s.is_zero())
                r.emplace_back(a[i].first, s);
            ++i;
            ++j;
        }
    }
    return r;
}

Word word_scale(const Word &w, const Constant &c) {
    Word r;
    if (c.is_zero())
        return r;
    r.reserve(w.size());
    for (const auto &[n, a] : w)
        r.emplace_back(n, a * c);
    return r;
}

Word normalize_word(Word w) {
    std::stable_sort(w.begin(), w.end(),
                     [](const auto &p, const auto &q) { return p.first < q.first; });
    Word r;
    for (auto &[n, a] : w) {
        if (!r.empty() && r.back().first == n)
            r.back().second += a;
        else
            r.emplace_back(n, a);
        if (r.back().second.is_zero())
            r.pop_back();
    }
    return r;
}

Monomial build(Word word, Series expo) {
    if (word.empty() && expo.is_zero())
        return Monomial();
    auto d = std::make_shared<MonoData>();
    d->word = std::move(word);
    d->expo = std::move(expo);
    d->height = d->expo.is_zero() ? 0 : d->expo.height() + 1;
    return Monomial(std::shared_ptr<const MonoData>(std::move(d)));
}

// Moves the terms c*l_{n+1} of a purely infinite series into a word.
void extract_log_terms(const Series &p, Word &word, Series &rest) {
    const Monomial one;
    if (p.is_finite()) {
        std::vector<Term> kept;
        for (std::size_t i = 0;; ++i) {
            auto t = p.term(i);
            if (!t)
                break;
            if (cmp_monomial(t->mono, one) <= 0)
                throw not_purely_infinite("exponent has a term <= 1: " + p.to_string());
            if (auto k = t->mono.as_log_atom(); k && *k >= 1)
                word.emplace_back(*k - 1, t->coef);
            else
                kept.push_back(*t);
        }
        rest = word.empty() ? p : Series::from_terms(std::move(kept));
        return;
    }
    std::vector<Term> found;
    const auto fl = p.node()->floor();
    const bool certified = fl && cmp_monomial(*fl, log_atom(1)) > 0;
    if (!certified) {
        const Monomial &deepest = log_atom(current_budget().max_depth + 1);
        const std::size_t limit = detail::term_budget();
        for (std::size_t i = 0;; ++i) {
            auto t = p.term(i);
            if (!t)
                break;
            if (cmp_monomial(t->mono, one) <= 0)
                throw not_purely_infinite("exponent has a term <= 1");
            if (auto k = t->mono.as_log_atom(); k && *k >= 1)
                found.push_back(*t);
            if (cmp_monomial(t->mono, deepest) < 0)
                break;
            if (i + 1 >= limit)
                throw budget_exhausted("cannot certify the log part of an exponent within the term budget");
        }
    }
    for (const auto &t : found)
        word.emplace_back(*t.mono.as_log_atom() - 1, t.coef);
    rest = found.empty() ? p : p - Series::from_terms(std::move(found));
}

std::string exponent_text(const Constant &a) {
    if (a.is_integer())
        return a.to_string();
    return "(" + a.to_string() + ")";
}

int const_sign(const Constant &c) { return c.sign(); }

} // namespace

namespace detail {

const Monomial &log_atom(unsigned n) {
    static std::mutex mu;
    static std::vector<std::unique_ptr<Monomial>> cache;
    std::lock_guard lock(mu);
    while (cache.size() <= n) {
        auto d = std::make_shared<MonoData>();
        d->word.emplace_back(static_cast<unsigned>(cache.size()), Constant(1));
        cache.push_back(std::make_unique<Monomial>(std::shared_ptr<const MonoData>(std::move(d))));
    }
    return *cache[n];
}

bool mono_less(const Monomial &a, const Monomial &b) { return cmp_monomial(a, b) < 0; }

bool mono_equal(const Monomial &a, const Monomial &b) { return cmp_monomial(a, b) == 0; }

std::size_t term_budget() { return current_budget().max_terms; }

} // namespace detail

Monomial Monomial::x() { return log_atom(0); }

Monomial Monomial::log_power(unsigned n, const Constant &a) {
    if (a.is_zero())
        return Monomial();
    if (a.is_one())
        return log_atom(n);
    return build(Word{{n, a}}, Series());
}

Monomial Monomial::make(Word word, const Series &expo) {
    word = normalize_word(std::move(word));
    Series rest;
    if (!expo.is_zero()) {
        Word extra;
        extract_log_terms(expo, extra, rest);
        word = word_add(word, normalize_word(std::move(extra)));
    }
    if (word.size() == 1 && word[0].second.is_one() && rest.is_zero())
        return log_atom(word[0].first);
    return build(std::move(word), std::move(rest));
}

const Word &Monomial::word() const {
    static const Word empty;
    return data_ ? data_->word : empty;
}

const Series &Monomial::expo() const {
    static const Series zero;
    return data_ ? data_->expo : zero;
}

std::optional<unsigned> Monomial::as_log_atom() const {
    if (!data_ || data_->word.size() != 1 || !data_->word[0].second.is_one() ||
        !data_->expo.is_zero())
        return std::nullopt;
    return data_->word[0].first;
}

unsigned Monomial::exp_height() const { return data_ ? data_->height : 0; }

Monomial Monomial::inverse() const {
    if (!data_)
        return *this;
    return build(word_scale(data_->word, Constant(-1)), -data_->expo);
}

Monomial Monomial::pow(const Constant &c) const {
    if (!data_ || c.is_zero())
        return Monomial();
    if (c.is_one())
        return *this;
    return build(word_scale(data_->word, c), scale(data_->expo, c));
}

Monomial operator*(const Monomial &a, const Monomial &b) {
    if (a.is_one())
        return b;
    if (b.is_one())
        return a;
    Word w = word_add(a.word(), b.word());
    Series e = a.expo() + b.expo();
    if (w.size() == 1 && w[0].second.is_one() && e.is_zero())
        return log_atom(w[0].first);
    return build(std::move(w), std::move(e));
}

std::string Monomial::to_string() const {
    if (!data_)
        return "1";
    std::string s;
    for (const auto &[n, a] : data_->word) {
        if (!s.empty())
            s += "*";
        if (n == 0)
            s += "x";
        else if (n == 1)
            s += "log(x)";
        else
            s += "log^" + std::to_string(n) + "(x)";
        if (!a.is_one())
            s += "^" + exponent_text(a);
    }
    if (!data_->expo.is_zero()) {
        if (!s.empty())
            s += "*";
        s += "exp(" + data_->expo.to_string(32) + ")";
    }
    return s;
}

std::strong_ordering cmp_monomial(const Monomial &a, const Monomial &b) {
    if (a.same(b))
        return std::strong_ordering::equal;

    // First word index whose exponents differ.
    const Word &wa = a.word(), &wb = b.word();
    std::optional<unsigned> wn;
    Constant wdiff;
    {
        std::size_t i = 0, j = 0;
        while (i < wa.size() || j < wb.size()) {
            if (j == wb.size() || (i < wa.size() && wa[i].first < wb[j].first)) {
                wn = wa[i].first;
                wdiff = wa[i].second;
                break;
            }
            if (i == wa.size() || wb[j].first < wa[i].first) {
                wn = wb[j].first;
                wdiff = -wb[j].second;
                break;
            }
            if (!(wa[i].second == wb[j].second)) {
                wn = wa[i].first;
                wdiff = wa[i].second - wb[j].second;
                break;
            }
            ++i;
            ++j;
        }
    }

    // First differing term of the exponents, skipped once it can no longer
    // beat the word difference l_{n+1}.
    std::optional<Monomial> emono;
    int esign = 0;
    const Series &ea = a.expo(), &eb = b.expo();
    if (!ea.same(eb)) {
        const Monomial *bound = wn ? &log_atom(*wn + 1) : nullptr;
        const std::size_t limit = detail::term_budget();
        for (std::size_t i = 0;; ++i) {
            if (i >= limit)
                throw budget_exhausted("monomial comparison exceeds the term budget");
            auto ta = ea.term(i), tb = eb.term(i);
            if (!ta && !tb)
                break;
            if (bound) {
                const bool a_low = !ta || cmp_monomial(ta->mono, *bound) < 0;
                const bool b_low = !tb || cmp_monomial(tb->mono, *bound) < 0;
                if (a_low && b_low)
                    break;
            }
            if (!tb) {
                emono = ta->mono;
                esign = const_sign(ta->coef);
                break;
            }
            if (!ta) {
                emono = tb->mono;
                esign = -const_sign(tb->coef);
                break;
            }
            auto c = cmp_monomial(ta->mono, tb->mono);
            if (c > 0) {
                emono = ta->mono;
                esign = const_sign(ta->coef);
                break;
            }
            if (c < 0) {
                emono = tb->mono;
                esign = -const_sign(tb->coef);
                break;
            }
            if (!(ta->coef == tb->coef)) {
                int s = const_sign(ta->coef - tb->coef);
                if (s != 0) {
                    emono = ta->mono;
                    esign = s;
                    break;
                }
            }
        }
    }

    int s = 0;
    if (wn && emono)
        s = cmp_monomial(*emono, log_atom(*wn + 1)) > 0 ? esign : const_sign(wdiff);
    else if (wn)
        s = const_sign(wdiff);
    else if (emono)
        s = esign;
    return s < 0 ? std::strong_ordering::less
                 : s > 0 ? std::strong_ordering::greater : std::strong_ordering::equal;
}

Series log_monomial(const Monomial &m) {
    const MonoData *d = m.data();
    if (!d)
        return Series();
    {
        std::lock_guard lock(d->mu);
        if (d->log_memo)
            return *d->log_memo;
    }
    std::vector<Term> terms;
    for (const auto &[n, a] : d->word) {
        if (n + 1 > current_budget().max_depth)
            throw depth_exceeded("log depth " + std::to_string(n + 1) + " exceeds the depth budget");
        terms.push_back(Term{a, log_atom(n + 1)});
    }
    Series r = Series::from_terms(std::move(terms)) + d->expo;
    std::lock_guard lock(d->mu);
    if (!d->log_memo)
        d->log_memo = r;
    return *d->log_memo;
}

Monomial exp_purely_infinite(const Series &p) { return Monomial::make({}, p); }

} // namespace omega
