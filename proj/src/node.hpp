#pragma once

#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <vector>

#include "omega/analysis.hpp"
#include "omega/core.hpp"

namespace omega::detail {

struct MonoData {
    Word word;
    Series expo;
    unsigned height = 0;

    mutable std::mutex mu;
    mutable std::optional<Series> log_memo;
    mutable std::optional<Series> dagger_memo;
    mutable std::vector<std::pair<Series, Series>> compose_memo; // (g, m o g)
};

/// Memoized lazy term stream. Terms are produced on demand by `produce` and
/// kept, so every reader sees the same prefix. A node that fails while
/// producing a term keeps the failure and rethrows it on later reads.
class SeriesNode {
public:
    explicit SeriesNode(unsigned height) : height_(height) {}
    SeriesNode(std::vector<Term> terms, unsigned height);
    virtual ~SeriesNode() = default;

    SeriesNode(const SeriesNode &) = delete;
    SeriesNode &operator=(const SeriesNode &) = delete;

    std::optional<Term> term(std::size_t i);
    /// The i-th term when it exists and lies strictly above `bound`.
    /// Cancellations below the bound are never chased.
    std::optional<Term> term_above(std::size_t i, const Monomial &bound);
    unsigned height() const { return height_; }
    bool finite() const { return finite_; }

    /// Certified lower bound on every monomial of the support.
    std::optional<Monomial> floor();

    // Memo slots for analysis and composition.
    std::mutex memo_mu;
    std::optional<Series> exp_memo;
    std::optional<SeriesSplit> split_memo;
    std::optional<Series> derive_memo;
    std::vector<std::pair<Series, Series>> compose_memo; // (g, f o g)
    std::vector<Series> log_iter_memo;                  // log^(k+1)(f)

protected:
    /// Next term. With a bound, may instead report that no further term lies
    /// above it by returning nothing with `below` set.
    virtual std::optional<Term> produce(const Monomial *bound, bool &below);
    virtual std::optional<Monomial> compute_floor() { return std::nullopt; }

private:
    std::optional<Term> fetch(std::size_t i, const Monomial *bound);

    std::recursive_mutex mu_;
    std::vector<Term> terms_;
    bool done_ = false;
    bool busy_ = false;
    bool finite_ = false;
    std::exception_ptr poison_;
    unsigned height_;
    bool floor_done_ = false;
    std::optional<Monomial> floor_;
};

class AddNode : public SeriesNode {
public:
    AddNode(Series a, Series b);
    const Series &lhs() const { return a_; }
    const Series &rhs() const { return b_; }

protected:
    std::optional<Term> produce(const Monomial *bound, bool &below) override;
    std::optional<Monomial> compute_floor() override;

private:
    Series a_, b_;
    std::size_t i_ = 0, j_ = 0;
};

class ScaleNode : public SeriesNode {
public:
    ScaleNode(Constant c, Monomial m, Series a);
    const Constant &coef() const { return c_; }
    const Monomial &mono() const { return m_; }
    const Series &arg() const { return a_; }

protected:
    std::optional<Term> produce(const Monomial *bound, bool &below) override;
    std::optional<Monomial> compute_floor() override;

private:
    Constant c_;
    Monomial m_;
    Series a_;
    std::size_t i_ = 0;
};

class MulNode : public SeriesNode {
public:
    MulNode(Series a, Series b);

protected:
    std::optional<Term> produce(const Monomial *bound, bool &below) override;
    std::optional<Monomial> compute_floor() override;

private:
    struct Cell {
        std::size_t i, j;
        Term t;
    };
    Series a_, b_;
    std::vector<Cell> frontier_;
    bool started_ = false;
    void push(std::size_t i, std::size_t j);
};

/// Sum of a generated sequence of series whose leading monomials do not
/// increase. Each output term pulls in every item that can still reach it.
class LazySumNode : public SeriesNode {
public:
    using Generator = std::function<std::optional<Series>(std::size_t)>;
    LazySumNode(Generator gen, unsigned height);

protected:
    std::optional<Term> produce(const Monomial *bound, bool &below) override;

private:
    Generator gen_;
    std::size_t next_ = 0;
    bool gen_done_ = false;
    std::vector<Series> items_;
    std::vector<std::size_t> pos_;
    std::optional<Monomial> last_lead_;
};

/// sum c_n eps^n for eps < 1.
class TaylorNode : public LazySumNode {
public:
    using Coefficients = std::function<Constant(std::size_t)>;
    TaylorNode(Series eps, Coefficients coef, std::optional<std::size_t> last);

protected:
    std::optional<Monomial> compute_floor() override;

private:
    Series eps_;
};

class TailNode : public SeriesNode {
public:
    TailNode(Series a, std::size_t k);

protected:
    std::optional<Term> produce(const Monomial *bound, bool &below) override;
    std::optional<Monomial> compute_floor() override;

private:
    Series a_;
    std::size_t k_;
};

/// Terms of a strictly above a monomial bound.
class AboveNode : public SeriesNode {
public:
    AboveNode(Series a, Monomial bound);

protected:
    std::optional<Term> produce(const Monomial *bound, bool &below) override;
    std::optional<Monomial> compute_floor() override;

private:
    Series a_;
    Monomial bound_;
    std::size_t i_ = 0;
};

/// Finite series wrapped so that it is not mistaken for an eager one; used
/// only by tests of the lazy machinery.
Series make_lazy(const Series &s);

/// Balanced sum, keeping AddNode structure.
Series sum_all(std::vector<Series> parts);

Series make_series(std::shared_ptr<SeriesNode> n);

/// sum coef(n) eps^n, stopping after `last` when given.
Series taylor(const Series &eps, TaylorNode::Coefficients coef, std::optional<std::size_t> last);

/// Terms from index k on.
Series tail(const Series &f, std::size_t k);

/// Monomial l_n, cached.
const Monomial &log_atom(unsigned n);

bool mono_less(const Monomial &a, const Monomial &b);
bool mono_equal(const Monomial &a, const Monomial &b);

std::size_t term_budget();

} // namespace omega::detail
