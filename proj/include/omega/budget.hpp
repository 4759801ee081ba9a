#pragma once

#include <cstddef>

namespace omega {

/// Limits shared by every lazy computation running on the current thread.
struct Budget {
    std::size_t max_terms = 256;
    unsigned max_precision = 4096; // bits
    unsigned max_depth = 8;
    /// Cap on term productions per scope, 0 for none. Deterministic stand-in
    /// for a time limit in batch runs.
    std::size_t max_work = 0;
};

/// The budget in force on this thread.
const Budget &current_budget() noexcept;

/// Counts units of work; throws budget_exhausted past max_work.
void charge_work(std::size_t units = 1);

/// Installs a budget for the lifetime of the scope and restarts the work
/// count.
class BudgetScope {
public:
    explicit BudgetScope(const Budget &b);
    ~BudgetScope();

    BudgetScope(const BudgetScope &) = delete;
    BudgetScope &operator=(const BudgetScope &) = delete;

private:
    Budget saved_;
    std::size_t saved_work_;
};

} // namespace omega
