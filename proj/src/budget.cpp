#include "omega/budget.hpp"

#include "omega/error.hpp"

namespace omega {

namespace {
thread_local Budget active_budget;
thread_local std::size_t work_used = 0;
} // namespace

const Budget &current_budget() noexcept { return active_budget; }

void charge_work(std::size_t units) {
    work_used += units;
    if (active_budget.max_work && work_used > active_budget.max_work)
        throw budget_exhausted("work budget of " + std::to_string(active_budget.max_work) +
                               " steps exhausted");
}

BudgetScope::BudgetScope(const Budget &b) : saved_(active_budget), saved_work_(work_used) {
    active_budget = b;
    work_used = 0;
}

BudgetScope::~BudgetScope() {
    active_budget = saved_;
    work_used = saved_work_;
}

} // namespace omega
