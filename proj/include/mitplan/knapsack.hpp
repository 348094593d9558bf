#pragma once

#include <span>
#include <string>
#include <vector>

namespace mitplan {

struct KnapsackItem {
    std::string id;
    double value = 0.0;
    double cost = 0.0;
};

struct KnapsackSolution {
    std::vector<std::size_t> selected;  // indices into the input span, ascending
    double total_value = 0.0;
    double total_cost = 0.0;  // true (unrounded) cost
};

// Exact 0-1 knapsack by dynamic programming over integer-scaled costs
// (default 0.1-unit resolution, costs rounded up so feasibility is
// conservative). Ties break toward higher value, then fewer items, then the
// lexicographically smallest id set. Deterministic.
KnapsackSolution knapsack01(std::span<const KnapsackItem> items, double budget,
                            double resolution = 0.1);

}  // namespace mitplan
