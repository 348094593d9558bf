#include "mitplan/knapsack.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mitplan/errors.hpp"

namespace mitplan {

namespace {

struct State {
    double value = 0.0;
    std::vector<std::size_t> picks;  // positions in id-sorted order, ascending
};

// Higher value first, then fewer items, then lexicographically smaller pick
// list (positions follow id order, so this is the id tie-break).
bool better(const State& a, const State& b) {
    if (a.value != b.value) return a.value > b.value;
    if (a.picks.size() != b.picks.size()) return a.picks.size() < b.picks.size();
    return a.picks < b.picks;
}

}  // namespace

KnapsackSolution knapsack01(std::span<const KnapsackItem> items, double budget,
                            double resolution) {
    if (budget < 0.0) throw DomainError("knapsack01: negative budget");
    if (resolution <= 0.0) throw DomainError("knapsack01: resolution must be positive");
    for (const KnapsackItem& it : items) {
        if (it.cost <= 0.0) throw DomainError("knapsack01: item cost must be positive");
        if (it.value < 0.0) throw DomainError("knapsack01: negative item value");
    }

    // Process in id order so pick lists compare as id lists.
    std::vector<std::size_t> order(items.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return items[a].id < items[b].id; });

    const auto scale = [&](double cost) {
        return static_cast<long long>(std::ceil(cost / resolution - 1e-9));
    };
    const long long capacity = static_cast<long long>(std::floor(budget / resolution + 1e-9));

    std::vector<long long> weights(items.size());
    for (std::size_t i = 0; i < items.size(); ++i) weights[i] = scale(items[i].cost);

    std::vector<State> dp(static_cast<std::size_t>(capacity) + 1);
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
        const std::size_t i = order[pos];
        const long long w = weights[i];
        if (w > capacity) continue;
        for (long long c = capacity; c >= w; --c) {
            State cand = dp[static_cast<std::size_t>(c - w)];
            cand.value += items[i].value;
            cand.picks.push_back(pos);
            if (better(cand, dp[static_cast<std::size_t>(c)]))
                dp[static_cast<std::size_t>(c)] = std::move(cand);
        }
    }

    const State& best = dp[static_cast<std::size_t>(capacity)];
    KnapsackSolution out;
    out.total_value = best.value;
    for (std::size_t pos : best.picks) {
        out.selected.push_back(order[pos]);
        out.total_cost += items[order[pos]].cost;
    }
    std::sort(out.selected.begin(), out.selected.end());
    return out;
}

}  // namespace mitplan
