#include "mitplan/plan.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "mitplan/errors.hpp"
#include "mitplan/knapsack.hpp"

namespace mitplan {

double item_value(const CandidateMitigation& candidate, double normalized_contribution,
                  const PlanWeights& weights) {
    return weights.likelihood * candidate.max_remediation +
           weights.support * normalized_contribution +
           weights.occurrence * std::log1p(static_cast<double>(candidate.occurrences));
}

MitigationPlan build_plan(std::span<const CandidateMitigation> candidates,
                          const MitigationCatalog& catalog, const std::vector<double>& costs,
                          double budget, const PlanWeights& weights) {
    if (budget < 0.0) throw DomainError("build_plan: negative budget");
    if (costs.size() != catalog.size()) throw DomainError("build_plan: cost vector mismatch");

    MitigationPlan plan;
    plan.budget = budget;
    if (candidates.empty()) {
        plan.advisory = "no candidate mitigations from reconstruction";
        return plan;
    }

    double max_contribution = 0.0;
    for (const CandidateMitigation& c : candidates)
        max_contribution = std::max(max_contribution, c.score_contribution);

    for (const CandidateMitigation& c : candidates) {
        const auto idx = catalog.index_of(c.mitigation);
        if (!idx) throw DomainError("build_plan: " + c.mitigation.value + " not in catalog");
        const double normalized =
            max_contribution > 0.0 ? c.score_contribution / max_contribution : 0.0;
        PlanItem item;
        item.mitigation = c.mitigation;
        item.value = item_value(c, normalized, weights);
        item.cost = costs[*idx];
        item.provenance = c;
        plan.considered.push_back(std::move(item));
    }
    std::sort(plan.considered.begin(), plan.considered.end(),
              [](const PlanItem& a, const PlanItem& b) { return a.mitigation < b.mitigation; });

    std::vector<KnapsackItem> items;
    items.reserve(plan.considered.size());
    for (const PlanItem& it : plan.considered)
        items.push_back({it.mitigation.value, it.value, it.cost});

    const KnapsackSolution sol = knapsack01(items, budget);
    for (std::size_t k : sol.selected) plan.selected.push_back(plan.considered[k]);
    plan.total_value = sol.total_value;
    plan.total_cost = sol.total_cost;
    if (plan.selected.empty())
        plan.advisory = budget <= 0.0 ? "zero planning budget"
                                      : "every candidate exceeds the planning budget";
    return plan;
}

Json plan_to_json(const MitigationPlan& plan) {
    const auto item_json = [](const PlanItem& it) {
        Json countered = Json::array();
        for (const auto& [adv, tech] : it.provenance.countered)
            countered.push_back(Json{{"adversary", adv}, {"technique", tech.render()}});
        return Json{{"mitigation", it.mitigation.value},
                    {"value", it.value},
                    {"cost", it.cost},
                    {"occurrences", it.provenance.occurrences},
                    {"max_remediation", it.provenance.max_remediation},
                    {"score_contribution", it.provenance.score_contribution},
                    {"countered", std::move(countered)}};
    };
    Json selected = Json::array();
    for (const PlanItem& it : plan.selected) selected.push_back(item_json(it));
    Json considered = Json::array();
    for (const PlanItem& it : plan.considered) considered.push_back(item_json(it));
    return Json{{"format", "mitplan-plan"},
                {"version", 1},
                {"budget", plan.budget},
                {"total_value", plan.total_value},
                {"total_cost", plan.total_cost},
                {"residual_budget", plan.budget - plan.total_cost},
                {"advisory", plan.advisory},
                {"selected", std::move(selected)},
                {"considered", std::move(considered)}};
}

std::string plan_to_text(const MitigationPlan& plan) {
    std::ostringstream os;
    os << "mitigation plan (budget " << plan.budget << " units)\n";
    if (!plan.advisory.empty()) os << "advisory: " << plan.advisory << "\n";
    os << "\n  mitigation     value      cost  counters\n";
    os << "  ----------  -------  --------  --------\n";
    char buf[128];
    for (const PlanItem& it : plan.selected) {
        std::snprintf(buf, sizeof(buf), "  %-10s  %7.4f  %8.2f  ", it.mitigation.value.c_str(),
                      it.value, it.cost);
        os << buf;
        std::set<std::string> pairs;
        for (const auto& [adv, tech] : it.provenance.countered)
            pairs.insert(adv + ":" + tech.render());
        bool first = true;
        for (const std::string& p : pairs) {
            if (!first) os << ", ";
            os << p;
            first = false;
        }
        os << "\n";
    }
    std::snprintf(buf, sizeof(buf), "\n  total value %.4f, total cost %.2f, residual %.2f\n",
                  plan.total_value, plan.total_cost, plan.budget - plan.total_cost);
    os << buf;
    return os.str();
}

}  // namespace mitplan
