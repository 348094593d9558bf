#pragma once

#include <span>
#include <string>
#include <vector>

#include "mitplan/beam.hpp"
#include "mitplan/cost_model.hpp"
#include "mitplan/jsonio.hpp"

namespace mitplan {

struct PlanWeights {
    double likelihood = 0.5;   // max remediation likelihood
    double support = 0.3;      // normalized path-score contribution
    double occurrence = 0.2;   // log(1 + occurrences)
};

struct PlanItem {
    MitigationId mitigation;
    double value = 0.0;
    double cost = 0.0;
    CandidateMitigation provenance;
};

// v_i = w1 * max_remediation + w2 * normalized_contribution + w3 * log(1 + n).
// `normalized_contribution` must already be scaled to [0,1] across the
// candidate pool.
double item_value(const CandidateMitigation& candidate, double normalized_contribution,
                  const PlanWeights& weights = {});

struct MitigationPlan {
    std::vector<PlanItem> selected;
    std::vector<PlanItem> considered;  // full candidate pool with values
    double budget = 0.0;
    double total_value = 0.0;
    double total_cost = 0.0;
    std::string advisory;  // non-empty when the plan is degenerate
};

// Exact 0-1 knapsack over the candidate pool at the planning-cycle budget.
// Costs are the maturity-scaled episode costs of each mitigation. An
// all-over-budget pool yields an empty plan with an advisory note.
MitigationPlan build_plan(std::span<const CandidateMitigation> candidates,
                          const MitigationCatalog& catalog, const std::vector<double>& costs,
                          double budget = kEpisodeBudgetUnits, const PlanWeights& weights = {});

Json plan_to_json(const MitigationPlan& plan);
std::string plan_to_text(const MitigationPlan& plan);

}  // namespace mitplan
