#pragma once

#include <map>
#include <vector>

#include "mitplan/adversary.hpp"
#include "mitplan/cost_model.hpp"
#include "mitplan/sim_env.hpp"
#include "mitplan/vomm.hpp"

namespace mitplan {

struct BenefitScore {
    MitigationId mitigation;
    double benefit = 0.0;
    double cost = 0.0;
};

// w(a, t) over the adversary's observed techniques: VOMM base probability of
// t times the profile's empirical frequency (uniform when absent),
// normalized to sum 1 over the observed set.
std::map<TechniqueToken, double> importance_weights(const VommModel& vomm,
                                                    const AdversaryProfile& adversary);

// benefit(m) = sum over adversaries and their observed techniques of
// w(a,t) * p(a,t,m), with p the same (effectiveness-1)/4 remediation
// likelihood the simulator uses. Only covered (t, m) pairs contribute.
std::vector<BenefitScore> proxy_benefits(const std::vector<AdversaryProfile>& adversaries,
                                         const VommModel& vomm, const EffectivenessTable& table,
                                         const MitigationCatalog& catalog,
                                         const std::vector<double>& costs);

// Non-learning baseline: exact benefit maximization under the budget over
// the candidate set (mitigations covering at least one observed technique,
// each individually affordable). Deterministic; ties break toward fewer
// mitigations then lexicographic ids.
PortfolioAction oracle_select(const std::vector<AdversaryProfile>& adversaries,
                              const std::vector<double>& maturity, const VommModel& vomm,
                              const EffectivenessTable& table, const MitigationCatalog& catalog,
                              const PctCostTable& pct, const MaturityScaler& scaler,
                              double budget = kEpisodeBudgetUnits);

}  // namespace mitplan
