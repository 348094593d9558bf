#include "mitplan/oracle.hpp"

#include <algorithm>

#include "mitplan/errors.hpp"
#include "mitplan/knapsack.hpp"

namespace mitplan {

std::map<TechniqueToken, double> importance_weights(const VommModel& vomm,
                                                    const AdversaryProfile& adversary) {
    const std::vector<double> base = vomm.next_distribution({});
    std::map<TechniqueToken, double> w;
    double total = 0.0;
    for (const TechniqueToken& t : adversary.observed_techniques) {
        double vomm_p;
        if (auto idx = vomm.token_index(t)) {
            vomm_p = base[*idx];
        } else {
            // Technique outside the fitted vocab: fall back to the uniform
            // floor so it still carries weight.
            vomm_p = 1.0 / static_cast<double>(vomm.vocab_size());
        }
        double prior = 1.0;
        if (!adversary.technique_frequency.empty()) {
            auto it = adversary.technique_frequency.find(t);
            prior = (it == adversary.technique_frequency.end()) ? 0.0 : it->second;
        }
        const double raw = vomm_p * prior;
        w[t] = raw;
        total += raw;
    }
    if (total <= 0.0) {
        // Degenerate frequencies: uniform over the observed set.
        const double u = 1.0 / static_cast<double>(adversary.observed_techniques.size());
        for (auto& [t, v] : w) v = u;
        return w;
    }
    for (auto& [t, v] : w) v /= total;
    return w;
}

std::vector<BenefitScore> proxy_benefits(const std::vector<AdversaryProfile>& adversaries,
                                         const VommModel& vomm, const EffectivenessTable& table,
                                         const MitigationCatalog& catalog,
                                         const std::vector<double>& costs) {
    if (costs.size() != catalog.size())
        throw DomainError("proxy_benefits: cost vector length mismatch");

    std::vector<BenefitScore> scores;
    scores.reserve(catalog.size());
    for (std::size_t i = 0; i < catalog.size(); ++i)
        scores.push_back({catalog.entries[i].id, 0.0, costs[i]});

    for (const AdversaryProfile& adv : adversaries) {
        const auto weights = importance_weights(vomm, adv);
        for (const auto& [tech, w] : weights) {
            for (const MitigationId& m : table.covering(tech)) {
                const auto idx = catalog.index_of(m);
                if (!idx) continue;  // coverage outside the catalog
                const double p = (table.effectiveness(adv, tech, m) - 1.0) / 4.0;
                scores[*idx].benefit += w * p;
            }
        }
    }
    return scores;
}

PortfolioAction oracle_select(const std::vector<AdversaryProfile>& adversaries,
                              const std::vector<double>& maturity, const VommModel& vomm,
                              const EffectivenessTable& table, const MitigationCatalog& catalog,
                              const PctCostTable& pct, const MaturityScaler& scaler,
                              double budget) {
    const std::vector<double> costs = portfolio_costs(catalog, pct, scaler, maturity);
    const std::vector<BenefitScore> scores = proxy_benefits(adversaries, vomm, table, catalog,
                                                            costs);

    // Candidate set: covers at least one observed technique and is
    // individually affordable.
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < catalog.size(); ++i) {
        if (costs[i] > budget + kBudgetSlack) continue;
        bool relevant = false;
        for (const AdversaryProfile& adv : adversaries) {
            for (const TechniqueToken& t : adv.observed_techniques)
                if (table.covers(t, catalog.entries[i].id)) { relevant = true; break; }
            if (relevant) break;
        }
        if (relevant) candidates.push_back(i);
    }

    PortfolioAction action = PortfolioAction::empty(catalog.size());
    if (candidates.empty()) return action;

    std::vector<KnapsackItem> items;
    items.reserve(candidates.size());
    for (std::size_t i : candidates)
        items.push_back({catalog.entries[i].id.value, scores[i].benefit, costs[i]});

    const KnapsackSolution sol = knapsack01(items, budget);
    for (std::size_t k : sol.selected) {
        action.selected[candidates[k]] = 1;
        action.total_cost += costs[candidates[k]];
    }
    return action;
}

}  // namespace mitplan
