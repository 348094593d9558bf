#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "mitplan/adversary.hpp"
#include "mitplan/config.hpp"
#include "mitplan/cost_model.hpp"
#include "mitplan/flow.hpp"
#include "mitplan/maturity.hpp"
#include "mitplan/org_synth.hpp"
#include "mitplan/sim_env.hpp"
#include "mitplan/vomm.hpp"

namespace mitplan {

// Loads the data directory and wires every model the pipeline needs:
//   strength_matrix.json, mitigations.json, pctcost_defender.json,
//   pctcost_adversary.json, spread_table.json, effectiveness.json,
//   adversaries.json, practice_difficulty.json, flows/*.json
// The VOMM is fitted from the bundled flow corpus unless a serialized model
// is supplied. Immutable after load; shareable across threads.
class Workspace {
public:
    static Workspace load(const RunConfig& config,
                          const std::optional<std::filesystem::path>& vomm_path = {});

    const RunConfig& config() const { return config_; }
    const StrengthMatrix& strength() const { return strength_; }
    const MitigationCatalog& catalog() const { return catalog_; }
    const PctCostTable& pct() const { return pct_; }
    const AdvCostTable& adv_costs() const { return adv_costs_; }
    const SpreadTable& spread() const { return spread_; }
    const EffectivenessTable& effectiveness() const { return effectiveness_; }
    const std::vector<AdversaryProfile>& adversaries() const { return adversaries_; }
    const std::vector<PracticeDifficulty>& difficulties() const { return difficulties_; }
    const MaturityScaler& scaler() const { return scaler_; }
    const VommModel& vomm() const { return vomm_; }
    const TechniqueIndex& technique_index() const { return technique_index_; }
    const FlowWarnings& flow_warnings() const { return flow_warnings_; }

    EnvModel env_model() const;

    // Maturity vector in catalog order for one organization.
    std::vector<double> maturity_for(const OrgProfile& org) const;

    // The episode's fixed adversary set: the first n profiles in file order.
    std::vector<AdversaryProfile> episode_adversaries(std::size_t n) const;

private:
    RunConfig config_;
    StrengthMatrix strength_;
    MitigationCatalog catalog_;
    PctCostTable pct_;
    AdvCostTable adv_costs_;
    SpreadTable spread_;
    EffectivenessTable effectiveness_;
    std::vector<AdversaryProfile> adversaries_;
    std::vector<PracticeDifficulty> difficulties_;
    MaturityScaler scaler_;
    VommModel vomm_;
    TechniqueIndex technique_index_;
    FlowWarnings flow_warnings_;
    // Column permutation from strength-matrix mitigation order to catalog
    // order.
    std::vector<std::size_t> maturity_permutation_;
};

}  // namespace mitplan
