#include "mitplan/workspace.hpp"

#include <algorithm>
#include <set>

#include "mitplan/errors.hpp"

namespace mitplan {

Workspace Workspace::load(const RunConfig& config,
                          const std::optional<std::filesystem::path>& vomm_path) {
    namespace fs = std::filesystem;
    const fs::path dir = config.data_dir;
    if (!fs::is_directory(dir)) throw IoError("data directory not found: " + dir.string());

    Workspace ws;
    ws.config_ = config;
    ws.strength_ = load_strength_matrix_file(dir / "strength_matrix.json");
    ws.catalog_ = MitigationCatalog::load(dir / "mitigations.json");
    ws.pct_ = PctCostTable::load(dir / "pctcost_defender.json");
    ws.adv_costs_ = AdvCostTable::load(dir / "pctcost_adversary.json");
    ws.spread_ = SpreadTable::load(dir / "spread_table.json");
    ws.effectiveness_ = EffectivenessTable::load(dir / "effectiveness.json");
    ws.adversaries_ = load_adversary_profiles(dir / "adversaries.json");
    ws.difficulties_ = load_practice_difficulties_file(dir / "practice_difficulty.json");

    // The strength matrix and the catalog must describe the same mitigation
    // set; maturity vectors are permuted from matrix order to catalog order.
    std::set<MitigationId> matrix_set(ws.strength_.mitigations.begin(),
                                      ws.strength_.mitigations.end());
    for (const auto& e : ws.catalog_.entries)
        if (!matrix_set.count(e.id))
            throw ValidationError("mitigation " + e.id.value +
                                  " in catalog but missing from the strength matrix");
    if (matrix_set.size() != ws.catalog_.size())
        throw ValidationError("strength matrix lists mitigations absent from the catalog");
    ws.maturity_permutation_.resize(ws.catalog_.size());
    for (std::size_t i = 0; i < ws.catalog_.size(); ++i)
        ws.maturity_permutation_[i] = ws.strength_.mitigation_index(ws.catalog_.entries[i].id);

    // Difficulty table must cover every practice in the matrix.
    std::set<PracticeId> difficulty_set;
    for (const PracticeDifficulty& d : ws.difficulties_) difficulty_set.insert(d.practice);
    for (const PracticeId& p : ws.strength_.practices)
        if (!difficulty_set.count(p))
            throw ValidationError("practice " + p.value + " missing from the difficulty table");

    std::vector<TechniqueToken> extra_vocab;
    for (const AdversaryProfile& p : ws.adversaries_)
        extra_vocab.insert(extra_vocab.end(), p.observed_techniques.begin(),
                           p.observed_techniques.end());

    if (vomm_path) {
        ws.vomm_ = VommModel::load(*vomm_path);
    } else {
        const auto corpus =
            load_corpus_dir(dir / "flows", ws.flow_warnings_, FlowParseOptions{});
        ws.vomm_ = VommModel::fit(corpus, config.vomm_max_order, config.vomm_alpha,
                                  config.vomm_min_support, extra_vocab);
    }

    ws.technique_index_ = TechniqueIndex::build(ws.vomm_, ws.adversaries_, ws.effectiveness_);
    return ws;
}

EnvModel Workspace::env_model() const {
    EnvModel m;
    m.vomm = &vomm_;
    m.effectiveness = &effectiveness_;
    m.adv_costs = &adv_costs_;
    m.spread = &spread_;
    m.catalog = &catalog_;
    m.pct = &pct_;
    m.scaler = &scaler_;
    m.technique_index = technique_index_;
    return m;
}

std::vector<double> Workspace::maturity_for(const OrgProfile& org) const {
    const MaturityVector mv = mitigation_maturity(org, strength_, config_.q_exponent);
    std::vector<double> out(catalog_.size());
    for (std::size_t i = 0; i < catalog_.size(); ++i)
        out[i] = mv.values[maturity_permutation_[i]];
    return out;
}

std::vector<AdversaryProfile> Workspace::episode_adversaries(std::size_t n) const {
    if (n > adversaries_.size())
        throw ConfigError("requested " + std::to_string(n) + " adversaries but only " +
                          std::to_string(adversaries_.size()) + " profiles are bundled");
    return {adversaries_.begin(), adversaries_.begin() + static_cast<std::ptrdiff_t>(n)};
}

}  // namespace mitplan
