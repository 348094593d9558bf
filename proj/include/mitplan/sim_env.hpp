#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "mitplan/adversary.hpp"
#include "mitplan/cost_model.hpp"
#include "mitplan/rng.hpp"
#include "mitplan/types.hpp"
#include "mitplan/vomm.hpp"

namespace mitplan {

// Fixed global technique index: VOMM vocab, adversary observed sets, and
// coverage keys, sorted canonically. Observations and all technique-indexed
// features share this ordering.
struct TechniqueIndex {
    std::vector<TechniqueToken> tokens;

    static TechniqueIndex build(const VommModel& vomm,
                                const std::vector<AdversaryProfile>& profiles,
                                const EffectivenessTable& effectiveness);
    std::optional<std::size_t> index_of(const TechniqueToken& t) const;
    std::size_t size() const { return tokens.size(); }
};

// What the defender sees: its maturity vector plus the stacked binary
// observed-technique indicators of the episode's adversaries. Static for the
// whole episode.
struct Observation {
    std::vector<double> maturity;                       // M, catalog order
    std::vector<std::vector<std::uint8_t>> technique_matrix;  // N rows x T columns

    // M + N*T feature vector consumed by the Q-network.
    std::vector<double> flatten() const;
};

// Multi-hot mitigation selection, fixed for the episode.
struct PortfolioAction {
    std::vector<std::uint8_t> selected;  // length M
    double total_cost = 0.0;

    std::size_t count() const;
    std::vector<std::size_t> indices() const;

    static PortfolioAction empty(std::size_t m);
};

enum class Outcome { Running, Win, Loss, Truncated };

std::string to_string(Outcome o);

enum class StepResult { Advanced, Blocked, Stalled };

std::string to_string(StepResult r);

struct StepEvent {
    std::size_t adversary_index = 0;
    std::string adversary_id;
    TechniqueToken technique;
    StepResult result = StepResult::Blocked;
};

struct StepOutcome {
    double reward = 0.0;
    bool done = false;
    int blocked_count = 0;  // sum of the per-adversary S_t indicators
    std::vector<StepEvent> events;
};

struct AdversaryState {
    std::vector<TechniqueToken> history;
    double residual_budget = 0.0;
    bool alive = true;
};

struct SimConfig {
    std::size_t n_adversaries = 10;
    double defender_budget = kEpisodeBudgetUnits;
    // When set, every adversary starts with this budget (the experimental
    // base fixes 100 units); when unset, budgets come from the spread table.
    std::optional<double> adversary_budget_override = kEpisodeBudgetUnits;
    int max_steps = 100;
    bool simple_reward = false;  // drop the CoverEff term
};

// Immutable model inputs shared by every episode; non-owning.
struct EnvModel {
    const VommModel* vomm = nullptr;
    const EffectivenessTable* effectiveness = nullptr;
    const AdvCostTable* adv_costs = nullptr;
    const SpreadTable* spread = nullptr;  // may be null when budgets are overridden
    const MitigationCatalog* catalog = nullptr;
    const PctCostTable* pct = nullptr;
    const MaturityScaler* scaler = nullptr;
    TechniqueIndex technique_index;
};

// Coverage-weighted protection level for one technique: the best
// maturity * (effectiveness - 1)/4 over selected covering mitigations, in
// [0,1]. Success probability of the technique is 1 minus this.
double eff_cov(const TechniqueToken& technique, const PortfolioAction& action,
               const std::vector<double>& maturity, const EffectivenessTable& table,
               const MitigationCatalog& catalog, const AdversaryProfile& adversary);

// CoverEff term: per technique covered by a selected mitigation, 1 when the
// technique was never attempted this episode, else (maxEff + 1) * 5 with
// maxEff resolved against the adversaries that attempted it.
double cover_eff(const PortfolioAction& action, const EffectivenessTable& table,
                 const MitigationCatalog& catalog,
                 const std::map<TechniqueToken, std::set<std::size_t>>& attempted,
                 const std::vector<AdversaryProfile>& profiles);

// 100 * blocked + cover_eff / (portfolio size + 1) + 1000 * win.
double episode_reward(int blocked_count, double cover_eff_score, std::size_t portfolio_size,
                      bool win);

// The episodic simulator. One instance is single-threaded; run disjoint
// instances for parallel episodes. reset() starts an episode, apply_action()
// commits the shields-up portfolio, step() advances every living adversary
// once. snapshot()/restore() capture the full state byte-exactly, which beam
// reconstruction and paired evaluation rely on.
class Environment {
public:
    Environment(EnvModel model, SimConfig config);

    Observation reset(const std::vector<double>& maturity,
                      std::vector<AdversaryProfile> adversaries, std::uint64_t seed);

    // FeasibilityError (listing the overflow) on an over-budget portfolio;
    // StateError when called mid-episode.
    void apply_action(const PortfolioAction& action);

    StepOutcome step();

    // Beam-reconstruction entry point: the given adversary attempts exactly
    // `technique`; blocking is decided deterministically by whether the
    // chosen mitigation's maturity-weighted effectiveness meets `threshold`.
    // The RNG is not consumed.
    StepOutcome step_forced(std::size_t adversary_index, const TechniqueToken& technique,
                            const std::optional<MitigationId>& mitigation, double threshold);

    std::vector<std::uint8_t> snapshot() const;
    void restore(std::span<const std::uint8_t> blob);

    Observation observation() const;

    Outcome outcome() const { return outcome_; }
    int step_index() const { return step_index_; }
    const std::vector<AdversaryState>& adversary_states() const { return adversaries_; }
    const std::vector<AdversaryProfile>& adversary_profiles() const { return profiles_; }
    const std::vector<double>& maturity() const { return maturity_; }
    const std::vector<double>& mitigation_costs() const { return costs_; }
    const PortfolioAction& portfolio() const { return portfolio_; }
    const SimConfig& config() const { return config_; }
    const EnvModel& model() const { return model_; }
    const std::vector<std::string>& warnings() const { return warnings_; }
    double total_mitigation_cost() const { return portfolio_.total_cost; }

private:
    void require_running(const char* op) const;
    void finish_step(StepOutcome& out, bool loss_this_step);
    double technique_success_probability(std::size_t adversary_index,
                                         const TechniqueToken& technique) const;

    EnvModel model_;
    SimConfig config_;

    // episode state
    std::vector<AdversaryProfile> profiles_;
    std::vector<AdversaryState> adversaries_;
    std::vector<double> maturity_;
    std::vector<double> costs_;  // per-mitigation episode costs, catalog order
    PortfolioAction portfolio_;
    bool action_applied_ = false;
    int step_index_ = 0;
    Outcome outcome_ = Outcome::Running;
    std::map<TechniqueToken, std::set<std::size_t>> attempted_;
    Rng rng_;
    bool episode_active_ = false;
    std::vector<std::string> warnings_;
};

}  // namespace mitplan
