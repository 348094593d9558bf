#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mitplan/adversary.hpp"
#include "mitplan/dqn.hpp"
#include "mitplan/sim_env.hpp"
#include "mitplan/vomm.hpp"

namespace mitplan {

struct BeamConfig {
    std::size_t width = 5;             // k: retained states per depth
    std::size_t depth = 15;            // d: maximum search depth
    std::size_t candidate_width = 5;   // techniques expanded per node
    double observed_boost = 3.0;       // multiplier for profile-observed techniques
    double success_threshold = 0.5;    // maturity * normalized effectiveness >= this blocks
    double diversity_lambda = 0.5;     // weight of the D term
    double entropy_scale = 0.1;        // weight of the U term
    // U rewards confident (low-entropy) continuations by default; flip to
    // treat entropy as exploration value instead.
    bool entropy_as_confidence = true;
    double defender_budget = 150.0;    // permissive reconstruction budget
};

struct TrailEntry {
    TechniqueToken technique;
    std::optional<MitigationId> mitigation;
    StepResult result = StepResult::Advanced;
};

// One beam node: a full environment snapshot plus the accumulated scoring
// components of the trail that reached it.
struct BeamNode {
    std::vector<std::uint8_t> snapshot;
    double cum_reward = 0.0;
    double cum_loglik = 0.0;
    double cum_entropy = 0.0;
    std::vector<TrailEntry> trail;
    double score = 0.0;
    bool terminal = false;

    std::size_t depth() const { return trail.size(); }
};

// Mitigations of the episode-fixed root portfolio in descending-Q order.
struct RootPortfolio {
    PortfolioAction action;
    std::vector<std::size_t> order;  // catalog indices, descending Q
};

// Greedy descending-Q budget fill (the epsilon = 0 selection rule).
RootPortfolio build_root_portfolio(std::span<const double> q_values,
                                   std::span<const double> costs, double budget);

// Next-technique candidates: VOMM distribution with probability multiplied
// by `boost` for profile-observed techniques, renormalized; top `width` by
// boosted probability, ties lexicographic. Also reports the raw (unboosted)
// probability used for the P term.
struct CandidateTechnique {
    TechniqueToken technique;
    double boosted_probability = 0.0;
    double raw_probability = 0.0;
};
std::vector<CandidateTechnique> candidate_techniques(const VommModel& vomm,
                                                     const std::vector<TechniqueToken>& history,
                                                     const AdversaryProfile& adversary,
                                                     std::size_t width, double boost);

// Best portfolio mitigation for a technique: covering members with exact
// adversary entries first, then highest resolved effectiveness, ties toward
// the descending-Q order. nullopt when nothing in the portfolio covers it.
std::optional<MitigationId> select_best_mitigation(const RootPortfolio& portfolio,
                                                   const MitigationCatalog& catalog,
                                                   const EffectivenessTable& table,
                                                   const AdversaryProfile& adversary,
                                                   const TechniqueToken& technique);

// Base score R + P + U + I (diversity is applied during selection):
//   R = cum_reward / (1100 * depth), P = cum_loglik / depth,
//   U = -entropy_scale * mean step entropy (confidence bonus),
//   I = fraction of the trail blocked or stalled. Zero at depth 0.
double node_base_score(const BeamNode& node, const BeamConfig& config);

// Shannon entropy of a distribution, in nats.
double distribution_entropy(std::span<const double> p);

// Greedy top-k retention with the diversity penalty: each pick maximizes
// base score minus lambda times the max Jaccard similarity of its technique
// set against already-retained members (first pick pays none). Final scores
// are stored on the returned nodes.
std::vector<BeamNode> select_top_k(std::vector<BeamNode> candidates, std::size_t k,
                                   const BeamConfig& config);

struct ReconstructedPath {
    std::string adversary_id;
    std::vector<TrailEntry> trail;
    double score = 0.0;
    double cum_reward = 0.0;
    double cum_loglik = 0.0;
    Outcome outcome = Outcome::Running;
};

// Beam search over environment snapshots for one adversary. `env` must be
// configured for single-adversary episodes with the reconstruction budget;
// the root portfolio is applied up front and every expansion restores from
// the parent snapshot, so parents are never mutated.
std::vector<ReconstructedPath> reconstruct(Environment& env, const std::vector<double>& maturity,
                                           const AdversaryProfile& adversary,
                                           const RootPortfolio& portfolio,
                                           const BeamConfig& config, std::uint64_t seed);

// Union of mitigations across path trails with counter/occurrence/score
// annotations feeding plan optimization.
struct CandidateMitigation {
    MitigationId mitigation;
    std::vector<std::pair<std::string, TechniqueToken>> countered;  // applied uses
    std::size_t occurrences = 0;
    double score_contribution = 0.0;  // sum of min-max normalized path scores
    double max_remediation = 0.0;     // best maturity * (eff-1)/4 over its uses
};

std::vector<CandidateMitigation> aggregate_candidates(
    std::span<const ReconstructedPath> paths, const std::vector<AdversaryProfile>& profiles,
    const EffectivenessTable& table, const MitigationCatalog& catalog,
    const std::vector<double>& maturity);

Json paths_to_json(std::span<const ReconstructedPath> paths);
std::vector<ReconstructedPath> paths_from_json(const Json& doc);

}  // namespace mitplan
