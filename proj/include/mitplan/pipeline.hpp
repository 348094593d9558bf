#pragma once

#include <vector>

#include "mitplan/beam.hpp"
#include "mitplan/eval.hpp"
#include "mitplan/plan.hpp"
#include "mitplan/report.hpp"
#include "mitplan/workspace.hpp"

namespace mitplan {

// Synthesizes the training population and maps it to maturity vectors in
// catalog order.
std::vector<std::vector<double>> population_maturities(const Workspace& ws,
                                                       const RunConfig& config);

// Environment wired from the workspace under the config's sim settings.
Environment make_environment(const Workspace& ws, const SimConfig& sim);

// Full training run: population, environment, train(); deterministic per
// config seeds.
TrainResult train_policy(const Workspace& ws, const RunConfig& config);

// Pre-generated paired-evaluation corpus: maturity vectors drawn from a
// fresh synthetic population plus per-episode seeds.
EvalCorpus make_eval_corpus(const Workspace& ws, const RunConfig& config, std::size_t episodes,
                            std::uint64_t seed);

// Reconstruction over every episode adversary from one root portfolio, then
// candidate aggregation: the bridge from a trained network to plan input.
struct ReconstructionResult {
    RootPortfolio root;
    std::vector<ReconstructedPath> paths;
    std::vector<CandidateMitigation> candidates;
};
// Per-adversary searches are independent; `workers` > 1 runs them on
// separate environments with pre-assigned seeds, so results match the
// single-threaded order exactly.
ReconstructionResult reconstruct_all(const Workspace& ws, const RunConfig& config,
                                     const QNetwork& net, const std::vector<double>& maturity,
                                     std::uint64_t seed, std::size_t workers = 1);

// Single ablation rows: train the variant, evaluate DQN vs oracle on the
// shared episode specs, all under identical seeds.
struct AblationRow {
    std::string variant;
    PolicySummary dqn;
    PolicySummary oracle;
    std::vector<TrainLogEntry> train_log;
};
std::vector<AblationRow> ablation_grid(const Workspace& ws, const RunConfig& base,
                                       const std::vector<std::string>& variants,
                                       std::size_t workers = 1);

std::string ablation_to_text(const std::vector<AblationRow>& rows);
Json ablation_to_json(const std::vector<AblationRow>& rows);

}  // namespace mitplan
