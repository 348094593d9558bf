#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "mitplan/beam.hpp"
#include "mitplan/dqn.hpp"
#include "mitplan/eval.hpp"
#include "mitplan/jsonio.hpp"
#include "mitplan/org_synth.hpp"
#include "mitplan/plan.hpp"
#include "mitplan/sim_env.hpp"

namespace mitplan {

// Every tunable of the pipeline in one versioned document. Keys beginning
// with '_' are documentation; any other unknown key is rejected.
struct RunConfig {
    std::string data_dir = "data";

    double q_exponent = 2.0;  // power-mean exponent, > 1

    MaturityPrior prior;            // class probs, noise sd, seed
    std::size_t org_count = 100;    // gen-orgs population size

    int vomm_max_order = 3;
    double vomm_alpha = 1.0;
    double vomm_min_support = 1.0;

    SimConfig sim;
    TrainConfig train;
    BeamConfig beam;
    PlanWeights plan_weights;
    double plan_budget = kEpisodeBudgetUnits;

    EvalWeights eval_weights;
    std::size_t eval_episodes = 500;
    std::uint64_t eval_seed = 1;

    std::uint64_t seed = 42;  // master seed; propagated where unset

    static RunConfig from_json(const Json& doc, const std::string& where = "config");
    static RunConfig load(const std::filesystem::path& path);
    Json to_json() const;  // effective-config echo
};

// Named single-setting ablation variants over a base config
// (adv-budget-50/150, def-budget-50/150, batch-32/128, simple-reward,
// org-count-50/100, decay-1000). ConfigError on an unknown name.
RunConfig apply_ablation(const RunConfig& base, const std::string& variant);
std::vector<std::string> known_ablations();

}  // namespace mitplan
