#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "mitplan/dqn.hpp"
#include "mitplan/oracle.hpp"
#include "mitplan/sim_env.hpp"

namespace mitplan {

struct EvalWeights {
    double alpha = 1.0;   // loss weight
    double beta = 0.01;   // cost weight (cost normalized by 100 units)
};

struct EvalRecord {
    std::size_t episode_id = 0;
    std::string policy;
    Outcome outcome = Outcome::Running;
    double total_cost = 0.0;
    std::size_t portfolio_size = 0;
    int path_length = 0;
    int loss_indicator = 0;  // truncated episodes count as losses here
    double j_contribution = 0.0;
};

struct PolicySummary {
    std::string policy;
    std::size_t episodes = 0;
    double win_rate = 0.0;
    double loss_rate = 0.0;
    double truncated_rate = 0.0;
    double mean_cost = 0.0;
    double mean_cost_pct = 0.0;
    double mean_portfolio_size = 0.0;
    double mean_path_length = 0.0;
    double j_hat = 0.0;
    double regret = 0.0;  // J(reference) - J(policy)
};

struct EvalResult {
    std::vector<EvalRecord> records;
    std::vector<PolicySummary> summaries;
};

// A policy maps the initial observation of a freshly reset environment to a
// portfolio. Implementations must not advance the environment, and must be
// safe for concurrent calls on distinct episodes (derive any randomness from
// the episode id).
class EvalPolicy {
public:
    virtual ~EvalPolicy() = default;
    virtual std::string name() const = 0;
    virtual PortfolioAction select(const Environment& env, const Observation& obs,
                                   std::size_t episode_id) = 0;
};

// Greedy (epsilon = 0) selection from a trained network.
class DqnGreedyPolicy : public EvalPolicy {
public:
    DqnGreedyPolicy(std::string name, const QNetwork& net) : name_(std::move(name)), net_(&net) {}
    std::string name() const override { return name_; }
    PortfolioAction select(const Environment& env, const Observation& obs,
                           std::size_t episode_id) override;

private:
    std::string name_;
    const QNetwork* net_;
};

// Non-learning proxy-benefit baseline.
class OraclePolicy : public EvalPolicy {
public:
    explicit OraclePolicy(std::string name = "oracle") : name_(std::move(name)) {}
    std::string name() const override { return name_; }
    PortfolioAction select(const Environment& env, const Observation& obs,
                           std::size_t episode_id) override;

private:
    std::string name_;
};

// Uniform-random feasible portfolio (shuffled inclusion with a fair coin).
// Draws come from an Rng derived from (base seed, episode id), so selection
// is stateless and identical under any worker count.
class RandomFeasiblePolicy : public EvalPolicy {
public:
    RandomFeasiblePolicy(std::string name, std::uint64_t seed)
        : name_(std::move(name)), seed_(seed) {}
    std::string name() const override { return name_; }
    PortfolioAction select(const Environment& env, const Observation& obs,
                           std::size_t episode_id) override;

private:
    std::string name_;
    std::uint64_t seed_;
};

// Replays a recorded portfolio per episode id (regret-zero sanity checks).
class ReplayPolicy : public EvalPolicy {
public:
    ReplayPolicy(std::string name, std::map<std::size_t, PortfolioAction> actions)
        : name_(std::move(name)), actions_(std::move(actions)) {}
    std::string name() const override { return name_; }
    PortfolioAction select(const Environment& env, const Observation& obs,
                           std::size_t episode_id) override;

private:
    std::string name_;
    std::map<std::size_t, PortfolioAction> actions_;
};

// One pre-generated evaluation episode: defender maturity plus episode seed;
// the adversary set is fixed across the corpus.
struct EvalEpisodeSpec {
    std::vector<double> maturity;  // catalog order
    std::uint64_t seed = 0;
};

struct EvalCorpus {
    std::vector<EvalEpisodeSpec> episodes;
    std::vector<AdversaryProfile> adversaries;
};

// Paired Monte Carlo evaluation: each episode is reset once, snapshotted,
// and every policy runs from the byte-identical restored state. Regret is
// measured against the policy named `regret_reference` when present.
// `workers` > 1 distributes episodes across threads (each worker clones the
// environment); records are keyed by episode id so output is order-stable.
EvalResult paired_evaluate(const Environment& env_prototype, const EvalCorpus& corpus,
                           const std::vector<EvalPolicy*>& policies,
                           const EvalWeights& weights = {},
                           const std::string& regret_reference = "oracle",
                           std::size_t workers = 1);

// Rolls one policy over (a prefix of) the corpus writing line-delimited step
// records {episode, step, adversary, technique, result, reward}. Returns the
// number of episodes traced.
std::size_t write_episode_traces(Environment& env, const EvalCorpus& corpus, EvalPolicy& policy,
                                 const std::filesystem::path& path,
                                 std::size_t max_episodes = 25);

// Renders the Table-1-style column set as an aligned text table.
std::string summaries_to_text(const std::vector<PolicySummary>& summaries);
Json summaries_to_json(const std::vector<PolicySummary>& summaries);
std::string records_to_csv(const std::vector<EvalRecord>& records);

}  // namespace mitplan
