#pragma once

#include <cstdint>
#include <deque>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mitplan/jsonio.hpp"
#include "mitplan/rng.hpp"
#include "mitplan/sim_env.hpp"

namespace mitplan {

// Fully-connected Q approximator: input -> two ReLU hidden layers -> linear
// output of one Q-value per mitigation. Plain double math with hand-written
// backprop; weights initialized symmetric uniform scaled by 1/sqrt(fan-in).
class QNetwork {
public:
    struct Gradients {
        std::vector<double> w1, b1, w2, b2, w3, b3;
    };

    struct Activations {
        std::vector<double> x, z1, a1, z2, a2, out;
    };

    QNetwork() = default;
    QNetwork(std::size_t input_dim, std::size_t hidden_dim, std::size_t output_dim, Rng& rng);

    std::vector<double> forward(std::span<const double> x) const;
    Activations forward_cached(std::span<const double> x) const;

    // Accumulates parameter gradients for dL/d(out) at the cached activations.
    void backward(const Activations& act, std::span<const double> dloss_dout,
                  Gradients& grads) const;

    Gradients zero_gradients() const;

    // One SGD step; gradients are scaled down when their global L2 norm
    // exceeds `clip` (0 disables clipping). Throws StateError if any weight
    // goes non-finite.
    void apply_gradients(const Gradients& grads, double learning_rate, double clip);

    std::size_t input_dim() const { return input_dim_; }
    std::size_t hidden_dim() const { return hidden_dim_; }
    std::size_t output_dim() const { return output_dim_; }

    // Flat parameter access for the finite-difference tests.
    std::vector<double*> parameters();
    std::vector<double> flat_gradients(const Gradients& grads) const;

    Json to_json() const;
    static QNetwork from_json(const Json& doc);

    bool operator==(const QNetwork&) const = default;

private:
    std::size_t input_dim_ = 0, hidden_dim_ = 0, output_dim_ = 0;
    std::vector<double> w1_, b1_, w2_, b2_, w3_, b3_;
};

struct Transition {
    std::vector<double> observation;
    std::vector<std::size_t> chosen;  // selected mitigation indices
    double reward = 0.0;              // discounted episode return in contracted mode
    std::vector<double> next_observation;
    bool done = true;
};

// Cyclic uniform-replay buffer; batch sampling is without replacement.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity = 10000);

    void push(Transition t);
    std::vector<const Transition*> sample(std::size_t batch, Rng& rng) const;
    std::size_t size() const { return buffer_.size(); }
    double mean_reward() const;

private:
    std::size_t capacity_;
    std::size_t next_ = 0;
    std::vector<Transition> buffer_;
};

enum class MixingMode { None, Additive, Product };

struct TrainConfig {
    double learning_rate = 1e-4;
    std::size_t batch_size = 64;
    std::size_t warmup = 500;  // stored transitions before updates begin
    double epsilon_start = 0.99;
    double epsilon_min = 0.05;
    std::size_t decay_steps = 500;  // 1000 in the extended ablation
    double gamma = 0.90;
    std::size_t target_sync_interval = 250;  // updates between target copies
    std::size_t hidden_width = 256;
    std::size_t replay_capacity = 10000;
    double grad_clip = 10.0;
    std::size_t episodes = 2000;
    // One transition per episode holding the discounted return (the action is
    // episode-fixed); per-step storage kept as a comparison toggle.
    bool per_step_transitions = false;
    MixingMode mixing = MixingMode::None;
    double mixing_start = 0.5;  // lambda or beta start, annealed to 0
    double tau = 1.0;
    std::uint64_t seed = 0;
};

// epsilon after `stored` transitions: flat at epsilon_start through warmup,
// then linear to epsilon_min over decay_steps.
double epsilon_at(const TrainConfig& config, std::size_t stored);

// Greedy budget fill in descending Q (ties toward the lower catalog index,
// i.e. ascending mitigation id); with probability epsilon builds a random
// feasible portfolio instead (shuffled order, fair inclusion coin per item,
// kept only if it fits the residual budget). Always feasible.
PortfolioAction select_portfolio(std::span<const double> q_values,
                                 std::span<const double> costs, double budget, double epsilon,
                                 Rng& rng);

// TD loss over a batch against the target network:
// y = r + gamma * (1 - done) * max_a Q_target(o'); squared error spread
// equally over the chosen multi-hot components, averaged over the batch.
// Fills `grads` when given (the finite-difference tests evaluate the loss
// alone).
double td_loss(const QNetwork& net, const QNetwork& target,
               std::span<const Transition* const> batch, double gamma,
               QNetwork::Gradients* grads = nullptr);

// One TD gradient step; returns the loss. Throws StateError on a non-finite
// loss.
double td_update(QNetwork& net, const QNetwork& target,
                 std::span<const Transition* const> batch, double learning_rate, double gamma,
                 double grad_clip);

// Additive mixture: (1 - lambda) * softmax(Q / tau) + lambda * prior.
std::vector<double> hybrid_additive(std::span<const double> q_values,
                                    std::span<const double> prior, double lambda, double tau);

// Product of experts: softmax(Q / tau) * prior^beta, renormalized. Falls
// back to uniform (with a warning) when the unnormalized mass vanishes.
std::vector<double> hybrid_product(std::span<const double> q_values,
                                   std::span<const double> prior, double beta, double tau,
                                   std::vector<std::string>* warnings = nullptr);

std::vector<double> softmax(std::span<const double> values, double tau);

// Mitigation-space prior induced by the VOMM: predicted next-technique mass
// pushed onto covering mitigations and renormalized; uniform when nothing is
// covered.
std::vector<double> vomm_mitigation_prior(const VommModel& vomm,
                                          const std::vector<AdversaryState>& adversaries,
                                          const EffectivenessTable& table,
                                          const MitigationCatalog& catalog);

struct TrainLogEntry {
    std::size_t episode = 0;
    double epsilon = 0.0;
    double mixing_weight = 0.0;
    double episode_return = 0.0;
    double loss = 0.0;  // NaN before updates start
    double replay_mean_reward = 0.0;
    Outcome outcome = Outcome::Running;
};

struct TrainResult {
    QNetwork network;
    std::vector<TrainLogEntry> log;
    std::size_t updates = 0;
};

// Defender population + fixed adversary set the training loop samples from.
struct EpisodeSource {
    std::vector<std::vector<double>> org_maturities;  // catalog order
    std::vector<AdversaryProfile> adversaries;        // exactly N profiles
};

// Full training loop: one episode = reset, epsilon-greedy (or hybrid)
// portfolio, roll to termination, store the contracted transition, update
// after warmup, sync the target periodically. Deterministic per seed.
TrainResult train(Environment& env, const EpisodeSource& source, const TrainConfig& config);

// Versioned checkpoint with embedded config and compatibility fingerprint.
void save_checkpoint(const std::filesystem::path& path, const QNetwork& net,
                     const TrainConfig& config, const MitigationCatalog& catalog,
                     const TechniqueIndex& index);
struct Checkpoint {
    QNetwork network;
    TrainConfig config;
    std::vector<std::string> mitigation_ids;
    std::vector<std::string> technique_tokens;
};
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace mitplan
