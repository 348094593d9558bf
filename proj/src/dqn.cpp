#include "mitplan/dqn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mitplan/errors.hpp"

namespace mitplan {

namespace {

void matvec(std::span<const double> w, std::span<const double> x, std::span<const double> b,
            std::vector<double>& out) {
    const std::size_t rows = b.size();
    const std::size_t cols = x.size();
    out.assign(rows, 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
        double acc = b[r];
        const double* wr = w.data() + r * cols;
        for (std::size_t c = 0; c < cols; ++c) acc += wr[c] * x[c];
        out[r] = acc;
    }
}

std::vector<double> relu(const std::vector<double>& z) {
    std::vector<double> a(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) a[i] = z[i] > 0.0 ? z[i] : 0.0;
    return a;
}

void init_uniform(std::vector<double>& w, std::size_t fan_in, Rng& rng) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (double& v : w) v = rng.uniform(-bound, bound);
}

Json weights_json(const std::vector<double>& w) {
    Json arr = Json::array();
    for (double v : w) arr.push_back(v);
    return arr;
}

std::vector<double> weights_from_json(const Json& arr) {
    std::vector<double> w;
    w.reserve(arr.size());
    for (const Json& v : arr) w.push_back(v.get<double>());
    return w;
}

}  // namespace

QNetwork::QNetwork(std::size_t input_dim, std::size_t hidden_dim, std::size_t output_dim,
                   Rng& rng)
    : input_dim_(input_dim), hidden_dim_(hidden_dim), output_dim_(output_dim) {
    if (input_dim == 0 || hidden_dim == 0 || output_dim == 0)
        throw ConfigError("QNetwork: zero layer width");
    w1_.resize(hidden_dim_ * input_dim_);
    b1_.assign(hidden_dim_, 0.0);
    w2_.resize(hidden_dim_ * hidden_dim_);
    b2_.assign(hidden_dim_, 0.0);
    w3_.resize(output_dim_ * hidden_dim_);
    b3_.assign(output_dim_, 0.0);
    init_uniform(w1_, input_dim_, rng);
    init_uniform(w2_, hidden_dim_, rng);
    init_uniform(w3_, hidden_dim_, rng);
}

QNetwork::Activations QNetwork::forward_cached(std::span<const double> x) const {
    if (x.size() != input_dim_) throw DomainError("QNetwork: input dimension mismatch");
    Activations act;
    act.x.assign(x.begin(), x.end());
    matvec(w1_, act.x, b1_, act.z1);
    act.a1 = relu(act.z1);
    matvec(w2_, act.a1, b2_, act.z2);
    act.a2 = relu(act.z2);
    matvec(w3_, act.a2, b3_, act.out);
    return act;
}

std::vector<double> QNetwork::forward(std::span<const double> x) const {
    return forward_cached(x).out;
}

QNetwork::Gradients QNetwork::zero_gradients() const {
    Gradients g;
    g.w1.assign(w1_.size(), 0.0);
    g.b1.assign(b1_.size(), 0.0);
    g.w2.assign(w2_.size(), 0.0);
    g.b2.assign(b2_.size(), 0.0);
    g.w3.assign(w3_.size(), 0.0);
    g.b3.assign(b3_.size(), 0.0);
    return g;
}

void QNetwork::backward(const Activations& act, std::span<const double> dloss_dout,
                        Gradients& grads) const {
    if (dloss_dout.size() != output_dim_) throw DomainError("QNetwork: gradient size mismatch");

    // Output layer.
    std::vector<double> da2(hidden_dim_, 0.0);
    for (std::size_t r = 0; r < output_dim_; ++r) {
        const double d = dloss_dout[r];
        if (d == 0.0) continue;
        grads.b3[r] += d;
        double* gw = grads.w3.data() + r * hidden_dim_;
        const double* wr = w3_.data() + r * hidden_dim_;
        for (std::size_t c = 0; c < hidden_dim_; ++c) {
            gw[c] += d * act.a2[c];
            da2[c] += d * wr[c];
        }
    }

    // Second hidden layer.
    std::vector<double> da1(hidden_dim_, 0.0);
    for (std::size_t r = 0; r < hidden_dim_; ++r) {
        const double d = act.z2[r] > 0.0 ? da2[r] : 0.0;
        if (d == 0.0) continue;
        grads.b2[r] += d;
        double* gw = grads.w2.data() + r * hidden_dim_;
        const double* wr = w2_.data() + r * hidden_dim_;
        for (std::size_t c = 0; c < hidden_dim_; ++c) {
            gw[c] += d * act.a1[c];
            da1[c] += d * wr[c];
        }
    }

    // First hidden layer.
    for (std::size_t r = 0; r < hidden_dim_; ++r) {
        const double d = act.z1[r] > 0.0 ? da1[r] : 0.0;
        if (d == 0.0) continue;
        grads.b1[r] += d;
        double* gw = grads.w1.data() + r * input_dim_;
        for (std::size_t c = 0; c < input_dim_; ++c) gw[c] += d * act.x[c];
    }
}

void QNetwork::apply_gradients(const Gradients& grads, double learning_rate, double clip) {
    double sq = 0.0;
    for (const auto* g : {&grads.w1, &grads.b1, &grads.w2, &grads.b2, &grads.w3, &grads.b3})
        for (double v : *g) sq += v * v;
    const double norm = std::sqrt(sq);
    double scale = learning_rate;
    if (clip > 0.0 && norm > clip) scale *= clip / norm;

    auto update = [&](std::vector<double>& w, const std::vector<double>& g) {
        for (std::size_t i = 0; i < w.size(); ++i) {
            w[i] -= scale * g[i];
            if (!std::isfinite(w[i]))
                throw StateError("QNetwork: non-finite weight after update (grad norm " +
                                 std::to_string(norm) + ")");
        }
    };
    update(w1_, grads.w1);
    update(b1_, grads.b1);
    update(w2_, grads.w2);
    update(b2_, grads.b2);
    update(w3_, grads.w3);
    update(b3_, grads.b3);
}

std::vector<double*> QNetwork::parameters() {
    std::vector<double*> out;
    for (auto* w : {&w1_, &b1_, &w2_, &b2_, &w3_, &b3_})
        for (double& v : *w) out.push_back(&v);
    return out;
}

std::vector<double> QNetwork::flat_gradients(const Gradients& grads) const {
    std::vector<double> out;
    for (const auto* g : {&grads.w1, &grads.b1, &grads.w2, &grads.b2, &grads.w3, &grads.b3})
        out.insert(out.end(), g->begin(), g->end());
    return out;
}

Json QNetwork::to_json() const {
    return Json{{"input_dim", input_dim_}, {"hidden_dim", hidden_dim_},
                {"output_dim", output_dim_}, {"w1", weights_json(w1_)},
                {"b1", weights_json(b1_)},  {"w2", weights_json(w2_)},
                {"b2", weights_json(b2_)},  {"w3", weights_json(w3_)},
                {"b3", weights_json(b3_)}};
}

QNetwork QNetwork::from_json(const Json& doc) {
    QNetwork net;
    net.input_dim_ = require(doc, "input_dim", "network").get<std::size_t>();
    net.hidden_dim_ = require(doc, "hidden_dim", "network").get<std::size_t>();
    net.output_dim_ = require(doc, "output_dim", "network").get<std::size_t>();
    net.w1_ = weights_from_json(require(doc, "w1", "network"));
    net.b1_ = weights_from_json(require(doc, "b1", "network"));
    net.w2_ = weights_from_json(require(doc, "w2", "network"));
    net.b2_ = weights_from_json(require(doc, "b2", "network"));
    net.w3_ = weights_from_json(require(doc, "w3", "network"));
    net.b3_ = weights_from_json(require(doc, "b3", "network"));
    if (net.w1_.size() != net.hidden_dim_ * net.input_dim_ ||
        net.w2_.size() != net.hidden_dim_ * net.hidden_dim_ ||
        net.w3_.size() != net.output_dim_ * net.hidden_dim_ ||
        net.b1_.size() != net.hidden_dim_ || net.b2_.size() != net.hidden_dim_ ||
        net.b3_.size() != net.output_dim_)
        throw ValidationError("network: weight shapes inconsistent with layer dims");
    return net;
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ == 0) throw ConfigError("ReplayBuffer: zero capacity");
}

void ReplayBuffer::push(Transition t) {
    if (buffer_.size() < capacity_) {
        buffer_.push_back(std::move(t));
    } else {
        buffer_[next_] = std::move(t);  // cyclic overwrite
    }
    next_ = (next_ + 1) % capacity_;
}

std::vector<const Transition*> ReplayBuffer::sample(std::size_t batch, Rng& rng) const {
    if (batch > buffer_.size())
        throw StateError("ReplayBuffer: batch larger than stored transitions");
    // Partial Fisher-Yates over an index vector: uniform without replacement.
    std::vector<std::size_t> idx(buffer_.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<const Transition*> out;
    out.reserve(batch);
    for (std::size_t i = 0; i < batch; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(idx.size() - i));
        std::swap(idx[i], idx[j]);
        out.push_back(&buffer_[idx[i]]);
    }
    return out;
}

double ReplayBuffer::mean_reward() const {
    if (buffer_.empty()) return 0.0;
    double sum = 0.0;
    for (const Transition& t : buffer_) sum += t.reward;
    return sum / static_cast<double>(buffer_.size());
}

double epsilon_at(const TrainConfig& config, std::size_t stored) {
    if (stored <= config.warmup) return config.epsilon_start;
    if (config.decay_steps == 0) return config.epsilon_min;
    const double progress =
        static_cast<double>(stored - config.warmup) / static_cast<double>(config.decay_steps);
    if (progress >= 1.0) return config.epsilon_min;
    return config.epsilon_start - (config.epsilon_start - config.epsilon_min) * progress;
}

PortfolioAction select_portfolio(std::span<const double> q_values, std::span<const double> costs,
                                 double budget, double epsilon, Rng& rng) {
    if (q_values.size() != costs.size())
        throw DomainError("select_portfolio: Q/cost length mismatch");
    const std::size_t m = q_values.size();
    PortfolioAction action = PortfolioAction::empty(m);

    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);

    const bool explore = epsilon > 0.0 && rng.uniform01() < epsilon;
    if (explore) {
        rng.shuffle(order);
    } else {
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return q_values[a] > q_values[b];  // stable keeps id order on ties
        });
    }

    double residual = budget;
    for (std::size_t i : order) {
        if (explore && rng.uniform01() < 0.5) continue;  // fair inclusion coin
        if (costs[i] <= residual + kBudgetSlack) {
            action.selected[i] = 1;
            action.total_cost += costs[i];
            residual -= costs[i];
        }
    }
    return action;
}

double td_loss(const QNetwork& net, const QNetwork& target,
               std::span<const Transition* const> batch, double gamma,
               QNetwork::Gradients* grads) {
    if (batch.empty()) throw DomainError("td_loss: empty batch");
    double loss = 0.0;
    const double inv_batch = 1.0 / static_cast<double>(batch.size());

    for (const Transition* t : batch) {
        double y = t->reward;
        if (!t->done) {
            const std::vector<double> qn = target.forward(t->next_observation);
            y += gamma * *std::max_element(qn.begin(), qn.end());
        }
        if (t->chosen.empty()) continue;  // empty portfolio carries no value heads

        const auto act = net.forward_cached(t->observation);
        std::vector<double> dout(net.output_dim(), 0.0);
        const double inv_chosen = 1.0 / static_cast<double>(t->chosen.size());
        for (std::size_t j : t->chosen) {
            const double diff = act.out[j] - y;
            loss += diff * diff * inv_chosen * inv_batch;
            dout[j] = 2.0 * diff * inv_chosen * inv_batch;
        }
        if (grads) net.backward(act, dout, *grads);
    }
    return loss;
}

double td_update(QNetwork& net, const QNetwork& target,
                 std::span<const Transition* const> batch, double learning_rate, double gamma,
                 double grad_clip) {
    QNetwork::Gradients grads = net.zero_gradients();
    const double loss = td_loss(net, target, batch, gamma, &grads);
    if (!std::isfinite(loss))
        throw StateError("td_update: non-finite loss (batch " + std::to_string(batch.size()) +
                         ", lr " + std::to_string(learning_rate) + ")");
    net.apply_gradients(grads, learning_rate, grad_clip);
    return loss;
}

std::vector<double> softmax(std::span<const double> values, double tau) {
    if (tau <= 0.0) throw DomainError("softmax: tau must be positive");
    const double vmax = *std::max_element(values.begin(), values.end());
    std::vector<double> out(values.size());
    double total = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        out[i] = std::exp((values[i] - vmax) / tau);
        total += out[i];
    }
    for (double& v : out) v /= total;
    return out;
}

std::vector<double> hybrid_additive(std::span<const double> q_values,
                                    std::span<const double> prior, double lambda, double tau) {
    if (lambda < 0.0 || lambda > 1.0) throw DomainError("hybrid_additive: lambda outside [0,1]");
    if (q_values.size() != prior.size())
        throw DomainError("hybrid_additive: dimension mismatch");
    const std::vector<double> sm = softmax(q_values, tau);
    std::vector<double> out(sm.size());
    for (std::size_t i = 0; i < sm.size(); ++i)
        out[i] = (1.0 - lambda) * sm[i] + lambda * prior[i];
    return out;
}

std::vector<double> hybrid_product(std::span<const double> q_values,
                                   std::span<const double> prior, double beta, double tau,
                                   std::vector<std::string>* warnings) {
    if (beta < 0.0) throw DomainError("hybrid_product: beta must be >= 0");
    if (q_values.size() != prior.size()) throw DomainError("hybrid_product: dimension mismatch");
    const double vmax = *std::max_element(q_values.begin(), q_values.end());
    std::vector<double> out(q_values.size());
    double total = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = std::exp((q_values[i] - vmax) / tau) * std::pow(prior[i], beta);
        total += out[i];
    }
    if (total <= 0.0) {
        if (warnings) warnings->push_back("hybrid_product: zero mass, falling back to uniform");
        std::fill(out.begin(), out.end(), 1.0 / static_cast<double>(out.size()));
        return out;
    }
    for (double& v : out) v /= total;
    return out;
}

std::vector<double> vomm_mitigation_prior(const VommModel& vomm,
                                          const std::vector<AdversaryState>& adversaries,
                                          const EffectivenessTable& table,
                                          const MitigationCatalog& catalog) {
    // Mean predicted next-technique distribution over living adversaries.
    std::vector<double> technique_mass(vomm.vocab_size(), 0.0);
    std::size_t living = 0;
    for (const AdversaryState& adv : adversaries) {
        if (!adv.alive) continue;
        const std::vector<double> p = vomm.next_distribution(adv.history);
        for (std::size_t i = 0; i < p.size(); ++i) technique_mass[i] += p[i];
        ++living;
    }
    std::vector<double> prior(catalog.size(), 0.0);
    if (living == 0) {
        std::fill(prior.begin(), prior.end(), 1.0 / static_cast<double>(catalog.size()));
        return prior;
    }

    double total = 0.0;
    for (std::size_t i = 0; i < vomm.vocab_size(); ++i) {
        if (technique_mass[i] == 0.0) continue;
        for (const MitigationId& m : table.covering(vomm.vocab()[i])) {
            if (auto idx = catalog.index_of(m)) {
                prior[*idx] += technique_mass[i];
                total += technique_mass[i];
            }
        }
    }
    if (total <= 0.0) {
        std::fill(prior.begin(), prior.end(), 1.0 / static_cast<double>(catalog.size()));
        return prior;
    }
    for (double& v : prior) v /= total;
    return prior;
}

namespace {

// Sample a feasible portfolio by drawing without replacement from a
// mitigation distribution until nothing affordable remains.
PortfolioAction sample_portfolio(const std::vector<double>& dist,
                                 std::span<const double> costs, double budget, Rng& rng) {
    PortfolioAction action = PortfolioAction::empty(dist.size());
    std::vector<double> weights = dist;
    double residual = budget;
    while (true) {
        double mass = 0.0;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            if (action.selected[i] || costs[i] > residual + kBudgetSlack) weights[i] = 0.0;
            mass += weights[i];
        }
        if (mass <= 0.0) break;
        const std::size_t pick = rng.categorical(weights);
        action.selected[pick] = 1;
        action.total_cost += costs[pick];
        residual -= costs[pick];
        weights[pick] = 0.0;
    }
    return action;
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

namespace {

Json train_config_json(const TrainConfig& c) {
    return Json{{"learning_rate", c.learning_rate},
                {"batch_size", c.batch_size},
                {"warmup", c.warmup},
                {"epsilon_start", c.epsilon_start},
                {"epsilon_min", c.epsilon_min},
                {"decay_steps", c.decay_steps},
                {"gamma", c.gamma},
                {"target_sync_interval", c.target_sync_interval},
                {"hidden_width", c.hidden_width},
                {"replay_capacity", c.replay_capacity},
                {"grad_clip", c.grad_clip},
                {"episodes", c.episodes},
                {"per_step_transitions", c.per_step_transitions},
                {"mixing", c.mixing == MixingMode::None
                               ? "none"
                               : (c.mixing == MixingMode::Additive ? "additive" : "product")},
                {"mixing_start", c.mixing_start},
                {"tau", c.tau},
                {"seed", c.seed}};
}

TrainConfig train_config_from_json(const Json& j) {
    TrainConfig c;
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.warmup = j.value("warmup", c.warmup);
    c.epsilon_start = j.value("epsilon_start", c.epsilon_start);
    c.epsilon_min = j.value("epsilon_min", c.epsilon_min);
    c.decay_steps = j.value("decay_steps", c.decay_steps);
    c.gamma = j.value("gamma", c.gamma);
    c.target_sync_interval = j.value("target_sync_interval", c.target_sync_interval);
    c.hidden_width = j.value("hidden_width", c.hidden_width);
    c.replay_capacity = j.value("replay_capacity", c.replay_capacity);
    c.grad_clip = j.value("grad_clip", c.grad_clip);
    c.episodes = j.value("episodes", c.episodes);
    c.per_step_transitions = j.value("per_step_transitions", c.per_step_transitions);
    const std::string mixing = j.value("mixing", std::string("none"));
    c.mixing = mixing == "additive" ? MixingMode::Additive
                                    : (mixing == "product" ? MixingMode::Product
                                                           : MixingMode::None);
    c.mixing_start = j.value("mixing_start", c.mixing_start);
    c.tau = j.value("tau", c.tau);
    c.seed = j.value("seed", c.seed);
    return c;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const QNetwork& net,
                     const TrainConfig& config, const MitigationCatalog& catalog,
                     const TechniqueIndex& index) {
    Json mits = Json::array();
    for (const auto& e : catalog.entries) mits.push_back(e.id.value);
    Json techs = Json::array();
    for (const TechniqueToken& t : index.tokens) techs.push_back(t.render());
    save_json(path, Json{{"format", "mitplan-checkpoint"},
                         {"version", 1},
                         {"network", net.to_json()},
                         {"train_config", train_config_json(config)},
                         {"mitigations", std::move(mits)},
                         {"techniques", std::move(techs)}});
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    const Json doc = load_json(path);
    const std::string where = path.string();
    if (require(doc, "format", where).get<std::string>() != "mitplan-checkpoint")
        throw ParseError(where + ": not a checkpoint document");
    if (require(doc, "version", where).get<int>() != 1)
        throw ParseError(where + ": unsupported checkpoint version");
    Checkpoint ck;
    ck.network = QNetwork::from_json(require(doc, "network", where));
    ck.config = train_config_from_json(require(doc, "train_config", where));
    for (const Json& m : require(doc, "mitigations", where))
        ck.mitigation_ids.push_back(m.get<std::string>());
    for (const Json& t : require(doc, "techniques", where))
        ck.technique_tokens.push_back(t.get<std::string>());
    return ck;
}

TrainResult train(Environment& env, const EpisodeSource& source, const TrainConfig& config) {
    if (source.org_maturities.empty()) throw ConfigError("train: empty organization pool");
    if (source.adversaries.size() != env.config().n_adversaries)
        throw ConfigError("train: adversary set size does not match the environment");
    if (config.warmup < config.batch_size)
        throw ConfigError("train: warmup must cover at least one batch");

    Rng master(config.seed);
    Rng init_rng(master.next_u64());
    Rng policy_rng(master.next_u64());
    Rng replay_rng(master.next_u64());

    const std::size_t m = env.model().catalog->size();
    const std::size_t input_dim =
        m + env.config().n_adversaries * env.model().technique_index.size();

    TrainResult result;
    result.network = QNetwork(input_dim, config.hidden_width, m, init_rng);
    QNetwork target = result.network;

    ReplayBuffer replay(config.replay_capacity);
    std::size_t stored = 0;
    std::size_t updates_since_sync = 0;

    // Divergence guard: the median of the first 100 update losses is the
    // baseline; 100 consecutive losses above 10x that baseline abort.
    constexpr std::size_t kBaselineWindow = 100;
    std::vector<double> baseline_losses;
    double baseline_median = std::numeric_limits<double>::quiet_NaN();
    std::size_t consecutive_high = 0;

    double last_loss = std::numeric_limits<double>::quiet_NaN();

    const auto maybe_update = [&]() {
        if (stored <= config.warmup || replay.size() < config.batch_size) return;
        const auto batch = replay.sample(config.batch_size, replay_rng);
        last_loss = td_update(result.network, target, batch, config.learning_rate, config.gamma,
                              config.grad_clip);
        ++result.updates;
        if (++updates_since_sync >= config.target_sync_interval) {
            target = result.network;
            updates_since_sync = 0;
        }
        if (baseline_losses.size() < kBaselineWindow) {
            baseline_losses.push_back(last_loss);
            if (baseline_losses.size() == kBaselineWindow)
                baseline_median = median_of(baseline_losses);
        } else if (baseline_median > 0.0) {
            if (last_loss > 10.0 * baseline_median) {
                if (++consecutive_high >= 100)
                    throw StateError("train: diverged, 100 consecutive losses above 10x the "
                                     "baseline median " + std::to_string(baseline_median));
            } else {
                consecutive_high = 0;
            }
        }
    };

    for (std::size_t episode = 0; episode < config.episodes; ++episode) {
        const std::size_t org_idx =
            static_cast<std::size_t>(master.below(source.org_maturities.size()));
        const std::uint64_t episode_seed = master.next_u64();

        const Observation obs0 =
            env.reset(source.org_maturities[org_idx], source.adversaries, episode_seed);
        const std::vector<double> features0 = obs0.flatten();
        const std::vector<double> costs = env.mitigation_costs();

        const double eps = epsilon_at(config, stored);
        const double mix_progress =
            stored <= config.warmup || config.decay_steps == 0
                ? 0.0
                : std::min(1.0, static_cast<double>(stored - config.warmup) /
                                    static_cast<double>(config.decay_steps));
        const double mixing_weight =
            config.mixing == MixingMode::None ? 0.0 : config.mixing_start * (1.0 - mix_progress);

        const std::vector<double> q = result.network.forward(features0);
        PortfolioAction action;
        if (config.mixing == MixingMode::None) {
            action = select_portfolio(q, costs, env.config().defender_budget, eps, policy_rng);
        } else {
            const std::vector<double> prior = vomm_mitigation_prior(
                *env.model().vomm, env.adversary_states(), *env.model().effectiveness,
                *env.model().catalog);
            const std::vector<double> dist =
                config.mixing == MixingMode::Additive
                    ? hybrid_additive(q, prior, mixing_weight, config.tau)
                    : hybrid_product(q, prior, mixing_weight, config.tau);
            action = sample_portfolio(dist, costs, env.config().defender_budget, policy_rng);
        }
        env.apply_action(action);

        const std::vector<std::size_t> chosen = action.indices();
        double episode_return = 0.0;
        double discount = 1.0;
        Outcome final_outcome = Outcome::Running;
        while (true) {
            const StepOutcome out = env.step();
            episode_return += discount * out.reward;
            if (config.per_step_transitions) {
                replay.push({features0, chosen, out.reward, features0, out.done});
                ++stored;
                maybe_update();
            }
            discount *= config.gamma;
            if (out.done) {
                final_outcome = env.outcome();
                break;
            }
        }
        if (!config.per_step_transitions) {
            // The action is episode-fixed, so the natural training unit is one
            // contracted transition carrying the discounted episode return.
            replay.push({features0, chosen, episode_return, features0, true});
            ++stored;
            maybe_update();
        }

        result.log.push_back({episode, eps, mixing_weight, episode_return, last_loss,
                              replay.mean_reward(), final_outcome});
    }
    return result;
}

}  // namespace mitplan
