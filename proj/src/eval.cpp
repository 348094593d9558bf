#include "mitplan/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include "mitplan/errors.hpp"

namespace mitplan {

PortfolioAction DqnGreedyPolicy::select(const Environment& env, const Observation& obs,
                                        std::size_t) {
    const std::vector<double> q = net_->forward(obs.flatten());
    Rng unused(0);  // epsilon = 0 never draws
    return select_portfolio(q, env.mitigation_costs(), env.config().defender_budget, 0.0, unused);
}

PortfolioAction OraclePolicy::select(const Environment& env, const Observation& obs,
                                     std::size_t) {
    (void)obs;
    const EnvModel& m = env.model();
    return oracle_select(env.adversary_profiles(), env.maturity(), *m.vomm, *m.effectiveness,
                         *m.catalog, *m.pct, *m.scaler, env.config().defender_budget);
}

PortfolioAction RandomFeasiblePolicy::select(const Environment& env, const Observation& obs,
                                             std::size_t episode_id) {
    (void)obs;
    Rng rng(seed_ ^ (0x9e3779b97f4a7c15ull * (episode_id + 1)));
    const std::vector<double>& costs = env.mitigation_costs();
    const std::size_t m = costs.size();
    PortfolioAction action = PortfolioAction::empty(m);
    std::vector<std::size_t> order(m);
    for (std::size_t i = 0; i < m; ++i) order[i] = i;
    rng.shuffle(order);
    double residual = env.config().defender_budget;
    for (std::size_t i : order) {
        if (rng.uniform01() < 0.5) continue;
        if (costs[i] <= residual + kBudgetSlack) {
            action.selected[i] = 1;
            action.total_cost += costs[i];
            residual -= costs[i];
        }
    }
    return action;
}

PortfolioAction ReplayPolicy::select(const Environment& env, const Observation& obs,
                                     std::size_t episode_id) {
    (void)env;
    (void)obs;
    auto it = actions_.find(episode_id);
    if (it == actions_.end())
        throw StateError("ReplayPolicy: no recorded action for episode " +
                         std::to_string(episode_id));
    return it->second;
}

namespace {

EvalRecord run_one(Environment& env, EvalPolicy& policy, std::size_t episode_id,
                   const Observation& obs, const EvalWeights& weights) {
    const PortfolioAction action = policy.select(env, obs, episode_id);
    env.apply_action(action);

    int steps = 0;
    while (true) {
        const StepOutcome out = env.step();
        ++steps;
        if (out.done) break;
    }

    EvalRecord rec;
    rec.episode_id = episode_id;
    rec.policy = policy.name();
    rec.outcome = env.outcome();
    rec.total_cost = env.total_mitigation_cost();
    rec.portfolio_size = env.portfolio().count();
    rec.path_length = steps;
    rec.loss_indicator = (rec.outcome == Outcome::Loss || rec.outcome == Outcome::Truncated) ? 1 : 0;
    rec.j_contribution = -weights.alpha * rec.loss_indicator -
                         weights.beta * (rec.total_cost / kEpisodeBudgetUnits);
    return rec;
}

}  // namespace

EvalResult paired_evaluate(const Environment& env_prototype, const EvalCorpus& corpus,
                           const std::vector<EvalPolicy*>& policies, const EvalWeights& weights,
                           const std::string& regret_reference, std::size_t workers) {
    if (corpus.episodes.empty()) throw ConfigError("paired_evaluate: empty episode corpus");
    if (policies.empty()) throw ConfigError("paired_evaluate: no policies");
    if (corpus.adversaries.size() != env_prototype.config().n_adversaries)
        throw ConfigError("paired_evaluate: corpus adversary count does not match environment");

    const std::size_t n = corpus.episodes.size();
    const std::size_t p = policies.size();
    std::vector<EvalRecord> records(n * p);

    const auto run_episode = [&](Environment& env, std::size_t e) {
        const EvalEpisodeSpec& spec = corpus.episodes[e];
        const Observation obs = env.reset(spec.maturity, corpus.adversaries, spec.seed);
        const std::vector<std::uint8_t> blob = env.snapshot();
        for (std::size_t k = 0; k < p; ++k) {
            env.restore(blob);
            records[e * p + k] = run_one(env, *policies[k], e, obs, weights);
        }
    };

    if (workers <= 1) {
        Environment env = env_prototype;
        for (std::size_t e = 0; e < n; ++e) run_episode(env, e);
    } else {
        // Policies are stateless per episode, so workers only need their own
        // environment; episodes are striped over a shared counter.
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        const std::size_t count = std::min(workers, n);
        pool.reserve(count);
        std::vector<std::exception_ptr> errors(count);
        for (std::size_t w = 0; w < count; ++w) {
            pool.emplace_back([&, w] {
                try {
                    Environment env = env_prototype;
                    while (true) {
                        const std::size_t e = next.fetch_add(1);
                        if (e >= n) break;
                        run_episode(env, e);
                    }
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
        for (auto& t : pool) t.join();
        for (const auto& err : errors)
            if (err) std::rethrow_exception(err);
    }

    EvalResult result;
    result.records = std::move(records);

    for (EvalPolicy* policy : policies) {
        PolicySummary s;
        s.policy = policy->name();
        double j_sum = 0.0;
        for (const EvalRecord& r : result.records) {
            if (r.policy != s.policy) continue;
            ++s.episodes;
            s.win_rate += (r.outcome == Outcome::Win);
            s.loss_rate += (r.outcome == Outcome::Loss);
            s.truncated_rate += (r.outcome == Outcome::Truncated);
            s.mean_cost += r.total_cost;
            s.mean_portfolio_size += static_cast<double>(r.portfolio_size);
            s.mean_path_length += r.path_length;
            j_sum += r.j_contribution;
        }
        const double inv = 1.0 / static_cast<double>(s.episodes);
        s.win_rate *= inv;
        s.loss_rate *= inv;
        s.truncated_rate *= inv;
        s.mean_cost *= inv;
        s.mean_cost_pct = s.mean_cost / kEpisodeBudgetUnits * 100.0;
        s.mean_portfolio_size *= inv;
        s.mean_path_length *= inv;
        s.j_hat = j_sum * inv;
        result.summaries.push_back(std::move(s));
    }

    double reference_j = result.summaries.front().j_hat;
    for (const PolicySummary& s : result.summaries)
        if (s.policy == regret_reference) reference_j = s.j_hat;
    for (PolicySummary& s : result.summaries) s.regret = reference_j - s.j_hat;
    return result;
}

std::size_t write_episode_traces(Environment& env, const EvalCorpus& corpus, EvalPolicy& policy,
                                 const std::filesystem::path& path, std::size_t max_episodes) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    const std::size_t n = std::min(max_episodes, corpus.episodes.size());
    for (std::size_t e = 0; e < n; ++e) {
        const Observation obs =
            env.reset(corpus.episodes[e].maturity, corpus.adversaries, corpus.episodes[e].seed);
        env.apply_action(policy.select(env, obs, e));
        int step = 0;
        while (true) {
            const StepOutcome so = env.step();
            ++step;
            for (const StepEvent& ev : so.events) {
                Json rec{{"episode", e},
                         {"step", step},
                         {"adversary", ev.adversary_id},
                         {"technique", ev.technique.render()},
                         {"result", to_string(ev.result)},
                         {"reward", so.reward}};
                out << rec.dump() << '\n';
            }
            if (so.done) break;
        }
    }
    return n;
}

std::string summaries_to_text(const std::vector<PolicySummary>& summaries) {
    std::ostringstream os;
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%-18s %6s %6s %8s %7s %9s %9s %9s %9s\n", "policy", "win%",
                  "loss%", "cost", "cost%", "avg.mit", "path.len", "J", "regret");
    os << buf;
    for (const PolicySummary& s : summaries) {
        std::snprintf(buf, sizeof(buf), "%-18s %6.1f %6.1f %8.2f %7.1f %9.2f %9.2f %9.4f %9.4f\n",
                      s.policy.c_str(), 100.0 * s.win_rate, 100.0 * s.loss_rate, s.mean_cost,
                      s.mean_cost_pct, s.mean_portfolio_size, s.mean_path_length, s.j_hat,
                      s.regret);
        os << buf;
    }
    return os.str();
}

Json summaries_to_json(const std::vector<PolicySummary>& summaries) {
    Json arr = Json::array();
    for (const PolicySummary& s : summaries)
        arr.push_back(Json{{"policy", s.policy},
                           {"episodes", s.episodes},
                           {"win_rate", s.win_rate},
                           {"loss_rate", s.loss_rate},
                           {"truncated_rate", s.truncated_rate},
                           {"mean_cost", s.mean_cost},
                           {"mean_cost_pct", s.mean_cost_pct},
                           {"mean_portfolio_size", s.mean_portfolio_size},
                           {"mean_path_length", s.mean_path_length},
                           {"j_hat", s.j_hat},
                           {"regret", s.regret}});
    return arr;
}

std::string records_to_csv(const std::vector<EvalRecord>& records) {
    std::ostringstream os;
    os << "episode_id,policy,outcome,total_cost,portfolio_size,path_length,loss,j\n";
    for (const EvalRecord& r : records) {
        os << r.episode_id << ',' << r.policy << ',' << to_string(r.outcome) << ','
           << r.total_cost << ',' << r.portfolio_size << ',' << r.path_length << ','
           << r.loss_indicator << ',' << r.j_contribution << '\n';
    }
    return os.str();
}

}  // namespace mitplan
