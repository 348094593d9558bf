#include "mitplan/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <sstream>
#include <thread>

#include "mitplan/errors.hpp"

namespace mitplan {

std::vector<std::vector<double>> population_maturities(const Workspace& ws,
                                                       const RunConfig& config) {
    const auto orgs = sample_population(config.prior, ws.difficulties(), config.org_count);
    std::vector<std::vector<double>> out;
    out.reserve(orgs.size());
    for (const OrgProfile& org : orgs) out.push_back(ws.maturity_for(org));
    return out;
}

Environment make_environment(const Workspace& ws, const SimConfig& sim) {
    return Environment(ws.env_model(), sim);
}

TrainResult train_policy(const Workspace& ws, const RunConfig& config) {
    Environment env = make_environment(ws, config.sim);
    EpisodeSource source;
    source.org_maturities = population_maturities(ws, config);
    source.adversaries = ws.episode_adversaries(config.sim.n_adversaries);
    return train(env, source, config.train);
}

EvalCorpus make_eval_corpus(const Workspace& ws, const RunConfig& config, std::size_t episodes,
                            std::uint64_t seed) {
    EvalCorpus corpus;
    corpus.adversaries = ws.episode_adversaries(config.sim.n_adversaries);

    RunConfig pop_config = config;
    pop_config.prior.rng_seed = seed;
    const auto maturities = population_maturities(ws, pop_config);

    Rng rng(seed ^ 0x9e3779b97f4a7c15ull);
    corpus.episodes.reserve(episodes);
    for (std::size_t i = 0; i < episodes; ++i) {
        EvalEpisodeSpec spec;
        spec.maturity = maturities[i % maturities.size()];
        spec.seed = rng.next_u64();
        corpus.episodes.push_back(std::move(spec));
    }
    return corpus;
}

ReconstructionResult reconstruct_all(const Workspace& ws, const RunConfig& config,
                                     const QNetwork& net, const std::vector<double>& maturity,
                                     std::uint64_t seed, std::size_t workers) {
    const auto adversaries = ws.episode_adversaries(config.sim.n_adversaries);

    // One root query on the full observation, shared across the per-adversary
    // searches.
    Environment probe = make_environment(ws, config.sim);
    const Observation obs = probe.reset(maturity, adversaries, seed);
    const std::vector<double> q = net.forward(obs.flatten());
    const std::vector<double> costs = probe.mitigation_costs();
    const RootPortfolio root = build_root_portfolio(q, costs, config.beam.defender_budget);

    SimConfig recon_sim = config.sim;
    recon_sim.n_adversaries = 1;
    recon_sim.defender_budget = config.beam.defender_budget;
    recon_sim.max_steps = std::max(recon_sim.max_steps, static_cast<int>(config.beam.depth) + 1);

    Rng seeder(seed);
    std::vector<std::uint64_t> seeds(adversaries.size());
    for (std::uint64_t& s : seeds) s = seeder.next_u64();

    std::vector<std::vector<ReconstructedPath>> per_adversary(adversaries.size());
    const auto run_one = [&](Environment& env, std::size_t j) {
        per_adversary[j] =
            reconstruct(env, maturity, adversaries[j], root, config.beam, seeds[j]);
    };
    if (workers <= 1) {
        Environment env = make_environment(ws, recon_sim);
        for (std::size_t j = 0; j < adversaries.size(); ++j) run_one(env, j);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(std::min(workers, adversaries.size()));
        for (std::size_t w = 0; w < errors.size(); ++w) {
            pool.emplace_back([&, w] {
                try {
                    Environment env = make_environment(ws, recon_sim);
                    while (true) {
                        const std::size_t j = next.fetch_add(1);
                        if (j >= adversaries.size()) break;
                        run_one(env, j);
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

    ReconstructionResult result;
    result.root = root;
    for (auto& paths : per_adversary)
        result.paths.insert(result.paths.end(), std::make_move_iterator(paths.begin()),
                            std::make_move_iterator(paths.end()));
    if (!result.paths.empty())
        result.candidates = aggregate_candidates(result.paths, adversaries, ws.effectiveness(),
                                                 ws.catalog(), maturity);
    return result;
}

std::vector<AblationRow> ablation_grid(const Workspace& ws, const RunConfig& base,
                                       const std::vector<std::string>& variants,
                                       std::size_t workers) {
    if (variants.empty()) throw ConfigError("ablation_grid: no variants");

    // Shared static episode specs; each variant runs them under its own sim
    // settings so pairing stays exact within a variant.
    const EvalCorpus base_corpus =
        make_eval_corpus(ws, base, base.eval_episodes, base.eval_seed);

    std::vector<AblationRow> rows;
    for (const std::string& name : variants) {
        const RunConfig cfg = apply_ablation(base, name);
        const TrainResult trained = train_policy(ws, cfg);

        EvalCorpus corpus = base_corpus;
        corpus.adversaries = ws.episode_adversaries(cfg.sim.n_adversaries);

        DqnGreedyPolicy dqn("dqn", trained.network);
        OraclePolicy oracle;
        Environment env = make_environment(ws, cfg.sim);
        const EvalResult eval =
            paired_evaluate(env, corpus, {&dqn, &oracle}, cfg.eval_weights, "oracle", workers);

        AblationRow row;
        row.variant = name;
        row.train_log = trained.log;
        for (const PolicySummary& s : eval.summaries) {
            if (s.policy == "dqn") row.dqn = s;
            if (s.policy == "oracle") row.oracle = s;
        }
        rows.push_back(std::move(row));
    }
    std::stable_sort(rows.begin(), rows.end(),
                     [](const AblationRow& a, const AblationRow& b) {
                         return a.dqn.j_hat > b.dqn.j_hat;
                     });
    return rows;
}

std::string ablation_to_text(const std::vector<AblationRow>& rows) {
    std::ostringstream os;
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%-16s %6s %6s %8s %7s %9s %9s %9s %9s\n", "variant", "win%",
                  "loss%", "cost", "cost%", "avg.mit", "path.len", "J", "regret");
    os << buf;
    for (const AblationRow& r : rows) {
        const PolicySummary& s = r.dqn;
        std::snprintf(buf, sizeof(buf), "%-16s %6.1f %6.1f %8.2f %7.1f %9.2f %9.2f %9.4f %9.4f\n",
                      r.variant.c_str(), 100.0 * s.win_rate, 100.0 * s.loss_rate, s.mean_cost,
                      s.mean_cost_pct, s.mean_portfolio_size, s.mean_path_length, s.j_hat,
                      s.regret);
        os << buf;
    }
    return os.str();
}

Json ablation_to_json(const std::vector<AblationRow>& rows) {
    Json arr = Json::array();
    for (const AblationRow& r : rows) {
        Json curve = Json::array();
        for (const TrainLogEntry& e : r.train_log)
            curve.push_back(Json::array({e.episode, e.replay_mean_reward}));
        arr.push_back(Json{{"variant", r.variant},
                           {"dqn", summaries_to_json({r.dqn})[0]},
                           {"oracle", summaries_to_json({r.oracle})[0]},
                           {"replay_mean_curve", std::move(curve)}});
    }
    return arr;
}

}  // namespace mitplan
