#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "mitplan/errors.hpp"
#include "mitplan/pipeline.hpp"

namespace fs = std::filesystem;
using namespace mitplan;

namespace {

struct CommonArgs {
    std::string config_path = "data/config.json";
    std::optional<std::uint64_t> seed;
    std::string data_dir;
    std::size_t workers = 1;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "pipeline configuration file")
        ->capture_default_str();
    cmd->add_option("--seed", args.seed, "override the master seed");
    cmd->add_option("--data-dir", args.data_dir, "override the data directory");
    cmd->add_option("--workers", args.workers, "parallel episode workers")
        ->capture_default_str();
}

RunConfig load_config(const CommonArgs& args) {
    RunConfig config = RunConfig::load(args.config_path);
    if (args.seed) {
        config.seed = *args.seed;
        config.prior.rng_seed = *args.seed;
        config.train.seed = *args.seed;
        config.eval_seed = *args.seed;
    }
    if (!args.data_dir.empty()) config.data_dir = args.data_dir;
    return config;
}

// Every command announces what it is about to run with.
void print_effective(const char* command, const RunConfig& config) {
    std::cout << "command: " << command << "\nseed: " << config.seed << "\neffective config: "
              << config.to_json().dump() << "\n";
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
}

std::vector<double> maturity_for_org_file(const Workspace& ws, const fs::path& org_path) {
    const Json doc = load_json(org_path);
    const OrgProfile org = parse_org_profile(doc, org_path.string());
    return ws.maturity_for(org);
}

int cmd_gen_orgs(const CommonArgs& common, std::size_t count_override, double sd_override,
                 const std::string& prior_override, const std::string& out_path) {
    RunConfig config = load_config(common);
    if (count_override > 0) config.org_count = count_override;
    if (sd_override >= 0.0) config.prior.noise_sd = sd_override;
    if (!prior_override.empty()) {
        std::istringstream is(prior_override);
        std::string part;
        std::size_t i = 0;
        while (std::getline(is, part, ',') && i < 4) config.prior.class_probs[i++] = std::stod(part);
        if (i != 4) throw ConfigError("--prior expects four comma-separated probabilities");
        config.prior.validate();
    }
    print_effective("gen-orgs", config);

    const auto difficulties =
        load_practice_difficulties_file(fs::path(config.data_dir) / "practice_difficulty.json");
    const auto orgs = sample_population(config.prior, difficulties, config.org_count);

    std::ofstream out(out_path);
    if (!out) throw IoError("cannot write " + out_path);
    for (const OrgProfile& org : orgs) out << org_profile_to_json(org).dump() << '\n';
    std::cout << "wrote " << orgs.size() << " organizations to " << out_path << "\n";
    return 0;
}

int cmd_fit_vomm(const CommonArgs& common, const std::string& out_path,
                 const std::string& corpus_out) {
    const RunConfig config = load_config(common);
    print_effective("fit-vomm", config);

    const Workspace ws = Workspace::load(config);
    for (const std::string& w : ws.flow_warnings().messages) std::cout << "warning: " << w << "\n";
    ws.vomm().save(out_path);
    if (!corpus_out.empty()) {
        FlowWarnings warnings;
        const auto corpus =
            load_corpus_dir(fs::path(config.data_dir) / "flows", warnings);
        save_corpus(corpus_out, corpus);
        std::cout << "wrote " << corpus.size() << " weighted sequences to " << corpus_out
                  << "\n";
    }
    std::cout << "fitted vomm: vocab " << ws.vomm().vocab_size() << ", max order "
              << ws.vomm().max_order() << ", saved to " << out_path << "\n";
    return 0;
}

int cmd_train(const CommonArgs& common, const std::string& orgs_path,
              const std::string& vomm_path, std::size_t episodes_override,
              const std::string& out_path, const std::string& log_path) {
    RunConfig config = load_config(common);
    if (episodes_override > 0) config.train.episodes = episodes_override;
    print_effective("train", config);

    std::optional<fs::path> vomm = vomm_path.empty() ? std::nullopt
                                                     : std::optional<fs::path>(vomm_path);
    const Workspace ws = Workspace::load(config, vomm);

    Environment env = make_environment(ws, config.sim);
    EpisodeSource source;
    if (!orgs_path.empty()) {
        for (const OrgProfile& org : load_org_profiles(orgs_path))
            source.org_maturities.push_back(ws.maturity_for(org));
    } else {
        source.org_maturities = population_maturities(ws, config);
    }
    source.adversaries = ws.episode_adversaries(config.sim.n_adversaries);

    const TrainResult result = train(env, source, config.train);
    save_checkpoint(out_path, result.network, config.train, ws.catalog(), ws.technique_index());
    if (!log_path.empty()) save_train_log(log_path, result.log);

    double recent = 0.0;
    const std::size_t tail = std::min<std::size_t>(100, result.log.size());
    for (std::size_t i = result.log.size() - tail; i < result.log.size(); ++i)
        recent += result.log[i].episode_return;
    std::cout << "trained " << result.log.size() << " episodes, " << result.updates
              << " updates; mean return over last " << tail << ": " << recent / double(tail)
              << "\ncheckpoint: " << out_path << "\n";
    return 0;
}

QNetwork load_compatible_network(const Workspace& ws, const std::string& checkpoint_path) {
    const Checkpoint ck = load_checkpoint(checkpoint_path);
    std::vector<std::string> mits;
    for (const auto& e : ws.catalog().entries) mits.push_back(e.id.value);
    std::vector<std::string> techs;
    for (const auto& t : ws.technique_index().tokens) techs.push_back(t.render());
    if (ck.mitigation_ids != mits || ck.technique_tokens != techs)
        throw ConfigError("checkpoint " + checkpoint_path +
                          " was trained against a different catalog or technique index");
    return ck.network;
}

int cmd_evaluate(const CommonArgs& common, const std::string& checkpoint_path,
                 std::size_t episodes_override, const std::string& ablation_list,
                 const std::string& trace_path, const std::string& out_path) {
    RunConfig config = load_config(common);
    if (episodes_override > 0) config.eval_episodes = episodes_override;
    print_effective("evaluate", config);

    const Workspace ws = Workspace::load(config);

    if (!ablation_list.empty()) {
        std::vector<std::string> variants;
        std::string item;
        std::istringstream is(ablation_list);
        while (std::getline(is, item, ',')) {
            if (item == "all") {
                variants = known_ablations();
                break;
            }
            if (!item.empty()) variants.push_back(item);
        }
        const auto rows = ablation_grid(ws, config, variants, common.workers);
        const std::string table = ablation_to_text(rows);
        std::cout << table;
        if (!out_path.empty()) {
            save_json(out_path, ablation_to_json(rows));
            write_text(fs::path(out_path).replace_extension(".txt"), table);
        }
        return 0;
    }

    if (checkpoint_path.empty())
        throw ConfigError("evaluate: --checkpoint is required unless --ablation is given");
    const QNetwork net = load_compatible_network(ws, checkpoint_path);

    const EvalCorpus corpus = make_eval_corpus(ws, config, config.eval_episodes, config.eval_seed);
    Environment env = make_environment(ws, config.sim);
    DqnGreedyPolicy dqn("dqn", net);
    OraclePolicy oracle;
    RandomFeasiblePolicy random("random", config.eval_seed ^ 0x5bf03635);
    const EvalResult res = paired_evaluate(env, corpus, {&dqn, &oracle, &random},
                                           config.eval_weights, "oracle", common.workers);
    const std::string table = summaries_to_text(res.summaries);
    std::cout << table;
    if (!out_path.empty()) {
        save_json(out_path, summaries_to_json(res.summaries));
        write_text(fs::path(out_path).replace_extension(".csv"), records_to_csv(res.records));
        write_text(fs::path(out_path).replace_extension(".txt"), table);
    }
    if (!trace_path.empty()) {
        const std::size_t traced = write_episode_traces(env, corpus, dqn, trace_path);
        std::cout << "traced " << traced << " episodes to " << trace_path << "\n";
    }
    return 0;
}

int cmd_reconstruct(const CommonArgs& common, const std::string& checkpoint_path,
                    const std::string& org_path, const std::string& vomm_path,
                    std::size_t width, std::size_t depth, const std::string& out_path) {
    RunConfig config = load_config(common);
    if (width > 0) config.beam.width = width;
    if (depth > 0) config.beam.depth = depth;
    print_effective("reconstruct", config);

    std::optional<fs::path> vomm = vomm_path.empty() ? std::nullopt
                                                     : std::optional<fs::path>(vomm_path);
    const Workspace ws = Workspace::load(config, vomm);
    const QNetwork net = load_compatible_network(ws, checkpoint_path);
    const std::vector<double> maturity = maturity_for_org_file(ws, org_path);

    const ReconstructionResult result =
        reconstruct_all(ws, config, net, maturity, config.seed, common.workers);
    save_json(out_path, paths_to_json(result.paths));
    std::cout << "reconstructed " << result.paths.size() << " paths over "
              << config.sim.n_adversaries << " adversaries; " << result.candidates.size()
              << " candidate mitigations\npaths: " << out_path << "\n";
    return 0;
}

int cmd_plan(const CommonArgs& common, const std::string& paths_path, const std::string& org_path,
             double budget_override, const std::string& out_path) {
    RunConfig config = load_config(common);
    if (budget_override >= 0.0) config.plan_budget = budget_override;
    print_effective("plan", config);

    const Workspace ws = Workspace::load(config);
    const std::vector<double> maturity = maturity_for_org_file(ws, org_path);
    const auto paths = paths_from_json(load_json(paths_path));
    if (paths.empty()) throw ValidationError("plan: paths document holds no paths");

    const auto candidates = aggregate_candidates(paths, ws.adversaries(), ws.effectiveness(),
                                                 ws.catalog(), maturity);
    const auto costs = portfolio_costs(ws.catalog(), ws.pct(), ws.scaler(), maturity);
    const MitigationPlan plan =
        build_plan(candidates, ws.catalog(), costs, config.plan_budget, config.plan_weights);

    const std::string text = plan_to_text(plan);
    std::cout << text;
    save_json(out_path, plan_to_json(plan));
    write_text(fs::path(out_path).replace_extension(".txt"), text);
    return 0;
}

std::string render_path_listing(const std::vector<ReconstructedPath>& paths,
                                std::size_t per_adversary) {
    std::ostringstream os;
    std::map<std::string, std::size_t> shown;
    for (const ReconstructedPath& p : paths) {
        if (shown[p.adversary_id] >= per_adversary) continue;
        ++shown[p.adversary_id];
        char head[160];
        std::snprintf(head, sizeof(head), "%s  score %.4f  reward %.1f  loglik %.2f  [%s]\n",
                      p.adversary_id.c_str(), p.score, p.cum_reward, p.cum_loglik,
                      to_string(p.outcome).c_str());
        os << head;
        for (const TrailEntry& e : p.trail) {
            os << "    " << e.technique.render() << "  ->  "
               << (e.mitigation ? e.mitigation->value : std::string("(uncovered)")) << "  ["
               << to_string(e.result) << "]\n";
        }
        os << "\n";
    }
    return os.str();
}

int cmd_report(const CommonArgs& common, const std::string& train_log_path,
               const std::string& ablation_path, const std::string& paths_path,
               const std::string& out_dir) {
    const RunConfig config = load_config(common);
    print_effective("report", config);
    fs::create_directories(out_dir);

    bool wrote = false;
    if (!train_log_path.empty()) {
        const auto log = load_train_log(train_log_path);
        write_training_curve(fs::path(out_dir) / "training_curve.svg", log,
                             "training reward (replay mean)");
        std::cout << "wrote " << (fs::path(out_dir) / "training_curve.svg").string() << "\n";
        wrote = true;
    }
    if (!paths_path.empty()) {
        const auto paths = paths_from_json(load_json(paths_path));
        const std::string listing = render_path_listing(paths, 2);
        write_text(fs::path(out_dir) / "path_listing.txt", listing);
        std::cout << listing;
        std::cout << "wrote " << (fs::path(out_dir) / "path_listing.txt").string() << "\n";
        wrote = true;
    }
    if (!ablation_path.empty()) {
        const Json doc = load_json(ablation_path);

        std::vector<ChartSeries> j_series;
        ChartSeries j{"J(dqn)", {}};
        double x = 0.0;
        std::string legend;
        for (const Json& row : doc) {
            j.points.emplace_back(x, row["dqn"]["j_hat"].get<double>());
            legend += std::to_string(static_cast<int>(x)) + "=" +
                      row["variant"].get<std::string>() + " ";
            x += 1.0;
        }
        j_series.push_back(std::move(j));
        write_line_chart_svg(fs::path(out_dir) / "ablation.svg", "ablation J by variant",
                             "variant index", "J", j_series);
        write_text(fs::path(out_dir) / "ablation_legend.txt", legend + "\n");
        std::cout << "wrote " << (fs::path(out_dir) / "ablation.svg").string() << "\n";

        // Learning-dynamics overlay: replay-mean reward per variant.
        std::vector<ChartSeries> curves;
        for (const Json& row : doc) {
            if (!row.contains("replay_mean_curve")) continue;
            ChartSeries s{row["variant"].get<std::string>(), {}};
            for (const Json& pt : row["replay_mean_curve"])
                s.points.emplace_back(pt[0].get<double>(), pt[1].get<double>());
            if (!s.points.empty()) curves.push_back(std::move(s));
        }
        if (!curves.empty()) {
            write_line_chart_svg(fs::path(out_dir) / "ablation_learning.svg",
                                 "replay mean reward by variant", "episode", "reward", curves);
            std::cout << "wrote " << (fs::path(out_dir) / "ablation_learning.svg").string()
                      << "\n";
        }
        wrote = true;
    }
    if (!wrote)
        std::cout << "nothing to report: pass --train-log, --ablation, and/or --paths\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"adversary-aware mitigation planning pipeline"};
    app.require_subcommand(1);

    CommonArgs common;

    // gen-orgs
    auto* gen = app.add_subcommand("gen-orgs", "sample a synthetic defender population");
    std::size_t gen_count = 0;
    double gen_sd = -1.0;
    std::string gen_prior, gen_out = "orgs.jsonl";
    add_common(gen, common);
    gen->add_option("--count", gen_count, "population size (overrides config)");
    gen->add_option("--sd", gen_sd, "latent noise sd (overrides config)");
    gen->add_option("--prior", gen_prior, "class prior as p1,p2,p3,p4 (overrides config)");
    gen->add_option("--out", gen_out, "output population file")->capture_default_str();

    // fit-vomm
    auto* fit = app.add_subcommand("fit-vomm", "fit the sequence model from the flow corpus");
    std::string fit_out = "vomm.json", fit_corpus;
    add_common(fit, common);
    fit->add_option("--out", fit_out, "serialized model path")->capture_default_str();
    fit->add_option("--corpus-out", fit_corpus, "also write the weighted sequence corpus here");

    // train
    auto* tr = app.add_subcommand("train", "train the mitigation policy");
    std::string tr_orgs, tr_vomm, tr_out = "checkpoint.json", tr_log = "train_log.jsonl";
    std::size_t tr_episodes = 0;
    add_common(tr, common);
    tr->add_option("--orgs", tr_orgs, "population file (default: synthesized from config)");
    tr->add_option("--vomm", tr_vomm, "serialized vomm (default: fitted from the flow corpus)");
    tr->add_option("--episodes", tr_episodes, "episode count (overrides config)");
    tr->add_option("--out", tr_out, "checkpoint path")->capture_default_str();
    tr->add_option("--log", tr_log, "training log path")->capture_default_str();

    // evaluate
    auto* ev = app.add_subcommand("evaluate", "paired evaluation against the oracle");
    std::string ev_checkpoint, ev_ablation, ev_trace, ev_out = "evaluation.json";
    std::size_t ev_episodes = 0;
    add_common(ev, common);
    ev->add_option("--checkpoint", ev_checkpoint, "trained checkpoint");
    ev->add_option("--episodes", ev_episodes, "episode count (overrides config)");
    ev->add_option("--trace", ev_trace, "write per-step episode trace records here");
    ev->add_option("--ablation", ev_ablation,
                   "comma-separated ablation variants (or 'all'); trains each variant");
    ev->add_option("--out", ev_out, "summary output path")->capture_default_str();

    // reconstruct
    auto* rc = app.add_subcommand("reconstruct", "beam-search attack path reconstruction");
    std::string rc_checkpoint, rc_org = "data/example_org.json", rc_vomm, rc_out = "paths.json";
    std::size_t rc_width = 0, rc_depth = 0;
    add_common(rc, common);
    rc->add_option("--checkpoint", rc_checkpoint, "trained checkpoint")->required();
    rc->add_option("--org", rc_org, "organization profile")->capture_default_str();
    rc->add_option("--vomm", rc_vomm, "serialized vomm (default: fitted from the flow corpus)");
    rc->add_option("--beam-width", rc_width, "beam width (overrides config)");
    rc->add_option("--beam-depth", rc_depth, "beam depth (overrides config)");
    rc->add_option("--out", rc_out, "paths output")->capture_default_str();

    // plan
    auto* pl = app.add_subcommand("plan", "knapsack plan from reconstructed paths");
    std::string pl_paths = "paths.json", pl_org = "data/example_org.json",
                pl_out = "plan.json";
    double pl_budget = -1.0;
    add_common(pl, common);
    pl->add_option("--paths", pl_paths, "reconstructed paths document")->capture_default_str();
    pl->add_option("--org", pl_org, "organization profile")->capture_default_str();
    pl->add_option("--budget", pl_budget, "planning budget in units (overrides config)");
    pl->add_option("--out", pl_out, "plan output")->capture_default_str();

    // report
    auto* rp = app.add_subcommand("report", "render figures and tables");
    std::string rp_train_log, rp_ablation, rp_paths, rp_out_dir = "report";
    add_common(rp, common);
    rp->add_option("--train-log", rp_train_log, "training log to plot");
    rp->add_option("--ablation", rp_ablation, "ablation summary json to plot");
    rp->add_option("--paths", rp_paths, "reconstructed paths to list");
    rp->add_option("--out-dir", rp_out_dir, "output directory")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return cmd_gen_orgs(common, gen_count, gen_sd, gen_prior, gen_out);
        if (fit->parsed()) return cmd_fit_vomm(common, fit_out, fit_corpus);
        if (tr->parsed())
            return cmd_train(common, tr_orgs, tr_vomm, tr_episodes, tr_out, tr_log);
        if (ev->parsed())
            return cmd_evaluate(common, ev_checkpoint, ev_episodes, ev_ablation, ev_trace,
                                ev_out);
        if (rc->parsed())
            return cmd_reconstruct(common, rc_checkpoint, rc_org, rc_vomm, rc_width, rc_depth,
                                   rc_out);
        if (pl->parsed()) return cmd_plan(common, pl_paths, pl_org, pl_budget, pl_out);
        if (rp->parsed())
            return cmd_report(common, rp_train_log, rp_ablation, rp_paths, rp_out_dir);
    } catch (const Error& e) {
        std::cerr << "error code=" << e.code() << " msg=\"" << e.what() << "\"\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error code=internal msg=\"" << e.what() << "\"\n";
        return 2;
    }
    return 0;
}
