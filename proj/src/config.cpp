#include "mitplan/config.hpp"

#include "mitplan/errors.hpp"

namespace mitplan {

namespace {

MixingMode mixing_from_string(const std::string& s) {
    if (s == "none") return MixingMode::None;
    if (s == "additive") return MixingMode::Additive;
    if (s == "product") return MixingMode::Product;
    throw ParseError("config: unknown mixing mode '" + s + "'");
}

std::string mixing_to_string(MixingMode m) {
    switch (m) {
        case MixingMode::None: return "none";
        case MixingMode::Additive: return "additive";
        case MixingMode::Product: return "product";
    }
    return "none";
}

}  // namespace

RunConfig RunConfig::from_json(const Json& doc, const std::string& where) {
    reject_unknown_keys(doc,
                        {"format", "version", "data_dir", "maturity", "population", "vomm", "sim",
                         "train", "beam", "plan", "eval", "seed"},
                        where);
    if (doc.contains("format") && doc["format"].get<std::string>() != "mitplan-config")
        throw ParseError(where + ": not a config document");
    if (doc.contains("version") && doc["version"].get<int>() != 1)
        throw ParseError(where + ": unsupported config version");

    RunConfig c;
    c.data_dir = doc.value("data_dir", c.data_dir);
    c.seed = doc.value("seed", c.seed);

    if (doc.contains("maturity")) {
        const Json& j = doc["maturity"];
        reject_unknown_keys(j, {"q_exponent"}, where + "/maturity");
        c.q_exponent = j.value("q_exponent", c.q_exponent);
        if (c.q_exponent <= 1.0) throw ValidationError(where + ": q_exponent must be > 1");
    }

    if (doc.contains("population")) {
        const Json& j = doc["population"];
        reject_unknown_keys(j, {"class_probs", "noise_sd", "count", "seed"},
                            where + "/population");
        if (j.contains("class_probs")) {
            const Json& probs = j["class_probs"];
            if (!probs.is_array() || probs.size() != 4)
                throw ParseError(where + ": class_probs must be 4 numbers");
            for (std::size_t i = 0; i < 4; ++i) c.prior.class_probs[i] = probs[i].get<double>();
        }
        c.prior.noise_sd = j.value("noise_sd", c.prior.noise_sd);
        c.prior.rng_seed = j.value("seed", c.prior.rng_seed);
        c.org_count = j.value("count", c.org_count);
        c.prior.validate();
    }

    if (doc.contains("vomm")) {
        const Json& j = doc["vomm"];
        reject_unknown_keys(j, {"max_order", "alpha", "min_support"}, where + "/vomm");
        c.vomm_max_order = j.value("max_order", c.vomm_max_order);
        c.vomm_alpha = j.value("alpha", c.vomm_alpha);
        c.vomm_min_support = j.value("min_support", c.vomm_min_support);
    }

    if (doc.contains("sim")) {
        const Json& j = doc["sim"];
        reject_unknown_keys(j,
                            {"n_adversaries", "defender_budget", "adversary_budget",
                             "adversary_budget_from_spread", "max_steps", "simple_reward"},
                            where + "/sim");
        c.sim.n_adversaries = j.value("n_adversaries", c.sim.n_adversaries);
        c.sim.defender_budget = j.value("defender_budget", c.sim.defender_budget);
        if (j.value("adversary_budget_from_spread", false))
            c.sim.adversary_budget_override.reset();
        else if (j.contains("adversary_budget"))
            c.sim.adversary_budget_override = j["adversary_budget"].get<double>();
        c.sim.max_steps = j.value("max_steps", c.sim.max_steps);
        c.sim.simple_reward = j.value("simple_reward", c.sim.simple_reward);
    }

    if (doc.contains("train")) {
        const Json& j = doc["train"];
        reject_unknown_keys(j,
                            {"learning_rate", "batch_size", "warmup", "epsilon_start",
                             "epsilon_min", "decay_steps", "gamma", "target_sync_interval",
                             "hidden_width", "replay_capacity", "grad_clip", "episodes",
                             "per_step_transitions", "mixing", "mixing_start", "tau", "seed"},
                            where + "/train");
        TrainConfig& t = c.train;
        t.learning_rate = j.value("learning_rate", t.learning_rate);
        t.batch_size = j.value("batch_size", t.batch_size);
        t.warmup = j.value("warmup", t.warmup);
        t.epsilon_start = j.value("epsilon_start", t.epsilon_start);
        t.epsilon_min = j.value("epsilon_min", t.epsilon_min);
        t.decay_steps = j.value("decay_steps", t.decay_steps);
        t.gamma = j.value("gamma", t.gamma);
        t.target_sync_interval = j.value("target_sync_interval", t.target_sync_interval);
        t.hidden_width = j.value("hidden_width", t.hidden_width);
        t.replay_capacity = j.value("replay_capacity", t.replay_capacity);
        t.grad_clip = j.value("grad_clip", t.grad_clip);
        t.episodes = j.value("episodes", t.episodes);
        t.per_step_transitions = j.value("per_step_transitions", t.per_step_transitions);
        if (j.contains("mixing")) t.mixing = mixing_from_string(j["mixing"].get<std::string>());
        t.mixing_start = j.value("mixing_start", t.mixing_start);
        t.tau = j.value("tau", t.tau);
        t.seed = j.value("seed", t.seed);
        if (t.gamma <= 0.0 || t.gamma >= 1.0)
            throw ValidationError(where + ": gamma must lie in (0,1)");
        if (t.epsilon_start < t.epsilon_min)
            throw ValidationError(where + ": epsilon_start below epsilon_min");
    }

    if (doc.contains("beam")) {
        const Json& j = doc["beam"];
        reject_unknown_keys(j,
                            {"width", "depth", "candidate_width", "observed_boost",
                             "success_threshold", "diversity_lambda", "entropy_scale",
                             "entropy_as_confidence", "defender_budget"},
                            where + "/beam");
        BeamConfig& b = c.beam;
        b.width = j.value("width", b.width);
        b.depth = j.value("depth", b.depth);
        b.candidate_width = j.value("candidate_width", b.candidate_width);
        b.observed_boost = j.value("observed_boost", b.observed_boost);
        b.success_threshold = j.value("success_threshold", b.success_threshold);
        b.diversity_lambda = j.value("diversity_lambda", b.diversity_lambda);
        b.entropy_scale = j.value("entropy_scale", b.entropy_scale);
        b.entropy_as_confidence = j.value("entropy_as_confidence", b.entropy_as_confidence);
        b.defender_budget = j.value("defender_budget", b.defender_budget);
    }

    if (doc.contains("plan")) {
        const Json& j = doc["plan"];
        reject_unknown_keys(j, {"weights", "budget"}, where + "/plan");
        if (j.contains("weights")) {
            const Json& w = j["weights"];
            if (!w.is_array() || w.size() != 3)
                throw ParseError(where + ": plan weights must be 3 numbers");
            c.plan_weights.likelihood = w[0].get<double>();
            c.plan_weights.support = w[1].get<double>();
            c.plan_weights.occurrence = w[2].get<double>();
        }
        c.plan_budget = j.value("budget", c.plan_budget);
    }

    if (doc.contains("eval")) {
        const Json& j = doc["eval"];
        reject_unknown_keys(j, {"alpha", "beta", "episodes", "seed"}, where + "/eval");
        c.eval_weights.alpha = j.value("alpha", c.eval_weights.alpha);
        c.eval_weights.beta = j.value("beta", c.eval_weights.beta);
        c.eval_episodes = j.value("episodes", c.eval_episodes);
        c.eval_seed = j.value("seed", c.eval_seed);
    }
    return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
    return from_json(load_json(path), path.string());
}

Json RunConfig::to_json() const {
    return Json{
        {"format", "mitplan-config"},
        {"version", 1},
        {"data_dir", data_dir},
        {"seed", seed},
        {"maturity", Json{{"q_exponent", q_exponent}}},
        {"population", Json{{"class_probs", prior.class_probs},
                            {"noise_sd", prior.noise_sd},
                            {"seed", prior.rng_seed},
                            {"count", org_count}}},
        {"vomm", Json{{"max_order", vomm_max_order},
                      {"alpha", vomm_alpha},
                      {"min_support", vomm_min_support}}},
        {"sim", Json{{"n_adversaries", sim.n_adversaries},
                     {"defender_budget", sim.defender_budget},
                     {"adversary_budget", sim.adversary_budget_override
                                              ? Json(*sim.adversary_budget_override)
                                              : Json(nullptr)},
                     {"adversary_budget_from_spread", !sim.adversary_budget_override.has_value()},
                     {"max_steps", sim.max_steps},
                     {"simple_reward", sim.simple_reward}}},
        {"train", Json{{"learning_rate", train.learning_rate},
                       {"batch_size", train.batch_size},
                       {"warmup", train.warmup},
                       {"epsilon_start", train.epsilon_start},
                       {"epsilon_min", train.epsilon_min},
                       {"decay_steps", train.decay_steps},
                       {"gamma", train.gamma},
                       {"target_sync_interval", train.target_sync_interval},
                       {"hidden_width", train.hidden_width},
                       {"replay_capacity", train.replay_capacity},
                       {"grad_clip", train.grad_clip},
                       {"episodes", train.episodes},
                       {"per_step_transitions", train.per_step_transitions},
                       {"mixing", mixing_to_string(train.mixing)},
                       {"mixing_start", train.mixing_start},
                       {"tau", train.tau},
                       {"seed", train.seed}}},
        {"beam", Json{{"width", beam.width},
                      {"depth", beam.depth},
                      {"candidate_width", beam.candidate_width},
                      {"observed_boost", beam.observed_boost},
                      {"success_threshold", beam.success_threshold},
                      {"diversity_lambda", beam.diversity_lambda},
                      {"entropy_scale", beam.entropy_scale},
                      {"entropy_as_confidence", beam.entropy_as_confidence},
                      {"defender_budget", beam.defender_budget}}},
        {"plan", Json{{"weights", Json::array({plan_weights.likelihood, plan_weights.support,
                                               plan_weights.occurrence})},
                      {"budget", plan_budget}}},
        {"eval", Json{{"alpha", eval_weights.alpha},
                      {"beta", eval_weights.beta},
                      {"episodes", eval_episodes},
                      {"seed", eval_seed}}}};
}

RunConfig apply_ablation(const RunConfig& base, const std::string& variant) {
    RunConfig c = base;
    if (variant == "base") return c;
    if (variant == "adv-budget-50") c.sim.adversary_budget_override = 50.0;
    else if (variant == "adv-budget-150") c.sim.adversary_budget_override = 150.0;
    else if (variant == "def-budget-50") c.sim.defender_budget = 50.0;
    else if (variant == "def-budget-150") c.sim.defender_budget = 150.0;
    else if (variant == "batch-32") c.train.batch_size = 32;
    else if (variant == "batch-128") c.train.batch_size = 128;
    else if (variant == "simple-reward") c.sim.simple_reward = true;
    else if (variant == "org-count-50") c.org_count = 50;
    else if (variant == "org-count-100") c.org_count = 100;
    else if (variant == "decay-1000") c.train.decay_steps = 1000;
    else throw ConfigError("unknown ablation variant '" + variant + "'");
    return c;
}

std::vector<std::string> known_ablations() {
    return {"base",          "adv-budget-50", "adv-budget-150", "def-budget-50",
            "def-budget-150", "batch-32",      "batch-128",      "simple-reward",
            "org-count-50",  "org-count-100", "decay-1000"};
}

}  // namespace mitplan
