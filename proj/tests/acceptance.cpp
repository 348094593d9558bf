// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Runs entirely on the bundled data set.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mitplan/beam.hpp"
#include "mitplan/dqn.hpp"
#include "mitplan/errors.hpp"
#include "mitplan/eval.hpp"
#include "mitplan/flow.hpp"
#include "mitplan/knapsack.hpp"
#include "mitplan/maturity.hpp"
#include "mitplan/oracle.hpp"
#include "mitplan/org_synth.hpp"
#include "mitplan/pipeline.hpp"
#include "mitplan/plan.hpp"
#include "mitplan/vomm.hpp"
#include "mitplan/workspace.hpp"

using namespace mitplan;

namespace {

struct CheckFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool cond, const std::string& msg) {
    if (!cond) throw CheckFailure(msg);
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

TechniqueToken tok(const std::string& s) { return TechniqueToken::parse(s); }

RunConfig bundled_config() {
    RunConfig c = RunConfig::load(std::string(MITPLAN_DATA_DIR) + "/config.json");
    c.data_dir = MITPLAN_DATA_DIR;
    return c;
}

// ------------------------------------------------------------------ helpers

// Track every portfolio any criterion emits so the budget invariant can be
// asserted globally (criterion 5).
std::vector<std::pair<double, double>>& emitted_portfolios() {
    static std::vector<std::pair<double, double>> all;  // (cost, budget)
    return all;
}

void note_portfolio(const PortfolioAction& action, double budget) {
    emitted_portfolios().emplace_back(action.total_cost, budget);
}

// The dominant-mitigation micro-world shared by criteria 10 and 12: one
// adversary, two techniques, three equal-cost mitigations of which only
// M1001 covers everything at full effectiveness. Budget fits exactly one.
struct ToyWorld {
    VommModel vomm;
    EffectivenessTable eff;
    AdvCostTable adv_costs;
    MitigationCatalog catalog;
    PctCostTable pct;
    MaturityScaler scaler;
    AdversaryProfile adversary;
    std::vector<double> maturity{1.0, 1.0, 1.0};

    ToyWorld() {
        WeightedSequence s1;
        s1.bundle_id = "t1";
        s1.tokens = {tok("TA0007:T1083"), tok("TA0007:T1083"), tok("TA0040:T1486")};
        WeightedSequence s2;
        s2.bundle_id = "t2";
        s2.tokens = {tok("TA0007:T1083"), tok("TA0040:T1486")};
        vomm = VommModel::fit({s1, s2}, 2);

        eff = EffectivenessTable::from_json(Json{
            {"format", "mitplan-effectiveness"},
            {"version", 1},
            {"coverage", Json{{"TA0040:T1486", {"M1001"}},
                              {"TA0007:T1083", {"M1001", "M1002"}}}},
            {"global",
             {Json{{"technique", "TA0040:T1486"}, {"mitigation", "M1001"}, {"effectiveness", 5.0}},
              Json{{"technique", "TA0007:T1083"}, {"mitigation", "M1001"}, {"effectiveness", 5.0}},
              Json{{"technique", "TA0007:T1083"}, {"mitigation", "M1002"},
                   {"effectiveness", 2.0}}}}});
        adv_costs = AdvCostTable::from_json(Json{{"format", "mitplan-pctcost-adv"},
                                                 {"version", 1},
                                                 {"default", {0.05, 0.05, 0.05, 0.05, 0.05}}});
        catalog = MitigationCatalog::from_json(Json::parse(R"([
            {"id":"M1001","cost":3,"complexity":3},
            {"id":"M1002","cost":3,"complexity":3},
            {"id":"M1003","cost":3,"complexity":3}])"));
        pct = PctCostTable::load(std::string(MITPLAN_DATA_DIR) + "/pctcost_defender.json");

        adversary.adversary_id = "toy-adv";
        adversary.adv_type = "criminal";
        adversary.resource_level = "medium";
        adversary.sophistication = Sophistication::Medium;
        adversary.observed_techniques = {tok("TA0040:T1486"), tok("TA0007:T1083")};
    }

    EnvModel model() {
        EnvModel m;
        m.vomm = &vomm;
        m.effectiveness = &eff;
        m.adv_costs = &adv_costs;
        m.catalog = &catalog;
        m.pct = &pct;
        m.scaler = &scaler;
        m.technique_index = TechniqueIndex::build(vomm, {adversary}, eff);
        return m;
    }

    SimConfig sim() const {
        SimConfig c;
        c.n_adversaries = 1;
        c.defender_budget = 50.0;  // exactly one 40-unit mitigation fits
        c.max_steps = 60;
        return c;
    }

    TrainConfig train_config() const {
        TrainConfig c;
        c.learning_rate = 1e-3;
        c.grad_clip = 0.0;
        c.hidden_width = 64;
        c.episodes = 2000;
        c.seed = 7;
        return c;
    }
};

struct ToyTrained {
    QNetwork network;
    double train_seconds = 0.0;
};

const ToyTrained& toy_trained(ToyWorld& toy) {
    static const ToyTrained cached = [&]() {
        Environment env(toy.model(), toy.sim());
        EpisodeSource source;
        source.org_maturities = {toy.maturity};
        source.adversaries = {toy.adversary};
        const auto t0 = std::chrono::steady_clock::now();
        TrainResult result = train(env, source, toy.train_config());
        ToyTrained out;
        out.network = std::move(result.network);
        out.train_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return out;
    }();
    return cached;
}

// --------------------------------------------------------------- criteria --

void criterion_vomm_exactness() {
    std::vector<WeightedSequence> corpus;
    for (int i = 0; i < 4; ++i) {
        WeightedSequence s;
        s.bundle_id = "w";
        s.tokens = {tok("TA0001:T1190"), tok("TA0006:T1136.001"), tok("TA0003:T1059")};
        corpus.push_back(s);
    }
    WeightedSequence alt;
    alt.bundle_id = "w";
    alt.tokens = {tok("TA0001:T1190"), tok("TA0006:T1136.001"), tok("TA0005:T1047")};
    corpus.push_back(alt);

    std::vector<TechniqueToken> filler;
    for (int i = 0; i < 196; ++i) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "T%04d", 2000 + i);
        filler.push_back(TechniqueToken{"TA0007", buf});
    }
    const auto model = VommModel::fit(corpus, 2, 1.0, 1.0, filler);
    require(model.vocab_size() == 200, "vocab must close at 200 tokens");

    const VommModel::Context ctx{tok("TA0001:T1190"), tok("TA0006:T1136.001")};
    const auto dist = model.next_distribution(ctx);
    const double seen = dist[*model.token_index(tok("TA0003:T1059"))];
    const double unseen = dist[*model.token_index(filler[0])];
    require(seen == 5.0 / 205.0, "p(T1059|c) must equal 5/205 exactly, got " + fmt(seen));
    require(unseen == 1.0 / 205.0, "unseen token must get 1/205 exactly, got " + fmt(unseen));
}

void criterion_flow_weighting() {
    FlowWarnings warnings;
    const Json linear{
        {"bundle_id", "w1"},
        {"nodes",
         {Json{{"id", "a"}, {"type", "action"}, {"tactic", "TA0001"}, {"technique", "T1190"},
               {"certainty", 0.9}},
          Json{{"id", "b"}, {"type", "action"}, {"tactic", "TA0002"}, {"technique", "T1059"},
               {"certainty", 0.8}},
          Json{{"id", "c"}, {"type", "action"}, {"tactic", "TA0040"}, {"technique", "T1486"},
               {"certainty", 0.7}}}},
        {"edges",
         {Json{{"type", "start"}, {"target", "a"}},
          Json{{"type", "effect"}, {"source", "a"}, {"target", "b"}},
          Json{{"type", "effect"}, {"source", "b"}, {"target", "c"}}}}};
    const auto seqs = parse_bundle(linear, warnings);
    require(seqs.size() == 1, "linear flow must yield one path");
    require(seqs[0].raw_score == 0.9 * 0.8 * 0.7,
            "certainty product must be exactly 0.9*0.8*0.7, got " + fmt(seqs[0].raw_score));
    require(seqs[0].weight == 1.0, "single path weight must be 1");

    Json fan{{"bundle_id", "w2"}, {"nodes", Json::array()}, {"edges", Json::array()}};
    fan["nodes"].push_back(
        Json{{"id", "r"}, {"type", "action"}, {"tactic", "TA0001"}, {"technique", "T1190"}});
    fan["edges"].push_back(Json{{"type", "start"}, {"target", "r"}});
    const char* leaves[] = {"T1486", "T1490", "T1489", "T1041"};
    for (int i = 0; i < 4; ++i) {
        const std::string id = "l" + std::to_string(i);
        fan["nodes"].push_back(Json{{"id", id}, {"type", "action"}, {"tactic", "TA0040"},
                                    {"technique", leaves[i]}});
        fan["edges"].push_back(Json{{"type", "effect"}, {"source", "r"}, {"target", id}});
    }
    const auto fan_seqs = parse_bundle(fan, warnings);
    require(fan_seqs.size() == 4, "fan-out must yield four paths");
    for (const auto& s : fan_seqs)
        require(s.weight == 0.25, "equal fan-out weights must be exactly 0.25, got " +
                                      fmt(s.weight));

    const auto corpus = load_corpus_dir(std::string(MITPLAN_DATA_DIR) + "/flows", warnings);
    std::map<std::string, double> per_bundle;
    for (const auto& s : corpus) per_bundle[s.bundle_id] += s.weight;
    for (const auto& [bundle, total] : per_bundle)
        require(std::abs(total - 1.0) <= 1e-9,
                "bundle " + bundle + " weights sum to " + fmt(total));
}

void criterion_power_mean() {
    Rng rng(51);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 1 + rng.below(6);
        std::vector<int> tiers(n);
        std::vector<Likert> strengths(n);
        for (std::size_t i = 0; i < n; ++i) {
            tiers[i] = 1 + static_cast<int>(rng.below(4));
            strengths[i] = 1 + static_cast<int>(rng.below(5));
        }
        const double q = 1.0 + rng.uniform01() * 3.0;

        // direct evaluation
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double w = strengths[i] / 5.0;
            num += w * std::pow(tiers[i] * w, q);
            den += w;
        }
        const double want = std::pow(num / den, 1.0 / q);
        const double got = practice_power_mean(tiers, strengths, q);
        require(std::abs(got - want) <= 1e-12 * std::max(1.0, std::abs(want)),
                "power mean deviates from direct evaluation by " + fmt(got - want));

        // tier monotonicity
        std::vector<int> raised = tiers;
        const std::size_t j = rng.below(n);
        if (raised[j] < 4) {
            raised[j] += 1;
            require(practice_power_mean(raised, strengths, q) >= got - 1e-12,
                    "raising a tier lowered the mean");
        }
        // q monotonicity
        const double q2 = q + rng.uniform01() * 2.0;
        require(practice_power_mean(tiers, strengths, q2) >= got - 1e-10,
                "power mean decreased in q");
    }
}

void criterion_ordered_logit() {
    Rng rng(52);
    for (int trial = 0; trial < 1000; ++trial) {
        const double b1 = rng.uniform(-2.0, 4.0);
        const double b2 = b1 + 0.05 + rng.uniform01() * 2.0;
        const double b3 = b2 + 0.05 + rng.uniform01() * 2.0;
        const double lo = rng.uniform(0.0, 4.0);
        const double hi = lo + 0.01 + rng.uniform01();

        const auto p = tier_probabilities(lo, {b1, b2, b3});
        double sum = 0.0;
        for (double v : p) sum += v;
        require(std::abs(sum - 1.0) <= 1e-12, "tier probabilities sum to " + fmt(sum));

        const auto ph = tier_probabilities(hi, {b1, b2, b3});
        double cum_lo = 0.0, cum_hi = 0.0;
        for (int k = 0; k < 3; ++k) {
            cum_lo += p[static_cast<std::size_t>(k)];
            cum_hi += ph[static_cast<std::size_t>(k)];
            require(cum_hi <= cum_lo + 1e-12, "stochastic dominance violated");
        }
    }

    MaturityPrior prior;
    prior.rng_seed = 12345;
    const auto difficulties =
        load_practice_difficulties_file(std::string(MITPLAN_DATA_DIR) +
                                        "/practice_difficulty.json");
    const auto orgs = sample_population_detailed(prior, difficulties, 10000);
    std::array<int, 4> counts{0, 0, 0, 0};
    for (const auto& o : orgs) ++counts[static_cast<std::size_t>(o.latent_class - 1)];
    const std::array<double, 4> expect{0.40, 0.30, 0.20, 0.10};
    for (std::size_t k = 0; k < 4; ++k) {
        const double freq = counts[k] / 10000.0;
        require(std::abs(freq - expect[k]) <= 0.02,
                "class " + std::to_string(k + 1) + " frequency " + fmt(freq));
    }
}

void criterion_budget_model() {
    const PctCostTable pct =
        PctCostTable::load(std::string(MITPLAN_DATA_DIR) + "/pctcost_defender.json");
    const MaturityScaler scaler;

    const std::pair<Likert, Likert> anchors[] = {{3, 3}, {3, 4}, {4, 4}, {5, 5}};
    for (int level = 1; level <= 4; ++level) {
        const auto [c, k] = anchors[level - 1];
        const double cost = 100.0 * pct.fraction(c, k) * scaler.level_multiplier(level);
        require(cost == 100.0, "anchor at maturity level " + std::to_string(level) +
                                   " costs " + fmt(cost) + " (must be exactly 100)");
    }
    require(scaler.mu(0.65) == 0.5 * (scaler.mu(0.6) + scaler.mu(0.7)),
            "mu(0.65) must equal the mean of mu(0.6) and mu(0.7)");

    // Pile additional portfolios into the global feasibility check: greedy
    // and exploratory selections over random instances, plus oracle picks.
    Rng rng(53);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t m = 3 + rng.below(12);
        std::vector<double> q(m), costs(m);
        for (std::size_t i = 0; i < m; ++i) {
            q[i] = rng.uniform(-3.0, 3.0);
            costs[i] = rng.uniform(5.0, 80.0);
        }
        Rng sel(rng.next_u64());
        note_portfolio(select_portfolio(q, costs, 100.0, 0.0, sel), 100.0);
        note_portfolio(select_portfolio(q, costs, 100.0, 1.0, sel), 100.0);
    }
    const RunConfig config = bundled_config();
    const Workspace ws = Workspace::load(config);
    Rng orc(54);
    for (int trial = 0; trial < 25; ++trial) {
        std::vector<AdversaryProfile> adversaries;
        for (int i = 0; i < 3; ++i)
            adversaries.push_back(ws.adversaries()[orc.below(ws.adversaries().size())]);
        std::vector<double> maturity(ws.catalog().size());
        for (double& v : maturity) v = orc.uniform01();
        note_portfolio(oracle_select(adversaries, maturity, ws.vomm(), ws.effectiveness(),
                                     ws.catalog(), ws.pct(), ws.scaler()),
                       100.0);
    }

    for (const auto& [cost, budget] : emitted_portfolios())
        require(cost <= budget + 1e-9,
                "portfolio cost " + fmt(cost) + " exceeds budget " + fmt(budget));
    require(emitted_portfolios().size() >= 1000, "expected a large portfolio sample");
}

void criterion_reward() {
    const double a = episode_reward(3, 0.0, 0, false);
    require(a == 300.0, "three blocks must pay exactly 300, got " + fmt(a));
    const double b = episode_reward(0, 26.0, 2, false);
    require(std::abs(b - 26.0 / 3.0) <= 1e-12, "CoverEff case must pay 26/3, got " + fmt(b));
    const double c = episode_reward(0, 0.0, 0, true);
    require(c == 1000.0, "bare win must pay exactly 1000, got " + fmt(c));
}

void criterion_optimization_exactness() {
    // Enumeration oracle with the solver's tie-break contract.
    const auto brute = [](const std::vector<KnapsackItem>& items, double budget) {
        std::vector<std::size_t> order(items.size());
        for (std::size_t i = 0; i < items.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t x, std::size_t y) { return items[x].id < items[y].id; });
        const auto scale = [](double cost) {
            return static_cast<long long>(std::ceil(cost / 0.1 - 1e-9));
        };
        const long long capacity = static_cast<long long>(std::floor(budget / 0.1 + 1e-9));
        double best_v = -1.0;
        std::vector<std::string> best_ids;
        std::vector<std::size_t> best_sel;
        for (std::size_t mask = 0; mask < (std::size_t{1} << items.size()); ++mask) {
            long long w = 0;
            double v = 0.0;
            std::vector<std::string> ids;
            std::vector<std::size_t> sel;
            for (std::size_t pos = 0; pos < order.size(); ++pos) {
                const std::size_t i = order[pos];
                if (!(mask >> i & 1)) continue;
                w += scale(items[i].cost);
                v += items[i].value;
                ids.push_back(items[i].id);
                sel.push_back(i);
            }
            if (w > capacity) continue;
            const bool better =
                best_v < 0.0 || v > best_v ||
                (v == best_v &&
                 (ids.size() < best_ids.size() ||
                  (ids.size() == best_ids.size() && ids < best_ids)));
            if (better) {
                best_v = v;
                best_ids = ids;
                std::sort(sel.begin(), sel.end());
                best_sel = sel;
            }
        }
        return std::make_pair(best_v, best_sel);
    };

    Rng rng(55);
    // plan-side: up to 18 items
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng.below(18);
        std::vector<KnapsackItem> items;
        for (std::size_t i = 0; i < n; ++i) {
            char id[16];
            std::snprintf(id, sizeof(id), "M%04u", static_cast<unsigned>(i));
            items.push_back({id, rng.uniform01() * 10.0,
                             0.1 * static_cast<double>(1 + rng.below(600))});
        }
        const double budget = 0.1 * static_cast<double>(1 + rng.below(1200));
        const auto sol = knapsack01(items, budget);
        const auto [bv, bsel] = brute(items, budget);
        require(sol.selected == bsel, "plan knapsack disagrees with enumeration at trial " +
                                          std::to_string(trial));
        require(sol.total_value == bv, "plan knapsack value mismatch");
    }

    // oracle-side: reduced bundled instances, candidate pools <= 15
    const RunConfig config = bundled_config();
    const Workspace ws = Workspace::load(config);
    int checked = 0;
    for (int trial = 0; trial < 1000 && checked < 200; ++trial) {
        const std::size_t n_adv = 1 + rng.below(4);
        std::vector<AdversaryProfile> adversaries;
        for (std::size_t i = 0; i < n_adv; ++i)
            adversaries.push_back(ws.adversaries()[rng.below(ws.adversaries().size())]);
        std::vector<double> maturity(ws.catalog().size());
        for (double& v : maturity) v = rng.uniform01();
        const double budget = 40.0 + rng.uniform01() * 80.0;

        const auto costs = portfolio_costs(ws.catalog(), ws.pct(), ws.scaler(), maturity);
        const auto scores =
            proxy_benefits(adversaries, ws.vomm(), ws.effectiveness(), ws.catalog(), costs);
        std::vector<std::size_t> candidates;
        for (std::size_t i = 0; i < ws.catalog().size(); ++i) {
            if (costs[i] > budget + 1e-9) continue;
            bool relevant = false;
            for (const auto& adv : adversaries) {
                for (const auto& t : adv.observed_techniques)
                    if (ws.effectiveness().covers(t, ws.catalog().entries[i].id)) {
                        relevant = true;
                        break;
                    }
                if (relevant) break;
            }
            if (relevant) candidates.push_back(i);
        }
        if (candidates.size() > 15) continue;
        ++checked;

        std::vector<KnapsackItem> items;
        for (std::size_t i : candidates)
            items.push_back({ws.catalog().entries[i].id.value, scores[i].benefit, costs[i]});
        const auto [bv, bsel] = brute(items, budget);
        std::vector<std::size_t> want;
        for (std::size_t k : bsel) want.push_back(candidates[k]);
        std::sort(want.begin(), want.end());

        const auto action = oracle_select(adversaries, maturity, ws.vomm(), ws.effectiveness(),
                                          ws.catalog(), ws.pct(), ws.scaler(), budget);
        note_portfolio(action, budget);
        std::vector<std::size_t> got;
        for (std::size_t k = 0; k < action.selected.size(); ++k)
            if (action.selected[k]) got.push_back(k);
        require(got == want, "oracle DP disagrees with enumeration");
        (void)bv;
    }
    require(checked == 200, "expected 200 reduced oracle instances, got " +
                                std::to_string(checked));
}

void criterion_gradient_check() {
    Rng rng(56);
    QNetwork net(4, 8, 3, rng);
    const QNetwork target = net;
    std::vector<Transition> batch;
    for (int i = 0; i < 5; ++i) {
        Transition t;
        t.observation.resize(4);
        t.next_observation.resize(4);
        for (double& v : t.observation) v = rng.uniform(-1.0, 1.0);
        for (double& v : t.next_observation) v = rng.uniform(-1.0, 1.0);
        t.chosen = {static_cast<std::size_t>(rng.below(3))};
        if (rng.uniform01() < 0.5) t.chosen.push_back((t.chosen[0] + 1) % 3);
        std::sort(t.chosen.begin(), t.chosen.end());
        t.reward = rng.uniform(-2.0, 2.0);
        t.done = rng.uniform01() < 0.5;
        batch.push_back(std::move(t));
    }
    std::vector<const Transition*> ptrs;
    for (const auto& t : batch) ptrs.push_back(&t);

    QNetwork::Gradients grads = net.zero_gradients();
    td_loss(net, target, ptrs, 0.9, &grads);
    const auto flat = net.flat_gradients(grads);
    auto params = net.parameters();

    const double h = 1e-5;
    double worst = 0.0;
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double saved = *params[i];
        *params[i] = saved + h;
        const double up = td_loss(net, target, ptrs, 0.9);
        *params[i] = saved - h;
        const double dn = td_loss(net, target, ptrs, 0.9);
        *params[i] = saved;
        const double fd = (up - dn) / (2.0 * h);
        const double denom = std::max({std::abs(fd), std::abs(flat[i]), 1e-8});
        worst = std::max(worst, std::abs(fd - flat[i]) / denom);
    }
    require(worst < 1e-4, "worst relative gradient error " + fmt(worst));
}

void criterion_determinism() {
    const RunConfig config = bundled_config();
    const Workspace ws = Workspace::load(config);

    // snapshot/restore bit-reproducibility
    SimConfig sim = config.sim;
    sim.n_adversaries = 4;
    Environment env = make_environment(ws, sim);
    const auto adversaries = ws.episode_adversaries(4);
    std::vector<double> maturity(ws.catalog().size(), 0.6);
    env.reset(maturity, adversaries, 2024);
    PortfolioAction action = PortfolioAction::empty(ws.catalog().size());
    action.selected[*ws.catalog().index_of(MitigationId{"M1027"})] = 1;
    env.apply_action(action);
    env.step();
    const auto blob = env.snapshot();
    Environment env2 = make_environment(ws, sim);
    env2.reset(maturity, adversaries, 1);
    env2.restore(blob);
    require(env2.snapshot() == blob, "restore/snapshot round trip not bit-identical");
    while (env.outcome() == Outcome::Running)
        if (env.step().done) break;
    while (env2.outcome() == Outcome::Running)
        if (env2.step().done) break;
    require(env.snapshot() == env2.snapshot(),
            "trajectories diverge after snapshot round trip");

    // beam expansion leaves parents untouched
    SimConfig rsim = sim;
    rsim.n_adversaries = 1;
    rsim.defender_budget = config.beam.defender_budget;
    Environment renv = make_environment(ws, rsim);
    renv.reset(maturity, ws.episode_adversaries(1), 77);
    renv.apply_action(action);
    const auto parent = renv.snapshot();
    for (const TechniqueToken& t :
         {tok("TA0001:T1190"), tok("TA0006:T1110"), tok("TA0040:T1486")}) {
        renv.restore(parent);
        renv.step_forced(0, t, std::nullopt, config.beam.success_threshold);
        renv.restore(parent);
        require(renv.snapshot() == parent, "candidate expansion mutated the parent snapshot");
    }

    // full paired evaluation bit-reproducibility
    const EvalCorpus corpus = make_eval_corpus(ws, config, 40, 31337);
    Environment eval_env = make_environment(ws, config.sim);
    OraclePolicy oracle;
    RandomFeasiblePolicy random_a("random", 5);
    const EvalResult a = paired_evaluate(eval_env, corpus, {&oracle, &random_a});
    RandomFeasiblePolicy random_b("random", 5);
    const EvalResult b = paired_evaluate(eval_env, corpus, {&oracle, &random_b});
    require(a.records.size() == b.records.size(), "evaluation record counts differ");
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        require(a.records[i].j_contribution == b.records[i].j_contribution &&
                    a.records[i].outcome == b.records[i].outcome &&
                    a.records[i].path_length == b.records[i].path_length &&
                    a.records[i].total_cost == b.records[i].total_cost,
                "paired evaluation is not bit-reproducible at record " + std::to_string(i));
    }
}

void criterion_learning_signal() {
    ToyWorld toy;
    const ToyTrained& trained = toy_trained(toy);
    require(trained.train_seconds < 300.0,
            "toy training took " + fmt(trained.train_seconds) + "s (budget 300s)");

    Environment env(toy.model(), toy.sim());
    const std::size_t dom = *toy.catalog.index_of(MitigationId{"M1001"});

    EvalCorpus corpus;
    corpus.adversaries = {toy.adversary};
    Rng cr(99);
    for (int i = 0; i < 200; ++i) corpus.episodes.push_back({toy.maturity, cr.next_u64()});

    DqnGreedyPolicy dqn("dqn", trained.network);
    int picks = 0;
    for (std::size_t e = 0; e < corpus.episodes.size(); ++e) {
        const Observation obs =
            env.reset(corpus.episodes[e].maturity, corpus.adversaries, corpus.episodes[e].seed);
        const PortfolioAction act = dqn.select(env, obs, e);
        note_portfolio(act, toy.sim().defender_budget);
        if (act.selected[dom]) ++picks;
    }
    require(picks >= 180, "dominant mitigation picked in only " + std::to_string(picks) +
                              "/200 greedy evaluations");

    RandomFeasiblePolicy random("random", 5);
    const EvalResult res = paired_evaluate(env, corpus, {&dqn, &random});
    double j_dqn = 0.0, j_rand = 0.0;
    for (const auto& s : res.summaries) {
        if (s.policy == "dqn") j_dqn = s.j_hat;
        if (s.policy == "random") j_rand = s.j_hat;
    }
    require(j_dqn > j_rand + 0.05, "J margin over the random policy is " + fmt(j_dqn - j_rand));
}

void criterion_directional_ablation() {
    RunConfig base = bundled_config();
    base.eval_episodes = 500;
    const Workspace ws = Workspace::load(base);
    const auto rows = ablation_grid(ws, base, {"adv-budget-50", "adv-budget-150"}, 4);
    double j50 = 0.0, j150 = 0.0;
    for (const auto& r : rows) {
        if (r.variant == "adv-budget-50") j50 = r.dqn.j_hat;
        if (r.variant == "adv-budget-150") j150 = r.dqn.j_hat;
    }
    require(j50 > j150, "adversary-budget-50 J " + fmt(j50) +
                            " must exceed adversary-budget-150 J " + fmt(j150));
}

void criterion_regret_sanity() {
    // Replaying the oracle's portfolios gives regret 0 exactly.
    const RunConfig config = bundled_config();
    const Workspace ws = Workspace::load(config);
    const EvalCorpus corpus = make_eval_corpus(ws, config, 30, 9090);
    Environment env = make_environment(ws, config.sim);
    std::map<std::size_t, PortfolioAction> recorded;
    for (std::size_t e = 0; e < corpus.episodes.size(); ++e) {
        const Observation obs =
            env.reset(corpus.episodes[e].maturity, corpus.adversaries, corpus.episodes[e].seed);
        OraclePolicy tmp;
        recorded[e] = tmp.select(env, obs, e);
    }
    OraclePolicy oracle;
    ReplayPolicy replay("replay", std::move(recorded));
    const EvalResult res = paired_evaluate(env, corpus, {&oracle, &replay});
    for (const auto& s : res.summaries)
        require(s.regret == 0.0, "replayed oracle regret is " + fmt(s.regret));

    // Trained toy policy: regret against the oracle within 0.05.
    ToyWorld toy;
    const ToyTrained& trained = toy_trained(toy);
    Environment toy_env(toy.model(), toy.sim());
    EvalCorpus toy_corpus;
    toy_corpus.adversaries = {toy.adversary};
    Rng cr(2121);
    for (int i = 0; i < 200; ++i) toy_corpus.episodes.push_back({toy.maturity, cr.next_u64()});
    DqnGreedyPolicy dqn("dqn", trained.network);
    OraclePolicy toy_oracle;
    const EvalResult toy_res = paired_evaluate(toy_env, toy_corpus, {&dqn, &toy_oracle});
    for (const auto& s : toy_res.summaries)
        if (s.policy == "dqn")
            require(std::abs(s.regret) <= 0.05, "toy-world regret is " + fmt(s.regret));
}

void criterion_end_to_end() {
    const auto t0 = std::chrono::steady_clock::now();

    RunConfig config = bundled_config();
    config.org_count = 40;
    config.train.episodes = 1200;

    // population
    const Workspace ws = Workspace::load(config);
    const auto orgs = sample_population(config.prior, ws.difficulties(), config.org_count);
    require(orgs.size() == 40, "population generation failed");

    // the sequence model was fitted inside the workspace; train next
    Environment env = make_environment(ws, config.sim);
    EpisodeSource source;
    for (const auto& org : orgs) source.org_maturities.push_back(ws.maturity_for(org));
    source.adversaries = ws.episode_adversaries(config.sim.n_adversaries);
    const TrainResult trained = train(env, source, config.train);

    // reconstruct from the bundled example organization
    const OrgProfile example = parse_org_profile(
        load_json(std::string(MITPLAN_DATA_DIR) + "/example_org.json"), "example org");
    const std::vector<double> maturity = ws.maturity_for(example);
    const ReconstructionResult recon =
        reconstruct_all(ws, config, trained.network, maturity, config.seed);
    require(!recon.paths.empty(), "reconstruction produced no paths");
    require(!recon.candidates.empty(), "reconstruction produced no candidate mitigations");

    // plan
    const auto costs = portfolio_costs(ws.catalog(), ws.pct(), ws.scaler(), maturity);
    const MitigationPlan plan =
        build_plan(recon.candidates, ws.catalog(), costs, config.plan_budget,
                   config.plan_weights);
    require(!plan.selected.empty(), "plan is empty");
    for (const auto& item : plan.selected)
        require(!item.provenance.countered.empty(),
                "selected mitigation " + item.mitigation.value +
                    " carries no countered annotation");
    require(plan.total_cost <= plan.budget + 1e-9, "plan exceeds its budget");

    // report artifacts render
    const auto tmp = std::filesystem::temp_directory_path() / "mitplan_accept_report";
    std::filesystem::create_directories(tmp);
    write_training_curve(tmp / "training_curve.svg", trained.log, "training reward");
    require(std::filesystem::file_size(tmp / "training_curve.svg") > 500,
            "training curve svg looks empty");
    std::filesystem::remove_all(tmp);

    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    require(secs < 600.0, "end-to-end pipeline took " + fmt(secs) + "s (budget 600s)");
}

struct Criterion {
    int id;
    const char* name;
    std::function<void()> body;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "vomm exactness (5/205 worked example)", criterion_vomm_exactness},
        {2, "flow weighting (0.504 product, 0.25 fan-out, unit bundle sums)",
         criterion_flow_weighting},
        {3, "power mean vs direct evaluation with monotonicity", criterion_power_mean},
        {4, "ordered logit sums, dominance, population frequencies", criterion_ordered_logit},
        {5, "budget anchors exact, mu midpoint, portfolio feasibility", criterion_budget_model},
        {6, "reward hand cases (300, 26/3, 1000)", criterion_reward},
        {7, "oracle DP and plan knapsack vs enumeration", criterion_optimization_exactness},
        {8, "analytic gradients vs central differences", criterion_gradient_check},
        {9, "snapshot, beam isolation, and evaluation determinism", criterion_determinism},
        {10, "toy-world learning signal", criterion_learning_signal},
        {11, "directional adversary-budget ablation", criterion_directional_ablation},
        {12, "regret sanity (replay zero, toy regret bound)", criterion_regret_sanity},
        {13, "end-to-end pipeline with annotated plan", criterion_end_to_end},
    };

    int failures = 0;
    for (const Criterion& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        std::string error;
        try {
            c.body();
        } catch (const std::exception& e) {
            error = e.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (error.empty()) {
            std::printf("[PASS] %2d. %s (%.2fs)\n", c.id, c.name, secs);
        } else {
            ++failures;
            std::printf("[FAIL] %2d. %s (%.2fs): %s\n", c.id, c.name, secs, error.c_str());
        }
        std::fflush(stdout);
    }
    if (failures == 0) {
        std::printf("all %zu acceptance criteria passed\n", criteria.size());
    } else {
        std::printf("%d acceptance criteria FAILED\n", failures);
    }
    return failures == 0 ? 0 : 1;
}
