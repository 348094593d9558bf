#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "mitplan/errors.hpp"
#include "mitplan/knapsack.hpp"
#include "mitplan/oracle.hpp"
#include "mitplan/plan.hpp"
#include "mitplan/rng.hpp"
#include "mitplan/workspace.hpp"

using namespace mitplan;

namespace {

// Exhaustive 0-1 enumeration with the same tie-break contract: value
// descending, then fewer items, then lexicographically smaller id set.
// Values are summed in id order to mirror the solver's accumulation.
struct BruteSolution {
    std::vector<std::size_t> selected;
    double value = 0.0;
};

BruteSolution brute_force(const std::vector<KnapsackItem>& items, double budget,
                          double resolution = 0.1) {
    std::vector<std::size_t> order(items.size());
    for (std::size_t i = 0; i < items.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return items[a].id < items[b].id; });

    const auto scale = [&](double cost) {
        return static_cast<long long>(std::ceil(cost / resolution - 1e-9));
    };
    const long long capacity = static_cast<long long>(std::floor(budget / resolution + 1e-9));

    BruteSolution best;
    std::vector<std::string> best_ids;
    bool have = false;
    for (std::size_t mask = 0; mask < (std::size_t{1} << items.size()); ++mask) {
        long long w = 0;
        double v = 0.0;
        std::vector<std::string> ids;
        std::vector<std::size_t> sel;
        for (std::size_t pos = 0; pos < order.size(); ++pos) {
            const std::size_t i = order[pos];
            if (!(mask >> i & 1)) continue;
            w += scale(items[i].cost);
            v += items[i].value;  // id-order accumulation
            ids.push_back(items[i].id);
            sel.push_back(i);
        }
        if (w > capacity) continue;
        const bool better = !have || v > best.value ||
                            (v == best.value && (ids.size() < best_ids.size() ||
                                                 (ids.size() == best_ids.size() && ids < best_ids)));
        if (better) {
            have = true;
            best.value = v;
            best_ids = ids;
            std::sort(sel.begin(), sel.end());
            best.selected = sel;
        }
    }
    return best;
}

std::vector<KnapsackItem> random_instance(Rng& rng, std::size_t max_items) {
    const std::size_t n = 1 + rng.below(max_items);
    std::vector<KnapsackItem> items;
    items.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        char id[16];
        std::snprintf(id, sizeof(id), "M%04u", static_cast<unsigned>(i));
        // Costs on the 0.1 grid so rounding is the identity for both solvers.
        const double cost = 0.1 * static_cast<double>(1 + rng.below(600));
        const double value = rng.uniform01() * 10.0;
        items.push_back({id, value, cost});
    }
    return items;
}

}  // namespace

TEST_CASE("textbook knapsack instance") {
    const std::vector<KnapsackItem> items{
        {"M0001", 60.0, 10.0}, {"M0002", 100.0, 20.0}, {"M0003", 120.0, 30.0}};
    const auto sol = knapsack01(items, 50.0);
    CHECK(sol.selected == std::vector<std::size_t>{1, 2});
    CHECK(sol.total_value == doctest::Approx(220.0).epsilon(1e-12));
}

TEST_CASE("benefits (10,9,9) with costs (100,50,50) pick the two nines") {
    const std::vector<KnapsackItem> items{
        {"M0001", 10.0, 100.0}, {"M0002", 9.0, 50.0}, {"M0003", 9.0, 50.0}};
    const auto sol = knapsack01(items, 100.0);
    CHECK(sol.selected == std::vector<std::size_t>{1, 2});
    CHECK(sol.total_value == doctest::Approx(18.0).epsilon(1e-12));
}

TEST_CASE("budget covering everything selects everything") {
    const std::vector<KnapsackItem> items{
        {"M0001", 1.0, 10.0}, {"M0002", 2.0, 20.0}, {"M0003", 3.0, 30.0}};
    const auto sol = knapsack01(items, 1000.0);
    CHECK(sol.selected.size() == 3);
}

TEST_CASE("ties break toward fewer items then lexicographic ids") {
    // Equal value reachable by {A} or {B,C}; A also loses on id to nothing.
    const std::vector<KnapsackItem> items{
        {"M0002", 5.0, 30.0}, {"M0001", 2.5, 10.0}, {"M0003", 2.5, 10.0}};
    const auto sol = knapsack01(items, 30.0);
    CHECK(sol.selected == std::vector<std::size_t>{0});  // one item beats two

    const std::vector<KnapsackItem> items2{
        {"M0002", 5.0, 30.0}, {"M0001", 5.0, 30.0}};
    const auto sol2 = knapsack01(items2, 30.0);
    CHECK(sol2.selected == std::vector<std::size_t>{1});  // M0001 wins the id tie
}

TEST_CASE("knapsack equals brute force on 200 random instances up to 18 items") {
    Rng rng(404);
    for (int trial = 0; trial < 200; ++trial) {
        const auto items = random_instance(rng, 18);
        const double budget = 0.1 * static_cast<double>(1 + rng.below(1200));
        const auto sol = knapsack01(items, budget);
        const auto ref = brute_force(items, budget);
        CHECK(sol.selected == ref.selected);
        CHECK(sol.total_value == doctest::Approx(ref.value).epsilon(1e-12));
        double cost = 0.0;
        for (std::size_t i : sol.selected) cost += items[i].cost;
        CHECK(cost <= budget + 1e-9);
    }
}

TEST_CASE("DP value dominates greedy-by-density on the same discretization") {
    Rng rng(405);
    for (int trial = 0; trial < 200; ++trial) {
        const auto items = random_instance(rng, 20);
        const double budget = 0.1 * static_cast<double>(1 + rng.below(800));
        const auto sol = knapsack01(items, budget);

        std::vector<std::size_t> order(items.size());
        for (std::size_t i = 0; i < items.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return items[a].value / items[a].cost > items[b].value / items[b].cost;
        });
        double residual = budget, greedy = 0.0;
        for (std::size_t i : order) {
            if (items[i].cost <= residual + 1e-9) {
                residual -= items[i].cost;
                greedy += items[i].value;
            }
        }
        CHECK(sol.total_value >= greedy - 1e-9);
    }
}

TEST_CASE("scaling all values leaves the selection unchanged") {
    Rng rng(406);
    const auto items = random_instance(rng, 15);
    const double budget = 30.0;
    const auto base = knapsack01(items, budget);
    auto scaled_items = items;
    for (auto& it : scaled_items) it.value *= 37.5;
    const auto scaled = knapsack01(scaled_items, budget);
    CHECK(base.selected == scaled.selected);
}

TEST_CASE("value is monotone non-decreasing in the budget") {
    Rng rng(407);
    const auto items = random_instance(rng, 15);
    double prev = -1.0;
    for (double budget = 5.0; budget <= 100.0; budget += 5.0) {
        const auto sol = knapsack01(items, budget);
        CHECK(sol.total_value >= prev - 1e-12);
        prev = sol.total_value;
    }
}

// ---------------------------------------------------------------- oracle ---

namespace {

RunConfig data_config() {
    RunConfig c;
    c.data_dir = MITPLAN_DATA_DIR;
    return c;
}

}  // namespace

TEST_CASE("importance weights normalize over the observed set") {
    const Workspace ws = Workspace::load(data_config());
    for (const auto& adv : ws.adversaries()) {
        const auto w = importance_weights(ws.vomm(), adv);
        CHECK(w.size() == adv.observed_techniques.size());
        double sum = 0.0;
        for (const auto& [t, v] : w) {
            CHECK(v >= 0.0);
            sum += v;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("single observed technique takes weight 1") {
    const Workspace ws = Workspace::load(data_config());
    AdversaryProfile p;
    p.adversary_id = "solo";
    p.adv_type = "criminal";
    p.resource_level = "low";
    p.sophistication = Sophistication::Low;
    p.observed_techniques = {TechniqueToken::parse("TA0001:T1190")};
    const auto w = importance_weights(ws.vomm(), p);
    CHECK(w.at(TechniqueToken::parse("TA0001:T1190")) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("equal priors and equal base mass split 0.5/0.5") {
    const Workspace ws = Workspace::load(data_config());
    AdversaryProfile p;
    p.adversary_id = "duo";
    p.adv_type = "criminal";
    p.resource_level = "low";
    p.sophistication = Sophistication::Low;
    // Empty context gives the uniform base, so any two techniques carry equal
    // VOMM mass.
    p.observed_techniques = {TechniqueToken::parse("TA0001:T1190"),
                             TechniqueToken::parse("TA0007:T1083")};
    const auto w = importance_weights(ws.vomm(), p);
    CHECK(w.at(TechniqueToken::parse("TA0001:T1190")) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(w.at(TechniqueToken::parse("TA0007:T1083")) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("duplicating an adversary doubles every benefit") {
    const Workspace ws = Workspace::load(data_config());
    const auto adversaries = ws.episode_adversaries(3);
    const std::vector<double> maturity(ws.catalog().size(), 0.8);
    const auto costs = portfolio_costs(ws.catalog(), ws.pct(), ws.scaler(), maturity);

    const auto single = proxy_benefits(adversaries, ws.vomm(), ws.effectiveness(), ws.catalog(),
                                       costs);
    auto doubled_set = adversaries;
    doubled_set.insert(doubled_set.end(), adversaries.begin(), adversaries.end());
    const auto doubled = proxy_benefits(doubled_set, ws.vomm(), ws.effectiveness(), ws.catalog(),
                                        costs);
    for (std::size_t i = 0; i < single.size(); ++i)
        CHECK(doubled[i].benefit == doctest::Approx(2.0 * single[i].benefit).epsilon(1e-9));
}

TEST_CASE("oracle_select is deterministic, feasible, and beats greedy") {
    const Workspace ws = Workspace::load(data_config());
    const auto adversaries = ws.episode_adversaries(5);
    const std::vector<double> maturity(ws.catalog().size(), 0.9);

    const auto a = oracle_select(adversaries, maturity, ws.vomm(), ws.effectiveness(),
                                 ws.catalog(), ws.pct(), ws.scaler());
    const auto b = oracle_select(adversaries, maturity, ws.vomm(), ws.effectiveness(),
                                 ws.catalog(), ws.pct(), ws.scaler());
    CHECK(a.selected == b.selected);
    CHECK(a.total_cost <= 100.0 + 1e-9);
    CHECK(a.count() > 0);
}

TEST_CASE("oracle with an empty candidate set returns the empty portfolio") {
    const Workspace ws = Workspace::load(data_config());
    AdversaryProfile p;
    p.adversary_id = "ghost";
    p.adv_type = "criminal";
    p.resource_level = "low";
    p.sophistication = Sophistication::Low;
    p.observed_techniques = {TechniqueToken::parse("TA0007:T2999")};  // covered by nothing
    const std::vector<double> maturity(ws.catalog().size(), 0.5);
    const auto action = oracle_select({p}, maturity, ws.vomm(), ws.effectiveness(), ws.catalog(),
                                      ws.pct(), ws.scaler());
    CHECK(action.count() == 0);
}

TEST_CASE("oracle DP matches subset enumeration on 200 random reduced instances") {
    // Randomized sub-selections of the bundled world keep the candidate pool
    // at or below 15 mitigations so enumeration is exact.
    const Workspace ws = Workspace::load(data_config());
    Rng rng(911);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n_adv = 1 + rng.below(4);
        std::vector<AdversaryProfile> adversaries;
        for (std::size_t i = 0; i < n_adv; ++i)
            adversaries.push_back(ws.adversaries()[rng.below(ws.adversaries().size())]);
        std::vector<double> maturity(ws.catalog().size());
        for (double& m : maturity) m = rng.uniform01();

        const auto costs = portfolio_costs(ws.catalog(), ws.pct(), ws.scaler(), maturity);
        const auto scores = proxy_benefits(adversaries, ws.vomm(), ws.effectiveness(),
                                           ws.catalog(), costs);
        const double budget = 40.0 + rng.uniform01() * 80.0;

        // Mirror the oracle's candidate filter.
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

        std::vector<KnapsackItem> items;
        for (std::size_t i : candidates)
            items.push_back({ws.catalog().entries[i].id.value, scores[i].benefit, costs[i]});
        const auto ref = brute_force(items, budget);

        const auto action = oracle_select(adversaries, maturity, ws.vomm(), ws.effectiveness(),
                                          ws.catalog(), ws.pct(), ws.scaler(), budget);
        std::vector<std::size_t> got;
        for (std::size_t k = 0; k < action.selected.size(); ++k)
            if (action.selected[k]) got.push_back(k);

        std::vector<std::size_t> want;
        for (std::size_t k : ref.selected) want.push_back(candidates[k]);
        std::sort(want.begin(), want.end());
        CHECK(got == want);
    }
}

// ------------------------------------------------------------------ plan ---

TEST_CASE("item value hand cases") {
    CandidateMitigation c;
    c.mitigation = MitigationId{"M1017"};
    c.occurrences = 0;
    c.max_remediation = 0.0;
    c.score_contribution = 0.0;
    CHECK(item_value(c, 0.0) == doctest::Approx(0.0).epsilon(1e-12));

    c.occurrences = 1;
    c.max_remediation = 1.0;
    CHECK(item_value(c, 1.0) ==
          doctest::Approx(0.5 + 0.3 + 0.2 * std::log(2.0)).epsilon(1e-12));

    // concavity bound: doubling occurrences adds at most w3*log 2
    CandidateMitigation d = c;
    d.occurrences = 2;
    CHECK(item_value(d, 1.0) - item_value(c, 1.0) <= 0.2 * std::log(2.0) + 1e-12);
}

TEST_CASE("plan knapsack selects within budget and keeps provenance") {
    const Workspace ws = Workspace::load(data_config());
    std::vector<CandidateMitigation> candidates;
    CandidateMitigation a;
    a.mitigation = MitigationId{"M1017"};
    a.occurrences = 3;
    a.max_remediation = 0.9;
    a.score_contribution = 2.0;
    a.countered = {{"adv-001", TechniqueToken::parse("TA0001:T1566.001")}};
    candidates.push_back(a);
    CandidateMitigation b;
    b.mitigation = MitigationId{"M1030"};
    b.occurrences = 1;
    b.max_remediation = 0.7;
    b.score_contribution = 1.0;
    b.countered = {{"adv-002", TechniqueToken::parse("TA0008:T1021.002")}};
    candidates.push_back(b);

    const std::vector<double> maturity(ws.catalog().size(), 1.0);
    const auto costs = portfolio_costs(ws.catalog(), ws.pct(), ws.scaler(), maturity);
    const auto plan = build_plan(candidates, ws.catalog(), costs, 100.0);
    CHECK(plan.total_cost <= 100.0 + 1e-9);
    CHECK(plan.selected.size() >= 1);
    for (const auto& item : plan.selected) CHECK_FALSE(item.provenance.countered.empty());
}

TEST_CASE("B >= total cost selects every candidate; B = 0 yields the advisory") {
    const Workspace ws = Workspace::load(data_config());
    std::vector<CandidateMitigation> candidates;
    for (const char* id : {"M1017", "M1027", "M1047"}) {
        CandidateMitigation c;
        c.mitigation = MitigationId{id};
        c.occurrences = 1;
        c.max_remediation = 0.5;
        c.score_contribution = 1.0;
        candidates.push_back(c);
    }
    const std::vector<double> maturity(ws.catalog().size(), 1.0);
    const auto costs = portfolio_costs(ws.catalog(), ws.pct(), ws.scaler(), maturity);

    const auto all = build_plan(candidates, ws.catalog(), costs, 10000.0);
    CHECK(all.selected.size() == candidates.size());

    const auto none = build_plan(candidates, ws.catalog(), costs, 0.0);
    CHECK(none.selected.empty());
    CHECK_FALSE(none.advisory.empty());
}

TEST_CASE("plan value scaling invariance via weights") {
    // Scaling the three weights by a constant scales values but not the
    // selected set.
    const Workspace ws = Workspace::load(data_config());
    std::vector<CandidateMitigation> candidates;
    Rng rng(3030);
    for (const char* id : {"M1017", "M1027", "M1047", "M1030", "M1032", "M1053"}) {
        CandidateMitigation c;
        c.mitigation = MitigationId{id};
        c.occurrences = 1 + rng.below(5);
        c.max_remediation = rng.uniform01();
        c.score_contribution = rng.uniform01() * 3.0;
        candidates.push_back(c);
    }
    const std::vector<double> maturity(ws.catalog().size(), 0.8);
    const auto costs = portfolio_costs(ws.catalog(), ws.pct(), ws.scaler(), maturity);

    const auto base = build_plan(candidates, ws.catalog(), costs, 80.0, PlanWeights{});
    const auto scaled = build_plan(candidates, ws.catalog(), costs, 80.0,
                                   PlanWeights{0.5 * 3, 0.3 * 3, 0.2 * 3});
    REQUIRE(base.selected.size() == scaled.selected.size());
    for (std::size_t i = 0; i < base.selected.size(); ++i)
        CHECK(base.selected[i].mitigation == scaled.selected[i].mitigation);
}
