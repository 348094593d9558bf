#include "mitplan/beam.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "mitplan/errors.hpp"

namespace mitplan {

RootPortfolio build_root_portfolio(std::span<const double> q_values,
                                   std::span<const double> costs, double budget) {
    if (q_values.size() != costs.size())
        throw DomainError("build_root_portfolio: Q/cost length mismatch");
    RootPortfolio root;
    root.action = PortfolioAction::empty(q_values.size());

    std::vector<std::size_t> order(q_values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return q_values[a] > q_values[b]; });

    double residual = budget;
    for (std::size_t i : order) {
        if (costs[i] <= residual + kBudgetSlack) {
            root.action.selected[i] = 1;
            root.action.total_cost += costs[i];
            residual -= costs[i];
            root.order.push_back(i);
        }
    }
    return root;
}

std::vector<CandidateTechnique> candidate_techniques(const VommModel& vomm,
                                                     const std::vector<TechniqueToken>& history,
                                                     const AdversaryProfile& adversary,
                                                     std::size_t width, double boost) {
    const std::vector<double> raw = vomm.next_distribution(history);
    std::vector<double> boosted(raw.size());
    double total = 0.0;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        boosted[i] = raw[i];
        if (adversary.observed_techniques.count(vomm.vocab()[i])) boosted[i] *= boost;
        total += boosted[i];
    }
    for (double& v : boosted) v /= total;

    std::vector<std::size_t> order(raw.size());
    std::iota(order.begin(), order.end(), 0);
    // Vocab is sorted, so stable sort leaves ties in lexicographic order.
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return boosted[a] > boosted[b]; });

    std::vector<CandidateTechnique> out;
    const std::size_t n = std::min(width, order.size());
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        out.push_back({vomm.vocab()[order[i]], boosted[order[i]], raw[order[i]]});
    return out;
}

std::optional<MitigationId> select_best_mitigation(const RootPortfolio& portfolio,
                                                   const MitigationCatalog& catalog,
                                                   const EffectivenessTable& table,
                                                   const AdversaryProfile& adversary,
                                                   const TechniqueToken& technique) {
    std::optional<MitigationId> best;
    bool best_exact = false;
    double best_eff = -1.0;
    for (std::size_t i : portfolio.order) {
        const MitigationId& m = catalog.entries[i].id;
        if (!table.covers(technique, m)) continue;
        const bool exact = table.has_exact(adversary.adversary_id, technique, m);
        const double eff = table.effectiveness(adversary, technique, m);
        // Exact adversary-technique entries outrank class/global resolutions;
        // within a tier higher effectiveness wins, earlier Q order on ties.
        const bool better =
            !best || (exact && !best_exact) || (exact == best_exact && eff > best_eff);
        if (better) {
            best = m;
            best_exact = exact;
            best_eff = eff;
        }
    }
    return best;
}

double distribution_entropy(std::span<const double> p) {
    double h = 0.0;
    for (double v : p)
        if (v > 0.0) h -= v * std::log(v);
    return h;
}

double node_base_score(const BeamNode& node, const BeamConfig& config) {
    const std::size_t depth = node.depth();
    if (depth == 0) return 0.0;
    const double d = static_cast<double>(depth);

    const double r = node.cum_reward / (1100.0 * d);
    const double p = node.cum_loglik / d;
    const double mean_entropy = node.cum_entropy / d;
    const double u = (config.entropy_as_confidence ? -1.0 : 1.0) * config.entropy_scale *
                     mean_entropy;
    std::size_t blocked = 0;
    for (const TrailEntry& e : node.trail)
        if (e.result != StepResult::Advanced) ++blocked;
    const double i = static_cast<double>(blocked) / d;
    return r + p + u + i;
}

namespace {

std::set<TechniqueToken> trail_technique_set(const std::vector<TrailEntry>& trail) {
    std::set<TechniqueToken> s;
    for (const TrailEntry& e : trail) s.insert(e.technique);
    return s;
}

double jaccard(const std::set<TechniqueToken>& a, const std::set<TechniqueToken>& b) {
    if (a.empty() && b.empty()) return 1.0;
    std::size_t inter = 0;
    for (const TechniqueToken& t : a) inter += b.count(t);
    const std::size_t uni = a.size() + b.size() - inter;
    return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace

std::vector<BeamNode> select_top_k(std::vector<BeamNode> candidates, std::size_t k,
                                   const BeamConfig& config) {
    std::vector<double> base(candidates.size());
    std::vector<std::set<TechniqueToken>> tech_sets(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        base[i] = node_base_score(candidates[i], config);
        tech_sets[i] = trail_technique_set(candidates[i].trail);
    }

    std::vector<bool> taken(candidates.size(), false);
    std::vector<BeamNode> out;
    std::vector<std::set<TechniqueToken>> retained_sets;
    while (out.size() < k) {
        double best_score = 0.0;
        std::ptrdiff_t best = -1;
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            if (taken[i]) continue;
            double d = 0.0;
            for (const auto& s : retained_sets) d = std::max(d, jaccard(tech_sets[i], s));
            const double score = base[i] - config.diversity_lambda * d;
            if (best < 0 || score > best_score) {
                best = static_cast<std::ptrdiff_t>(i);
                best_score = score;
            }
        }
        if (best < 0) break;
        taken[static_cast<std::size_t>(best)] = true;
        BeamNode node = std::move(candidates[static_cast<std::size_t>(best)]);
        node.score = best_score;
        retained_sets.push_back(std::move(tech_sets[static_cast<std::size_t>(best)]));
        out.push_back(std::move(node));
    }
    return out;
}

std::vector<ReconstructedPath> reconstruct(Environment& env, const std::vector<double>& maturity,
                                           const AdversaryProfile& adversary,
                                           const RootPortfolio& portfolio,
                                           const BeamConfig& config, std::uint64_t seed) {
    if (config.width == 0 || config.depth == 0)
        throw ConfigError("reconstruct: width and depth must be >= 1");
    if (env.config().n_adversaries != 1)
        throw ConfigError("reconstruct: environment must be configured for one adversary");

    env.reset(maturity, {adversary}, seed);
    env.apply_action(portfolio.action);

    BeamNode root;
    root.snapshot = env.snapshot();
    root.terminal = !env.adversary_states()[0].alive;

    std::vector<BeamNode> beam{std::move(root)};
    for (std::size_t t = 0; t < config.depth; ++t) {
        bool any_expandable = false;
        std::vector<BeamNode> candidates;
        for (const BeamNode& node : beam) {
            if (node.terminal) {
                candidates.push_back(node);  // terminals carry forward
                continue;
            }
            any_expandable = true;
            env.restore(node.snapshot);
            const std::vector<TechniqueToken>& history = env.adversary_states()[0].history;
            const double step_entropy = distribution_entropy(env.model().vomm->next_distribution(history));
            const auto cands = candidate_techniques(*env.model().vomm, history, adversary,
                                                    config.candidate_width, config.observed_boost);
            for (const CandidateTechnique& cand : cands) {
                env.restore(node.snapshot);
                const auto mitigation =
                    select_best_mitigation(portfolio, *env.model().catalog,
                                           *env.model().effectiveness, adversary, cand.technique);
                const StepOutcome out =
                    env.step_forced(0, cand.technique, mitigation, config.success_threshold);

                BeamNode child;
                child.snapshot = env.snapshot();
                child.cum_reward = node.cum_reward + out.reward;
                child.cum_loglik = node.cum_loglik + std::log(cand.raw_probability);
                child.cum_entropy = node.cum_entropy + step_entropy;
                child.trail = node.trail;
                TrailEntry entry;
                entry.technique = cand.technique;
                entry.result = out.events[0].result;
                if (entry.result != StepResult::Stalled) entry.mitigation = mitigation;
                child.trail.push_back(std::move(entry));
                child.terminal = out.done;
                candidates.push_back(std::move(child));
            }
        }
        if (!any_expandable) break;
        beam = select_top_k(std::move(candidates), config.width, config);
    }

    std::vector<ReconstructedPath> paths;
    paths.reserve(beam.size());
    for (BeamNode& node : beam) {
        env.restore(node.snapshot);
        paths.push_back({adversary.adversary_id, std::move(node.trail), node.score,
                         node.cum_reward, node.cum_loglik, env.outcome()});
    }
    std::stable_sort(paths.begin(), paths.end(),
                     [](const ReconstructedPath& a, const ReconstructedPath& b) {
                         return a.score > b.score;
                     });
    return paths;
}

std::vector<CandidateMitigation> aggregate_candidates(
    std::span<const ReconstructedPath> paths, const std::vector<AdversaryProfile>& profiles,
    const EffectivenessTable& table, const MitigationCatalog& catalog,
    const std::vector<double>& maturity) {
    if (paths.empty()) throw DomainError("aggregate_candidates: no paths");

    double min_score = paths[0].score, max_score = paths[0].score;
    for (const ReconstructedPath& p : paths) {
        min_score = std::min(min_score, p.score);
        max_score = std::max(max_score, p.score);
    }
    const double span = max_score - min_score;
    const auto norm_score = [&](double s) { return span > 0.0 ? (s - min_score) / span : 1.0; };

    const auto profile_of = [&](const std::string& id) -> const AdversaryProfile& {
        for (const AdversaryProfile& p : profiles)
            if (p.adversary_id == id) return p;
        throw DomainError("aggregate_candidates: unknown adversary " + id);
    };

    std::map<MitigationId, CandidateMitigation> agg;
    for (const ReconstructedPath& path : paths) {
        const AdversaryProfile& adv = profile_of(path.adversary_id);
        std::set<MitigationId> in_this_path;
        for (const TrailEntry& e : path.trail) {
            if (!e.mitigation) continue;
            CandidateMitigation& c = agg[*e.mitigation];
            c.mitigation = *e.mitigation;
            ++c.occurrences;
            in_this_path.insert(*e.mitigation);
            // Every applied use counts as countering the technique; whether
            // the counter cleared the reconstruction threshold shows up in
            // max_remediation and the trail outcome instead.
            c.countered.emplace_back(path.adversary_id, e.technique);
            if (table.covers(e.technique, *e.mitigation)) {
                const auto idx = catalog.index_of(*e.mitigation);
                if (idx) {
                    const double eff = table.effectiveness(adv, e.technique, *e.mitigation);
                    c.max_remediation = std::max(c.max_remediation,
                                                 maturity[*idx] * (eff - 1.0) / 4.0);
                }
            }
        }
        for (const MitigationId& m : in_this_path)
            agg[m].score_contribution += norm_score(path.score);
    }

    std::vector<CandidateMitigation> out;
    out.reserve(agg.size());
    for (auto& [id, c] : agg) out.push_back(std::move(c));
    return out;
}

Json paths_to_json(std::span<const ReconstructedPath> paths) {
    Json arr = Json::array();
    for (const ReconstructedPath& p : paths) {
        Json trail = Json::array();
        for (const TrailEntry& e : p.trail)
            trail.push_back(Json{{"technique", e.technique.render()},
                                 {"mitigation", e.mitigation ? Json(e.mitigation->value) : Json()},
                                 {"result", to_string(e.result)}});
        arr.push_back(Json{{"adversary", p.adversary_id},
                           {"score", p.score},
                           {"cum_reward", p.cum_reward},
                           {"cum_loglik", p.cum_loglik},
                           {"outcome", to_string(p.outcome)},
                           {"trail", std::move(trail)}});
    }
    return Json{{"format", "mitplan-paths"}, {"version", 1}, {"paths", std::move(arr)}};
}

std::vector<ReconstructedPath> paths_from_json(const Json& doc) {
    const std::string where = "paths document";
    if (require(doc, "format", where).get<std::string>() != "mitplan-paths")
        throw ParseError(where + ": not a paths document");
    std::vector<ReconstructedPath> out;
    for (const Json& pj : require(doc, "paths", where)) {
        ReconstructedPath p;
        p.adversary_id = require(pj, "adversary", where).get<std::string>();
        p.score = require(pj, "score", where).get<double>();
        p.cum_reward = require(pj, "cum_reward", where).get<double>();
        p.cum_loglik = require(pj, "cum_loglik", where).get<double>();
        const std::string oc = require(pj, "outcome", where).get<std::string>();
        p.outcome = oc == "win" ? Outcome::Win
                                : (oc == "loss" ? Outcome::Loss
                                                : (oc == "truncated" ? Outcome::Truncated
                                                                     : Outcome::Running));
        for (const Json& ej : require(pj, "trail", where)) {
            TrailEntry e;
            e.technique = TechniqueToken::parse(require(ej, "technique", where).get<std::string>());
            const Json& mj = require(ej, "mitigation", where);
            if (!mj.is_null()) e.mitigation = MitigationId::parse(mj.get<std::string>());
            const std::string rs = require(ej, "result", where).get<std::string>();
            e.result = rs == "advanced" ? StepResult::Advanced
                                        : (rs == "stalled" ? StepResult::Stalled
                                                           : StepResult::Blocked);
            p.trail.push_back(std::move(e));
        }
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace mitplan
