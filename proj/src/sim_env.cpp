#include "mitplan/sim_env.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "mitplan/errors.hpp"
#include "mitplan/jsonio.hpp"

namespace mitplan {

TechniqueIndex TechniqueIndex::build(const VommModel& vomm,
                                     const std::vector<AdversaryProfile>& profiles,
                                     const EffectivenessTable& effectiveness) {
    std::set<TechniqueToken> all(vomm.vocab().begin(), vomm.vocab().end());
    for (const AdversaryProfile& p : profiles)
        all.insert(p.observed_techniques.begin(), p.observed_techniques.end());
    for (const TechniqueToken& t : effectiveness.covered_techniques()) all.insert(t);
    TechniqueIndex idx;
    idx.tokens.assign(all.begin(), all.end());
    return idx;
}

std::optional<std::size_t> TechniqueIndex::index_of(const TechniqueToken& t) const {
    auto it = std::lower_bound(tokens.begin(), tokens.end(), t);
    if (it == tokens.end() || *it != t) return std::nullopt;
    return static_cast<std::size_t>(it - tokens.begin());
}

std::vector<double> Observation::flatten() const {
    std::vector<double> out;
    const std::size_t t = technique_matrix.empty() ? 0 : technique_matrix[0].size();
    out.reserve(maturity.size() + technique_matrix.size() * t);
    out.insert(out.end(), maturity.begin(), maturity.end());
    for (const auto& row : technique_matrix)
        for (std::uint8_t v : row) out.push_back(static_cast<double>(v));
    return out;
}

std::size_t PortfolioAction::count() const {
    std::size_t n = 0;
    for (std::uint8_t v : selected) n += (v != 0);
    return n;
}

std::vector<std::size_t> PortfolioAction::indices() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < selected.size(); ++i)
        if (selected[i]) out.push_back(i);
    return out;
}

PortfolioAction PortfolioAction::empty(std::size_t m) {
    PortfolioAction a;
    a.selected.assign(m, 0);
    a.total_cost = 0.0;
    return a;
}

std::string to_string(Outcome o) {
    switch (o) {
        case Outcome::Running: return "running";
        case Outcome::Win: return "win";
        case Outcome::Loss: return "loss";
        case Outcome::Truncated: return "truncated";
    }
    return "?";
}

std::string to_string(StepResult r) {
    switch (r) {
        case StepResult::Advanced: return "advanced";
        case StepResult::Blocked: return "blocked";
        case StepResult::Stalled: return "stalled";
    }
    return "?";
}

double eff_cov(const TechniqueToken& technique, const PortfolioAction& action,
               const std::vector<double>& maturity, const EffectivenessTable& table,
               const MitigationCatalog& catalog, const AdversaryProfile& adversary) {
    double best = 0.0;
    for (std::size_t i = 0; i < action.selected.size(); ++i) {
        if (!action.selected[i]) continue;
        const MitigationId& m = catalog.entries[i].id;
        if (!table.covers(technique, m)) continue;
        const double eff = table.effectiveness(adversary, technique, m);
        best = std::max(best, maturity[i] * (eff - 1.0) / 4.0);
    }
    return best;
}

double cover_eff(const PortfolioAction& action, const EffectivenessTable& table,
                 const MitigationCatalog& catalog,
                 const std::map<TechniqueToken, std::set<std::size_t>>& attempted,
                 const std::vector<AdversaryProfile>& profiles) {
    const auto selected = action.indices();
    if (selected.empty()) return 0.0;

    double score = 0.0;
    for (const TechniqueToken& tech : table.covered_techniques()) {
        bool covered = false;
        for (std::size_t i : selected)
            if (table.covers(tech, catalog.entries[i].id)) { covered = true; break; }
        if (!covered) continue;

        auto att = attempted.find(tech);
        if (att == attempted.end() || att->second.empty()) {
            score += 1.0;  // covered, never attempted: baseline credit
            continue;
        }
        double max_eff = 0.0;
        for (std::size_t i : selected) {
            const MitigationId& m = catalog.entries[i].id;
            if (!table.covers(tech, m)) continue;
            for (std::size_t j : att->second)
                max_eff = std::max(max_eff, table.effectiveness(profiles[j], tech, m));
        }
        score += (max_eff + 1.0) * 5.0;
    }
    return score;
}

double episode_reward(int blocked_count, double cover_eff_score, std::size_t portfolio_size,
                      bool win) {
    return 100.0 * static_cast<double>(blocked_count) +
           cover_eff_score / (static_cast<double>(portfolio_size) + 1.0) +
           (win ? 1000.0 : 0.0);
}

Environment::Environment(EnvModel model, SimConfig config)
    : model_(std::move(model)), config_(config) {
    if (!model_.vomm || !model_.effectiveness || !model_.adv_costs || !model_.catalog ||
        !model_.pct || !model_.scaler)
        throw ConfigError("Environment: incomplete model wiring");
    if (!config_.adversary_budget_override && !model_.spread)
        throw ConfigError("Environment: spread table required without a budget override");
    if (config_.n_adversaries == 0) throw ConfigError("Environment: n_adversaries must be >= 1");
}

Observation Environment::reset(const std::vector<double>& maturity,
                               std::vector<AdversaryProfile> adversaries, std::uint64_t seed) {
    if (adversaries.size() != config_.n_adversaries)
        throw ConfigError("reset: expected " + std::to_string(config_.n_adversaries) +
                          " adversaries, got " + std::to_string(adversaries.size()));
    if (maturity.size() != model_.catalog->size())
        throw ConfigError("reset: maturity vector length does not match the mitigation catalog");
    for (double v : maturity)
        if (v < 0.0 || v > 1.0) throw ValidationError("reset: maturity outside [0,1]");

    profiles_ = std::move(adversaries);
    maturity_ = maturity;
    costs_ = portfolio_costs(*model_.catalog, *model_.pct, *model_.scaler, maturity_);
    portfolio_ = PortfolioAction::empty(model_.catalog->size());
    action_applied_ = false;
    step_index_ = 0;
    outcome_ = Outcome::Running;
    attempted_.clear();
    warnings_.clear();
    rng_ = Rng(seed);
    episode_active_ = true;

    adversaries_.clear();
    adversaries_.reserve(profiles_.size());
    for (const AdversaryProfile& p : profiles_) {
        AdversaryState s;
        s.residual_budget = config_.adversary_budget_override
                                ? *config_.adversary_budget_override
                                : adv_budget(p, *model_.spread);
        s.alive = s.residual_budget > 0.0;
        if (!s.alive)
            warnings_.push_back("adversary " + p.adversary_id + " starts with zero budget");
        adversaries_.push_back(std::move(s));
    }
    return observation();
}

Observation Environment::observation() const {
    if (!episode_active_) throw StateError("observation: no active episode");
    Observation obs;
    obs.maturity = maturity_;
    obs.technique_matrix.assign(profiles_.size(),
                                std::vector<std::uint8_t>(model_.technique_index.size(), 0));
    for (std::size_t j = 0; j < profiles_.size(); ++j)
        for (const TechniqueToken& t : profiles_[j].observed_techniques)
            if (auto idx = model_.technique_index.index_of(t)) obs.technique_matrix[j][*idx] = 1;
    return obs;
}

void Environment::apply_action(const PortfolioAction& action) {
    if (!episode_active_) throw StateError("apply_action: no active episode");
    if (outcome_ != Outcome::Running) throw StateError("apply_action: episode already terminal");
    if (action_applied_ || step_index_ != 0)
        throw StateError("apply_action: action already applied this episode");
    if (action.selected.size() != model_.catalog->size())
        throw ValidationError("apply_action: selection length does not match catalog");

    double total = 0.0;
    for (std::size_t i = 0; i < action.selected.size(); ++i)
        if (action.selected[i]) total += costs_[i];
    if (total > config_.defender_budget + kBudgetSlack)
        throw FeasibilityError("portfolio cost " + std::to_string(total) + " exceeds budget " +
                               std::to_string(config_.defender_budget) + " by " +
                               std::to_string(total - config_.defender_budget));

    portfolio_ = action;
    portfolio_.total_cost = total;
    action_applied_ = true;
}

void Environment::require_running(const char* op) const {
    if (!episode_active_) throw StateError(std::string(op) + ": no active episode");
    if (!action_applied_) throw StateError(std::string(op) + ": portfolio not applied yet");
    if (outcome_ != Outcome::Running) throw StateError(std::string(op) + ": episode is terminal");
}

double Environment::technique_success_probability(std::size_t adversary_index,
                                                  const TechniqueToken& technique) const {
    return 1.0 - eff_cov(technique, portfolio_, maturity_, *model_.effectiveness, *model_.catalog,
                         profiles_[adversary_index]);
}

void Environment::finish_step(StepOutcome& out, bool loss_this_step) {
    if (loss_this_step) {
        outcome_ = Outcome::Loss;
    } else {
        bool any_alive = false;
        for (const AdversaryState& a : adversaries_)
            any_alive = any_alive || a.alive;
        if (!any_alive)
            outcome_ = Outcome::Win;
        else if (step_index_ >= config_.max_steps)
            outcome_ = Outcome::Truncated;
    }
    const bool win = outcome_ == Outcome::Win;
    const double cover = config_.simple_reward
                             ? 0.0
                             : cover_eff(portfolio_, *model_.effectiveness, *model_.catalog,
                                         attempted_, profiles_);
    out.reward = config_.simple_reward
                     ? 100.0 * out.blocked_count + (win ? 1000.0 : 0.0)
                     : episode_reward(out.blocked_count, cover, portfolio_.count(), win);
    out.done = outcome_ != Outcome::Running;
}

StepOutcome Environment::step() {
    require_running("step");
    ++step_index_;

    StepOutcome out;
    bool loss = false;
    for (std::size_t j = 0; j < adversaries_.size() && !loss; ++j) {
        AdversaryState& adv = adversaries_[j];
        if (!adv.alive) continue;

        const TechniqueToken proposal = model_.vomm->sample_next(adv.history, rng_);
        StepEvent event{j, profiles_[j].adversary_id, proposal, StepResult::Blocked};

        const double cost = adv_technique_cost(profiles_[j], proposal, *model_.adv_costs,
                                               &warnings_);
        if (adv.residual_budget < cost) {
            // Cannot afford its own next move: the adversary is spent.
            adv.alive = false;
            event.result = StepResult::Stalled;
            ++out.blocked_count;
        } else {
            adv.residual_budget -= cost;  // attempts consume resources either way
            attempted_[proposal].insert(j);
            const double p_succ = technique_success_probability(j, proposal);
            if (rng_.uniform01() < p_succ) {
                adv.history.push_back(proposal);
                event.result = StepResult::Advanced;
                if (proposal.is_impact()) loss = true;
            } else {
                event.result = StepResult::Blocked;
                ++out.blocked_count;
            }
        }
        out.events.push_back(std::move(event));
    }
    finish_step(out, loss);
    return out;
}

StepOutcome Environment::step_forced(std::size_t adversary_index, const TechniqueToken& technique,
                                     const std::optional<MitigationId>& mitigation,
                                     double threshold) {
    require_running("step_forced");
    if (adversary_index >= adversaries_.size())
        throw DomainError("step_forced: adversary index out of range");
    AdversaryState& adv = adversaries_[adversary_index];
    if (!adv.alive) throw StateError("step_forced: adversary already exhausted");

    ++step_index_;
    StepOutcome out;
    bool loss = false;
    StepEvent event{adversary_index, profiles_[adversary_index].adversary_id, technique,
                    StepResult::Blocked};

    const double cost =
        adv_technique_cost(profiles_[adversary_index], technique, *model_.adv_costs, &warnings_);
    if (adv.residual_budget < cost) {
        adv.alive = false;
        event.result = StepResult::Stalled;
        ++out.blocked_count;
    } else {
        adv.residual_budget -= cost;
        attempted_[technique].insert(adversary_index);
        bool blocked = false;
        if (mitigation) {
            const auto idx = model_.catalog->index_of(*mitigation);
            if (!idx) throw DomainError("step_forced: mitigation not in catalog");
            if (model_.effectiveness->covers(technique, *mitigation)) {
                const double eff =
                    model_.effectiveness->effectiveness(profiles_[adversary_index], technique,
                                                        *mitigation);
                blocked = maturity_[*idx] * (eff - 1.0) / 4.0 >= threshold;
            }
        }
        if (blocked) {
            event.result = StepResult::Blocked;
            ++out.blocked_count;
        } else {
            adv.history.push_back(technique);
            event.result = StepResult::Advanced;
            if (technique.is_impact()) loss = true;
        }
    }
    out.events.push_back(std::move(event));
    finish_step(out, loss);
    return out;
}

namespace {

constexpr int kSnapshotVersion = 1;

Json double_bits(double v) {
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(v));
    std::memcpy(&bits, &v, sizeof(bits));
    return Json(bits);
}

double bits_double(const Json& j) {
    const std::uint64_t bits = j.get<std::uint64_t>();
    double v;
    std::memcpy(&v, &bits, sizeof(v));
    return v;
}

}  // namespace

std::vector<std::uint8_t> Environment::snapshot() const {
    if (!episode_active_) throw StateError("snapshot: no active episode");
    Json doc;
    doc["format"] = "mitplan-episode";
    doc["version"] = kSnapshotVersion;
    doc["config"] = {{"n_adversaries", config_.n_adversaries},
                     {"defender_budget", double_bits(config_.defender_budget)},
                     {"adversary_budget_override",
                      config_.adversary_budget_override
                          ? double_bits(*config_.adversary_budget_override)
                          : Json(nullptr)},
                     {"max_steps", config_.max_steps},
                     {"simple_reward", config_.simple_reward}};
    Json ids = Json::array();
    for (const AdversaryProfile& p : profiles_) ids.push_back(p.adversary_id);
    doc["adversary_ids"] = std::move(ids);

    Json advs = Json::array();
    for (const AdversaryState& a : adversaries_) {
        Json history = Json::array();
        for (const TechniqueToken& t : a.history) history.push_back(t.render());
        advs.push_back(Json{{"history", std::move(history)},
                            {"residual", double_bits(a.residual_budget)},
                            {"alive", a.alive}});
    }
    doc["adversaries"] = std::move(advs);

    Json maturity = Json::array();
    for (double v : maturity_) maturity.push_back(double_bits(v));
    doc["maturity"] = std::move(maturity);

    doc["portfolio"] = {{"selected", portfolio_.selected},
                        {"total_cost", double_bits(portfolio_.total_cost)}};
    doc["action_applied"] = action_applied_;
    doc["step_index"] = step_index_;
    doc["outcome"] = to_string(outcome_);

    Json attempted = Json::array();
    for (const auto& [tech, who] : attempted_) {
        Json indices = Json::array();
        for (std::size_t j : who) indices.push_back(j);
        attempted.push_back(Json{{"technique", tech.render()}, {"adversaries", std::move(indices)}});
    }
    doc["attempted"] = std::move(attempted);
    doc["rng"] = rng_.save_state();

    return Json::to_cbor(doc);
}

void Environment::restore(std::span<const std::uint8_t> blob) {
    Json doc;
    try {
        doc = Json::from_cbor(std::vector<std::uint8_t>(blob.begin(), blob.end()));
    } catch (const Json::exception& e) {
        throw ParseError(std::string("restore: undecodable snapshot: ") + e.what());
    }
    const std::string where = "snapshot";
    if (require(doc, "format", where).get<std::string>() != "mitplan-episode" ||
        require(doc, "version", where).get<int>() != kSnapshotVersion)
        throw StateError("restore: snapshot version mismatch");

    const Json& cfg = require(doc, "config", where);
    if (cfg["n_adversaries"].get<std::size_t>() != config_.n_adversaries ||
        bits_double(cfg["defender_budget"]) != config_.defender_budget ||
        cfg["max_steps"].get<int>() != config_.max_steps ||
        cfg["simple_reward"].get<bool>() != config_.simple_reward ||
        cfg["adversary_budget_override"].is_null() != !config_.adversary_budget_override ||
        (config_.adversary_budget_override &&
         bits_double(cfg["adversary_budget_override"]) != *config_.adversary_budget_override))
        throw StateError("restore: snapshot was taken under a different configuration");

    const Json& ids = require(doc, "adversary_ids", where);
    if (profiles_.size() != ids.size())
        throw StateError("restore: adversary set size mismatch");
    for (std::size_t j = 0; j < profiles_.size(); ++j)
        if (profiles_[j].adversary_id != ids[j].get<std::string>())
            throw StateError("restore: adversary id mismatch at slot " + std::to_string(j));

    const Json& advs = require(doc, "adversaries", where);
    std::vector<AdversaryState> new_states;
    for (const Json& aj : advs) {
        AdversaryState a;
        for (const Json& t : require(aj, "history", where))
            a.history.push_back(TechniqueToken::parse(t.get<std::string>()));
        a.residual_budget = bits_double(require(aj, "residual", where));
        a.alive = require(aj, "alive", where).get<bool>();
        new_states.push_back(std::move(a));
    }

    std::vector<double> maturity;
    for (const Json& v : require(doc, "maturity", where)) maturity.push_back(bits_double(v));
    if (maturity.size() != model_.catalog->size())
        throw StateError("restore: maturity length mismatch");

    PortfolioAction portfolio;
    const Json& pj = require(doc, "portfolio", where);
    portfolio.selected = pj["selected"].get<std::vector<std::uint8_t>>();
    portfolio.total_cost = bits_double(pj["total_cost"]);

    std::map<TechniqueToken, std::set<std::size_t>> attempted;
    for (const Json& aj : require(doc, "attempted", where)) {
        const TechniqueToken tech = TechniqueToken::parse(aj["technique"].get<std::string>());
        for (const Json& j : aj["adversaries"]) attempted[tech].insert(j.get<std::size_t>());
    }

    const std::string outcome_str = require(doc, "outcome", where).get<std::string>();
    Outcome outcome = Outcome::Running;
    if (outcome_str == "win") outcome = Outcome::Win;
    else if (outcome_str == "loss") outcome = Outcome::Loss;
    else if (outcome_str == "truncated") outcome = Outcome::Truncated;
    else if (outcome_str != "running") throw ParseError("restore: bad outcome " + outcome_str);

    rng_.load_state(require(doc, "rng", where).get<std::string>());
    adversaries_ = std::move(new_states);
    maturity_ = std::move(maturity);
    costs_ = portfolio_costs(*model_.catalog, *model_.pct, *model_.scaler, maturity_);
    portfolio_ = std::move(portfolio);
    action_applied_ = require(doc, "action_applied", where).get<bool>();
    step_index_ = require(doc, "step_index", where).get<int>();
    outcome_ = outcome;
    attempted_ = std::move(attempted);
    episode_active_ = true;
}

}  // namespace mitplan
