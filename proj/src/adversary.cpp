#include "mitplan/adversary.hpp"

#include <algorithm>

#include "mitplan/errors.hpp"

namespace mitplan {

Sophistication sophistication_from_string(const std::string& s) {
    if (s == "Low" || s == "low") return Sophistication::Low;
    if (s == "Medium" || s == "medium") return Sophistication::Medium;
    if (s == "High" || s == "high") return Sophistication::High;
    throw ValidationError("unknown sophistication '" + s + "'");
}

std::string to_string(Sophistication s) {
    switch (s) {
        case Sophistication::Low: return "Low";
        case Sophistication::Medium: return "Medium";
        case Sophistication::High: return "High";
    }
    return "?";
}

double sophistication_multiplier(Sophistication s) {
    switch (s) {
        case Sophistication::Low: return 5.0;
        case Sophistication::Medium: return 3.6;
        case Sophistication::High: return 2.0;
    }
    throw DomainError("bad sophistication value");
}

void AdversaryProfile::validate() const {
    if (adversary_id.empty()) throw ValidationError("adversary profile: empty id");
    if (observed_techniques.empty())
        throw ValidationError("adversary " + adversary_id + ": empty observed technique set");
    for (const auto& [t, effort] : technique_effort) {
        if (!observed_techniques.count(t))
            throw ValidationError("adversary " + adversary_id + ": effort entry for " +
                                  t.render() + " outside the observed set");
        if (!likert_valid(effort))
            throw ValidationError("adversary " + adversary_id + ": effort outside {1..5}");
    }
    for (const auto& [t, f] : technique_frequency) {
        if (!observed_techniques.count(t))
            throw ValidationError("adversary " + adversary_id + ": frequency entry for " +
                                  t.render() + " outside the observed set");
        if (f < 0.0)
            throw ValidationError("adversary " + adversary_id + ": negative frequency");
    }
}

SpreadTable SpreadTable::from_json(const Json& doc, const std::string& where) {
    reject_unknown_keys(doc, {"format", "version", "types"}, where);
    if (require(doc, "format", where).get<std::string>() != "mitplan-spread")
        throw ParseError(where + ": not a spread table document");
    SpreadTable t;
    const Json& types = require(doc, "types", where);
    for (auto it = types.begin(); it != types.end(); ++it) {
        const std::string ctx = where + ": type " + it.key();
        const Json& row = it.value();
        reject_unknown_keys(row, {"levels", "entries"}, ctx);
        TypeRow tr;
        for (const Json& lvl : require(row, "levels", ctx))
            tr.levels.push_back(lvl.get<std::string>());
        const Json& entries = require(row, "entries", ctx);
        double prev = -1.0;
        for (const std::string& lvl : tr.levels) {
            const Json& e = require(entries, lvl, ctx);
            reject_unknown_keys(e, {"operators", "targets"}, ctx + "/" + lvl);
            const double operators = require(e, "operators", ctx).get<double>();
            const double targets = require(e, "targets", ctx).get<double>();
            if (operators <= 0.0 || targets <= 0.0)
                throw ValidationError(ctx + "/" + lvl + ": operators and targets must be positive");
            const double s = operators / targets;
            if (s < prev)
                throw ValidationError(ctx + ": spread not monotone in resource level at " + lvl);
            prev = s;
            tr.spread[lvl] = s;
        }
        t.types_[it.key()] = std::move(tr);
    }
    return t;
}

SpreadTable SpreadTable::load(const std::filesystem::path& path) {
    return from_json(load_json(path), path.string());
}

double SpreadTable::spread(const std::string& adv_type, const std::string& resource_level) const {
    auto it = types_.find(adv_type);
    if (it == types_.end())
        throw ConfigError("spread table: no row for adversary type '" + adv_type + "'");
    auto jt = it->second.spread.find(resource_level);
    if (jt == it->second.spread.end())
        throw ConfigError("spread table: no entry for (" + adv_type + ", " + resource_level + ")");
    return jt->second;
}

EffectivenessTable EffectivenessTable::from_json(const Json& doc, const std::string& where) {
    reject_unknown_keys(doc, {"format", "version", "coverage", "exact", "by_class", "global"},
                        where);
    if (require(doc, "format", where).get<std::string>() != "mitplan-effectiveness")
        throw ParseError(where + ": not an effectiveness document");

    EffectivenessTable t;
    const Json& coverage = require(doc, "coverage", where);
    for (auto it = coverage.begin(); it != coverage.end(); ++it) {
        const TechniqueToken tech = TechniqueToken::parse(it.key());
        for (const Json& m : it.value())
            t.coverage_[tech].insert(MitigationId::parse(m.get<std::string>()));
    }

    if (doc.contains("exact")) {
        for (const Json& row : doc["exact"]) {
            const std::string ctx = where + ": exact entry";
            const std::string adv = require(row, "adversary", ctx).get<std::string>();
            const TechniqueToken tech =
                TechniqueToken::parse(require(row, "technique", ctx).get<std::string>());
            const MitigationId mit =
                MitigationId::parse(require(row, "mitigation", ctx).get<std::string>());
            const Likert eff = require(row, "effectiveness", ctx).get<int>();
            if (!likert_valid(eff)) throw ValidationError(ctx + ": effectiveness outside {1..5}");
            if (!t.coverage_[tech].count(mit))
                throw ValidationError(ctx + ": " + mit.value + " does not cover " + tech.render());
            t.exact_[{adv, tech, mit}] = eff;
        }
    }
    if (doc.contains("by_class")) {
        for (const Json& row : doc["by_class"]) {
            const std::string ctx = where + ": class entry";
            const std::string type = require(row, "adv_type", ctx).get<std::string>();
            const Sophistication soph =
                sophistication_from_string(require(row, "sophistication", ctx).get<std::string>());
            const TechniqueToken tech =
                TechniqueToken::parse(require(row, "technique", ctx).get<std::string>());
            const MitigationId mit =
                MitigationId::parse(require(row, "mitigation", ctx).get<std::string>());
            const Likert eff = require(row, "effectiveness", ctx).get<int>();
            if (!likert_valid(eff)) throw ValidationError(ctx + ": effectiveness outside {1..5}");
            t.by_class_[{type, soph, tech, mit}] = eff;
        }
    }
    if (doc.contains("global")) {
        for (const Json& row : doc["global"]) {
            const std::string ctx = where + ": global entry";
            const TechniqueToken tech =
                TechniqueToken::parse(require(row, "technique", ctx).get<std::string>());
            const MitigationId mit =
                MitigationId::parse(require(row, "mitigation", ctx).get<std::string>());
            const double eff = require(row, "effectiveness", ctx).get<double>();
            if (eff < 1.0 || eff > 5.0)
                throw ValidationError(ctx + ": global effectiveness outside [1,5]");
            t.global_[{tech, mit}] = eff;
        }
    }
    return t;
}

EffectivenessTable EffectivenessTable::load(const std::filesystem::path& path) {
    return from_json(load_json(path), path.string());
}

bool EffectivenessTable::covers(const TechniqueToken& technique,
                                const MitigationId& mitigation) const {
    auto it = coverage_.find(technique);
    return it != coverage_.end() && it->second.count(mitigation) > 0;
}

const std::set<MitigationId>& EffectivenessTable::covering(const TechniqueToken& technique) const {
    static const std::set<MitigationId> kEmpty;
    auto it = coverage_.find(technique);
    return it == coverage_.end() ? kEmpty : it->second;
}

std::vector<TechniqueToken> EffectivenessTable::covered_techniques() const {
    std::vector<TechniqueToken> out;
    out.reserve(coverage_.size());
    for (const auto& [tech, mits] : coverage_)
        if (!mits.empty()) out.push_back(tech);
    return out;
}

double EffectivenessTable::effectiveness(const AdversaryProfile& adversary,
                                         const TechniqueToken& technique,
                                         const MitigationId& mitigation) const {
    if (!covers(technique, mitigation))
        throw DomainError("effectiveness: " + mitigation.value + " does not cover " +
                          technique.render());
    if (auto it = exact_.find({adversary.adversary_id, technique, mitigation}); it != exact_.end())
        return static_cast<double>(it->second);
    if (auto it = by_class_.find({adversary.adv_type, adversary.sophistication, technique,
                                  mitigation});
        it != by_class_.end())
        return static_cast<double>(it->second);
    if (auto it = global_.find({technique, mitigation}); it != global_.end()) return it->second;
    return 1.0;  // covered but unrated: weak cover, never phantom immunity
}

bool EffectivenessTable::has_exact(const std::string& adversary_id,
                                   const TechniqueToken& technique,
                                   const MitigationId& mitigation) const {
    return exact_.count({adversary_id, technique, mitigation}) > 0;
}

double adv_technique_cost(const AdversaryProfile& profile, const TechniqueToken& technique,
                          const AdvCostTable& table, std::vector<std::string>* warnings) {
    Likert effort = 3;
    if (auto it = profile.technique_effort.find(technique); it != profile.technique_effort.end())
        effort = it->second;
    bool used_default = false;
    const double base = table.fraction(technique.tactic, effort, &used_default);
    if (used_default && warnings)
        warnings->push_back("adversary " + profile.adversary_id + ": no cost row for tactic " +
                            technique.tactic + ", using default");
    return 100.0 * base * sophistication_multiplier(profile.sophistication);
}

double adv_budget(const AdversaryProfile& profile, const SpreadTable& spread) {
    return 100.0 * spread.spread(profile.adv_type, profile.resource_level);
}

AdversaryProfile parse_adversary_profile(const Json& doc, const std::string& where) {
    reject_unknown_keys(doc,
                        {"adversary_id", "adv_type", "resource_level", "sophistication",
                         "observed_techniques", "technique_effort", "technique_frequency"},
                        where);
    AdversaryProfile p;
    p.adversary_id = require(doc, "adversary_id", where).get<std::string>();
    p.adv_type = require(doc, "adv_type", where).get<std::string>();
    p.resource_level = require(doc, "resource_level", where).get<std::string>();
    p.sophistication =
        sophistication_from_string(require(doc, "sophistication", where).get<std::string>());
    for (const Json& t : require(doc, "observed_techniques", where))
        p.observed_techniques.insert(TechniqueToken::parse(t.get<std::string>()));
    if (doc.contains("technique_effort")) {
        const Json& efforts = doc["technique_effort"];
        for (auto it = efforts.begin(); it != efforts.end(); ++it)
            p.technique_effort[TechniqueToken::parse(it.key())] = it.value().get<int>();
    }
    if (doc.contains("technique_frequency")) {
        const Json& freqs = doc["technique_frequency"];
        for (auto it = freqs.begin(); it != freqs.end(); ++it)
            p.technique_frequency[TechniqueToken::parse(it.key())] = it.value().get<double>();
    }
    p.validate();
    return p;
}

std::vector<AdversaryProfile> load_adversary_profiles(const std::filesystem::path& path) {
    const Json doc = load_json(path);
    if (!doc.is_array()) throw ParseError(path.string() + ": expected array of adversary profiles");
    std::vector<AdversaryProfile> out;
    for (std::size_t i = 0; i < doc.size(); ++i)
        out.push_back(
            parse_adversary_profile(doc[i], path.string() + "[" + std::to_string(i) + "]"));
    return out;
}

}  // namespace mitplan
