#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mitplan/cost_model.hpp"
#include "mitplan/jsonio.hpp"
#include "mitplan/types.hpp"

namespace mitplan {

enum class Sophistication { Low, Medium, High };

Sophistication sophistication_from_string(const std::string& s);
std::string to_string(Sophistication s);

// Operational-efficiency multiplier from Eq.-style cost scaling: low
// sophistication pays more per technique. Values mirror the defender
// maturity anchors {5.0, 3.6, 2.0}.
double sophistication_multiplier(Sophistication s);

struct AdversaryProfile {
    std::string adversary_id;
    std::string adv_type;        // e.g. criminal, state, hacktivist
    std::string resource_level;  // ordered label defined by the spread table
    Sophistication sophistication = Sophistication::Medium;
    std::set<TechniqueToken> observed_techniques;
    std::map<TechniqueToken, Likert> technique_effort;
    // Optional empirical technique frequencies; uniform over the observed set
    // when absent.
    std::map<TechniqueToken, double> technique_frequency;

    void validate() const;
};

// Per-target resource availability (operator-equivalents per target per
// planning period) by adversary type and resource level: operators divided
// by targets per period. Levels are declared in ascending resource order and
// spread must be monotone along them.
class SpreadTable {
public:
    static SpreadTable from_json(const Json& doc, const std::string& where = "spread table");
    static SpreadTable load(const std::filesystem::path& path);

    double spread(const std::string& adv_type, const std::string& resource_level) const;

private:
    // type -> (ordered levels, level -> spread)
    struct TypeRow {
        std::vector<std::string> levels;
        std::map<std::string, double> spread;
    };
    std::map<std::string, TypeRow> types_;
};

// Effectiveness data with the specificity hierarchy: exact adversary entry,
// then (type, sophistication) class entry, then the global per-technique
// average, then a documented floor of 1 (weak cover, not immunity).
class EffectivenessTable {
public:
    static EffectivenessTable from_json(const Json& doc,
                                        const std::string& where = "effectiveness table");
    static EffectivenessTable load(const std::filesystem::path& path);

    bool covers(const TechniqueToken& technique, const MitigationId& mitigation) const;
    const std::set<MitigationId>& covering(const TechniqueToken& technique) const;
    std::vector<TechniqueToken> covered_techniques() const;

    // Resolved effectiveness in [1,5]; DomainError when the mitigation does
    // not cover the technique.
    double effectiveness(const AdversaryProfile& adversary, const TechniqueToken& technique,
                         const MitigationId& mitigation) const;

    // True when an exact (adversary, technique, mitigation) entry exists;
    // beam reconstruction prefers these.
    bool has_exact(const std::string& adversary_id, const TechniqueToken& technique,
                   const MitigationId& mitigation) const;

private:
    std::map<std::tuple<std::string, TechniqueToken, MitigationId>, Likert> exact_;
    std::map<std::tuple<std::string, Sophistication, TechniqueToken, MitigationId>, Likert>
        by_class_;
    std::map<std::pair<TechniqueToken, MitigationId>, double> global_;
    std::map<TechniqueToken, std::set<MitigationId>> coverage_;
};

// 100 * PctCost_adv(technique) * sophistication multiplier, in percentage
// units. Effort comes from the profile (default 3 when unmapped); unknown
// tactics use the table's default row and append a warning.
double adv_technique_cost(const AdversaryProfile& profile, const TechniqueToken& technique,
                          const AdvCostTable& table, std::vector<std::string>* warnings = nullptr);

// 100 * Spread(type, resource); ConfigError on a missing table entry.
double adv_budget(const AdversaryProfile& profile, const SpreadTable& spread);

AdversaryProfile parse_adversary_profile(const Json& doc, const std::string& where);
std::vector<AdversaryProfile> load_adversary_profiles(const std::filesystem::path& path);

}  // namespace mitplan
