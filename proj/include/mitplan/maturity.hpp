#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "mitplan/jsonio.hpp"
#include "mitplan/types.hpp"

namespace mitplan {

// Practice-to-mitigation relation strengths. Strength 1 means "no meaningful
// relationship" and is retained with a small weight rather than dropped; the
// power mean attenuates it. Each mitigation must carry at least one relation
// of strength >= 2 or its maturity would be dominated by noise entries.
struct StrengthMatrix {
    std::vector<PracticeId> practices;      // assessment order
    std::vector<MitigationId> mitigations;  // score order (fixed mitigation index)
    std::map<std::pair<PracticeId, MitigationId>, Likert> entries;

    std::size_t mitigation_index(const MitigationId& m) const;  // throws DomainError
};

// One organization's raw CSF assessment: a tier in 1..4 per practice.
struct OrgProfile {
    std::string org_id;
    std::map<PracticeId, int> tiers;
};

// Normalized per-mitigation maturity in [0,1], ordered as matrix.mitigations.
struct MaturityVector {
    std::vector<double> values;
    double exponent_q = 2.0;
};

// Parse and validate a strength-matrix document:
//   {"practices": [...], "mitigations": [...],
//    "relations": [{"practice": ..., "mitigation": ..., "strength": 1..5}, ...]}
StrengthMatrix load_strength_matrix(const Json& doc, const std::string& where = "strength matrix");
StrengthMatrix load_strength_matrix_file(const std::filesystem::path& path);

// Parse one OrgProfile record: {"org_id": ..., "tiers": {practice: tier}}.
OrgProfile parse_org_profile(const Json& doc, const std::string& where = "org profile");
Json org_profile_to_json(const OrgProfile& org);

// Load a population file (JSON array of OrgProfile records).
std::vector<OrgProfile> load_org_profiles(const std::filesystem::path& path);

// Bare aggregation for one mitigation: with weights w_j = strength_j / 5,
//
//   ( sum_j w_j * (tier_j * w_j)^q / sum_j w_j )^(1/q)
//
// Defined for q >= 1 (q = 1 is the plain weighted mean). Pre-normalization,
// so the result lies in [0, 4].
double practice_power_mean(std::span<const int> tiers, std::span<const Likert> strengths,
                           double q);

// Weighted power mean of practice tiers per mitigation, then divided by the
// fixed theoretical maximum 4 (max tier * max weight) so scores are
// comparable across organizations. Throws DomainError when q <= 1 or the
// profile misses a practice, ValidationError when a mitigation has no
// supporting relation.
MaturityVector mitigation_maturity(const OrgProfile& profile, const StrengthMatrix& matrix,
                                   double q = 2.0);

}  // namespace mitplan
