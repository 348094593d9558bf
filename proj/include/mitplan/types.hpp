#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <string>

namespace mitplan {

// Ordinal 1..5 rating used for relation strengths, cost/complexity,
// technique effort, and mitigation effectiveness.
using Likert = int;

inline bool likert_valid(Likert v) { return v >= 1 && v <= 5; }

// NIST CSF practice identifier, e.g. "PR.AA-01". Free-form but non-empty.
struct PracticeId {
    std::string value;

    auto operator<=>(const PracticeId&) const = default;
};

// ATT&CK mitigation identifier: "M" followed by exactly four digits.
struct MitigationId {
    std::string value;

    static bool valid(const std::string& s);
    static MitigationId parse(const std::string& s);  // throws ValidationError

    auto operator<=>(const MitigationId&) const = default;
};

// One step of adversary behavior: tactic TAxxxx plus technique Tyyyy with an
// optional .zzz sub-technique suffix. Canonical rendering "TAxxxx:Tyyyy[.zzz]"
// doubles as the sort key everywhere token order matters (vocab order,
// inverse-CDF sampling, tie-breaking).
struct TechniqueToken {
    std::string tactic;
    std::string technique;

    static TechniqueToken parse(const std::string& rendered);  // throws ValidationError
    std::string render() const { return tactic + ":" + technique; }

    bool is_impact() const { return tactic == kImpactTactic; }

    static constexpr const char* kImpactTactic = "TA0040";

    auto operator<=>(const TechniqueToken&) const = default;
};

}  // namespace mitplan

template <>
struct std::hash<mitplan::PracticeId> {
    std::size_t operator()(const mitplan::PracticeId& p) const noexcept {
        return std::hash<std::string>{}(p.value);
    }
};

template <>
struct std::hash<mitplan::MitigationId> {
    std::size_t operator()(const mitplan::MitigationId& m) const noexcept {
        return std::hash<std::string>{}(m.value);
    }
};

template <>
struct std::hash<mitplan::TechniqueToken> {
    std::size_t operator()(const mitplan::TechniqueToken& t) const noexcept {
        return std::hash<std::string>{}(t.tactic) * 1315423911u ^
               std::hash<std::string>{}(t.technique);
    }
};
