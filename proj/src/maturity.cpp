#include "mitplan/maturity.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "mitplan/errors.hpp"

namespace mitplan {

std::size_t StrengthMatrix::mitigation_index(const MitigationId& m) const {
    auto it = std::find(mitigations.begin(), mitigations.end(), m);
    if (it == mitigations.end()) throw DomainError("unknown mitigation " + m.value);
    return static_cast<std::size_t>(it - mitigations.begin());
}

StrengthMatrix load_strength_matrix(const Json& doc, const std::string& where) {
    if (!doc.is_object()) throw ParseError(where + ": expected object");
    reject_unknown_keys(doc, {"practices", "mitigations", "relations"}, where);

    StrengthMatrix m;
    const Json& practices = require(doc, "practices", where);
    const Json& mitigations = require(doc, "mitigations", where);
    const Json& relations = require(doc, "relations", where);
    if (!practices.is_array() || practices.empty())
        throw ParseError(where + ": 'practices' must be a non-empty array");
    if (!mitigations.is_array() || mitigations.empty())
        throw ParseError(where + ": 'mitigations' must be a non-empty array");
    if (!relations.is_array()) throw ParseError(where + ": 'relations' must be an array");

    std::set<std::string> seen_p;
    for (const Json& p : practices) {
        std::string id = p.get<std::string>();
        if (id.empty()) throw ValidationError(where + ": empty practice id");
        if (!seen_p.insert(id).second)
            throw ValidationError(where + ": duplicate practice " + id);
        m.practices.push_back(PracticeId{std::move(id)});
    }
    std::set<std::string> seen_m;
    for (const Json& mm : mitigations) {
        MitigationId id = MitigationId::parse(mm.get<std::string>());
        if (!seen_m.insert(id.value).second)
            throw ValidationError(where + ": duplicate mitigation " + id.value);
        m.mitigations.push_back(std::move(id));
    }

    std::size_t line = 0;
    for (const Json& r : relations) {
        ++line;
        const std::string ctx = where + ": relation #" + std::to_string(line);
        PracticeId p{require(r, "practice", ctx).get<std::string>()};
        MitigationId mit = MitigationId::parse(require(r, "mitigation", ctx).get<std::string>());
        const Json& sj = require(r, "strength", ctx);
        if (!sj.is_number_integer())
            throw ParseError(ctx + ": strength must be an integer");
        Likert s = sj.get<int>();
        if (!likert_valid(s))
            throw ValidationError(ctx + ": strength " + std::to_string(s) + " outside {1..5}");
        if (!seen_p.count(p.value)) throw ValidationError(ctx + ": unlisted practice " + p.value);
        if (!seen_m.count(mit.value))
            throw ValidationError(ctx + ": unlisted mitigation " + mit.value);
        auto key = std::make_pair(std::move(p), std::move(mit));
        if (m.entries.count(key))
            throw ValidationError(ctx + ": duplicate triple " + key.first.value + "/" +
                                  key.second.value);
        m.entries.emplace(std::move(key), s);
    }

    for (const MitigationId& mit : m.mitigations) {
        bool supported = false;
        for (const auto& [key, s] : m.entries)
            if (key.second == mit && s >= 2) { supported = true; break; }
        if (!supported)
            throw ValidationError(where + ": mitigation " + mit.value +
                                  " has no relation of strength >= 2; its maturity is undefined");
    }
    return m;
}

StrengthMatrix load_strength_matrix_file(const std::filesystem::path& path) {
    return load_strength_matrix(load_json(path), path.string());
}

OrgProfile parse_org_profile(const Json& doc, const std::string& where) {
    reject_unknown_keys(doc, {"org_id", "tiers"}, where);
    OrgProfile org;
    org.org_id = require(doc, "org_id", where).get<std::string>();
    const Json& tiers = require(doc, "tiers", where);
    if (!tiers.is_object()) throw ParseError(where + ": 'tiers' must be an object");
    for (auto it = tiers.begin(); it != tiers.end(); ++it) {
        int t = it.value().get<int>();
        if (t < 1 || t > 4)
            throw ValidationError(where + ": tier " + std::to_string(t) + " for practice " +
                                  it.key() + " outside {1..4}");
        org.tiers[PracticeId{it.key()}] = t;
    }
    return org;
}

Json org_profile_to_json(const OrgProfile& org) {
    Json tiers = Json::object();
    for (const auto& [p, t] : org.tiers) tiers[p.value] = t;
    return Json{{"org_id", org.org_id}, {"tiers", std::move(tiers)}};
}

std::vector<OrgProfile> load_org_profiles(const std::filesystem::path& path) {
    // Accepts either a JSON array or line-delimited records.
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    char first = 0;
    in >> std::ws;
    in.get(first);
    in.seekg(0);

    std::vector<OrgProfile> out;
    if (first == '[') {
        Json doc;
        try {
            doc = Json::parse(in);
        } catch (const Json::parse_error& e) {
            throw ParseError(path.string() + ": " + e.what());
        }
        out.reserve(doc.size());
        for (std::size_t i = 0; i < doc.size(); ++i)
            out.push_back(parse_org_profile(doc[i], path.string() + "[" + std::to_string(i) + "]"));
        return out;
    }
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        Json rec;
        try {
            rec = Json::parse(line);
        } catch (const Json::parse_error& e) {
            throw ParseError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
        out.push_back(parse_org_profile(rec, path.string() + ":" + std::to_string(lineno)));
    }
    return out;
}

double practice_power_mean(std::span<const int> tiers, std::span<const Likert> strengths,
                           double q) {
    if (q < 1.0) throw DomainError("practice_power_mean: q must be >= 1");
    if (tiers.size() != strengths.size())
        throw DomainError("practice_power_mean: tier/strength length mismatch");
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < tiers.size(); ++j) {
        const double w = static_cast<double>(strengths[j]) / 5.0;
        num += w * std::pow(static_cast<double>(tiers[j]) * w, q);
        den += w;
    }
    if (den <= 0.0) throw ValidationError("practice_power_mean: zero total weight");
    return std::pow(num / den, 1.0 / q);
}

MaturityVector mitigation_maturity(const OrgProfile& profile, const StrengthMatrix& matrix,
                                   double q) {
    if (q <= 1.0) throw DomainError("mitigation_maturity: q must be > 1");

    // Pre-normalization ceiling: max tier (4) times max weight (1).
    constexpr double kTheoreticalMax = 4.0;

    MaturityVector out;
    out.exponent_q = q;
    out.values.resize(matrix.mitigations.size(), 0.0);

    for (std::size_t i = 0; i < matrix.mitigations.size(); ++i) {
        const MitigationId& mit = matrix.mitigations[i];
        std::vector<int> tiers;
        std::vector<Likert> strengths;
        for (const auto& [key, strength] : matrix.entries) {
            if (key.second != mit) continue;
            auto tier_it = profile.tiers.find(key.first);
            if (tier_it == profile.tiers.end())
                throw DomainError("org " + profile.org_id + " has no tier for practice " +
                                  key.first.value);
            tiers.push_back(tier_it->second);
            strengths.push_back(strength);
        }
        if (tiers.empty())
            throw ValidationError("mitigation " + mit.value + " has zero total weight");
        out.values[i] = practice_power_mean(tiers, strengths, q) / kTheoreticalMax;
    }
    return out;
}

}  // namespace mitplan
