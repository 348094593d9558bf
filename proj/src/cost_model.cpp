#include "mitplan/cost_model.hpp"

#include <algorithm>
#include <cmath>

#include "mitplan/errors.hpp"

namespace mitplan {

namespace {
void check_ordinal(Likert v, const char* what) {
    if (!likert_valid(v)) throw DomainError(std::string(what) + " ordinal outside {1..5}");
}
}  // namespace

PctCostTable PctCostTable::from_json(const Json& doc, const std::string& where) {
    reject_unknown_keys(doc, {"format", "version", "rows"}, where);
    if (require(doc, "format", where).get<std::string>() != "mitplan-pctcost")
        throw ParseError(where + ": not a pctcost document");
    const Json& rows = require(doc, "rows", where);
    if (!rows.is_array() || rows.size() != 5)
        throw ParseError(where + ": 'rows' must be 5 arrays of 5 fractions");
    PctCostTable t;
    for (std::size_t c = 0; c < 5; ++c) {
        if (!rows[c].is_array() || rows[c].size() != 5)
            throw ParseError(where + ": row " + std::to_string(c + 1) + " must have 5 entries");
        for (std::size_t k = 0; k < 5; ++k) t.rows_[c][k] = rows[c][k].get<double>();
    }
    t.validate(where);
    return t;
}

void PctCostTable::validate(const std::string& where) const {
    for (std::size_t c = 0; c < 5; ++c)
        for (std::size_t k = 0; k < 5; ++k) {
            const double v = rows_[c][k];
            if (!(v > 0.0 && v <= 0.5))
                throw ValidationError(where + ": fraction outside (0, 0.5] at cost " +
                                      std::to_string(c + 1) + " complexity " + std::to_string(k + 1));
            if (c > 0 && rows_[c - 1][k] > v)
                throw ValidationError(where + ": not monotone along cost axis");
            if (k > 0 && rows_[c][k - 1] > v)
                throw ValidationError(where + ": not monotone along complexity axis");
        }
    if (rows_[0][1] != 0.08)
        throw ValidationError(where + ": (VeryLow, Low) cell must be 0.08");
}

PctCostTable PctCostTable::load(const std::filesystem::path& path) {
    return from_json(load_json(path), path.string());
}

double PctCostTable::fraction(Likert cost, Likert complexity) const {
    check_ordinal(cost, "cost");
    check_ordinal(complexity, "complexity");
    return rows_[cost - 1][complexity - 1];
}

AdvCostTable AdvCostTable::from_json(const Json& doc, const std::string& where) {
    reject_unknown_keys(doc, {"format", "version", "default", "tactics"}, where);
    if (require(doc, "format", where).get<std::string>() != "mitplan-pctcost-adv")
        throw ParseError(where + ": not an adversary cost document");
    AdvCostTable t;
    const Json& def = require(doc, "default", where);
    if (!def.is_array() || def.size() != 5)
        throw ParseError(where + ": 'default' must be 5 fractions");
    for (std::size_t i = 0; i < 5; ++i) t.default_row_[i] = def[i].get<double>();
    if (doc.contains("tactics")) {
        for (auto it = doc["tactics"].begin(); it != doc["tactics"].end(); ++it) {
            const Json& row = it.value();
            if (!row.is_array() || row.size() != 5)
                throw ParseError(where + ": tactic row " + it.key() + " must have 5 fractions");
            std::array<double, 5> r{};
            for (std::size_t i = 0; i < 5; ++i) r[i] = row[i].get<double>();
            t.tactic_rows_[it.key()] = r;
        }
    }
    t.validate(where);
    return t;
}

void AdvCostTable::validate(const std::string& where) const {
    auto check_row = [&](const std::array<double, 5>& row, const std::string& name) {
        for (std::size_t i = 0; i < 5; ++i) {
            if (!(row[i] > 0.0 && row[i] <= 1.0))
                throw ValidationError(where + ": " + name + " fraction outside (0, 1]");
            if (i > 0 && row[i - 1] > row[i])
                throw ValidationError(where + ": " + name + " not monotone in effort");
        }
    };
    check_row(default_row_, "default");
    for (const auto& [tactic, row] : tactic_rows_) check_row(row, tactic);
}

AdvCostTable AdvCostTable::load(const std::filesystem::path& path) {
    return from_json(load_json(path), path.string());
}

double AdvCostTable::fraction(const std::string& tactic, Likert effort, bool* used_default) const {
    check_ordinal(effort, "effort");
    auto it = tactic_rows_.find(tactic);
    if (used_default) *used_default = (it == tactic_rows_.end());
    const auto& row = (it == tactic_rows_.end()) ? default_row_ : it->second;
    return row[effort - 1];
}

MaturityScaler::MaturityScaler() {
    anchors_ = {{0.25, 5.0}, {0.50, 3.6}, {0.75, 2.8}, {1.00, 2.0}};
}

double MaturityScaler::mu(double maturity) const {
    if (maturity < 0.0 || maturity > 1.0)
        throw DomainError("mu: maturity " + std::to_string(maturity) + " outside [0,1]");
    if (maturity <= anchors_.front().first) return anchors_.front().second;
    for (std::size_t i = 0; i + 1 < anchors_.size(); ++i) {
        const auto [x0, y0] = anchors_[i];
        const auto [x1, y1] = anchors_[i + 1];
        if (maturity <= x1) return y0 + (maturity - x0) / (x1 - x0) * (y1 - y0);
    }
    return anchors_.back().second;
}

double MaturityScaler::level_multiplier(int level) const {
    if (level < 1 || level > 4) throw DomainError("level_multiplier: level outside {1..4}");
    return anchors_[static_cast<std::size_t>(level - 1)].second;
}

double mitigation_cost(const PctCostTable& table, const MaturityScaler& scaler, Likert cost,
                       Likert complexity, double maturity) {
    return 100.0 * table.fraction(cost, complexity) * scaler.mu(maturity);
}

bool feasible(const std::vector<double>& costs, double budget) {
    return total_cost(costs) <= budget + kBudgetSlack;
}

double total_cost(const std::vector<double>& costs) {
    double sum = 0.0;
    for (double c : costs) sum += c;
    return sum;
}

MitigationCatalog MitigationCatalog::from_json(const Json& doc, const std::string& where) {
    if (!doc.is_array() || doc.empty())
        throw ParseError(where + ": expected non-empty array of mitigations");
    MitigationCatalog cat;
    std::set<std::string> seen;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const Json& row = doc[i];
        const std::string ctx = where + "[" + std::to_string(i) + "]";
        reject_unknown_keys(row, {"id", "name", "cost", "complexity"}, ctx);
        Entry e;
        e.id = MitigationId::parse(require(row, "id", ctx).get<std::string>());
        if (row.contains("name")) e.name = row["name"].get<std::string>();
        e.cost = require(row, "cost", ctx).get<int>();
        e.complexity = require(row, "complexity", ctx).get<int>();
        if (!likert_valid(e.cost) || !likert_valid(e.complexity))
            throw ValidationError(ctx + ": cost/complexity outside {1..5}");
        if (!seen.insert(e.id.value).second)
            throw ValidationError(ctx + ": duplicate mitigation " + e.id.value);
        cat.entries.push_back(std::move(e));
    }
    std::sort(cat.entries.begin(), cat.entries.end(),
              [](const Entry& a, const Entry& b) { return a.id < b.id; });
    return cat;
}

MitigationCatalog MitigationCatalog::load(const std::filesystem::path& path) {
    return from_json(load_json(path), path.string());
}

const MitigationCatalog::Entry& MitigationCatalog::at(const MitigationId& id) const {
    const auto idx = index_of(id);
    if (!idx) throw DomainError("mitigation " + id.value + " not in catalog");
    return entries[*idx];
}

std::optional<std::size_t> MitigationCatalog::index_of(const MitigationId& id) const {
    auto it = std::lower_bound(entries.begin(), entries.end(), id,
                               [](const Entry& e, const MitigationId& v) { return e.id < v; });
    if (it == entries.end() || it->id != id) return std::nullopt;
    return static_cast<std::size_t>(it - entries.begin());
}

std::vector<double> portfolio_costs(const MitigationCatalog& catalog, const PctCostTable& table,
                                    const MaturityScaler& scaler,
                                    const std::vector<double>& maturity) {
    if (maturity.size() != catalog.size())
        throw DomainError("portfolio_costs: maturity vector length mismatch");
    std::vector<double> costs(catalog.size());
    for (std::size_t i = 0; i < catalog.size(); ++i)
        costs[i] = mitigation_cost(table, scaler, catalog.entries[i].cost,
                                   catalog.entries[i].complexity, maturity[i]);
    return costs;
}

}  // namespace mitplan
