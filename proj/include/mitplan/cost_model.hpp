#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mitplan/jsonio.hpp"
#include "mitplan/types.hpp"

namespace mitplan {

// Episode budgets are expressed in percentage units; the standard defender
// budget is 100 units.
inline constexpr double kEpisodeBudgetUnits = 100.0;
inline constexpr double kBudgetSlack = 1e-9;

// Defender base-cost lookup: fraction of the episode budget per (cost,
// complexity) ordinal pair, before maturity scaling. Monotone along both
// axes, capped at 0.5; the (VeryLow, Low) cell is pinned at 0.08 and four
// anchor cells are pinned so that the anchor mitigation at each maturity
// level costs exactly one full budget.
class PctCostTable {
public:
    static PctCostTable from_json(const Json& doc, const std::string& where = "pctcost table");
    static PctCostTable load(const std::filesystem::path& path);

    double fraction(Likert cost, Likert complexity) const;

private:
    std::array<std::array<double, 5>, 5> rows_{};  // [cost-1][complexity-1]

    void validate(const std::string& where) const;
};

// Attacker base-cost lookup: fraction of the standard budget per tactic and
// technique-effort Likert. Unknown tactics fall back to the default row.
class AdvCostTable {
public:
    static AdvCostTable from_json(const Json& doc, const std::string& where = "adv cost table");
    static AdvCostTable load(const std::filesystem::path& path);

    // Returns the base fraction; sets `used_default` when the tactic had no
    // dedicated row.
    double fraction(const std::string& tactic, Likert effort, bool* used_default = nullptr) const;

private:
    std::array<double, 5> default_row_{};
    std::map<std::string, std::array<double, 5>> tactic_rows_;

    void validate(const std::string& where) const;
};

// Piecewise-linear maturity multiplier. Discrete maturity levels 1..4 sit at
// continuous positions 0.25, 0.50, 0.75, 1.00 carrying multipliers 5.0, 3.6,
// 2.8, 2.0; maturities below the first anchor clamp to 5.0.
class MaturityScaler {
public:
    MaturityScaler();

    double mu(double maturity) const;       // maturity in [0,1], else DomainError
    double level_multiplier(int level) const;  // level in {1..4}

    const std::vector<std::pair<double, double>>& anchors() const { return anchors_; }

private:
    std::vector<std::pair<double, double>> anchors_;  // (position, multiplier)
};

// 100 * PctCost(cost, complexity) * mu(maturity), in percentage units.
double mitigation_cost(const PctCostTable& table, const MaturityScaler& scaler, Likert cost,
                       Likert complexity, double maturity);

// Budget feasibility per the episode constraint: sum of costs <= budget plus
// a tolerance for accumulated rounding.
bool feasible(const std::vector<double>& costs, double budget = kEpisodeBudgetUnits);
double total_cost(const std::vector<double>& costs);

// Catalog of mitigations with their defender cost/complexity ordinals.
struct MitigationCatalog {
    struct Entry {
        MitigationId id;
        std::string name;
        Likert cost = 3;
        Likert complexity = 3;
    };

    std::vector<Entry> entries;  // sorted by id

    static MitigationCatalog from_json(const Json& doc,
                                       const std::string& where = "mitigation catalog");
    static MitigationCatalog load(const std::filesystem::path& path);

    const Entry& at(const MitigationId& id) const;  // DomainError when absent
    std::optional<std::size_t> index_of(const MitigationId& id) const;
    std::size_t size() const { return entries.size(); }
};

// Per-mitigation episode costs for one organization's maturity vector,
// aligned with the catalog order.
std::vector<double> portfolio_costs(const MitigationCatalog& catalog, const PctCostTable& table,
                                    const MaturityScaler& scaler,
                                    const std::vector<double>& maturity);

}  // namespace mitplan
