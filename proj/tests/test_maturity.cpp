#include <doctest.h>

#include <cmath>

#include "mitplan/errors.hpp"
#include "mitplan/maturity.hpp"
#include "mitplan/rng.hpp"

using namespace mitplan;

namespace {

// Independent direct evaluation of the aggregation: weights strength/5,
// sum w*(tier*w)^q over sum w, q-th root. Written from scratch as the test
// oracle; keep it free of library calls.
double oracle_power_mean(const std::vector<int>& tiers, const std::vector<int>& strengths,
                         double q) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < tiers.size(); ++i) {
        const double w = strengths[i] / 5.0;
        num += w * std::pow(tiers[i] * w, q);
        den += w;
    }
    return std::pow(num / den, 1.0 / q);
}

Json two_by_two_matrix() {
    return Json{
        {"practices", {"P.A-01", "P.B-01"}},
        {"mitigations", {"M0001", "M0002"}},
        {"relations",
         {Json{{"practice", "P.A-01"}, {"mitigation", "M0001"}, {"strength", 5}},
          Json{{"practice", "P.B-01"}, {"mitigation", "M0001"}, {"strength", 3}},
          Json{{"practice", "P.A-01"}, {"mitigation", "M0002"}, {"strength", 1}},
          Json{{"practice", "P.B-01"}, {"mitigation", "M0002"}, {"strength", 4}}}}};
}

}  // namespace

TEST_CASE("load_strength_matrix echoes a 2x2 document") {
    const StrengthMatrix m = load_strength_matrix(two_by_two_matrix());
    CHECK(m.practices.size() == 2);
    CHECK(m.mitigations.size() == 2);
    CHECK(m.entries.size() == 4);
    CHECK(m.entries.at({PracticeId{"P.A-01"}, MitigationId{"M0001"}}) == 5);
}

TEST_CASE("strength outside 1..5 is rejected") {
    Json doc = two_by_two_matrix();
    doc["relations"][0]["strength"] = 6;
    CHECK_THROWS_AS(load_strength_matrix(doc), ValidationError);
}

TEST_CASE("missing mitigation list is a parse error") {
    Json doc = two_by_two_matrix();
    doc.erase("mitigations");
    CHECK_THROWS_AS(load_strength_matrix(doc), ParseError);
}

TEST_CASE("duplicate triple is rejected") {
    Json doc = two_by_two_matrix();
    doc["relations"].push_back(
        Json{{"practice", "P.A-01"}, {"mitigation", "M0001"}, {"strength", 2}});
    CHECK_THROWS_AS(load_strength_matrix(doc), ValidationError);
}

TEST_CASE("mitigation with only strength-1 support is rejected at load") {
    Json doc = two_by_two_matrix();
    doc["relations"][3]["strength"] = 1;  // M0002 left with two strength-1 rows
    CHECK_THROWS_AS(load_strength_matrix(doc), ValidationError);
}

TEST_CASE("single supporting practice at tier 4 strength 5 saturates") {
    const Json doc{{"practices", {"P.A-01"}},
                   {"mitigations", {"M0001"}},
                   {"relations",
                    {Json{{"practice", "P.A-01"}, {"mitigation", "M0001"}, {"strength", 5}}}}};
    const StrengthMatrix m = load_strength_matrix(doc);
    OrgProfile org{"o", {{PracticeId{"P.A-01"}, 4}}};
    const MaturityVector mv = mitigation_maturity(org, m, 2.0);
    CHECK(mv.values[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("two practices tiers (4,1) strengths (5,5) at q=2") {
    const Json doc{{"practices", {"P.A-01", "P.B-01"}},
                   {"mitigations", {"M0001"}},
                   {"relations",
                    {Json{{"practice", "P.A-01"}, {"mitigation", "M0001"}, {"strength", 5}},
                     Json{{"practice", "P.B-01"}, {"mitigation", "M0001"}, {"strength", 5}}}}};
    const StrengthMatrix m = load_strength_matrix(doc);
    OrgProfile org{"o", {{PracticeId{"P.A-01"}, 4}, {PracticeId{"P.B-01"}, 1}}};
    const MaturityVector mv = mitigation_maturity(org, m, 2.0);
    // ((16 + 1)/2)^(1/2) / 4 = sqrt(8.5)/4
    CHECK(mv.values[0] == doctest::Approx(std::sqrt(8.5) / 4.0).epsilon(1e-12));
}

TEST_CASE("weak relation attenuates versus strong relation") {
    const auto score = [](int s2) {
        const Json doc{
            {"practices", {"P.A-01", "P.B-01"}},
            {"mitigations", {"M0001"}},
            {"relations",
             {Json{{"practice", "P.A-01"}, {"mitigation", "M0001"}, {"strength", 5}},
              Json{{"practice", "P.B-01"}, {"mitigation", "M0001"}, {"strength", s2}}}}};
        const StrengthMatrix m = load_strength_matrix(doc);
        OrgProfile org{"o", {{PracticeId{"P.A-01"}, 4}, {PracticeId{"P.B-01"}, 4}}};
        return mitigation_maturity(org, m, 2.0).values[0];
    };
    CHECK(score(1) < score(5));
}

TEST_CASE("implementation matches the direct oracle on 1000 random instances") {
    Rng rng(2024);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 1 + rng.below(6);
        std::vector<int> tiers(n);
        std::vector<Likert> strengths(n);
        std::vector<int> strengths_int(n);
        for (std::size_t i = 0; i < n; ++i) {
            tiers[i] = 1 + static_cast<int>(rng.below(4));
            strengths[i] = 1 + static_cast<int>(rng.below(5));
            strengths_int[i] = strengths[i];
        }
        const double q = 1.0 + rng.uniform01() * 3.0;
        const double got = practice_power_mean(tiers, strengths, q);
        const double want = oracle_power_mean(tiers, strengths_int, q);
        CHECK(got == doctest::Approx(want).epsilon(1e-12));
        CHECK(got >= 0.0);
        double max_term = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            max_term = std::max(max_term, tiers[i] * strengths[i] / 5.0);
        CHECK(got <= max_term + 1e-12);
        CHECK(got <= 4.0 + 1e-12);
    }
}

TEST_CASE("monotonicity: raising any tier never lowers the mean") {
    Rng rng(77);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 1 + rng.below(5);
        std::vector<int> tiers(n);
        std::vector<Likert> strengths(n);
        for (std::size_t i = 0; i < n; ++i) {
            tiers[i] = 1 + static_cast<int>(rng.below(3));  // leave room to raise
            strengths[i] = 1 + static_cast<int>(rng.below(5));
        }
        const double q = 1.0 + rng.uniform01() * 3.0;
        const double base = practice_power_mean(tiers, strengths, q);
        const std::size_t j = rng.below(n);
        std::vector<int> raised = tiers;
        raised[j] += 1;
        CHECK(practice_power_mean(raised, strengths, q) >= base - 1e-12);
    }
}

TEST_CASE("power mean is non-decreasing in q") {
    Rng rng(78);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 2 + rng.below(4);
        std::vector<int> tiers(n);
        std::vector<Likert> strengths(n);
        for (std::size_t i = 0; i < n; ++i) {
            tiers[i] = 1 + static_cast<int>(rng.below(4));
            strengths[i] = 1 + static_cast<int>(rng.below(5));
        }
        const double q1 = 1.0 + rng.uniform01() * 2.0;
        const double q2 = q1 + rng.uniform01() * 2.0;
        CHECK(practice_power_mean(tiers, strengths, q2) >=
              practice_power_mean(tiers, strengths, q1) - 1e-10);
    }
}

TEST_CASE("equal weights at q=1 reduce to the arithmetic mean of tiers") {
    Rng rng(79);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng.below(6);
        std::vector<int> tiers(n);
        std::vector<Likert> strengths(n, 5);  // w = 1 everywhere
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            tiers[i] = 1 + static_cast<int>(rng.below(4));
            mean += tiers[i];
        }
        mean /= static_cast<double>(n);
        CHECK(practice_power_mean(tiers, strengths, 1.0) ==
              doctest::Approx(mean).epsilon(1e-12));
    }
}

TEST_CASE("profile missing a practice tier is a domain error") {
    const StrengthMatrix m = load_strength_matrix(two_by_two_matrix());
    OrgProfile org{"o", {{PracticeId{"P.A-01"}, 3}}};  // P.B-01 missing
    CHECK_THROWS_AS(mitigation_maturity(org, m, 2.0), DomainError);
}

TEST_CASE("q at or below 1 is rejected by the full mapping") {
    const StrengthMatrix m = load_strength_matrix(two_by_two_matrix());
    OrgProfile org{"o", {{PracticeId{"P.A-01"}, 3}, {PracticeId{"P.B-01"}, 2}}};
    CHECK_THROWS_AS(mitigation_maturity(org, m, 1.0), DomainError);
}
