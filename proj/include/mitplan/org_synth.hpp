#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "mitplan/jsonio.hpp"
#include "mitplan/maturity.hpp"
#include "mitplan/rng.hpp"
#include "mitplan/types.hpp"

namespace mitplan {

// Categorical prior over the four latent maturity classes plus the latent
// noise scale. Defaults reflect the scarcity of highly mature organizations.
struct MaturityPrior {
    std::array<double, 4> class_probs{0.40, 0.30, 0.20, 0.10};
    double noise_sd = 0.25;
    std::uint64_t rng_seed = 0;

    void validate() const;  // probs sum to 1 within 1e-9, each >= 0, sd >= 0
};

// Per-practice ordered-logit cutpoints, shifted by the practice's cost and
// complexity ordinals.
struct PracticeDifficulty {
    PracticeId practice;
    Likert cost = 3;
    Likert complexity = 3;
    std::array<double, 3> cutpoints{1.5, 2.5, 3.5};

    // Baseline cutpoints (1.5, 2.5, 3.5) plus difficulty_shift(cost, complexity).
    static PracticeDifficulty from_ordinals(PracticeId practice, Likert cost, Likert complexity);
};

// 0.3 * ((cost + complexity)/2 - 2.5); positive for demanding practices.
double difficulty_shift(Likert cost, Likert complexity);

// Ordered-logit tier probabilities for latent maturity `latent`:
// F_k = logistic(b_k - latent); returns (F1, F2-F1, F3-F2, 1-F3).
std::array<double, 4> tier_probabilities(double latent, const std::array<double, 3>& cutpoints);

// An organization together with the latent draw that produced it; the latent
// never leaves the process (population files carry OrgProfile records only).
struct SampledOrg {
    OrgProfile profile;
    int latent_class = 0;  // 1..4
    double latent = 0.0;   // class + noise, clipped to [1,4]
};

// Draw n organizations: latent class ~ Categorical(class_probs), plus
// Normal(0, sd^2) noise clipped to [1,4]; each practice tier sampled by
// inverse CDF over its ordered-logit probabilities. Deterministic per seed.
std::vector<SampledOrg> sample_population_detailed(const MaturityPrior& prior,
                                                   const std::vector<PracticeDifficulty>& difficulties,
                                                   std::size_t n,
                                                   const std::string& id_prefix = "org");

std::vector<OrgProfile> sample_population(const MaturityPrior& prior,
                                          const std::vector<PracticeDifficulty>& difficulties,
                                          std::size_t n,
                                          const std::string& id_prefix = "org");

// Difficulty table document: [{"practice": ..., "cost": 1..5, "complexity": 1..5}, ...]
std::vector<PracticeDifficulty> load_practice_difficulties(const Json& doc,
                                                           const std::string& where);
std::vector<PracticeDifficulty> load_practice_difficulties_file(const std::filesystem::path& path);

}  // namespace mitplan
