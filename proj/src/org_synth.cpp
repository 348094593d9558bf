#include "mitplan/org_synth.hpp"

#include <algorithm>
#include <cmath>

#include "mitplan/errors.hpp"

namespace mitplan {

namespace {
constexpr double kLatentMin = 1.0;
constexpr double kLatentMax = 4.0;

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }
}  // namespace

void MaturityPrior::validate() const {
    double sum = 0.0;
    for (double p : class_probs) {
        if (p < 0.0) throw ValidationError("maturity prior: negative class probability");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw ValidationError("maturity prior: class probabilities must sum to 1");
    if (noise_sd < 0.0) throw ValidationError("maturity prior: negative noise sd");
}

double difficulty_shift(Likert cost, Likert complexity) {
    if (!likert_valid(cost) || !likert_valid(complexity))
        throw DomainError("difficulty_shift: ordinals must be in {1..5}");
    return 0.3 * ((static_cast<double>(cost) + static_cast<double>(complexity)) / 2.0 - 2.5);
}

PracticeDifficulty PracticeDifficulty::from_ordinals(PracticeId practice, Likert cost,
                                                     Likert complexity) {
    const double shift = difficulty_shift(cost, complexity);
    PracticeDifficulty d;
    d.practice = std::move(practice);
    d.cost = cost;
    d.complexity = complexity;
    d.cutpoints = {1.5 + shift, 2.5 + shift, 3.5 + shift};
    return d;
}

std::array<double, 4> tier_probabilities(double latent, const std::array<double, 3>& cutpoints) {
    if (!(cutpoints[0] < cutpoints[1] && cutpoints[1] < cutpoints[2]))
        throw DomainError("tier_probabilities: cutpoints must be strictly increasing");
    const double f1 = logistic(cutpoints[0] - latent);
    const double f2 = logistic(cutpoints[1] - latent);
    const double f3 = logistic(cutpoints[2] - latent);
    return {f1, f2 - f1, f3 - f2, 1.0 - f3};
}

std::vector<SampledOrg> sample_population_detailed(const MaturityPrior& prior,
                                                   const std::vector<PracticeDifficulty>& difficulties,
                                                   std::size_t n, const std::string& id_prefix) {
    prior.validate();
    if (difficulties.empty()) throw ConfigError("sample_population: empty practice difficulty list");
    if (n == 0) throw DomainError("sample_population: n must be >= 1");

    Rng rng(prior.rng_seed);
    std::vector<SampledOrg> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        SampledOrg org;
        org.latent_class =
            static_cast<int>(rng.categorical(std::span<const double>(prior.class_probs))) + 1;
        double latent = static_cast<double>(org.latent_class);
        if (prior.noise_sd > 0.0) latent += rng.normal(0.0, prior.noise_sd);
        org.latent = std::clamp(latent, kLatentMin, kLatentMax);
        org.profile.org_id = id_prefix + "-" + std::to_string(i);
        for (const PracticeDifficulty& d : difficulties) {
            const auto probs = tier_probabilities(org.latent, d.cutpoints);
            const int tier = static_cast<int>(rng.categorical(std::span<const double>(probs))) + 1;
            org.profile.tiers[d.practice] = tier;
        }
        out.push_back(std::move(org));
    }
    return out;
}

std::vector<OrgProfile> sample_population(const MaturityPrior& prior,
                                          const std::vector<PracticeDifficulty>& difficulties,
                                          std::size_t n, const std::string& id_prefix) {
    std::vector<OrgProfile> out;
    out.reserve(n);
    for (SampledOrg& s : sample_population_detailed(prior, difficulties, n, id_prefix))
        out.push_back(std::move(s.profile));
    return out;
}

std::vector<PracticeDifficulty> load_practice_difficulties(const Json& doc,
                                                           const std::string& where) {
    if (!doc.is_array() || doc.empty())
        throw ParseError(where + ": expected non-empty array of practice difficulties");
    std::vector<PracticeDifficulty> out;
    out.reserve(doc.size());
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const Json& row = doc[i];
        const std::string ctx = where + "[" + std::to_string(i) + "]";
        reject_unknown_keys(row, {"practice", "cost", "complexity"}, ctx);
        PracticeId practice{require(row, "practice", ctx).get<std::string>()};
        const Likert cost = require(row, "cost", ctx).get<int>();
        const Likert complexity = require(row, "complexity", ctx).get<int>();
        if (!likert_valid(cost) || !likert_valid(complexity))
            throw ValidationError(ctx + ": cost/complexity outside {1..5}");
        out.push_back(PracticeDifficulty::from_ordinals(std::move(practice), cost, complexity));
    }
    return out;
}

std::vector<PracticeDifficulty> load_practice_difficulties_file(const std::filesystem::path& path) {
    return load_practice_difficulties(load_json(path), path.string());
}

}  // namespace mitplan
