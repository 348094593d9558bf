#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <vector>

#include "mitplan/flow.hpp"
#include "mitplan/jsonio.hpp"
#include "mitplan/rng.hpp"
#include "mitplan/types.hpp"

namespace mitplan {

// Variable-order Markov model over technique tokens: weighted context counts
// up to order K, add-alpha smoothing, hard back-off to the longest context
// whose total weighted count meets min_support, uniform at the empty context.
//
// Immutable once fitted; sampling takes a caller-owned Rng.
class VommModel {
public:
    using Context = std::vector<TechniqueToken>;

    VommModel() = default;  // unfitted; fit() or from_json() produce usable models

    // Accumulates, for every sequence position and every suffix context of
    // length 1..K, the sequence weight onto (context, next-token). Vocab is
    // closed here: corpus tokens plus `extra_vocab` (techniques declared only
    // in adversary profiles), sorted canonically.
    static VommModel fit(const std::vector<WeightedSequence>& corpus, int max_order = 3,
                         double alpha = 1.0, double min_support = 1.0,
                         const std::vector<TechniqueToken>& extra_vocab = {});

    // Smoothed next-token distribution given a history, aligned with vocab():
    // p(a|c) = (C(c,a) + alpha) / (C(c) + alpha*|V|) for the longest
    // supported suffix c; uniform 1/|V| when nothing is supported.
    std::vector<double> next_distribution(const Context& history) const;

    // Inverse-CDF draw from next_distribution in canonical vocab order.
    TechniqueToken sample_next(const Context& history, Rng& rng) const;

    // Sum of log next-step probabilities along the sequence; always <= 0.
    double sequence_loglik(const std::vector<TechniqueToken>& sequence) const;

    const std::vector<TechniqueToken>& vocab() const { return vocab_; }
    std::size_t vocab_size() const { return vocab_.size(); }
    std::optional<std::size_t> token_index(const TechniqueToken& t) const;

    int max_order() const { return max_order_; }
    double alpha() const { return alpha_; }
    double min_support() const { return min_support_; }

    // Length of the context next_distribution would actually use (0 = uniform).
    std::size_t effective_context_length(const Context& history) const;

    double context_total(const Context& c) const;
    double count(const Context& c, const TechniqueToken& a) const;

    Json to_json() const;
    static VommModel from_json(const Json& doc);
    void save(const std::filesystem::path& path) const;
    static VommModel load(const std::filesystem::path& path);

private:
    int max_order_ = 3;
    double alpha_ = 1.0;
    double min_support_ = 1.0;
    std::vector<TechniqueToken> vocab_;  // sorted
    std::map<Context, std::map<TechniqueToken, double>> counts_;
    std::map<Context, double> totals_;
};

}  // namespace mitplan
