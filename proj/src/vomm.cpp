#include "mitplan/vomm.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "mitplan/errors.hpp"

namespace mitplan {

VommModel VommModel::fit(const std::vector<WeightedSequence>& corpus, int max_order, double alpha,
                         double min_support, const std::vector<TechniqueToken>& extra_vocab) {
    if (corpus.empty()) throw ConfigError("VommModel::fit: empty corpus");
    if (max_order < 1) throw ConfigError("VommModel::fit: max_order must be >= 1");
    if (alpha <= 0.0) throw ConfigError("VommModel::fit: alpha must be > 0");
    if (min_support < 0.0) throw ConfigError("VommModel::fit: min_support must be >= 0");

    VommModel m;
    m.max_order_ = max_order;
    m.alpha_ = alpha;
    m.min_support_ = min_support;

    std::set<TechniqueToken> vocab(extra_vocab.begin(), extra_vocab.end());
    for (const WeightedSequence& seq : corpus)
        vocab.insert(seq.tokens.begin(), seq.tokens.end());
    m.vocab_.assign(vocab.begin(), vocab.end());

    for (const WeightedSequence& seq : corpus) {
        const auto& x = seq.tokens;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const std::size_t max_k = std::min<std::size_t>(max_order, i);
            for (std::size_t k = 1; k <= max_k; ++k) {
                Context c(x.begin() + (i - k), x.begin() + i);
                m.counts_[c][x[i]] += seq.weight;
                m.totals_[c] += seq.weight;
            }
        }
    }
    return m;
}

std::optional<std::size_t> VommModel::token_index(const TechniqueToken& t) const {
    auto it = std::lower_bound(vocab_.begin(), vocab_.end(), t);
    if (it == vocab_.end() || *it != t) return std::nullopt;
    return static_cast<std::size_t>(it - vocab_.begin());
}

std::size_t VommModel::effective_context_length(const Context& history) const {
    const std::size_t longest = std::min<std::size_t>(max_order_, history.size());
    for (std::size_t len = longest; len >= 1; --len) {
        Context c(history.end() - len, history.end());
        auto it = totals_.find(c);
        if (it != totals_.end() && it->second >= min_support_) return len;
    }
    return 0;
}

std::vector<double> VommModel::next_distribution(const Context& history) const {
    const std::size_t v = vocab_.size();
    std::vector<double> p(v, 0.0);

    const std::size_t len = effective_context_length(history);
    if (len == 0) {
        std::fill(p.begin(), p.end(), 1.0 / static_cast<double>(v));
        return p;
    }

    Context c(history.end() - len, history.end());
    const double total = totals_.at(c);
    const double denom = total + alpha_ * static_cast<double>(v);
    const auto& row = counts_.at(c);
    for (std::size_t i = 0; i < v; ++i) {
        auto it = row.find(vocab_[i]);
        const double count = (it == row.end()) ? 0.0 : it->second;
        p[i] = (count + alpha_) / denom;
    }
    return p;
}

TechniqueToken VommModel::sample_next(const Context& history, Rng& rng) const {
    const std::vector<double> p = next_distribution(history);
    return vocab_[rng.categorical(p)];
}

double VommModel::sequence_loglik(const std::vector<TechniqueToken>& sequence) const {
    if (sequence.empty()) throw DomainError("sequence_loglik: empty sequence");
    double ll = 0.0;
    Context prefix;
    for (const TechniqueToken& t : sequence) {
        const auto idx = token_index(t);
        if (!idx) throw DomainError("sequence_loglik: token " + t.render() + " not in vocab");
        ll += std::log(next_distribution(prefix)[*idx]);
        prefix.push_back(t);
    }
    return ll;
}

double VommModel::context_total(const Context& c) const {
    auto it = totals_.find(c);
    return it == totals_.end() ? 0.0 : it->second;
}

double VommModel::count(const Context& c, const TechniqueToken& a) const {
    auto it = counts_.find(c);
    if (it == counts_.end()) return 0.0;
    auto jt = it->second.find(a);
    return jt == it->second.end() ? 0.0 : jt->second;
}

Json VommModel::to_json() const {
    Json vocab = Json::array();
    for (const TechniqueToken& t : vocab_) vocab.push_back(t.render());
    Json contexts = Json::array();
    for (const auto& [c, row] : counts_) {
        Json ctx = Json::array();
        for (const TechniqueToken& t : c) ctx.push_back(t.render());
        Json counts = Json::object();
        for (const auto& [t, w] : row) counts[t.render()] = w;
        contexts.push_back(Json{{"context", std::move(ctx)}, {"counts", std::move(counts)}});
    }
    return Json{{"format", "mitplan-vomm"}, {"version", 1},
                {"max_order", max_order_},  {"alpha", alpha_},
                {"min_support", min_support_}, {"vocab", std::move(vocab)},
                {"contexts", std::move(contexts)}};
}

VommModel VommModel::from_json(const Json& doc) {
    const std::string where = "vomm model";
    if (require(doc, "format", where).get<std::string>() != "mitplan-vomm")
        throw ParseError(where + ": not a vomm model document");
    if (require(doc, "version", where).get<int>() != 1)
        throw ParseError(where + ": unsupported version");

    VommModel m;
    m.max_order_ = require(doc, "max_order", where).get<int>();
    m.alpha_ = require(doc, "alpha", where).get<double>();
    m.min_support_ = require(doc, "min_support", where).get<double>();
    for (const Json& t : require(doc, "vocab", where))
        m.vocab_.push_back(TechniqueToken::parse(t.get<std::string>()));
    if (!std::is_sorted(m.vocab_.begin(), m.vocab_.end()))
        throw ValidationError(where + ": vocab not in canonical order");
    for (const Json& cj : require(doc, "contexts", where)) {
        Context c;
        for (const Json& t : require(cj, "context", where))
            c.push_back(TechniqueToken::parse(t.get<std::string>()));
        const Json& counts = require(cj, "counts", where);
        double total = 0.0;
        for (auto it = counts.begin(); it != counts.end(); ++it) {
            const double w = it.value().get<double>();
            m.counts_[c][TechniqueToken::parse(it.key())] = w;
            total += w;
        }
        m.totals_[c] = total;
    }
    return m;
}

void VommModel::save(const std::filesystem::path& path) const { save_json(path, to_json()); }

VommModel VommModel::load(const std::filesystem::path& path) {
    return from_json(load_json(path));
}

}  // namespace mitplan
