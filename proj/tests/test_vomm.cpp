#include <doctest.h>

#include <cmath>
#include <map>

#include "mitplan/errors.hpp"
#include "mitplan/vomm.hpp"

using namespace mitplan;

namespace {

TechniqueToken tok(const std::string& s) { return TechniqueToken::parse(s); }

WeightedSequence seq(const std::vector<std::string>& tokens, double weight,
                     const std::string& bundle = "b") {
    WeightedSequence s;
    for (const auto& t : tokens) s.tokens.push_back(tok(t));
    s.weight = weight;
    s.bundle_id = bundle;
    return s;
}

// Independent weighted n-gram tally: for every position and context length,
// add the sequence weight. Kept deliberately naive.
std::map<std::pair<std::vector<std::string>, std::string>, double> ngram_oracle(
    const std::vector<WeightedSequence>& corpus, int max_k) {
    std::map<std::pair<std::vector<std::string>, std::string>, double> counts;
    for (const auto& s : corpus) {
        for (std::size_t i = 0; i < s.tokens.size(); ++i) {
            for (int k = 1; k <= max_k && static_cast<std::size_t>(k) <= i; ++k) {
                std::vector<std::string> ctx;
                for (std::size_t j = i - static_cast<std::size_t>(k); j < i; ++j)
                    ctx.push_back(s.tokens[j].render());
                counts[{ctx, s.tokens[i].render()}] += s.weight;
            }
        }
    }
    return counts;
}

}  // namespace

TEST_CASE("fit counts a single sequence as expected") {
    const auto model = VommModel::fit(
        {seq({"TA0001:T1190", "TA0002:T1059", "TA0040:T1486"}, 1.0)}, 2);
    const VommModel::Context a{tok("TA0001:T1190")};
    const VommModel::Context b{tok("TA0002:T1059")};
    const VommModel::Context ab{tok("TA0001:T1190"), tok("TA0002:T1059")};
    CHECK(model.count(a, tok("TA0002:T1059")) == doctest::Approx(1.0));
    CHECK(model.count(b, tok("TA0040:T1486")) == doctest::Approx(1.0));
    CHECK(model.count(ab, tok("TA0040:T1486")) == doctest::Approx(1.0));
    CHECK(model.context_total(ab) == doctest::Approx(1.0));
}

TEST_CASE("counts scale linearly with sequence weight") {
    const auto model = VommModel::fit(
        {seq({"TA0001:T1190", "TA0002:T1059", "TA0040:T1486"}, 0.25)}, 2);
    CHECK(model.count({tok("TA0001:T1190")}, tok("TA0002:T1059")) == doctest::Approx(0.25));
    CHECK(model.count({tok("TA0001:T1190"), tok("TA0002:T1059")}, tok("TA0040:T1486")) ==
          doctest::Approx(0.25));
}

TEST_CASE("fit matches the brute-force weighted n-gram oracle") {
    const std::vector<WeightedSequence> corpus{
        seq({"TA0001:T1190", "TA0002:T1059", "TA0006:T1110", "TA0040:T1486"}, 0.6, "b1"),
        seq({"TA0001:T1190", "TA0002:T1059", "TA0040:T1490"}, 0.4, "b1"),
        seq({"TA0001:T1566.001", "TA0002:T1059", "TA0006:T1110"}, 1.0, "b2"),
    };
    const int k = 3;
    const auto model = VommModel::fit(corpus, k);
    const auto oracle = ngram_oracle(corpus, k);
    for (const auto& [key, want] : oracle) {
        VommModel::Context ctx;
        for (const auto& t : key.first) ctx.push_back(tok(t));
        CHECK(model.count(ctx, tok(key.second)) == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("duplicating a bundle doubles its transition counts") {
    const std::vector<WeightedSequence> once{
        seq({"TA0001:T1190", "TA0002:T1059"}, 1.0, "dup")};
    std::vector<WeightedSequence> twice = once;
    twice.push_back(once[0]);
    const auto m1 = VommModel::fit(once, 2);
    const auto m2 = VommModel::fit(twice, 2);
    CHECK(m2.count({tok("TA0001:T1190")}, tok("TA0002:T1059")) ==
          doctest::Approx(2.0 * m1.count({tok("TA0001:T1190")}, tok("TA0002:T1059"))));
}

TEST_CASE("worked transition example: 5/205 and 1/205") {
    // Context (T1190, T1136.001) followed by T1059 four times and T1047 once,
    // with enough filler tokens to make |V| = 200.
    std::vector<WeightedSequence> corpus;
    for (int i = 0; i < 4; ++i)
        corpus.push_back(seq({"TA0001:T1190", "TA0006:T1136.001", "TA0003:T1059"}, 1.0));
    corpus.push_back(seq({"TA0001:T1190", "TA0006:T1136.001", "TA0005:T1047"}, 1.0));

    std::vector<TechniqueToken> filler;
    for (int i = 0; i < 196; ++i) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "T%04d", 2000 + i);
        filler.push_back(TechniqueToken{"TA0007", buf});
    }
    const auto model = VommModel::fit(corpus, 2, 1.0, 1.0, filler);
    REQUIRE(model.vocab_size() == 200);

    const VommModel::Context ctx{tok("TA0001:T1190"), tok("TA0006:T1136.001")};
    const auto dist = model.next_distribution(ctx);
    CHECK(dist[*model.token_index(tok("TA0003:T1059"))] == 5.0 / 205.0);
    CHECK(dist[*model.token_index(tok("TA0005:T1047"))] == 2.0 / 205.0);
    CHECK(dist[*model.token_index(filler[0])] == 1.0 / 205.0);
}

TEST_CASE("unseen history backs off to uniform") {
    const auto model = VommModel::fit(
        {seq({"TA0001:T1190", "TA0002:T1059", "TA0040:T1486"}, 1.0)}, 3);
    const auto dist = model.next_distribution({tok("TA0008:T1021.001")});
    for (double p : dist) CHECK(p == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(model.effective_context_length({tok("TA0008:T1021.001")}) == 0);
}

TEST_CASE("back-off picks the longest supported suffix exactly") {
    // Order-2 context exists but with total weight below min_support; the
    // order-1 suffix is well supported.
    std::vector<WeightedSequence> corpus{
        seq({"TA0001:T1190", "TA0002:T1059", "TA0040:T1486"}, 0.3, "weak"),
        seq({"TA0002:T1059", "TA0040:T1490"}, 1.0, "strong"),
        seq({"TA0002:T1059", "TA0040:T1490"}, 1.0, "strong2"),
    };
    const auto model = VommModel::fit(corpus, 2, 1.0, 0.5);
    const VommModel::Context history{tok("TA0001:T1190"), tok("TA0002:T1059")};
    // order-2 context (T1190, T1059) has weight 0.3 < 0.5 -> back off to (T1059)
    CHECK(model.effective_context_length(history) == 1);

    const auto dist = model.next_distribution(history);
    const double v = static_cast<double>(model.vocab_size());
    const double total = model.context_total({tok("TA0002:T1059")});
    CHECK(total == doctest::Approx(2.3));
    const double expect_1490 = (2.0 + 1.0) / (total + v);
    CHECK(dist[*model.token_index(tok("TA0040:T1490"))] ==
          doctest::Approx(expect_1490).epsilon(1e-12));
}

TEST_CASE("longest supported context is used without blending") {
    std::vector<WeightedSequence> corpus{
        seq({"TA0001:T1190", "TA0002:T1059", "TA0040:T1486"}, 2.0, "b1"),
        seq({"TA0002:T1059", "TA0040:T1490"}, 5.0, "b2"),
    };
    const auto model = VommModel::fit(corpus, 2, 1.0, 1.0);
    const VommModel::Context history{tok("TA0001:T1190"), tok("TA0002:T1059")};
    CHECK(model.effective_context_length(history) == 2);
    // Distribution must equal the order-2 formula only: count 2 of T1486 there.
    const auto dist = model.next_distribution(history);
    const double v = static_cast<double>(model.vocab_size());
    CHECK(dist[*model.token_index(tok("TA0040:T1486"))] ==
          doctest::Approx((2.0 + 1.0) / (2.0 + v)).epsilon(1e-12));
    CHECK(dist[*model.token_index(tok("TA0040:T1490"))] ==
          doctest::Approx(1.0 / (2.0 + v)).epsilon(1e-12));
}

TEST_CASE("distributions sum to one with all-positive mass") {
    FlowWarnings w;
    const auto corpus = load_corpus_dir(MITPLAN_DATA_DIR "/flows", w);
    const auto model = VommModel::fit(corpus, 3);
    std::vector<VommModel::Context> histories{
        {},
        {tok("TA0001:T1190")},
        {tok("TA0001:T1566.001"), tok("TA0002:T1059.001")},
        {tok("TA0007:T1083")},
        {tok("TA0004:T1068"), tok("TA0005:T1070.004"), tok("TA0008:T1021.002")},
    };
    for (const auto& h : histories) {
        const auto dist = model.next_distribution(h);
        double sum = 0.0;
        for (double p : dist) {
            CHECK(p > 0.0);
            sum += p;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("giant alpha washes the distribution toward uniform") {
    FlowWarnings w;
    const auto corpus = load_corpus_dir(MITPLAN_DATA_DIR "/flows", w);
    const auto sharp = VommModel::fit(corpus, 3, 1.0);
    const auto flat = VommModel::fit(corpus, 3, 1e6);
    const VommModel::Context h{tok("TA0001:T1566.001")};
    const auto ps = sharp.next_distribution(h);
    const auto pf = flat.next_distribution(h);
    const double uniform = 1.0 / static_cast<double>(flat.vocab_size());
    for (double p : pf) CHECK(p == doctest::Approx(uniform).epsilon(1e-3));
    // The sharp model must deviate from uniform somewhere.
    double max_dev = 0.0;
    for (double p : ps) max_dev = std::max(max_dev, std::abs(p - uniform));
    CHECK(max_dev > 1e-3);
}

TEST_CASE("sampling matches the smoothed distribution empirically") {
    std::vector<WeightedSequence> corpus;
    for (int i = 0; i < 4; ++i)
        corpus.push_back(seq({"TA0001:T1190", "TA0006:T1136.001", "TA0003:T1059"}, 1.0));
    corpus.push_back(seq({"TA0001:T1190", "TA0006:T1136.001", "TA0005:T1047"}, 1.0));
    std::vector<TechniqueToken> filler;
    for (int i = 0; i < 196; ++i) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "T%04d", 2000 + i);
        filler.push_back(TechniqueToken{"TA0007", buf});
    }
    const auto model = VommModel::fit(corpus, 2, 1.0, 1.0, filler);
    const VommModel::Context ctx{tok("TA0001:T1190"), tok("TA0006:T1136.001")};

    Rng rng(17);
    int hits = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i)
        if (model.sample_next(ctx, rng) == tok("TA0003:T1059")) ++hits;
    CHECK(std::abs(hits / double(n) - 5.0 / 205.0) < 0.005);
}

TEST_CASE("uniform base case sampling is near 1/V for small vocab") {
    std::vector<WeightedSequence> corpus{seq({"TA0001:T1190"}, 1.0)};
    std::vector<TechniqueToken> filler;
    for (int i = 0; i < 9; ++i) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "T%04d", 3000 + i);
        filler.push_back(TechniqueToken{"TA0009", buf});
    }
    const auto model = VommModel::fit(corpus, 2, 1.0, 1.0, filler);
    REQUIRE(model.vocab_size() == 10);
    Rng rng(23);
    std::vector<int> counts(10, 0);
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const auto t = model.sample_next({}, rng);
        ++counts[*model.token_index(t)];
    }
    for (int c : counts) CHECK(std::abs(c / double(n) - 0.1) < 0.01);
}

TEST_CASE("fixed seed reproduces the sampled trajectory") {
    FlowWarnings w;
    const auto corpus = load_corpus_dir(MITPLAN_DATA_DIR "/flows", w);
    const auto model = VommModel::fit(corpus, 3);
    Rng a(5), b(5);
    VommModel::Context ha, hb;
    for (int i = 0; i < 50; ++i) {
        const auto ta = model.sample_next(ha, a);
        const auto tb = model.sample_next(hb, b);
        CHECK(ta == tb);
        ha.push_back(ta);
        hb.push_back(tb);
    }
}

TEST_CASE("sequence loglik basics") {
    std::vector<WeightedSequence> corpus{
        seq({"TA0001:T1190", "TA0002:T1059", "TA0040:T1486"}, 1.0)};
    const auto model = VommModel::fit(corpus, 2);

    // length-1 sequence: empty context, uniform
    CHECK(model.sequence_loglik({tok("TA0001:T1190")}) ==
          doctest::Approx(std::log(1.0 / 3.0)).epsilon(1e-12));

    // chain rule additivity
    const std::vector<TechniqueToken> s1{tok("TA0001:T1190")};
    const std::vector<TechniqueToken> s12{tok("TA0001:T1190"), tok("TA0002:T1059")};
    CHECK(model.sequence_loglik(s12) - model.sequence_loglik(s1) ==
          doctest::Approx(std::log(model.next_distribution(s1)[*model.token_index(
              tok("TA0002:T1059"))])).epsilon(1e-12));
}

TEST_CASE("loglik matches the direct product oracle on a 5-step sequence") {
    FlowWarnings w;
    const auto corpus = load_corpus_dir(MITPLAN_DATA_DIR "/flows", w);
    const auto model = VommModel::fit(corpus, 3);
    const std::vector<TechniqueToken> s{
        tok("TA0001:T1566.001"), tok("TA0002:T1059.001"), tok("TA0003:T1547.001"),
        tok("TA0006:T1110"), tok("TA0008:T1021.001")};
    double product = 1.0;
    VommModel::Context prefix;
    for (const auto& t : s) {
        product *= model.next_distribution(prefix)[*model.token_index(t)];
        prefix.push_back(t);
    }
    CHECK(model.sequence_loglik(s) == doctest::Approx(std::log(product)).epsilon(1e-9));
    CHECK(model.sequence_loglik(s) <= 0.0);
}

TEST_CASE("serialization round-trips the distributions") {
    FlowWarnings w;
    const auto corpus = load_corpus_dir(MITPLAN_DATA_DIR "/flows", w);
    const auto model = VommModel::fit(corpus, 3);
    const auto tmp = std::filesystem::temp_directory_path() / "mitplan_vomm_test.json";
    model.save(tmp);
    const auto back = VommModel::load(tmp);
    CHECK(back.vocab() == model.vocab());
    const VommModel::Context h{tok("TA0001:T1566.001"), tok("TA0002:T1059.001")};
    CHECK(back.next_distribution(h) == model.next_distribution(h));
    CHECK(back.next_distribution({}) == model.next_distribution({}));
    std::filesystem::remove(tmp);
}

TEST_CASE("fit rejects zero order") {
    CHECK_THROWS_AS(VommModel::fit({seq({"TA0001:T1190"}, 1.0)}, 0), ConfigError);
}
