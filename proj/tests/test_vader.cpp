#include <doctest.h>

#include <cmath>
#include <random>

#include "finsent/errors.hpp"
#include "finsent/rng.hpp"
#include "finsent/text_pipeline.hpp"
#include "finsent/vader.hpp"
#include "vader_fixtures.hpp"
#include "vader_oracle.hpp"

using namespace finsent;

namespace {

lex::ValenceLexicon mini_lexicon() { return testref::fixture_valence_lexicon(); }

vader::RuleData mini_rule_data() { return testref::fixture_rule_data(); }

double score_text(const std::string& raw, const lex::ValenceLexicon& lexicon,
                  const vader::RuleData& data, const vader::RuleConfig& cfg) {
    return vader::score_sentence(text::tokenize(raw), lexicon, data, cfg);
}

}  // namespace

TEST_CASE("default_config carries the canonical constants") {
    const auto cfg = vader::default_config();
    CHECK(cfg.negation_window == 3);
    CHECK(cfg.normalization_alpha == 15.0);
    CHECK(cfg.negation_factor == -0.74);
    CHECK(cfg.booster_increment == 0.293);
    CHECK(cfg.caps_increment == 0.733);
    CHECK(cfg.exclamation_increment_per_mark == 0.292);
    CHECK(cfg.exclamation_cap == 4);
    CHECK(cfg.but_weight_before == 0.5);
    CHECK(cfg.but_weight_after == 1.5);
}

TEST_CASE("the shipped defaults file matches default_config verbatim") {
    const auto from_file = vader::load_rule_config(std::string(FINSENT_DATA_DIR) +
                                                   "/vader_defaults.cfg");
    const auto built_in = vader::default_config();
    CHECK(from_file.negation_window == built_in.negation_window);
    CHECK(from_file.negation_factor == built_in.negation_factor);
    CHECK(from_file.booster_increment == built_in.booster_increment);
    CHECK(from_file.caps_increment == built_in.caps_increment);
    CHECK(from_file.exclamation_increment_per_mark == built_in.exclamation_increment_per_mark);
    CHECK(from_file.exclamation_cap == built_in.exclamation_cap);
    CHECK(from_file.but_weight_before == built_in.but_weight_before);
    CHECK(from_file.but_weight_after == built_in.but_weight_after);
    CHECK(from_file.normalization_alpha == built_in.normalization_alpha);
    CHECK(from_file.enable_boosters == built_in.enable_boosters);
    CHECK(from_file.enable_caps == built_in.enable_caps);
    CHECK(from_file.enable_negation == built_in.enable_negation);
    CHECK(from_file.enable_but == built_in.enable_but);
    CHECK(from_file.enable_exclamation == built_in.enable_exclamation);
}

TEST_CASE("shipped word lists load") {
    const auto negators = vader::load_negators(std::string(FINSENT_DATA_DIR) +
                                               "/vader_negators.txt");
    CHECK(negators.count("not") == 1);
    CHECK(negators.count("never") == 1);
    const auto boosters = vader::load_boosters(std::string(FINSENT_DATA_DIR) +
                                               "/vader_boosters.tsv");
    CHECK(boosters.at("very") == 1.0);
    CHECK(boosters.at("hardly") == -1.0);
}

TEST_CASE("score_sentence spec examples") {
    const auto lexicon = mini_lexicon();
    const auto data = mini_rule_data();
    const auto cfg = vader::default_config();

    CHECK(score_text("", lexicon, data, cfg) == 0.0);
    CHECK(score_text("the market moved", lexicon, data, cfg) == 0.0);

    // Hand trace: good = 1.9, negated -> 1.9 * -0.74 = -1.406,
    // normalized -> -1.406 / sqrt(1.406^2 + 15).
    const double expected = -1.406 / std::sqrt(1.406 * 1.406 + 15.0);
    CHECK(score_text("not good", lexicon, data, cfg) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("25 hand-traced rule fixtures match the independent oracle exactly") {
    const auto lexicon = mini_lexicon();
    const auto data = mini_rule_data();
    const auto cfg = vader::default_config();

    const auto& fixtures = testref::vader_fixture_cases();
    REQUIRE(fixtures.size() == 25);

    for (const auto& [raw, frozen] : fixtures) {
        const auto tokens = text::tokenize(raw);
        const double got = vader::score_sentence(tokens, lexicon, data, cfg);
        const double oracle = testref::vader_oracle(tokens, lexicon, data, cfg);
        CAPTURE(raw);
        CHECK(got == oracle);
        CHECK(got == doctest::Approx(frozen).epsilon(1e-12));
        CHECK(std::fabs(got) <= 1.0);
    }
}

TEST_CASE("each rule is individually toggleable") {
    const auto lexicon = mini_lexicon();
    const auto data = mini_rule_data();
    auto cfg = vader::default_config();

    cfg.enable_negation = false;
    CHECK(score_text("not good", lexicon, data, cfg) ==
          score_text("the good", lexicon, data, cfg));
    cfg = vader::default_config();

    cfg.enable_boosters = false;
    CHECK(score_text("very good", lexicon, data, cfg) ==
          score_text("the good", lexicon, data, cfg));
    cfg = vader::default_config();

    cfg.enable_caps = false;
    CHECK(score_text("GOOD", lexicon, data, cfg) == score_text("good", lexicon, data, cfg));
    cfg = vader::default_config();

    cfg.enable_but = false;
    CHECK(score_text("good but bad", lexicon, data, cfg) ==
          score_text("good the bad", lexicon, data, cfg));
    cfg = vader::default_config();

    cfg.enable_exclamation = false;
    CHECK(score_text("good !", lexicon, data, cfg) ==
          score_text("good", lexicon, data, cfg));
}

TEST_CASE("caps rule is inert without a case mask") {
    const auto lexicon = mini_lexicon();
    const auto data = mini_rule_data();
    const auto cfg = vader::default_config();

    text::TokenSequence no_mask;
    no_mask.tokens = {"good"};
    // all_caps deliberately left empty: mask absent.
    CHECK(vader::score_sentence(no_mask, lexicon, data, cfg) ==
          score_text("good", lexicon, data, cfg));
}

TEST_CASE("randomized properties") {
    const auto data = mini_rule_data();
    const auto cfg = vader::default_config();
    std::mt19937_64 rng(17);

    const std::vector<std::string> pool = {"good", "bad",  "great", "terrible", "gains",
                                           "falls", "very", "hardly", "not",    "never",
                                           "the",  "but",  "!",     "so",       "market"};

    for (int trial = 0; trial < 300; ++trial) {
        // Random sentence over the pool, random lexicon valences.
        lex::ValenceLexicon lexicon;
        for (const char* word : {"good", "bad", "great", "terrible", "gains", "falls"}) {
            lexicon.entries[word] = uniform_range(rng, -4.0, 4.0);
        }
        lex::ValenceLexicon mirrored;
        for (const auto& [tok, v] : lexicon.entries) mirrored.entries[tok] = -v;

        std::string raw;
        const std::size_t len = uniform_index(rng, 10);
        for (std::size_t i = 0; i < len; ++i) {
            if (i) raw += ' ';
            raw += pool[uniform_index(rng, pool.size())];
        }

        const double plain = score_text(raw, lexicon, data, cfg);
        CHECK(plain >= -1.0);
        CHECK(plain <= 1.0);

        // Determinism.
        CHECK(score_text(raw, lexicon, data, cfg) == plain);

        // Antisymmetry under a mirrored lexicon: every rule in this engine
        // is sign-symmetric.
        const double flipped = score_text(raw, mirrored, data, cfg);
        CHECK(flipped == doctest::Approx(-plain).epsilon(1e-12));

        // Agreement with the independent oracle on arbitrary sentences.
        const auto tokens = text::tokenize(raw);
        CHECK(vader::score_sentence(tokens, lexicon, data, cfg) ==
              testref::vader_oracle(tokens, lexicon, data, cfg));
    }
}

TEST_CASE("monotonicity: appending a clean positive token never lowers the score") {
    const auto data = mini_rule_data();
    auto cfg = vader::default_config();
    cfg.enable_exclamation = false;  // raw-score monotonicity, no sign-based amplification
    std::mt19937_64 rng(29);

    lex::ValenceLexicon lexicon = mini_lexicon();
    const std::vector<std::string> pool = {"good", "bad", "terrible", "gains", "falls", "the",
                                           "market"};
    for (int trial = 0; trial < 200; ++trial) {
        std::string raw;
        const std::size_t len = uniform_index(rng, 8);
        for (std::size_t i = 0; i < len; ++i) {
            if (i) raw += ' ';
            raw += pool[uniform_index(rng, pool.size())];
        }
        // Separate the new token from negators/boosters/but with neutral
        // filler so no rule interacts with it.
        const std::string extended = raw.empty() ? "the the the great"
                                                 : raw + " the the the great";
        CHECK(score_text(extended, lexicon, data, cfg) >=
              score_text(raw, lexicon, data, cfg));
    }
}

TEST_CASE("breakdown is consistent with the compound score") {
    const auto lexicon = mini_lexicon();
    const auto data = mini_rule_data();
    const auto cfg = vader::default_config();

    const auto tokens = text::tokenize("good but terrible market !");
    const auto b = vader::score_breakdown(tokens, lexicon, data, cfg);
    CHECK(b.compound == vader::score_sentence(tokens, lexicon, data, cfg));
    CHECK(b.positive + b.negative + b.neutral == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(b.positive > 0.0);
    CHECK(b.negative > 0.0);
}

TEST_CASE("rule config validation and file errors") {
    auto cfg = vader::default_config();
    cfg.negation_window = 0;
    CHECK_THROWS_AS(cfg.validate(), validation_error);

    cfg = vader::default_config();
    cfg.normalization_alpha = 0.0;
    CHECK_THROWS_AS(cfg.validate(), validation_error);

    CHECK_THROWS_AS(vader::load_rule_config("/nonexistent/rules.cfg"), validation_error);
    CHECK_THROWS_AS(vader::load_negators("/nonexistent/negators.txt"), validation_error);
}

TEST_CASE("but clause only: "
          "valences before the first but are dampened, after are amplified") {
    const auto lexicon = mini_lexicon();
    const auto data = mini_rule_data();
    auto cfg = vader::default_config();

    // good*0.5 + bad*1.5 vs plain sum; with defaults the flip dominates.
    const double with_but = score_text("good but bad", lexicon, data, cfg);
    const double without = score_text("good the bad", lexicon, data, cfg);
    CHECK(with_but < without);
}
