#pragma once

#include <string>
#include <unordered_map>
#include <unordered_set>

#include "finsent/lexicon.hpp"
#include "finsent/text_pipeline.hpp"

namespace finsent::vader {

// Constants of the rule engine. The shipped defaults file records the
// canonical published heuristic constants verbatim; every rule can be
// toggled independently.
struct RuleConfig {
    int negation_window = 3;        // tokens scanned backwards for negators/modifiers
    double negation_factor = -0.74;
    double booster_increment = 0.293;
    double caps_increment = 0.733;
    double exclamation_increment_per_mark = 0.292;
    int exclamation_cap = 4;
    double but_weight_before = 0.5;
    double but_weight_after = 1.5;
    double normalization_alpha = 15.0;

    bool enable_boosters = true;
    bool enable_caps = true;
    bool enable_negation = true;
    bool enable_but = true;
    bool enable_exclamation = true;

    void validate() const;
};

// Canonical defaults, identical to data/vader_defaults.cfg.
RuleConfig default_config();

// key=value file, one constant per line, '#' comments allowed. Unknown keys
// are rejected. Keys not present keep their defaults.
RuleConfig load_rule_config(const std::string& path);

// Negator and booster word lists ship as data files, not code constants.
struct RuleData {
    std::unordered_set<std::string> negators;
    // token -> signed unit weight (+1 intensifier, -1 dampener); the
    // effective adjustment is weight * booster_increment.
    std::unordered_map<std::string, double> boosters;
    std::uint64_t negators_hash = 0;
    std::uint64_t boosters_hash = 0;
};

// One token per line.
std::unordered_set<std::string> load_negators(const std::string& path);
// TSV `token<TAB>weight`.
std::unordered_map<std::string, double> load_boosters(const std::string& path);
RuleData load_rule_data(const std::string& negators_path, const std::string& boosters_path);

// Sentence valence in [-1, 1]. For each token carrying a lexicon valence v
// the rules apply in order:
//   1. degree modifiers: every booster token within the preceding
//      negation_window tokens adds weight * booster_increment * sign(v);
//   2. ALL-CAPS emphasis: if the token's pre-lowercasing form was all caps
//      (per tokens.all_caps; inert when the mask is absent), add
//      caps_increment * sign(v) using the sign after step 1;
//   3. negation: if any negator occurs within the preceding
//      negation_window tokens, multiply once by negation_factor.
// Booster tokens themselves never carry valence. After the per-token pass,
// valences before the first "but" are scaled by but_weight_before and those
// after it by but_weight_after. The adjusted valences sum to the raw score
// S; "!" tokens (capped at exclamation_cap) add
// exclamation_increment_per_mark each, away from zero. The result is
// S / sqrt(S^2 + normalization_alpha); empty or fully-neutral input returns
// exactly 0.
double score_sentence(const text::TokenSequence& tokens, const lex::ValenceLexicon& lexicon,
                      const RuleData& data, const RuleConfig& config);

// Experimental 3-component breakdown (proportion of positive / negative /
// neutral mass plus the normalized compound score). The network consumes
// the scalar compound score; the breakdown is exposed for analysis only.
struct Breakdown {
    double positive = 0.0;
    double negative = 0.0;
    double neutral = 0.0;
    double compound = 0.0;
};
Breakdown score_breakdown(const text::TokenSequence& tokens, const lex::ValenceLexicon& lexicon,
                          const RuleData& data, const RuleConfig& config);

// Bundles lexicon, word lists and constants for repeated scoring.
class Scorer {
public:
    Scorer(lex::ValenceLexicon lexicon, RuleData data, RuleConfig config);

    double score(const text::TokenSequence& tokens) const;
    Breakdown breakdown(const text::TokenSequence& tokens) const;

    const RuleConfig& config() const { return config_; }
    const lex::ValenceLexicon& lexicon() const { return lexicon_; }
    const RuleData& data() const { return data_; }

private:
    lex::ValenceLexicon lexicon_;
    RuleData data_;
    RuleConfig config_;
};

}  // namespace finsent::vader
