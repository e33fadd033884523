#include "finsent/vader.hpp"

#include <cmath>
#include <fstream>

#include "finsent/errors.hpp"
#include "finsent/util.hpp"

namespace finsent::vader {

namespace {

double sign_of(double v) {
    if (v > 0.0) return 1.0;
    if (v < 0.0) return -1.0;
    return 0.0;
}

std::string strip_cr(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

// Per-token adjusted valences, aligned with the token list (0 for tokens
// without a lexicon entry). Shared by score and breakdown.
std::vector<double> adjusted_valences(const text::TokenSequence& tokens,
                                      const lex::ValenceLexicon& lexicon, const RuleData& data,
                                      const RuleConfig& config) {
    const std::size_t n = tokens.size();
    const bool have_caps = tokens.all_caps.size() == n;
    std::vector<double> sentiments(n, 0.0);

    for (std::size_t i = 0; i < n; ++i) {
        const std::string& tok = tokens.tokens[i];
        if (data.boosters.count(tok)) continue;  // modifiers never carry valence
        const auto hit = lexicon.find(tok);
        if (!hit) continue;
        double v = *hit;

        const std::size_t window_start =
            i >= static_cast<std::size_t>(config.negation_window)
                ? i - static_cast<std::size_t>(config.negation_window)
                : 0;

        if (config.enable_boosters) {
            for (std::size_t j = window_start; j < i; ++j) {
                const auto booster = data.boosters.find(tokens.tokens[j]);
                if (booster != data.boosters.end()) {
                    v += booster->second * config.booster_increment * sign_of(v);
                }
            }
        }
        if (config.enable_caps && have_caps && tokens.all_caps[i]) {
            v += config.caps_increment * sign_of(v);
        }
        if (config.enable_negation) {
            for (std::size_t j = window_start; j < i; ++j) {
                if (data.negators.count(tokens.tokens[j])) {
                    v *= config.negation_factor;
                    break;  // at most one flip
                }
            }
        }
        sentiments[i] = v;
    }

    if (config.enable_but) {
        for (std::size_t b = 0; b < n; ++b) {
            if (tokens.tokens[b] == "but") {
                for (std::size_t i = 0; i < n; ++i) {
                    if (i < b) sentiments[i] *= config.but_weight_before;
                    else if (i > b) sentiments[i] *= config.but_weight_after;
                }
                break;  // first "but" only
            }
        }
    }
    return sentiments;
}

double raw_score(const std::vector<double>& sentiments, const text::TokenSequence& tokens,
                 const RuleConfig& config) {
    double s = 0.0;
    for (const double v : sentiments) s += v;

    if (config.enable_exclamation) {
        int marks = 0;
        for (const std::string& tok : tokens.tokens) {
            if (tok == "!") ++marks;
        }
        marks = std::min(marks, config.exclamation_cap);
        const double amp = marks * config.exclamation_increment_per_mark;
        if (s > 0.0) s += amp;
        else if (s < 0.0) s -= amp;
    }
    return s;
}

double normalize(double s, double alpha) {
    if (s == 0.0) return 0.0;
    return s / std::sqrt(s * s + alpha);
}

}  // namespace

void RuleConfig::validate() const {
    if (negation_window < 1) {
        throw validation_error("rule config: negation_window must be >= 1");
    }
    if (!(normalization_alpha > 0.0)) {
        throw validation_error("rule config: normalization_alpha must be > 0");
    }
    for (const double v : {negation_factor, booster_increment, caps_increment,
                           exclamation_increment_per_mark, but_weight_before, but_weight_after,
                           normalization_alpha}) {
        if (!std::isfinite(v)) {
            throw validation_error("rule config: constants must be finite");
        }
    }
    if (exclamation_cap < 0) {
        throw validation_error("rule config: exclamation_cap must be >= 0");
    }
}

RuleConfig default_config() {
    return RuleConfig{};
}

RuleConfig load_rule_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw validation_error("rule config: cannot open " + path);
    }
    RuleConfig cfg;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty() || line[0] == '#') continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw validation_error("rule config: line " + std::to_string(line_no) +
                                   " is not key=value (" + path + ")");
        }
        const std::string key = line.substr(0, eq);
        const std::string value = line.substr(eq + 1);
        const auto num = util::parse_double(value);
        const auto want_number = [&]() -> double {
            if (!num) {
                throw validation_error("rule config: non-numeric value for '" + key +
                                       "' on line " + std::to_string(line_no));
            }
            return *num;
        };
        const auto want_bool = [&]() -> bool {
            if (value == "true" || value == "1") return true;
            if (value == "false" || value == "0") return false;
            throw validation_error("rule config: non-boolean value for '" + key +
                                   "' on line " + std::to_string(line_no));
        };

        if (key == "negation_window") cfg.negation_window = static_cast<int>(want_number());
        else if (key == "negation_factor") cfg.negation_factor = want_number();
        else if (key == "booster_increment") cfg.booster_increment = want_number();
        else if (key == "caps_increment") cfg.caps_increment = want_number();
        else if (key == "exclamation_increment_per_mark") cfg.exclamation_increment_per_mark = want_number();
        else if (key == "exclamation_cap") cfg.exclamation_cap = static_cast<int>(want_number());
        else if (key == "but_weight_before") cfg.but_weight_before = want_number();
        else if (key == "but_weight_after") cfg.but_weight_after = want_number();
        else if (key == "normalization_alpha") cfg.normalization_alpha = want_number();
        else if (key == "enable_boosters") cfg.enable_boosters = want_bool();
        else if (key == "enable_caps") cfg.enable_caps = want_bool();
        else if (key == "enable_negation") cfg.enable_negation = want_bool();
        else if (key == "enable_but") cfg.enable_but = want_bool();
        else if (key == "enable_exclamation") cfg.enable_exclamation = want_bool();
        else {
            throw validation_error("rule config: unknown key '" + key + "' on line " +
                                   std::to_string(line_no) + " (" + path + ")");
        }
    }
    cfg.validate();
    return cfg;
}

std::unordered_set<std::string> load_negators(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw validation_error("negator list: cannot open " + path);
    }
    std::unordered_set<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        line = strip_cr(line);
        if (line.empty() || line[0] == '#') continue;
        out.insert(line);
    }
    return out;
}

std::unordered_map<std::string, double> load_boosters(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw validation_error("booster list: cannot open " + path);
    }
    std::unordered_map<std::string, double> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty() || line[0] == '#') continue;
        const auto fields = util::split(line, '\t');
        if (fields.size() < 2) {
            throw validation_error("booster list: line " + std::to_string(line_no) +
                                   " needs token<TAB>weight (" + path + ")");
        }
        const auto w = util::parse_double(fields[1]);
        if (!w) {
            throw validation_error("booster list: non-numeric weight on line " +
                                   std::to_string(line_no) + " in " + path);
        }
        out[fields[0]] = *w;
    }
    return out;
}

RuleData load_rule_data(const std::string& negators_path, const std::string& boosters_path) {
    RuleData data;
    data.negators = load_negators(negators_path);
    data.boosters = load_boosters(boosters_path);
    data.negators_hash = util::file_fnv1a(negators_path);
    data.boosters_hash = util::file_fnv1a(boosters_path);
    return data;
}

double score_sentence(const text::TokenSequence& tokens, const lex::ValenceLexicon& lexicon,
                      const RuleData& data, const RuleConfig& config) {
    config.validate();
    if (tokens.size() == 0) return 0.0;
    const auto sentiments = adjusted_valences(tokens, lexicon, data, config);
    return normalize(raw_score(sentiments, tokens, config), config.normalization_alpha);
}

Breakdown score_breakdown(const text::TokenSequence& tokens, const lex::ValenceLexicon& lexicon,
                          const RuleData& data, const RuleConfig& config) {
    config.validate();
    Breakdown b;
    if (tokens.size() == 0) return b;

    const auto sentiments = adjusted_valences(tokens, lexicon, data, config);
    b.compound = normalize(raw_score(sentiments, tokens, config), config.normalization_alpha);

    double pos = 0.0, neg = 0.0;
    std::size_t neutral = 0;
    for (const double s : sentiments) {
        if (s > 0.0) pos += s + 1.0;
        else if (s < 0.0) neg += s - 1.0;
        else ++neutral;
    }
    const double total = pos + std::fabs(neg) + static_cast<double>(neutral);
    if (total > 0.0) {
        b.positive = pos / total;
        b.negative = std::fabs(neg) / total;
        b.neutral = static_cast<double>(neutral) / total;
    }
    return b;
}

Scorer::Scorer(lex::ValenceLexicon lexicon, RuleData data, RuleConfig config)
    : lexicon_(std::move(lexicon)), data_(std::move(data)), config_(config) {
    config_.validate();
}

double Scorer::score(const text::TokenSequence& tokens) const {
    return score_sentence(tokens, lexicon_, data_, config_);
}

Breakdown Scorer::breakdown(const text::TokenSequence& tokens) const {
    return score_breakdown(tokens, lexicon_, data_, config_);
}

}  // namespace finsent::vader
