#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace finsent::text {

// One annotated (headline, company, score) record. The score is absent for
// unlabeled prediction input and lies in [-1, 1] otherwise.
struct RawInstance {
    std::string headline;
    std::string company;
    std::optional<double> score;
};

// Sentinel tokens emitted by masking. Both are reserved vocabulary entries
// with their own trainable vectors downstream.
inline constexpr const char* kCompanyToken = "<company>";
inline constexpr const char* kNumberToken = "<number>";

struct TokenSequence {
    std::vector<std::string> tokens;
    // Per-token flag recording whether the original (pre-lowercasing) form
    // was ALL-CAPS. Consumed by the rule-based scorer's emphasis rule.
    std::vector<std::uint8_t> all_caps;
    bool masked_company = false;

    std::size_t size() const { return tokens.size(); }
};

// Replaces every case-insensitive, word-boundary occurrence of `company`
// with "<company>", then every maximal digit run (digits optionally joined
// by '.' or ',' between digits) with "<number>". Existing sentinel tokens
// are never re-masked, so the operation is idempotent. Case-insensitive
// matching is ASCII-only; bytes >= 0x80 count as word characters.
std::string mask(const std::string& headline, const std::string& company);

// Whitespace split, then every punctuation character becomes its own
// single-character token, in original order. The sentinel tokens pass
// through intact. All non-sentinel tokens are lowercased (ASCII); the
// pre-lowercasing ALL-CAPS state is recorded per token. Punctuation covers
// the ASCII punctuation set plus the common Unicode punctuation blocks
// (Latin-1 marks, general punctuation); invalid UTF-8 bytes pass through
// as word characters.
TokenSequence tokenize(const std::string& txt);

// Masking followed by tokenization when enabled; plain tokenization when
// disabled (the no-preprocessing ablation still needs tokens).
TokenSequence preprocess(const std::string& headline, const std::string& company, bool enabled);

}  // namespace finsent::text
