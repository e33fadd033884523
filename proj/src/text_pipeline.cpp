#include "finsent/text_pipeline.hpp"

#include <cctype>
#include <cstring>

#include "finsent/errors.hpp"

namespace finsent::text {

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }

bool is_word_byte(char c) {
    const auto u = static_cast<unsigned char>(c);
    return std::isalnum(u) != 0 || u >= 0x80;
}

char ascii_lower(char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

// Length of the sentinel token starting at pos, or 0.
std::size_t sentinel_at(const std::string& s, std::size_t pos) {
    for (const char* sentinel : {kCompanyToken, kNumberToken}) {
        const std::size_t n = std::strlen(sentinel);
        if (s.compare(pos, n, sentinel) == 0) return n;
    }
    return 0;
}

bool iequals_at(const std::string& s, std::size_t pos, const std::string& needle) {
    if (pos + needle.size() > s.size()) return false;
    for (std::size_t i = 0; i < needle.size(); ++i) {
        if (ascii_lower(s[pos + i]) != ascii_lower(needle[i])) return false;
    }
    return true;
}

// Decodes the UTF-8 sequence at pos; returns its byte length (1 on invalid
// sequences, which then behave as single word bytes).
std::size_t decode_utf8(const std::string& s, std::size_t pos, char32_t& cp) {
    const auto b0 = static_cast<unsigned char>(s[pos]);
    if (b0 < 0x80) {
        cp = b0;
        return 1;
    }
    std::size_t len = 0;
    if ((b0 & 0xE0) == 0xC0) len = 2;
    else if ((b0 & 0xF0) == 0xE0) len = 3;
    else if ((b0 & 0xF8) == 0xF0) len = 4;
    if (len == 0 || pos + len > s.size()) {
        cp = b0;
        return 1;
    }
    char32_t v = b0 & (0x7F >> len);
    for (std::size_t i = 1; i < len; ++i) {
        const auto b = static_cast<unsigned char>(s[pos + i]);
        if ((b & 0xC0) != 0x80) {
            cp = b0;
            return 1;
        }
        v = (v << 6) | (b & 0x3F);
    }
    cp = v;
    return len;
}

bool is_punct_codepoint(char32_t cp) {
    if (cp < 0x80) return std::ispunct(static_cast<int>(cp)) != 0;
    // Latin-1 punctuation marks.
    if (cp == 0x00A1 || cp == 0x00A7 || cp == 0x00AB || cp == 0x00B6 ||
        cp == 0x00B7 || cp == 0x00BB || cp == 0x00BF) {
        return true;
    }
    // General punctuation block: dashes, curly quotes, ellipsis, primes.
    if ((cp >= 0x2010 && cp <= 0x2027) || (cp >= 0x2030 && cp <= 0x205E)) return true;
    // Common CJK and fullwidth marks.
    if ((cp >= 0x3001 && cp <= 0x3003) || (cp >= 0xFF01 && cp <= 0xFF0F)) return true;
    return false;
}

}  // namespace

std::string mask(const std::string& headline, const std::string& company) {
    if (company.empty()) {
        throw validation_error("mask: company name must be non-empty");
    }

    // Pass 1: company name -> <company>, case-insensitive at word boundaries.
    std::string companied;
    companied.reserve(headline.size());
    bool emitted_company = false;
    std::size_t i = 0;
    while (i < headline.size()) {
        if (const std::size_t n = sentinel_at(headline, i); n > 0) {
            companied.append(headline, i, n);
            i += n;
            continue;
        }
        const bool boundary_before = (i == 0) || !is_word_byte(headline[i - 1]);
        if (boundary_before && iequals_at(headline, i, company)) {
            const std::size_t end = i + company.size();
            const bool boundary_after = (end == headline.size()) || !is_word_byte(headline[end]);
            if (boundary_after) {
                companied += kCompanyToken;
                emitted_company = true;
                i = end;
                continue;
            }
        }
        companied += headline[i];
        ++i;
    }
    (void)emitted_company;  // the caller records absence via the token stream

    // Pass 2: maximal digit runs (with '.'/',' only between digits) -> <number>.
    std::string out;
    out.reserve(companied.size());
    i = 0;
    while (i < companied.size()) {
        if (const std::size_t n = sentinel_at(companied, i); n > 0) {
            out.append(companied, i, n);
            i += n;
            continue;
        }
        if (is_digit(companied[i])) {
            std::size_t end = i + 1;
            while (end < companied.size()) {
                if (is_digit(companied[end])) {
                    ++end;
                } else if ((companied[end] == '.' || companied[end] == ',') &&
                           end + 1 < companied.size() && is_digit(companied[end + 1])) {
                    end += 2;
                } else {
                    break;
                }
            }
            out += kNumberToken;
            i = end;
            continue;
        }
        out += companied[i];
        ++i;
    }
    return out;
}

TokenSequence tokenize(const std::string& txt) {
    TokenSequence seq;
    std::string word;
    bool word_has_alpha = false;
    bool word_has_lower = false;

    auto flush_word = [&] {
        if (word.empty()) return;
        const bool caps = word_has_alpha && !word_has_lower;
        for (char& c : word) c = ascii_lower(c);
        seq.tokens.push_back(word);
        seq.all_caps.push_back(caps ? 1 : 0);
        word.clear();
        word_has_alpha = false;
        word_has_lower = false;
    };

    std::size_t i = 0;
    while (i < txt.size()) {
        const auto u = static_cast<unsigned char>(txt[i]);
        if (u < 0x80 && std::isspace(u)) {
            flush_word();
            ++i;
            continue;
        }
        if (const std::size_t n = sentinel_at(txt, i); n > 0) {
            flush_word();
            seq.tokens.emplace_back(txt, i, n);
            seq.all_caps.push_back(0);
            i += n;
            continue;
        }
        char32_t cp = 0;
        const std::size_t n = decode_utf8(txt, i, cp);
        if (is_punct_codepoint(cp)) {
            flush_word();
            seq.tokens.emplace_back(txt, i, n);
            seq.all_caps.push_back(0);
        } else {
            word.append(txt, i, n);
            if (u < 0x80 && std::isalpha(u)) {
                word_has_alpha = true;
                if (std::islower(u)) word_has_lower = true;
            }
        }
        i += n;
    }
    flush_word();

    for (const std::string& t : seq.tokens) {
        if (t == kCompanyToken) {
            seq.masked_company = true;
            break;
        }
    }
    return seq;
}

TokenSequence preprocess(const std::string& headline, const std::string& company, bool enabled) {
    if (enabled) {
        return tokenize(mask(headline, company));
    }
    return tokenize(headline);
}

}  // namespace finsent::text
