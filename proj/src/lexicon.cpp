#include "finsent/lexicon.hpp"

#include <fstream>
#include <iostream>
#include <random>

#include "finsent/errors.hpp"
#include "finsent/rng.hpp"
#include "finsent/text_pipeline.hpp"
#include "finsent/util.hpp"

namespace finsent::lex {

namespace {

// The reserved rows must be identical across runs and processes.
constexpr std::uint64_t kReservedRowSeed = 0x5eedf00dcafeULL;

std::string strip_cr(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

bool is_reserved(const std::string& token) {
    return token == kOovToken || token == kPadToken ||
           token == text::kCompanyToken || token == text::kNumberToken;
}

}  // namespace

std::optional<std::size_t> EmbeddingTable::find(const std::string& token) const {
    const auto it = vocabulary.find(token);
    if (it == vocabulary.end()) return std::nullopt;
    return it->second;
}

const std::vector<double>* AffectiveLexicon::find(const std::string& token) const {
    const auto it = entries.find(token);
    if (it == entries.end()) return nullptr;
    return &it->second;
}

std::optional<double> ValenceLexicon::find(const std::string& token) const {
    const auto it = entries.find(token);
    if (it == entries.end()) return std::nullopt;
    return it->second;
}

EmbeddingTable load_embeddings(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw validation_error("embeddings: cannot open " + path);
    }

    EmbeddingTable table;
    std::string line;
    std::size_t line_no = 0;
    std::size_t duplicates = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) continue;
        const auto fields = util::split_whitespace(line);
        if (fields.size() < 2) {
            throw validation_error("embeddings: malformed line " + std::to_string(line_no) +
                                   " in " + path);
        }
        const std::string& token = fields[0];
        const std::size_t d = fields.size() - 1;
        if (table.d_emb == 0) {
            table.d_emb = d;
        } else if (d != table.d_emb) {
            throw validation_error("embeddings: line " + std::to_string(line_no) + " has " +
                                   std::to_string(d) + " values, expected " +
                                   std::to_string(table.d_emb) + " (" + path + ")");
        }
        if (is_reserved(token)) {
            std::cerr << "warning: embeddings line " << line_no << ": reserved token '" << token
                      << "' ignored; reserved rows use their fixed initialization\n";
            continue;
        }

        std::vector<double> row(d);
        for (std::size_t i = 0; i < d; ++i) {
            const auto v = util::parse_double(fields[i + 1]);
            if (!v) {
                throw validation_error("embeddings: non-numeric value on line " +
                                       std::to_string(line_no) + " in " + path);
            }
            row[i] = *v;
        }

        const auto it = table.vocabulary.find(token);
        if (it != table.vocabulary.end()) {
            ++duplicates;
            std::copy(row.begin(), row.end(), table.values.begin() +
                      static_cast<std::ptrdiff_t>(it->second * table.d_emb));
        } else {
            table.vocabulary.emplace(token, table.rows());
            table.values.insert(table.values.end(), row.begin(), row.end());
        }
    }
    if (table.vocabulary.empty()) {
        throw validation_error("embeddings: no entries in " + path);
    }
    if (duplicates > 0) {
        std::cerr << "warning: embeddings: " << duplicates
                  << " duplicate token(s); last occurrence wins\n";
    }

    // Reserved rows, in fixed order and with fixed draws.
    std::mt19937_64 rng(kReservedRowSeed);
    const auto add_reserved = [&](const char* token, bool zero) {
        table.vocabulary.emplace(token, table.rows());
        for (std::size_t i = 0; i < table.d_emb; ++i) {
            table.values.push_back(zero ? 0.0 : uniform_range(rng, -0.05, 0.05));
        }
        return table.rows() - 1;
    };
    table.company_id = add_reserved(text::kCompanyToken, false);
    table.number_id = add_reserved(text::kNumberToken, false);
    table.oov_id = add_reserved(kOovToken, false);
    table.pad_id = add_reserved(kPadToken, true);

    table.file_hash = util::file_fnv1a(path);
    return table;
}

AffectiveLexicon load_affective(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw validation_error("affective lexicon: cannot open " + path);
    }

    AffectiveLexicon lexicon;
    std::string line;
    if (!std::getline(in, line)) {
        throw validation_error("affective lexicon: empty file " + path);
    }
    line = strip_cr(line);
    const auto header = util::split(line, '\t');
    if (header.size() < 2 || header[0] != "token") {
        throw validation_error("affective lexicon: missing header row "
                               "'token<TAB>dim1<TAB>...' in " + path);
    }
    lexicon.dimension_names.assign(header.begin() + 1, header.end());
    const std::size_t d_aff = lexicon.dimension_names.size();

    std::size_t line_no = 1;
    std::size_t duplicates = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) continue;
        const auto fields = util::split(line, '\t');
        if (fields.size() != d_aff + 1) {
            throw validation_error("affective lexicon: line " + std::to_string(line_no) +
                                   " has " + std::to_string(fields.size() - 1) +
                                   " scores, expected " + std::to_string(d_aff) +
                                   " (" + path + ")");
        }
        std::vector<double> scores(d_aff);
        for (std::size_t i = 0; i < d_aff; ++i) {
            const auto v = util::parse_double(fields[i + 1]);
            if (!v) {
                throw validation_error("affective lexicon: non-numeric score on line " +
                                       std::to_string(line_no) + " in " + path);
            }
            scores[i] = *v;
        }
        if (lexicon.entries.count(fields[0])) ++duplicates;
        lexicon.entries[fields[0]] = std::move(scores);
    }
    if (duplicates > 0) {
        std::cerr << "warning: affective lexicon: " << duplicates
                  << " duplicate token(s); last occurrence wins\n";
    }
    lexicon.file_hash = util::file_fnv1a(path);
    return lexicon;
}

ValenceLexicon load_valence(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw validation_error("valence lexicon: cannot open " + path);
    }

    ValenceLexicon lexicon;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) continue;
        const auto fields = util::split(line, '\t');
        if (fields.size() < 2) {
            throw validation_error("valence lexicon: line " + std::to_string(line_no) +
                                   " needs token<TAB>valence (" + path + ")");
        }
        const auto v = util::parse_double(fields[1]);
        if (!v) {
            throw validation_error("valence lexicon: non-numeric valence on line " +
                                   std::to_string(line_no) + " in " + path);
        }
        lexicon.entries[fields[0]] = *v;  // extra columns ignored
    }
    if (lexicon.entries.empty()) {
        throw validation_error("valence lexicon: no entries in " + path);
    }
    lexicon.file_hash = util::file_fnv1a(path);
    return lexicon;
}

std::vector<double> LexiconStore::token_vector(const std::string& token) const {
    std::vector<double> out;
    out.reserve(dim());

    const auto emb_id = embeddings.find(token);
    if (emb_id) {
        counters_->emb_hits.fetch_add(1, std::memory_order_relaxed);
    } else {
        counters_->emb_misses.fetch_add(1, std::memory_order_relaxed);
    }
    const double* row = embeddings.row(emb_id.value_or(embeddings.oov_id));
    out.insert(out.end(), row, row + embeddings.d_emb);

    if (const auto* aff = affective.find(token)) {
        counters_->aff_hits.fetch_add(1, std::memory_order_relaxed);
        out.insert(out.end(), aff->begin(), aff->end());
    } else {
        counters_->aff_misses.fetch_add(1, std::memory_order_relaxed);
        out.insert(out.end(), affective.d_aff(), 0.0);
    }
    return out;
}

CoverageReport LexiconStore::coverage() const {
    CoverageReport r;
    r.embedding_hits = counters_->emb_hits.load();
    r.embedding_misses = counters_->emb_misses.load();
    r.affective_hits = counters_->aff_hits.load();
    r.affective_misses = counters_->aff_misses.load();
    return r;
}

void LexiconStore::reset_coverage() {
    counters_->emb_hits = 0;
    counters_->emb_misses = 0;
    counters_->aff_hits = 0;
    counters_->aff_misses = 0;
}

}  // namespace finsent::lex
