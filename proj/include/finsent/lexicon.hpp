#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace finsent::lex {

// Reserved vocabulary entries present in every embedding table.
inline constexpr const char* kOovToken = "<oov>";
inline constexpr const char* kPadToken = "<pad>";

// Word embedding table: token -> row of d_emb reals. Read-only after load;
// trainable copies of rows are owned by the model.
struct EmbeddingTable {
    std::unordered_map<std::string, std::size_t> vocabulary;
    std::vector<double> values;  // rows() x d_emb, row-major
    std::size_t d_emb = 0;
    std::size_t oov_id = 0, pad_id = 0, company_id = 0, number_id = 0;
    std::uint64_t file_hash = 0;

    std::size_t rows() const { return d_emb ? values.size() / d_emb : 0; }
    const double* row(std::size_t i) const { return values.data() + i * d_emb; }
    std::optional<std::size_t> find(const std::string& token) const;
};

// Multi-dimensional affective scores per token; d_aff comes from the file
// header rather than being hard-coded.
struct AffectiveLexicon {
    std::unordered_map<std::string, std::vector<double>> entries;
    std::vector<std::string> dimension_names;
    std::uint64_t file_hash = 0;

    std::size_t d_aff() const { return dimension_names.size(); }
    const std::vector<double>* find(const std::string& token) const;
};

// Single signed valence score per token, consumed by the rule engine.
struct ValenceLexicon {
    std::unordered_map<std::string, double> entries;
    std::uint64_t file_hash = 0;

    std::optional<double> find(const std::string& token) const;
};

// Format: one token per line, `token v1 v2 ... vd`, whitespace separated,
// consistent d across lines. The four reserved tokens are appended after the
// file entries: <company>, <number> and <oov> rows are drawn once from
// uniform(-0.05, 0.05) with a fixed seed, the <pad> row is all-zero and
// stays frozen during training. Reserved tokens appearing in the file are
// ignored with a warning. Duplicate tokens: last occurrence wins, warning.
EmbeddingTable load_embeddings(const std::string& path);

// UTF-8 TSV with a header row `token<TAB>dim1<TAB>...<TAB>dimK`.
AffectiveLexicon load_affective(const std::string& path);

// UTF-8 TSV `token<TAB>valence`; additional columns are ignored.
ValenceLexicon load_valence(const std::string& path);

struct CoverageReport {
    std::uint64_t embedding_hits = 0, embedding_misses = 0;
    std::uint64_t affective_hits = 0, affective_misses = 0;
};

// Bundles the two vector-producing lexica and builds per-token concatenated
// vectors. Lookup misses never abort; they fall back (<oov> row for
// embeddings, all-zero affect) and are counted.
struct LexiconStore {
    EmbeddingTable embeddings;
    AffectiveLexicon affective;

    std::size_t dim() const { return embeddings.d_emb + affective.d_aff(); }

    // [embedding row (or <oov>) || affective entry (or zeros)], length dim().
    std::vector<double> token_vector(const std::string& token) const;

    CoverageReport coverage() const;
    void reset_coverage();

private:
    struct Counters {
        std::atomic<std::uint64_t> emb_hits{0}, emb_misses{0}, aff_hits{0}, aff_misses{0};
    };
    std::shared_ptr<Counters> counters_ = std::make_shared<Counters>();
};

}  // namespace finsent::lex
