#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "finsent/lexicon.hpp"
#include "finsent/tensor.hpp"
#include "finsent/text_pipeline.hpp"
#include "finsent/vader.hpp"

namespace finsent::model {

enum class DropoutPosition { embeddings, concat, hidden };
enum class VaderPosition { concat, prepend };

const char* to_string(DropoutPosition p);
const char* to_string(VaderPosition p);
DropoutPosition dropout_position_from_string(const std::string& s);
VaderPosition vader_position_from_string(const std::string& s);

struct ModelConfig {
    std::vector<int> filter_widths{2, 3, 4};
    int filters_per_width = 64;
    double dropout_rate = 0.5;
    // Applied after the concat layer by default; alternatives are exposed
    // because the architecture leaves the placement open.
    DropoutPosition dropout_position = DropoutPosition::concat;
    int hidden_units = 0;  // 0 = direct pooled->output dense
    bool fine_tune_embeddings = true;
    bool use_embeddings = true;
    bool use_vader = true;
    // `concat` joins the sentence score with the pooled conv outputs;
    // `prepend` injects it as a synthetic first token row instead.
    VaderPosition vader_position = VaderPosition::concat;
    int max_sequence_length = 50;
    // Embedding width when use_embeddings is false and there is no lexicon
    // to take the width from.
    int random_embedding_dim = 64;

    int max_filter_width() const;
    void validate() const;
};

// Token -> row index map for the trainable embedding matrix. Built from the
// training corpus; reserved entries come first so <pad> is always row 0.
struct Vocabulary {
    std::vector<std::string> tokens;
    std::unordered_map<std::string, std::size_t> index;
    std::size_t pad_id = 0, oov_id = 1, company_id = 2, number_id = 3;

    static Vocabulary build(const std::vector<const text::TokenSequence*>& corpus);

    std::size_t size() const { return tokens.size(); }
    std::size_t id_of(const std::string& token) const;  // <oov> fallback
    std::uint64_t hash() const;
};

// The trainable state. The embedding matrix holds the full concatenated
// token vectors (both halves are fine-tuned); the <pad> row stays all-zero
// and is excluded from updates.
struct ModelParameters {
    Tensor embedding;                   // |V| x D
    std::vector<Tensor> conv_filters;   // per width: K x k x D
    std::vector<Tensor> conv_bias;      // per width: K
    Tensor hidden_weights, hidden_bias; // empty when hidden_units == 0
    Tensor output_weights, output_bias; // output dimension 1

    bool has_hidden() const { return hidden_weights.size() > 0; }

    // Stable iteration order shared by the optimizer and the model file.
    void for_each(const std::function<void(const std::string&, Tensor&)>& fn);
    void for_each(const std::function<void(const std::string&, const Tensor&)>& fn) const;
};

// Tokenized headline plus its sentence-level rule score; fold- and
// vocabulary-independent, computed once per instance.
struct PreparedInstance {
    text::TokenSequence tokens;
    double vader_score = 0.0;
};

PreparedInstance prepare_instance(const std::string& headline, const std::string& company,
                                  bool preprocessing, const vader::Scorer* scorer,
                                  const ModelConfig& config);

// Token ids truncated at max_sequence_length and right-padded with <pad> to
// at least the largest filter width, plus the sentence score.
struct SentenceRepresentation {
    std::vector<std::size_t> token_ids;
    std::size_t true_length = 0;  // rows that are real tokens, not padding
    double vader_score = 0.0;
};

SentenceRepresentation represent(const PreparedInstance& prepared, const Vocabulary& vocab,
                                 const ModelConfig& config);
// Spec-shaped convenience: tokens straight to representation.
SentenceRepresentation represent(const text::TokenSequence& tokens, const Vocabulary& vocab,
                                 const vader::Scorer* scorer, const ModelConfig& config);

// Materializes the [L x D] token matrix for inspection and tests.
Tensor token_matrix(const SentenceRepresentation& repr, const ModelParameters& params);

// Fresh parameters. With use_embeddings the matrix rows are copied from the
// store's concatenated token vectors; without it they are sampled from
// uniform(-0.05, 0.05). Conv and dense weights use fan-based uniform
// scaling, biases start at zero, and everything is deterministic under the
// seed. `store` may be null when use_embeddings is false.
ModelParameters init(const ModelConfig& config, const Vocabulary& vocab,
                     const lex::LexiconStore* store, std::uint64_t seed);

// Parameter leaves registered on a tape, in for_each order.
struct ParamVars {
    Tape::Var embedding;
    std::vector<Tape::Var> conv_filters, conv_bias;
    Tape::Var hidden_weights, hidden_bias;
    Tape::Var output_weights, output_bias;
    bool has_hidden = false;
};

ParamVars register_params(Tape& tape, const ModelParameters& params);

// Full forward graph for one sentence: per width conv -> relu -> global max
// pool; concat of the pooled vectors (plus the sentence score when
// use_vader); dropout; optional hidden dense + relu; output dense of
// dimension 1 with tanh. Returns the scalar output var.
Tape::Var forward_graph(Tape& tape, const ParamVars& pv, const SentenceRepresentation& repr,
                        const ModelConfig& config, bool training, std::mt19937_64& rng);

// Inference-mode forward pass; output lies strictly in (-1, 1).
double predict(const SentenceRepresentation& repr, const ModelParameters& params,
               const ModelConfig& config);

}  // namespace finsent::model
