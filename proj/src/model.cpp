#include "finsent/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "finsent/errors.hpp"
#include "finsent/rng.hpp"
#include "finsent/util.hpp"

namespace finsent::model {

const char* to_string(DropoutPosition p) {
    switch (p) {
        case DropoutPosition::embeddings: return "embeddings";
        case DropoutPosition::concat: return "concat";
        case DropoutPosition::hidden: return "hidden";
    }
    return "concat";
}

const char* to_string(VaderPosition p) {
    return p == VaderPosition::prepend ? "prepend" : "concat";
}

DropoutPosition dropout_position_from_string(const std::string& s) {
    if (s == "embeddings") return DropoutPosition::embeddings;
    if (s == "concat") return DropoutPosition::concat;
    if (s == "hidden") return DropoutPosition::hidden;
    throw validation_error("unknown dropout position '" + s + "'");
}

VaderPosition vader_position_from_string(const std::string& s) {
    if (s == "concat") return VaderPosition::concat;
    if (s == "prepend") return VaderPosition::prepend;
    throw validation_error("unknown vader position '" + s + "'");
}

int ModelConfig::max_filter_width() const {
    int m = 0;
    for (const int w : filter_widths) m = std::max(m, w);
    return m;
}

void ModelConfig::validate() const {
    if (filter_widths.empty()) {
        throw validation_error("model config: filter_widths must be non-empty");
    }
    for (const int w : filter_widths) {
        if (w < 1) throw validation_error("model config: filter widths must be >= 1");
    }
    if (filters_per_width < 1) {
        throw validation_error("model config: filters_per_width must be >= 1");
    }
    if (dropout_rate < 0.0 || dropout_rate >= 1.0) {
        throw validation_error("model config: dropout_rate must lie in [0, 1)");
    }
    if (hidden_units < 0) {
        throw validation_error("model config: hidden_units must be >= 0");
    }
    if (max_sequence_length < max_filter_width()) {
        throw validation_error("model config: max_sequence_length must be >= the largest filter width");
    }
    if (!use_embeddings && random_embedding_dim < 1) {
        throw validation_error("model config: random_embedding_dim must be >= 1");
    }
}

Vocabulary Vocabulary::build(const std::vector<const text::TokenSequence*>& corpus) {
    Vocabulary v;
    v.tokens = {lex::kPadToken, lex::kOovToken, text::kCompanyToken, text::kNumberToken};
    std::set<std::string> seen;  // ordered, for a deterministic layout
    for (const auto* seq : corpus) {
        for (const std::string& tok : seq->tokens) seen.insert(tok);
    }
    for (const std::string& reserved : v.tokens) seen.erase(reserved);
    v.tokens.insert(v.tokens.end(), seen.begin(), seen.end());
    for (std::size_t i = 0; i < v.tokens.size(); ++i) v.index.emplace(v.tokens[i], i);
    return v;
}

std::size_t Vocabulary::id_of(const std::string& token) const {
    const auto it = index.find(token);
    return it == index.end() ? oov_id : it->second;
}

std::uint64_t Vocabulary::hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const std::string& t : tokens) {
        h = util::fnv1a(t, h);
        h = util::fnv1a(std::string_view("\n", 1), h);
    }
    return h;
}

void ModelParameters::for_each(const std::function<void(const std::string&, Tensor&)>& fn) {
    fn("embedding", embedding);
    for (std::size_t i = 0; i < conv_filters.size(); ++i) {
        fn("conv_filters_" + std::to_string(i), conv_filters[i]);
        fn("conv_bias_" + std::to_string(i), conv_bias[i]);
    }
    if (has_hidden()) {
        fn("hidden_weights", hidden_weights);
        fn("hidden_bias", hidden_bias);
    }
    fn("output_weights", output_weights);
    fn("output_bias", output_bias);
}

void ModelParameters::for_each(
    const std::function<void(const std::string&, const Tensor&)>& fn) const {
    const_cast<ModelParameters*>(this)->for_each(
        [&](const std::string& name, Tensor& t) { fn(name, t); });
}

PreparedInstance prepare_instance(const std::string& headline, const std::string& company,
                                  bool preprocessing, const vader::Scorer* scorer,
                                  const ModelConfig& config) {
    PreparedInstance p;
    p.tokens = text::preprocess(headline, company, preprocessing);
    if (config.use_vader && scorer != nullptr) {
        p.vader_score = scorer->score(p.tokens);
    }
    return p;
}

SentenceRepresentation represent(const PreparedInstance& prepared, const Vocabulary& vocab,
                                 const ModelConfig& config) {
    config.validate();
    SentenceRepresentation repr;
    const std::size_t max_len = static_cast<std::size_t>(config.max_sequence_length);
    const std::size_t width = static_cast<std::size_t>(config.max_filter_width());

    for (const std::string& tok : prepared.tokens.tokens) {
        if (repr.token_ids.size() >= max_len) break;
        repr.token_ids.push_back(vocab.id_of(tok));
    }
    repr.true_length = repr.token_ids.size();

    // Right-pad so every filter width sees a window starting at each real
    // token (true_length + width - 1 rows, floor of one full window), capped
    // at max_sequence_length. Appending further <pad> rows then only adds
    // all-zero windows.
    const std::size_t padded =
        std::min(max_len, std::max(width, repr.true_length + width - 1));
    while (repr.token_ids.size() < padded) repr.token_ids.push_back(vocab.pad_id);
    repr.vader_score = config.use_vader ? prepared.vader_score : 0.0;
    return repr;
}

SentenceRepresentation represent(const text::TokenSequence& tokens, const Vocabulary& vocab,
                                 const vader::Scorer* scorer, const ModelConfig& config) {
    PreparedInstance p;
    p.tokens = tokens;
    if (config.use_vader && scorer != nullptr) {
        p.vader_score = scorer->score(tokens);
    }
    return represent(p, vocab, config);
}

Tensor token_matrix(const SentenceRepresentation& repr, const ModelParameters& params) {
    const std::size_t D = params.embedding.dim(1);
    Tensor out = Tensor::zeros({repr.token_ids.size(), D});
    for (std::size_t r = 0; r < repr.token_ids.size(); ++r) {
        for (std::size_t d = 0; d < D; ++d) out(r, d) = params.embedding(repr.token_ids[r], d);
    }
    return out;
}

namespace {

Tensor glorot_uniform(std::vector<std::size_t> shape, std::size_t fan_in, std::size_t fan_out,
                      std::mt19937_64& rng) {
    Tensor t = Tensor::zeros(std::move(shape));
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (double& v : t.values) v = uniform_range(rng, -limit, limit);
    return t;
}

}  // namespace

ModelParameters init(const ModelConfig& config, const Vocabulary& vocab,
                     const lex::LexiconStore* store, std::uint64_t seed) {
    config.validate();
    if (config.use_embeddings && store == nullptr) {
        throw validation_error("model init: use_embeddings requires a loaded lexicon store");
    }
    if (vocab.size() == 0) {
        throw validation_error("model init: empty vocabulary");
    }

    std::mt19937_64 rng(seed);
    ModelParameters params;

    const std::size_t D = config.use_embeddings
                              ? store->dim()
                              : static_cast<std::size_t>(config.random_embedding_dim);
    if (D == 0) {
        throw validation_error("model init: token vector dimension is zero");
    }

    params.embedding = Tensor::zeros({vocab.size(), D});
    if (config.use_embeddings) {
        for (std::size_t i = 0; i < vocab.size(); ++i) {
            const auto row = store->token_vector(vocab.tokens[i]);
            std::copy(row.begin(), row.end(),
                      params.embedding.values.begin() + static_cast<std::ptrdiff_t>(i * D));
        }
    } else {
        for (double& v : params.embedding.values) v = uniform_range(rng, -0.05, 0.05);
    }
    // The <pad> row is all-zero and never updated.
    for (std::size_t d = 0; d < D; ++d) params.embedding(vocab.pad_id, d) = 0.0;

    const auto K = static_cast<std::size_t>(config.filters_per_width);
    for (const int width : config.filter_widths) {
        const auto k = static_cast<std::size_t>(width);
        params.conv_filters.push_back(glorot_uniform({K, k, D}, k * D, k * K, rng));
        params.conv_bias.push_back(Tensor::zeros({K}));
    }

    std::size_t concat_len = K * config.filter_widths.size();
    if (config.use_vader && config.vader_position == VaderPosition::concat) ++concat_len;

    std::size_t head_in = concat_len;
    if (config.hidden_units > 0) {
        const auto H = static_cast<std::size_t>(config.hidden_units);
        params.hidden_weights = glorot_uniform({H, concat_len}, concat_len, H, rng);
        params.hidden_bias = Tensor::zeros({H});
        head_in = H;
    }
    params.output_weights = glorot_uniform({1, head_in}, head_in, 1, rng);
    params.output_bias = Tensor::zeros({1});
    return params;
}

ParamVars register_params(Tape& tape, const ModelParameters& params) {
    ParamVars pv;
    pv.embedding = tape.leaf(params.embedding, "embedding");
    for (std::size_t i = 0; i < params.conv_filters.size(); ++i) {
        pv.conv_filters.push_back(tape.leaf(params.conv_filters[i], "conv_filters"));
        pv.conv_bias.push_back(tape.leaf(params.conv_bias[i], "conv_bias"));
    }
    pv.has_hidden = params.has_hidden();
    if (pv.has_hidden) {
        pv.hidden_weights = tape.leaf(params.hidden_weights, "hidden_weights");
        pv.hidden_bias = tape.leaf(params.hidden_bias, "hidden_bias");
    }
    pv.output_weights = tape.leaf(params.output_weights, "output_weights");
    pv.output_bias = tape.leaf(params.output_bias, "output_bias");
    return pv;
}

Tape::Var forward_graph(Tape& tape, const ParamVars& pv, const SentenceRepresentation& repr,
                        const ModelConfig& config, bool training, std::mt19937_64& rng) {
    const bool use_dropout = training && config.dropout_rate > 0.0;

    Tape::Var rows = tape.embedding_rows(pv.embedding, repr.token_ids);
    if (config.use_vader && config.vader_position == VaderPosition::prepend) {
        // Synthetic first token: the sentence score in component 0.
        const std::size_t D = tape.value(rows).dim(1);
        Tensor row = Tensor::zeros({D});
        row(0) = repr.vader_score;
        rows = tape.prepend_row(tape.leaf(std::move(row), "vader_row"), rows);
    }
    if (use_dropout && config.dropout_position == DropoutPosition::embeddings) {
        rows = tape.dropout(rows, config.dropout_rate, training, rng);
    }

    std::vector<Tape::Var> pooled;
    for (std::size_t i = 0; i < pv.conv_filters.size(); ++i) {
        Tape::Var conv = tape.conv1d_valid(rows, pv.conv_filters[i], pv.conv_bias[i]);
        pooled.push_back(tape.global_max_pool(tape.relu(conv)));
    }
    if (config.use_vader && config.vader_position == VaderPosition::concat) {
        pooled.push_back(tape.leaf(Tensor::scalar(repr.vader_score), "vader_score"));
    }

    Tape::Var features = tape.concat(pooled);
    if (use_dropout && config.dropout_position == DropoutPosition::concat) {
        features = tape.dropout(features, config.dropout_rate, training, rng);
    }
    if (pv.has_hidden) {
        features = tape.relu(tape.dense(features, pv.hidden_weights, pv.hidden_bias));
        if (use_dropout && config.dropout_position == DropoutPosition::hidden) {
            features = tape.dropout(features, config.dropout_rate, training, rng);
        }
    } else if (use_dropout && config.dropout_position == DropoutPosition::hidden) {
        // No hidden layer: treat "hidden" placement as the final features.
        features = tape.dropout(features, config.dropout_rate, training, rng);
    }

    return tape.tanh_act(tape.dense(features, pv.output_weights, pv.output_bias));
}

double predict(const SentenceRepresentation& repr, const ModelParameters& params,
               const ModelConfig& config) {
    Tape tape;
    const ParamVars pv = register_params(tape, params);
    std::mt19937_64 unused_rng(0);
    const Tape::Var out = forward_graph(tape, pv, repr, config, /*training=*/false, unused_rng);
    return tape.value(out)(0);
}

}  // namespace finsent::model
