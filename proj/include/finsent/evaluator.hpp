#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "finsent/lexicon.hpp"
#include "finsent/model.hpp"
#include "finsent/trainer.hpp"

namespace finsent::evaluator {

// Challenge metric: a single cosine similarity over the full prediction and
// gold vectors (not averaged per batch). Zero-norm predictions score 0 by
// convention; an all-zero gold vector is a data error.
double official_metric(std::span<const double> predicted, std::span<const double> gold);

struct EvaluationReport {
    std::string configuration;  // Full | NoEmbeddings | NoPreprocessing
    double metric = 0.0;
    std::optional<double> metric_std;  // present for cross-validation reports
    std::size_t n_instances = 0;
    std::vector<double> predictions;  // retained for audit
};

// Published results for this architecture on the original challenge data;
// shown as a reference column, never asserted (the challenge data and
// full-size lexica are external inputs).
struct ReferenceScores {
    double full, no_embeddings, no_preprocessing;
};
inline constexpr ReferenceScores kReferenceTest{0.745, 0.660, 0.678};
inline constexpr ReferenceScores kReferenceCvMean{0.701, 0.586, 0.648};
inline constexpr ReferenceScores kReferenceCvStd{0.023, 0.017, 0.022};

struct AblationContext {
    std::span<const text::RawInstance> train;
    std::span<const text::RawInstance> test;  // empty -> cross-validation mode
    const lex::LexiconStore* store = nullptr;
    const vader::Scorer* scorer = nullptr;
    model::ModelConfig model;
    trainer::TrainConfig train_config;
};

struct AblationResult {
    std::vector<EvaluationReport> reports;  // Full, NoEmbeddings, NoPreprocessing
    bool cv_mode = false;
};

// Trains and evaluates the three configurations with identical seeds and
// identical splits: (Full) everything on; (NoEmbeddings) randomly
// initialized token vectors instead of the lexica; (NoPreprocessing) no
// company/number masking.
AblationResult run_ablations(const AblationContext& ctx);

// Aligned three-row table in the shape of the published results, with the
// reference column, plus machine-readable records.
std::string render_ablation_table(const AblationResult& result);
std::string ablation_records(const AblationResult& result);

}  // namespace finsent::evaluator
