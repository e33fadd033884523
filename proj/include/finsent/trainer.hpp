#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "finsent/model.hpp"
#include "finsent/trainer_config.hpp"

namespace finsent::trainer {

// 1 - cos(predicted, target) in [0, 2]. A predicted vector with norm below
// 1e-12 returns exactly 1 (the gradient for such a batch is defined as
// zero). An all-zero target is a data error.
double cosine_loss(std::span<const double> predicted, std::span<const double> target);

// Bias-corrected Adam over the named parameter tensors. The <pad> embedding
// row is masked from updates, and the whole embedding matrix is skipped when
// fine-tuning is disabled.
struct AdamState {
    struct Moments {
        Tensor m, v;
    };
    std::unordered_map<std::string, Moments> moments;
    long step = 0;
};

struct AdamOptions {
    bool update_embeddings = true;
    std::size_t pad_row = 0;
};

void adam_step(model::ModelParameters& params,
               const std::unordered_map<std::string, const Tensor*>& grads, AdamState& state,
               const TrainConfig& config, const AdamOptions& options);

struct TrainResult {
    model::ModelParameters params;
    std::vector<double> epoch_loss;      // sum of batch losses per epoch
    std::uint64_t degenerate_batches = 0;
    int epochs_run = 0;
};

// Consecutive chunks of batch_size over `order`; the final ragged chunk is
// merged into its predecessor and any chunk whose targets are all zero is
// merged forward. Throws when every target is zero.
std::vector<std::vector<std::size_t>> batch_plan(const std::vector<std::size_t>& order,
                                                 std::span<const double> targets, int batch_size);

// One model: seeded shuffling per epoch, mini-batches (the final ragged
// batch is merged into its predecessor; batches whose targets are all zero
// are merged forward), cosine loss, backward, Adam.
TrainResult train_one(std::span<const model::SentenceRepresentation> items,
                      std::span<const double> targets, const model::ModelConfig& model_config,
                      const TrainConfig& train_config, const model::Vocabulary& vocab,
                      const lex::LexiconStore* store, std::uint64_t seed);

struct EnsemblePrediction {
    std::vector<std::vector<double>> per_model;  // N x |test|
    std::vector<double> mean;                    // column-wise average
};

std::vector<double> ensemble_mean(const std::vector<std::vector<double>>& per_model);

struct EnsembleResult {
    model::Vocabulary vocab;
    std::vector<model::ModelParameters> models;
    EnsemblePrediction prediction;
    std::vector<std::vector<double>> loss_traces;  // per model
};

// Trains n_models members with seeds base_seed + n, evaluates each on the
// test items in inference mode and averages. The vocabulary is built from
// the training tokens; test-only tokens map to <oov>. Members may train on
// separate threads when parallel_models is set; results are identical
// either way.
EnsembleResult train_ensemble(std::span<const model::PreparedInstance> train,
                              std::span<const double> targets,
                              std::span<const model::PreparedInstance> test,
                              const model::ModelConfig& model_config,
                              const TrainConfig& train_config, const lex::LexiconStore* store);

// Deterministic near-equal partition: fold sizes differ by at most one and
// every index lands in exactly one fold.
std::vector<int> fold_assignment(std::size_t n, int folds, std::uint64_t seed);

struct CvResult {
    std::vector<double> fold_scores;
    double mean = 0.0;
    double stddev = 0.0;  // sample standard deviation across folds
    std::vector<int> assignment;
    std::vector<std::vector<std::vector<double>>> fold_traces;  // fold x model x epoch
};

// k-fold cross-validation: per fold, train an ensemble on the complement
// and evaluate the ensemble-mean predictions on the fold with the official
// cosine metric.
CvResult cross_validate(std::span<const model::PreparedInstance> instances,
                        std::span<const double> targets, const model::ModelConfig& model_config,
                        const TrainConfig& train_config, const lex::LexiconStore* store);

// Line-delimited records for external plotting:
//   loss<TAB>fold<TAB>model<TAB>epoch<TAB>value
//   fold_score<TAB>fold<TAB>-<TAB>-<TAB>value
std::string trace_records(const std::vector<std::vector<double>>& loss_traces, int fold);
std::string fold_score_records(const std::vector<double>& fold_scores);

}  // namespace finsent::trainer
