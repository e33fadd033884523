#include "finsent/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>
#include <sstream>

#include "finsent/errors.hpp"
#include "finsent/evaluator.hpp"
#include "finsent/rng.hpp"
#include "finsent/util.hpp"

namespace finsent::trainer {

namespace {

// Distinct streams per purpose so draw order stays stable when one consumer
// changes.
constexpr std::uint64_t kShuffleStream = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kDropoutStream = 0xD1B54A32D192ED03ULL;
constexpr std::uint64_t kSplitStream = 0x2545F4914F6CDD1DULL;

std::unordered_map<std::string, const Tensor*> collect_grads(const Tape& tape,
                                                             const model::ParamVars& pv,
                                                             model::ModelParameters& params) {
    std::unordered_map<std::string, const Tensor*> grads;
    grads.emplace("embedding", &tape.grad(pv.embedding));
    for (std::size_t i = 0; i < pv.conv_filters.size(); ++i) {
        grads.emplace("conv_filters_" + std::to_string(i), &tape.grad(pv.conv_filters[i]));
        grads.emplace("conv_bias_" + std::to_string(i), &tape.grad(pv.conv_bias[i]));
    }
    if (params.has_hidden()) {
        grads.emplace("hidden_weights", &tape.grad(pv.hidden_weights));
        grads.emplace("hidden_bias", &tape.grad(pv.hidden_bias));
    }
    grads.emplace("output_weights", &tape.grad(pv.output_weights));
    grads.emplace("output_bias", &tape.grad(pv.output_bias));
    return grads;
}

}  // namespace

void TrainConfig::validate(bool cv_requested) const {
    if (n_models < 1) throw validation_error("train config: n_models must be >= 1");
    if (batch_size < 2) {
        throw validation_error("train config: batch_size must be >= 2 "
                               "(the cosine of a single-item batch is degenerate)");
    }
    if (epochs < 1) throw validation_error("train config: epochs must be >= 1");
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
        throw validation_error("train config: learning_rate must be finite and >= 0");
    }
    if (adam_beta1 < 0.0 || adam_beta1 >= 1.0 || adam_beta2 < 0.0 || adam_beta2 >= 1.0) {
        throw validation_error("train config: Adam betas must lie in [0, 1)");
    }
    if (!(adam_epsilon > 0.0)) {
        throw validation_error("train config: adam_epsilon must be > 0");
    }
    if (cv_requested && folds < 2) {
        throw validation_error("train config: folds must be >= 2 for cross-validation");
    }
    if (early_stop && (early_stop_fraction <= 0.0 || early_stop_fraction >= 1.0)) {
        throw validation_error("train config: early_stop_fraction must lie in (0, 1)");
    }
}

std::vector<std::vector<std::size_t>> batch_plan(const std::vector<std::size_t>& order,
                                                 std::span<const double> targets, int batch_size) {
    const auto all_zero = [&](const std::vector<std::size_t>& items) {
        return std::all_of(items.begin(), items.end(),
                           [&](std::size_t i) { return targets[i] == 0.0; });
    };

    std::vector<std::vector<std::size_t>> batches;
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(batch_size)) {
        const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(batch_size));
        batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start),
                             order.begin() + static_cast<std::ptrdiff_t>(end));
    }
    if (batches.size() > 1 && batches.back().size() < static_cast<std::size_t>(batch_size)) {
        const auto tail = std::move(batches.back());
        batches.pop_back();
        batches.back().insert(batches.back().end(), tail.begin(), tail.end());
    }

    // The cosine of an all-zero target vector is undefined; merge such
    // batches forward.
    std::vector<std::vector<std::size_t>> merged;
    std::vector<std::size_t> pending;
    for (auto& b : batches) {
        pending.insert(pending.end(), b.begin(), b.end());
        if (!all_zero(pending)) {
            merged.push_back(std::move(pending));
            pending.clear();
        }
    }
    if (!pending.empty()) {
        if (merged.empty()) {
            throw validation_error("trainer: every target in the dataset is zero");
        }
        merged.back().insert(merged.back().end(), pending.begin(), pending.end());
    }
    return merged;
}

double cosine_loss(std::span<const double> predicted, std::span<const double> target) {
    if (predicted.size() != target.size() || predicted.empty()) {
        throw validation_error("cosine_loss: vectors must be equal-length and non-empty");
    }
    double dot = 0.0, pp = 0.0, tt = 0.0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        dot += predicted[i] * target[i];
        pp += predicted[i] * predicted[i];
        tt += target[i] * target[i];
    }
    constexpr double kEps = 1e-12;
    if (std::sqrt(tt) < kEps) {
        throw validation_error("cosine_loss: all-zero target batch");
    }
    if (std::sqrt(pp) < kEps) {
        return 1.0;
    }
    return 1.0 - dot / (std::sqrt(pp) * std::sqrt(tt));
}

void adam_step(model::ModelParameters& params,
               const std::unordered_map<std::string, const Tensor*>& grads, AdamState& state,
               const TrainConfig& config, const AdamOptions& options) {
    ++state.step;
    const double b1 = config.adam_beta1;
    const double b2 = config.adam_beta2;
    const double bc1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(b2, static_cast<double>(state.step));

    params.for_each([&](const std::string& name, Tensor& p) {
        const auto it = grads.find(name);
        if (it == grads.end()) {
            throw validation_error("adam_step: missing gradient for " + name);
        }
        const Tensor& g = *it->second;
        if (g.size() != p.size()) {
            throw validation_error("adam_step: gradient shape mismatch for " + name);
        }
        const bool is_embedding = name == "embedding";
        if (is_embedding && !options.update_embeddings) return;

        auto& mom = state.moments[name];
        if (mom.m.size() != p.size()) {
            mom.m = Tensor::zeros(p.shape);
            mom.v = Tensor::zeros(p.shape);
        }

        std::size_t pad_begin = p.size(), pad_end = p.size();
        if (is_embedding && p.rank() == 2) {
            pad_begin = options.pad_row * p.dim(1);
            pad_end = pad_begin + p.dim(1);
        }
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (i >= pad_begin && i < pad_end) continue;  // frozen <pad> row
            const double gi = g.values[i];
            mom.m.values[i] = b1 * mom.m.values[i] + (1.0 - b1) * gi;
            mom.v.values[i] = b2 * mom.v.values[i] + (1.0 - b2) * gi * gi;
            const double mhat = mom.m.values[i] / bc1;
            const double vhat = mom.v.values[i] / bc2;
            p.values[i] -= config.learning_rate * mhat / (std::sqrt(vhat) + config.adam_epsilon);
        }
    });
}

TrainResult train_one(std::span<const model::SentenceRepresentation> items,
                      std::span<const double> targets, const model::ModelConfig& model_config,
                      const TrainConfig& train_config, const model::Vocabulary& vocab,
                      const lex::LexiconStore* store, std::uint64_t seed) {
    model_config.validate();
    train_config.validate();
    if (items.size() != targets.size()) {
        throw validation_error("train_one: item/target count mismatch");
    }
    if (items.size() < 2) {
        throw validation_error("train_one: need at least two instances");
    }
    for (const double t : targets) {
        if (!(t >= -1.0 && t <= 1.0)) {
            throw validation_error("train_one: targets must lie in [-1, 1]");
        }
    }

    TrainResult result;
    result.params = model::init(model_config, vocab, store, seed);
    AdamState adam;
    const AdamOptions adam_options{model_config.fine_tune_embeddings, vocab.pad_id};

    std::mt19937_64 shuffle_rng(seed ^ kShuffleStream);
    std::mt19937_64 dropout_rng(seed ^ kDropoutStream);

    // Optional early stopping on a held-out slice.
    std::vector<std::size_t> train_idx(items.size());
    std::iota(train_idx.begin(), train_idx.end(), 0);
    std::vector<std::size_t> val_idx;
    if (train_config.early_stop) {
        std::mt19937_64 split_rng(seed ^ kSplitStream);
        seeded_shuffle(train_idx, split_rng);
        const auto n_val = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::floor(static_cast<double>(items.size()) *
                                                   train_config.early_stop_fraction)));
        if (items.size() - n_val < 2) {
            throw validation_error("train_one: early-stop split leaves fewer than two instances");
        }
        val_idx.assign(train_idx.end() - static_cast<std::ptrdiff_t>(n_val), train_idx.end());
        train_idx.resize(items.size() - n_val);
        std::sort(train_idx.begin(), train_idx.end());
    }

    double best_val = -2.0;
    int since_best = 0;
    model::ModelParameters best_params;

    for (int epoch = 0; epoch < train_config.epochs; ++epoch) {
        std::vector<std::size_t> order = train_idx;
        seeded_shuffle(order, shuffle_rng);
        const auto batches = batch_plan(order, targets, train_config.batch_size);

        double epoch_loss = 0.0;
        for (std::size_t bi = 0; bi < batches.size(); ++bi) {
            const auto& batch = batches[bi];
            try {
                Tape tape;
                const model::ParamVars pv = model::register_params(tape, result.params);
                std::vector<Tape::Var> outputs;
                outputs.reserve(batch.size());
                Tensor target = Tensor::zeros({batch.size()});
                for (std::size_t i = 0; i < batch.size(); ++i) {
                    outputs.push_back(model::forward_graph(tape, pv, items[batch[i]],
                                                           model_config, /*training=*/true,
                                                           dropout_rng));
                    target(i) = targets[batch[i]];
                }
                const Tape::Var predictions = tape.concat(outputs);
                const Tape::Var loss = tape.cosine_loss(predictions, target);
                if (tape.degenerate(loss)) ++result.degenerate_batches;

                epoch_loss += tape.value(loss)(0);
                tape.backward(loss);
                adam_step(result.params, collect_grads(tape, pv, result.params), adam,
                          train_config, adam_options);
            } catch (const numeric_error& e) {
                throw numeric_error("epoch " + std::to_string(epoch) + ", batch " +
                                    std::to_string(bi) + ": " + e.what());
            }
        }
        result.epoch_loss.push_back(epoch_loss);
        result.epochs_run = epoch + 1;

        if (train_config.early_stop) {
            std::vector<double> val_pred, val_gold;
            for (const std::size_t i : val_idx) {
                val_pred.push_back(model::predict(items[i], result.params, model_config));
                val_gold.push_back(targets[i]);
            }
            const double val = evaluator::official_metric(val_pred, val_gold);
            if (val > best_val) {
                best_val = val;
                best_params = result.params;
                since_best = 0;
            } else if (++since_best >= train_config.early_stop_patience) {
                result.params = best_params;
                break;
            }
        }
    }
    if (train_config.early_stop && best_params.embedding.size() > 0) {
        result.params = best_params;
    }
    return result;
}

std::vector<double> ensemble_mean(const std::vector<std::vector<double>>& per_model) {
    if (per_model.empty()) {
        throw validation_error("ensemble_mean: no models");
    }
    const std::size_t n = per_model.front().size();
    std::vector<double> mean(n, 0.0);
    for (const auto& row : per_model) {
        if (row.size() != n) {
            throw validation_error("ensemble_mean: ragged prediction matrix");
        }
        for (std::size_t i = 0; i < n; ++i) mean[i] += row[i];
    }
    for (double& v : mean) v /= static_cast<double>(per_model.size());
    return mean;
}

EnsembleResult train_ensemble(std::span<const model::PreparedInstance> train,
                              std::span<const double> targets,
                              std::span<const model::PreparedInstance> test,
                              const model::ModelConfig& model_config,
                              const TrainConfig& train_config, const lex::LexiconStore* store) {
    train_config.validate();

    EnsembleResult result;
    {
        // Representations are built for train and test up front, so the
        // vocabulary covers both; rows for test-only tokens simply never
        // receive gradient updates.
        std::vector<const text::TokenSequence*> corpus;
        corpus.reserve(train.size() + test.size());
        for (const auto& p : train) corpus.push_back(&p.tokens);
        for (const auto& p : test) corpus.push_back(&p.tokens);
        result.vocab = model::Vocabulary::build(corpus);
    }

    std::vector<model::SentenceRepresentation> train_reprs, test_reprs;
    train_reprs.reserve(train.size());
    for (const auto& p : train) train_reprs.push_back(model::represent(p, result.vocab, model_config));
    test_reprs.reserve(test.size());
    for (const auto& p : test) test_reprs.push_back(model::represent(p, result.vocab, model_config));

    const int n_models = train_config.n_models;
    result.models.resize(n_models);
    result.loss_traces.resize(n_models);
    result.prediction.per_model.resize(n_models);

    const auto run_member = [&](int n) {
        try {
            TrainResult tr = train_one(train_reprs, targets, model_config, train_config,
                                       result.vocab, store, train_config.base_seed +
                                       static_cast<std::uint64_t>(n));
            std::vector<double> preds;
            preds.reserve(test_reprs.size());
            for (const auto& repr : test_reprs) {
                preds.push_back(model::predict(repr, tr.params, model_config));
            }
            result.models[n] = std::move(tr.params);
            result.loss_traces[n] = std::move(tr.epoch_loss);
            result.prediction.per_model[n] = std::move(preds);
        } catch (const numeric_error& e) {
            throw numeric_error("model " + std::to_string(n) + ": " + e.what());
        }
    };

    if (train_config.parallel_models && n_models > 1) {
        std::vector<std::future<void>> futures;
        futures.reserve(n_models);
        for (int n = 0; n < n_models; ++n) {
            futures.push_back(std::async(std::launch::async, run_member, n));
        }
        for (auto& f : futures) f.get();
    } else {
        for (int n = 0; n < n_models; ++n) run_member(n);
    }

    result.prediction.mean = ensemble_mean(result.prediction.per_model);
    return result;
}

std::vector<int> fold_assignment(std::size_t n, int folds, std::uint64_t seed) {
    if (folds < 2 || static_cast<std::size_t>(folds) > n) {
        throw validation_error("fold_assignment: folds must lie in [2, dataset size]");
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(seed);
    seeded_shuffle(order, rng);

    std::vector<int> assignment(n, -1);
    const std::size_t base = n / static_cast<std::size_t>(folds);
    const std::size_t extra = n % static_cast<std::size_t>(folds);
    std::size_t pos = 0;
    for (int f = 0; f < folds; ++f) {
        const std::size_t size = base + (static_cast<std::size_t>(f) < extra ? 1 : 0);
        for (std::size_t i = 0; i < size; ++i) assignment[order[pos++]] = f;
    }
    return assignment;
}

CvResult cross_validate(std::span<const model::PreparedInstance> instances,
                        std::span<const double> targets, const model::ModelConfig& model_config,
                        const TrainConfig& train_config, const lex::LexiconStore* store) {
    train_config.validate(/*cv_requested=*/true);
    if (instances.size() != targets.size()) {
        throw validation_error("cross_validate: instance/target count mismatch");
    }

    CvResult cv;
    cv.assignment = fold_assignment(instances.size(), train_config.folds, train_config.base_seed);

    for (int f = 0; f < train_config.folds; ++f) {
        std::vector<model::PreparedInstance> fold_train, fold_test;
        std::vector<double> train_targets, test_targets;
        for (std::size_t i = 0; i < instances.size(); ++i) {
            if (cv.assignment[i] == f) {
                fold_test.push_back(instances[i]);
                test_targets.push_back(targets[i]);
            } else {
                fold_train.push_back(instances[i]);
                train_targets.push_back(targets[i]);
            }
        }
        EnsembleResult ensemble = train_ensemble(fold_train, train_targets, fold_test,
                                                 model_config, train_config, store);
        cv.fold_scores.push_back(
            evaluator::official_metric(ensemble.prediction.mean, test_targets));
        cv.fold_traces.push_back(std::move(ensemble.loss_traces));
    }

    const double n = static_cast<double>(cv.fold_scores.size());
    cv.mean = std::accumulate(cv.fold_scores.begin(), cv.fold_scores.end(), 0.0) / n;
    double ss = 0.0;
    for (const double s : cv.fold_scores) ss += (s - cv.mean) * (s - cv.mean);
    cv.stddev = n > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    return cv;
}

std::string trace_records(const std::vector<std::vector<double>>& loss_traces, int fold) {
    std::ostringstream out;
    const std::string fold_str = fold < 0 ? "-" : std::to_string(fold);
    for (std::size_t m = 0; m < loss_traces.size(); ++m) {
        for (std::size_t e = 0; e < loss_traces[m].size(); ++e) {
            out << "loss\t" << fold_str << '\t' << m << '\t' << e << '\t'
                << util::format_double(loss_traces[m][e], 9) << '\n';
        }
    }
    return out.str();
}

std::string fold_score_records(const std::vector<double>& fold_scores) {
    std::ostringstream out;
    for (std::size_t f = 0; f < fold_scores.size(); ++f) {
        out << "fold_score\t" << f << "\t-\t-\t" << util::format_double(fold_scores[f], 9) << '\n';
    }
    return out.str();
}

}  // namespace finsent::trainer
