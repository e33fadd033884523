#pragma once

#include <cstdint>

namespace finsent::trainer {

struct TrainConfig {
    int n_models = 10;
    int batch_size = 32;  // >= 2; the cosine of a 1-vector batch is degenerate
    int epochs = 30;
    double learning_rate = 1e-3;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_epsilon = 1e-8;
    std::uint64_t base_seed = 42;  // model n trains with base_seed + n
    int folds = 5;
    bool parallel_models = false;

    // Off by default: hold out a fraction of the training data and stop when
    // its cosine metric stops improving, restoring the best parameters.
    bool early_stop = false;
    double early_stop_fraction = 0.1;
    int early_stop_patience = 10;

    void validate(bool cv_requested = false) const;
};

}  // namespace finsent::trainer
