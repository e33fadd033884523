// Test-only reference implementations, kept independent of the tape ops
// they check.
#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "finsent/rng.hpp"
#include "finsent/tensor.hpp"

namespace finsent::testref {

// Plain nested-loop convolution over flat arrays; indexing is written out
// by hand rather than shared with the production kernel.
inline std::vector<double> conv1d_reference(const std::vector<double>& input, std::size_t L,
                                            std::size_t D, const std::vector<double>& filters,
                                            std::size_t K, std::size_t k,
                                            const std::vector<double>& bias) {
    const std::size_t T = L - k + 1;
    std::vector<double> out(T * K, 0.0);
    for (std::size_t j = 0; j < K; ++j) {
        for (std::size_t t = 0; t < T; ++t) {
            double acc = bias[j];
            for (std::size_t a = 0; a < k; ++a) {
                for (std::size_t d = 0; d < D; ++d) {
                    acc += input[(t + a) * D + d] * filters[j * k * D + a * D + d];
                }
            }
            out[t * K + j] = acc;
        }
    }
    return out;
}

inline std::vector<double> max_pool_reference(const std::vector<double>& input, std::size_t T,
                                              std::size_t K) {
    std::vector<double> out(K);
    for (std::size_t j = 0; j < K; ++j) {
        double best = input[j];
        for (std::size_t t = 1; t < T; ++t) best = std::max(best, input[t * K + j]);
        out[j] = best;
    }
    return out;
}

inline Tensor random_tensor(std::vector<std::size_t> shape, std::mt19937_64& rng, double lo = -1.0,
                            double hi = 1.0) {
    Tensor t = Tensor::zeros(std::move(shape));
    for (double& v : t.values) v = uniform_range(rng, lo, hi);
    return t;
}

// Central finite differences against reverse-mode gradients.
//
// `forward` rebuilds the computation from scratch for a given set of leaf
// tensors and returns the scalar output. `analytic` holds the autodiff
// gradients for the same leaves. Returns the max relative error
// |g_ad - g_fd| / max(|g_ad|, |g_fd|, floor).
inline double max_relative_grad_error(
    const std::function<double(const std::vector<Tensor>&)>& forward, std::vector<Tensor> leaves,
    const std::vector<Tensor>& analytic, double h = 1e-5, double floor = 1e-8) {
    double worst = 0.0;
    for (std::size_t l = 0; l < leaves.size(); ++l) {
        for (std::size_t i = 0; i < leaves[l].size(); ++i) {
            const double saved = leaves[l].values[i];
            leaves[l].values[i] = saved + h;
            const double up = forward(leaves);
            leaves[l].values[i] = saved - h;
            const double down = forward(leaves);
            leaves[l].values[i] = saved;

            const double fd = (up - down) / (2.0 * h);
            const double ad = analytic[l].values[i];
            const double denom = std::max({std::fabs(ad), std::fabs(fd), floor});
            worst = std::max(worst, std::fabs(ad - fd) / denom);
        }
    }
    return worst;
}

}  // namespace finsent::testref
