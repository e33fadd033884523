#pragma once

#include <cstddef>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace finsent {

// Dense row-major tensor of doubles. Training runs in double precision
// throughout so gradient checks against finite differences are meaningful.
struct Tensor {
    std::vector<std::size_t> shape;
    std::vector<double> values;

    Tensor() = default;

    static Tensor zeros(std::vector<std::size_t> shape);
    static Tensor from(std::vector<std::size_t> shape, std::vector<double> values);
    static Tensor scalar(double v);

    std::size_t size() const { return values.size(); }
    std::size_t rank() const { return shape.size(); }
    std::size_t dim(std::size_t i) const { return shape.at(i); }

    // Row-major element access; rank is the caller's responsibility.
    double  operator()(std::size_t i) const { return values[i]; }
    double& operator()(std::size_t i) { return values[i]; }
    double  operator()(std::size_t i, std::size_t j) const { return values[i * shape[1] + j]; }
    double& operator()(std::size_t i, std::size_t j) { return values[i * shape[1] + j]; }
    double  operator()(std::size_t i, std::size_t j, std::size_t k) const {
        return values[(i * shape[1] + j) * shape[2] + k];
    }
    double& operator()(std::size_t i, std::size_t j, std::size_t k) {
        return values[(i * shape[1] + j) * shape[2] + k];
    }

    bool finite() const;
};

std::string shape_string(const Tensor& t);

// Reverse-mode tape covering exactly the ops the network needs. Every op
// validates its input shapes and rejects non-finite outputs with a
// numeric_error carrying the op name and shapes. A Tape is single-threaded;
// independent tapes may run concurrently on independent data.
class Tape {
public:
    struct Var {
        int id = -1;
    };

    Tape() = default;
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    // Registers an input or parameter value as a leaf.
    Var leaf(Tensor value, std::string name = "leaf");

    // Valid (no padding) 1D convolution.
    //   input [L x D], filters [K x k x D], bias [K]  ->  [(L-k+1) x K]
    //   out[t][j] = bias[j] + sum_{a<k, d<D} input[t+a][d] * filters[j][a][d]
    Var conv1d_valid(Var input, Var filters, Var bias);

    // Column-wise max over rows: [T x K] -> [K]. The gradient is routed to
    // the first (lowest-index) maximizing row per channel.
    Var global_max_pool(Var input);

    // out = weights * x + bias with weights [B x A], x [A], bias [B].
    Var dense(Var input, Var weights, Var bias);

    Var relu(Var x);
    Var tanh_act(Var x);

    // Inverted dropout: in training mode each element is zeroed independently
    // with probability `rate` and survivors are scaled by 1/(1-rate);
    // inference mode is the identity.
    Var dropout(Var x, double rate, bool training, std::mt19937_64& rng);

    // Rank-1 parts joined in order into a single vector.
    Var concat(const std::vector<Var>& parts);

    // Prepends a row vector [D] to a matrix [L x D] giving [(L+1) x D].
    Var prepend_row(Var row, Var matrix);

    // Gathers matrix rows by index: [V x D] + ids -> [n x D]. The backward
    // pass scatters gradients back into the selected rows.
    Var embedding_rows(Var matrix, const std::vector<std::size_t>& ids);

    // 1 - cos(predicted, target) against a constant target vector. If the
    // predicted vector's norm falls below 1e-12 the loss is 1 with zero
    // gradient and the node is flagged degenerate.
    Var cosine_loss(Var predicted, const Tensor& target);
    bool degenerate(Var v) const;

    // Reverse pass from a scalar loss. Traverses ops in exact reverse
    // execution order; gradients accumulate additively at fan-out.
    void backward(Var loss);

    const Tensor& value(Var v) const;
    const Tensor& grad(Var v) const;

private:
    struct Node {
        Tensor value;
        Tensor grad;
        std::string op;
        std::function<void()> back;  // adds into the grads of upstream nodes
        bool degenerate = false;
    };

    std::vector<Node> nodes_;
    bool backward_done_ = false;

    Var push(std::string op, Tensor value, std::function<void()> back = {});
    Node& node(Var v);
    const Node& node(Var v) const;
};

}  // namespace finsent
