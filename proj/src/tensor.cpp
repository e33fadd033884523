#include "finsent/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "finsent/errors.hpp"
#include "finsent/rng.hpp"

namespace finsent {

namespace {

std::size_t shape_product(const std::vector<std::size_t>& shape) {
    std::size_t n = 1;
    for (std::size_t d : shape) n *= d;
    return n;
}

}  // namespace

Tensor Tensor::zeros(std::vector<std::size_t> shape) {
    Tensor t;
    t.values.assign(shape_product(shape), 0.0);
    t.shape = std::move(shape);
    return t;
}

Tensor Tensor::from(std::vector<std::size_t> shape, std::vector<double> values) {
    if (shape_product(shape) != values.size()) {
        throw validation_error("tensor: value count does not match shape product");
    }
    Tensor t;
    t.shape = std::move(shape);
    t.values = std::move(values);
    return t;
}

Tensor Tensor::scalar(double v) {
    return from({1}, {v});
}

bool Tensor::finite() const {
    return std::all_of(values.begin(), values.end(),
                       [](double v) { return std::isfinite(v); });
}

std::string shape_string(const Tensor& t) {
    std::string s = "[";
    for (std::size_t i = 0; i < t.shape.size(); ++i) {
        if (i) s += " x ";
        s += std::to_string(t.shape[i]);
    }
    s += "]";
    return s;
}

Tape::Var Tape::push(std::string op, Tensor value, std::function<void()> back) {
    if (!value.finite()) {
        throw numeric_error("non-finite values produced by op '" + op +
                            "' with output shape " + shape_string(value));
    }
    Node n;
    n.value = std::move(value);
    n.grad = Tensor::zeros(n.value.shape);
    n.op = std::move(op);
    n.back = std::move(back);
    nodes_.push_back(std::move(n));
    return Var{static_cast<int>(nodes_.size()) - 1};
}

Tape::Node& Tape::node(Var v) {
    if (v.id < 0 || v.id >= static_cast<int>(nodes_.size())) {
        throw validation_error("tape: invalid variable id");
    }
    return nodes_[static_cast<std::size_t>(v.id)];
}

const Tape::Node& Tape::node(Var v) const {
    if (v.id < 0 || v.id >= static_cast<int>(nodes_.size())) {
        throw validation_error("tape: invalid variable id");
    }
    return nodes_[static_cast<std::size_t>(v.id)];
}

const Tensor& Tape::value(Var v) const { return node(v).value; }
const Tensor& Tape::grad(Var v) const { return node(v).grad; }
bool Tape::degenerate(Var v) const { return node(v).degenerate; }

Tape::Var Tape::leaf(Tensor value, std::string name) {
    return push(std::move(name), std::move(value));
}

Tape::Var Tape::conv1d_valid(Var input, Var filters, Var bias) {
    const Tensor& x = value(input);
    const Tensor& f = value(filters);
    const Tensor& b = value(bias);
    if (x.rank() != 2 || f.rank() != 3 || b.rank() != 1) {
        throw validation_error("conv1d_valid: expected input [L x D], filters [K x k x D], bias [K]");
    }
    const std::size_t L = x.dim(0), D = x.dim(1);
    const std::size_t K = f.dim(0), k = f.dim(1);
    if (f.dim(2) != D) {
        throw validation_error("conv1d_valid: filter depth " + std::to_string(f.dim(2)) +
                               " does not match input depth " + std::to_string(D));
    }
    if (b.dim(0) != K) {
        throw validation_error("conv1d_valid: bias length does not match filter count");
    }
    if (L < k) {
        throw validation_error("conv1d_valid: input length " + std::to_string(L) +
                               " shorter than filter width " + std::to_string(k));
    }

    const std::size_t T = L - k + 1;
    Tensor out = Tensor::zeros({T, K});
    for (std::size_t t = 0; t < T; ++t) {
        for (std::size_t j = 0; j < K; ++j) {
            double acc = b(j);
            for (std::size_t a = 0; a < k; ++a) {
                for (std::size_t d = 0; d < D; ++d) {
                    acc += x(t + a, d) * f(j, a, d);
                }
            }
            out(t, j) = acc;
        }
    }

    const std::size_t out_id = nodes_.size();
    return push("conv1d_valid", std::move(out), [this, input, filters, bias, out_id] {
        const Tensor& xv = nodes_[input.id].value;
        const Tensor& fv = nodes_[filters.id].value;
        Tensor& gx = nodes_[input.id].grad;
        Tensor& gf = nodes_[filters.id].grad;
        Tensor& gb = nodes_[bias.id].grad;
        const Tensor& g = nodes_[out_id].grad;

        const std::size_t K = fv.dim(0), k = fv.dim(1), D = fv.dim(2);
        const std::size_t T = g.dim(0);
        for (std::size_t t = 0; t < T; ++t) {
            for (std::size_t j = 0; j < K; ++j) {
                const double gj = g(t, j);
                gb(j) += gj;
                for (std::size_t a = 0; a < k; ++a) {
                    for (std::size_t d = 0; d < D; ++d) {
                        gx(t + a, d) += gj * fv(j, a, d);
                        gf(j, a, d) += gj * xv(t + a, d);
                    }
                }
            }
        }
    });
}

Tape::Var Tape::global_max_pool(Var input) {
    const Tensor& x = value(input);
    if (x.rank() != 2) {
        throw validation_error("global_max_pool: expected input [T x K]");
    }
    const std::size_t T = x.dim(0), K = x.dim(1);
    if (T == 0) {
        throw validation_error("global_max_pool: empty sequence");
    }

    Tensor out = Tensor::zeros({K});
    std::vector<std::size_t> argmax(K, 0);
    for (std::size_t j = 0; j < K; ++j) {
        double best = x(0, j);
        std::size_t best_t = 0;
        for (std::size_t t = 1; t < T; ++t) {
            if (x(t, j) > best) {  // strict: ties go to the first maximizer
                best = x(t, j);
                best_t = t;
            }
        }
        out(j) = best;
        argmax[j] = best_t;
    }

    const std::size_t out_id = nodes_.size();
    return push("global_max_pool", std::move(out),
                [this, input, argmax = std::move(argmax), out_id] {
        Tensor& gx = nodes_[input.id].grad;
        const Tensor& g = nodes_[out_id].grad;
        for (std::size_t j = 0; j < g.size(); ++j) {
            gx(argmax[j], j) += g(j);
        }
    });
}

Tape::Var Tape::dense(Var input, Var weights, Var bias) {
    const Tensor& x = value(input);
    const Tensor& w = value(weights);
    const Tensor& b = value(bias);
    if (x.rank() != 1 || w.rank() != 2 || b.rank() != 1) {
        throw validation_error("dense: expected input [A], weights [B x A], bias [B]");
    }
    const std::size_t B = w.dim(0), A = w.dim(1);
    if (x.dim(0) != A || b.dim(0) != B) {
        throw validation_error("dense: weights " + shape_string(w) + " incompatible with input " +
                               shape_string(x) + " and bias " + shape_string(b));
    }

    Tensor out = Tensor::zeros({B});
    for (std::size_t i = 0; i < B; ++i) {
        double acc = b(i);
        for (std::size_t j = 0; j < A; ++j) acc += w(i, j) * x(j);
        out(i) = acc;
    }

    const std::size_t out_id = nodes_.size();
    return push("dense", std::move(out), [this, input, weights, bias, out_id] {
        const Tensor& xv = nodes_[input.id].value;
        const Tensor& wv = nodes_[weights.id].value;
        Tensor& gx = nodes_[input.id].grad;
        Tensor& gw = nodes_[weights.id].grad;
        Tensor& gb = nodes_[bias.id].grad;
        const Tensor& g = nodes_[out_id].grad;
        const std::size_t B = wv.dim(0), A = wv.dim(1);
        for (std::size_t i = 0; i < B; ++i) {
            const double gi = g(i);
            gb(i) += gi;
            for (std::size_t j = 0; j < A; ++j) {
                gw(i, j) += gi * xv(j);
                gx(j) += gi * wv(i, j);
            }
        }
    });
}

Tape::Var Tape::relu(Var x) {
    Tensor out = value(x);
    for (double& v : out.values) v = std::max(0.0, v);
    const std::size_t out_id = nodes_.size();
    return push("relu", std::move(out), [this, x, out_id] {
        const Tensor& xv = nodes_[x.id].value;
        Tensor& gx = nodes_[x.id].grad;
        const Tensor& g = nodes_[out_id].grad;
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (xv.values[i] > 0.0) gx.values[i] += g.values[i];
        }
    });
}

Tape::Var Tape::tanh_act(Var x) {
    Tensor out = value(x);
    for (double& v : out.values) {
        v = std::tanh(v);
        // std::tanh rounds to +/-1 for large inputs; keep the output in the
        // open interval (-1, 1).
        if (v >= 1.0) v = std::nextafter(1.0, 0.0);
        else if (v <= -1.0) v = std::nextafter(-1.0, 0.0);
    }
    const std::size_t out_id = nodes_.size();
    return push("tanh", std::move(out), [this, x, out_id] {
        Tensor& gx = nodes_[x.id].grad;
        const Tensor& y = nodes_[out_id].value;
        const Tensor& g = nodes_[out_id].grad;
        for (std::size_t i = 0; i < g.size(); ++i) {
            gx.values[i] += g.values[i] * (1.0 - y.values[i] * y.values[i]);
        }
    });
}

Tape::Var Tape::dropout(Var x, double rate, bool training, std::mt19937_64& rng) {
    if (rate < 0.0 || rate >= 1.0) {
        throw validation_error("dropout: rate must lie in [0, 1)");
    }
    const std::size_t out_id = nodes_.size();
    if (!training || rate == 0.0) {
        Tensor out = value(x);
        return push("dropout", std::move(out), [this, x, out_id] {
            Tensor& gx = nodes_[x.id].grad;
            const Tensor& g = nodes_[out_id].grad;
            for (std::size_t i = 0; i < g.size(); ++i) gx.values[i] += g.values[i];
        });
    }

    const double scale = 1.0 / (1.0 - rate);
    Tensor out = value(x);
    std::vector<double> mask(out.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        mask[i] = (uniform01(rng) < rate) ? 0.0 : scale;
        out.values[i] *= mask[i];
    }
    return push("dropout", std::move(out), [this, x, mask = std::move(mask), out_id] {
        Tensor& gx = nodes_[x.id].grad;
        const Tensor& g = nodes_[out_id].grad;
        for (std::size_t i = 0; i < g.size(); ++i) gx.values[i] += g.values[i] * mask[i];
    });
}

Tape::Var Tape::concat(const std::vector<Var>& parts) {
    if (parts.empty()) {
        throw validation_error("concat: empty part list");
    }
    std::size_t total = 0;
    for (Var p : parts) {
        if (value(p).rank() != 1) {
            throw validation_error("concat: all parts must be rank-1, got " +
                                   shape_string(value(p)));
        }
        total += value(p).size();
    }
    Tensor out = Tensor::zeros({total});
    std::size_t off = 0;
    for (Var p : parts) {
        const Tensor& v = value(p);
        std::copy(v.values.begin(), v.values.end(), out.values.begin() + off);
        off += v.size();
    }
    const std::size_t out_id = nodes_.size();
    return push("concat", std::move(out), [this, parts, out_id] {
        const Tensor& g = nodes_[out_id].grad;
        std::size_t off = 0;
        for (Var p : parts) {
            Tensor& gp = nodes_[p.id].grad;
            for (std::size_t i = 0; i < gp.size(); ++i) gp.values[i] += g.values[off + i];
            off += gp.size();
        }
    });
}

Tape::Var Tape::prepend_row(Var row, Var matrix) {
    const Tensor& r = value(row);
    const Tensor& m = value(matrix);
    if (r.rank() != 1 || m.rank() != 2 || r.dim(0) != m.dim(1)) {
        throw validation_error("prepend_row: row " + shape_string(r) +
                               " incompatible with matrix " + shape_string(m));
    }
    const std::size_t L = m.dim(0), D = m.dim(1);
    Tensor out = Tensor::zeros({L + 1, D});
    std::copy(r.values.begin(), r.values.end(), out.values.begin());
    std::copy(m.values.begin(), m.values.end(), out.values.begin() + D);
    const std::size_t out_id = nodes_.size();
    return push("prepend_row", std::move(out), [this, row, matrix, out_id] {
        Tensor& gr = nodes_[row.id].grad;
        Tensor& gm = nodes_[matrix.id].grad;
        const Tensor& g = nodes_[out_id].grad;
        const std::size_t D = gr.size();
        for (std::size_t i = 0; i < D; ++i) gr.values[i] += g.values[i];
        for (std::size_t i = 0; i < gm.size(); ++i) gm.values[i] += g.values[D + i];
    });
}

Tape::Var Tape::embedding_rows(Var matrix, const std::vector<std::size_t>& ids) {
    const Tensor& m = value(matrix);
    if (m.rank() != 2) {
        throw validation_error("embedding_rows: expected matrix [V x D]");
    }
    if (ids.empty()) {
        throw validation_error("embedding_rows: empty id list");
    }
    const std::size_t V = m.dim(0), D = m.dim(1);
    for (std::size_t id : ids) {
        if (id >= V) {
            throw validation_error("embedding_rows: row index " + std::to_string(id) +
                                   " out of range for " + shape_string(m));
        }
    }
    Tensor out = Tensor::zeros({ids.size(), D});
    for (std::size_t r = 0; r < ids.size(); ++r) {
        for (std::size_t d = 0; d < D; ++d) out(r, d) = m(ids[r], d);
    }
    const std::size_t out_id = nodes_.size();
    return push("embedding_rows", std::move(out), [this, matrix, ids, out_id] {
        Tensor& gm = nodes_[matrix.id].grad;
        const Tensor& g = nodes_[out_id].grad;
        const std::size_t D = gm.dim(1);
        for (std::size_t r = 0; r < ids.size(); ++r) {
            for (std::size_t d = 0; d < D; ++d) gm(ids[r], d) += g(r, d);
        }
    });
}

Tape::Var Tape::cosine_loss(Var predicted, const Tensor& target) {
    const Tensor& p = value(predicted);
    if (p.rank() != 1 || target.rank() != 1 || p.dim(0) != target.dim(0)) {
        throw validation_error("cosine_loss: predicted " + shape_string(p) +
                               " and target " + shape_string(target) + " must be equal-length vectors");
    }
    if (p.dim(0) == 0) {
        throw validation_error("cosine_loss: empty vectors");
    }

    const std::size_t n = p.dim(0);
    double dot = 0.0, pp = 0.0, tt = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        dot += p(i) * target(i);
        pp += p(i) * p(i);
        tt += target(i) * target(i);
    }
    const double pn = std::sqrt(pp);
    const double tn = std::sqrt(tt);
    constexpr double kEps = 1e-12;
    if (tn < kEps) {
        throw validation_error("cosine_loss: all-zero target batch");
    }

    if (pn < kEps) {
        // Degenerate: the prediction has no direction. Loss is 1 and the
        // gradient is defined as zero for this batch.
        Var v = push("cosine_loss", Tensor::scalar(1.0));
        nodes_.back().degenerate = true;
        return v;
    }

    const double cosv = dot / (pn * tn);
    const std::size_t out_id = nodes_.size();
    return push("cosine_loss", Tensor::scalar(1.0 - cosv),
                [this, predicted, tgt = target, pn, tn, cosv, out_id] {
        const Tensor& pv = nodes_[predicted.id].value;
        Tensor& gp = nodes_[predicted.id].grad;
        const double g = nodes_[out_id].grad(0);
        for (std::size_t i = 0; i < pv.size(); ++i) {
            gp(i) += g * (cosv * pv(i) / (pn * pn) - tgt(i) / (pn * tn));
        }
    });
}

void Tape::backward(Var loss) {
    if (backward_done_) {
        throw validation_error("backward: tape already traversed");
    }
    const Tensor& l = value(loss);
    if (l.size() != 1) {
        throw validation_error("backward: loss must be scalar, got " + shape_string(l));
    }
    backward_done_ = true;
    node(loss).grad(0) = 1.0;
    for (std::size_t i = nodes_.size(); i-- > 0;) {
        if (nodes_[i].back) nodes_[i].back();
    }
}

}  // namespace finsent
