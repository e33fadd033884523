#include <doctest.h>

#include <random>

#include "finsent/errors.hpp"
#include "finsent/tensor.hpp"
#include "reference_kernels.hpp"

using namespace finsent;
using testref::random_tensor;

TEST_CASE("tensor shape/value consistency is enforced") {
    CHECK_THROWS_AS(Tensor::from({2, 3}, {1.0, 2.0}), validation_error);
    const Tensor t = Tensor::zeros({2, 3});
    CHECK(t.size() == 6);
    CHECK(t.rank() == 2);
}

TEST_CASE("conv1d_valid spec examples") {
    Tape tape;
    std::mt19937_64 rng(1);

    SUBCASE("all-zero input and bias give all-zero output") {
        const auto x = tape.leaf(Tensor::zeros({4, 2}));
        const auto f = tape.leaf(random_tensor({3, 2, 2}, rng));
        const auto b = tape.leaf(Tensor::zeros({3}));
        const auto out = tape.conv1d_valid(x, f, b);
        for (const double v : tape.value(out).values) CHECK(v == 0.0);
    }

    SUBCASE("L=3 D=1 k=2 K=1 example") {
        const auto x = tape.leaf(Tensor::from({3, 1}, {1, 2, 3}));
        const auto f = tape.leaf(Tensor::from({1, 2, 1}, {1, 1}));
        const auto b = tape.leaf(Tensor::zeros({1}));
        const auto out = tape.conv1d_valid(x, f, b);
        CHECK(tape.value(out).shape == std::vector<std::size_t>{2, 1});
        CHECK(tape.value(out)(0, 0) == doctest::Approx(3.0));
        CHECK(tape.value(out)(1, 0) == doctest::Approx(5.0));
    }

    SUBCASE("k equal to L yields a single output position") {
        const auto x = tape.leaf(Tensor::from({2, 1}, {1, 2}));
        const auto f = tape.leaf(Tensor::from({1, 2, 1}, {1, 1}));
        const auto b = tape.leaf(Tensor::from({1}, {0.5}));
        const auto out = tape.conv1d_valid(x, f, b);
        CHECK(tape.value(out).shape == std::vector<std::size_t>{1, 1});
        CHECK(tape.value(out)(0, 0) == doctest::Approx(3.5));
    }

    SUBCASE("input shorter than the filter is a shape error") {
        const auto x = tape.leaf(Tensor::zeros({1, 2}));
        const auto f = tape.leaf(Tensor::zeros({1, 2, 2}));
        const auto b = tape.leaf(Tensor::zeros({1}));
        CHECK_THROWS_AS(tape.conv1d_valid(x, f, b), validation_error);
    }
}

TEST_CASE("conv1d_valid matches the brute-force reference on random shapes") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t k = 1 + uniform_index(rng, 4);
        const std::size_t L = k + uniform_index(rng, 9);
        const std::size_t D = 1 + uniform_index(rng, 5);
        const std::size_t K = 1 + uniform_index(rng, 4);

        Tape tape;
        const Tensor xt = random_tensor({L, D}, rng);
        const Tensor ft = random_tensor({K, k, D}, rng);
        const Tensor bt = random_tensor({K}, rng);
        const auto out =
            tape.conv1d_valid(tape.leaf(xt), tape.leaf(ft), tape.leaf(bt));

        const auto ref = testref::conv1d_reference(xt.values, L, D, ft.values, K, k, bt.values);
        REQUIRE(tape.value(out).size() == ref.size());
        for (std::size_t i = 0; i < ref.size(); ++i) {
            CHECK(tape.value(out).values[i] == doctest::Approx(ref[i]).epsilon(1e-12));
        }
    }
}

TEST_CASE("global_max_pool behavior") {
    Tape tape;

    SUBCASE("single row is returned as is") {
        const auto x = tape.leaf(Tensor::from({1, 3}, {1, -2, 5}));
        const auto out = tape.global_max_pool(x);
        CHECK(tape.value(out).values == std::vector<double>{1, -2, 5});
    }

    SUBCASE("column example") {
        const auto x = tape.leaf(Tensor::from({3, 1}, {1, 3, 2}));
        CHECK(tape.value(tape.global_max_pool(x))(0) == doctest::Approx(3.0));
    }

    SUBCASE("permutation invariance and reference agreement") {
        std::mt19937_64 rng(11);
        for (int trial = 0; trial < 100; ++trial) {
            const std::size_t T = 1 + uniform_index(rng, 8);
            const std::size_t K = 1 + uniform_index(rng, 5);
            const Tensor xt = random_tensor({T, K}, rng);

            Tape t1;
            const auto pooled = t1.value(t1.global_max_pool(t1.leaf(xt)));
            const auto ref = testref::max_pool_reference(xt.values, T, K);
            for (std::size_t i = 0; i < K; ++i) {
                CHECK(pooled.values[i] == doctest::Approx(ref[i]).epsilon(1e-12));
            }

            // Shuffle rows; the pooled vector must not change.
            std::vector<std::size_t> rows(T);
            for (std::size_t i = 0; i < T; ++i) rows[i] = i;
            seeded_shuffle(rows, rng);
            Tensor shuffled = Tensor::zeros({T, K});
            for (std::size_t r = 0; r < T; ++r) {
                for (std::size_t j = 0; j < K; ++j) shuffled(r, j) = xt(rows[r], j);
            }
            Tape t2;
            const auto pooled2 = t2.value(t2.global_max_pool(t2.leaf(shuffled)));
            for (std::size_t i = 0; i < K; ++i) {
                CHECK(pooled2.values[i] == doctest::Approx(pooled.values[i]).epsilon(1e-12));
            }
        }
    }

    SUBCASE("gradient is one-hot per channel, ties to the first maximizer") {
        Tape t;
        const auto x = t.leaf(Tensor::from({3, 2}, {5, 1, 5, 2, 3, 2}));
        const auto pooled = t.global_max_pool(x);
        // Reduce to scalar so backward has a scalar root.
        const auto w = t.leaf(Tensor::from({1, 2}, {1, 1}));
        const auto b = t.leaf(Tensor::zeros({1}));
        const auto loss = t.dense(pooled, w, b);
        t.backward(loss);
        const Tensor& gx = t.grad(x);
        // Column 0: rows 0 and 1 tie at 5 -> row 0 takes the gradient.
        CHECK(gx(0, 0) == 1.0);
        CHECK(gx(1, 0) == 0.0);
        // Column 1: rows 1 and 2 tie at 2 -> row 1 takes the gradient.
        CHECK(gx(1, 1) == 1.0);
        CHECK(gx(2, 1) == 0.0);
    }
}

TEST_CASE("activations") {
    Tape tape;
    const auto x = tape.leaf(Tensor::from({3}, {-1, 0, 2}));
    CHECK(tape.value(tape.relu(x)).values == std::vector<double>{0, 0, 2});

    const auto z = tape.leaf(Tensor::scalar(0.0));
    CHECK(tape.value(tape.tanh_act(z))(0) == 0.0);

    const auto big = tape.leaf(Tensor::scalar(50.0));
    const double y = tape.value(tape.tanh_act(big))(0);
    CHECK(y < 1.0);
    CHECK(y > 0.999);
}

TEST_CASE("dropout") {
    std::mt19937_64 rng(3);

    SUBCASE("rate zero and inference mode are identities") {
        Tape tape;
        const Tensor xt = random_tensor({10}, rng);
        const auto x = tape.leaf(xt);
        CHECK(tape.value(tape.dropout(x, 0.0, true, rng)).values == xt.values);
        CHECK(tape.value(tape.dropout(x, 0.7, false, rng)).values == xt.values);
    }

    SUBCASE("rate >= 1 is rejected") {
        Tape tape;
        const auto x = tape.leaf(Tensor::scalar(1.0));
        CHECK_THROWS_AS(tape.dropout(x, 1.0, true, rng), validation_error);
    }

    SUBCASE("inverted scaling keeps the mean near 1 on a vector of ones") {
        // Element variance is rate/(1-rate) = 1 at rate 0.5, so the mean of
        // n = 10^4 elements has sigma = 0.01.
        Tape tape;
        const std::size_t n = 10000;
        const auto x = tape.leaf(Tensor::from({n}, std::vector<double>(n, 1.0)));
        const auto out = tape.dropout(x, 0.5, true, rng);
        double mean = 0.0;
        for (const double v : tape.value(out).values) mean += v;
        mean /= static_cast<double>(n);
        CHECK(std::fabs(mean - 1.0) < 0.03);  // 3 sigma
    }

    SUBCASE("backward reuses the forward mask") {
        Tape tape;
        const std::size_t n = 64;
        const auto x = tape.leaf(Tensor::from({n}, std::vector<double>(n, 1.0)));
        const auto dropped = tape.dropout(x, 0.5, true, rng);
        const auto w = tape.leaf(Tensor::from({1, n}, std::vector<double>(n, 1.0)));
        const auto b = tape.leaf(Tensor::zeros({1}));
        const auto loss = tape.dense(dropped, w, b);
        tape.backward(loss);
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(tape.grad(x).values[i] == tape.value(dropped).values[i]);
        }
    }
}

TEST_CASE("concat") {
    Tape tape;
    const auto a = tape.leaf(Tensor::from({2}, {1, 2}));
    const auto b = tape.leaf(Tensor::from({1}, {3}));
    const auto joined = tape.concat({a, b});
    CHECK(tape.value(joined).values == std::vector<double>{1, 2, 3});

    const auto single = tape.concat({a});
    CHECK(tape.value(single).values == std::vector<double>{1, 2});

    const auto c = tape.leaf(Tensor::from({3}, {0, 0, 0}));
    CHECK(tape.value(tape.concat({a, b, c})).size() == 6);

    CHECK_THROWS_AS(tape.concat({}), validation_error);
}

TEST_CASE("backward basics") {
    SUBCASE("constant loss leaves all gradients zero") {
        Tape tape;
        const auto p = tape.leaf(Tensor::from({3}, {1, 2, 3}));
        const auto loss = tape.leaf(Tensor::scalar(5.0));
        tape.backward(loss);
        for (const double g : tape.grad(p).values) CHECK(g == 0.0);
    }

    SUBCASE("linear loss gives a gradient of ones") {
        Tape tape;
        const auto p = tape.leaf(Tensor::from({4}, {1, 2, 3, 4}));
        const auto w = tape.leaf(Tensor::from({1, 4}, {1, 1, 1, 1}));
        const auto b = tape.leaf(Tensor::zeros({1}));
        const auto loss = tape.dense(p, w, b);
        tape.backward(loss);
        for (const double g : tape.grad(p).values) CHECK(g == 1.0);
    }

    SUBCASE("non-scalar loss is rejected") {
        Tape tape;
        const auto p = tape.leaf(Tensor::from({2}, {1, 2}));
        CHECK_THROWS_AS(tape.backward(p), validation_error);
    }

    SUBCASE("fan-out accumulates additively") {
        // loss = dense([x, x]) with unit weights = 2x  ->  dloss/dx = 2.
        Tape tape;
        const auto x = tape.leaf(Tensor::scalar(3.0));
        const auto both = tape.concat({x, x});
        const auto w = tape.leaf(Tensor::from({1, 2}, {1, 1}));
        const auto b = tape.leaf(Tensor::zeros({1}));
        const auto loss = tape.dense(both, w, b);
        tape.backward(loss);
        CHECK(tape.grad(x)(0) == 2.0);
    }
}

TEST_CASE("per-op gradients match central finite differences") {
    std::mt19937_64 rng(23);

    // Small random network exercising every differentiable op: embedding
    // gather -> prepend_row -> conv -> relu -> pool; concat with a dense
    // path; cosine loss head.
    const Tensor emb0 = random_tensor({6, 3}, rng);
    const Tensor row0 = random_tensor({3}, rng);
    const Tensor f0 = random_tensor({2, 2, 3}, rng, -0.7, 0.7);
    const Tensor cb0 = random_tensor({2}, rng, -0.2, 0.2);
    const Tensor w0 = random_tensor({2, 2}, rng);
    const Tensor b0 = random_tensor({2}, rng);
    const std::vector<std::size_t> ids{1, 4, 2, 0};
    const Tensor target = Tensor::from({2}, {0.8, -0.4});

    const auto forward = [&](const std::vector<Tensor>& leaves) {
        Tape tape;
        const auto emb = tape.leaf(leaves[0]);
        const auto row = tape.leaf(leaves[1]);
        const auto f = tape.leaf(leaves[2]);
        const auto cb = tape.leaf(leaves[3]);
        const auto w = tape.leaf(leaves[4]);
        const auto b = tape.leaf(leaves[5]);

        const auto gathered = tape.embedding_rows(emb, ids);
        const auto with_row = tape.prepend_row(row, gathered);
        const auto conv = tape.conv1d_valid(with_row, f, cb);
        const auto pooled = tape.global_max_pool(tape.relu(conv));
        const auto out = tape.tanh_act(tape.dense(pooled, w, b));
        const auto loss = tape.cosine_loss(out, target);
        return tape.value(loss)(0);
    };

    Tape tape;
    const auto emb = tape.leaf(emb0);
    const auto row = tape.leaf(row0);
    const auto f = tape.leaf(f0);
    const auto cb = tape.leaf(cb0);
    const auto w = tape.leaf(w0);
    const auto b = tape.leaf(b0);
    const auto gathered = tape.embedding_rows(emb, ids);
    const auto with_row = tape.prepend_row(row, gathered);
    const auto conv = tape.conv1d_valid(with_row, f, cb);
    const auto pooled = tape.global_max_pool(tape.relu(conv));
    const auto out = tape.tanh_act(tape.dense(pooled, w, b));
    const auto loss = tape.cosine_loss(out, target);
    tape.backward(loss);

    const std::vector<Tensor> leaves{emb0, row0, f0, cb0, w0, b0};
    const std::vector<Tensor> grads{tape.grad(emb), tape.grad(row), tape.grad(f),
                                    tape.grad(cb), tape.grad(w), tape.grad(b)};
    CHECK(testref::max_relative_grad_error(forward, leaves, grads) < 1e-4);
}

TEST_CASE("cosine loss on the tape") {
    SUBCASE("degenerate prediction gives loss 1 with zero gradient") {
        Tape tape;
        const auto p = tape.leaf(Tensor::from({2}, {0.0, 0.0}));
        const auto loss = tape.cosine_loss(p, Tensor::from({2}, {1.0, 0.0}));
        CHECK(tape.value(loss)(0) == 1.0);
        CHECK(tape.degenerate(loss));
        tape.backward(loss);
        CHECK(tape.grad(p).values == std::vector<double>{0.0, 0.0});
    }

    SUBCASE("all-zero target is a data error") {
        Tape tape;
        const auto p = tape.leaf(Tensor::from({2}, {1.0, 0.0}));
        CHECK_THROWS_AS(tape.cosine_loss(p, Tensor::from({2}, {0.0, 0.0})), validation_error);
    }
}

TEST_CASE("non-finite op outputs abort with op diagnostics") {
    Tape tape;
    const auto x = tape.leaf(Tensor::from({1}, {1e308}));
    const auto w = tape.leaf(Tensor::from({1, 1}, {1e308}));
    const auto b = tape.leaf(Tensor::zeros({1}));
    CHECK_THROWS_WITH_AS(tape.dense(x, w, b),
                         doctest::Contains("dense"), numeric_error);
}
