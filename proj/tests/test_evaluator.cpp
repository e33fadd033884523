#include <doctest.h>

#include <random>

#include "finsent/dataset.hpp"
#include "finsent/errors.hpp"
#include "finsent/evaluator.hpp"
#include "finsent/rng.hpp"

using namespace finsent;

namespace {
const std::string kFixtures = FINSENT_FIXTURE_DIR;
}

TEST_CASE("official_metric") {
    const std::vector<double> g{0.4, -0.2, 0.7, 0.1};

    SUBCASE("perfect agreement gives exactly 1 within rounding") {
        CHECK(evaluator::official_metric(g, g) == doctest::Approx(1.0).epsilon(1e-15));
    }

    SUBCASE("perfect disagreement gives -1") {
        std::vector<double> neg(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) neg[i] = -g[i];
        CHECK(evaluator::official_metric(neg, g) == doctest::Approx(-1.0).epsilon(1e-12));
    }

    SUBCASE("scale invariance: metric(2g, g) = 1") {
        std::vector<double> doubled(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) doubled[i] = 2.0 * g[i];
        CHECK(evaluator::official_metric(doubled, g) == doctest::Approx(1.0).epsilon(1e-12));
    }

    SUBCASE("randomized scale invariance and symmetry") {
        std::mt19937_64 rng(41);
        for (int trial = 0; trial < 200; ++trial) {
            const std::size_t n = 2 + uniform_index(rng, 8);
            std::vector<double> p(n), q(n);
            for (auto& v : p) v = uniform_range(rng, -1.0, 1.0);
            for (auto& v : q) v = uniform_range(rng, -1.0, 1.0);
            p[0] += 1.2;
            q[0] += 1.2;
            const double m = evaluator::official_metric(p, q);
            CHECK(m >= -1.0 - 1e-12);
            CHECK(m <= 1.0 + 1e-12);
            CHECK(evaluator::official_metric(q, p) == doctest::Approx(m).epsilon(1e-12));
            const double c = uniform_range(rng, 0.01, 50.0);
            std::vector<double> scaled(n);
            for (std::size_t i = 0; i < n; ++i) scaled[i] = c * p[i];
            CHECK(evaluator::official_metric(scaled, q) == doctest::Approx(m).epsilon(1e-12));
        }
    }

    SUBCASE("zero-norm predictions score 0 by convention") {
        const std::vector<double> zeros(4, 0.0);
        CHECK(evaluator::official_metric(zeros, g) == 0.0);
    }

    SUBCASE("errors") {
        const std::vector<double> zeros(4, 0.0);
        const std::vector<double> short_vec{0.1};
        CHECK_THROWS_AS(evaluator::official_metric(g, zeros), validation_error);
        CHECK_THROWS_AS(evaluator::official_metric(short_vec, g), validation_error);
    }

    SUBCASE("constant predictor against positive-mean targets is computable") {
        const std::vector<double> constant(4, 0.5);
        const std::vector<double> targets{0.9, 0.1, 0.3, 0.2};
        const double m = evaluator::official_metric(constant, targets);
        CHECK(m > 0.0);
        CHECK(m <= 1.0);
    }
}

TEST_CASE("run_ablations produces three named reports deterministically") {
    lex::LexiconStore store;
    store.embeddings = lex::load_embeddings(kFixtures + "/mini_embeddings.txt");
    store.affective = lex::load_affective(kFixtures + "/mini_affective.tsv");

    const auto instances = dataset::ingest(kFixtures + "/dataset.tsv", dataset::Format::tsv,
                                           /*unlabeled=*/false);

    evaluator::AblationContext ctx;
    ctx.train = instances;
    ctx.store = &store;
    ctx.model.filter_widths = {2, 3};
    ctx.model.filters_per_width = 2;
    ctx.model.dropout_rate = 0.0;
    ctx.model.max_sequence_length = 12;
    ctx.model.use_vader = false;
    ctx.train_config.n_models = 1;
    ctx.train_config.epochs = 2;
    ctx.train_config.batch_size = 4;
    ctx.train_config.folds = 2;

    const auto result = evaluator::run_ablations(ctx);
    REQUIRE(result.reports.size() == 3);
    CHECK(result.cv_mode);
    CHECK(result.reports[0].configuration == "Full");
    CHECK(result.reports[1].configuration == "NoEmbeddings");
    CHECK(result.reports[2].configuration == "NoPreprocessing");
    for (const auto& r : result.reports) {
        CHECK(r.metric >= -1.0);
        CHECK(r.metric <= 1.0);
        CHECK(r.metric_std.has_value());
        CHECK(r.n_instances == instances.size());
    }

    const auto again = evaluator::run_ablations(ctx);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(result.reports[i].metric == again.reports[i].metric);
    }

    const std::string table = evaluator::render_ablation_table(result);
    CHECK(table.find("Full") != std::string::npos);
    CHECK(table.find("NoEmbeddings") != std::string::npos);
    CHECK(table.find("NoPreprocessing") != std::string::npos);
    CHECK(table.find("reference") != std::string::npos);
    CHECK(table.find("observed ordering") != std::string::npos);
    CHECK(table.find("0.701") != std::string::npos);  // reference column, CV mode

    const std::string records = evaluator::ablation_records(result);
    CHECK(records.find("cv\tFull\t") != std::string::npos);
}

TEST_CASE("test-mode ablation evaluates on the held-out set") {
    lex::LexiconStore store;
    store.embeddings = lex::load_embeddings(kFixtures + "/mini_embeddings.txt");
    store.affective = lex::load_affective(kFixtures + "/mini_affective.tsv");

    const auto instances = dataset::ingest(kFixtures + "/dataset.tsv", dataset::Format::tsv,
                                           /*unlabeled=*/false);
    const std::vector<text::RawInstance> train(instances.begin(), instances.begin() + 6);
    const std::vector<text::RawInstance> test(instances.begin() + 6, instances.end());

    evaluator::AblationContext ctx;
    ctx.train = train;
    ctx.test = test;
    ctx.store = &store;
    ctx.model.filter_widths = {2};
    ctx.model.filters_per_width = 2;
    ctx.model.dropout_rate = 0.0;
    ctx.model.max_sequence_length = 12;
    ctx.model.use_vader = false;
    ctx.train_config.n_models = 1;
    ctx.train_config.epochs = 2;
    ctx.train_config.batch_size = 3;

    const auto result = evaluator::run_ablations(ctx);
    CHECK_FALSE(result.cv_mode);
    REQUIRE(result.reports.size() == 3);
    for (const auto& r : result.reports) {
        CHECK(r.n_instances == test.size());
        CHECK(r.predictions.size() == test.size());
        CHECK_FALSE(r.metric_std.has_value());
    }
    const std::string table = evaluator::render_ablation_table(result);
    CHECK(table.find("0.745") != std::string::npos);  // reference column, test mode
}
