// Command-line front end: train / predict / evaluate / cv / ablate.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "finsent/commands.hpp"
#include "finsent/errors.hpp"

using finsent::cli::RunConfig;

namespace {

struct CommonFlags {
    std::string config;
    std::string data, test_data, format;
    std::string embeddings, affective, valence, negators, boosters, rules;
    std::string models_dir, output_dir, predictions, gold;
    std::int64_t seed = 0;
    int folds = 0, n_models = 0, epochs = 0, batch_size = 0;
    double learning_rate = -1.0;
    bool no_embeddings = false, no_preprocessing = false, no_vader = false, unlabeled = false;
    bool parallel = false;
};

void add_common_flags(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config, "JSON run-config file; flags override its values");
    cmd->add_option("--data", f.data, "dataset path");
    cmd->add_option("--test-data", f.test_data, "held-out test dataset path");
    cmd->add_option("--format", f.format, "dataset format: tsv|jsonl")
        ->check(CLI::IsMember({"tsv", "jsonl"}));
    cmd->add_option("--embeddings", f.embeddings, "embedding file (token v1 ... vd per line)");
    cmd->add_option("--affective", f.affective, "affective lexicon TSV with header");
    cmd->add_option("--valence", f.valence, "valence lexicon TSV");
    cmd->add_option("--negators", f.negators, "negator word list");
    cmd->add_option("--boosters", f.boosters, "booster word list TSV");
    cmd->add_option("--rules", f.rules, "rule constants file (key=value)");
    cmd->add_option("--models-dir", f.models_dir, "directory for model files");
    cmd->add_option("--out", f.output_dir, "output directory");
    cmd->add_option("--predictions", f.predictions, "predictions file path");
    cmd->add_option("--gold", f.gold, "gold dataset path (evaluate)");
    cmd->add_option("--seed", f.seed, "base seed; model n uses seed+n");
    cmd->add_option("--folds", f.folds, "cross-validation folds");
    cmd->add_option("--n-models", f.n_models, "ensemble size");
    cmd->add_option("--epochs", f.epochs, "training epochs");
    cmd->add_option("--batch-size", f.batch_size, "mini-batch size (>= 2)");
    cmd->add_option("--learning-rate", f.learning_rate, "Adam learning rate");
    cmd->add_flag("--no-embeddings", f.no_embeddings, "ablation: random token vectors");
    cmd->add_flag("--no-preprocessing", f.no_preprocessing, "ablation: skip masking");
    cmd->add_flag("--no-vader", f.no_vader, "ablation: drop the rule-based score");
    cmd->add_flag("--unlabeled", f.unlabeled, "input rows carry no score column");
    cmd->add_flag("--parallel", f.parallel, "train ensemble members on separate threads");
}

RunConfig build_config(const CLI::App* cmd, const CommonFlags& f) {
    RunConfig cfg;
    if (cmd->count("--config")) cfg = RunConfig::load(f.config);

    const auto set_if = [&](const char* flag, auto&& apply) {
        if (cmd->count(flag)) apply();
    };
    set_if("--data", [&] { cfg.data_path = f.data; });
    set_if("--test-data", [&] { cfg.test_data_path = f.test_data; });
    set_if("--format", [&] { cfg.format = finsent::dataset::format_from_string(f.format); });
    set_if("--embeddings", [&] { cfg.embeddings_path = f.embeddings; });
    set_if("--affective", [&] { cfg.affective_path = f.affective; });
    set_if("--valence", [&] { cfg.valence_path = f.valence; });
    set_if("--negators", [&] { cfg.negators_path = f.negators; });
    set_if("--boosters", [&] { cfg.boosters_path = f.boosters; });
    set_if("--rules", [&] { cfg.rules_path = f.rules; });
    set_if("--models-dir", [&] { cfg.models_dir = f.models_dir; });
    set_if("--out", [&] { cfg.output_dir = f.output_dir; });
    set_if("--predictions", [&] { cfg.predictions_path = f.predictions; });
    set_if("--gold", [&] { cfg.gold_path = f.gold; });
    set_if("--seed", [&] { cfg.train.base_seed = static_cast<std::uint64_t>(f.seed); });
    set_if("--folds", [&] { cfg.train.folds = f.folds; });
    set_if("--n-models", [&] { cfg.train.n_models = f.n_models; });
    set_if("--epochs", [&] { cfg.train.epochs = f.epochs; });
    set_if("--batch-size", [&] { cfg.train.batch_size = f.batch_size; });
    set_if("--learning-rate", [&] { cfg.train.learning_rate = f.learning_rate; });
    set_if("--no-embeddings", [&] { cfg.model.use_embeddings = false; });
    set_if("--no-preprocessing", [&] { cfg.preprocessing = false; });
    set_if("--no-vader", [&] { cfg.model.use_vader = false; });
    set_if("--unlabeled", [&] { cfg.unlabeled = true; });
    set_if("--parallel", [&] { cfg.train.parallel_models = true; });
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Financial-headline sentiment regressor: an ensemble of small 1D conv nets "
                 "over word-embedding + affective-lexicon token vectors with a rule-based "
                 "valence feature"};
    app.require_subcommand(1);

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"train", "train an ensemble and write model files + manifest"},
        {"predict", "score unlabeled headlines with a trained ensemble"},
        {"evaluate", "cosine metric of a predictions file against gold labels"},
        {"cv", "k-fold cross-validation on a labeled dataset"},
        {"ablate", "run the Full / NoEmbeddings / NoPreprocessing comparison"},
    };

    std::vector<std::unique_ptr<CommonFlags>> flag_sets;
    std::vector<CLI::App*> subcommands;
    for (const auto& [name, description] : commands) {
        auto* cmd = app.add_subcommand(name, description);
        flag_sets.push_back(std::make_unique<CommonFlags>());
        add_common_flags(cmd, *flag_sets.back());
        subcommands.push_back(cmd);
    }

    CLI11_PARSE(app, argc, argv);

    for (std::size_t i = 0; i < subcommands.size(); ++i) {
        if (subcommands[i]->parsed()) {
            try {
                return finsent::cli::run_command(commands[i].first,
                                                 build_config(subcommands[i], *flag_sets[i]));
            } catch (const finsent::validation_error& e) {
                std::cerr << "error: " << e.what() << "\n";
                return 2;
            } catch (const std::exception& e) {
                std::cerr << "runtime error: " << e.what() << "\n";
                return 3;
            }
        }
    }
    return 2;
}
