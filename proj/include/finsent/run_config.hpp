#pragma once

#include <string>

#include <json.hpp>

#include "finsent/dataset.hpp"
#include "finsent/model.hpp"
#include "finsent/trainer_config.hpp"
#include "finsent/vader.hpp"

namespace finsent::cli {

// Union of every knob a run needs. Snapshots make every default explicit so
// a run can be reproduced bit-identically from its resolved-config file.
struct RunConfig {
    model::ModelConfig model;
    trainer::TrainConfig train;
    vader::RuleConfig rules;

    bool preprocessing = true;
    dataset::Format format = dataset::Format::tsv;
    bool unlabeled = false;

    // Lexica and rule data.
    std::string embeddings_path;
    std::string affective_path;
    std::string valence_path;
    std::string negators_path = "data/vader_negators.txt";
    std::string boosters_path = "data/vader_boosters.tsv";
    std::string rules_path;  // optional key=value override file

    // Data and outputs.
    std::string data_path;
    std::string test_data_path;
    std::string predictions_path;
    std::string gold_path;
    std::string models_dir = "models";
    std::string output_dir = "out";

    nlohmann::json to_json() const;
    static RunConfig from_json(const nlohmann::json& j);
    static RunConfig load(const std::string& path);

    // Resolved snapshot with every default explicit.
    void save_snapshot(const std::string& path) const;

    // Hash over the model/train/rule configs and the preprocessing flag;
    // recorded in model files so an ensemble can be checked for consistency.
    std::uint64_t config_hash() const;
};

}  // namespace finsent::cli
