#include "finsent/run_config.hpp"

#include "finsent/errors.hpp"
#include "finsent/serialize.hpp"
#include "finsent/util.hpp"

namespace finsent::cli {

nlohmann::json RunConfig::to_json() const {
    nlohmann::json j;
    j["model"] = model;
    j["train"] = train;
    j["rules"] = rules;
    j["preprocessing"] = preprocessing;
    j["format"] = dataset::to_string(format);
    j["unlabeled"] = unlabeled;
    j["paths"] = nlohmann::json{
        {"embeddings", embeddings_path},
        {"affective", affective_path},
        {"valence", valence_path},
        {"negators", negators_path},
        {"boosters", boosters_path},
        {"rules", rules_path},
        {"data", data_path},
        {"test_data", test_data_path},
        {"predictions", predictions_path},
        {"gold", gold_path},
        {"models_dir", models_dir},
        {"output_dir", output_dir},
    };
    return j;
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
    RunConfig cfg;
    if (j.contains("model")) cfg.model = j.at("model").get<model::ModelConfig>();
    if (j.contains("train")) cfg.train = j.at("train").get<trainer::TrainConfig>();
    if (j.contains("rules")) cfg.rules = j.at("rules").get<vader::RuleConfig>();
    if (j.contains("preprocessing")) j.at("preprocessing").get_to(cfg.preprocessing);
    if (j.contains("format")) {
        cfg.format = dataset::format_from_string(j.at("format").get<std::string>());
    }
    if (j.contains("unlabeled")) j.at("unlabeled").get_to(cfg.unlabeled);
    if (j.contains("paths")) {
        const auto& p = j.at("paths");
        const auto get = [&](const char* key, std::string& into) {
            if (p.contains(key)) p.at(key).get_to(into);
        };
        get("embeddings", cfg.embeddings_path);
        get("affective", cfg.affective_path);
        get("valence", cfg.valence_path);
        get("negators", cfg.negators_path);
        get("boosters", cfg.boosters_path);
        get("rules", cfg.rules_path);
        get("data", cfg.data_path);
        get("test_data", cfg.test_data_path);
        get("predictions", cfg.predictions_path);
        get("gold", cfg.gold_path);
        get("models_dir", cfg.models_dir);
        get("output_dir", cfg.output_dir);
    }
    return cfg;
}

RunConfig RunConfig::load(const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(util::read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw validation_error("config " + path + ": " + e.what());
    }
    return from_json(j);
}

void RunConfig::save_snapshot(const std::string& path) const {
    util::write_file(path, to_json().dump(2) + "\n");
}

std::uint64_t RunConfig::config_hash() const {
    nlohmann::json j;
    j["model"] = model;
    j["train"] = train;
    j["rules"] = rules;
    j["preprocessing"] = preprocessing;
    return util::fnv1a(j.dump());
}

}  // namespace finsent::cli
