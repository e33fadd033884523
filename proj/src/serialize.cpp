#include "finsent/serialize.hpp"

namespace finsent::model {

void to_json(nlohmann::json& j, const ModelConfig& c) {
    j = nlohmann::json{
        {"filter_widths", c.filter_widths},
        {"filters_per_width", c.filters_per_width},
        {"dropout_rate", c.dropout_rate},
        {"dropout_position", to_string(c.dropout_position)},
        {"hidden_units", c.hidden_units},
        {"fine_tune_embeddings", c.fine_tune_embeddings},
        {"use_embeddings", c.use_embeddings},
        {"use_vader", c.use_vader},
        {"vader_position", to_string(c.vader_position)},
        {"max_sequence_length", c.max_sequence_length},
        {"random_embedding_dim", c.random_embedding_dim},
    };
}

void from_json(const nlohmann::json& j, ModelConfig& c) {
    c = ModelConfig{};
    if (j.contains("filter_widths")) j.at("filter_widths").get_to(c.filter_widths);
    if (j.contains("filters_per_width")) j.at("filters_per_width").get_to(c.filters_per_width);
    if (j.contains("dropout_rate")) j.at("dropout_rate").get_to(c.dropout_rate);
    if (j.contains("dropout_position")) {
        c.dropout_position = dropout_position_from_string(j.at("dropout_position").get<std::string>());
    }
    if (j.contains("hidden_units")) j.at("hidden_units").get_to(c.hidden_units);
    if (j.contains("fine_tune_embeddings")) j.at("fine_tune_embeddings").get_to(c.fine_tune_embeddings);
    if (j.contains("use_embeddings")) j.at("use_embeddings").get_to(c.use_embeddings);
    if (j.contains("use_vader")) j.at("use_vader").get_to(c.use_vader);
    if (j.contains("vader_position")) {
        c.vader_position = vader_position_from_string(j.at("vader_position").get<std::string>());
    }
    if (j.contains("max_sequence_length")) j.at("max_sequence_length").get_to(c.max_sequence_length);
    if (j.contains("random_embedding_dim")) j.at("random_embedding_dim").get_to(c.random_embedding_dim);
}

}  // namespace finsent::model

namespace finsent::trainer {

void to_json(nlohmann::json& j, const TrainConfig& c) {
    j = nlohmann::json{
        {"n_models", c.n_models},
        {"batch_size", c.batch_size},
        {"epochs", c.epochs},
        {"learning_rate", c.learning_rate},
        {"adam_beta1", c.adam_beta1},
        {"adam_beta2", c.adam_beta2},
        {"adam_epsilon", c.adam_epsilon},
        {"base_seed", c.base_seed},
        {"folds", c.folds},
        {"parallel_models", c.parallel_models},
        {"early_stop", c.early_stop},
        {"early_stop_fraction", c.early_stop_fraction},
        {"early_stop_patience", c.early_stop_patience},
    };
}

void from_json(const nlohmann::json& j, TrainConfig& c) {
    c = TrainConfig{};
    if (j.contains("n_models")) j.at("n_models").get_to(c.n_models);
    if (j.contains("batch_size")) j.at("batch_size").get_to(c.batch_size);
    if (j.contains("epochs")) j.at("epochs").get_to(c.epochs);
    if (j.contains("learning_rate")) j.at("learning_rate").get_to(c.learning_rate);
    if (j.contains("adam_beta1")) j.at("adam_beta1").get_to(c.adam_beta1);
    if (j.contains("adam_beta2")) j.at("adam_beta2").get_to(c.adam_beta2);
    if (j.contains("adam_epsilon")) j.at("adam_epsilon").get_to(c.adam_epsilon);
    if (j.contains("base_seed")) j.at("base_seed").get_to(c.base_seed);
    if (j.contains("folds")) j.at("folds").get_to(c.folds);
    if (j.contains("parallel_models")) j.at("parallel_models").get_to(c.parallel_models);
    if (j.contains("early_stop")) j.at("early_stop").get_to(c.early_stop);
    if (j.contains("early_stop_fraction")) j.at("early_stop_fraction").get_to(c.early_stop_fraction);
    if (j.contains("early_stop_patience")) j.at("early_stop_patience").get_to(c.early_stop_patience);
}

}  // namespace finsent::trainer

namespace finsent::vader {

void to_json(nlohmann::json& j, const RuleConfig& c) {
    j = nlohmann::json{
        {"negation_window", c.negation_window},
        {"negation_factor", c.negation_factor},
        {"booster_increment", c.booster_increment},
        {"caps_increment", c.caps_increment},
        {"exclamation_increment_per_mark", c.exclamation_increment_per_mark},
        {"exclamation_cap", c.exclamation_cap},
        {"but_weight_before", c.but_weight_before},
        {"but_weight_after", c.but_weight_after},
        {"normalization_alpha", c.normalization_alpha},
        {"enable_boosters", c.enable_boosters},
        {"enable_caps", c.enable_caps},
        {"enable_negation", c.enable_negation},
        {"enable_but", c.enable_but},
        {"enable_exclamation", c.enable_exclamation},
    };
}

void from_json(const nlohmann::json& j, RuleConfig& c) {
    c = RuleConfig{};
    if (j.contains("negation_window")) j.at("negation_window").get_to(c.negation_window);
    if (j.contains("negation_factor")) j.at("negation_factor").get_to(c.negation_factor);
    if (j.contains("booster_increment")) j.at("booster_increment").get_to(c.booster_increment);
    if (j.contains("caps_increment")) j.at("caps_increment").get_to(c.caps_increment);
    if (j.contains("exclamation_increment_per_mark")) {
        j.at("exclamation_increment_per_mark").get_to(c.exclamation_increment_per_mark);
    }
    if (j.contains("exclamation_cap")) j.at("exclamation_cap").get_to(c.exclamation_cap);
    if (j.contains("but_weight_before")) j.at("but_weight_before").get_to(c.but_weight_before);
    if (j.contains("but_weight_after")) j.at("but_weight_after").get_to(c.but_weight_after);
    if (j.contains("normalization_alpha")) j.at("normalization_alpha").get_to(c.normalization_alpha);
    if (j.contains("enable_boosters")) j.at("enable_boosters").get_to(c.enable_boosters);
    if (j.contains("enable_caps")) j.at("enable_caps").get_to(c.enable_caps);
    if (j.contains("enable_negation")) j.at("enable_negation").get_to(c.enable_negation);
    if (j.contains("enable_but")) j.at("enable_but").get_to(c.enable_but);
    if (j.contains("enable_exclamation")) j.at("enable_exclamation").get_to(c.enable_exclamation);
}

}  // namespace finsent::vader
