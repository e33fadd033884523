#include "finsent/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>

#include "finsent/dataset.hpp"
#include "finsent/errors.hpp"
#include "finsent/evaluator.hpp"
#include "finsent/model_io.hpp"
#include "finsent/serialize.hpp"
#include "finsent/trainer.hpp"
#include "finsent/util.hpp"

namespace fs = std::filesystem;

namespace finsent::cli {

namespace {

void require_file(const std::string& path, const char* what) {
    if (path.empty()) {
        throw validation_error(std::string(what) + " path not set");
    }
    if (!fs::exists(path)) {
        throw validation_error(std::string(what) + " file not found: " + path);
    }
}

// Applies an optional key=value rule file, then freezes the resolved
// constants into the config so snapshots reproduce the run even if the file
// later changes.
void resolve_rules(RunConfig& cfg) {
    if (!cfg.rules_path.empty()) {
        require_file(cfg.rules_path, "rules");
        cfg.rules = vader::load_rule_config(cfg.rules_path);
        cfg.rules_path.clear();
    }
    cfg.rules.validate();
}

lex::LexiconStore load_store(const RunConfig& cfg) {
    require_file(cfg.embeddings_path, "embeddings");
    require_file(cfg.affective_path, "affective lexicon");
    lex::LexiconStore store;
    store.embeddings = lex::load_embeddings(cfg.embeddings_path);
    store.affective = lex::load_affective(cfg.affective_path);
    return store;
}

vader::Scorer load_scorer(const RunConfig& cfg) {
    require_file(cfg.valence_path, "valence lexicon");
    require_file(cfg.negators_path, "negator list");
    require_file(cfg.boosters_path, "booster list");
    return vader::Scorer(lex::load_valence(cfg.valence_path),
                         vader::load_rule_data(cfg.negators_path, cfg.boosters_path), cfg.rules);
}

std::vector<model::PreparedInstance> prepare_all(const std::vector<text::RawInstance>& instances,
                                                 const RunConfig& cfg,
                                                 const vader::Scorer* scorer) {
    std::vector<model::PreparedInstance> out;
    out.reserve(instances.size());
    for (const auto& inst : instances) {
        out.push_back(model::prepare_instance(inst.headline, inst.company, cfg.preprocessing,
                                              scorer, cfg.model));
    }
    return out;
}

std::vector<double> labeled_targets(const std::vector<text::RawInstance>& instances) {
    std::vector<double> targets;
    targets.reserve(instances.size());
    for (const auto& inst : instances) {
        if (!inst.score) {
            throw validation_error("labeled dataset required, but instance has no score: " +
                                   inst.headline);
        }
        targets.push_back(*inst.score);
    }
    return targets;
}

std::string model_file_name(int n) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "model_%03d.bin", n);
    return buf;
}

void write_snapshot(const RunConfig& cfg) {
    fs::create_directories(cfg.output_dir);
    cfg.save_snapshot((fs::path(cfg.output_dir) / "resolved_config.json").string());
}

void print_coverage(const lex::LexiconStore& store) {
    const auto cov = store.coverage();
    std::cout << "lexicon coverage: embeddings " << cov.embedding_hits << " hits / "
              << cov.embedding_misses << " misses; affective " << cov.affective_hits
              << " hits / " << cov.affective_misses << " misses\n";
}

std::vector<std::string> list_model_files(const std::string& dir) {
    if (!fs::is_directory(dir)) {
        throw validation_error("models directory not found: " + dir);
    }
    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (name.rfind("model_", 0) == 0 && name.size() > 4 &&
            name.substr(name.size() - 4) == ".bin") {
            files.push_back(entry.path().string());
        }
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) {
        throw validation_error("no model_*.bin files in " + dir);
    }
    return files;
}

}  // namespace

void cmd_train(RunConfig cfg) {
    resolve_rules(cfg);
    cfg.model.validate();
    cfg.train.validate();
    if (cfg.model.use_embeddings &&
        (cfg.embeddings_path.empty() || cfg.affective_path.empty())) {
        throw validation_error("use_embeddings requires --embeddings and --affective paths");
    }

    std::optional<lex::LexiconStore> store;
    if (cfg.model.use_embeddings) store.emplace(load_store(cfg));
    std::optional<vader::Scorer> scorer;
    if (cfg.model.use_vader) scorer.emplace(load_scorer(cfg));

    const auto instances = dataset::ingest(cfg.data_path, cfg.format, /*unlabeled=*/false);
    const auto targets = labeled_targets(instances);
    const auto prepared = prepare_all(instances, cfg, scorer ? &*scorer : nullptr);

    const auto result =
        trainer::train_ensemble(prepared, targets, {}, cfg.model, cfg.train,
                                store ? &*store : nullptr);

    fs::create_directories(cfg.models_dir);
    model_io::ModelMeta meta;
    meta.config_hash = cfg.config_hash();
    meta.vocab_hash = result.vocab.hash();
    if (store) {
        meta.embeddings_file_hash = store->embeddings.file_hash;
        meta.affective_file_hash = store->affective.file_hash;
    }
    if (scorer) meta.valence_file_hash = scorer->lexicon().file_hash;

    nlohmann::json manifest;
    manifest["format_version"] = model_io::kFormatVersion;
    manifest["n_models"] = cfg.train.n_models;
    manifest["base_seed"] = cfg.train.base_seed;
    manifest["config_hash"] = util::hex64(meta.config_hash);
    manifest["vocab_hash"] = util::hex64(meta.vocab_hash);
    manifest["embeddings_file_hash"] = util::hex64(meta.embeddings_file_hash);
    manifest["affective_file_hash"] = util::hex64(meta.affective_file_hash);
    manifest["valence_file_hash"] = util::hex64(meta.valence_file_hash);
    manifest["negators_file_hash"] =
        util::hex64(scorer ? scorer->data().negators_hash : 0);
    manifest["boosters_file_hash"] =
        util::hex64(scorer ? scorer->data().boosters_hash : 0);
    manifest["data_file_hash"] = util::hex64(util::file_fnv1a(cfg.data_path));
    manifest["resolved_config"] = cfg.to_json();

    std::vector<std::string> file_names;
    for (int n = 0; n < cfg.train.n_models; ++n) {
        model_io::ModelFile file;
        file.config = cfg.model;
        file.vocab = result.vocab;
        file.params = result.models[static_cast<std::size_t>(n)];
        file.meta = meta;
        file.meta.seed = cfg.train.base_seed + static_cast<std::uint64_t>(n);
        const std::string name = model_file_name(n);
        model_io::save_model((fs::path(cfg.models_dir) / name).string(), file);
        file_names.push_back(name);
    }
    manifest["model_files"] = file_names;
    util::write_file((fs::path(cfg.models_dir) / "manifest.json").string(),
                     manifest.dump(2) + "\n");

    fs::create_directories(cfg.output_dir);
    util::write_file((fs::path(cfg.output_dir) / "trace.tsv").string(),
                     trainer::trace_records(result.loss_traces, -1));
    write_snapshot(cfg);

    if (store) {
        // One lookup per vocabulary entry: corpus coverage, not per-member
        // query counts.
        store->reset_coverage();
        for (const auto& tok : result.vocab.tokens) (void)store->token_vector(tok);
        print_coverage(*store);
    }
    double final_loss = 0.0;
    for (const auto& trace : result.loss_traces) {
        if (!trace.empty()) final_loss += trace.back();
    }
    std::cout << "trained " << cfg.train.n_models << " model(s) into " << cfg.models_dir
              << " (final epoch loss, summed over models: "
              << util::format_double(final_loss, 6) << ")\n";
}

void cmd_predict(RunConfig cfg) {
    const auto model_paths = list_model_files(cfg.models_dir);

    // The manifest carries the training-time configuration (preprocessing
    // flag, rule constants, lexica paths) so predictions match training.
    const fs::path manifest_path = fs::path(cfg.models_dir) / "manifest.json";
    require_file(manifest_path.string(), "manifest");
    nlohmann::json manifest;
    try {
        manifest = nlohmann::json::parse(util::read_file(manifest_path.string()));
    } catch (const nlohmann::json::exception& e) {
        throw validation_error("manifest " + manifest_path.string() + ": " + e.what());
    }
    RunConfig train_cfg = RunConfig::from_json(manifest.at("resolved_config"));

    std::vector<model_io::ModelFile> models;
    models.reserve(model_paths.size());
    for (const auto& path : model_paths) models.push_back(model_io::load_model(path));
    for (const auto& m : models) {
        if (m.meta.config_hash != models.front().meta.config_hash) {
            throw validation_error("model files in " + cfg.models_dir +
                                   " were trained with different configurations");
        }
        if (m.meta.vocab_hash != models.front().meta.vocab_hash) {
            throw validation_error("model files in " + cfg.models_dir +
                                   " carry different vocabularies");
        }
    }
    const model::ModelConfig& mc = models.front().config;
    const model::Vocabulary& vocab = models.front().vocab;

    // Stale-lexicon guards: any lexicon supplied now must match the content
    // hash recorded at training time.
    if (!cfg.embeddings_path.empty() && models.front().meta.embeddings_file_hash != 0) {
        require_file(cfg.embeddings_path, "embeddings");
        if (util::file_fnv1a(cfg.embeddings_path) != models.front().meta.embeddings_file_hash) {
            throw validation_error("embeddings file " + cfg.embeddings_path +
                                   " does not match the lexicon hash recorded in the model files");
        }
    }

    std::optional<vader::Scorer> scorer;
    if (mc.use_vader) {
        // Rule data comes from the manifest unless overridden; content
        // hashes recorded at training time guard against silent drift.
        RunConfig scorer_cfg = train_cfg;
        const RunConfig defaults;
        if (!cfg.valence_path.empty()) scorer_cfg.valence_path = cfg.valence_path;
        if (cfg.negators_path != defaults.negators_path) {
            scorer_cfg.negators_path = cfg.negators_path;
        }
        if (cfg.boosters_path != defaults.boosters_path) {
            scorer_cfg.boosters_path = cfg.boosters_path;
        }
        if (!cfg.rules_path.empty()) {
            scorer_cfg.rules_path = cfg.rules_path;
            resolve_rules(scorer_cfg);
        }
        scorer.emplace(load_scorer(scorer_cfg));
        if (models.front().meta.valence_file_hash != 0 &&
            scorer->lexicon().file_hash != models.front().meta.valence_file_hash) {
            throw validation_error("valence lexicon " + scorer_cfg.valence_path +
                                   " does not match the hash recorded in the model files");
        }
        const auto check_list_hash = [&](const char* key, std::uint64_t actual,
                                         const std::string& path) {
            if (!manifest.contains(key)) return;
            const std::string recorded = manifest.at(key).get<std::string>();
            if (recorded != util::hex64(0) && recorded != util::hex64(actual)) {
                throw validation_error(std::string(key) + ": " + path +
                                       " does not match the hash recorded in the manifest");
            }
        };
        check_list_hash("negators_file_hash", scorer->data().negators_hash,
                        scorer_cfg.negators_path);
        check_list_hash("boosters_file_hash", scorer->data().boosters_hash,
                        scorer_cfg.boosters_path);
    }

    const auto instances = dataset::ingest(cfg.data_path, cfg.format, /*unlabeled=*/true);

    RunConfig effective = cfg;
    effective.preprocessing = train_cfg.preprocessing;
    effective.model = mc;
    const auto prepared = prepare_all(instances, effective, scorer ? &*scorer : nullptr);

    std::vector<std::vector<double>> per_model(models.size());
    for (std::size_t m = 0; m < models.size(); ++m) {
        per_model[m].reserve(prepared.size());
        for (const auto& p : prepared) {
            const auto repr = model::represent(p, vocab, mc);
            per_model[m].push_back(model::predict(repr, models[m].params, mc));
        }
    }
    const auto mean = trainer::ensemble_mean(per_model);

    std::ostringstream out;
    for (std::size_t i = 0; i < instances.size(); ++i) {
        out << instances[i].headline << '\t' << instances[i].company << '\t'
            << util::format_double(mean[i], 8) << '\n';
    }
    fs::create_directories(cfg.output_dir);
    const std::string pred_path = cfg.predictions_path.empty()
                                      ? (fs::path(cfg.output_dir) / "predictions.tsv").string()
                                      : cfg.predictions_path;
    util::write_file(pred_path, out.str());
    write_snapshot(effective);
    std::cout << "wrote " << instances.size() << " prediction(s) to " << pred_path << "\n";
}

void cmd_evaluate(const RunConfig& cfg) {
    require_file(cfg.predictions_path, "predictions");
    const auto gold = dataset::ingest(cfg.gold_path.empty() ? cfg.data_path : cfg.gold_path,
                                      cfg.format, /*unlabeled=*/false);

    std::map<std::string, double> gold_by_key;
    for (const auto& inst : gold) {
        const std::string key = inst.headline + "\t" + inst.company;
        if (!gold_by_key.emplace(key, *inst.score).second) {
            throw validation_error("evaluate: duplicate gold instance: " + key);
        }
    }

    std::vector<double> predictions, targets;
    std::string unmatched;
    std::istringstream in(util::read_file(cfg.predictions_path));
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = util::split(line, '\t');
        if (fields.size() != 3) {
            throw validation_error("predictions row " + std::to_string(row) +
                                   ": expected headline<TAB>company<TAB>prediction");
        }
        const auto v = util::parse_double(fields[2]);
        if (!v) {
            throw validation_error("predictions row " + std::to_string(row) +
                                   ": prediction is not a number");
        }
        const std::string key = fields[0] + "\t" + fields[1];
        const auto it = gold_by_key.find(key);
        if (it == gold_by_key.end()) {
            if (!unmatched.empty()) unmatched += ", ";
            unmatched += "'" + fields[0] + "' / '" + fields[1] + "'";
            continue;
        }
        predictions.push_back(*v);
        targets.push_back(it->second);
        gold_by_key.erase(it);
    }
    if (!unmatched.empty()) {
        throw validation_error("evaluate: predictions without gold instances: " + unmatched);
    }
    if (!gold_by_key.empty()) {
        std::string missing;
        for (const auto& [key, value] : gold_by_key) {
            if (!missing.empty()) missing += ", ";
            missing += "'" + key + "'";
        }
        throw validation_error("evaluate: gold instances without predictions: " + missing);
    }

    const double metric = evaluator::official_metric(predictions, targets);
    std::ostringstream report;
    report << "instances\t" << predictions.size() << "\n"
           << "cosine_metric\t" << util::format_double(metric, 6) << "\n";
    fs::create_directories(cfg.output_dir);
    util::write_file((fs::path(cfg.output_dir) / "evaluation.tsv").string(), report.str());
    std::cout << report.str();
}

void cmd_cv(RunConfig cfg) {
    resolve_rules(cfg);
    cfg.model.validate();
    cfg.train.validate(/*cv_requested=*/true);
    if (cfg.model.use_embeddings &&
        (cfg.embeddings_path.empty() || cfg.affective_path.empty())) {
        throw validation_error("use_embeddings requires --embeddings and --affective paths");
    }

    std::optional<lex::LexiconStore> store;
    if (cfg.model.use_embeddings) store.emplace(load_store(cfg));
    std::optional<vader::Scorer> scorer;
    if (cfg.model.use_vader) scorer.emplace(load_scorer(cfg));

    const auto instances = dataset::ingest(cfg.data_path, cfg.format, /*unlabeled=*/false);
    const auto targets = labeled_targets(instances);
    const auto prepared = prepare_all(instances, cfg, scorer ? &*scorer : nullptr);

    const auto cv =
        trainer::cross_validate(prepared, targets, cfg.model, cfg.train, store ? &*store : nullptr);

    std::ostringstream report;
    report << "fold\tscore\n";
    for (std::size_t f = 0; f < cv.fold_scores.size(); ++f) {
        report << f << '\t' << util::format_double(cv.fold_scores[f], 6) << '\n';
    }
    report << "mean\t" << util::format_double(cv.mean, 6) << '\n'
           << "std\t" << util::format_double(cv.stddev, 6) << '\n';

    std::string records = trainer::fold_score_records(cv.fold_scores);
    for (std::size_t f = 0; f < cv.fold_traces.size(); ++f) {
        records += trainer::trace_records(cv.fold_traces[f], static_cast<int>(f));
    }

    fs::create_directories(cfg.output_dir);
    util::write_file((fs::path(cfg.output_dir) / "cv_report.tsv").string(), report.str());
    util::write_file((fs::path(cfg.output_dir) / "cv_records.tsv").string(), records);
    write_snapshot(cfg);
    std::cout << report.str();
}

void cmd_ablate(RunConfig cfg) {
    resolve_rules(cfg);
    cfg.model.validate();
    cfg.train.validate(cfg.test_data_path.empty());
    require_file(cfg.embeddings_path, "embeddings");
    require_file(cfg.affective_path, "affective lexicon");

    const lex::LexiconStore store = load_store(cfg);
    std::optional<vader::Scorer> scorer;
    if (cfg.model.use_vader) scorer.emplace(load_scorer(cfg));

    const auto train_instances = dataset::ingest(cfg.data_path, cfg.format, /*unlabeled=*/false);
    std::vector<text::RawInstance> test_instances;
    if (!cfg.test_data_path.empty()) {
        test_instances = dataset::ingest(cfg.test_data_path, cfg.format, /*unlabeled=*/false);
    }

    evaluator::AblationContext ctx;
    ctx.train = train_instances;
    ctx.test = test_instances;
    ctx.store = &store;
    ctx.scorer = scorer ? &*scorer : nullptr;
    ctx.model = cfg.model;
    ctx.train_config = cfg.train;

    const auto result = evaluator::run_ablations(ctx);
    const std::string table = evaluator::render_ablation_table(result);

    fs::create_directories(cfg.output_dir);
    util::write_file((fs::path(cfg.output_dir) / "ablation_table.txt").string(), table);
    util::write_file((fs::path(cfg.output_dir) / "ablation_records.tsv").string(),
                     evaluator::ablation_records(result));
    write_snapshot(cfg);
    std::cout << table;
}

int run_command(const std::string& name, RunConfig cfg) {
    try {
        if (name == "train") cmd_train(std::move(cfg));
        else if (name == "predict") cmd_predict(std::move(cfg));
        else if (name == "evaluate") cmd_evaluate(cfg);
        else if (name == "cv") cmd_cv(std::move(cfg));
        else if (name == "ablate") cmd_ablate(std::move(cfg));
        else {
            std::cerr << "unknown command: " << name << "\n";
            return 2;
        }
        return 0;
    } catch (const validation_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace finsent::cli
