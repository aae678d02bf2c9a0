#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "moscl/conflict.hpp"
#include "moscl/datagen.hpp"
#include "moscl/difficulty.hpp"
#include "moscl/experiment.hpp"
#include "moscl/uncertainty.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace moscl;

namespace {

constexpr const char* kOutputRootEnv = "MOSCL_OUTPUT_ROOT";

// Relative output paths land under $MOSCL_OUTPUT_ROOT when it is set.
std::string output_path(const std::string& path) {
    if (path.empty() || fs::path(path).is_absolute()) return path;
    const char* root = std::getenv(kOutputRootEnv);
    if (root == nullptr || *root == '\0') return path;
    return (fs::path(root) / path).string();
}

void ensure_parent(const std::string& path) {
    const auto parent = fs::path(path).parent_path();
    if (!parent.empty()) fs::create_directories(parent);
}

void write_output(const std::string& path, std::string_view text) {
    ensure_parent(path);
    write_text_file(path, text);
}

std::string option_name(std::string_view key) {
    std::string s(key);
    for (auto& c : s) {
        if (c == '_') c = '-';
    }
    return "--" + s;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream in(s);
    for (std::string item; std::getline(in, item, sep);) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::pair<std::string, std::string> split_setting(const std::string& kv) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("--set expects key=value, got '" + kv + "'");
    return {kv.substr(0, eq), kv.substr(eq + 1)};
}

// Every config key doubles as a --flag; --config and --set layer underneath.
struct ConfigFlags {
    std::string config_file;
    std::vector<std::string> sets;
    std::map<std::string, std::string> values;

    void attach(CLI::App* app, bool with_paths) {
        app->add_option("--config", config_file, "config file (key = value lines)");
        app->add_option("--set", sets, "override a config key, key=value (repeatable)");
        for (const auto key : kConfigKeys) {
            if (!with_paths && (key == "data" || key == "eval_data" || key == "output_dir")) continue;
            app->add_option(option_name(key), values[std::string(key)], "config key " + std::string(key));
        }
    }

    ExperimentConfig resolve() const {
        ExperimentConfig cfg;
        if (!config_file.empty()) cfg = config_from_text(read_text_file(config_file));
        for (const auto& kv : sets) {
            const auto [k, v] = split_setting(kv);
            apply_setting(cfg, k, v);
        }
        for (const auto& [k, v] : values) {
            if (!v.empty()) apply_setting(cfg, k, v);
        }
        return cfg;
    }
};

ordered_json metrics_json(const EpochMetrics& m) {
    return {{"epoch", m.epoch},
            {"mean_loss", m.mean_loss},
            {"recall_class0", m.recall_class0},
            {"recall_class1", m.recall_class1},
            {"minority_recall", m.minority_recall}};
}

std::string error_kind(const std::exception& e) {
    if (dynamic_cast<const std::invalid_argument*>(&e)) return "invalid_argument";
    if (dynamic_cast<const std::domain_error*>(&e)) return "domain_error";
    if (dynamic_cast<const std::range_error*>(&e)) return "range_error";
    if (dynamic_cast<const nlohmann::json::exception*>(&e)) return "json_error";
    if (dynamic_cast<const fs::filesystem_error*>(&e)) return "filesystem_error";
    if (dynamic_cast<const std::runtime_error*>(&e)) return "runtime_error";
    return "error";
}

int fail(const std::string& kind, const std::string& message, int code) {
    std::cerr << ordered_json{{"error", {{"kind", kind}, {"message", message}}}}.dump() << '\n';
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"moscl: mixed-order self-paced curriculum learning toolkit"};
    app.require_subcommand(1);
    app.footer(std::string("Relative output paths are resolved under $") + kOutputRootEnv + " when it is set.");

    // gen-data
    auto* gen = app.add_subcommand("gen-data", "generate a synthetic four-quadrant dataset");
    GenSpec spec;
    std::string gen_out = "data/train.csv";
    gen->add_option("--n", spec.n_total, "number of samples")->capture_default_str();
    gen->add_option("--minority-fraction", spec.minority_fraction)->capture_default_str();
    gen->add_option("--label-noise", spec.label_noise_rate, "fraction of majority samples label-flipped")
        ->capture_default_str();
    gen->add_option("--feature-noise", spec.feature_noise_rate, "fraction of majority samples jittered")
        ->capture_default_str();
    gen->add_option("--separation", spec.cluster_separation, "cluster separation in standard deviations")
        ->capture_default_str();
    gen->add_option("--dim", spec.dim)->capture_default_str();
    gen->add_option("--seed", spec.seed)->capture_default_str();
    gen->add_option("--out", gen_out, "dataset CSV; the spec is written next to it as <stem>.spec.json")
        ->capture_default_str();

    // train
    auto* train = app.add_subcommand("train", "run the warmup + scheduled training pipeline");
    ConfigFlags train_flags;
    train_flags.attach(train, true);

    // score
    auto* score = app.add_subcommand("score", "score a dataset with a checkpoint (loss and uncertainty)");
    std::string score_ckpt, score_data, score_out = "scores.json", score_difficulty;
    std::string score_loss = "mse", score_entropy = "plain";
    UncertaintyConfig ucfg;
    score->add_option("--checkpoint", score_ckpt)->required();
    score->add_option("--data", score_data)->required();
    score->add_option("--out", score_out, "scores JSON")->capture_default_str();
    score->add_option("--difficulty-out", score_difficulty, "optional difficulty CSV with ranks and quadrants");
    score->add_option("--loss", score_loss)->capture_default_str();
    score->add_option("--disturbances", ucfg.disturbances)->capture_default_str();
    score->add_option("--gamma", ucfg.gamma)->capture_default_str();
    score->add_option("--seed", ucfg.seed)->capture_default_str();
    score->add_option("--entropy-mode", score_entropy)->capture_default_str();

    // compare
    auto* cmp = app.add_subcommand("compare", "run a config x seed grid and tabulate minority recall");
    ConfigFlags cmp_flags;
    cmp_flags.attach(cmp, false);
    std::vector<std::string> cmp_configs;
    std::string cmp_schedulers, cmp_seeds = "0,1,2,3,4", cmp_data, cmp_eval, cmp_out = "compare";
    cmp->add_option("--configs", cmp_configs, "config files, one grid row each");
    cmp->add_option("--schedulers", cmp_schedulers,
                    "comma list of grid rows on top of the base flags, e.g. random,mixed+both,sp_linear");
    cmp->add_option("--seeds", cmp_seeds)->capture_default_str();
    cmp->add_option("--data", cmp_data)->required();
    cmp->add_option("--eval-data", cmp_eval, "held-out set used for recall");
    cmp->add_option("--out", cmp_out, "output directory")->capture_default_str();

    // export-scatter
    auto* scatter = app.add_subcommand("export-scatter", "export a scores file as loss/uncertainty scatter CSV");
    std::string scatter_in, scatter_mode = "value", scatter_out;
    scatter->add_option("--scores", scatter_in)->required();
    scatter->add_option("--mode", scatter_mode, "value or index")->capture_default_str();
    scatter->add_option("--out", scatter_out, "CSV path (stdout when omitted)");

    // analyze-conflicts
    auto* conflicts = app.add_subcommand("analyze-conflicts", "pairwise gradient conflict vs. loss-sum report");
    std::string conf_ckpt, conf_data, conf_out = "conflicts.json", conf_pairs, conf_loss = "mse";
    ConflictOptions copt;
    int converge_epochs = 5000;
    conflicts->add_option("--checkpoint", conf_ckpt, "model to analyze; when omitted a model is trained to convergence");
    conflicts->add_option("--data", conf_data)->required();
    conflicts->add_option("--out", conf_out, "report JSON")->capture_default_str();
    conflicts->add_option("--pairs-csv", conf_pairs, "optional CSV of pair rows");
    conflicts->add_option("--loss", conf_loss)->capture_default_str();
    conflicts->add_option("--max-pairs", copt.max_pairs)->capture_default_str();
    conflicts->add_option("--seed", copt.seed)->capture_default_str();
    conflicts->add_option("--max-epochs", converge_epochs, "training budget when no checkpoint is given")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail("usage", e.what(), 2);
    }

    try {
        ordered_json result{{"status", "ok"}, {"command", app.get_subcommands().front()->get_name()}};

        if (gen->parsed()) {
            const auto out = output_path(gen_out);
            const auto data = generate(spec);
            write_output(out, dataset_to_csv(data));
            const auto sidecar = (fs::path(out).parent_path() / (fs::path(out).stem().string() + ".spec.json")).string();
            write_output(sidecar, genspec_to_json(spec));
            const auto c = planned_counts(spec);
            result["dataset"] = out;
            result["spec"] = sidecar;
            result["counts"] = {{"HH", c.hh}, {"LH", c.lh}, {"LL", c.ll}, {"HL", c.hl}};
        } else if (train->parsed()) {
            auto cfg = train_flags.resolve();
            if (cfg.output_dir.empty()) cfg.output_dir = "runs/" + config_label(cfg) + "_seed" + std::to_string(cfg.seed);
            cfg.output_dir = output_path(cfg.output_dir);
            const auto r = run(cfg);
            result["output_dir"] = r.output_dir;
            result["final"] = metrics_json(r.metrics.back());
        } else if (score->parsed()) {
            const auto model = load_model(score_ckpt);
            const auto data = load_dataset(score_data);
            ucfg.entropy_mode = parse_entropy_mode(score_entropy);
            const auto scores = score_dataset(model, data, parse_loss_kind(score_loss), ucfg);
            const auto out = output_path(score_out);
            write_output(out, scores_to_json(scores));
            result["scores"] = out;
            result["samples"] = scores.size();
            if (!score_difficulty.empty()) {
                const auto path = output_path(score_difficulty);
                write_output(path, difficulty_to_csv(build_difficulty(scores)));
                result["difficulty"] = path;
            }
        } else if (cmp->parsed()) {
            const auto base = cmp_flags.resolve();
            std::vector<ExperimentConfig> configs;
            for (const auto& file : cmp_configs) configs.push_back(config_from_text(read_text_file(file), base));
            for (const auto& row : split(cmp_schedulers, ',')) {
                auto cfg = base;
                const auto plus = row.find('+');
                cfg.scheduler = parse_scheduler(row.substr(0, plus));
                if (plus != std::string::npos) cfg.difficulty_source = parse_difficulty_source(row.substr(plus + 1));
                configs.push_back(cfg);
            }
            std::vector<std::uint64_t> seeds;
            for (const auto& s : split(cmp_seeds, ',')) seeds.push_back(std::stoull(s));
            const auto train_set = load_dataset(cmp_data);
            std::optional<Dataset> eval;
            if (!cmp_eval.empty()) eval = load_dataset(cmp_eval);
            const auto out = output_path(cmp_out);
            const auto table = compare(configs, seeds, train_set, eval ? &*eval : nullptr, out);
            result["output_dir"] = out;
            result["summary"] = ordered_json::parse(comparison_to_json(table))["summary"];
            std::size_t failures = 0;
            for (const auto& s : table.summary) failures += s.failures;
            if (failures > 0) result["failed_cells"] = failures;
        } else if (scatter->parsed()) {
            const auto scores = scores_from_json(read_text_file(scatter_in));
            const auto csv = export_scatter(scores, parse_scatter_mode(scatter_mode));
            if (scatter_out.empty()) {
                std::cout << csv;
                return 0;
            }
            const auto out = output_path(scatter_out);
            write_output(out, csv);
            result["scatter"] = out;
        } else if (conflicts->parsed()) {
            const auto data = load_dataset(conf_data);
            copt.loss_kind = parse_loss_kind(conf_loss);
            std::optional<MlpModel> model;
            if (!conf_ckpt.empty()) {
                model = load_model(conf_ckpt);
                copt.model_tag = conf_ckpt;
            } else {
                ExperimentConfig cfg;
                cfg.seed = copt.seed;
                cfg.loss_kind = copt.loss_kind;
                auto trained = train_until_converged(cfg, data, converge_epochs);
                result["trained_epochs"] = trained.epochs;
                result["converged"] = trained.converged;
                copt.model_tag = "trained:seed=" + std::to_string(copt.seed);
                model = std::move(trained.model);
            }
            const auto report = conflict_loss_monotonicity(*model, data, copt);
            const auto out = output_path(conf_out);
            write_output(out, conflict_report_to_json(report));
            result["report"] = out;
            result["pairs"] = report.pairs.size();
            result["spearman_rho"] = report.spearman_rho ? ordered_json(*report.spearman_rho) : ordered_json();
            if (!conf_pairs.empty()) {
                const auto path = output_path(conf_pairs);
                write_output(path, conflict_pairs_to_csv(report));
                result["pairs_csv"] = path;
            }
        }
        std::cout << result.dump() << '\n';
        return 0;
    } catch (const std::exception& e) {
        return fail(error_kind(e), e.what(), 1);
    }
}
