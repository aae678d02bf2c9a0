#ifndef MOSCL_EXPERIMENT_HPP
#define MOSCL_EXPERIMENT_HPP

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "moscl/conflict.hpp"
#include "moscl/dataset.hpp"
#include "moscl/difficulty.hpp"
#include "moscl/model.hpp"
#include "moscl/scheduler.hpp"
#include "moscl/uncertainty.hpp"

namespace moscl {

enum class SchedulerKind { random, mixed, anti_mixed, sp_hard, sp_linear, ohem };

SchedulerKind parse_scheduler(std::string_view name);
std::string_view to_string(SchedulerKind s);

struct ExperimentConfig {
    std::string data_path;
    std::string eval_path;  // empty: recall is measured on the training set's clean labels
    std::string output_dir;

    SchedulerKind scheduler = SchedulerKind::random;
    DifficultySource difficulty_source = DifficultySource::both;
    int warmup_epochs = 10;
    int total_epochs = 60;
    int rescore_every = 1;
    std::size_t batch_size = 2;
    double learning_rate = 0.1;

    std::size_t hidden_dim = 8;
    Activation activation = Activation::tanh;
    Head head = Head::sigmoid;
    LossKind loss_kind = LossKind::mse;

    int disturbances = 8;
    double gamma = 0.3;
    EntropyMode entropy_mode = EntropyMode::plain;

    double sp_lambda0 = 0.25;
    double sp_growth = 0.0;
    double ohem_ratio = 0.25;

    std::uint64_t seed = 0;
    bool dump_plans = false;

    void validate() const;
    SpConfig sp_config() const;
};

inline constexpr std::array<std::string_view, 22> kConfigKeys{
    "data",         "eval_data",  "output_dir",   "scheduler",  "difficulty_source", "warmup_epochs",
    "total_epochs", "rescore_every", "batch_size", "learning_rate", "hidden_dim",     "activation",
    "head",         "loss",       "disturbances", "gamma",      "entropy_mode",      "sp_lambda0",
    "sp_growth",    "ohem_ratio", "seed",         "dump_plans"};

/// Flat `key = value` text, one setting per line, `#` starts a comment.
std::string config_to_text(const ExperimentConfig& cfg);
ExperimentConfig config_from_text(std::string_view text, ExperimentConfig base = {});
/// Applies one setting; throws std::invalid_argument on unknown keys or bad values.
void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value);

struct EpochMetrics {
    int epoch = 0;
    std::string phase;  // "warmup" or "scheduled"
    double mean_loss = 0.0;
    double recall_class0 = 0.0;
    double recall_class1 = 0.0;
    double minority_recall = 0.0;
    std::optional<double> mean_uncertainty;
    std::optional<double> batch_sum_spread;
    double wall_seconds = 0.0;  // not part of metrics.csv
};

inline constexpr std::string_view kMetricsHeader =
    "epoch,phase,mean_loss,recall_class0,recall_class1,minority_recall,mean_uncertainty,batch_dsum_spread";

std::string metrics_row(const EpochMetrics& m);

struct RunResult {
    std::string output_dir;
    std::vector<EpochMetrics> metrics;
    std::vector<BatchPlan> plans;
    std::map<int, std::vector<ScoreRecord>> scores_by_epoch;
    MlpModel warmup_model{ModelShape{}};
    MlpModel final_model{ModelShape{}};
    int minority_class = 1;
};

/// Classifies a sample: sigmoid head thresholds at 0.5, softmax takes argmax.
int predict_label(const MlpModel& model, std::span<const double> x);

/// Per-class recall against clean labels (classes 0 and 1).
std::pair<double, double> class_recall(const MlpModel& model, const Dataset& data);

double mean_training_loss(const MlpModel& model, const Dataset& data, LossKind kind);

/// Three-step pipeline: random warmup, then per-epoch scoring, rank fusion and
/// scheduler-driven batch formation. Writes run artifacts when
/// cfg.output_dir is non-empty.
RunResult run_experiment(const ExperimentConfig& cfg, const Dataset& train, const Dataset* eval = nullptr);

/// Loads cfg.data_path (and cfg.eval_path) and runs.
RunResult run(const ExperimentConfig& cfg);

struct ConvergedModel {
    MlpModel model{ModelShape{}};
    int epochs = 0;
    bool converged = false;
    std::vector<double> epoch_losses;
};

/// Random-plan SGD until is_converged() or max_epochs.
ConvergedModel train_until_converged(const ExperimentConfig& cfg, const Dataset& train, int max_epochs,
                                     double rel_tol = 1e-4, std::size_t window = 5);

struct CompareCell {
    std::string label;
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error;
    EpochMetrics final_metrics;
};

struct CompareSummary {
    std::string label;
    std::size_t runs = 0;
    std::size_t failures = 0;
    double minority_recall_mean = 0.0;
    double minority_recall_std = 0.0;
    double mean_loss_mean = 0.0;
    double mean_loss_std = 0.0;
    /// Seeds where this config's minority recall >= the random config's, or
    /// empty when no random config is in the grid.
    std::optional<std::size_t> wins_over_random;
};

struct ComparisonTable {
    std::vector<CompareCell> cells;
    std::vector<CompareSummary> summary;
};

/// Label used in comparisons, e.g. "mixed+both", "random".
std::string config_label(const ExperimentConfig& cfg);

/// Runs the config x seed grid. Cells that throw are recorded as failed.
ComparisonTable compare(std::span<const ExperimentConfig> configs, std::span<const std::uint64_t> seeds,
                        const Dataset& train, const Dataset* eval = nullptr, const std::string& output_dir = "");

std::string comparison_to_csv(const ComparisonTable& table);
std::string comparison_to_json(const ComparisonTable& table);

enum class ScatterMode { value, index };
ScatterMode parse_scatter_mode(std::string_view name);

/// sample_id,loss,uncertainty rows; index mode replaces both values by their
/// descending rank positions.
std::string export_scatter(std::span<const ScoreRecord> scores, ScatterMode mode);
std::vector<ScoreRecord> parse_scatter_csv(std::string_view text);

}  // namespace moscl

#endif  // MOSCL_EXPERIMENT_HPP
