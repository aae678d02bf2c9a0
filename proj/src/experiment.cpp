#include "moscl/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "moscl/rng.hpp"

namespace moscl {

namespace fs = std::filesystem;

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <typename T>
T parse_value(std::string_view key, std::string_view v) {
    T out{};
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
        throw std::invalid_argument("config: bad value '" + std::string(v) + "' for " + std::string(key));
    }
    return out;
}

bool parse_bool(std::string_view key, std::string_view v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw std::invalid_argument("config: bad boolean '" + std::string(v) + "' for " + std::string(key));
}

std::string optional_cell(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

Rng plan_rng(std::uint64_t seed, int epoch) {
    return Rng(derive_seed(seed, {stream::plan, static_cast<std::uint64_t>(epoch)}));
}

UncertaintyConfig uncertainty_config(const ExperimentConfig& cfg, int epoch) {
    // Perturbations are redrawn at every scoring epoch.
    return {cfg.disturbances, cfg.gamma, derive_seed(cfg.seed, {stream::perturb, static_cast<std::uint64_t>(epoch)}),
            cfg.entropy_mode};
}

ModelShape model_shape(const ExperimentConfig& cfg, std::size_t input_dim) {
    ModelShape s;
    s.input_dim = input_dim;
    s.hidden_dim = cfg.hidden_dim;
    s.head = cfg.head;
    s.activation = cfg.activation;
    s.output_dim = cfg.head == Head::sigmoid ? 1 : 2;
    return s;
}

void train_epoch(MlpModel& model, const Dataset& train, const std::map<SampleId, std::size_t>& row_of,
                 const BatchPlan& plan, const ExperimentConfig& cfg, const std::map<SampleId, double>* weights) {
    std::vector<GradientVector> grads;
    for (const auto& batch : plan.batches) {
        grads.clear();
        for (const auto id : batch) {
            const auto& s = train.samples[row_of.at(id)];
            const double w = weights ? weights->at(id) : 1.0;
            grads.push_back(model.per_sample_gradient(s.x, s.y, cfg.loss_kind, w));
        }
        sgd_step(model, grads, cfg.learning_rate);
    }
    if (!model.all_finite()) {
        throw std::runtime_error("training diverged: non-finite parameters at epoch " + std::to_string(plan.epoch));
    }
}

int minority_class_of(const Dataset& data) {
    std::size_t ones = 0;
    for (const auto& s : data.samples) ones += s.clean_label == 1 ? 1 : 0;
    return ones <= data.size() - ones ? 1 : 0;
}

}  // namespace

SchedulerKind parse_scheduler(std::string_view name) {
    if (name == "random") return SchedulerKind::random;
    if (name == "mixed") return SchedulerKind::mixed;
    if (name == "anti_mixed") return SchedulerKind::anti_mixed;
    if (name == "sp_hard") return SchedulerKind::sp_hard;
    if (name == "sp_linear") return SchedulerKind::sp_linear;
    if (name == "ohem") return SchedulerKind::ohem;
    throw std::invalid_argument("unknown scheduler '" + std::string(name) + "'");
}

std::string_view to_string(SchedulerKind s) {
    switch (s) {
        case SchedulerKind::random: return "random";
        case SchedulerKind::mixed: return "mixed";
        case SchedulerKind::anti_mixed: return "anti_mixed";
        case SchedulerKind::sp_hard: return "sp_hard";
        case SchedulerKind::sp_linear: return "sp_linear";
        case SchedulerKind::ohem: return "ohem";
    }
    return "?";
}

void ExperimentConfig::validate() const {
    if (warmup_epochs < 0) throw std::invalid_argument("config: warmup_epochs must be >= 0");
    if (total_epochs < 1) throw std::invalid_argument("config: total_epochs must be >= 1");
    if (warmup_epochs >= total_epochs) throw std::invalid_argument("config: warmup_epochs must be < total_epochs");
    if (rescore_every < 1) throw std::invalid_argument("config: rescore_every must be >= 1");
    if (batch_size < 1) throw std::invalid_argument("config: batch_size must be >= 1");
    if ((scheduler == SchedulerKind::mixed) && batch_size < 2) {
        throw std::invalid_argument("config: mixed scheduler needs batch_size >= 2");
    }
    if (!(learning_rate > 0.0)) throw std::invalid_argument("config: learning_rate must be > 0");
    if (hidden_dim < 1) throw std::invalid_argument("config: hidden_dim must be >= 1");
    UncertaintyConfig{disturbances, gamma, 0, entropy_mode}.validate();
    sp_config().validate();
    if (!(ohem_ratio > 0.0 && ohem_ratio <= 1.0)) throw std::invalid_argument("config: ohem_ratio must lie in (0, 1]");
}

SpConfig ExperimentConfig::sp_config() const {
    return {scheduler == SchedulerKind::sp_hard ? SpRegularizer::hard : SpRegularizer::linear, sp_lambda0, sp_growth};
}

void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value) {
    if (key == "data") cfg.data_path = value;
    else if (key == "eval_data") cfg.eval_path = value;
    else if (key == "output_dir") cfg.output_dir = value;
    else if (key == "scheduler") cfg.scheduler = parse_scheduler(value);
    else if (key == "difficulty_source") cfg.difficulty_source = parse_difficulty_source(value);
    else if (key == "warmup_epochs") cfg.warmup_epochs = parse_value<int>(key, value);
    else if (key == "total_epochs") cfg.total_epochs = parse_value<int>(key, value);
    else if (key == "rescore_every") cfg.rescore_every = parse_value<int>(key, value);
    else if (key == "batch_size") cfg.batch_size = parse_value<std::size_t>(key, value);
    else if (key == "learning_rate") cfg.learning_rate = parse_value<double>(key, value);
    else if (key == "hidden_dim") cfg.hidden_dim = parse_value<std::size_t>(key, value);
    else if (key == "activation") cfg.activation = parse_activation(value);
    else if (key == "head") cfg.head = parse_head(value);
    else if (key == "loss") cfg.loss_kind = parse_loss_kind(value);
    else if (key == "disturbances") cfg.disturbances = parse_value<int>(key, value);
    else if (key == "gamma") cfg.gamma = parse_value<double>(key, value);
    else if (key == "entropy_mode") cfg.entropy_mode = parse_entropy_mode(value);
    else if (key == "sp_lambda0") cfg.sp_lambda0 = parse_value<double>(key, value);
    else if (key == "sp_growth") cfg.sp_growth = parse_value<double>(key, value);
    else if (key == "ohem_ratio") cfg.ohem_ratio = parse_value<double>(key, value);
    else if (key == "seed") cfg.seed = parse_value<std::uint64_t>(key, value);
    else if (key == "dump_plans") cfg.dump_plans = parse_bool(key, value);
    else throw std::invalid_argument("config: unknown key '" + std::string(key) + "'");
}

std::string config_to_text(const ExperimentConfig& cfg) {
    std::ostringstream out;
    out << "data = " << cfg.data_path << '\n'
        << "eval_data = " << cfg.eval_path << '\n'
        << "output_dir = " << cfg.output_dir << '\n'
        << "scheduler = " << to_string(cfg.scheduler) << '\n'
        << "difficulty_source = " << to_string(cfg.difficulty_source) << '\n'
        << "warmup_epochs = " << cfg.warmup_epochs << '\n'
        << "total_epochs = " << cfg.total_epochs << '\n'
        << "rescore_every = " << cfg.rescore_every << '\n'
        << "batch_size = " << cfg.batch_size << '\n'
        << "learning_rate = " << format_double(cfg.learning_rate) << '\n'
        << "hidden_dim = " << cfg.hidden_dim << '\n'
        << "activation = " << to_string(cfg.activation) << '\n'
        << "head = " << to_string(cfg.head) << '\n'
        << "loss = " << to_string(cfg.loss_kind) << '\n'
        << "disturbances = " << cfg.disturbances << '\n'
        << "gamma = " << format_double(cfg.gamma) << '\n'
        << "entropy_mode = " << to_string(cfg.entropy_mode) << '\n'
        << "sp_lambda0 = " << format_double(cfg.sp_lambda0) << '\n'
        << "sp_growth = " << format_double(cfg.sp_growth) << '\n'
        << "ohem_ratio = " << format_double(cfg.ohem_ratio) << '\n'
        << "seed = " << cfg.seed << '\n'
        << "dump_plans = " << (cfg.dump_plans ? "true" : "false") << '\n';
    return out.str();
}

ExperimentConfig config_from_text(std::string_view text, ExperimentConfig base) {
    std::istringstream in{std::string(text)};
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key = value");
        }
        apply_setting(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return base;
}

std::string metrics_row(const EpochMetrics& m) {
    return std::to_string(m.epoch) + ',' + m.phase + ',' + format_double(m.mean_loss) + ',' +
           format_double(m.recall_class0) + ',' + format_double(m.recall_class1) + ',' +
           format_double(m.minority_recall) + ',' + optional_cell(m.mean_uncertainty) + ',' +
           optional_cell(m.batch_sum_spread);
}

int predict_label(const MlpModel& model, std::span<const double> x) {
    const auto t = model.forward(x);
    if (t.prediction.size() == 1) return t.prediction[0] > 0.5 ? 1 : 0;
    return static_cast<int>(std::max_element(t.prediction.begin(), t.prediction.end()) - t.prediction.begin());
}

std::pair<double, double> class_recall(const MlpModel& model, const Dataset& data) {
    std::size_t n[2] = {0, 0}, hit[2] = {0, 0};
    for (const auto& s : data.samples) {
        if (s.clean_label < 0 || s.clean_label > 1) continue;
        ++n[s.clean_label];
        if (predict_label(model, s.x) == s.clean_label) ++hit[s.clean_label];
    }
    auto ratio = [](std::size_t h, std::size_t t) { return t == 0 ? 0.0 : static_cast<double>(h) / static_cast<double>(t); };
    return {ratio(hit[0], n[0]), ratio(hit[1], n[1])};
}

double mean_training_loss(const MlpModel& model, const Dataset& data, LossKind kind) {
    double total = 0.0;
    for (const auto& s : data.samples) total += model.sample_loss(s.x, s.y, kind);
    return data.empty() ? 0.0 : total / static_cast<double>(data.size());
}

RunResult run_experiment(const ExperimentConfig& cfg, const Dataset& train, const Dataset* eval) {
    cfg.validate();
    train.validate();
    if (train.empty()) throw std::invalid_argument("run: empty training set");
    if (eval && eval->feature_dim() != train.feature_dim()) {
        throw std::invalid_argument("run: eval set feature dimension differs from training set");
    }

    const auto ids = train.ids();
    std::map<SampleId, std::size_t> row_of;
    for (std::size_t k = 0; k < train.size(); ++k) row_of[train.samples[k].id] = k;

    RunResult result;
    result.output_dir = cfg.output_dir;
    result.minority_class = minority_class_of(train);
    MlpModel model = MlpModel::initialized(model_shape(cfg, train.feature_dim()), cfg.seed);
    result.warmup_model = model;

    const bool write = !cfg.output_dir.empty();
    std::string metrics_csv = std::string(kMetricsHeader) + '\n';
    std::string timing_csv = "epoch,wall_seconds\n";
    if (write) {
        fs::create_directories(cfg.output_dir);
        write_text_file((fs::path(cfg.output_dir) / "config.resolved.cfg").string(), config_to_text(cfg));
        write_text_file((fs::path(cfg.output_dir) / "metrics.csv").string(), metrics_csv);
    }

    std::optional<std::vector<DifficultyRecord>> snapshot;
    std::vector<ScoreRecord> snapshot_scores;
    const auto* recall_set = eval ? eval : &train;

    for (int epoch = 0; epoch < cfg.total_epochs; ++epoch) {
        const auto started = std::chrono::steady_clock::now();
        const bool scheduled = epoch >= cfg.warmup_epochs;

        if (scheduled && (epoch - cfg.warmup_epochs) % cfg.rescore_every == 0) {
            snapshot_scores = score_dataset(model, train, cfg.loss_kind, uncertainty_config(cfg, epoch));
            snapshot = build_difficulty(snapshot_scores);
            result.scores_by_epoch[epoch] = snapshot_scores;
            if (write) {
                write_text_file((fs::path(cfg.output_dir) / ("scores_epoch" + std::to_string(epoch) + ".json")).string(),
                                scores_to_json(snapshot_scores));
            }
        }

        auto rng = plan_rng(cfg.seed, epoch);
        BatchPlan plan;
        std::map<SampleId, double> weights;
        const std::map<SampleId, double>* weights_ptr = nullptr;

        if (!scheduled || !snapshot) {
            plan = random_plan(ids, cfg.batch_size, rng);
        } else {
            switch (cfg.scheduler) {
                case SchedulerKind::random:
                    plan = random_plan(ids, cfg.batch_size, rng);
                    break;
                case SchedulerKind::mixed:
                    plan = mixed_order_plan(scored_ids(ids, *snapshot, cfg.difficulty_source), cfg.batch_size);
                    break;
                case SchedulerKind::anti_mixed:
                    plan = anti_mixed_plan(scored_ids(ids, *snapshot, cfg.difficulty_source), cfg.batch_size);
                    break;
                case SchedulerKind::ohem: {
                    std::vector<LossEntry> losses;
                    for (const auto& s : snapshot_scores) losses.push_back({s.sample_id, s.loss});
                    plan = ohem_plan(losses, cfg.batch_size, cfg.ohem_ratio, rng);
                    break;
                }
                case SchedulerKind::sp_hard:
                case SchedulerKind::sp_linear: {
                    plan = random_plan(ids, cfg.batch_size, rng);
                    const auto sp = cfg.sp_config();
                    const double lambda = age_schedule(epoch - cfg.warmup_epochs, sp);
                    for (const auto& s : snapshot_scores) weights[s.sample_id] = sp_weight(s.loss, sp.regularizer, lambda);
                    weights_ptr = &weights;
                    break;
                }
            }
        }
        plan.epoch = epoch;

        train_epoch(model, train, row_of, plan, cfg, weights_ptr);
        if (epoch + 1 == cfg.warmup_epochs) result.warmup_model = model;

        EpochMetrics m;
        m.epoch = epoch;
        m.phase = scheduled ? "scheduled" : "warmup";
        m.mean_loss = mean_training_loss(model, train, cfg.loss_kind);
        if (!std::isfinite(m.mean_loss)) {
            throw std::runtime_error("non-finite training loss at epoch " + std::to_string(epoch));
        }
        std::tie(m.recall_class0, m.recall_class1) = class_recall(model, *recall_set);
        m.minority_recall = result.minority_class == 1 ? m.recall_class1 : m.recall_class0;
        if (snapshot) {
            double total = 0.0;
            std::map<SampleId, std::size_t> key;
            for (const auto& r : *snapshot) {
                total += r.uncertainty;
                key[r.sample_id] = hardness(r, cfg.difficulty_source);
            }
            m.mean_uncertainty = total / static_cast<double>(snapshot->size());
            m.batch_sum_spread = batch_sum_spread(plan, key);
        }
        m.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

        const auto row = metrics_row(m) + '\n';
        metrics_csv += row;
        timing_csv += std::to_string(epoch) + ',' + format_double(m.wall_seconds) + '\n';
        if (write) {
            std::ofstream out((fs::path(cfg.output_dir) / "metrics.csv").string(), std::ios::app | std::ios::binary);
            out << row;
        }
        result.metrics.push_back(std::move(m));
        result.plans.push_back(std::move(plan));
    }
    result.final_model = model;

    if (write) {
        const fs::path dir(cfg.output_dir);
        write_text_file((dir / "timing.csv").string(), timing_csv);
        save_model(result.warmup_model, (dir / "checkpoint_warmup.json").string());
        save_model(model, (dir / "checkpoint_final.json").string());
        if (snapshot) write_text_file((dir / "difficulty_last.csv").string(), difficulty_to_csv(*snapshot));
        if (cfg.dump_plans) write_text_file((dir / "plans.json").string(), plans_to_json(result.plans));
    }
    return result;
}

RunResult run(const ExperimentConfig& cfg) {
    if (cfg.data_path.empty()) throw std::invalid_argument("run: no dataset path configured");
    const auto train = load_dataset(cfg.data_path);
    if (cfg.eval_path.empty()) return run_experiment(cfg, train, nullptr);
    const auto eval = load_dataset(cfg.eval_path);
    return run_experiment(cfg, train, &eval);
}

ConvergedModel train_until_converged(const ExperimentConfig& cfg, const Dataset& train, int max_epochs, double rel_tol,
                                     std::size_t window) {
    train.validate();
    if (train.empty()) throw std::invalid_argument("train_until_converged: empty training set");
    std::map<SampleId, std::size_t> row_of;
    for (std::size_t k = 0; k < train.size(); ++k) row_of[train.samples[k].id] = k;
    const auto ids = train.ids();

    ConvergedModel out;
    out.model = MlpModel::initialized(model_shape(cfg, train.feature_dim()), cfg.seed);
    for (int epoch = 0; epoch < max_epochs; ++epoch) {
        auto rng = plan_rng(cfg.seed, epoch);
        auto plan = random_plan(ids, cfg.batch_size, rng);
        plan.epoch = epoch;
        train_epoch(out.model, train, row_of, plan, cfg, nullptr);
        out.epoch_losses.push_back(mean_training_loss(out.model, train, cfg.loss_kind));
        out.epochs = epoch + 1;
        if (is_converged(out.epoch_losses, rel_tol, window)) {
            out.converged = true;
            break;
        }
    }
    return out;
}

std::string config_label(const ExperimentConfig& cfg) {
    std::string label(to_string(cfg.scheduler));
    if (cfg.scheduler == SchedulerKind::mixed || cfg.scheduler == SchedulerKind::anti_mixed) {
        label += '+';
        label += to_string(cfg.difficulty_source);
    }
    return label;
}

ComparisonTable compare(std::span<const ExperimentConfig> configs, std::span<const std::uint64_t> seeds,
                        const Dataset& train, const Dataset* eval, const std::string& output_dir) {
    if (configs.size() < 2) throw std::invalid_argument("compare: need at least two configs");
    if (seeds.empty()) throw std::invalid_argument("compare: need at least one seed");

    std::vector<std::string> labels;
    for (const auto& c : configs) {
        auto label = config_label(c);
        const auto base = label;
        for (int k = 2; std::find(labels.begin(), labels.end(), label) != labels.end(); ++k) {
            label = base + "#" + std::to_string(k);
        }
        labels.push_back(label);
    }

    ComparisonTable table;
    for (std::size_t c = 0; c < configs.size(); ++c) {
        for (const auto seed : seeds) {
            CompareCell cell;
            cell.label = labels[c];
            cell.seed = seed;
            auto cfg = configs[c];
            cfg.seed = seed;
            cfg.output_dir = output_dir.empty()
                                 ? std::string()
                                 : (fs::path(output_dir) / labels[c] / ("seed_" + std::to_string(seed))).string();
            try {
                const auto r = run_experiment(cfg, train, eval);
                cell.final_metrics = r.metrics.back();
                cell.ok = true;
            } catch (const std::exception& e) {
                cell.error = e.what();
            }
            table.cells.push_back(std::move(cell));
        }
    }

    const auto random_it = std::find_if(configs.begin(), configs.end(),
                                        [](const ExperimentConfig& c) { return c.scheduler == SchedulerKind::random; });
    const auto random_index = static_cast<std::size_t>(random_it - configs.begin());
    const bool has_random = random_it != configs.end();

    const auto n_seeds = seeds.size();
    for (std::size_t c = 0; c < configs.size(); ++c) {
        CompareSummary s;
        s.label = labels[c];
        std::vector<double> recall, loss;
        for (std::size_t k = 0; k < n_seeds; ++k) {
            const auto& cell = table.cells[c * n_seeds + k];
            ++s.runs;
            if (!cell.ok) {
                ++s.failures;
                continue;
            }
            recall.push_back(cell.final_metrics.minority_recall);
            loss.push_back(cell.final_metrics.mean_loss);
        }
        auto mean_std = [](const std::vector<double>& v) -> std::pair<double, double> {
            if (v.empty()) return {0.0, 0.0};
            const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
            if (v.size() < 2) return {mean, 0.0};
            double ss = 0.0;
            for (const double x : v) ss += (x - mean) * (x - mean);
            return {mean, std::sqrt(ss / static_cast<double>(v.size() - 1))};
        };
        std::tie(s.minority_recall_mean, s.minority_recall_std) = mean_std(recall);
        std::tie(s.mean_loss_mean, s.mean_loss_std) = mean_std(loss);
        if (has_random) {
            std::size_t wins = 0;
            for (std::size_t k = 0; k < n_seeds; ++k) {
                const auto& mine = table.cells[c * n_seeds + k];
                const auto& ref = table.cells[random_index * n_seeds + k];
                if (mine.ok && ref.ok && mine.final_metrics.minority_recall >= ref.final_metrics.minority_recall) ++wins;
            }
            s.wins_over_random = wins;
        }
        table.summary.push_back(std::move(s));
    }

    if (!output_dir.empty()) {
        fs::create_directories(output_dir);
        write_text_file((fs::path(output_dir) / "comparison.csv").string(), comparison_to_csv(table));
        write_text_file((fs::path(output_dir) / "comparison.json").string(), comparison_to_json(table));
    }
    return table;
}

std::string comparison_to_csv(const ComparisonTable& table) {
    std::string out =
        "label,runs,failures,minority_recall_mean,minority_recall_std,mean_loss_mean,mean_loss_std,wins_over_random\n";
    for (const auto& s : table.summary) {
        out += s.label + ',' + std::to_string(s.runs) + ',' + std::to_string(s.failures) + ',' +
               format_double(s.minority_recall_mean) + ',' + format_double(s.minority_recall_std) + ',' +
               format_double(s.mean_loss_mean) + ',' + format_double(s.mean_loss_std) + ',' +
               (s.wins_over_random ? std::to_string(*s.wins_over_random) : std::string()) + '\n';
    }
    return out;
}

std::string comparison_to_json(const ComparisonTable& table) {
    using nlohmann::ordered_json;
    ordered_json j;
    auto& cells = j["cells"] = ordered_json::array();
    for (const auto& c : table.cells) {
        ordered_json cell{{"label", c.label}, {"seed", c.seed}, {"ok", c.ok}};
        if (c.ok) {
            cell["minority_recall"] = c.final_metrics.minority_recall;
            cell["mean_loss"] = c.final_metrics.mean_loss;
            cell["recall_class0"] = c.final_metrics.recall_class0;
            cell["recall_class1"] = c.final_metrics.recall_class1;
        } else {
            cell["error"] = c.error;
        }
        cells.push_back(std::move(cell));
    }
    auto& summary = j["summary"] = ordered_json::array();
    for (const auto& s : table.summary) {
        summary.push_back({{"label", s.label},
                           {"runs", s.runs},
                           {"failures", s.failures},
                           {"minority_recall_mean", s.minority_recall_mean},
                           {"minority_recall_std", s.minority_recall_std},
                           {"mean_loss_mean", s.mean_loss_mean},
                           {"mean_loss_std", s.mean_loss_std},
                           {"wins_over_random", s.wins_over_random ? ordered_json(*s.wins_over_random) : ordered_json()}});
    }
    return j.dump(1);
}

ScatterMode parse_scatter_mode(std::string_view name) {
    if (name == "value") return ScatterMode::value;
    if (name == "index") return ScatterMode::index;
    throw std::invalid_argument("unknown scatter mode '" + std::string(name) + "'");
}

std::string export_scatter(std::span<const ScoreRecord> scores, ScatterMode mode) {
    std::string out = "sample_id,loss,uncertainty\n";
    if (mode == ScatterMode::value) {
        for (const auto& s : scores) {
            out += std::to_string(s.sample_id) + ',' + format_double(s.loss) + ',' + format_double(s.uncertainty) + '\n';
        }
        return out;
    }
    if (scores.empty()) return out;
    const auto records = build_difficulty(scores);
    for (const auto& r : records) {
        out += std::to_string(r.sample_id) + ',' + std::to_string(r.rank_l) + ',' + std::to_string(r.rank_u) + '\n';
    }
    return out;
}

std::vector<ScoreRecord> parse_scatter_csv(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    if (!std::getline(in, line) || line != "sample_id,loss,uncertainty") {
        throw std::runtime_error("scatter: unexpected header");
    }
    std::vector<ScoreRecord> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos) throw std::runtime_error("scatter: bad row '" + line + "'");
        const std::string_view v(line);
        out.push_back({parse_value<SampleId>("sample_id", v.substr(0, c1)),
                       parse_value<double>("loss", v.substr(c1 + 1, c2 - c1 - 1)),
                       parse_value<double>("uncertainty", v.substr(c2 + 1))});
    }
    return out;
}

}  // namespace moscl
