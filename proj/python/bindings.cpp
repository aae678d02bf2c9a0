#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "moscl/conflict.hpp"
#include "moscl/core_math.hpp"
#include "moscl/datagen.hpp"
#include "moscl/difficulty.hpp"
#include "moscl/experiment.hpp"
#include "moscl/model.hpp"
#include "moscl/scheduler.hpp"
#include "moscl/uncertainty.hpp"

namespace py = pybind11;
using namespace moscl;

namespace {

std::vector<ScoredId> to_scored(const std::vector<std::pair<SampleId, std::size_t>>& items) {
    std::vector<ScoredId> out;
    out.reserve(items.size());
    for (const auto& [id, h] : items) out.push_back({id, h});
    return out;
}

ExperimentConfig make_config(const std::map<std::string, std::string>& settings) {
    ExperimentConfig cfg;
    for (const auto& [k, v] : settings) apply_setting(cfg, k, v);
    cfg.validate();
    return cfg;
}

py::dict metrics_dict(const EpochMetrics& m) {
    py::dict d;
    d["epoch"] = m.epoch;
    d["phase"] = m.phase;
    d["mean_loss"] = m.mean_loss;
    d["recall_class0"] = m.recall_class0;
    d["recall_class1"] = m.recall_class1;
    d["minority_recall"] = m.minority_recall;
    d["mean_uncertainty"] = m.mean_uncertainty;
    d["batch_dsum_spread"] = m.batch_sum_spread;
    return d;
}

}  // namespace

PYBIND11_MODULE(_moscl, m) {
    m.doc() = "Mixed-order self-paced curriculum learning core";

    // core math
    m.def("entropy", [](double p, const std::string& mode) { return entropy(p, parse_entropy_mode(mode)); },
          py::arg("p"), py::arg("mode") = "plain");
    m.def("sigmoid", &sigmoid);
    m.def("loss", [](const std::string& kind, int y, double yhat) { return loss(parse_loss_kind(kind), y, yhat); },
          py::arg("kind"), py::arg("y"), py::arg("yhat"));
    m.def("inverse_loss", [](const std::string& kind, int y, double l) { return inverse_loss(parse_loss_kind(kind), y, l); },
          py::arg("kind"), py::arg("y"), py::arg("l"));
    m.def("loss_based_uncertainty",
          [](const std::string& kind, int y, double l, const std::string& mode) {
              return loss_based_uncertainty(parse_loss_kind(kind), y, l, parse_entropy_mode(mode));
          },
          py::arg("kind"), py::arg("y"), py::arg("l"), py::arg("mode") = "plain");
    m.def("grad_wrt_prediction", &grad_wrt_prediction, py::arg("y"), py::arg("yhat"));
    m.def("grad_wrt_latent", [](int y, double yhat) { return grad_wrt_latent(y, yhat); }, py::arg("y"), py::arg("yhat"));
    m.def("latent_gradient_scale", &latent_gradient_scale, py::arg("y"), py::arg("yhat"));

    // model
    py::class_<MlpModel>(m, "MlpModel")
        .def(py::init([](std::size_t input_dim, std::size_t hidden_dim, std::size_t output_dim,
                         const std::string& activation, const std::string& head) {
                 return MlpModel(ModelShape{input_dim, hidden_dim, output_dim, parse_activation(activation),
                                            parse_head(head)});
             }),
             py::arg("input_dim") = 2, py::arg("hidden_dim") = 8, py::arg("output_dim") = 1,
             py::arg("activation") = "tanh", py::arg("head") = "sigmoid")
        .def_static("initialized",
                    [](std::size_t input_dim, std::size_t hidden_dim, std::size_t output_dim,
                       const std::string& activation, const std::string& head, std::uint64_t seed) {
                        return MlpModel::initialized(ModelShape{input_dim, hidden_dim, output_dim,
                                                                parse_activation(activation), parse_head(head)},
                                                     seed);
                    },
                    py::arg("input_dim") = 2, py::arg("hidden_dim") = 8, py::arg("output_dim") = 1,
                    py::arg("activation") = "tanh", py::arg("head") = "sigmoid", py::arg("seed") = 0)
        .def_property_readonly("input_dim", &MlpModel::input_dim)
        .def_property_readonly("hidden_dim", &MlpModel::hidden_dim)
        .def_property_readonly("output_dim", &MlpModel::output_dim)
        .def_property(
            "parameters",
            [](const MlpModel& self) {
                const auto p = self.parameters();
                return std::vector<double>(p.begin(), p.end());
            },
            [](MlpModel& self, const std::vector<double>& values) {
                if (values.size() != self.parameter_count()) throw py::value_error("parameter count mismatch");
                std::copy(values.begin(), values.end(), self.parameters().begin());
            })
        .def("predict", [](const MlpModel& self, const std::vector<double>& x) { return self.forward(x).prediction; })
        .def("sample_loss",
             [](const MlpModel& self, const std::vector<double>& x, int y, const std::string& kind) {
                 return self.sample_loss(x, y, parse_loss_kind(kind));
             },
             py::arg("x"), py::arg("y"), py::arg("kind") = "mse")
        .def("per_sample_gradient",
             [](const MlpModel& self, const std::vector<double>& x, int y, const std::string& kind) {
                 return self.per_sample_gradient(x, y, parse_loss_kind(kind)).values;
             },
             py::arg("x"), py::arg("y"), py::arg("kind") = "mse")
        .def("to_json", [](const MlpModel& self) { return model_to_json(self); })
        .def_static("from_json", [](const std::string& text) { return model_from_json(text); })
        .def("save", [](const MlpModel& self, const std::string& path) { save_model(self, path); })
        .def_static("load", &load_model);

    // data
    py::class_<Sample>(m, "Sample")
        .def_readonly("id", &Sample::id)
        .def_readonly("x", &Sample::x)
        .def_readonly("y", &Sample::y)
        .def_readonly("clean_label", &Sample::clean_label)
        .def_property_readonly("true_quadrant", [](const Sample& s) { return std::string(to_string(s.true_quadrant)); });

    py::class_<Dataset>(m, "Dataset")
        .def("__len__", &Dataset::size)
        .def_readonly("samples", &Dataset::samples)
        .def_property_readonly("feature_dim", &Dataset::feature_dim)
        .def("ids", &Dataset::ids)
        .def("to_csv", [](const Dataset& d) { return dataset_to_csv(d); })
        .def_static("from_csv", [](const std::string& text) { return dataset_from_csv(text); })
        .def("save", [](const Dataset& d, const std::string& path) { save_dataset(d, path); })
        .def_static("load", &load_dataset);

    m.def("generate",
          [](std::size_t n_total, double minority_fraction, double label_noise_rate, double feature_noise_rate,
             double cluster_separation, std::size_t dim, std::uint64_t seed) {
              return generate(GenSpec{n_total, minority_fraction, label_noise_rate, feature_noise_rate,
                                      cluster_separation, dim, seed});
          },
          py::arg("n_total") = 400, py::arg("minority_fraction") = 0.1, py::arg("label_noise_rate") = 0.1,
          py::arg("feature_noise_rate") = 0.05, py::arg("cluster_separation") = 3.0, py::arg("dim") = 2,
          py::arg("seed") = 0);

    // scoring and difficulty
    py::class_<ScoreRecord>(m, "ScoreRecord")
        .def(py::init([](SampleId id, double loss, double uncertainty) { return ScoreRecord{id, loss, uncertainty}; }),
             py::arg("sample_id"), py::arg("loss"), py::arg("uncertainty"))
        .def_readwrite("sample_id", &ScoreRecord::sample_id)
        .def_readwrite("loss", &ScoreRecord::loss)
        .def_readwrite("uncertainty", &ScoreRecord::uncertainty)
        .def("__eq__", [](const ScoreRecord& a, const ScoreRecord& b) { return a == b; });

    py::class_<DifficultyRecord>(m, "DifficultyRecord")
        .def_readonly("sample_id", &DifficultyRecord::sample_id)
        .def_readonly("loss", &DifficultyRecord::loss)
        .def_readonly("uncertainty", &DifficultyRecord::uncertainty)
        .def_readonly("rank_u", &DifficultyRecord::rank_u)
        .def_readonly("rank_l", &DifficultyRecord::rank_l)
        .def_readonly("d", &DifficultyRecord::d);

    m.def("estimate_uncertainty",
          [](const MlpModel& model, const std::vector<double>& x, int disturbances, double gamma, std::uint64_t seed,
             SampleId sample_id, const std::string& mode) {
              return estimate_uncertainty(model, x, UncertaintyConfig{disturbances, gamma, seed, parse_entropy_mode(mode)},
                                          sample_id);
          },
          py::arg("model"), py::arg("x"), py::arg("disturbances") = 8, py::arg("gamma") = 0.3, py::arg("seed") = 0,
          py::arg("sample_id") = 0, py::arg("mode") = "plain");
    m.def("score_dataset",
          [](const MlpModel& model, const Dataset& data, const std::string& kind, int disturbances, double gamma,
             std::uint64_t seed, const std::string& mode) {
              return score_dataset(model, data, parse_loss_kind(kind),
                                   UncertaintyConfig{disturbances, gamma, seed, parse_entropy_mode(mode)});
          },
          py::arg("model"), py::arg("data"), py::arg("kind") = "mse", py::arg("disturbances") = 8,
          py::arg("gamma") = 0.3, py::arg("seed") = 0, py::arg("mode") = "plain");
    m.def("scores_to_json", [](const std::vector<ScoreRecord>& s) { return scores_to_json(s); });
    m.def("scores_from_json", [](const std::string& text) { return scores_from_json(text); });
    m.def("build_difficulty", [](const std::vector<ScoreRecord>& s) { return build_difficulty(s); });
    m.def("quadrant_classify", [](const std::vector<DifficultyRecord>& r) {
        std::map<SampleId, std::string> out;
        for (const auto& [id, q] : quadrant_classify(r)) out[id] = std::string(to_string(q));
        return out;
    });

    // scheduling
    m.def("random_plan",
          [](const std::vector<SampleId>& ids, std::size_t b, std::uint64_t seed) {
              Rng rng(seed);
              return random_plan(ids, b, rng).batches;
          },
          py::arg("ids"), py::arg("batch_size"), py::arg("seed") = 0);
    m.def("mixed_order_plan",
          [](const std::vector<std::pair<SampleId, std::size_t>>& scored, std::size_t b) {
              return mixed_order_plan(to_scored(scored), b).batches;
          },
          py::arg("scored"), py::arg("batch_size"), "scored: list of (id, hardness), smaller hardness = harder");
    m.def("anti_mixed_plan",
          [](const std::vector<std::pair<SampleId, std::size_t>>& scored, std::size_t b) {
              return anti_mixed_plan(to_scored(scored), b).batches;
          },
          py::arg("scored"), py::arg("batch_size"));
    m.def("ohem_plan",
          [](const std::vector<std::pair<SampleId, double>>& losses, std::size_t b, double ratio, std::uint64_t seed) {
              std::vector<LossEntry> entries;
              for (const auto& [id, l] : losses) entries.push_back({id, l});
              Rng rng(seed);
              return ohem_plan(entries, b, ratio, rng).batches;
          },
          py::arg("losses"), py::arg("batch_size"), py::arg("ratio"), py::arg("seed") = 0);
    m.def("sp_weight",
          [](double l, const std::string& reg, double lambda) { return sp_weight(l, parse_sp_regularizer(reg), lambda); },
          py::arg("loss"), py::arg("regularizer"), py::arg("lam"));

    // conflict analysis
    m.def("gradient_cosine", [](const std::vector<double>& a, const std::vector<double>& b) {
        return gradient_cosine(GradientVector{a}, GradientVector{b});
    });
    m.def("spearman", [](const std::vector<double>& x, const std::vector<double>& y) { return spearman(x, y); });
    m.def("conflict_loss_monotonicity",
          [](const MlpModel& model, const Dataset& data, const std::string& kind, std::size_t max_pairs,
             std::uint64_t seed) {
              ConflictOptions opt;
              opt.loss_kind = parse_loss_kind(kind);
              opt.max_pairs = max_pairs;
              opt.seed = seed;
              return conflict_report_to_json(conflict_loss_monotonicity(model, data, opt));
          },
          py::arg("model"), py::arg("data"), py::arg("kind") = "mse", py::arg("max_pairs") = 2000,
          py::arg("seed") = 0, "returns the report as a JSON string");

    // experiment
    m.attr("config_keys") = std::vector<std::string>(kConfigKeys.begin(), kConfigKeys.end());
    m.def("config_text", [](const std::map<std::string, std::string>& s) { return config_to_text(make_config(s)); });
    m.def("run_experiment",
          [](const std::map<std::string, std::string>& settings, const Dataset& train, const Dataset* eval) {
              const auto r = run_experiment(make_config(settings), train, eval);
              py::list metrics;
              for (const auto& e : r.metrics) metrics.append(metrics_dict(e));
              py::dict out;
              out["metrics"] = metrics;
              out["final_model"] = r.final_model;
              out["warmup_model"] = r.warmup_model;
              out["output_dir"] = r.output_dir;
              return out;
          },
          py::arg("settings"), py::arg("train"), py::arg("eval") = nullptr);
    m.def("export_scatter", [](const std::vector<ScoreRecord>& s, const std::string& mode) {
        return export_scatter(s, parse_scatter_mode(mode));
    });
}
