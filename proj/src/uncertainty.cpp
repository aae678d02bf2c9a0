#include "moscl/uncertainty.hpp"

#include <algorithm>
#include <stdexcept>

#include <json.hpp>

namespace moscl {

void UncertaintyConfig::validate() const {
    if (disturbances < 1) throw std::invalid_argument("uncertainty: G must be >= 1");
    if (!(gamma >= 0.0)) throw std::invalid_argument("uncertainty: gamma must be >= 0");
}

std::vector<double> sample_perturbation(std::size_t dim, double gamma, Rng& rng) {
    if (dim == 0) throw std::invalid_argument("sample_perturbation: dim must be >= 1");
    std::vector<double> t(dim, 0.0);
    if (gamma == 0.0) return t;
    std::uniform_real_distribution<double> u(-gamma, gamma);
    for (auto& v : t) v = u(rng);
    return t;
}

double estimate_uncertainty(const MlpModel& model, std::span<const double> x, const UncertaintyConfig& cfg,
                            Rng& rng) {
    cfg.validate();
    std::vector<double> mean(model.output_dim(), 0.0);
    for (int g = 0; g < cfg.disturbances; ++g) {
        const auto t = sample_perturbation(model.hidden_dim(), cfg.gamma, rng);
        const auto trace = model.forward(x, std::span<const double>(t));
        for (std::size_t c = 0; c < mean.size(); ++c) mean[c] += trace.prediction[c];
    }
    for (auto& v : mean) v /= cfg.disturbances;

    if (model.shape().head == Head::sigmoid) return entropy(mean[0], cfg.entropy_mode);
    double u = 0.0;
    for (const double p : mean) u += entropy(std::min(1.0, p), EntropyMode::plain);
    return u;
}

std::uint64_t uncertainty_stream_seed(std::uint64_t seed, SampleId id) {
    return derive_seed(seed, {stream::perturb, static_cast<std::uint64_t>(id)});
}

double estimate_uncertainty(const MlpModel& model, std::span<const double> x, const UncertaintyConfig& cfg,
                            SampleId id) {
    Rng rng(uncertainty_stream_seed(cfg.seed, id));
    return estimate_uncertainty(model, x, cfg, rng);
}

std::map<SampleId, double> batch_score_uncertainty(const MlpModel& model, const Dataset& data,
                                                   const UncertaintyConfig& cfg) {
    if (data.empty()) throw std::invalid_argument("batch_score_uncertainty: empty dataset");
    std::map<SampleId, double> out;
    for (const auto& s : data.samples) out[s.id] = estimate_uncertainty(model, s.x, cfg, s.id);
    return out;
}

std::vector<ScoreRecord> score_dataset(const MlpModel& model, const Dataset& data, LossKind loss_kind,
                                       const UncertaintyConfig& cfg) {
    if (data.empty()) throw std::invalid_argument("score_dataset: empty dataset");
    std::vector<ScoreRecord> out;
    out.reserve(data.size());
    for (const auto& s : data.samples) {
        out.push_back({s.id, model.sample_loss(s.x, s.y, loss_kind), estimate_uncertainty(model, s.x, cfg, s.id)});
    }
    return out;
}

std::string scores_to_json(std::span<const ScoreRecord> scores) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : scores) {
        arr.push_back({{"sample_id", r.sample_id}, {"loss", r.loss}, {"uncertainty", r.uncertainty}});
    }
    return arr.dump(1);
}

std::vector<ScoreRecord> scores_from_json(std::string_view text) {
    const auto arr = nlohmann::json::parse(text);
    if (!arr.is_array()) throw std::runtime_error("scores: expected a JSON array");
    std::vector<ScoreRecord> out;
    out.reserve(arr.size());
    for (const auto& r : arr) {
        out.push_back({r.at("sample_id").get<SampleId>(), r.at("loss").get<double>(),
                       r.at("uncertainty").get<double>()});
    }
    return out;
}

}  // namespace moscl
