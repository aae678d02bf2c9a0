#include "moscl/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "moscl/rng.hpp"

namespace moscl {

namespace {

std::size_t rounded(double fraction, std::size_t n) {
    return static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
}

bool is_fraction(double v) { return v >= 0.0 && v <= 1.0; }

}  // namespace

void GenSpec::validate() const {
    if (n_total < 4) throw std::invalid_argument("GenSpec: n_total must be >= 4");
    if (dim < 2 || dim > 8) throw std::invalid_argument("GenSpec: dim must lie in [2, 8]");
    if (!is_fraction(minority_fraction) || !is_fraction(label_noise_rate) || !is_fraction(feature_noise_rate)) {
        throw std::invalid_argument("GenSpec: fractions must lie in [0, 1]");
    }
    if (label_noise_rate + feature_noise_rate > 1.0) {
        throw std::invalid_argument("GenSpec: label and feature noise fractions sum above 1");
    }
    if (!(cluster_separation >= 0.0) || !std::isfinite(cluster_separation)) {
        throw std::invalid_argument("GenSpec: cluster_separation must be finite and >= 0");
    }
}

QuadrantCounts planned_counts(const GenSpec& spec) {
    spec.validate();
    QuadrantCounts c;
    c.hh = rounded(spec.minority_fraction, spec.n_total);
    const auto majority = spec.n_total - c.hh;
    c.lh = rounded(spec.label_noise_rate, majority);
    c.hl = std::min(rounded(spec.feature_noise_rate, majority), majority - c.lh);
    c.ll = majority - c.lh - c.hl;
    return c;
}

Dataset generate(const GenSpec& spec) {
    const auto counts = planned_counts(spec);
    Rng rng(derive_seed(spec.seed, {stream::data}));

    std::vector<Quadrant> tags;
    tags.reserve(spec.n_total);
    tags.insert(tags.end(), counts.hh, Quadrant::hh);
    tags.insert(tags.end(), counts.lh, Quadrant::lh);
    tags.insert(tags.end(), counts.hl, Quadrant::hl);
    tags.insert(tags.end(), counts.ll, Quadrant::ll);
    std::shuffle(tags.begin(), tags.end(), rng);

    const double offset = 0.5 * spec.cluster_separation * GenSpec::kClusterStd / std::sqrt(static_cast<double>(spec.dim));
    std::normal_distribution<double> noise(0.0, GenSpec::kClusterStd);
    std::normal_distribution<double> jitter(0.0, GenSpec::kJitterStdMultiple * GenSpec::kClusterStd);

    Dataset data;
    data.samples.reserve(spec.n_total);
    for (std::size_t k = 0; k < tags.size(); ++k) {
        Sample s;
        s.id = static_cast<SampleId>(k);
        s.true_quadrant = tags[k];
        s.clean_label = tags[k] == Quadrant::hh ? 1 : 0;
        s.y = tags[k] == Quadrant::lh ? 1 - s.clean_label : s.clean_label;
        const double center = s.clean_label == 1 ? offset : -offset;
        s.x.resize(spec.dim);
        for (auto& v : s.x) v = center + noise(rng);
        if (tags[k] == Quadrant::hl) {
            for (auto& v : s.x) v += jitter(rng);
        }
        data.samples.push_back(std::move(s));
    }
    return data;
}

std::string genspec_to_json(const GenSpec& spec) {
    nlohmann::ordered_json j;
    j["n_total"] = spec.n_total;
    j["minority_fraction"] = spec.minority_fraction;
    j["label_noise_rate"] = spec.label_noise_rate;
    j["feature_noise_rate"] = spec.feature_noise_rate;
    j["cluster_separation"] = spec.cluster_separation;
    j["dim"] = spec.dim;
    j["seed"] = spec.seed;
    return j.dump(2);
}

GenSpec genspec_from_json(std::string_view text) {
    const auto j = nlohmann::json::parse(text);
    GenSpec s;
    s.n_total = j.at("n_total").get<std::size_t>();
    s.minority_fraction = j.at("minority_fraction").get<double>();
    s.label_noise_rate = j.at("label_noise_rate").get<double>();
    s.feature_noise_rate = j.at("feature_noise_rate").get<double>();
    s.cluster_separation = j.at("cluster_separation").get<double>();
    s.dim = j.at("dim").get<std::size_t>();
    s.seed = j.at("seed").get<std::uint64_t>();
    s.validate();
    return s;
}

std::map<Quadrant, double> quadrant_recovery_rate(const Dataset& data, std::span<const DifficultyRecord> records,
                                                  std::optional<QuadrantThresholds> thresholds) {
    const auto measured = quadrant_classify(records, thresholds);
    std::map<Quadrant, std::size_t> total, matched;
    for (const auto& s : data.samples) {
        const auto it = measured.find(s.id);
        if (it == measured.end()) throw std::invalid_argument("no difficulty score for sample " + std::to_string(s.id));
        ++total[s.true_quadrant];
        if (it->second == s.true_quadrant) ++matched[s.true_quadrant];
    }
    std::map<Quadrant, double> out;
    for (const auto& [q, n] : total) out[q] = static_cast<double>(matched[q]) / static_cast<double>(n);
    return out;
}

}  // namespace moscl
