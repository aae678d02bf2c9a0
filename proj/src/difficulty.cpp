#include "moscl/difficulty.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

namespace moscl {

namespace {

bool is_permutation_of_range(std::vector<std::size_t> v) {
    std::sort(v.begin(), v.end());
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (v[k] != k) return false;
    }
    return true;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const auto n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

DifficultySource parse_difficulty_source(std::string_view name) {
    if (name == "loss") return DifficultySource::loss;
    if (name == "uncertainty") return DifficultySource::uncertainty;
    if (name == "both") return DifficultySource::both;
    throw std::invalid_argument("unknown difficulty source '" + std::string(name) + "'");
}

std::string_view to_string(DifficultySource s) {
    switch (s) {
        case DifficultySource::loss: return "loss";
        case DifficultySource::uncertainty: return "uncertainty";
        case DifficultySource::both: return "both";
    }
    return "?";
}

std::vector<std::size_t> rank_descending(std::span<const double> values, std::span<const SampleId> ids) {
    if (values.empty()) throw std::invalid_argument("rank_descending: empty input");
    if (values.size() != ids.size()) throw std::invalid_argument("rank_descending: values/ids length mismatch");
    for (const double v : values) {
        if (!std::isfinite(v)) throw std::invalid_argument("rank_descending: non-finite value");
    }
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (values[a] != values[b]) return values[a] > values[b];
        return ids[a] < ids[b];
    });
    std::vector<std::size_t> rank(values.size());
    for (std::size_t pos = 0; pos < order.size(); ++pos) rank[order[pos]] = pos;
    return rank;
}

std::vector<DifficultyRecord> fuse_ranks(std::vector<DifficultyRecord> records) {
    std::set<SampleId> ids;
    std::vector<std::size_t> ru, rl;
    ru.reserve(records.size());
    rl.reserve(records.size());
    for (const auto& r : records) {
        if (!ids.insert(r.sample_id).second) {
            throw std::invalid_argument("fuse_ranks: duplicate sample id " + std::to_string(r.sample_id));
        }
        ru.push_back(r.rank_u);
        rl.push_back(r.rank_l);
    }
    if (!is_permutation_of_range(std::move(ru)) || !is_permutation_of_range(std::move(rl))) {
        throw std::invalid_argument("fuse_ranks: rank columns do not cover the same id set");
    }
    for (auto& r : records) r.d = r.rank_u + r.rank_l;
    return records;
}

std::vector<DifficultyRecord> build_difficulty(std::span<const ScoreRecord> scores) {
    std::vector<double> losses, uncertainties;
    std::vector<SampleId> ids;
    for (const auto& s : scores) {
        losses.push_back(s.loss);
        uncertainties.push_back(s.uncertainty);
        ids.push_back(s.sample_id);
    }
    const auto rl = rank_descending(losses, ids);
    const auto ru = rank_descending(uncertainties, ids);
    std::vector<DifficultyRecord> records(scores.size());
    for (std::size_t k = 0; k < scores.size(); ++k) {
        records[k] = {ids[k], losses[k], uncertainties[k], ru[k], rl[k], 0};
    }
    return fuse_ranks(std::move(records));
}

std::size_t hardness(const DifficultyRecord& r, DifficultySource source) {
    switch (source) {
        case DifficultySource::loss: return r.rank_l;
        case DifficultySource::uncertainty: return r.rank_u;
        case DifficultySource::both: return r.d;
    }
    return r.d;
}

QuadrantThresholds median_thresholds(std::span<const DifficultyRecord> records) {
    if (records.empty()) throw std::invalid_argument("median_thresholds: no records");
    std::vector<double> u, l;
    for (const auto& r : records) {
        u.push_back(r.uncertainty);
        l.push_back(r.loss);
    }
    return {median(std::move(u)), median(std::move(l))};
}

Quadrant classify_point(double uncertainty, double loss, const QuadrantThresholds& t) {
    const bool high_u = uncertainty > t.uncertainty_split;
    const bool high_l = loss > t.loss_split;
    if (high_u) return high_l ? Quadrant::hh : Quadrant::hl;
    return high_l ? Quadrant::lh : Quadrant::ll;
}

std::map<SampleId, Quadrant> quadrant_classify(std::span<const DifficultyRecord> records,
                                               std::optional<QuadrantThresholds> thresholds) {
    std::map<SampleId, Quadrant> out;
    if (records.empty()) return out;
    const auto t = thresholds ? *thresholds : median_thresholds(records);
    if (!std::isfinite(t.uncertainty_split) || !std::isfinite(t.loss_split)) {
        throw std::invalid_argument("quadrant_classify: thresholds must be finite");
    }
    for (const auto& r : records) out[r.sample_id] = classify_point(r.uncertainty, r.loss, t);
    return out;
}

std::string difficulty_to_csv(std::span<const DifficultyRecord> records,
                              std::optional<QuadrantThresholds> thresholds) {
    const auto quadrants = quadrant_classify(records, thresholds);
    std::string out = "sample_id,loss,uncertainty,rank_l,rank_u,d,quadrant\n";
    for (const auto& r : records) {
        out += std::to_string(r.sample_id) + ',' + format_double(r.loss) + ',' + format_double(r.uncertainty) +
               ',' + std::to_string(r.rank_l) + ',' + std::to_string(r.rank_u) + ',' + std::to_string(r.d) + ',' +
               std::string(to_string(quadrants.at(r.sample_id))) + '\n';
    }
    return out;
}

}  // namespace moscl
