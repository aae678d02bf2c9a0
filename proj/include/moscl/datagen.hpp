#ifndef MOSCL_DATAGEN_HPP
#define MOSCL_DATAGEN_HPP

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>

#include "moscl/dataset.hpp"
#include "moscl/difficulty.hpp"

namespace moscl {

/// Two-class Gaussian mixture. Class 0 is the majority, class 1 the minority.
/// Per-dimension cluster std is kClusterStd; centers sit at
/// +-(separation * kClusterStd / 2) along the diagonal.
struct GenSpec {
    std::size_t n_total = 400;
    double minority_fraction = 0.1;
    double label_noise_rate = 0.1;
    double feature_noise_rate = 0.05;
    double cluster_separation = 3.0;  // in cluster standard deviations
    std::size_t dim = 2;
    std::uint64_t seed = 0;

    static constexpr double kClusterStd = 0.5;
    static constexpr double kJitterStdMultiple = 3.0;

    void validate() const;
};

struct QuadrantCounts {
    std::size_t hh = 0, lh = 0, ll = 0, hl = 0;
};

/// Tag counts implied by a spec: round(n * minority) HH, then LH and HL as
/// rounded fractions of the majority, remainder LL.
QuadrantCounts planned_counts(const GenSpec& spec);

/// HH: minority-class draws. LH: majority draws with the label flipped.
/// HL: majority draws with extra Gaussian jitter, label kept. LL: the rest.
/// Rows are shuffled and ids are 0..n-1 in row order.
Dataset generate(const GenSpec& spec);

std::string genspec_to_json(const GenSpec& spec);
GenSpec genspec_from_json(std::string_view text);

/// Fraction of each generation tag whose measured quadrant matches it. Tags
/// absent from the dataset are absent from the result.
std::map<Quadrant, double> quadrant_recovery_rate(const Dataset& data, std::span<const DifficultyRecord> records,
                                                  std::optional<QuadrantThresholds> thresholds = std::nullopt);

}  // namespace moscl

#endif  // MOSCL_DATAGEN_HPP
