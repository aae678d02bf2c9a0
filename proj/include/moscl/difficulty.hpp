#ifndef MOSCL_DIFFICULTY_HPP
#define MOSCL_DIFFICULTY_HPP

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "moscl/dataset.hpp"
#include "moscl/uncertainty.hpp"

namespace moscl {

/// Rank position 0 is the hardest sample (largest loss / uncertainty), so a
/// smaller fused score d means a harder sample.
struct DifficultyRecord {
    SampleId sample_id = 0;
    double loss = 0.0;
    double uncertainty = 0.0;
    std::size_t rank_u = 0;
    std::size_t rank_l = 0;
    std::size_t d = 0;
};

/// Which ranks feed the scheduler's hardness key.
enum class DifficultySource { loss, uncertainty, both };

DifficultySource parse_difficulty_source(std::string_view name);
std::string_view to_string(DifficultySource s);

/// Position of each entry in the descending order of `values`, returned aligned
/// with the input. Ties go to the smaller id. Rejects NaN/inf and mismatched
/// lengths.
std::vector<std::size_t> rank_descending(std::span<const double> values, std::span<const SampleId> ids);

/// Fills d = rank_u + rank_l. Both rank columns must be permutations of
/// 0..N-1 over a duplicate-free id set.
std::vector<DifficultyRecord> fuse_ranks(std::vector<DifficultyRecord> records);

/// Ranks a score snapshot on both axes and fuses them.
std::vector<DifficultyRecord> build_difficulty(std::span<const ScoreRecord> scores);

/// Hardness key under a difficulty source: rank_l, rank_u, or d.
std::size_t hardness(const DifficultyRecord& r, DifficultySource source);

struct QuadrantThresholds {
    double uncertainty_split = 0.0;
    double loss_split = 0.0;
};

/// Medians of the uncertainty and loss columns (midpoint average for even N).
QuadrantThresholds median_thresholds(std::span<const DifficultyRecord> records);

/// A value counts as high only when strictly above its split.
Quadrant classify_point(double uncertainty, double loss, const QuadrantThresholds& t);

std::map<SampleId, Quadrant> quadrant_classify(std::span<const DifficultyRecord> records,
                                               std::optional<QuadrantThresholds> thresholds = std::nullopt);

/// CSV with header sample_id,loss,uncertainty,rank_l,rank_u,d,quadrant.
std::string difficulty_to_csv(std::span<const DifficultyRecord> records,
                              std::optional<QuadrantThresholds> thresholds = std::nullopt);

}  // namespace moscl

#endif  // MOSCL_DIFFICULTY_HPP
