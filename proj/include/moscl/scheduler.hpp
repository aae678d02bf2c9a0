#ifndef MOSCL_SCHEDULER_HPP
#define MOSCL_SCHEDULER_HPP

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "moscl/dataset.hpp"
#include "moscl/difficulty.hpp"
#include "moscl/rng.hpp"

namespace moscl {

/// One epoch's ordered partition of sample ids into mini-batches.
struct BatchPlan {
    int epoch = 0;
    std::size_t batch_size = 0;
    std::vector<std::vector<SampleId>> batches;
    /// Set by OHEM, where hard samples are deliberately repeated.
    bool allows_duplicates = false;

    std::size_t slot_count() const;
    std::vector<SampleId> flattened() const;
    /// True when every id appears exactly once and nothing else appears.
    bool covers_exactly(std::span<const SampleId> ids) const;
};

/// Sample id with its hardness key (smaller = harder).
struct ScoredId {
    SampleId id = 0;
    std::size_t hardness = 0;
};

/// Looks up the hardness of every id; throws std::invalid_argument when an id
/// has no difficulty record.
std::vector<ScoredId> scored_ids(std::span<const SampleId> ids, std::span<const DifficultyRecord> records,
                                 DifficultySource source);

BatchPlan random_plan(std::span<const SampleId> ids, std::size_t batch_size, Rng& rng);

/// Sorts hardest first, then draws alternately from the hard end and the easy
/// end of that order and chunks the interleaved sequence into batches. With
/// batch_size 2 this pairs position k with position N-1-k; an odd leftover in
/// the middle lands in the short final batch.
BatchPlan mixed_order_plan(std::span<const ScoredId> scored, std::size_t batch_size);

/// Hardest first, chunked contiguously (hard with hard, easy with easy).
BatchPlan anti_mixed_plan(std::span<const ScoredId> scored, std::size_t batch_size);

struct LossEntry {
    SampleId id = 0;
    double loss = 0.0;
};

/// The top round(ratio * N) samples by loss (at least one) get one extra slot each;
/// the slots are shuffled and chunked.
BatchPlan ohem_plan(std::span<const LossEntry> losses, std::size_t batch_size, double ratio, Rng& rng);

enum class SpRegularizer { hard, linear };

SpRegularizer parse_sp_regularizer(std::string_view name);
std::string_view to_string(SpRegularizer r);

struct SpConfig {
    SpRegularizer regularizer = SpRegularizer::linear;
    double lambda0 = 0.25;
    double growth = 0.0;

    void validate() const;
};

/// hard:   1 if l < lambda else 0
/// linear: max(0, 1 - l / lambda)
double sp_weight(double loss, SpRegularizer regularizer, double lambda);

/// lambda0 + growth * epoch.
double age_schedule(int epoch, const SpConfig& cfg);

/// max - min of the per-batch hardness sums over the plan's full-size batches
/// (0 when fewer than one full batch exists).
double batch_sum_spread(const BatchPlan& plan, const std::map<SampleId, std::size_t>& hardness_by_id);

/// Debug dump: [{"epoch": e, "duplicates": bool, "batches": [[id, ...], ...]}, ...].
std::string plans_to_json(std::span<const BatchPlan> plans);

}  // namespace moscl

#endif  // MOSCL_SCHEDULER_HPP
