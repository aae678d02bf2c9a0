#ifndef MOSCL_CONFLICT_HPP
#define MOSCL_CONFLICT_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "moscl/dataset.hpp"
#include "moscl/model.hpp"

namespace moscl {

struct ConflictPair {
    SampleId id_i = 0;
    SampleId id_j = 0;
    double cosine = 0.0;
    double loss_sum = 0.0;

    double conflict() const { return 1.0 - cosine; }
};

struct ConflictReport {
    std::vector<ConflictPair> pairs;
    /// Spearman correlation between conflict (1 - cosine) and loss sum; empty
    /// when either column is constant.
    std::optional<double> spearman_rho;
    std::size_t skipped_zero_gradient = 0;
    std::string model_tag;

    bool degenerate() const { return !spearman_rho.has_value(); }
};

/// dot(a, b) / (|a| |b|), clamped to [-1, 1]. Throws std::domain_error when
/// either vector is zero (the angle is undefined).
double gradient_cosine(const GradientVector& a, const GradientVector& b);

/// Spearman rank correlation with average ranks for ties. Empty when either
/// input has zero rank variance.
std::optional<double> spearman(std::span<const double> x, std::span<const double> y);

struct ConflictOptions {
    LossKind loss_kind = LossKind::mse;
    std::size_t max_pairs = 2000;
    std::size_t exhaustive_limit = 64;  // all pairs up to this many samples
    std::uint64_t seed = 0;
    std::string model_tag;
};

/// Pairwise gradient conflict vs. pairwise loss sum over a dataset. The result
/// depends only on (model, dataset content): pairs are keyed by sorted ids.
ConflictReport conflict_loss_monotonicity(const MlpModel& model, const Dataset& data,
                                          const ConflictOptions& options = {});

/// |dL/dz| written through the loss: 2 yhat l for y = 1, 2 yhat^2 (1 - sqrt(l))
/// for y = 0, with l = (yhat - y)^2.
double latent_gradient_scale(int y, double yhat);

/// True when the last `window` epoch-to-epoch relative decreases of the mean
/// training loss are all below `rel_tol`.
bool is_converged(std::span<const double> epoch_losses, double rel_tol = 1e-4, std::size_t window = 5);

std::string conflict_report_to_json(const ConflictReport& report);
std::string conflict_pairs_to_csv(const ConflictReport& report);

}  // namespace moscl

#endif  // MOSCL_CONFLICT_HPP
