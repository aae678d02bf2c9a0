#ifndef MOSCL_UNCERTAINTY_HPP
#define MOSCL_UNCERTAINTY_HPP

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "moscl/core_math.hpp"
#include "moscl/dataset.hpp"
#include "moscl/model.hpp"
#include "moscl/rng.hpp"

namespace moscl {

struct UncertaintyConfig {
    int disturbances = 8;  // G
    double gamma = 0.3;    // perturbation half-range
    std::uint64_t seed = 0;
    EntropyMode entropy_mode = EntropyMode::plain;

    void validate() const;
};

/// i.i.d. U[-gamma, +gamma] entries; gamma == 0 gives an exact zero vector.
std::vector<double> sample_perturbation(std::size_t dim, double gamma, Rng& rng);

/// Entropy of the mean prediction over G perturbed forwards. Softmax heads use
/// the Shannon entropy of the averaged distribution.
double estimate_uncertainty(const MlpModel& model, std::span<const double> x, const UncertaintyConfig& cfg,
                            Rng& rng);

/// Same as above using the stream of sample `id` under cfg.seed.
double estimate_uncertainty(const MlpModel& model, std::span<const double> x, const UncertaintyConfig& cfg,
                            SampleId id = 0);

/// Per-sample RNG stream seed, independent of scoring order.
std::uint64_t uncertainty_stream_seed(std::uint64_t seed, SampleId id);

std::map<SampleId, double> batch_score_uncertainty(const MlpModel& model, const Dataset& data,
                                                   const UncertaintyConfig& cfg);

/// One row of the score dump shared with the difficulty module.
struct ScoreRecord {
    SampleId sample_id = 0;
    double loss = 0.0;
    double uncertainty = 0.0;

    bool operator==(const ScoreRecord&) const = default;
};

/// Loss (noise-free forward) and perturbation uncertainty for every sample, in
/// dataset order.
std::vector<ScoreRecord> score_dataset(const MlpModel& model, const Dataset& data, LossKind loss_kind,
                                       const UncertaintyConfig& cfg);

/// JSON array of {sample_id, loss, uncertainty}.
std::string scores_to_json(std::span<const ScoreRecord> scores);
std::vector<ScoreRecord> scores_from_json(std::string_view text);

}  // namespace moscl

#endif  // MOSCL_UNCERTAINTY_HPP
