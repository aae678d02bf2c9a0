#ifndef MOSCL_DATASET_HPP
#define MOSCL_DATASET_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace moscl {

using SampleId = std::int64_t;

/// High/low uncertainty x high/low loss.
///   hh: minority / insufficient data      lh: mislabeled
///   ll: clean majority                    hl: feature noise
enum class Quadrant { hh, lh, ll, hl };

inline constexpr Quadrant kAllQuadrants[] = {Quadrant::hh, Quadrant::lh, Quadrant::ll, Quadrant::hl};

std::string_view to_string(Quadrant q);
Quadrant parse_quadrant(std::string_view name);

struct Sample {
    SampleId id = 0;
    std::vector<double> x;
    int y = 0;
    int clean_label = 0;
    Quadrant true_quadrant = Quadrant::ll;
};

struct Dataset {
    std::vector<Sample> samples;

    std::size_t size() const { return samples.size(); }
    bool empty() const { return samples.empty(); }
    std::size_t feature_dim() const { return samples.empty() ? 0 : samples.front().x.size(); }
    std::vector<SampleId> ids() const;
    const Sample& by_id(SampleId id) const;

    /// Throws std::invalid_argument on duplicate ids or ragged feature vectors.
    void validate() const;
};

/// CSV with header id,y,clean_label,true_quadrant,x0,x1,...
std::string dataset_to_csv(const Dataset& data);
Dataset dataset_from_csv(std::string_view text);
void save_dataset(const Dataset& data, const std::string& path);
Dataset load_dataset(const std::string& path);

/// Shortest decimal that parses back to the same double.
std::string format_double(double v);
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view text);

}  // namespace moscl

#endif  // MOSCL_DATASET_HPP
