#ifndef MOSCL_MODEL_HPP
#define MOSCL_MODEL_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "moscl/core_math.hpp"

namespace moscl {

enum class Activation { tanh, relu };
enum class Head { sigmoid, softmax };

Activation parse_activation(std::string_view name);
std::string_view to_string(Activation a);
Head parse_head(std::string_view name);
std::string_view to_string(Head h);

/// Flattened parameter gradient in MlpModel::parameters() layout.
struct GradientVector {
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
    double norm() const;
};

/// One forward pass. `hidden` is the feature map after activation and after the
/// optional multiplicative perturbation; `hidden_pre` is the activation input.
struct ForwardTrace {
    std::vector<double> hidden_pre;
    std::vector<double> hidden;
    std::vector<double> latent;
    std::vector<double> prediction;

    /// Positive-class probability for a sigmoid head, prediction[y] otherwise.
    double probability(int y = 1) const;
};

struct ModelShape {
    std::size_t input_dim = 2;
    std::size_t hidden_dim = 8;
    std::size_t output_dim = 1;
    Activation activation = Activation::tanh;
    Head head = Head::sigmoid;
};

/// Two-layer perceptron: x -> act(W1 x + b1) = f -> W2 f + b2 = z -> head(z).
/// All parameters live in one contiguous buffer ordered W1, b1, W2, b2 with
/// row-major matrices, so gradients and checkpoints share a single layout.
class MlpModel {
public:
    explicit MlpModel(const ModelShape& shape);

    /// Uniform init in [-1/sqrt(fan_in), 1/sqrt(fan_in)] per layer.
    static MlpModel initialized(const ModelShape& shape, std::uint64_t seed);

    const ModelShape& shape() const { return shape_; }
    std::size_t input_dim() const { return shape_.input_dim; }
    std::size_t hidden_dim() const { return shape_.hidden_dim; }
    std::size_t output_dim() const { return shape_.output_dim; }
    std::size_t parameter_count() const { return params_.size(); }

    std::span<double> parameters() { return params_; }
    std::span<const double> parameters() const { return params_; }

    std::span<double> w1() { return {params_.data(), w1_size()}; }
    std::span<double> b1() { return {params_.data() + w1_size(), hidden_dim()}; }
    std::span<double> w2() { return {params_.data() + w2_offset(), w2_size()}; }
    std::span<double> b2() { return {params_.data() + b2_offset(), output_dim()}; }
    std::span<const double> w1() const { return {params_.data(), w1_size()}; }
    std::span<const double> b1() const { return {params_.data() + w1_size(), hidden_dim()}; }
    std::span<const double> w2() const { return {params_.data() + w2_offset(), w2_size()}; }
    std::span<const double> b2() const { return {params_.data() + b2_offset(), output_dim()}; }

    /// Standard forward pass. With `perturbation` present the hidden feature map
    /// is replaced by f * (1 + t) elementwise before the output layer.
    ForwardTrace forward(std::span<const double> x,
                         std::optional<std::span<const double>> perturbation = std::nullopt) const;

    /// Loss of one sample. CE is evaluated from the logits so it stays finite
    /// when the head saturates.
    double sample_loss(std::span<const double> x, int y, LossKind kind) const;

    /// dL/dz for one sample (length output_dim).
    std::vector<double> latent_gradient(const ForwardTrace& trace, int y, LossKind kind) const;

    /// Exact backprop gradient of the per-sample loss, scaled by `weight`.
    GradientVector per_sample_gradient(std::span<const double> x, int y, LossKind kind,
                                       double weight = 1.0) const;

    void check_label(int y) const;
    bool all_finite() const;

private:
    std::size_t w1_size() const { return shape_.hidden_dim * shape_.input_dim; }
    std::size_t w2_size() const { return shape_.output_dim * shape_.hidden_dim; }
    std::size_t w2_offset() const { return w1_size() + shape_.hidden_dim; }
    std::size_t b2_offset() const { return w2_offset() + w2_size(); }

    ModelShape shape_;
    std::vector<double> params_;
};

/// w <- w - eta * mean(gradients).
void sgd_step(MlpModel& model, std::span<const GradientVector> gradients, double learning_rate);

/// dL/dyhat for MSE: 2 (yhat - y).
double grad_wrt_prediction(int y, double yhat);

/// dL/dz for a sigmoid head under MSE:
///   y = 1: -2 yhat (1 - yhat)^2,   y = 0: 2 yhat^2 (1 - yhat).
/// The closed form is sigmoid-specific; a softmax head is rejected.
double grad_wrt_latent(int y, double yhat, Head head = Head::sigmoid);

std::string model_to_json(const MlpModel& model);
MlpModel model_from_json(std::string_view text);
void save_model(const MlpModel& model, const std::string& path);
MlpModel load_model(const std::string& path);

}  // namespace moscl

#endif  // MOSCL_MODEL_HPP
