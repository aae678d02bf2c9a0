#ifndef MOSCL_CORE_MATH_HPP
#define MOSCL_CORE_MATH_HPP

#include <functional>
#include <string_view>

namespace moscl {

enum class LossKind { mse, ce };

/// `plain` is H(p) = -p ln p on the positive-class probability. `binary` adds
/// the (1-p) term and is only meant for sensitivity studies.
enum class EntropyMode { plain, binary };

LossKind parse_loss_kind(std::string_view name);
std::string_view to_string(LossKind kind);
EntropyMode parse_entropy_mode(std::string_view name);
std::string_view to_string(EntropyMode mode);

/// Entropy term of a probability, natural log, with 0 ln 0 = 0.
/// Throws std::domain_error if p is outside [0, 1] or not finite.
double entropy(double p, EntropyMode mode = EntropyMode::plain);

/// Logistic function, evaluated without overflow for large |z|.
double sigmoid(double z);

/// Per-sample binary loss.
///   MSE: (yhat - y)^2
///   CE:  -[y ln yhat + (1 - y) ln(1 - yhat)]
/// Labels must be 0 or 1. CE is infinite when yhat sits on the wrong endpoint,
/// which is reported as std::domain_error.
double loss(LossKind kind, int y, double yhat);

/// Recovers the prediction that produced loss `l` for label `y`, picking the
/// root on the label's side of [0, 1]:
///   MSE y=1 -> 1 - sqrt(l),  y=0 -> sqrt(l)
///   CE  y=1 -> exp(-l),      y=0 -> 1 - exp(-l)
/// Throws std::range_error when no root lies in [0, 1].
double inverse_loss(LossKind kind, int y, double l);

/// lu = H(L^-1(y, l)).
double loss_based_uncertainty(LossKind kind, int y, double l,
                              EntropyMode mode = EntropyMode::plain);

/// Central difference (fn(x + h) - fn(x - h)) / 2h.
double finite_difference_gradient(const std::function<double(double)>& fn, double x,
                                  double h = 1e-5);

}  // namespace moscl

#endif  // MOSCL_CORE_MATH_HPP
