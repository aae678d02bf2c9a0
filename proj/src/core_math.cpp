#include "moscl/core_math.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace moscl {

namespace {

void check_label(int y) {
    if (y != 0 && y != 1) {
        throw std::domain_error("binary label must be 0 or 1, got " + std::to_string(y));
    }
}

double neg_p_log_p(double p) { return p == 0.0 ? 0.0 : -p * std::log(p); }

}  // namespace

LossKind parse_loss_kind(std::string_view name) {
    if (name == "mse") return LossKind::mse;
    if (name == "ce") return LossKind::ce;
    throw std::invalid_argument("unknown loss kind '" + std::string(name) + "'");
}

std::string_view to_string(LossKind kind) { return kind == LossKind::mse ? "mse" : "ce"; }

EntropyMode parse_entropy_mode(std::string_view name) {
    if (name == "plain") return EntropyMode::plain;
    if (name == "binary") return EntropyMode::binary;
    throw std::invalid_argument("unknown entropy mode '" + std::string(name) + "'");
}

std::string_view to_string(EntropyMode mode) {
    return mode == EntropyMode::plain ? "plain" : "binary";
}

double entropy(double p, EntropyMode mode) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw std::domain_error("entropy: probability outside [0, 1]: " + std::to_string(p));
    }
    if (mode == EntropyMode::binary) return neg_p_log_p(p) + neg_p_log_p(1.0 - p);
    return neg_p_log_p(p);
}

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

double loss(LossKind kind, int y, double yhat) {
    check_label(y);
    if (!(yhat >= 0.0 && yhat <= 1.0)) {
        throw std::domain_error("loss: prediction outside [0, 1]: " + std::to_string(yhat));
    }
    if (kind == LossKind::mse) {
        const double r = yhat - y;
        return r * r;
    }
    const double p = y == 1 ? yhat : 1.0 - yhat;
    if (p == 0.0) throw std::domain_error("loss: cross entropy is infinite at this prediction");
    return -std::log(p);
}

double inverse_loss(LossKind kind, int y, double l) {
    check_label(y);
    if (!(l >= 0.0) || !std::isfinite(l)) {
        throw std::range_error("inverse_loss: loss must be finite and nonnegative");
    }
    if (kind == LossKind::mse) {
        if (l > 1.0) throw std::range_error("inverse_loss: MSE above 1 has no root in [0, 1]");
        const double r = std::sqrt(l);
        return y == 1 ? 1.0 - r : r;
    }
    const double p = std::exp(-l);
    return y == 1 ? p : 1.0 - p;
}

double loss_based_uncertainty(LossKind kind, int y, double l, EntropyMode mode) {
    return entropy(inverse_loss(kind, y, l), mode);
}

double finite_difference_gradient(const std::function<double(double)>& fn, double x, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("finite_difference_gradient: step must be > 0");
    return (fn(x + h) - fn(x - h)) / (2.0 * h);
}

}  // namespace moscl
