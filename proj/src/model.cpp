#include "moscl/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "moscl/rng.hpp"

namespace moscl {

namespace {

double softplus(double v) { return v > 0.0 ? v + std::log1p(std::exp(-v)) : std::log1p(std::exp(v)); }

std::vector<double> softmax(std::span<const double> z) {
    const double m = *std::max_element(z.begin(), z.end());
    std::vector<double> p(z.size());
    double total = 0.0;
    for (std::size_t c = 0; c < z.size(); ++c) {
        p[c] = std::exp(z[c] - m);
        total += p[c];
    }
    for (auto& v : p) v /= total;
    return p;
}

void check_dim(std::size_t got, std::size_t want, const char* what) {
    if (got != want) {
        throw std::invalid_argument(std::string(what) + ": expected dimension " + std::to_string(want) +
                                    ", got " + std::to_string(got));
    }
}

}  // namespace

Activation parse_activation(std::string_view name) {
    if (name == "tanh") return Activation::tanh;
    if (name == "relu") return Activation::relu;
    throw std::invalid_argument("unknown activation '" + std::string(name) + "'");
}

std::string_view to_string(Activation a) { return a == Activation::tanh ? "tanh" : "relu"; }

Head parse_head(std::string_view name) {
    if (name == "sigmoid") return Head::sigmoid;
    if (name == "softmax") return Head::softmax;
    throw std::invalid_argument("unknown head '" + std::string(name) + "'");
}

std::string_view to_string(Head h) { return h == Head::sigmoid ? "sigmoid" : "softmax"; }

double GradientVector::norm() const {
    return std::sqrt(std::inner_product(values.begin(), values.end(), values.begin(), 0.0));
}

double ForwardTrace::probability(int y) const {
    if (prediction.size() == 1) return y == 1 ? prediction[0] : 1.0 - prediction[0];
    return prediction.at(static_cast<std::size_t>(y));
}

MlpModel::MlpModel(const ModelShape& shape) : shape_(shape) {
    if (shape.input_dim == 0 || shape.hidden_dim == 0 || shape.output_dim == 0) {
        throw std::invalid_argument("MlpModel: dimensions must be positive");
    }
    if (shape.head == Head::sigmoid && shape.output_dim != 1) {
        throw std::invalid_argument("MlpModel: sigmoid head needs output_dim == 1");
    }
    if (shape.head == Head::softmax && shape.output_dim < 2) {
        throw std::invalid_argument("MlpModel: softmax head needs output_dim >= 2");
    }
    params_.assign(b2_offset() + shape.output_dim, 0.0);
}

MlpModel MlpModel::initialized(const ModelShape& shape, std::uint64_t seed) {
    MlpModel m(shape);
    Rng rng(derive_seed(seed, {stream::init}));
    const double r1 = 1.0 / std::sqrt(static_cast<double>(shape.input_dim));
    const double r2 = 1.0 / std::sqrt(static_cast<double>(shape.hidden_dim));
    std::uniform_real_distribution<double> u1(-r1, r1);
    std::uniform_real_distribution<double> u2(-r2, r2);
    for (auto& w : m.w1()) w = u1(rng);
    for (auto& w : m.b1()) w = u1(rng);
    for (auto& w : m.w2()) w = u2(rng);
    for (auto& w : m.b2()) w = u2(rng);
    return m;
}

void MlpModel::check_label(int y) const {
    const int classes = shape_.head == Head::sigmoid ? 2 : static_cast<int>(shape_.output_dim);
    if (y < 0 || y >= classes) {
        throw std::invalid_argument("label " + std::to_string(y) + " out of range for model head");
    }
}

bool MlpModel::all_finite() const {
    return std::all_of(params_.begin(), params_.end(), [](double v) { return std::isfinite(v); });
}

ForwardTrace MlpModel::forward(std::span<const double> x,
                               std::optional<std::span<const double>> perturbation) const {
    check_dim(x.size(), input_dim(), "forward input");
    if (perturbation) check_dim(perturbation->size(), hidden_dim(), "forward perturbation");

    const std::size_t h = hidden_dim();
    const std::size_t d = input_dim();
    const auto W1 = w1();
    const auto B1 = b1();
    const auto W2 = w2();
    const auto B2 = b2();

    ForwardTrace t;
    t.hidden_pre.resize(h);
    t.hidden.resize(h);
    for (std::size_t j = 0; j < h; ++j) {
        double a = B1[j];
        for (std::size_t i = 0; i < d; ++i) a += W1[j * d + i] * x[i];
        t.hidden_pre[j] = a;
        double f = shape_.activation == Activation::tanh ? std::tanh(a) : std::max(0.0, a);
        if (perturbation) f *= 1.0 + (*perturbation)[j];
        t.hidden[j] = f;
    }

    t.latent.resize(output_dim());
    for (std::size_t o = 0; o < output_dim(); ++o) {
        double z = B2[o];
        for (std::size_t j = 0; j < h; ++j) z += W2[o * h + j] * t.hidden[j];
        t.latent[o] = z;
    }

    if (shape_.head == Head::sigmoid) {
        t.prediction = {sigmoid(t.latent[0])};
    } else {
        t.prediction = softmax(t.latent);
    }
    return t;
}

double MlpModel::sample_loss(std::span<const double> x, int y, LossKind kind) const {
    check_label(y);
    const auto t = forward(x);
    if (shape_.head == Head::sigmoid) {
        if (kind == LossKind::mse) return loss(LossKind::mse, y, t.prediction[0]);
        return y == 1 ? softplus(-t.latent[0]) : softplus(t.latent[0]);
    }
    const auto yi = static_cast<std::size_t>(y);
    if (kind == LossKind::ce) {
        const double m = *std::max_element(t.latent.begin(), t.latent.end());
        double s = 0.0;
        for (const double z : t.latent) s += std::exp(z - m);
        return m + std::log(s) - t.latent[yi];
    }
    double total = 0.0;
    for (std::size_t c = 0; c < t.prediction.size(); ++c) {
        const double r = t.prediction[c] - (c == yi ? 1.0 : 0.0);
        total += r * r;
    }
    return total;
}

std::vector<double> MlpModel::latent_gradient(const ForwardTrace& trace, int y, LossKind kind) const {
    check_label(y);
    const auto& p = trace.prediction;
    if (shape_.head == Head::sigmoid) {
        const double yhat = p[0];
        if (kind == LossKind::ce) return {yhat - y};
        return {2.0 * (yhat - y) * yhat * (1.0 - yhat)};
    }
    const auto yi = static_cast<std::size_t>(y);
    std::vector<double> dz(p.size());
    if (kind == LossKind::ce) {
        for (std::size_t c = 0; c < p.size(); ++c) dz[c] = p[c] - (c == yi ? 1.0 : 0.0);
        return dz;
    }
    // Softmax Jacobian: dz_k = p_k (g_k - sum_c g_c p_c), g = dL/dp.
    std::vector<double> g(p.size());
    double gp = 0.0;
    for (std::size_t c = 0; c < p.size(); ++c) {
        g[c] = 2.0 * (p[c] - (c == yi ? 1.0 : 0.0));
        gp += g[c] * p[c];
    }
    for (std::size_t c = 0; c < p.size(); ++c) dz[c] = p[c] * (g[c] - gp);
    return dz;
}

GradientVector MlpModel::per_sample_gradient(std::span<const double> x, int y, LossKind kind,
                                             double weight) const {
    const auto t = forward(x);
    const auto dz = latent_gradient(t, y, kind);

    const std::size_t h = hidden_dim();
    const std::size_t d = input_dim();
    const auto W2 = w2();

    GradientVector g;
    g.values.assign(parameter_count(), 0.0);
    auto* gw1 = g.values.data();
    auto* gb1 = gw1 + w1_size();
    auto* gw2 = g.values.data() + w2_offset();
    auto* gb2 = g.values.data() + b2_offset();

    for (std::size_t o = 0; o < output_dim(); ++o) {
        const double dzo = weight * dz[o];
        gb2[o] = dzo;
        for (std::size_t j = 0; j < h; ++j) gw2[o * h + j] = dzo * t.hidden[j];
    }
    for (std::size_t j = 0; j < h; ++j) {
        double df = 0.0;
        for (std::size_t o = 0; o < output_dim(); ++o) df += W2[o * h + j] * weight * dz[o];
        const double da = shape_.activation == Activation::tanh
                              ? df * (1.0 - t.hidden[j] * t.hidden[j])
                              : (t.hidden_pre[j] > 0.0 ? df : 0.0);
        gb1[j] = da;
        for (std::size_t i = 0; i < d; ++i) gw1[j * d + i] = da * x[i];
    }
    return g;
}

void sgd_step(MlpModel& model, std::span<const GradientVector> gradients, double learning_rate) {
    if (!(learning_rate > 0.0)) throw std::invalid_argument("sgd_step: learning rate must be > 0");
    if (gradients.empty()) return;
    auto params = model.parameters();
    std::vector<double> mean(params.size(), 0.0);
    for (const auto& g : gradients) {
        check_dim(g.size(), params.size(), "sgd_step gradient");
        for (std::size_t k = 0; k < mean.size(); ++k) mean[k] += g.values[k];
    }
    const double scale = learning_rate / static_cast<double>(gradients.size());
    for (std::size_t k = 0; k < params.size(); ++k) params[k] -= scale * mean[k];
}

double grad_wrt_prediction(int y, double yhat) { return 2.0 * (yhat - y); }

double grad_wrt_latent(int y, double yhat, Head head) {
    if (head != Head::sigmoid) {
        throw std::invalid_argument("grad_wrt_latent: closed form only holds for a sigmoid head");
    }
    if (y == 1) return -2.0 * yhat * (1.0 - yhat) * (1.0 - yhat);
    if (y == 0) return 2.0 * yhat * yhat * (1.0 - yhat);
    throw std::domain_error("grad_wrt_latent: label must be 0 or 1");
}

// Checkpoint: {"format", "activation", "head", "parameters": {name: {"shape", "data"}}}.
std::string model_to_json(const MlpModel& model) {
    using nlohmann::ordered_json;
    const auto& s = model.shape();
    auto block = [](std::span<const double> v, std::vector<std::size_t> shape) {
        return ordered_json{{"shape", shape}, {"data", std::vector<double>(v.begin(), v.end())}};
    };
    ordered_json j;
    j["format"] = "moscl-mlp/1";
    j["activation"] = to_string(s.activation);
    j["head"] = to_string(s.head);
    j["parameters"] = ordered_json::object();
    j["parameters"]["W1"] = block(model.w1(), {s.hidden_dim, s.input_dim});
    j["parameters"]["b1"] = block(model.b1(), {s.hidden_dim});
    j["parameters"]["W2"] = block(model.w2(), {s.output_dim, s.hidden_dim});
    j["parameters"]["b2"] = block(model.b2(), {s.output_dim});
    return j.dump(2);
}

MlpModel model_from_json(std::string_view text) {
    const auto j = nlohmann::json::parse(text);
    if (j.value("format", "") != "moscl-mlp/1") throw std::runtime_error("not a moscl-mlp/1 checkpoint");
    const auto& p = j.at("parameters");
    const auto w1_shape = p.at("W1").at("shape").get<std::vector<std::size_t>>();
    const auto w2_shape = p.at("W2").at("shape").get<std::vector<std::size_t>>();
    if (w1_shape.size() != 2 || w2_shape.size() != 2) throw std::runtime_error("checkpoint: bad matrix shape");

    ModelShape shape;
    shape.hidden_dim = w1_shape[0];
    shape.input_dim = w1_shape[1];
    shape.output_dim = w2_shape[0];
    shape.activation = parse_activation(j.at("activation").get<std::string>());
    shape.head = parse_head(j.at("head").get<std::string>());
    if (w2_shape[1] != shape.hidden_dim) throw std::runtime_error("checkpoint: W1/W2 shapes disagree");

    MlpModel m(shape);
    auto load = [&](const char* name, std::span<double> dst) {
        const auto data = p.at(name).at("data").get<std::vector<double>>();
        if (data.size() != dst.size()) {
            throw std::runtime_error(std::string("checkpoint: wrong element count for ") + name);
        }
        std::copy(data.begin(), data.end(), dst.begin());
    };
    load("W1", m.w1());
    load("b1", m.b1());
    load("W2", m.w2());
    load("b2", m.b2());
    if (!m.all_finite()) throw std::runtime_error("checkpoint: non-finite parameter");
    return m;
}

void save_model(const MlpModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << model_to_json(model) << '\n';
}

MlpModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return model_from_json(ss.str());
}

}  // namespace moscl
