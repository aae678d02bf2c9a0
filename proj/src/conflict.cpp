#include "moscl/conflict.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "moscl/rng.hpp"

namespace moscl {

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> rank(v.size());
    std::size_t k = 0;
    while (k < order.size()) {
        std::size_t end = k + 1;
        while (end < order.size() && v[order[end]] == v[order[k]]) ++end;
        const double avg = 0.5 * static_cast<double>(k + end - 1);
        for (std::size_t m = k; m < end; ++m) rank[order[m]] = avg;
        k = end;
    }
    return rank;
}

}  // namespace

double gradient_cosine(const GradientVector& a, const GradientVector& b) {
    if (a.size() != b.size()) throw std::invalid_argument("gradient_cosine: dimension mismatch");
    const double na = a.norm();
    const double nb = b.norm();
    if (na == 0.0 || nb == 0.0) throw std::domain_error("gradient_cosine: zero gradient, conflict undefined");
    const double dot = std::inner_product(a.values.begin(), a.values.end(), b.values.begin(), 0.0);
    return std::clamp(dot / (na * nb), -1.0, 1.0);
}

std::optional<double> spearman(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("spearman: length mismatch");
    if (x.size() < 2) return std::nullopt;
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
    const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t k = 0; k < rx.size(); ++k) {
        sxy += (rx[k] - mx) * (ry[k] - my);
        sxx += (rx[k] - mx) * (rx[k] - mx);
        syy += (ry[k] - my) * (ry[k] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return std::nullopt;
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

ConflictReport conflict_loss_monotonicity(const MlpModel& model, const Dataset& data, const ConflictOptions& options) {
    if (data.size() < 3) throw std::invalid_argument("conflict analysis needs at least 3 samples");

    // Canonical order so the report does not depend on dataset row order.
    std::vector<const Sample*> samples;
    for (const auto& s : data.samples) samples.push_back(&s);
    std::sort(samples.begin(), samples.end(), [](const Sample* a, const Sample* b) { return a->id < b->id; });

    const auto n = samples.size();
    std::vector<GradientVector> grads;
    std::vector<double> losses;
    grads.reserve(n);
    losses.reserve(n);
    for (const auto* s : samples) {
        grads.push_back(model.per_sample_gradient(s->x, s->y, options.loss_kind));
        losses.push_back(model.sample_loss(s->x, s->y, options.loss_kind));
    }

    std::vector<std::pair<std::size_t, std::size_t>> index_pairs;
    if (n <= options.exhaustive_limit) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) index_pairs.emplace_back(i, j);
        }
    } else {
        Rng rng(derive_seed(options.seed, {stream::pairs}));
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        std::vector<std::pair<std::size_t, std::size_t>> seen;
        const auto total = n * (n - 1) / 2;
        const auto want = std::min(options.max_pairs, total);
        while (index_pairs.size() < want) {
            auto i = pick(rng);
            auto j = pick(rng);
            if (i == j) continue;
            if (i > j) std::swap(i, j);
            const auto p = std::make_pair(i, j);
            const auto it = std::lower_bound(seen.begin(), seen.end(), p);
            if (it != seen.end() && *it == p) continue;
            seen.insert(it, p);
            index_pairs.push_back(p);
        }
        std::sort(index_pairs.begin(), index_pairs.end());
    }

    ConflictReport report;
    report.model_tag = options.model_tag;
    for (const auto& [i, j] : index_pairs) {
        if (grads[i].norm() == 0.0 || grads[j].norm() == 0.0) {
            ++report.skipped_zero_gradient;
            continue;
        }
        report.pairs.push_back({samples[i]->id, samples[j]->id, gradient_cosine(grads[i], grads[j]),
                                losses[i] + losses[j]});
    }

    std::vector<double> conflicts, sums;
    for (const auto& p : report.pairs) {
        conflicts.push_back(p.conflict());
        sums.push_back(p.loss_sum);
    }
    report.spearman_rho = spearman(conflicts, sums);
    return report;
}

double latent_gradient_scale(int y, double yhat) {
    const double l = (yhat - y) * (yhat - y);
    if (y == 1) return 2.0 * yhat * l;
    if (y == 0) return 2.0 * yhat * yhat * (1.0 - std::sqrt(l));
    throw std::domain_error("latent_gradient_scale: label must be 0 or 1");
}

bool is_converged(std::span<const double> epoch_losses, double rel_tol, std::size_t window) {
    if (window == 0 || epoch_losses.size() < window + 1) return false;
    for (std::size_t k = epoch_losses.size() - window; k < epoch_losses.size(); ++k) {
        const double prev = epoch_losses[k - 1];
        const double decrease = prev - epoch_losses[k];
        const double scale = std::max(std::abs(prev), 1e-300);
        if (decrease / scale >= rel_tol) return false;
    }
    return true;
}

std::string conflict_report_to_json(const ConflictReport& report) {
    nlohmann::ordered_json j;
    j["model_tag"] = report.model_tag;
    j["pair_count"] = report.pairs.size();
    j["skipped_zero_gradient"] = report.skipped_zero_gradient;
    j["degenerate"] = report.degenerate();
    j["spearman_rho"] = report.spearman_rho ? nlohmann::ordered_json(*report.spearman_rho) : nlohmann::ordered_json();
    auto& pairs = j["pairs"] = nlohmann::ordered_json::array();
    for (const auto& p : report.pairs) {
        pairs.push_back({{"id_i", p.id_i}, {"id_j", p.id_j}, {"cosine", p.cosine}, {"loss_sum", p.loss_sum}});
    }
    return j.dump(1);
}

std::string conflict_pairs_to_csv(const ConflictReport& report) {
    std::string out = "id_i,id_j,cosine,conflict,loss_sum\n";
    for (const auto& p : report.pairs) {
        out += std::to_string(p.id_i) + ',' + std::to_string(p.id_j) + ',' + format_double(p.cosine) + ',' +
               format_double(p.conflict()) + ',' + format_double(p.loss_sum) + '\n';
    }
    return out;
}

}  // namespace moscl
