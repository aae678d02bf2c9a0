// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "../common/oracles.hpp"
#include "moscl/conflict.hpp"
#include "moscl/core_math.hpp"
#include "moscl/datagen.hpp"
#include "moscl/difficulty.hpp"
#include "moscl/experiment.hpp"
#include "moscl/model.hpp"
#include "moscl/scheduler.hpp"
#include "moscl/uncertainty.hpp"

using namespace moscl;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

MlpModel random_model(const ModelShape& shape, std::mt19937_64& rng, double scale) {
    MlpModel m(shape);
    std::uniform_real_distribution<double> u(-scale, scale);
    for (auto& p : m.parameters()) p = u(rng);
    return m;
}

std::vector<double> random_x(std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::vector<double> x(n);
    for (auto& v : x) v = u(rng);
    return x;
}

Outcome zero_gamma_consistency() {
    std::mt19937_64 rng(101);
    UncertaintyConfig cfg;
    cfg.gamma = 0.0;
    double worst = 0.0;
    for (int draw = 0; draw < 100; ++draw) {
        const ModelShape shape{2 + rng() % 4, 2 + rng() % 8, 1, draw % 2 ? Activation::relu : Activation::tanh,
                               Head::sigmoid};
        const auto m = random_model(shape, rng, 1.0);
        const auto x = random_x(shape.input_dim, rng);
        const int y = static_cast<int>(rng() % 2);
        const auto kind = draw % 4 < 2 ? LossKind::mse : LossKind::ce;
        const double u = estimate_uncertainty(m, x, cfg, static_cast<SampleId>(draw));
        const double lu = loss_based_uncertainty(kind, y, m.sample_loss(x, y, kind), cfg.entropy_mode);
        worst = std::max(worst, std::abs(u - lu));
    }
    return {worst <= 1e-10, "max |u - lu| = " + fmt("%.3g", worst)};
}

Outcome latent_gradient_identity() {
    // W2 = 0 makes z = b2, so the backpropagated dL/db2 is exactly dL/dz.
    MlpModel m(ModelShape{2, 3, 1, Activation::tanh, Head::sigmoid});
    const std::vector<double> x{0.4, -0.7};
    double worst_backprop = 0.0, worst_scale = 0.0;
    for (int k = 1; k <= 99; ++k) {
        const double p = k / 100.0;
        m.b2()[0] = std::log(p / (1.0 - p));
        const double yhat = m.forward(x).prediction[0];
        for (int y : {0, 1}) {
            const auto g = m.per_sample_gradient(x, y, LossKind::mse);
            const double backprop = g.values[m.parameter_count() - 1];
            const double closed = grad_wrt_latent(y, yhat, Head::sigmoid);
            worst_backprop = std::max(worst_backprop, std::abs(backprop - closed));
            worst_scale = std::max(worst_scale, std::abs(std::abs(closed) - latent_gradient_scale(y, yhat)));
        }
    }
    return {worst_backprop <= 1e-10 && worst_scale <= 1e-12,
            "backprop " + fmt("%.3g", worst_backprop) + ", scale " + fmt("%.3g", worst_scale)};
}

Outcome gradient_correctness() {
    std::mt19937_64 rng(303);
    const double h = 1e-5;
    double worst = 0.0;
    for (int draw = 0; draw < 100; ++draw) {
        const bool softmax = draw % 3 == 2;
        const ModelShape shape{1 + rng() % 4, 1 + rng() % 6, softmax ? 2 + rng() % 2 : 1, Activation::tanh,
                               softmax ? Head::softmax : Head::sigmoid};
        auto m = random_model(shape, rng, 1.0);
        const auto x = random_x(shape.input_dim, rng);
        const int y = static_cast<int>(rng() % (softmax ? shape.output_dim : 2));
        const auto kind = draw % 2 ? LossKind::ce : LossKind::mse;
        const auto g = m.per_sample_gradient(x, y, kind);
        auto params = m.parameters();
        for (std::size_t k = 0; k < params.size(); ++k) {
            const double saved = params[k];
            params[k] = saved + h;
            const double up = m.sample_loss(x, y, kind);
            params[k] = saved - h;
            const double down = m.sample_loss(x, y, kind);
            params[k] = saved;
            const double fd = (up - down) / (2.0 * h);
            const double err = std::abs(g.values[k] - fd) / std::max({std::abs(g.values[k]), std::abs(fd), 1e-6});
            worst = std::max(worst, err);
        }
    }
    return {worst < 1e-5, "max relative error " + fmt("%.3g", worst)};
}

Outcome head_tail_optimality() {
    std::mt19937_64 rng(404);
    std::size_t checked = 0, mismatched = 0;
    for (std::size_t n = 2; n <= 8; n += 2) {
        for (int trial = 0; trial < 200; ++trial) {
            std::vector<ScoredId> scored;
            std::vector<std::size_t> d;
            std::map<SampleId, std::size_t> by_id;
            for (std::size_t k = 0; k < n; ++k) {
                // Rank sums live in [2, 2N]; draw from that range so ties occur.
                const auto v = static_cast<std::size_t>(2 + rng() % (2 * n - 1));
                scored.push_back({static_cast<SampleId>(k), v});
                d.push_back(v);
                by_id[static_cast<SampleId>(k)] = v;
            }
            std::size_t worst_batch = 0;
            for (const auto& b : mixed_order_plan(scored, 2).batches) {
                std::size_t s = 0;
                for (const auto id : b) s += by_id[id];
                worst_batch = std::max(worst_batch, s);
            }
            ++checked;
            if (worst_batch != oracle::min_max_pair_sum(d)) ++mismatched;
        }
    }
    return {mismatched == 0, std::to_string(checked) + " vectors, " + std::to_string(mismatched) + " mismatches"};
}

Outcome rank_fusion_invariance() {
    const std::vector<std::pair<std::string, std::function<double(double)>>> transforms{
        {"exp", [](double v) { return std::exp(v); }},
        {"sqrt", [](double v) { return std::sqrt(v); }},
        {"cubic", [](double v) { return v * v * v + v; }},
        {"atan", [](double v) { return std::atan(v); }},
        {"affine", [](double v) { return 3.0 * v + 1.0; }},
    };
    std::mt19937_64 rng(505);
    std::size_t cases = 0, broken = 0;
    for (std::size_t n : {3, 10, 101}) {
        std::uniform_real_distribution<double> u(0.0, 1.0);
        std::vector<ScoreRecord> base;
        for (std::size_t k = 0; k < n; ++k) base.push_back({static_cast<SampleId>(k * 3 + 1), u(rng), u(rng)});
        if (n > 3) {
            base[1].loss = base[0].loss;  // keep a tie in each column
            base[2].uncertainty = base[0].uncertainty;
        }
        const auto ref = build_difficulty(base);
        for (const auto& [name, f] : transforms) {
            for (int target = 0; target < 3; ++target) {
                auto changed = base;
                for (auto& s : changed) {
                    if (target != 1) s.loss = f(s.loss);
                    if (target != 0) s.uncertainty = f(s.uncertainty);
                }
                const auto got = build_difficulty(changed);
                ++cases;
                for (std::size_t k = 0; k < n; ++k) {
                    if (got[k].sample_id != ref[k].sample_id || got[k].d != ref[k].d) {
                        ++broken;
                        break;
                    }
                }
            }
        }
    }
    return {broken == 0, std::to_string(cases) + " transformed datasets, " + std::to_string(broken) + " changed"};
}

Outcome sp_fidelity() {
    bool ok = true;
    for (const double lambda : {0.05, 0.3, 1.0, 4.0}) {
        for (int k = -200; k <= 200; ++k) {
            const double l = std::max(0.0, lambda + k * lambda / 100.0);
            ok &= sp_weight(l, SpRegularizer::hard, lambda) == (l < lambda ? 1.0 : 0.0);
        }
        ok &= sp_weight(std::nextafter(lambda, 0.0), SpRegularizer::hard, lambda) == 1.0;
        ok &= sp_weight(lambda, SpRegularizer::hard, lambda) == 0.0;

        ok &= sp_weight(0.0, SpRegularizer::linear, lambda) == 1.0;
        for (int k = 0; k <= 100; ++k) ok &= sp_weight(lambda * (1.0 + k / 10.0), SpRegularizer::linear, lambda) == 0.0;
        const double step = lambda / 10000.0;
        double max_jump = 0.0;
        for (int k = 0; k < 20000; ++k) {
            const double a = sp_weight(k * step, SpRegularizer::linear, lambda);
            const double b = sp_weight((k + 1) * step, SpRegularizer::linear, lambda);
            max_jump = std::max(max_jump, std::abs(a - b));
        }
        // Lipschitz with constant 1/lambda: a step of lambda/1e4 moves v by at most 1e-4.
        ok &= max_jump <= 1e-4 + 1e-12;
    }
    return {ok, ok ? "indicator exact, linear continuous with correct endpoints" : "mismatch"};
}

Outcome conflict_direction() {
    int positive = 0;
    std::string detail;
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        GenSpec spec;
        spec.n_total = 64;
        spec.minority_fraction = 0.5;
        spec.label_noise_rate = 0.0;
        spec.feature_noise_rate = 0.0;
        spec.seed = seed;
        const auto data = generate(spec);
        ExperimentConfig cfg;
        cfg.seed = seed;
        const auto trained = train_until_converged(cfg, data, 20000);
        ConflictOptions opt;
        opt.seed = seed;
        const auto report = conflict_loss_monotonicity(trained.model, data, opt);
        const double rho = report.spearman_rho.value_or(std::nan(""));
        if (rho > 0.0) ++positive;
        detail += "seed " + std::to_string(seed) + ": rho=" + fmt("%.3f", rho) + " (" +
                  std::to_string(trained.epochs) + " epochs" + (trained.converged ? "" : ", not converged") + ") ";
    }
    return {positive >= 2, detail + "-> " + std::to_string(positive) + "/3 positive"};
}

Outcome scheduler_direction() {
    int mixed_wins = 0, sp_losses = 0;
    std::string detail;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        GenSpec spec;
        spec.n_total = 400;
        spec.minority_fraction = 0.1;
        spec.label_noise_rate = 0.1;
        spec.feature_noise_rate = 0.05;
        spec.seed = seed;
        const auto train = generate(spec);
        GenSpec held = spec;
        held.label_noise_rate = 0.0;
        held.feature_noise_rate = 0.0;
        held.seed = seed + 1000;
        const auto eval = generate(held);

        std::map<SchedulerKind, double> recall;
        for (const auto kind : {SchedulerKind::random, SchedulerKind::mixed, SchedulerKind::sp_linear}) {
            ExperimentConfig cfg;
            cfg.scheduler = kind;
            cfg.difficulty_source = DifficultySource::both;
            cfg.total_epochs = 60;
            cfg.seed = seed;
            recall[kind] = run_experiment(cfg, train, &eval).metrics.back().minority_recall;
        }
        if (recall[SchedulerKind::mixed] >= recall[SchedulerKind::random]) ++mixed_wins;
        if (recall[SchedulerKind::sp_linear] <= recall[SchedulerKind::random]) ++sp_losses;
        detail += fmt("[r=%.2f ", recall[SchedulerKind::random]) + fmt("m=%.2f ", recall[SchedulerKind::mixed]) +
                  fmt("sp=%.2f] ", recall[SchedulerKind::sp_linear]);
    }
    return {mixed_wins >= 3 && sp_losses >= 3,
            detail + "mixed>=random " + std::to_string(mixed_wins) + "/5, sp_linear<=random " +
                std::to_string(sp_losses) + "/5"};
}

Outcome determinism() {
    GenSpec spec;
    spec.seed = 9;
    const auto data = generate(spec);
    const auto root = fs::temp_directory_path() / "moscl_acceptance_determinism";
    fs::remove_all(root);
    ExperimentConfig cfg;
    cfg.scheduler = SchedulerKind::mixed;
    cfg.total_epochs = 20;
    cfg.seed = 9;
    for (const char* run : {"a", "b"}) {
        cfg.output_dir = (root / run).string();
        run_experiment(cfg, data);
    }
    std::size_t compared = 0, differing = 0;
    for (const auto& entry : fs::directory_iterator(root / "a")) {
        const auto name = entry.path().filename().string();
        if (name != "metrics.csv" && name.rfind("scores_epoch", 0) != 0) continue;
        ++compared;
        if (read_text_file(entry.path().string()) != read_text_file((root / "b" / name).string())) ++differing;
    }
    fs::remove_all(root);
    return {compared == 11 && differing == 0,
            std::to_string(compared) + " files compared, " + std::to_string(differing) + " differ"};
}

Outcome scatter_export() {
    std::mt19937_64 rng(1010);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    bool ok = true;
    for (std::size_t n : {1, 2, 17, 250}) {
        std::vector<ScoreRecord> scores;
        for (std::size_t k = 0; k < n; ++k) scores.push_back({static_cast<SampleId>(k * 5), u(rng), u(rng)});
        if (n > 2) scores[n / 2].loss = 1e15;
        const auto file = scores_from_json(scores_to_json(scores));
        ok &= parse_scatter_csv(export_scatter(file, ScatterMode::value)) == scores;

        const auto rows = parse_scatter_csv(export_scatter(file, ScatterMode::index));
        std::vector<double> l, v, expected(n);
        for (const auto& r : rows) {
            l.push_back(r.loss);
            v.push_back(r.uncertainty);
        }
        std::sort(l.begin(), l.end());
        std::sort(v.begin(), v.end());
        std::iota(expected.begin(), expected.end(), 0.0);
        ok &= l == expected && v == expected;
    }
    return {ok, ok ? "index columns are permutations, value mode round-trips" : "mismatch"};
}

struct Criterion {
    const char* name;
    double budget_seconds;
    Outcome (*fn)();
};

}  // namespace

int main() {
    const Criterion criteria[] = {
        {"C1 uncertainty/loss-based uncertainty consistency at gamma=0", 1.0, zero_gamma_consistency},
        {"C2 latent gradient identity", 1.0, latent_gradient_identity},
        {"C3 per-sample gradient vs finite differences", 10.0, gradient_correctness},
        {"C4 head-tail pairing optimality", 30.0, head_tail_optimality},
        {"C5 rank fusion invariance", 1.0, rank_fusion_invariance},
        {"C6 self-paced regularizer fidelity", 1.0, sp_fidelity},
        {"C7 gradient conflict vs loss sum direction", 120.0, conflict_direction},
        {"C8 scheduler ordering on imbalanced noisy data", 600.0, scheduler_direction},
        {"C9 run determinism", 60.0, determinism},
        {"C10 scatter export", 1.0, scatter_export},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = secs < c.budget_seconds;
        const bool pass = o.pass && in_time;
        if (!pass) ++failed;
        std::printf("%s  %s  (%.2fs of %.0fs%s)  %s\n", pass ? "PASS" : "FAIL", c.name, secs, c.budget_seconds,
                    in_time ? "" : ", over budget", o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed, std::size(criteria));
    return failed;
}
