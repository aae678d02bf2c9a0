#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "moscl/datagen.hpp"
#include "moscl/uncertainty.hpp"

using namespace moscl;

namespace {

std::map<Quadrant, std::size_t> tag_counts(const Dataset& d) {
    std::map<Quadrant, std::size_t> c;
    for (const auto& s : d.samples) ++c[s.true_quadrant];
    return c;
}

// High/low encodings placed on either side of the 0.5 split.
ScoreRecord encode(const Sample& s) {
    const bool high_u = s.true_quadrant == Quadrant::hh || s.true_quadrant == Quadrant::hl;
    const bool high_l = s.true_quadrant == Quadrant::hh || s.true_quadrant == Quadrant::lh;
    return {s.id, high_l ? 0.9 : 0.1, high_u ? 0.9 : 0.1};
}

}  // namespace

TEST_CASE("all-clean spec tags everything LL") {
    GenSpec spec;
    spec.n_total = 50;
    spec.minority_fraction = 0.0;
    spec.label_noise_rate = 0.0;
    spec.feature_noise_rate = 0.0;
    const auto d = generate(spec);
    CHECK(d.size() == 50);
    for (const auto& s : d.samples) {
        CHECK(s.true_quadrant == Quadrant::ll);
        CHECK(s.y == 0);
    }
}

TEST_CASE("minority count") {
    GenSpec spec;
    spec.n_total = 100;
    spec.minority_fraction = 0.1;
    CHECK(planned_counts(spec).hh == 10);
    CHECK(tag_counts(generate(spec))[Quadrant::hh] == 10);
}

TEST_CASE("tag bookkeeping and label-noise consistency") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        GenSpec spec;
        spec.n_total = 157 + seed * 31;
        spec.minority_fraction = 0.2;
        spec.label_noise_rate = 0.3;
        spec.feature_noise_rate = 0.25;
        spec.dim = 2 + seed;
        spec.seed = seed;
        const auto d = generate(spec);
        const auto c = tag_counts(d);
        const auto planned = planned_counts(spec);
        CHECK(planned.hh + planned.lh + planned.ll + planned.hl == spec.n_total);
        CHECK(c.at(Quadrant::hh) == planned.hh);
        CHECK(c.at(Quadrant::lh) == planned.lh);
        CHECK(c.at(Quadrant::hl) == planned.hl);
        CHECK(c.at(Quadrant::ll) == planned.ll);
        d.validate();
        for (std::size_t k = 0; k < d.size(); ++k) {
            const auto& s = d.samples[k];
            CHECK(s.id == static_cast<SampleId>(k));
            CHECK(s.x.size() == spec.dim);
            if (s.true_quadrant == Quadrant::lh) {
                CHECK(s.y != s.clean_label);
            } else {
                CHECK(s.y == s.clean_label);
            }
            CHECK(s.clean_label == (s.true_quadrant == Quadrant::hh ? 1 : 0));
        }
    }
}

TEST_CASE("generation is deterministic") {
    GenSpec spec;
    spec.seed = 42;
    CHECK(dataset_to_csv(generate(spec)) == dataset_to_csv(generate(spec)));
    auto other = spec;
    other.seed = 43;
    CHECK(dataset_to_csv(generate(spec)) != dataset_to_csv(generate(other)));
}

TEST_CASE("clusters are separated") {
    GenSpec spec;
    spec.n_total = 2000;
    spec.minority_fraction = 0.5;
    spec.label_noise_rate = 0.0;
    spec.feature_noise_rate = 0.0;
    spec.cluster_separation = 3.0;
    const auto d = generate(spec);
    double m0 = 0.0, m1 = 0.0;
    std::size_t n0 = 0, n1 = 0;
    for (const auto& s : d.samples) {
        (s.clean_label == 1 ? m1 : m0) += s.x[0];
        ++(s.clean_label == 1 ? n1 : n0);
    }
    m0 /= static_cast<double>(n0);
    m1 /= static_cast<double>(n1);
    // Center distance along the diagonal is separation * std.
    const double expected = 3.0 * GenSpec::kClusterStd / std::sqrt(2.0);
    CHECK(std::abs((m1 - m0) - expected) < 0.1);
}

TEST_CASE("invalid specs") {
    GenSpec spec;
    spec.label_noise_rate = 0.7;
    spec.feature_noise_rate = 0.4;
    CHECK_THROWS_AS(generate(spec), std::invalid_argument);
    spec = {};
    spec.n_total = 3;
    CHECK_THROWS_AS(generate(spec), std::invalid_argument);
    spec = {};
    spec.minority_fraction = 1.2;
    CHECK_THROWS_AS(generate(spec), std::invalid_argument);
    spec = {};
    spec.dim = 9;
    CHECK_THROWS_AS(generate(spec), std::invalid_argument);
}

TEST_CASE("spec sidecar round trip") {
    GenSpec spec;
    spec.n_total = 77;
    spec.minority_fraction = 0.15;
    spec.dim = 5;
    spec.seed = 123456789012345ULL;
    const auto back = genspec_from_json(genspec_to_json(spec));
    CHECK(genspec_to_json(back) == genspec_to_json(spec));
}

TEST_CASE("quadrant recovery: perfect oracle scorer") {
    GenSpec spec;
    spec.n_total = 200;
    spec.minority_fraction = 0.2;
    spec.label_noise_rate = 0.2;
    spec.feature_noise_rate = 0.2;
    const auto d = generate(spec);
    std::vector<ScoreRecord> scores;
    for (const auto& s : d.samples) scores.push_back(encode(s));
    const auto records = build_difficulty(scores);
    const auto rate = quadrant_recovery_rate(d, records, QuadrantThresholds{0.5, 0.5});
    CHECK(rate.size() == 4);
    for (const auto& [q, r] : rate) CHECK(r == 1.0);
}

TEST_CASE("quadrant recovery: random scores sit near chance") {
    GenSpec spec;
    spec.n_total = 400;
    spec.minority_fraction = 0.25;
    spec.label_noise_rate = 0.33;
    spec.feature_noise_rate = 0.33;
    const auto d = generate(spec);
    std::map<Quadrant, double> mean;
    const int seeds = 20;
    for (int seed = 0; seed < seeds; ++seed) {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        std::vector<ScoreRecord> scores;
        for (const auto& s : d.samples) scores.push_back({s.id, u(rng), u(rng)});
        for (const auto& [q, r] : quadrant_recovery_rate(d, build_difficulty(scores))) mean[q] += r / seeds;
    }
    CHECK(mean.size() == 4);
    for (const auto& [q, r] : mean) CHECK(std::abs(r - 0.25) < 0.1);
}

TEST_CASE("quadrant recovery: single-quadrant dataset and missing scores") {
    GenSpec spec;
    spec.n_total = 12;
    spec.minority_fraction = 0.0;
    spec.label_noise_rate = 0.0;
    spec.feature_noise_rate = 0.0;
    const auto d = generate(spec);
    std::vector<ScoreRecord> scores;
    for (const auto& s : d.samples) scores.push_back({s.id, 0.1, 0.1});
    const auto rate = quadrant_recovery_rate(d, build_difficulty(scores));
    CHECK(rate.size() == 1);
    CHECK(rate.count(Quadrant::ll) == 1);
    CHECK(rate.at(Quadrant::ll) == 1.0);

    scores.pop_back();
    CHECK_THROWS_AS(quadrant_recovery_rate(d, build_difficulty(scores)), std::invalid_argument);
}
