#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "moscl/core_math.hpp"
#include "test_support.hpp"

using namespace moscl;
using moscl::testing::rel_err;

TEST_CASE("entropy matches -p ln p") {
    CHECK(entropy(1.0) == 0.0);
    CHECK(entropy(0.0) == 0.0);
    const double oracle = -0.5 * std::log(0.5);
    CHECK(entropy(0.5) == doctest::Approx(oracle).epsilon(1e-15));
    CHECK(entropy(0.5) == doctest::Approx(0.346574).epsilon(1e-6));
}

TEST_CASE("entropy rejects values outside [0, 1]") {
    CHECK_THROWS_AS(entropy(-0.01), std::domain_error);
    CHECK_THROWS_AS(entropy(1.01), std::domain_error);
    CHECK_THROWS_AS(entropy(std::nan("")), std::domain_error);
}

TEST_CASE("entropy peaks at 1/e") {
    const int n = 200000;
    double best_p = 0.0, best = -1.0;
    for (int k = 0; k <= n; ++k) {
        const double p = static_cast<double>(k) / n;
        const double h = entropy(p);
        CHECK(h >= 0.0);
        if (h > best) {
            best = h;
            best_p = p;
        }
    }
    CHECK(best_p == doctest::Approx(1.0 / std::exp(1.0)).epsilon(1e-4));
    CHECK(best == doctest::Approx(1.0 / std::exp(1.0)).epsilon(1e-9));
}

TEST_CASE("binary entropy mode adds the complement term") {
    CHECK(entropy(0.5, EntropyMode::binary) == doctest::Approx(std::log(2.0)));
    CHECK(entropy(0.2, EntropyMode::binary) == doctest::Approx(entropy(0.8, EntropyMode::binary)));
    CHECK(entropy(1.0, EntropyMode::binary) == 0.0);
}

TEST_CASE("sigmoid") {
    CHECK(sigmoid(0.0) == 0.5);
    CHECK(sigmoid(800.0) == 1.0);
    CHECK(sigmoid(-800.0) >= 0.0);
    CHECK(sigmoid(std::log(3.0)) == doctest::Approx(0.75).epsilon(1e-15));
    double prev = sigmoid(-20.0);
    for (double z = -19.9; z < 20.0; z += 0.1) {
        const double s = sigmoid(z);
        CHECK(s > prev);
        prev = s;
    }
}

TEST_CASE("loss values") {
    CHECK(loss(LossKind::mse, 1, 1.0) == 0.0);
    CHECK(loss(LossKind::mse, 1, 0.5) == doctest::Approx(0.25));
    CHECK(loss(LossKind::ce, 1, 0.5) == doctest::Approx(0.693147).epsilon(1e-6));
    CHECK(loss(LossKind::ce, 0, 0.25) == doctest::Approx(-std::log(0.75)));
    CHECK_THROWS_AS(loss(LossKind::ce, 1, 0.0), std::domain_error);
    CHECK_THROWS_AS(loss(LossKind::ce, 0, 1.0), std::domain_error);
    CHECK(loss(LossKind::ce, 1, 1.0) == 0.0);
    CHECK_THROWS_AS(loss(LossKind::mse, 2, 0.5), std::domain_error);
}

TEST_CASE("inverse_loss picks the root on the label side") {
    CHECK(inverse_loss(LossKind::mse, 1, 0.0) == 1.0);
    CHECK(inverse_loss(LossKind::mse, 1, 0.25) == doctest::Approx(0.5));
    CHECK(inverse_loss(LossKind::mse, 0, 0.25) == doctest::Approx(0.5));
    CHECK(inverse_loss(LossKind::mse, 0, 0.04) == doctest::Approx(0.2));
    CHECK(inverse_loss(LossKind::ce, 1, std::log(2.0)) == doctest::Approx(0.5));
    CHECK(inverse_loss(LossKind::ce, 0, -std::log(0.9)) == doctest::Approx(0.1));
    CHECK_THROWS_AS(inverse_loss(LossKind::mse, 1, 1.5), std::range_error);
    CHECK_THROWS_AS(inverse_loss(LossKind::ce, 1, -0.1), std::range_error);
}

TEST_CASE("inverse_loss inverts loss on a grid") {
    for (const auto kind : {LossKind::mse, LossKind::ce}) {
        for (const int y : {0, 1}) {
            for (int k = 1; k < 1000; ++k) {
                const double yhat = k / 1000.0;
                CHECK(std::abs(inverse_loss(kind, y, loss(kind, y, yhat)) - yhat) < 1e-10);
            }
        }
    }
}

TEST_CASE("loss-based uncertainty") {
    CHECK(loss_based_uncertainty(LossKind::mse, 1, 0.0) == 0.0);
    const double h_half = -0.5 * std::log(0.5);
    CHECK(loss_based_uncertainty(LossKind::mse, 1, 0.25) == doctest::Approx(h_half).epsilon(1e-12));
    CHECK(loss_based_uncertainty(LossKind::ce, 1, std::log(2.0)) == doctest::Approx(h_half).epsilon(1e-12));
    CHECK(loss_based_uncertainty(LossKind::mse, 1, 0.25) == doctest::Approx(0.346574).epsilon(1e-6));
    CHECK_THROWS_AS(loss_based_uncertainty(LossKind::mse, 0, 2.0), std::range_error);
}

TEST_CASE("MSE and CE routes give the same loss-based uncertainty") {
    for (const int y : {0, 1}) {
        for (int k = 1; k < 1000; ++k) {
            const double yhat = k / 1000.0;
            const double via_mse = loss_based_uncertainty(LossKind::mse, y, loss(LossKind::mse, y, yhat));
            const double via_ce = loss_based_uncertainty(LossKind::ce, y, loss(LossKind::ce, y, yhat));
            CHECK(std::abs(via_mse - via_ce) < 1e-10);
            CHECK(std::abs(via_mse - entropy(yhat)) < 1e-10);
        }
    }
}

TEST_CASE("central finite differences") {
    CHECK(std::abs(finite_difference_gradient([](double x) { return x * x; }, 3.0, 1e-5) - 6.0) < 1e-8);
    CHECK(std::abs(finite_difference_gradient(sigmoid, 0.0) - 0.25) < 1e-8);
    CHECK(finite_difference_gradient([](double) { return 4.2; }, -7.0) == 0.0);
    CHECK_THROWS_AS(finite_difference_gradient(sigmoid, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("finite-difference slope of MSE matches 2(yhat - y)") {
    for (const int y : {0, 1}) {
        for (int k = 1; k < 100; ++k) {
            const double yhat = k / 100.0;
            if (std::abs(yhat - y) < 1e-12) continue;
            const double fd =
                finite_difference_gradient([y](double p) { return loss(LossKind::mse, y, p); }, yhat, 1e-6);
            CHECK(rel_err(fd, 2.0 * (yhat - y)) < 1e-5);
        }
    }
}
