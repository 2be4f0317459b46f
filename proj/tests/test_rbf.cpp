#include <doctest.h>

#include <cmath>
#include <random>

#include "dacnn/network.hpp"
#include "dacnn/rbf.hpp"

using namespace dacnn;

TEST_CASE("target_estimate at the reference parameters") {
    const RbfConfig cfg;  // p_max 0.6, p_min 0.3 over [0, 4]
    CHECK(target_estimate(0.0, cfg) == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(target_estimate(4.0, cfg) == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(target_estimate(2.0, cfg) == doctest::Approx(0.45).epsilon(1e-15));
}

TEST_CASE("target_estimate is strictly decreasing in q") {
    const RbfConfig cfg;
    double prev = target_estimate(0.0, cfg);
    for (double q = 0.1; q <= 4.0; q += 0.1) {
        const double p = target_estimate(q, cfg);
        CHECK(p < prev);
        prev = p;
    }
}

TEST_CASE("target_estimate rejects q outside [a, b]") {
    const RbfConfig cfg;
    CHECK_THROWS_AS(target_estimate(-0.1, cfg), QOutOfRange);
    CHECK_THROWS_AS(target_estimate(4.1, cfg), QOutOfRange);
}

TEST_CASE("center_from_target known values") {
    CHECK(center_from_target(0.5, 10) == doctest::Approx(std::log(9.0)).epsilon(1e-15));
    CHECK(center_from_target(0.1, 10) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK_THROWS_AS(center_from_target(0.0, 10), POutOfRange);
    CHECK_THROWS_AS(center_from_target(1.0, 10), POutOfRange);
}

TEST_CASE("logit_confidence known values and monotone limit") {
    CHECK(logit_confidence(0.0, 10) == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(logit_confidence(std::log(9.0), 10) == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(std::abs(logit_confidence(50.0, 10) - 1.0) < 1e-12);
}

TEST_CASE("logit_confidence inverts center_from_target") {
    for (double p = 0.1; p <= 0.901; p += 0.1)
        CHECK(std::abs(logit_confidence(center_from_target(p, 10), 10) - p) < 1e-12);
}

TEST_CASE("consistency chain: one-hot logit center reproduces the target confidence") {
    for (double p = 0.1; p <= 0.901; p += 0.1) {
        std::vector<double> z(10, 0.0);
        z[0] = center_from_target(p, 10);
        CHECK(std::abs(softmax(z)[0] - p) < 1e-12);
    }
}

TEST_CASE("rbf_transform peak and one-sigma values") {
    RbfConfig cfg;
    const double zeta = 2.0;
    std::vector<double> z = {zeta, zeta + cfg.sigma_rbf, zeta - cfg.sigma_rbf};
    const auto g = rbf_transform(z, zeta, cfg);
    CHECK(g[0] == doctest::Approx(6.0).epsilon(1e-15));
    CHECK(g[1] == doctest::Approx(6.0 * std::exp(-0.5)).epsilon(1e-12));
    CHECK(g[1] == doctest::Approx(3.6394).epsilon(1e-4));
    CHECK(g[1] == doctest::Approx(g[2]).epsilon(1e-15));  // even function
}

TEST_CASE("rbf_transform output stays in (0, A]") {
    RbfConfig cfg;
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> uni(0.0, 6.0);
    for (int rep = 0; rep < 100; ++rep) {
        std::vector<double> z(10);
        for (double& x : z) x = uni(rng);
        for (double g : rbf_transform(z, 2.0, cfg)) {
            CHECK(g > 0.0);
            CHECK(g <= cfg.A);
        }
    }
}

TEST_CASE("rbf_backward: stationary peak and sign") {
    RbfConfig cfg;
    const double zeta = 1.8;
    const std::vector<double> z = {zeta, zeta + 0.5, zeta - 0.5};
    const std::vector<double> upstream = {1.0, 1.0, 1.0};
    const auto g = rbf_backward(z, zeta, cfg, upstream);
    CHECK(g[0] == 0.0);
    CHECK(g[1] < 0.0);  // Gaussian decreases right of the peak
    CHECK(g[2] > 0.0);
}

TEST_CASE("rbf_backward matches finite differences") {
    RbfConfig cfg;
    std::mt19937_64 rng(14);
    std::uniform_real_distribution<double> uni(0.0, 6.0);
    std::uniform_real_distribution<double> uup(-2.0, 2.0);
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<double> z(6), upstream(6);
        for (double& x : z) x = uni(rng);
        for (double& u : upstream) u = uup(rng);
        const double zeta = uni(rng);
        const auto analytic = rbf_backward(z, zeta, cfg, upstream);

        const double eps = 1e-5;
        for (std::size_t k = 0; k < z.size(); ++k) {
            auto zp = z, zm = z;
            zp[k] += eps;
            zm[k] -= eps;
            double fd = 0.0;
            const auto gp = rbf_transform(zp, zeta, cfg);
            const auto gm = rbf_transform(zm, zeta, cfg);
            for (std::size_t l = 0; l < z.size(); ++l)
                fd += upstream[l] * (gp[l] - gm[l]) / (2.0 * eps);
            CHECK(std::abs(analytic[k] - fd) <=
                  1e-6 * std::max({std::abs(analytic[k]), std::abs(fd)}) + 1e-9);
        }
    }
}

TEST_CASE("RbfConfig validation") {
    RbfConfig bad;
    bad.p_min = 0.7;  // above p_max
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    RbfConfig bad2;
    bad2.sigma_rbf = 0.0;
    CHECK_THROWS_AS(bad2.validate(), ConfigError);
}
