#include "optospring/errors.hpp"
#include "optospring/force_sensing.hpp"
#include "optospring/squeezing.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

using namespace optospring;

namespace {

DimensionlessModel random_model(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> x0(0.02, 0.3);
    std::uniform_real_distribution<double> log_g(std::log(0.2), std::log(2000.0));
    return DimensionlessModel::from_ratio(x0(rng), std::exp(log_g(rng)));
}

} // namespace

TEST_CASE("W, U, V structure")
{
    const DimensionlessModel m = DimensionlessModel::from_ratio(0.05, 0.2);
    CHECK(wuv(0.05, m).v == 0.0);
    CHECK(wuv(0.01, m).u < 0.0);
    const WuvTriple t = wuv(0.03, m);
    for (const double theta : {0.0, 0.4, 1.3, 2.9}) {
        const double direct = output_quadrature_psd(0.03, theta, m);
        const double split =
            (t.w + t.u * std::cos(2.0 * theta) + t.v * std::sin(2.0 * theta)) / t.denom;
        CHECK(rel_err(direct, split) < 1e-12);
    }
}

TEST_CASE("minimum uncertainty identity")
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const DimensionlessModel m = random_model(rng);
        const double x = m.x0 * std::exp(std::log(30.0) * (2.0 * unit(rng) - 1.0));
        worst = std::max(worst, std::abs(uncertainty_residual(x, m)));
    }
    CHECK(worst < 1e-9);

    rng.seed(12);
    for (int i = 0; i < 2000; ++i) {
        const DimensionlessModel m = random_model(rng);
        const double x = m.x0 * std::exp(std::log(30.0) * (2.0 * unit(rng) - 1.0));
        const SqueezeExtremes e = squeeze_minmax(x, m);
        REQUIRE(e.s_min > 0.0);
        REQUIRE(e.s_min <= e.s_max);
        REQUIRE(std::abs(e.product - 1.0) < 1e-9);
    }
}

TEST_CASE("resonance and coherent points")
{
    for (const double g : {0.2, 5.0, 20.0, 300.0}) {
        const DimensionlessModel m = DimensionlessModel::from_ratio(0.05, g);
        const double xg = 0.05 * g;
        CHECK(rel_err(output_quadrature_psd(0.05, 0.0, m), xg * xg) < 1e-12);
        CHECK(rel_err(output_quadrature_psd(0.05, kHalfPi, m), 1.0 / (xg * xg)) < 1e-12);
    }
    const DimensionlessModel balanced = DimensionlessModel::from_ratio(0.05, 20.0);
    CHECK(output_quadrature_psd(0.05, 0.7, balanced) == doctest::Approx(1.0).epsilon(1e-12));

    // U and V both vanish at x = 1 when g = 1: every angle gives vacuum.
    const DimensionlessModel unit_g = DimensionlessModel::from_ratio(0.1, 1.0);
    CHECK(optimal_angle_at(1.0, unit_g).indifferent);
    CHECK(output_quadrature_psd(1.0, 1.1, unit_g) == doctest::Approx(1.0).epsilon(1e-12));
    const std::vector<double> grid = log_grid(0.01, 1.0, 10);
    CHECK_THROWS_AS(optimal_psd_curve(1.0, grid, unit_g), AngleIndifferentError);
    CHECK_FALSE(optimal_angle_at(0.5, unit_g).indifferent);
}

TEST_CASE("optimal angle")
{
    const DimensionlessModel weak = DimensionlessModel::from_ratio(0.05, 0.2);
    CHECK(optimal_angle_at(0.05, weak).theta == 0.0);
    const DimensionlessModel strong = DimensionlessModel::from_ratio(0.05, 2000.0);
    CHECK(optimal_angle_at(0.05, strong).theta == doctest::Approx(kHalfPi).epsilon(1e-15));

    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < 30; ++i) {
        const DimensionlessModel m = random_model(rng);
        const double x = m.x0 * std::exp(2.0 * (2.0 * unit(rng) - 1.0));
        const OptimalAngle opt = optimal_angle_at(x, m);
        CHECK(opt.theta >= 0.0);
        CHECK(opt.theta < kPi);
        const double best = output_quadrature_psd(x, opt.theta, m);
        double scan = std::numeric_limits<double>::infinity();
        for (int k = 0; k < 10000; ++k) {
            scan = std::min(scan, output_quadrature_psd(x, kPi * k / 10000.0, m));
        }
        CHECK(best <= scan * (1.0 + 1e-10));
        CHECK(rel_err(best, squeeze_minmax(x, m).s_min) < 1e-9);
    }
}

TEST_CASE("optimal curve for a fixed angle")
{
    std::mt19937_64 rng(14);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < 20; ++i) {
        const DimensionlessModel m = random_model(rng);
        const double x_c = m.x0 * (0.5 + unit(rng));
        const std::vector<double> grid = log_grid(m.x0 / 10.0, 5.0 * m.x0, 200);
        const SpectrumResult curve = optimal_psd_curve(x_c, grid, m);
        const double theta = optimal_angle_at(x_c, m).theta;
        for (std::size_t k = 0; k < grid.size(); ++k) {
            const double direct = output_quadrature_psd(grid[k], theta, m);
            // theta rounded to double; strong squeezing amplifies that rounding.
            REQUIRE(rel_err(curve.channel("s_theta")[k], direct) < 1e-10);
            REQUIRE(curve.channel("s_envelope")[k] <= direct * (1.0 + 1e-12));
            REQUIRE(curve.channel("theta_used")[k] == theta);
        }
        const std::vector<double> at_xc = {x_c};
        const SpectrumResult touch = optimal_psd_curve(x_c, at_xc, m);
        CHECK(rel_err(touch.channel("s_theta")[0], touch.channel("s_envelope")[0]) < 1e-9);
    }
}

TEST_CASE("limits")
{
    for (const double g : {0.2, 1.0, 20.0, 2000.0}) {
        const DimensionlessModel m = DimensionlessModel::from_ratio(0.05, g);
        const double s = squeeze_minmax(0.05 * 1e-4, m).s_min;
        CHECK(rel_err(s, low_freq_limit(g)) < 1e-3);
        const double root = std::sqrt(1.0 + g * g);
        CHECK(rel_err(low_freq_limit(g), (root - 1.0) / (root + 1.0)) < 1e-12);
    }
    CHECK(rel_err(low_freq_limit(0.2), 0.0098048640721) < 1e-9);
    CHECK(dispersive_reference(0.1) == doctest::Approx(0.01));
    CHECK(dispersive_reference(-3.0) == doctest::Approx(9.0));
    CHECK_THROWS_AS(low_freq_limit(0.0), DomainError);
}

TEST_CASE("pure couplings and bad inputs")
{
    const DimensionlessModel dispersive = DimensionlessModel::from_pm_qmd2(0.0, 0.3);
    const DimensionlessModel dissipative = DimensionlessModel::from_pm_qmd2(0.3, 0.0);
    CHECK_THROWS_AS(wuv(0.1, dispersive), PureCouplingError);
    CHECK_THROWS_AS(output_quadrature_psd(0.1, 0.0, dissipative), PureCouplingError);
    CHECK_THROWS_AS(squeeze_minmax(0.1, dispersive), PureCouplingError);
    const DimensionlessModel m = DimensionlessModel::from_ratio(0.05, 1.0);
    CHECK_THROWS_AS(wuv(-0.1, m), DomainError);
    CHECK_THROWS_AS(output_quadrature_psd(0.1, 0.0, m, -1e-3), DomainError);
    CHECK_THROWS_AS(to_db(0.0), DomainError);
    CHECK(to_db(0.1) == doctest::Approx(-10.0));
}

TEST_CASE("intrinsic loss matches the quadrature gains")
{
    std::mt19937_64 rng(15);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < 2000; ++i) {
        const DimensionlessModel m = random_model(rng);
        const double x = m.x0 * std::exp(2.0 * (2.0 * unit(rng) - 1.0));
        const double theta = kPi * unit(rng);
        const double damping = i % 3 == 0 ? 0.0 : 0.5 * m.x0 * unit(rng);
        const QuadratureGains gains = quadrature_transfer(x, theta, m, damping);
        const double via_gains = std::norm(gains.noise_a) + std::norm(gains.noise_phi);
        REQUIRE(rel_err(via_gains, output_quadrature_psd(x, theta, m, damping)) < 1e-10);
    }
}

TEST_CASE("squeeze spectrum modes")
{
    const DimensionlessModel m = DimensionlessModel::from_ratio(0.05, 20.0);
    const std::vector<double> grid = log_grid(0.005, 0.25, 100);
    const SpectrumResult per =
        squeeze_spectrum(m, {HomodyneMode::OptimalPerFrequency, 0.0, 0.0}, grid);
    const SpectrumResult fixed = squeeze_spectrum(m, {HomodyneMode::Fixed, 0.3, 0.0}, grid);
    const SpectrumResult at =
        squeeze_spectrum(m, {HomodyneMode::OptimalPerFrequency, 0.0, 0.075}, grid);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        CHECK(per.channel("s_theta")[k] == per.channel("s_min")[k]);
        CHECK(fixed.channel("theta_used")[k] == 0.3);
        CHECK(fixed.channel("s_theta")[k] >= per.channel("s_theta")[k] * (1.0 - 1e-12));
        CHECK(at.channel("theta_used")[k] == optimal_angle_at(0.075, m).theta);
        CHECK(rel_err(fixed.channel("s_db")[k], to_db(fixed.channel("s_theta")[k])) < 1e-15);
    }
}
