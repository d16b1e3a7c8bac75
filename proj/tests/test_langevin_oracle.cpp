#include "optospring/errors.hpp"
#include "optospring/langevin_oracle.hpp"
#include "optospring/rigidity.hpp"
#include "optospring/squeezing.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

using namespace optospring;

namespace {

OracleConfig quiet(double duration)
{
    OracleConfig c;
    c.duration = duration;
    c.noise = false;
    c.segments = 1;
    return c;
}

double mean(const std::vector<double>& v)
{
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

} // namespace

TEST_CASE("harmonic transfer")
{
    const DimensionlessModel m = DimensionlessModel::from_ratio(0.02, 0.2);
    const OracleConfig cfg = quiet(40000.0);
    SUBCASE("below resonance, phase quadrature")
    {
        CHECK(harmonic_transfer_check(m, 0.01, kHalfPi, cfg).relative_error <= 0.01);
    }
    SUBCASE("on resonance, regularized")
    {
        CHECK(harmonic_transfer_check(m, 0.02, 0.0, cfg).relative_error <= 0.02);
        CHECK(harmonic_transfer_check(m, 0.02, kHalfPi, cfg).relative_error <= 0.02);
    }
    SUBCASE("above resonance, mixed quadrature")
    {
        CHECK(harmonic_transfer_check(m, 0.04, 0.7, cfg).relative_error <= 0.01);
    }
    SUBCASE("oracle gain against the frequency-domain signal gain")
    {
        // The oracle keeps the exact cavity lag in the rigidity; the
        // frequency-domain gains use its viscous expansion.
        const double damping = cfg.damping(m);
        for (const double x : {0.004, 0.01, 0.02, 0.03, 0.2}) {
            const std::complex<double> cavity(1.0, -2.0 * x);
            const std::complex<double> exact = normalized_inverse_susceptibility(x, m, damping);
            const std::complex<double> viscous(m.x0 * m.x0 - x * x, -x * (damping - m.delta_m));
            for (const double theta : {0.0, 0.6, kHalfPi, 2.5}) {
                const std::complex<double> oracle = oracle_signal_gain(x, theta, m, damping);
                const std::complex<double> freq = quadrature_transfer(x, theta, m, damping).signal;
                CHECK(rel_err(std::sqrt(2.0) * x * std::abs(oracle * cavity * exact),
                              std::abs(freq * viscous)) < 1e-12);
                CHECK(rel_err(std::sqrt(2.0) * x * std::abs(oracle * cavity), std::abs(freq)) <
                      5e-3);
            }
        }
    }
}

TEST_CASE("free-mass asymptote")
{
    const DimensionlessModel m = DimensionlessModel::from_ratio(0.005, 0.2);
    const OracleConfig cfg = quiet(200000.0);
    const HarmonicTransfer a = harmonic_transfer_check(m, 0.05, kHalfPi, cfg);
    const HarmonicTransfer b = harmonic_transfer_check(m, 0.10, kHalfPi, cfg);
    CHECK(a.relative_error < 0.01);
    CHECK(b.relative_error < 0.01);
    const double ratio = std::abs(b.measured) / std::abs(a.measured);
    CHECK(std::abs(ratio / 0.25 - 1.0) < 0.05);
}

TEST_CASE("oracle errors")
{
    const DimensionlessModel m = DimensionlessModel::from_ratio(0.02, 0.2);
    SUBCASE("no steady state inside a short run")
    {
        OracleConfig cfg = quiet(2500.0);
        cfg.gamma_m_rel = 0.05;
        CHECK_THROWS_AS(harmonic_transfer_check(m, 0.021, 0.0, cfg), TransientError);
    }
    SUBCASE("antidamped spring diverges")
    {
        OracleConfig cfg;
        cfg.duration = 200000.0;
        cfg.gamma_m_rel = 0.0;
        cfg.noise = false;
        cfg.drive = SinusoidDrive{1.0, 0.02};
        CHECK_THROWS_AS(simulate_trajectory(m, cfg), InstabilityError);
    }
    SUBCASE("noise ensembles refuse an unregularized antispring")
    {
        REQUIRE(stability_class(m) == StabilityClass::UnstableSpring);
        OracleConfig cfg;
        cfg.duration = 2500.0;
        cfg.segments = 16;
        cfg.gamma_m_rel = 0.0;
        CHECK_THROWS_AS(simulate_output_psd(m, cfg, 0.0, 0.01, 0.05), InstabilityError);
        cfg.gamma_m_rel = 0.01;
        cfg.duration = 100000.0;
        CHECK_THROWS_AS(simulate_output_psd(m, cfg, 0.0, 0.01, 0.05), InstabilityError);
    }
    SUBCASE("configuration bounds")
    {
        OracleConfig cfg;
        cfg.duration = 2500.0;
        cfg.dt = 0.06;
        CHECK_THROWS_AS(simulate_trajectory(m, cfg), DomainError);
        cfg.dt = 0.05;
        cfg.duration = 2000.0;  // below 50 / x0
        CHECK_THROWS_AS(simulate_trajectory(m, cfg), DomainError);
        cfg.duration = 2500.0;
        cfg.gamma_m_rel = -0.1;
        CHECK_THROWS_AS(simulate_trajectory(m, cfg), DomainError);
    }
    SUBCASE("too few segments")
    {
        OracleConfig cfg;
        cfg.duration = 2500.0;
        cfg.segments = 15;
        CHECK_THROWS_AS(simulate_output_psd(m, cfg, 0.0, 0.01, 0.05), EstimatorError);
        std::vector<TimeTrace> traces(3, simulate_trajectory(m, cfg));
        CHECK_THROWS_AS(estimate_output_psd(traces, 0.0, m.gamma0, 0.01, 0.05), EstimatorError);
    }
}

TEST_CASE("lab model stays bounded with light regularization")
{
    const DimensionlessModel lab = reduce(lab_params());
    OracleConfig cfg;
    cfg.duration = 5000.0;
    cfg.gamma_m_rel = 0.1;
    const TimeTrace t = simulate_trajectory(lab, cfg, 0);
    double peak = 0.0;
    for (const double y : t.y) {
        REQUIRE(std::isfinite(y));
        peak = std::max(peak, std::abs(y));
    }
    CHECK(peak < 1e3 / (lab.x0 * lab.x0));
    cfg.segments = 16;
    const SpectrumResult psd = simulate_output_psd(lab, cfg, 0.0, 0.02, 0.1);
    CHECK_FALSE(psd.x.empty());
}

TEST_CASE("seed determinism")
{
    const DimensionlessModel m = DimensionlessModel::from_ratio(0.02, 0.2);
    OracleConfig cfg;
    cfg.duration = 2500.0;
    cfg.segments = 16;
    const TimeTrace a = simulate_trajectory(m, cfg, 3);
    const TimeTrace b = simulate_trajectory(m, cfg, 3);
    const TimeTrace c = simulate_trajectory(m, cfg, 4);
    CHECK(a.a1a == b.a1a);
    CHECK(a.y == b.y);
    CHECK(a.a1a != c.a1a);

    cfg.threads = 1;
    const SpectrumResult serial = simulate_output_psd(m, cfg, 0.3, 0.005, 0.06);
    cfg.threads = 3;
    const SpectrumResult parallel = simulate_output_psd(m, cfg, 0.3, 0.005, 0.06);
    CHECK(serial.channel("s_theta") == parallel.channel("s_theta"));
    CHECK(serial.channel("stderr_s_theta") == parallel.channel("stderr_s_theta"));

    std::vector<TimeTrace> traces;
    for (int k = 0; k < 16; ++k) {
        traces.push_back(simulate_trajectory(m, cfg, static_cast<std::uint64_t>(k)));
    }
    const SpectrumResult batch = estimate_output_psd(traces, 0.3, m.gamma0, 0.005, 0.06);
    CHECK(batch.channel("s_theta") == serial.channel("s_theta"));
}

TEST_CASE("vacuum calibration and estimator scaling")
{
    const DimensionlessModel vacuum = DimensionlessModel::from_pm_qmd2(0.0, 0.0);
    OracleConfig cfg;
    cfg.duration = 500.0;
    cfg.gamma_m_rel = 0.0;
    cfg.segments = 16;
    const SpectrumResult few = simulate_output_psd(vacuum, cfg, 0.4, 0.01, 3.0);
    cfg.segments = 256;
    const SpectrumResult many = simulate_output_psd(vacuum, cfg, 0.4, 0.01, 3.0);

    const auto& s = many.channel("s_theta");
    const auto& se = many.channel("stderr_s_theta");
    std::size_t inside = 0;
    for (std::size_t k = 0; k < s.size(); ++k) {
        inside += std::abs(s[k] - 1.0) <= 3.0 * se[k] ? 1 : 0;
    }
    CHECK(static_cast<double>(inside) / static_cast<double>(s.size()) >= 0.98);
    CHECK(std::abs(mean(s) - 1.0) < 0.01);

    const double ratio = mean(few.channel("stderr_s_theta")) / mean(se);
    CHECK(ratio == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("halving dt does not degrade harmonic agreement")
{
    const DimensionlessModel m = DimensionlessModel::from_ratio(0.02, 0.2);
    OracleConfig cfg = quiet(40000.0);
    const double coarse = harmonic_transfer_check(m, 0.035, 0.0, cfg).relative_error;
    cfg.dt = 0.025;
    const double fine = harmonic_transfer_check(m, 0.035, 0.0, cfg).relative_error;
    CHECK(fine <= coarse + 1e-4);
}

TEST_CASE("trace dump format")
{
    const DimensionlessModel m = DimensionlessModel::from_ratio(0.02, 0.2);
    OracleConfig cfg;
    cfg.duration = 2500.0;
    const TimeTrace t = simulate_trajectory(m, cfg);
    std::ostringstream out;
    write_trace_csv(out, t);
    const std::string text = out.str();
    CHECK(text.rfind("t,a0a,a0phi,y,a1a,a1phi\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == static_cast<long>(t.size() + 1));
    CHECK(text.find('\r') == std::string::npos);
}
