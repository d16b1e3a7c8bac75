#pragma once

#include "optospring/model_params.hpp"
#include "optospring/spectrum.hpp"

#include <complex>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

namespace optospring {

struct SinusoidDrive {
    double amplitude = 1.0;  // normalized force
    double x_drive = 0.0;    // drive frequency / gamma0
};

/// Time-domain integration settings. Times are in units of 1/gamma0.
struct OracleConfig {
    double dt = 0.05;
    double duration = 50000.0;
    int segments = 256;
    std::uint64_t seed = 1;
    double gamma_m_rel = 0.1;  // intrinsic damping gamma_m / Omega0
    std::optional<SinusoidDrive> drive;
    bool noise = true;
    unsigned threads = 0;  // 0: OPTOSPRING_THREADS or hardware concurrency

    // gamma_m / gamma0 for this model.
    double damping(const DimensionlessModel& model) const { return gamma_m_rel * model.x0; }

    // Throws DomainError when dt, duration or gamma_m_rel is out of range.
    void validate(const DimensionlessModel& model) const;
};

struct TimeTrace {
    double dt = 0.0;
    std::vector<double> a0a;    // intracavity amplitude quadrature
    std::vector<double> a0phi;  // intracavity phase quadrature
    std::vector<double> y;      // displacement in units of sqrt(hbar / (m gamma0))
    std::vector<double> a1a;    // output amplitude quadrature, step-averaged
    std::vector<double> a1phi;  // output phase quadrature, step-averaged

    std::size_t size() const { return a1a.size(); }
};

// One trajectory from rest. The noise stream depends only on (seed, segment).
TimeTrace simulate_trajectory(const DimensionlessModel& model, const OracleConfig& config,
                              std::uint64_t segment = 0);

// Fraction of every segment dropped before spectral estimation.
inline constexpr double kTransientFraction = 0.2;

/// Hann-windowed periodograms averaged over traces (one per segment), single
/// sided, vacuum = 1. Keeps bins with x_lo <= x <= x_hi.
/// Channels: s_theta, stderr_s_theta.
SpectrumResult estimate_output_psd(std::span<const TimeTrace> traces, double theta, double gamma0,
                                   double x_lo, double x_hi);

/// Streaming ensemble: simulates config.segments trajectories (in parallel,
/// reduced in segment order) and estimates the PSD at theta.
SpectrumResult simulate_output_psd(const DimensionlessModel& model, const OracleConfig& config,
                                   double theta, double x_lo, double x_hi);

// Analytic output/force gain of the simulated equations, a_theta / f.
std::complex<double> oracle_signal_gain(double x, double theta, const DimensionlessModel& model,
                                        double damping);

struct HarmonicTransfer {
    std::complex<double> measured;
    std::complex<double> analytic;
    double relative_error = 0.0;
};

// Noise-free sinusoidal drive at x_drive; lock-in of the output quadrature.
HarmonicTransfer harmonic_transfer_check(const DimensionlessModel& model, double x_drive,
                                         double theta, const OracleConfig& config);

void write_trace_csv(std::ostream& out, const TimeTrace& trace);

// Worker count honoring OPTOSPRING_THREADS.
unsigned resolve_threads(unsigned requested);

} // namespace optospring
