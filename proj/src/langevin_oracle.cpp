#include "optospring/langevin_oracle.hpp"

#include "optospring/errors.hpp"
#include "optospring/rigidity.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>
#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <memory>
#include <mutex>
#include <random>
#include <sstream>
#include <string>
#include <thread>

namespace optospring {

namespace {

using State = Eigen::Vector4d;     // (alpha_a, alpha_phi, q, v)
using Input = Eigen::Vector3d;     // (n_a, n_phi, f)
using StateMap = Eigen::Matrix4d;
using InputMap = Eigen::Matrix<double, 4, 3>;
using OutputMap = Eigen::Matrix<double, 2, 4>;
using Feedthrough = Eigen::Matrix<double, 2, 3>;

constexpr double kDivergenceFactor = 1e6;

std::uint64_t splitmix64(std::uint64_t z)
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t segment)
{
    return splitmix64(splitmix64(seed) ^ splitmix64(~segment));
}

/// Couplings in reduced units: p = sqrt(p_m), q = -sqrt(q_m D^2) for a
/// restoring spring, so that p q = -2 x0^2.
struct Couplings {
    double p = 0.0;
    double q = 0.0;
};

Couplings couplings(const DimensionlessModel& model)
{
    Couplings c;
    c.p = std::sqrt(model.p_m);
    c.q = (model.imaginary_spring ? 1.0 : -1.0) * std::sqrt(model.qm_d2());
    return c;
}

/// Continuous system s' = M s + B u, o = C s + D u, and its exact sampled
/// form for inputs held constant over a step, with outputs averaged over it.
struct Discretization {
    StateMap phi;
    InputMap gamma;
    StateMap avg_state;  // step-average of the state: avg_state s_n + avg_input u_n
    InputMap avg_input;
    OutputMap c;
    Feedthrough d;
};

Discretization discretize(const DimensionlessModel& model, double damping, double dt)
{
    const Couplings k = couplings(model);
    StateMap m = StateMap::Zero();
    m(0, 0) = -0.5;
    m(0, 2) = -0.25 * k.p;
    m(1, 1) = -0.5;
    m(1, 2) = -0.5 * k.q;
    m(2, 3) = 1.0;
    m(3, 0) = -0.5 * k.q;
    m(3, 1) = -0.25 * k.p;
    m(3, 3) = -damping;

    InputMap b = InputMap::Zero();
    b(0, 0) = 1.0;
    b(1, 1) = 1.0;
    b(3, 1) = 0.5 * k.p;
    b(3, 2) = 1.0;

    // z = (s, u, integral of s): z' = [[M, B, 0], [0, 0, 0], [I, 0, 0]] z
    Eigen::Matrix<double, 11, 11> aug = Eigen::Matrix<double, 11, 11>::Zero();
    aug.block<4, 4>(0, 0) = m;
    aug.block<4, 3>(0, 4) = b;
    aug.block<4, 4>(7, 0) = StateMap::Identity();
    const Eigen::Matrix<double, 11, 11> e = (aug * dt).exp();

    Discretization out;
    out.phi = e.block<4, 4>(0, 0);
    out.gamma = e.block<4, 3>(0, 4);
    out.avg_state = e.block<4, 4>(7, 0) / dt;
    out.avg_input = e.block<4, 3>(7, 4) / dt;

    out.c = OutputMap::Zero();
    out.c(0, 0) = 1.0;
    out.c(0, 2) = 0.5 * k.p;
    out.c(1, 1) = 1.0;
    out.d = Feedthrough::Zero();
    out.d(0, 0) = -1.0;
    out.d(1, 1) = -1.0;
    return out;
}

std::size_t step_count(const OracleConfig& config)
{
    return static_cast<std::size_t>(std::llround(config.duration / config.dt));
}

// Hann-windowed single-sided periodogram of one segment's output quadrature.
class Periodogram {
public:
    explicit Periodogram(std::size_t n)
        : n_(n),
          in_(fftw_alloc_real(n), &fftw_free),
          out_(fftw_alloc_complex(n / 2 + 1), &fftw_free),
          window_(n)
    {
        if (!in_ || !out_) {
            throw std::bad_alloc();
        }
        {
            std::lock_guard lock(plan_mutex());
            plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), in_.get(), out_.get(),
                                         FFTW_ESTIMATE);
        }
        if (plan_ == nullptr) {
            throw EstimatorError("FFT plan creation failed");
        }
        for (std::size_t i = 0; i < n; ++i) {
            window_[i] = 0.5 * (1.0 - std::cos(2.0 * kPi * static_cast<double>(i) /
                                               static_cast<double>(n)));
            power_ += window_[i] * window_[i];
        }
    }

    ~Periodogram()
    {
        std::lock_guard lock(plan_mutex());
        fftw_destroy_plan(plan_);
    }

    Periodogram(const Periodogram&) = delete;
    Periodogram& operator=(const Periodogram&) = delete;

    // PSD at bins [first, last] of signal c a + s b (length n).
    std::vector<double> operator()(std::span<const double> a, std::span<const double> b, Phasor p,
                                   double dt, std::size_t first, std::size_t last)
    {
        for (std::size_t i = 0; i < n_; ++i) {
            in_.get()[i] = window_[i] * (p.c * a[i] + p.s * b[i]);
        }
        fftw_execute_dft_r2c(plan_, in_.get(), out_.get());
        std::vector<double> psd(last - first + 1);
        const double scale = 2.0 * dt / power_;
        for (std::size_t k = first; k <= last; ++k) {
            const fftw_complex& z = out_.get()[k];
            psd[k - first] = scale * (z[0] * z[0] + z[1] * z[1]);
        }
        return psd;
    }

private:
    static std::mutex& plan_mutex()
    {
        static std::mutex m;
        return m;
    }

    std::size_t n_;
    std::unique_ptr<double, decltype(&fftw_free)> in_;
    std::unique_ptr<fftw_complex, decltype(&fftw_free)> out_;
    std::vector<double> window_;
    double power_ = 0.0;
    fftw_plan plan_ = nullptr;
};

struct BinRange {
    std::size_t first = 0;
    std::size_t last = 0;
};

BinRange bin_range(std::size_t n, double dt, double x_lo, double x_hi)
{
    const double df = 2.0 * kPi / (static_cast<double>(n) * dt);
    const auto first = static_cast<std::size_t>(std::max(1.0, std::ceil(x_lo / df)));
    const auto last = std::min(n / 2, static_cast<std::size_t>(std::floor(x_hi / df)));
    if (!(x_hi > x_lo) || first > last) {
        std::ostringstream msg;
        msg << "no frequency bins in [" << x_lo << ", " << x_hi << "] at resolution " << df;
        throw EstimatorError(msg.str());
    }
    return {first, last};
}

// In-order accumulation of per-segment PSDs (Welford).
struct BinStats {
    std::vector<double> mean;
    std::vector<double> m2;
    std::size_t count = 0;

    void add(const std::vector<double>& psd)
    {
        if (count == 0) {
            mean.assign(psd.size(), 0.0);
            m2.assign(psd.size(), 0.0);
        }
        ++count;
        for (std::size_t k = 0; k < psd.size(); ++k) {
            const double delta = psd[k] - mean[k];
            mean[k] += delta / static_cast<double>(count);
            m2[k] += delta * (psd[k] - mean[k]);
        }
    }
};

SpectrumResult finish(const BinStats& stats, BinRange bins, std::size_t n, double dt,
                      double gamma0)
{
    SpectrumResult result;
    result.normalization = "single-sided, vacuum = 1";
    const double df = 2.0 * kPi / (static_cast<double>(n) * dt);
    std::vector<double> grid(bins.last - bins.first + 1);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        grid[k] = df * static_cast<double>(bins.first + k);
    }
    result.set_grid(grid, gamma0);
    auto& s = result.add_channel("s_theta");
    auto& se = result.add_channel("stderr_s_theta");
    const auto m = static_cast<double>(stats.count);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        s[k] = stats.mean[k];
        se[k] = std::sqrt(stats.m2[k] / (m - 1.0) / m);
    }
    return result;
}

void require_segments(std::size_t segments)
{
    if (segments < 16) {
        std::ostringstream msg;
        msg << "PSD estimate needs at least 16 segments (got " << segments << ")";
        throw EstimatorError(msg.str());
    }
}

std::size_t transient_samples(std::size_t n)
{
    return static_cast<std::size_t>(std::floor(kTransientFraction * static_cast<double>(n)));
}

} // namespace

void OracleConfig::validate(const DimensionlessModel& model) const
{
    if (!(dt > 0.0) || dt > 0.05 * (1.0 + 1e-12)) {
        std::ostringstream msg;
        msg << "oracle dt must lie in (0, 0.05] to resolve the cavity pole (got " << dt << ")";
        throw DomainError(msg.str());
    }
    if (!(duration > 0.0) || !std::isfinite(duration)) {
        throw DomainError("oracle duration must be positive");
    }
    if (model.x0 > 0.0 && duration < 50.0 / model.x0 * (1.0 - 1e-12)) {
        std::ostringstream msg;
        msg << "oracle duration " << duration << " is below 50/x0 = " << 50.0 / model.x0
            << "; the mechanical line would not be resolved";
        throw DomainError(msg.str());
    }
    if (step_count(*this) < 64) {
        throw DomainError("oracle segment has fewer than 64 steps");
    }
    if (segments < 1) {
        throw DomainError("oracle needs at least one segment");
    }
    if (!(gamma_m_rel >= 0.0) || !std::isfinite(gamma_m_rel)) {
        throw DomainError("gamma_m_rel must be non-negative");
    }
    if (drive && (!std::isfinite(drive->amplitude) || !(drive->x_drive > 0.0))) {
        throw DomainError("sinusoidal drive needs a finite amplitude and x_drive > 0");
    }
}

unsigned resolve_threads(unsigned requested)
{
    unsigned n = requested;
    if (n == 0) {
        n = std::max(1u, std::thread::hardware_concurrency());
    }
    if (const char* env = std::getenv("OPTOSPRING_THREADS")) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end != env && cap > 0) {
            n = std::min(n, static_cast<unsigned>(cap));
        }
    }
    return std::max(1u, n);
}

TimeTrace simulate_trajectory(const DimensionlessModel& model, const OracleConfig& config,
                              std::uint64_t segment)
{
    config.validate(model);
    const double dt = config.dt;
    const double damping = config.damping(model);
    const Discretization sys = discretize(model, damping, dt);
    const std::size_t steps = step_count(config);

    std::mt19937_64 rng(stream_seed(config.seed, segment));
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5 / dt));

    double y_scale = 1.0 / std::max(model.x0 * model.x0, 1e-12);
    if (config.drive) {
        y_scale *= 1.0 + std::abs(config.drive->amplitude);
    }
    const double y_limit = kDivergenceFactor * y_scale;

    TimeTrace trace;
    trace.dt = dt;
    for (auto* ch : {&trace.a0a, &trace.a0phi, &trace.y, &trace.a1a, &trace.a1phi}) {
        ch->resize(steps);
    }

    State s = State::Zero();
    Input u = Input::Zero();
    for (std::size_t n = 0; n < steps; ++n) {
        if (config.noise) {
            u(0) = normal(rng);
            u(1) = normal(rng);
        }
        if (config.drive) {
            const double t_mid = (static_cast<double>(n) + 0.5) * dt;
            u(2) = config.drive->amplitude * std::cos(config.drive->x_drive * t_mid);
        }
        const State avg = sys.avg_state * s + sys.avg_input * u;
        const Eigen::Vector2d o = sys.c * avg + sys.d * u;
        s = sys.phi * s + sys.gamma * u;

        trace.a0a[n] = s(0);
        trace.a0phi[n] = s(1);
        trace.y[n] = s(2);
        trace.a1a[n] = o(0);
        trace.a1phi[n] = o(1);
        if (!(std::abs(s(2)) <= y_limit) || !s.allFinite()) {
            std::ostringstream msg;
            msg << "trajectory diverged at t = " << static_cast<double>(n + 1) * dt << " (|y| = "
                << std::abs(s(2)) << " > " << y_limit
                << "); increase gamma_m_rel above 2 x0 = " << 2.0 * model.x0;
            throw InstabilityError(msg.str());
        }
    }
    return trace;
}

SpectrumResult estimate_output_psd(std::span<const TimeTrace> traces, double theta, double gamma0,
                                   double x_lo, double x_hi)
{
    require_segments(traces.size());
    const std::size_t total = traces.front().size();
    const double dt = traces.front().dt;
    for (const auto& t : traces) {
        if (t.size() != total || t.dt != dt) {
            throw EstimatorError("all traces must share length and time step");
        }
    }
    const std::size_t skip = transient_samples(total);
    const std::size_t n = total - skip;
    const BinRange bins = bin_range(n, dt, x_lo, x_hi);
    const Phasor p = unit_phasor(theta);

    Periodogram periodogram(n);
    BinStats stats;
    for (const auto& t : traces) {
        stats.add(periodogram(std::span(t.a1a).subspan(skip), std::span(t.a1phi).subspan(skip), p,
                              dt, bins.first, bins.last));
    }
    return finish(stats, bins, n, dt, gamma0);
}

SpectrumResult simulate_output_psd(const DimensionlessModel& model, const OracleConfig& config,
                                   double theta, double x_lo, double x_hi)
{
    config.validate(model);
    require_segments(static_cast<std::size_t>(config.segments));
    if (config.noise && stability_class(model) == StabilityClass::UnstableSpring) {
        // Amplitude grows at (delta_m - damping) / 2; one e-fold per segment is tolerated.
        const double growth = 0.5 * (model.delta_m - config.damping(model)) * config.duration;
        if (config.gamma_m_rel == 0.0 || growth > 1.0) {
            std::ostringstream msg;
            msg << "optical spring is antidamped at rate 2 x0 = " << 2.0 * model.x0
                << " (in units of Omega0); gamma_m_rel = " << config.gamma_m_rel
                << " lets fluctuations grow by exp(" << growth
                << ") per segment, so no stationary spectrum exists";
            throw InstabilityError(msg.str());
        }
    }

    const std::size_t total = step_count(config);
    const std::size_t skip = transient_samples(total);
    const std::size_t n = total - skip;
    const BinRange bins = bin_range(n, config.dt, x_lo, x_hi);
    const Phasor p = unit_phasor(theta);
    const auto segments = static_cast<std::size_t>(config.segments);
    const std::size_t workers = std::min<std::size_t>(resolve_threads(config.threads), segments);

    std::vector<std::unique_ptr<Periodogram>> grams;
    for (std::size_t w = 0; w < workers; ++w) {
        grams.push_back(std::make_unique<Periodogram>(n));
    }
    const auto segment_psd = [&](std::size_t w, std::size_t seg) {
        const TimeTrace t = simulate_trajectory(model, config, seg);
        return (*grams[w])(std::span(t.a1a).subspan(skip), std::span(t.a1phi).subspan(skip), p,
                           config.dt, bins.first, bins.last);
    };

    BinStats stats;
    std::vector<std::vector<double>> batch(workers);
    for (std::size_t base = 0; base < segments; base += workers) {
        const std::size_t count = std::min(workers, segments - base);
        if (count == 1) {
            batch[0] = segment_psd(0, base);
        } else {
            std::vector<std::exception_ptr> errors(count);
            {
                std::vector<std::jthread> pool;
                for (std::size_t w = 0; w < count; ++w) {
                    pool.emplace_back([&, w] {
                        try {
                            batch[w] = segment_psd(w, base + w);
                        } catch (...) {
                            errors[w] = std::current_exception();
                        }
                    });
                }
            }
            for (const auto& e : errors) {
                if (e) {
                    std::rethrow_exception(e);
                }
            }
        }
        for (std::size_t w = 0; w < count; ++w) {
            stats.add(batch[w]);
        }
    }
    return finish(stats, bins, n, config.dt, model.gamma0);
}

std::complex<double> oracle_signal_gain(double x, double theta, const DimensionlessModel& model,
                                        double damping)
{
    if (!(x > 0.0)) {
        throw SingularityError("signal gain needs x > 0");
    }
    const Couplings k = couplings(model);
    const Phasor p = unit_phasor(theta);
    const std::complex<double> cavity(1.0, -2.0 * x);
    const std::complex<double> den = cavity * normalized_inverse_susceptibility(x, model, damping);
    if (std::abs(den) == 0.0) {
        throw SingularityError("signal gain pole");
    }
    const std::complex<double> to_a = std::complex<double>(0.0, -x * k.p) / den;
    const std::complex<double> to_phi = -k.q / den;
    return p.c * to_a + p.s * to_phi;
}

HarmonicTransfer harmonic_transfer_check(const DimensionlessModel& model, double x_drive,
                                         double theta, const OracleConfig& config)
{
    OracleConfig cfg = config;
    cfg.noise = false;
    cfg.drive = SinusoidDrive{1.0, x_drive};
    const TimeTrace trace = simulate_trajectory(model, cfg);
    const Phasor p = unit_phasor(theta);
    const double dt = trace.dt;

    // Hann-weighted lock-in over [lo, hi) samples.
    const auto lock_in = [&](std::size_t lo, std::size_t hi) {
        std::complex<double> acc = 0.0;
        double weight = 0.0;
        const auto len = static_cast<double>(hi - lo);
        for (std::size_t n = lo; n < hi; ++n) {
            const double w =
                0.5 * (1.0 - std::cos(2.0 * kPi * static_cast<double>(n - lo) / len));
            const double t_mid = (static_cast<double>(n) + 0.5) * dt;
            const double o = p.c * trace.a1a[n] + p.s * trace.a1phi[n];
            acc += w * o * std::polar(1.0, x_drive * t_mid);
            weight += w;
        }
        return 2.0 * acc / (weight * cfg.drive->amplitude);
    };

    const std::size_t n = trace.size();
    const std::complex<double> early = lock_in(n / 2, 3 * n / 4);
    const std::complex<double> late = lock_in(3 * n / 4, n);
    const double drift = std::abs(late - early) / std::abs(late);
    if (!(drift <= 1e-3)) {
        std::ostringstream msg;
        msg << "harmonic response not stationary within duration " << cfg.duration
            << " (window-to-window change " << drift << ")";
        throw TransientError(msg.str());
    }

    HarmonicTransfer h;
    h.measured = late;
    h.analytic = oracle_signal_gain(x_drive, theta, model, cfg.damping(model));
    h.relative_error = std::abs(h.measured - h.analytic) / std::abs(h.analytic);
    return h;
}

void write_trace_csv(std::ostream& out, const TimeTrace& trace)
{
    out << "t,a0a,a0phi,y,a1a,a1phi\n";
    char line[256];
    for (std::size_t n = 0; n < trace.size(); ++n) {
        std::snprintf(line, sizeof line, "%.12e,%.12e,%.12e,%.12e,%.12e,%.12e\n",
                      static_cast<double>(n + 1) * trace.dt, trace.a0a[n], trace.a0phi[n],
                      trace.y[n], trace.a1a[n], trace.a1phi[n]);
        out << line;
    }
}

} // namespace optospring
