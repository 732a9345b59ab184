#include "qbm/noise_sampler.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstring>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include "qbm/csv.hpp"
#include "qbm/error.hpp"
#include "qbm/parallel.hpp"
#include "qbm/rng.hpp"

namespace qbm {
namespace {

constexpr int kMaxEmbeddingDoublings = 3;
constexpr std::size_t kMinEmbeddingHalfSize = 1024;

Eigen::FFT<double>& thread_fft() {
    thread_local Eigen::FFT<double> fft;
    return fft;
}

struct Embedding {
    std::size_t half_size{0};
    std::vector<double> eigenvalues;
    double clipped_fraction{0.0};
};

Embedding embed(const std::vector<double>& lags, std::size_t m, std::size_t n) {
    // c_j = K(j dt) for j < n, then tapered by cos² to zero at j = m + 1;
    // mirrored: c_{2m-j} = c_j. Lags the path uses are untouched.
    const std::size_t size = 2 * m;
    std::vector<std::complex<double>> c(size), spectrum;
    for (std::size_t j = 0; j <= m; ++j) {
        double taper = 1.0;
        if (j >= n) {
            const double u = static_cast<double>(j - n + 1) / static_cast<double>(m - n + 2);
            taper = std::pow(std::cos(0.5 * std::numbers::pi * u), 2);
        }
        c[j] = lags[j] * taper;
    }
    for (std::size_t j = m + 1; j < size; ++j) c[j] = lags[size - j];
    thread_fft().fwd(spectrum, c);
    Embedding e;
    e.half_size = m;
    e.eigenvalues.resize(size);
    double negative = 0.0;
    double total = 0.0;
    for (std::size_t k = 0; k < size; ++k) {
        const double lambda = spectrum[k].real();
        e.eigenvalues[k] = lambda;
        total += std::abs(lambda);
        if (lambda < 0.0) negative -= lambda;
    }
    e.clipped_fraction = total > 0.0 ? negative / total : 0.0;
    return e;
}

} // namespace

void EnsembleSpec::validate() const {
    require(n_realizations >= 1, "ensemble.n_realizations", "must be >= 1");
    require(std::isfinite(clip_budget) && clip_budget >= 0.0, "ensemble.clip_budget", "must be >= 0");
    require(spectral_modes >= 1, "ensemble.spectral_modes", "must be >= 1");
}

double NoisePath::at(double t) const noexcept {
    if (values.empty()) return 0.0;
    const double s = std::clamp(t / dt, 0.0, static_cast<double>(values.size() - 1));
    const auto j = static_cast<std::size_t>(s);
    if (j + 1 >= values.size()) return values.back();
    const double frac = s - static_cast<double>(j);
    return values[j] + frac * (values[j + 1] - values[j]);
}

NoiseSampler::NoiseSampler(const BathSpec& bath, double dt, int n, const EnsembleSpec& ensemble)
    : bath_(bath), ensemble_(ensemble), dt_(dt), n_(n) {
    bath.validate();
    ensemble.validate();
    require(std::isfinite(dt) && dt > 0.0, "grid.dt", "must be > 0");
    require(n >= 2, "grid.n", "must be >= 2");
    zero_ = bath.gamma == 0.0;
    if (zero_) return;

    if (ensemble.method == SamplingMethod::SpectralSynthesis) {
        const int modes = ensemble.spectral_modes;
        const double d_omega = bath.bandwidth() / modes;
        mode_omega_.resize(modes);
        mode_scale_.resize(modes);
        for (int j = 0; j < modes; ++j) {
            const double omega = (j + 0.5) * d_omega;
            mode_omega_[j] = omega;
            mode_scale_[j] = std::sqrt(kernel_spectrum(bath, omega) * d_omega);
        }
        return;
    }

    // Circulant embedding: grow m until the clipped spectral mass is within budget.
    std::size_t m = std::bit_ceil(std::max(static_cast<std::size_t>(n), kMinEmbeddingHalfSize));
    std::vector<double> lags;
    double best = 1.0;
    for (int attempt = 0; attempt <= kMaxEmbeddingDoublings; ++attempt, m *= 2) {
        const std::size_t have = lags.size();
        lags.resize(m + 1);
        for (std::size_t j = have; j <= m; ++j) lags[j] = evaluate_kernel(bath, j * dt);
        Embedding e = embed(lags, m, static_cast<std::size_t>(n));
        best = std::min(best, e.clipped_fraction);
        if (e.clipped_fraction <= ensemble.clip_budget) {
            half_size_ = m;
            clipped_fraction_ = e.clipped_fraction;
            amplitude_.resize(e.eigenvalues.size());
            const double norm = 1.0 / static_cast<double>(2 * m);
            for (std::size_t k = 0; k < amplitude_.size(); ++k)
                amplitude_[k] = std::sqrt(std::max(e.eigenvalues[k], 0.0) * norm);
            return;
        }
    }
    std::ostringstream msg;
    msg << "circulant embedding failed: clipped spectral fraction " << best
        << " exceeds budget " << ensemble.clip_budget;
    throw NumericalAlarm(msg.str());
}

NoisePath NoiseSampler::sample(int index) const {
    require(index >= 0 && index < ensemble_.n_realizations, "index",
            "must lie in [0, n_realizations)");
    const std::uint64_t seed = stream_seed(ensemble_.master_seed, static_cast<std::uint64_t>(index));
    if (zero_) {
        NoisePath path;
        path.dt = dt_;
        path.values.assign(n_, 0.0);
        path.seed = seed;
        path.realization_index = index;
        return path;
    }
    return ensemble_.method == SamplingMethod::CirculantEmbedding ? sample_circulant(index, seed)
                                                                  : sample_spectral(index, seed);
}

NoisePath NoiseSampler::sample_circulant(int index, std::uint64_t seed) const {
    NormalStream normal(seed);
    const std::size_t size = amplitude_.size();
    std::vector<std::complex<double>> z(size), y;
    for (std::size_t k = 0; k < size; ++k) {
        const double a = normal();
        const double b = normal();
        z[k] = amplitude_[k] * std::complex<double>(a, b);
    }
    thread_fft().fwd(y, z);
    NoisePath path;
    path.dt = dt_;
    path.seed = seed;
    path.realization_index = index;
    path.values.resize(n_);
    for (int j = 0; j < n_; ++j) path.values[j] = y[j].real();
    return path;
}

NoisePath NoiseSampler::sample_spectral(int index, std::uint64_t seed) const {
    NormalStream normal(seed);
    const std::size_t modes = mode_omega_.size();
    std::vector<double> a(modes), b(modes);
    for (std::size_t j = 0; j < modes; ++j) {
        a[j] = mode_scale_[j] * normal();
        b[j] = mode_scale_[j] * normal();
    }
    NoisePath path;
    path.dt = dt_;
    path.seed = seed;
    path.realization_index = index;
    path.values.assign(n_, 0.0);
    // Each mode advances by a fixed rotation e^{iω dt}; resynchronize with an
    // exact evaluation every 64 steps to bound the drift.
    for (std::size_t j = 0; j < modes; ++j) {
        const double omega = mode_omega_[j];
        const std::complex<double> step = std::polar(1.0, omega * dt_);
        const std::complex<double> amp(a[j], -b[j]);
        std::complex<double> phase(1.0, 0.0);
        for (int k = 0; k < n_; ++k) {
            if (k % 64 == 0) phase = std::polar(1.0, omega * k * dt_);
            // Re[(a - i b) e^{iωt}] = a cos ωt + b sin ωt
            path.values[k] += (amp * phase).real();
            phase *= step;
        }
    }
    return path;
}

std::vector<NoisePath> NoiseSampler::sample_all(int threads) const {
    std::vector<NoisePath> paths(ensemble_.n_realizations);
    parallel_for(paths.size(), threads, [&](std::size_t i) { paths[i] = sample(static_cast<int>(i)); });
    return paths;
}

NoisePath sample_path(const BathSpec& bath, double dt, int n, const EnsembleSpec& ensemble, int index) {
    return NoiseSampler(bath, dt, n, ensemble).sample(index);
}

CovarianceEstimate empirical_covariance(std::span<const NoisePath> paths, int max_lag) {
    require(paths.size() >= 2, "paths", "need at least 2 paths");
    const std::size_t length = paths.front().size();
    const double dt = paths.front().dt;
    for (const auto& p : paths)
        if (p.size() != length || p.dt != dt) throw ValidationError("paths", "heterogeneous grids");
    require(max_lag >= 0 && static_cast<std::size_t>(max_lag) < length, "max_lag",
            "must be < path length");

    const std::size_t lags = static_cast<std::size_t>(max_lag) + 1;
    const double count = static_cast<double>(paths.size());
    std::vector<double> sum(lags, 0.0), sum_sq(lags, 0.0);
    for (const auto& p : paths) {
        const auto& x = p.values;
        for (std::size_t k = 0; k < lags; ++k) {
            double acc = 0.0;
            for (std::size_t j = 0; j + k < length; ++j) acc += x[j] * x[j + k];
            const double c = acc / static_cast<double>(length - k);
            sum[k] += c;
            sum_sq[k] += c * c;
        }
    }
    CovarianceEstimate out;
    out.dt = dt;
    out.mean.resize(lags);
    out.standard_error.resize(lags);
    for (std::size_t k = 0; k < lags; ++k) {
        const double mean = sum[k] / count;
        const double var = std::max(0.0, (sum_sq[k] - count * mean * mean) / (count - 1.0));
        out.mean[k] = mean;
        out.standard_error[k] = std::sqrt(var / count);
    }
    return out;
}

void write_noise_csv(std::ostream& out, const NoisePath& path) {
    out << "# seed=" << path.seed << ", index=" << path.realization_index << '\n';
    csv::write_header(out, "t,eta");
    for (std::size_t j = 0; j < path.size(); ++j) csv::write_row(out, {path.time(j), path.values[j]});
}

void write_covariance_csv(std::ostream& out, const CovarianceEstimate& estimate,
                          std::span<const double> kernel) {
    const bool with_kernel = !kernel.empty();
    csv::write_header(out, with_kernel ? "lag,cov,se,K_T" : "lag,cov,se");
    for (std::size_t k = 0; k < estimate.mean.size(); ++k) {
        const double lag = static_cast<double>(k) * estimate.dt;
        if (with_kernel && k < kernel.size())
            csv::write_row(out, {lag, estimate.mean[k], estimate.standard_error[k], kernel[k]});
        else
            csv::write_row(out, {lag, estimate.mean[k], estimate.standard_error[k]});
    }
}

namespace {
constexpr char kMagic[8] = {'Q', 'B', 'M', 'N', 'O', 'I', 'S', '1'};

template <class T>
void put(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}
template <class T>
T get(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    return v;
}
} // namespace

void write_noise_binary(const std::filesystem::path& file, const NoisePath& path) {
    auto out = csv::open(file);
    out.write(kMagic, sizeof kMagic);
    put(out, path.dt);
    put(out, path.seed);
    put(out, static_cast<std::int64_t>(path.realization_index));
    put(out, static_cast<std::uint64_t>(path.values.size()));
    out.write(reinterpret_cast<const char*>(path.values.data()),
              static_cast<std::streamsize>(path.values.size() * sizeof(double)));
    if (!out) throw std::runtime_error("failed writing " + file.string());
}

NoisePath read_noise_binary(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + file.string());
    char magic[sizeof kMagic];
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
        throw std::runtime_error(file.string() + ": not a noise cache file");
    NoisePath path;
    path.dt = get<double>(in);
    path.seed = get<std::uint64_t>(in);
    path.realization_index = static_cast<int>(get<std::int64_t>(in));
    const auto n = get<std::uint64_t>(in);
    path.values.resize(n);
    in.read(reinterpret_cast<char*>(path.values.data()), static_cast<std::streamsize>(n * sizeof(double)));
    if (!in) throw std::runtime_error(file.string() + ": truncated noise cache");
    return path;
}

} // namespace qbm
