// noise_sampler.hpp: stationary Gaussian noise with covariance K_T on a
// uniform time grid

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "qbm/bath_kernel.hpp"

namespace qbm {

enum class SamplingMethod { CirculantEmbedding, SpectralSynthesis };

struct EnsembleSpec {
    std::uint64_t master_seed{0};
    int n_realizations{1};
    SamplingMethod method{SamplingMethod::CirculantEmbedding};
    // Largest tolerated fraction of clipped (negative) circulant spectral mass.
    double clip_budget{1e-4};
    // Mode count of the spectral-synthesis midpoint grid.
    int spectral_modes{1024};

    void validate() const;
};

struct NoisePath {
    double dt{0.0};
    std::vector<double> values;  // η(j dt)
    std::uint64_t seed{0};
    int realization_index{0};

    std::size_t size() const noexcept { return values.size(); }
    double time(std::size_t j) const noexcept { return static_cast<double>(j) * dt; }
    // Linear interpolation; t is clamped to the grid.
    double at(double t) const noexcept;
};

// Precomputes the spectral factorization for one (bath, grid) pair; sample()
// is then cheap and thread-safe.
class NoiseSampler {
public:
    NoiseSampler(const BathSpec& bath, double dt, int n, const EnsembleSpec& ensemble);

    NoisePath sample(int index) const;
    std::vector<NoisePath> sample_all(int threads = 0) const;

    // Circulant embedding length 2m (0 for spectral synthesis).
    std::size_t embedding_size() const noexcept { return 2 * half_size_; }
    // Clipped negative eigenvalue mass over total absolute mass.
    double clipped_fraction() const noexcept { return clipped_fraction_; }

private:
    NoisePath sample_circulant(int index, std::uint64_t seed) const;
    NoisePath sample_spectral(int index, std::uint64_t seed) const;

    BathSpec bath_;
    EnsembleSpec ensemble_;
    double dt_;
    int n_;
    bool zero_{false};

    std::size_t half_size_{0};
    std::vector<double> amplitude_;  // sqrt(λ_k / 2m)
    double clipped_fraction_{0.0};

    std::vector<double> mode_omega_;
    std::vector<double> mode_scale_;
};

NoisePath sample_path(const BathSpec& bath, double dt, int n, const EnsembleSpec& ensemble,
                      int index);

struct CovarianceEstimate {
    double dt{0.0};
    std::vector<double> mean;            // lag 0..max_lag
    std::vector<double> standard_error;
};

// Stationary covariance of zero-mean paths, averaged over time origins within a
// path and then over paths; standard errors come from the spread across paths.
CovarianceEstimate empirical_covariance(std::span<const NoisePath> paths, int max_lag);

// `# seed=S, index=I` line, then `t,eta`.
void write_noise_csv(std::ostream& out, const NoisePath& path);
// Header `lag,cov,se,K_T`; `kernel` may be empty, in which case K_T is omitted.
void write_covariance_csv(std::ostream& out, const CovarianceEstimate& estimate,
                          std::span<const double> kernel = {});

// Raw little-endian cache of a path; read_noise_binary(write_noise_binary(p)) == p bitwise.
void write_noise_binary(const std::filesystem::path& file, const NoisePath& path);
NoisePath read_noise_binary(const std::filesystem::path& file);

} // namespace qbm
