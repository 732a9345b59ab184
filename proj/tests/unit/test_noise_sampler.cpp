#include <cmath>
#include <filesystem>
#include <random>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qbm/noise_sampler.hpp"
#include "qbm/rng.hpp"

using namespace qbm;

namespace {

BathSpec hard_bath(double gamma = 1.0, double temperature = 2.0, double omega_c = 50.0) {
    BathSpec b;
    b.gamma = gamma;
    b.temperature = temperature;
    b.cutoff = HardCutoff{omega_c};
    return b;
}

EnsembleSpec ensemble(std::uint64_t seed, int count, SamplingMethod method = SamplingMethod::CirculantEmbedding) {
    EnsembleSpec e;
    e.master_seed = seed;
    e.n_realizations = count;
    e.method = method;
    return e;
}

void expect_covariance_matches_kernel(const BathSpec& bath, double dt, int n, const EnsembleSpec& e, int max_lag) {
    const auto paths = NoiseSampler(bath, dt, n, e).sample_all(1);
    const auto cov = empirical_covariance(paths, max_lag);
    const auto kernel = tabulate_kernel(bath, dt, max_lag + 1);
    for (int j = 0; j <= max_lag; ++j)
        EXPECT_LE(std::abs(cov.mean[j] - kernel.values[j]), 5.0 * cov.standard_error[j]) << "lag " << j;
}

} // namespace

TEST(NoiseSampler, ZeroFrictionGivesZeroPath) {
    for (auto method : {SamplingMethod::CirculantEmbedding, SamplingMethod::SpectralSynthesis}) {
        const auto path = sample_path(hard_bath(0.0), 0.05, 64, ensemble(1, 1, method), 0);
        ASSERT_EQ(path.size(), 64u);
        for (double v : path.values) EXPECT_EQ(v, 0.0);
    }
}

TEST(NoiseSampler, SameSeedAndIndexReproduceBitwise) {
    const auto e = ensemble(99, 4);
    const auto a = sample_path(hard_bath(), 0.05, 128, e, 2);
    const auto b = sample_path(hard_bath(), 0.05, 128, e, 2);
    EXPECT_EQ(a.values, b.values);
    EXPECT_EQ(a.seed, stream_seed(99, 2));
    EXPECT_EQ(a.realization_index, 2);
    const auto c = sample_path(hard_bath(), 0.05, 128, e, 3);
    EXPECT_NE(a.values, c.values);
}

TEST(NoiseSampler, EnsembleDoesNotDependOnThreadCount) {
    NoiseSampler sampler(hard_bath(), 0.05, 128, ensemble(5, 12));
    const auto serial = sampler.sample_all(1);
    const auto threaded = sampler.sample_all(3);
    ASSERT_EQ(serial.size(), threaded.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
        EXPECT_EQ(serial[i].values, threaded[i].values);
        EXPECT_EQ(serial[i].values, sampler.sample(static_cast<int>(i)).values);
    }
}

TEST(NoiseSampler, StreamSeedsDifferPerIndex) {
    EXPECT_NE(stream_seed(1, 0), stream_seed(1, 1));
    EXPECT_NE(stream_seed(1, 0), stream_seed(2, 0));
    EXPECT_EQ(stream_seed(7, 3), stream_seed(7, 3));
}

TEST(NoiseSampler, CirculantCovarianceMatchesKernel) {
    expect_covariance_matches_kernel(hard_bath(), 0.05, 256, ensemble(11, 3000), 10);
}

TEST(NoiseSampler, DrudeCirculantCovarianceMatchesKernel) {
    BathSpec b;
    b.gamma = 0.5;
    b.temperature = 1.0;
    b.cutoff = DrudeCutoff{5.0};
    expect_covariance_matches_kernel(b, 0.02, 200, ensemble(12, 2000), 40);
}

TEST(NoiseSampler, SpectralSynthesisCovarianceMatchesKernel) {
    expect_covariance_matches_kernel(hard_bath(), 0.05, 256, ensemble(13, 2000, SamplingMethod::SpectralSynthesis),
                                     10);
}

TEST(NoiseSampler, ReportsEmbeddingDiagnostics) {
    NoiseSampler sampler(hard_bath(), 0.05, 256, ensemble(1, 1));
    EXPECT_GE(sampler.embedding_size(), 512u);
    EXPECT_LE(sampler.clipped_fraction(), 1e-4);
    NoiseSampler spectral(hard_bath(), 0.05, 256, ensemble(1, 1, SamplingMethod::SpectralSynthesis));
    EXPECT_EQ(spectral.embedding_size(), 0u);
}

TEST(NoiseSampler, ImpossibleClipBudgetRaisesAlarm) {
    auto e = ensemble(1, 1);
    e.clip_budget = 0.0;
    EXPECT_THROW(NoiseSampler(hard_bath(), 0.05, 256, e), NumericalAlarm);
}

TEST(NoiseSampler, RejectsInvalidInputs) {
    EXPECT_INVALID(sample_path(hard_bath(), 0.05, 64, ensemble(1, 2), 2), "index");
    EXPECT_INVALID(sample_path(hard_bath(), 0.05, 64, ensemble(1, 2), -1), "index");
    EXPECT_INVALID(sample_path(hard_bath(), 0.0, 64, ensemble(1, 2), 0), "grid.dt");
    EXPECT_INVALID(sample_path(hard_bath(), 0.05, 1, ensemble(1, 2), 0), "grid.n");
    EXPECT_INVALID(sample_path(hard_bath(), 0.05, 64, ensemble(1, 0), 0), "ensemble.n_realizations");
    auto e = ensemble(1, 1);
    e.clip_budget = -1.0;
    EXPECT_INVALID(sample_path(hard_bath(), 0.05, 64, e, 0), "ensemble.clip_budget");
    EXPECT_INVALID(sample_path(hard_bath(-1.0), 0.05, 64, ensemble(1, 1), 0), "bath.gamma");
}

TEST(EmpiricalCovariance, ZeroPathsGiveZero) {
    std::vector<NoisePath> paths(3, NoisePath{0.1, std::vector<double>(32, 0.0)});
    const auto cov = empirical_covariance(paths, 5);
    ASSERT_EQ(cov.mean.size(), 6u);
    for (int j = 0; j <= 5; ++j) {
        EXPECT_EQ(cov.mean[j], 0.0);
        EXPECT_EQ(cov.standard_error[j], 0.0);
    }
}

TEST(EmpiricalCovariance, WhiteNoiseOracle) {
    const double sigma = 1.7;
    std::mt19937_64 engine(2024);
    std::normal_distribution<double> normal(0.0, sigma);
    std::vector<NoisePath> paths(400);
    for (auto& p : paths) {
        p.dt = 0.1;
        p.values.resize(128);
        for (double& v : p.values) v = normal(engine);
    }
    const auto cov = empirical_covariance(paths, 8);
    EXPECT_LE(std::abs(cov.mean[0] - sigma * sigma), 5.0 * cov.standard_error[0]);
    for (int j = 1; j <= 8; ++j) EXPECT_LE(std::abs(cov.mean[j]), 5.0 * cov.standard_error[j]) << j;
}

TEST(EmpiricalCovariance, RejectsHeterogeneousGrids) {
    std::vector<NoisePath> paths{NoisePath{0.1, std::vector<double>(16, 1.0)},
                                 NoisePath{0.2, std::vector<double>(16, 1.0)}};
    EXPECT_INVALID(empirical_covariance(paths, 2), "paths");
    paths[1] = NoisePath{0.1, std::vector<double>(8, 1.0)};
    EXPECT_INVALID(empirical_covariance(paths, 2), "paths");
    paths[1] = NoisePath{0.1, std::vector<double>(16, 1.0)};
    EXPECT_INVALID(empirical_covariance(paths, 16), "max_lag");
    EXPECT_INVALID(empirical_covariance(std::span(paths).first(1), 2), "paths");
}

TEST(NoisePath, LinearInterpolationAndClamping) {
    NoisePath p{0.5, {0.0, 2.0, -2.0}};
    EXPECT_DOUBLE_EQ(p.at(0.25), 1.0);
    EXPECT_DOUBLE_EQ(p.at(0.75), 0.0);
    EXPECT_DOUBLE_EQ(p.at(-1.0), 0.0);
    EXPECT_DOUBLE_EQ(p.at(5.0), -2.0);
    EXPECT_DOUBLE_EQ(p.time(2), 1.0);
}

TEST(NoisePath, CsvCarriesSeedAndIndex) {
    auto path = sample_path(hard_bath(), 0.05, 8, ensemble(3, 2), 1);
    std::stringstream out;
    write_noise_csv(out, path);
    std::string line;
    std::getline(out, line);
    EXPECT_EQ(line, "# seed=" + std::to_string(path.seed) + ", index=1");
    std::getline(out, line);
    EXPECT_EQ(line, "t,eta");
    int rows = 0;
    while (std::getline(out, line)) ++rows;
    EXPECT_EQ(rows, 8);
}

TEST(NoisePath, BinaryCacheRoundTrips) {
    const auto path = sample_path(hard_bath(), 0.05, 100, ensemble(4, 1), 0);
    const auto file = std::filesystem::temp_directory_path() / "qbm_noise_roundtrip.bin";
    write_noise_binary(file, path);
    const auto back = read_noise_binary(file);
    EXPECT_EQ(back.values, path.values);
    EXPECT_EQ(back.dt, path.dt);
    EXPECT_EQ(back.seed, path.seed);
    EXPECT_EQ(back.realization_index, path.realization_index);
    std::filesystem::remove(file);
    EXPECT_THROW(read_noise_binary(file), std::runtime_error);
}
