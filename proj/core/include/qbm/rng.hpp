// rng.hpp: reproducible per-realization random streams

#pragma once

#include <cstdint>
#include <random>

namespace qbm {

std::uint64_t splitmix64(std::uint64_t x) noexcept;

// Seed of realization `index` under `master_seed`. Depends only on the pair,
// so ensembles are order-independent under parallel generation.
std::uint64_t stream_seed(std::uint64_t master_seed, std::uint64_t index) noexcept;

class NormalStream {
public:
    explicit NormalStream(std::uint64_t seed) : engine_(seed) {}
    double operator()() { return dist_(engine_); }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> dist_{0.0, 1.0};
};

} // namespace qbm
