// classical_dynamics.hpp: classical Langevin equation m ẍ + γ ẋ + V′(x) = η(t)
// driven by a sampled noise path

#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "qbm/bath_kernel.hpp"
#include "qbm/noise_sampler.hpp"
#include "qbm/system.hpp"

namespace qbm {

struct Trajectory {
    double dt{0.0};
    std::vector<double> x;
    std::vector<double> p;
    int realization_index{0};

    std::size_t size() const noexcept { return x.size(); }
    double time(std::size_t j) const noexcept { return static_cast<double>(j) * dt; }
};

// Heun (explicit trapezoid) with the noise as a piecewise-linear forcing.
// One step per noise grid interval; the trajectory has noise.size() points.
// Throws NumericalAlarm carrying the step index if the state stops being finite.
Trajectory integrate(const SystemSpec& system, const BathSpec& bath, const NoisePath& noise, double x0,
                     double p0);

struct MeanWithError {
    double mean{0.0};
    double standard_error{0.0};
};

struct MomentSeries {
    std::vector<double> mean;
    std::vector<double> standard_error;
};

struct MomentsReport {
    double dt{0.0};
    std::size_t burn_in{0};
    std::size_t realizations{0};
    // Time-resolved ensemble moments.
    MomentSeries x, p, x2, p2, xp;
    // Per-trajectory averages over steps >= burn_in, then ensemble mean and error.
    MeanWithError avg_x, avg_p, avg_x2, avg_p2, avg_xp;
};

MomentsReport ensemble_statistics(std::span<const Trajectory> trajectories, std::size_t burn_in);

// Ten relaxation times 10 m/γ in grid steps (0 when γ = 0).
std::size_t default_burn_in(const SystemSpec& system, const BathSpec& bath, double dt);

// `t,x,p`
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);
// `t,mean_x,se_x,mean_p,se_p,mean_x2,se_x2,mean_p2,se_p2`
void write_moments_csv(std::ostream& out, const MomentsReport& report);

} // namespace qbm
