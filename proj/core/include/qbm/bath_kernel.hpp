// bath_kernel.hpp: thermal noise kernel K_T, its commutator counterpart, and
// cutoff regularizations for an ohmic bath

#pragma once

#include <cstddef>
#include <iosfwd>
#include <variant>
#include <vector>

namespace qbm {

struct HardCutoff {
    double omega_c{50.0};
};

// Window 1 / (1 + ω²/ω_D²); the frequency integral is truncated at 40 ω_D.
struct DrudeCutoff {
    double omega_d{10.0};
};

using Cutoff = std::variant<HardCutoff, DrudeCutoff>;

inline constexpr double kDrudeBandwidthFactor = 40.0;

struct BathSpec {
    double gamma{1.0};        // friction coefficient
    double temperature{1.0};
    double hbar{1.0};
    double boltzmann{1.0};
    Cutoff cutoff{HardCutoff{}};
    int quadrature_nodes{512};

    // Throws ValidationError naming "bath.<field>".
    void validate() const;

    double thermal_energy() const noexcept { return boltzmann * temperature; }
    double cutoff_frequency() const noexcept;
    // Upper limit of every frequency integral: ω_c (hard) or 40 ω_D (Drude).
    double bandwidth() const noexcept;
    double window(double omega) const noexcept;
};

// ω coth(ħω / 2kT), continuous at ω = 0 where it equals 2kT/ħ.
double thermal_weight(const BathSpec& spec, double omega) noexcept;

// Spectral weight of K_T: (γħ/π) ω coth(ħω/2kT) window(ω), so that
// K_T(τ) = ∫₀^Ω dω kernel_spectrum(ω) cos(ωτ).
double kernel_spectrum(const BathSpec& spec, double omega) noexcept;

// K_T(lag) = (γħ/π) ∫₀^Ω dω ω coth(ħω/2kT) window(ω) cos(ω lag).
double evaluate_kernel(const BathSpec& spec, double lag);

// A(lag) with [η̂_t, η̂_t'] = i A(t - t'), lag = t - t':
// A(lag) = -(2γħ/π) ∫₀^Ω dω ω window(ω) sin(ω lag). Odd in lag.
double evaluate_antisymmetric_kernel(const BathSpec& spec, double lag);

struct KernelGrid {
    double dt{0.0};
    std::vector<double> values;         // K_T(j dt)
    std::vector<double> antisymmetric;  // A(j dt)

    std::size_t size() const noexcept { return values.size(); }
    double lag(std::size_t j) const noexcept { return static_cast<double>(j) * dt; }
};

KernelGrid tabulate_kernel(const BathSpec& spec, double dt, int n);

// ∫ dτ K_T(τ) exp(-τ²/2σ²): the kernel smeared over a unit-height Gaussian
// bump. In the white-noise limit this tends to 2kTγ.
double smeared_gaussian_action(const BathSpec& spec, double width);

// Header `lag,K_T,A`, 17 significant digits.
void write_kernel_csv(std::ostream& out, const KernelGrid& grid);

} // namespace qbm
