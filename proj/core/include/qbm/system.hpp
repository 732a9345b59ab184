// system.hpp: the tagged particle: mass and potential family

#pragma once

#include <array>
#include <string>
#include <string_view>
#include <variant>

namespace qbm {

struct FreePotential {};

// V = ½ m ω₀² x²
struct HarmonicPotential {
    double omega0{1.0};
};

// V = a x² + b x⁴
struct QuarticPotential {
    double a{1.0};
    double b{1.0};
};

// V = barrier ((x/x0)² - 1)²
struct DoubleWellPotential {
    double barrier{1.0};
    double x0{1.0};
};

using Potential = std::variant<FreePotential, HarmonicPotential, QuarticPotential, DoubleWellPotential>;

struct SystemSpec {
    double mass{1.0};
    Potential potential{HarmonicPotential{}};

    void validate() const;
    bool is_linear() const noexcept;
    // ω₀ for Harmonic, 0 for Free. Throws for nonlinear families.
    double linear_frequency() const;
};

// Coefficients c₀..c₄ of V(x) = Σ c_k x^k.
std::array<double, 5> potential_coefficients(const SystemSpec& system);

double potential_energy(const SystemSpec& system, double x);

// −V′(x). Throws ValidationError for non-finite x.
double potential_force(const SystemSpec& system, double x);

// Registry of potential family names used by configuration files:
// "free", "harmonic", "quartic", "double_well".
std::string_view potential_name(const Potential& potential) noexcept;

} // namespace qbm
