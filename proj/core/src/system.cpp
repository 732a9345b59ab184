#include "qbm/system.hpp"

#include <cmath>

#include "qbm/error.hpp"

namespace qbm {
namespace {
template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
} // namespace

void SystemSpec::validate() const {
    require(std::isfinite(mass) && mass > 0.0, "system.mass", "must be > 0");
    std::visit(overloaded{
                   [](const FreePotential&) {},
                   [](const HarmonicPotential& h) {
                       require(std::isfinite(h.omega0) && h.omega0 > 0.0, "system.omega0", "must be > 0");
                   },
                   [](const QuarticPotential& q) {
                       require(std::isfinite(q.a), "system.a", "must be finite");
                       require(std::isfinite(q.b), "system.b", "must be finite");
                   },
                   [](const DoubleWellPotential& d) {
                       require(std::isfinite(d.barrier), "system.barrier", "must be finite");
                       require(std::isfinite(d.x0) && d.x0 != 0.0, "system.x0", "must be finite and nonzero");
                   },
               },
               potential);
}

bool SystemSpec::is_linear() const noexcept {
    return std::holds_alternative<FreePotential>(potential) ||
           std::holds_alternative<HarmonicPotential>(potential);
}

double SystemSpec::linear_frequency() const {
    if (std::holds_alternative<FreePotential>(potential)) return 0.0;
    if (const auto* h = std::get_if<HarmonicPotential>(&potential)) return h->omega0;
    throw ValidationError("system.potential", "only free and harmonic potentials are linear");
}

std::array<double, 5> potential_coefficients(const SystemSpec& system) {
    return std::visit(overloaded{
                          [](const FreePotential&) { return std::array<double, 5>{}; },
                          [&](const HarmonicPotential& h) {
                              return std::array<double, 5>{0.0, 0.0, 0.5 * system.mass * h.omega0 * h.omega0, 0.0, 0.0};
                          },
                          [](const QuarticPotential& q) { return std::array<double, 5>{0.0, 0.0, q.a, 0.0, q.b}; },
                          [](const DoubleWellPotential& d) {
                              const double s2 = 1.0 / (d.x0 * d.x0);
                              return std::array<double, 5>{d.barrier, 0.0, -2.0 * d.barrier * s2, 0.0,
                                                           d.barrier * s2 * s2};
                          },
                      },
                      system.potential);
}

double potential_energy(const SystemSpec& system, double x) {
    const auto c = potential_coefficients(system);
    return c[0] + x * (c[1] + x * (c[2] + x * (c[3] + x * c[4])));
}

double potential_force(const SystemSpec& system, double x) {
    require(std::isfinite(x), "x", "must be finite");
    const auto c = potential_coefficients(system);
    return -(c[1] + x * (2.0 * c[2] + x * (3.0 * c[3] + x * 4.0 * c[4])));
}

std::string_view potential_name(const Potential& potential) noexcept {
    return std::visit(overloaded{
                          [](const FreePotential&) { return std::string_view("free"); },
                          [](const HarmonicPotential&) { return std::string_view("harmonic"); },
                          [](const QuarticPotential&) { return std::string_view("quartic"); },
                          [](const DoubleWellPotential&) { return std::string_view("double_well"); },
                      },
                      potential);
}

} // namespace qbm
