#include "qbm/bath_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "qbm/csv.hpp"
#include "qbm/error.hpp"
#include "qbm/quadrature.hpp"

namespace qbm {
namespace {

constexpr double kPi = std::numbers::pi;

// x coth x, with the series branch near the removable singularity.
double x_coth_x(double x) noexcept {
    const double ax = std::abs(x);
    if (ax < 1e-4) return 1.0 + ax * ax / 3.0;
    return ax / std::tanh(ax);
}

// Each Gauss–Legendre panel spans at most nodes/2 radians of cos(ωτ), which
// keeps the rule converged for arbitrarily long lags.
int panel_count(const BathSpec& spec, double lag) {
    const double phase = spec.bandwidth() * std::abs(lag);
    const double per_panel = 0.5 * spec.quadrature_nodes;
    return std::max(1, static_cast<int>(std::ceil(phase / per_panel)));
}

struct KernelPair {
    double symmetric{0.0};
    double antisymmetric{0.0};
};

KernelPair integrate_pair(const BathSpec& spec, double lag, bool want_sym, bool want_anti) {
    KernelPair out;
    if (spec.gamma == 0.0) return out;
    const auto& rule = gauss_legendre(spec.quadrature_nodes);
    const double omega_max = spec.bandwidth();
    const int panels = panel_count(spec, lag);
    const double width = omega_max / panels;
    double sym = 0.0;
    double anti = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double mid = (p + 0.5) * width;
        const double half = 0.5 * width;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            const double omega = mid + half * rule.nodes[i];
            const double w = half * rule.weights[i] * spec.window(omega);
            const double phase = omega * lag;
            if (want_sym) sym += w * thermal_weight(spec, omega) * std::cos(phase);
            if (want_anti) anti += w * omega * std::sin(phase);
        }
    }
    const double prefactor = spec.gamma * spec.hbar / kPi;
    out.symmetric = prefactor * sym;
    out.antisymmetric = -2.0 * prefactor * anti;
    return out;
}

void require_finite_lag(double lag) {
    require(std::isfinite(lag), "lag", "must be finite");
}

} // namespace

void BathSpec::validate() const {
    require(std::isfinite(gamma) && gamma >= 0.0, "bath.gamma", "must be finite and >= 0");
    require(std::isfinite(temperature) && temperature > 0.0, "bath.temperature", "must be > 0");
    require(std::isfinite(hbar) && hbar > 0.0, "bath.hbar", "must be > 0");
    require(std::isfinite(boltzmann) && boltzmann > 0.0, "bath.boltzmann", "must be > 0");
    const double wc = cutoff_frequency();
    require(std::isfinite(wc) && wc > 0.0, "bath.cutoff_omega", "must be finite and > 0");
    require(quadrature_nodes >= 16, "bath.quadrature_nodes", "must be >= 16");
}

double BathSpec::cutoff_frequency() const noexcept {
    return std::visit(
        [](const auto& c) {
            if constexpr (std::is_same_v<std::decay_t<decltype(c)>, HardCutoff>)
                return c.omega_c;
            else
                return c.omega_d;
        },
        cutoff);
}

double BathSpec::bandwidth() const noexcept {
    if (std::holds_alternative<HardCutoff>(cutoff)) return std::get<HardCutoff>(cutoff).omega_c;
    return kDrudeBandwidthFactor * std::get<DrudeCutoff>(cutoff).omega_d;
}

double BathSpec::window(double omega) const noexcept {
    if (const auto* hard = std::get_if<HardCutoff>(&cutoff))
        return (omega >= 0.0 && omega <= hard->omega_c) ? 1.0 : 0.0;
    const double r = omega / std::get<DrudeCutoff>(cutoff).omega_d;
    return omega <= bandwidth() ? 1.0 / (1.0 + r * r) : 0.0;
}

double thermal_weight(const BathSpec& spec, double omega) noexcept {
    const double kt = spec.thermal_energy();
    const double x = spec.hbar * omega / (2.0 * kt);
    return (2.0 * kt / spec.hbar) * x_coth_x(x);
}

double kernel_spectrum(const BathSpec& spec, double omega) noexcept {
    return spec.gamma * spec.hbar / kPi * thermal_weight(spec, omega) * spec.window(omega);
}

double evaluate_kernel(const BathSpec& spec, double lag) {
    spec.validate();
    require_finite_lag(lag);
    return integrate_pair(spec, lag, true, false).symmetric;
}

double evaluate_antisymmetric_kernel(const BathSpec& spec, double lag) {
    spec.validate();
    require_finite_lag(lag);
    if (lag == 0.0) return 0.0;
    return integrate_pair(spec, lag, false, true).antisymmetric;
}

KernelGrid tabulate_kernel(const BathSpec& spec, double dt, int n) {
    spec.validate();
    require(std::isfinite(dt) && dt > 0.0, "grid.dt", "must be > 0");
    require(n >= 2, "grid.n", "must be >= 2");
    KernelGrid grid;
    grid.dt = dt;
    grid.values.resize(n);
    grid.antisymmetric.resize(n);
    for (int j = 0; j < n; ++j) {
        const auto pair = integrate_pair(spec, j * dt, true, j != 0);
        grid.values[j] = pair.symmetric;
        grid.antisymmetric[j] = pair.antisymmetric;
    }
    return grid;
}

double smeared_gaussian_action(const BathSpec& spec, double width) {
    spec.validate();
    require(std::isfinite(width) && width > 0.0, "width", "must be > 0");
    if (spec.gamma == 0.0) return 0.0;
    // ∫ dτ cos(ωτ) exp(-τ²/2σ²) = σ √(2π) exp(-ω²σ²/2)
    const double omega_max = spec.bandwidth();
    const double phase = omega_max * width;
    const int panels = std::max(1, static_cast<int>(std::ceil(phase / (0.5 * spec.quadrature_nodes))));
    const auto& rule = gauss_legendre(spec.quadrature_nodes);
    const double panel = omega_max / panels;
    double sum = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double mid = (p + 0.5) * panel;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            const double omega = mid + 0.5 * panel * rule.nodes[i];
            const double bump = std::exp(-0.5 * omega * omega * width * width);
            sum += 0.5 * panel * rule.weights[i] * kernel_spectrum(spec, omega) * bump;
        }
    }
    return width * std::sqrt(2.0 * kPi) * sum;
}

void write_kernel_csv(std::ostream& out, const KernelGrid& grid) {
    csv::write_header(out, "lag,K_T,A");
    for (std::size_t j = 0; j < grid.size(); ++j)
        csv::write_row(out, {grid.lag(j), grid.values[j], grid.antisymmetric[j]});
}

} // namespace qbm
