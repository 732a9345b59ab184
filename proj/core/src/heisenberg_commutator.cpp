#include "qbm/heisenberg_commutator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "qbm/csv.hpp"
#include "qbm/error.hpp"
#include "qbm/quadrature.hpp"

namespace qbm {
namespace {

using Complex = std::complex<double>;
constexpr double kPi = std::numbers::pi;
constexpr double kCriticalWindow = 1e-9;

// φ₁(z) = (e^z − 1)/z and φ₂(z) = (e^z (z − 1) + 1)/z², i.e. ∫₀¹ e^{zs} ds and
// ∫₀¹ s e^{zs} ds. Series near z = 0 covers resonant modes.
Complex phi1(Complex z) {
    if (std::abs(z) < 1e-3) return 1.0 + z * (0.5 + z * (1.0 / 6.0 + z * (1.0 / 24.0 + z / 120.0)));
    return (std::exp(z) - 1.0) / z;
}

Complex phi2(Complex z) {
    if (std::abs(z) < 1e-3) return 0.5 + z * (1.0 / 3.0 + z * (1.0 / 8.0 + z * (1.0 / 30.0 + z / 144.0)));
    return (std::exp(z) * (z - 1.0) + 1.0) / (z * z);
}

double evaluate_terms(std::span<const GreensFunction::Term> terms, double t) {
    Complex sum = 0.0;
    for (const auto& term : terms) sum += (term.alpha + term.beta * t) * std::exp(term.lambda * t);
    return sum.real();
}

std::vector<GreensFunction::Term> differentiate(const std::vector<GreensFunction::Term>& terms) {
    std::vector<GreensFunction::Term> out;
    out.reserve(terms.size());
    for (const auto& t : terms) out.push_back({t.alpha * t.lambda + t.beta, t.beta * t.lambda, t.lambda});
    return out;
}

// e^{-iωt} J_f(ω, t) = ∫₀^t f(u) e^{-iωu} du for f = Σ (α + β u) e^{λu}.
Complex response_integral(std::span<const GreensFunction::Term> terms, double omega, double t) {
    Complex sum = 0.0;
    for (const auto& term : terms) {
        const Complex z = (term.lambda - Complex(0.0, omega)) * t;
        sum += term.alpha * t * phi1(z);
        if (term.beta != 0.0) sum += term.beta * t * t * phi2(z);
    }
    return sum;
}

double coupling_squared(const BathSpec& bath, double omega, double weight) {
    return bath.gamma * weight * omega / kPi;
}

void check_times(std::span<const double> times) {
    require(!times.empty(), "times", "must not be empty");
    for (double t : times) require(std::isfinite(t) && t >= 0.0, "times", "must be finite and >= 0");
}

double uniform_spacing(std::span<const double> times) {
    if (times.size() < 2) return 0.0;
    const double dt = times[1] - times[0];
    for (std::size_t j = 1; j < times.size(); ++j)
        if (std::abs((times[j] - times[j - 1]) - dt) > 1e-12 * std::max(1.0, std::abs(times[j]))) return 0.0;
    return dt;
}

} // namespace

GreensFunction::GreensFunction(const SystemSpec& system, double gamma) : mass_(system.mass), gamma_(gamma) {
    system.validate();
    require(std::isfinite(gamma) && gamma >= 0.0, "bath.gamma", "must be finite and >= 0");
    require(system.is_linear(), "system.potential", "Green's functions need a free or harmonic potential");
    const double m = mass_;
    const double omega0 = system.linear_frequency();
    if (omega0 == 0.0) {
        regime_ = DampingRegime::FreeDamped;
        if (gamma == 0.0)
            terms_.push_back({0.0, 1.0 / m, 0.0});
        else {
            terms_.push_back({1.0 / gamma, 0.0, 0.0});
            terms_.push_back({-1.0 / gamma, 0.0, -gamma / m});
        }
    } else {
        const double critical = 4.0 * m * m * omega0 * omega0;
        const double disc = gamma * gamma - critical;
        const double decay = -gamma / (2.0 * m);
        if (std::abs(disc) <= kCriticalWindow * std::max(critical, gamma * gamma)) {
            regime_ = DampingRegime::Critical;
            terms_.push_back({0.0, 1.0 / m, decay});
        } else if (disc < 0.0) {
            regime_ = DampingRegime::Underdamped;
            const double wd = std::sqrt(-disc) / (2.0 * m);
            const Complex a = 1.0 / (Complex(0.0, 2.0) * m * wd);
            terms_.push_back({a, 0.0, Complex(decay, wd)});
            terms_.push_back({-a, 0.0, Complex(decay, -wd)});
        } else {
            regime_ = DampingRegime::Overdamped;
            const double kappa = std::sqrt(disc) / (2.0 * m);
            const double a = 1.0 / (2.0 * m * kappa);
            terms_.push_back({a, 0.0, decay + kappa});
            terms_.push_back({-a, 0.0, decay - kappa});
        }
    }
    dterms_ = differentiate(terms_);
    ddterms_ = differentiate(dterms_);
}

double GreensFunction::value(double t) const noexcept { return evaluate_terms(terms_, t); }
double GreensFunction::derivative(double t) const noexcept { return evaluate_terms(dterms_, t); }
double GreensFunction::second_derivative(double t) const noexcept { return evaluate_terms(ddterms_, t); }

double GreensFunction::position_response(double t) const noexcept {
    return mass_ * derivative(t) + gamma_ * value(t);
}

double GreensFunction::momentum_response(double t) const noexcept { return value(t); }

std::pair<double, double> greens_function(const SystemSpec& system, double gamma, double t) {
    require(std::isfinite(t) && t >= 0.0, "t", "must be finite and >= 0");
    GreensFunction g(system, gamma);
    return {g.value(t), g.derivative(t)};
}

ModeBath ModeBath::uniform(const BathSpec& bath, int modes, ModeRule rule) {
    bath.validate();
    require(modes >= 1, "commutator.modes", "must be >= 1");
    require(rule != ModeRule::GaussLegendre, "rule", "use ModeBath::gauss_legendre");
    ModeBath mb;
    mb.rule = rule;
    mb.bandwidth = bath.bandwidth();
    mb.d_omega = mb.bandwidth / modes;
    mb.omegas.resize(modes);
    mb.weights.resize(modes);
    const double offset = rule == ModeRule::Midpoint ? 0.5 : 0.0;
    for (int j = 0; j < modes; ++j) {
        const double omega = (j + 1.0 - offset) * mb.d_omega;
        mb.omegas[j] = omega;
        mb.weights[j] = bath.window(omega) * mb.d_omega;
    }
    return mb;
}

ModeBath ModeBath::gauss_legendre(const BathSpec& bath, int nodes) {
    bath.validate();
    require(nodes >= 1, "commutator.modes", "must be >= 1");
    ModeBath mb;
    mb.rule = ModeRule::GaussLegendre;
    mb.bandwidth = bath.bandwidth();
    const auto rule = gauss_legendre_on(nodes, 0.0, mb.bandwidth);
    mb.omegas = rule.nodes;
    mb.weights.resize(nodes);
    for (int j = 0; j < nodes; ++j) mb.weights[j] = rule.weights[j] * bath.window(rule.nodes[j]);
    mb.d_omega = mb.omegas.front();
    for (int j = 1; j < nodes; ++j) mb.d_omega = std::max(mb.d_omega, mb.omegas[j] - mb.omegas[j - 1]);
    return mb;
}

double CommutatorTrace::sup_deviation_from_one() const noexcept {
    double sup = 0.0;
    for (const auto& c : values) sup = std::max(sup, std::abs(c - Complex(1.0)));
    return sup;
}

std::vector<double> uniform_times(double t_max, int count) {
    require(std::isfinite(t_max) && t_max > 0.0, "commutator.t_max", "must be > 0");
    require(count >= 2, "commutator.n_times", "must be >= 2");
    std::vector<double> t(count);
    for (int j = 0; j < count; ++j) t[j] = t_max * j / (count - 1);
    return t;
}

std::vector<double> commutator_bath_term(const SystemSpec& system, const BathSpec& bath, const ModeBath& modes,
                                         std::span<const double> times) {
    bath.validate();
    check_times(times);
    GreensFunction g(system, bath.gamma);
    std::vector<double> out(times.size(), 0.0);
    if (bath.gamma == 0.0) return out;
    const double m = system.mass;
    for (std::size_t k = 0; k < times.size(); ++k) {
        const double t = times[k];
        double sum = 0.0;
        for (std::size_t j = 0; j < modes.size(); ++j) {
            const double omega = modes.omegas[j];
            const Complex c = response_integral(g.terms(), omega, t);
            const Complex cdot = response_integral(g.derivative_terms(), omega, t);
            sum += coupling_squared(bath, omega, modes.weights[j]) * std::imag(std::conj(c) * cdot);
        }
        out[k] = 2.0 * m * sum;
    }
    return out;
}

CommutatorTrace commutator_trace_with(const SystemSpec& system, const BathSpec& bath, const ModeBath& modes,
                                      std::span<const double> times, NoiseAlgebra algebra) {
    bath.validate();
    check_times(times);
    GreensFunction g(system, bath.gamma);
    const double m = system.mass;
    // [b̂, b̂†] in units of ħ; the commutative algebra sets it to zero.
    const double ladder = algebra == NoiseAlgebra::Quantum ? 1.0 : 0.0;
    std::vector<double> bath_term(times.size(), 0.0);
    if (ladder != 0.0) bath_term = commutator_bath_term(system, bath, modes, times);

    CommutatorTrace trace;
    trace.algebra = algebra;
    trace.times.assign(times.begin(), times.end());
    trace.dt = uniform_spacing(times);
    trace.values.resize(times.size());
    for (std::size_t k = 0; k < times.size(); ++k) {
        const double t = times[k];
        const double gx = g.position_response(t);
        const double gp = g.momentum_response(t);
        const double gx_dot = m * g.second_derivative(t) + bath.gamma * g.derivative(t);
        const double gp_dot = g.derivative(t);
        const double initial = gx * m * gp_dot - gp * m * gx_dot;
        trace.values[k] = Complex(initial + ladder * bath_term[k], 0.0);
    }
    return trace;
}

CommutatorTrace commutator_trace(const SystemSpec& system, const BathSpec& bath, const ModeBath& modes,
                                 std::span<const double> times, const CommutatorOptions& options) {
    bath.validate();
    check_times(times);
    require(!modes.omegas.empty() && modes.omegas.size() == modes.weights.size(), "modes",
            "mode grid is empty or inconsistent");
    require(modes.bandwidth >= bath.bandwidth() * (1.0 - 1e-12), "modes", "mode grid must cover the cutoff");
    const double t_max = *std::max_element(times.begin(), times.end());
    require(modes.d_omega * t_max <= kPi, "modes", "mode spacing does not resolve 1/t_max");

    CommutatorTrace trace = commutator_trace_with(system, bath, modes, times, NoiseAlgebra::Quantum);
    if (options.monitor_convergence && bath.gamma > 0.0 && modes.rule != ModeRule::GaussLegendre) {
        const ModeBath finer = ModeBath::uniform(bath, static_cast<int>(2 * modes.size()), modes.rule);
        const auto refined = commutator_trace_with(system, bath, finer, times, NoiseAlgebra::Quantum);
        double change = 0.0;
        for (std::size_t k = 0; k < times.size(); ++k)
            change = std::max(change, std::abs(refined.values[k] - trace.values[k]));
        if (change > options.convergence_tolerance)
            throw NumericalAlarm("under-resolved mode grid: doubling the mode count changes C(t) by " +
                                 std::to_string(change));
    }
    return trace;
}

CommutatorTrace commutator_trace_commutative(const SystemSpec& system, const BathSpec& bath,
                                             std::span<const double> times) {
    return commutator_trace_with(system, bath, ModeBath{}, times, NoiseAlgebra::Commutative);
}

double symmetric_noise_correlation(const BathSpec& bath, const ModeBath& modes, double t, double t_prime) {
    bath.validate();
    require(std::isfinite(t) && std::isfinite(t_prime), "t", "must be finite");
    require(modes.omegas.size() == modes.weights.size(), "modes", "inconsistent mode grid");
    // ⟨b̂†b̂⟩ = ħ n(ω), so ½⟨{η̂_t, η̂_t'}⟩ = Σ |κ|² ħ (2n + 1) cos ωτ
    const double tau = t - t_prime;
    double sum = 0.0;
    for (std::size_t j = 0; j < modes.size(); ++j) {
        const double omega = modes.omegas[j];
        const double occupation = thermal_weight(bath, omega) / omega;  // coth(ħω/2kT) = 2n + 1
        sum += coupling_squared(bath, omega, modes.weights[j]) * bath.hbar * occupation * std::cos(omega * tau);
    }
    return sum;
}

double antisymmetric_noise_commutator(const BathSpec& bath, const ModeBath& modes, double t, double t_prime) {
    bath.validate();
    require(std::isfinite(t) && std::isfinite(t_prime), "t", "must be finite");
    require(modes.omegas.size() == modes.weights.size(), "modes", "inconsistent mode grid");
    // η̂_t = Σ u_j(t) b̂_j† + h.c. with u_j(t) = κ_j e^{iω_j t}
    // [η̂_t, η̂_t'] = ħ Σ (u(t)* u(t') − u(t) u(t')*) = 2iħ Σ Im(u(t)* u(t'))
    double sum = 0.0;
    for (std::size_t j = 0; j < modes.size(); ++j) {
        const double omega = modes.omegas[j];
        const Complex kappa(0.0, std::sqrt(coupling_squared(bath, omega, modes.weights[j])));
        const Complex u = kappa * std::polar(1.0, omega * t);
        const Complex u_prime = kappa * std::polar(1.0, omega * t_prime);
        sum += std::imag(std::conj(u) * u_prime);
    }
    return 2.0 * bath.hbar * sum;
}

std::vector<RefinementRow> refinement_study(const SystemSpec& system, const BathSpec& bath, int base_modes,
                                            int levels, std::span<const double> times, ModeRule rule) {
    require(levels >= 1, "levels", "must be >= 1");
    std::vector<RefinementRow> rows;
    int modes = base_modes;
    for (int level = 0; level < levels; ++level, modes *= 2) {
        const ModeBath mb = ModeBath::uniform(bath, modes, rule);
        const auto trace = commutator_trace_with(system, bath, mb, times, NoiseAlgebra::Quantum);
        rows.push_back({mb.size(), mb.d_omega, mb.bandwidth, trace.sup_deviation_from_one()});
    }
    return rows;
}

void write_commutator_csv(std::ostream& out, std::span<const CommutatorTrace> traces) {
    csv::write_header(out, "t,re_C,im_C,algebra");
    for (const auto& trace : traces) {
        const char* name = trace.algebra == NoiseAlgebra::Quantum ? "quantum" : "commutative";
        for (std::size_t k = 0; k < trace.times.size(); ++k)
            out << csv::format(trace.times[k]) << ',' << csv::format(trace.values[k].real()) << ','
                << csv::format(trace.values[k].imag()) << ',' << name << '\n';
    }
}

void write_refinement_csv(std::ostream& out, std::span<const RefinementRow> rows) {
    csv::write_header(out, "modes,d_omega,bandwidth,sup_abs_dev");
    for (const auto& r : rows)
        out << r.modes << ',' << csv::format(r.d_omega) << ',' << csv::format(r.bandwidth) << ','
            << csv::format(r.sup_deviation) << '\n';
}

} // namespace qbm
