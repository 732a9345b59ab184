// heisenberg_commutator.hpp: exact operator solution of the linear quantum
// Langevin equation over a finite-mode bath, and the equal-time commutator
// [x̂_t, p̂_t] under quantum versus commutative noise.
//
// x̂_t = G_x(t) x̂₀ + G_p(t) p̂₀ + Σ_j [c_j(t) b̂_j† + c_j(t)* b̂_j],  p̂_t = m dx̂_t/dt,
// with η̂_t = Σ_j (κ_j e^{iω_j t} b̂_j† + h.c.), κ_j = i sqrt(γ w_j ω_j / π),
// [b̂_j, b̂_k†] = ħ δ_jk.

#pragma once

#include <complex>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "qbm/bath_kernel.hpp"
#include "qbm/system.hpp"

namespace qbm {

enum class DampingRegime { Underdamped, Critical, Overdamped, FreeDamped };

// Impulse response of m ẍ + γ ẋ + m ω₀² x = δ(t): G(0) = 0, m Ġ(0⁺) = 1.
// Stored as G(t) = Σ (α + β t) e^{λ t}.
class GreensFunction {
public:
    struct Term {
        std::complex<double> alpha;
        std::complex<double> beta;
        std::complex<double> lambda;
    };

    // Free or Harmonic only; throws ValidationError otherwise.
    GreensFunction(const SystemSpec& system, double gamma);

    DampingRegime regime() const noexcept { return regime_; }
    double mass() const noexcept { return mass_; }
    double gamma() const noexcept { return gamma_; }

    double value(double t) const noexcept;
    double derivative(double t) const noexcept;
    double second_derivative(double t) const noexcept;

    std::span<const Term> terms() const noexcept { return terms_; }
    std::span<const Term> derivative_terms() const noexcept { return dterms_; }

    // Homogeneous solutions: x(0)=1, ẋ(0)=0 and x(0)=0, p(0)=1.
    double position_response(double t) const noexcept;  // G_x
    double momentum_response(double t) const noexcept;   // G_p

private:
    DampingRegime regime_;
    double mass_;
    double gamma_;
    std::vector<Term> terms_;
    std::vector<Term> dterms_;
    std::vector<Term> ddterms_;
};

// (G(t), Ġ(t)) for t >= 0.
std::pair<double, double> greens_function(const SystemSpec& system, double gamma, double t);

enum class ModeRule { Riemann, Midpoint, GaussLegendre };

// Discretized bath: mode ω_j carries the quadrature weight w_j (window included).
struct ModeBath {
    std::vector<double> omegas;
    std::vector<double> weights;
    double d_omega{0.0};       // largest spacing between neighbouring modes
    double bandwidth{0.0};
    ModeRule rule{ModeRule::Riemann};

    std::size_t size() const noexcept { return omegas.size(); }

    // ω_j = j Δω (Riemann) or (j − ½) Δω (Midpoint), Δω = Ω / modes.
    static ModeBath uniform(const BathSpec& bath, int modes, ModeRule rule = ModeRule::Riemann);
    // Gauss–Legendre nodes on [0, Ω]; with nodes = bath.quadrature_nodes this is
    // the rule evaluate_kernel uses at short lags.
    static ModeBath gauss_legendre(const BathSpec& bath, int nodes);
};

enum class NoiseAlgebra { Quantum, Commutative };

struct CommutatorTrace {
    double dt{0.0};  // spacing of `times` when uniform, else 0
    std::vector<double> times;
    std::vector<std::complex<double>> values;  // [x̂_t, p̂_t] / iħ
    NoiseAlgebra algebra{NoiseAlgebra::Quantum};

    double sup_deviation_from_one() const noexcept;
};

struct CommutatorOptions {
    bool monitor_convergence{true};
    // Sup-norm change tolerated when the mode count is doubled.
    double convergence_tolerance{1e-2};
};

// Evenly spaced [0, t_max] with `count` points.
std::vector<double> uniform_times(double t_max, int count);

CommutatorTrace commutator_trace(const SystemSpec& system, const BathSpec& bath, const ModeBath& modes,
                                 std::span<const double> times, const CommutatorOptions& options = {});

// Same expansion with the ladder commutator replaced by zero, leaving
// C(t) = G_x m Ġ_p − G_p m Ġ_x.
CommutatorTrace commutator_trace_commutative(const SystemSpec& system, const BathSpec& bath,
                                             std::span<const double> times);

// Trace for an explicit algebra over an explicit mode set; the two functions
// above are thin wrappers.
CommutatorTrace commutator_trace_with(const SystemSpec& system, const BathSpec& bath, const ModeBath& modes,
                                      std::span<const double> times, NoiseAlgebra algebra);

// The bath-mode part of C(t) alone: C_quantum − C_commutative.
std::vector<double> commutator_bath_term(const SystemSpec& system, const BathSpec& bath, const ModeBath& modes,
                                         std::span<const double> times);

// ½⟨[η̂_t, η̂_t']₊⟩ in the thermal bath state, as a mode sum.
double symmetric_noise_correlation(const BathSpec& bath, const ModeBath& modes, double t, double t_prime);

// A with [η̂_t, η̂_t'] = i A, from the ladder algebra of the mode sum.
double antisymmetric_noise_commutator(const BathSpec& bath, const ModeBath& modes, double t, double t_prime);

struct RefinementRow {
    std::size_t modes{0};
    double d_omega{0.0};
    double bandwidth{0.0};
    double sup_deviation{0.0};  // sup_t |C(t) − 1|
};

// Doubles the mode count `levels` times at fixed cutoff.
std::vector<RefinementRow> refinement_study(const SystemSpec& system, const BathSpec& bath, int base_modes,
                                            int levels, std::span<const double> times,
                                            ModeRule rule = ModeRule::Riemann);

// `t,re_C,im_C,algebra`
void write_commutator_csv(std::ostream& out, std::span<const CommutatorTrace> traces);
// `modes,d_omega,bandwidth,sup_abs_dev`
void write_refinement_csv(std::ostream& out, std::span<const RefinementRow> rows);

} // namespace qbm
