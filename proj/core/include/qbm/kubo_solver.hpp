// kubo_solver.hpp: noisy reduced density matrix under the operator form of
// Kubo's stochastic Liouville equation,
//
//   iħ ∂_t ρ = [H_S, ρ] + ½ [X, [γP/m − η(t), ρ]₊],
//
// in a truncated reference-oscillator basis with a c-number noise path.

#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "qbm/bath_kernel.hpp"
#include "qbm/classical_dynamics.hpp"
#include "qbm/noise_sampler.hpp"
#include "qbm/system.hpp"

namespace qbm {

enum class OperatorLabel { X, P, HS, Custom };

struct OperatorMatrix {
    OperatorLabel label{OperatorLabel::Custom};
    Eigen::MatrixXcd entries;

    int dim() const noexcept { return static_cast<int>(entries.rows()); }
};

struct DensityMatrix {
    Eigen::MatrixXcd entries;

    int dim() const noexcept { return static_cast<int>(entries.rows()); }
    // Hermitian, unit trace, eigenvalues above -eig_tol; throws ValidationError.
    void validate(double hermitian_tol = 1e-10, double trace_tol = 1e-10, double eig_tol = 1e-8) const;
};

// X, P and H_S for one system in the ladder basis of a reference oscillator
// of frequency basis_omega and the system mass.
struct SystemOperators {
    OperatorMatrix x;
    OperatorMatrix p;
    OperatorMatrix hamiltonian;
    double mass{1.0};
    double hbar{1.0};
    double basis_omega{1.0};

    int dim() const noexcept { return x.dim(); }
};

// dim >= 4 (>= 8 for quartic and double-well potentials); basis_omega > 0.
SystemOperators build_operators(const SystemSpec& system, double basis_omega, int dim, double hbar = 1.0);

struct GroundState {};
struct CoherentState {
    std::complex<double> alpha{0.0, 0.0};
};
// exp(-H_S / kT) / Z
struct ThermalState {
    double temperature{1.0};
    double boltzmann{1.0};
};
using InitialState = std::variant<GroundState, CoherentState, ThermalState>;

DensityMatrix initial_density(const SystemOperators& ops, const InitialState& state);

// Tr(op ρ). Throws ValidationError on dimension mismatch.
std::complex<double> observable(const DensityMatrix& rho, const OperatorMatrix& op);

struct KuboOptions {
    int substeps{1};                 // RK4 steps per noise grid interval
    std::size_t record_every{1};     // grid points between stored samples/snapshots
    bool store_snapshots{true};
    bool enforce_hermitian{true};    // ρ ← (ρ + ρ†)/2 after every step
    double leak_threshold{1e-3};     // top-two-level population alarm
    double positivity_tol{1e-8};
};

struct KuboSample {
    double t{0.0};
    double mean_x{0.0};
    double mean_p{0.0};
    double mean_x2{0.0};
    double mean_p2{0.0};
    double trace{0.0};
    double purity{0.0};
    double min_eig{0.0};
    double leak{0.0};
};

struct KuboRun {
    double dt{0.0};                      // noise grid spacing
    std::size_t record_every{1};
    int realization_index{0};
    std::vector<KuboSample> samples;     // grid points 0, r, 2r, ...
    std::vector<DensityMatrix> snapshots;
    std::vector<double> mean_x;          // every grid point
    std::vector<double> mean_p;
    double max_trace_error{0.0};         // |Tr ρ − 1| over all steps
    double max_hermiticity_error{0.0};   // max |ρ − ρ†| before re-symmetrization
    double max_leak{0.0};
    double min_eigenvalue{0.0};          // over recorded samples
    std::size_t symmetrizations{0};
    bool leakage_alarm{false};
    bool positivity_flag{false};
};

// Classical RK4 on the noise grid (optionally subdivided), η linear between
// grid points. Throws NumericalAlarm on non-finite state; leakage and
// positivity violations only flag the run.
KuboRun evolve_noisy(const DensityMatrix& rho0, const SystemOperators& ops, const BathSpec& bath,
                     const NoisePath& noise, const KuboOptions& options = {});

enum class KuboObservable { MeanX, MeanP, MeanX2, MeanP2 };

double sample_value(const KuboSample& sample, KuboObservable which) noexcept;

struct KuboEnsemble {
    std::vector<double> times;
    std::vector<DensityMatrix> mean;   // entrywise mean per recorded time (empty without snapshots)
    std::vector<MeanWithError> x, p, x2, p2;
    std::size_t realizations{0};
};

// Requires >= 2 runs on identical grids.
KuboEnsemble average_ensemble(std::span<const KuboRun> runs);

// Per-run average of an observable over recorded times in [t_begin, t_end],
// then mean and standard error across runs.
MeanWithError windowed_average(std::span<const KuboRun> runs, KuboObservable which, double t_begin,
                               double t_end);

// `t,re_mean_x,re_mean_p,mean_x2,mean_p2,trace,purity,min_eig,leak`
void write_kubo_run_csv(std::ostream& out, const KuboRun& run);
// Adds standard-error columns; trace/purity/min_eig/leak refer to the mean ρ.
void write_kubo_ensemble_csv(std::ostream& out, const KuboEnsemble& ensemble);

} // namespace qbm
