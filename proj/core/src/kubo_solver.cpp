#include "qbm/kubo_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCore>

#include "qbm/csv.hpp"
#include "qbm/error.hpp"

namespace qbm {
namespace {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Sparse = Eigen::SparseMatrix<Complex, Eigen::RowMajor>;

constexpr Complex kI{0.0, 1.0};

Matrix annihilation(int dim) {
    Matrix a = Matrix::Zero(dim, dim);
    for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

int minimum_dim(const SystemSpec& system) {
    return std::holds_alternative<QuarticPotential>(system.potential) ||
                   std::holds_alternative<DoubleWellPotential>(system.potential)
               ? 8
               : 4;
}

double hermiticity_error(const Matrix& rho) { return (rho - rho.adjoint()).cwiseAbs().maxCoeff(); }

double min_eigenvalue(const Matrix& rho) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

// Tr(A ρ) for Hermitian A, ρ
double expectation(const Matrix& op, const Matrix& rho) { return op.cwiseProduct(rho.transpose()).sum().real(); }

class Generator {
public:
    Generator(const SystemOperators& ops, double gamma)
        : h_(ops.hamiltonian.entries.sparseView()),
          x_(ops.x.entries.sparseView()),
          p_(ops.p.entries.sparseView()),
          friction_half_(0.5 * gamma / ops.mass),
          scale_(1.0 / (kI * ops.hbar)) {
        h_.makeCompressed();
        x_.makeCompressed();
        p_.makeCompressed();
    }

    // out = ([H, ρ] + (γ/2m)[X, {P, ρ}] − η [X, ρ]) / iħ
    void operator()(const Matrix& rho, double eta, Matrix& out) {
        anti_.noalias() = p_ * rho;
        anti_.noalias() += rho * p_;
        out.noalias() = h_ * rho;
        out.noalias() -= rho * h_;
        tmp_.noalias() = x_ * anti_;
        tmp_.noalias() -= anti_ * x_;
        out += friction_half_ * tmp_;
        tmp_.noalias() = x_ * rho;
        tmp_.noalias() -= rho * x_;
        out -= eta * tmp_;
        out *= scale_;
    }

private:
    Sparse h_, x_, p_;
    double friction_half_;
    Complex scale_;
    Matrix anti_, tmp_;
};

KuboSample make_sample(double t, const Matrix& rho, const SystemOperators& ops, const Matrix& x2,
                       const Matrix& p2, bool eig) {
    KuboSample s;
    s.t = t;
    s.mean_x = expectation(ops.x.entries, rho);
    s.mean_p = expectation(ops.p.entries, rho);
    s.mean_x2 = expectation(x2, rho);
    s.mean_p2 = expectation(p2, rho);
    s.trace = rho.trace().real();
    s.purity = rho.cwiseAbs2().sum();
    const int n = static_cast<int>(rho.rows());
    s.leak = std::abs(rho(n - 1, n - 1).real()) + std::abs(rho(n - 2, n - 2).real());
    s.min_eig = eig ? min_eigenvalue(rho) : 0.0;
    return s;
}

} // namespace

void DensityMatrix::validate(double hermitian_tol, double trace_tol, double eig_tol) const {
    require(entries.rows() == entries.cols() && entries.rows() > 0, "rho", "must be a nonempty square matrix");
    require(entries.allFinite(), "rho", "entries must be finite");
    require(hermiticity_error(entries) <= hermitian_tol, "rho", "must be Hermitian");
    require(std::abs(entries.trace() - Complex(1.0)) <= trace_tol, "rho", "must have unit trace");
    require(min_eigenvalue(entries) >= -eig_tol, "rho", "must be positive semidefinite");
}

SystemOperators build_operators(const SystemSpec& system, double basis_omega, int dim, double hbar) {
    system.validate();
    require(std::isfinite(basis_omega) && basis_omega > 0.0, "solver.basis_omega", "must be > 0");
    require(std::isfinite(hbar) && hbar > 0.0, "bath.hbar", "must be > 0");
    require(dim >= minimum_dim(system), "solver.dim",
            "must be >= " + std::to_string(minimum_dim(system)) + " for the " +
                std::string(potential_name(system.potential)) + " potential");

    // H is built in a basis four levels larger and then truncated, so every
    // kept matrix element of P² and of X⁴ is exact.
    const double m = system.mass;
    const int big = dim + 4;
    const Matrix a = annihilation(big);
    const Matrix ad = a.adjoint();
    const Matrix x = std::sqrt(hbar / (2.0 * m * basis_omega)) * (a + ad);
    const Matrix p = kI * std::sqrt(hbar * m * basis_omega / 2.0) * (ad - a);

    SystemOperators ops;
    ops.mass = m;
    ops.hbar = hbar;
    ops.basis_omega = basis_omega;
    ops.x = {OperatorLabel::X, x.topLeftCorner(dim, dim)};
    ops.p = {OperatorLabel::P, p.topLeftCorner(dim, dim)};

    const auto c = potential_coefficients(system);
    Matrix h = (p * p) / (2.0 * m);
    Matrix power = Matrix::Identity(big, big);
    for (int k = 0; k < 5; ++k) {
        if (c[k] != 0.0) h += c[k] * power;
        if (k < 4) power = power * x;
    }
    h = h.topLeftCorner(dim, dim).eval();
    ops.hamiltonian = {OperatorLabel::HS, 0.5 * (h + h.adjoint())};
    return ops;
}

DensityMatrix initial_density(const SystemOperators& ops, const InitialState& state) {
    const int dim = ops.dim();
    DensityMatrix rho;
    if (std::holds_alternative<GroundState>(state)) {
        rho.entries = Matrix::Zero(dim, dim);
        rho.entries(0, 0) = 1.0;
    } else if (const auto* coherent = std::get_if<CoherentState>(&state)) {
        require(std::isfinite(coherent->alpha.real()) && std::isfinite(coherent->alpha.imag()), "solver.alpha",
                "must be finite");
        Eigen::VectorXcd psi(dim);
        Complex term = 1.0;  // α^n / sqrt(n!)
        for (int n = 0; n < dim; ++n) {
            psi(n) = term;
            term *= coherent->alpha / std::sqrt(static_cast<double>(n + 1));
        }
        psi /= psi.norm();
        rho.entries = psi * psi.adjoint();
    } else {
        const auto& thermal = std::get<ThermalState>(state);
        const double kt = thermal.boltzmann * thermal.temperature;
        require(std::isfinite(kt) && kt > 0.0, "bath.temperature", "must be > 0");
        Eigen::SelfAdjointEigenSolver<Matrix> solver(ops.hamiltonian.entries);
        const Eigen::VectorXd energies = solver.eigenvalues();
        const double e0 = energies.minCoeff();
        Eigen::VectorXd weights = (-(energies.array() - e0) / kt).exp();
        weights /= weights.sum();
        rho.entries = solver.eigenvectors() * weights.cast<Complex>().asDiagonal() * solver.eigenvectors().adjoint();
        rho.entries = 0.5 * (rho.entries + rho.entries.adjoint()).eval();
    }
    return rho;
}

std::complex<double> observable(const DensityMatrix& rho, const OperatorMatrix& op) {
    require(rho.dim() == op.dim() && op.entries.rows() == op.entries.cols(), "operator",
            "dimension does not match the density matrix");
    return op.entries.cwiseProduct(rho.entries.transpose()).sum();
}

KuboRun evolve_noisy(const DensityMatrix& rho0, const SystemOperators& ops, const BathSpec& bath,
                     const NoisePath& noise, const KuboOptions& options) {
    bath.validate();
    require(rho0.dim() == ops.dim(), "rho0", "dimension does not match the operators");
    rho0.validate();
    require(noise.size() >= 2 && noise.dt > 0.0, "noise", "path needs >= 2 points and dt > 0");
    require(options.substeps >= 1, "solver.substeps", "must be >= 1");
    require(options.record_every >= 1, "solver.record_every", "must be >= 1");

    const Matrix x2 = ops.x.entries * ops.x.entries;
    const Matrix p2 = ops.p.entries * ops.p.entries;
    Generator generator(ops, bath.gamma);

    KuboRun run;
    run.dt = noise.dt;
    run.record_every = options.record_every;
    run.realization_index = noise.realization_index;
    run.mean_x.reserve(noise.size());
    run.mean_p.reserve(noise.size());
    run.min_eigenvalue = std::numeric_limits<double>::infinity();

    Matrix rho = rho0.entries;
    Matrix k1, k2, k3, k4, stage;
    const double h = noise.dt / options.substeps;

    auto record = [&](std::size_t j) {
        run.mean_x.push_back(expectation(ops.x.entries, rho));
        run.mean_p.push_back(expectation(ops.p.entries, rho));
        const int n = static_cast<int>(rho.rows());
        const double leak = std::abs(rho(n - 1, n - 1).real()) + std::abs(rho(n - 2, n - 2).real());
        run.max_leak = std::max(run.max_leak, leak);
        run.max_trace_error = std::max(run.max_trace_error, std::abs(rho.trace() - Complex(1.0)));
        if (j % options.record_every == 0) {
            run.samples.push_back(make_sample(noise.time(j), rho, ops, x2, p2, true));
            run.min_eigenvalue = std::min(run.min_eigenvalue, run.samples.back().min_eig);
            if (options.store_snapshots) run.snapshots.push_back(DensityMatrix{rho});
        }
    };

    record(0);
    for (std::size_t j = 0; j + 1 < noise.size(); ++j) {
        const double eta0 = noise.values[j];
        const double eta1 = noise.values[j + 1];
        for (int s = 0; s < options.substeps; ++s) {
            const double f0 = static_cast<double>(s) / options.substeps;
            const double fh = (s + 0.5) / options.substeps;
            const double f1 = static_cast<double>(s + 1) / options.substeps;
            const double e0 = eta0 + f0 * (eta1 - eta0);
            const double eh = eta0 + fh * (eta1 - eta0);
            const double e1 = eta0 + f1 * (eta1 - eta0);
            generator(rho, e0, k1);
            stage = rho + (0.5 * h) * k1;
            generator(stage, eh, k2);
            stage = rho + (0.5 * h) * k2;
            generator(stage, eh, k3);
            stage = rho + h * k3;
            generator(stage, e1, k4);
            rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        if (!rho.allFinite()) throw NumericalAlarm("Kubo evolution overflow", static_cast<long>(j + 1));
        run.max_hermiticity_error = std::max(run.max_hermiticity_error, hermiticity_error(rho));
        if (options.enforce_hermitian) {
            rho = 0.5 * (rho + rho.adjoint()).eval();
            ++run.symmetrizations;
        }
        record(j + 1);
    }
    run.leakage_alarm = run.max_leak > options.leak_threshold;
    run.positivity_flag = run.min_eigenvalue < -options.positivity_tol;
    return run;
}

double sample_value(const KuboSample& sample, KuboObservable which) noexcept {
    switch (which) {
    case KuboObservable::MeanX: return sample.mean_x;
    case KuboObservable::MeanP: return sample.mean_p;
    case KuboObservable::MeanX2: return sample.mean_x2;
    case KuboObservable::MeanP2: return sample.mean_p2;
    }
    return 0.0;
}

namespace {

void require_same_grid(std::span<const KuboRun> runs) {
    require(runs.size() >= 2, "runs", "need at least 2 runs");
    const auto& ref = runs.front();
    for (const auto& r : runs) {
        if (r.dt != ref.dt || r.record_every != ref.record_every || r.samples.size() != ref.samples.size() ||
            r.snapshots.size() != ref.snapshots.size())
            throw ValidationError("runs", "heterogeneous grids");
        if (!r.snapshots.empty() && r.snapshots.front().dim() != ref.snapshots.front().dim())
            throw ValidationError("runs", "heterogeneous basis dimensions");
    }
}

MeanWithError mean_and_error(const std::vector<double>& values) {
    const double n = static_cast<double>(values.size());
    double sum = 0.0;
    for (double v : values) sum += v;
    const double mean = sum / n;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return {mean, n > 1.0 ? std::sqrt(ss / (n - 1.0) / n) : 0.0};
}

} // namespace

KuboEnsemble average_ensemble(std::span<const KuboRun> runs) {
    require_same_grid(runs);
    KuboEnsemble out;
    out.realizations = runs.size();
    const std::size_t count = runs.front().samples.size();
    std::vector<double> buffer(runs.size());
    for (std::size_t k = 0; k < count; ++k) {
        out.times.push_back(runs.front().samples[k].t);
        const std::pair<std::vector<MeanWithError>*, KuboObservable> series[] = {
            {&out.x, KuboObservable::MeanX},
            {&out.p, KuboObservable::MeanP},
            {&out.x2, KuboObservable::MeanX2},
            {&out.p2, KuboObservable::MeanP2}};
        for (auto [target, which] : series) {
            for (std::size_t r = 0; r < runs.size(); ++r) buffer[r] = sample_value(runs[r].samples[k], which);
            target->push_back(mean_and_error(buffer));
        }
        if (!runs.front().snapshots.empty()) {
            Matrix sum = Matrix::Zero(runs.front().snapshots[k].dim(), runs.front().snapshots[k].dim());
            for (const auto& r : runs) sum += r.snapshots[k].entries;
            out.mean.push_back(DensityMatrix{sum / static_cast<double>(runs.size())});
        }
    }
    return out;
}

MeanWithError windowed_average(std::span<const KuboRun> runs, KuboObservable which, double t_begin,
                               double t_end) {
    require_same_grid(runs);
    std::vector<double> per_run;
    per_run.reserve(runs.size());
    for (const auto& r : runs) {
        double sum = 0.0;
        int count = 0;
        for (const auto& s : r.samples) {
            if (s.t < t_begin || s.t > t_end) continue;
            sum += sample_value(s, which);
            ++count;
        }
        require(count > 0, "window", "contains no recorded samples");
        per_run.push_back(sum / count);
    }
    return mean_and_error(per_run);
}

void write_kubo_run_csv(std::ostream& out, const KuboRun& run) {
    csv::write_header(out, "t,re_mean_x,re_mean_p,mean_x2,mean_p2,trace,purity,min_eig,leak");
    for (const auto& s : run.samples)
        csv::write_row(out, {s.t, s.mean_x, s.mean_p, s.mean_x2, s.mean_p2, s.trace, s.purity, s.min_eig, s.leak});
}

void write_kubo_ensemble_csv(std::ostream& out, const KuboEnsemble& ensemble) {
    csv::write_header(out,
                      "t,re_mean_x,se_x,re_mean_p,se_p,mean_x2,se_x2,mean_p2,se_p2,trace,purity,min_eig,leak");
    for (std::size_t k = 0; k < ensemble.times.size(); ++k) {
        double trace = 0.0, purity = 0.0, min_eig = 0.0, leak = 0.0;
        if (k < ensemble.mean.size()) {
            const Matrix& rho = ensemble.mean[k].entries;
            const int n = static_cast<int>(rho.rows());
            trace = rho.trace().real();
            purity = rho.cwiseAbs2().sum();
            min_eig = min_eigenvalue(rho);
            leak = std::abs(rho(n - 1, n - 1).real()) + std::abs(rho(n - 2, n - 2).real());
        }
        csv::write_row(out, {ensemble.times[k], ensemble.x[k].mean, ensemble.x[k].standard_error, ensemble.p[k].mean,
                             ensemble.p[k].standard_error, ensemble.x2[k].mean, ensemble.x2[k].standard_error,
                             ensemble.p2[k].mean, ensemble.p2[k].standard_error, trace, purity, min_eig, leak});
    }
}

} // namespace qbm
