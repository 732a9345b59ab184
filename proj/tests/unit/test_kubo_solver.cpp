#include <cmath>
#include <complex>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qbm/kubo_solver.hpp"

using namespace qbm;
using Matrix = Eigen::MatrixXcd;
using Complex = std::complex<double>;

namespace {

SystemSpec harmonic(double omega0 = 1.0, double mass = 1.0) {
    SystemSpec s;
    s.mass = mass;
    s.potential = HarmonicPotential{omega0};
    return s;
}

BathSpec drude(double gamma, double temperature) {
    BathSpec b;
    b.gamma = gamma;
    b.temperature = temperature;
    b.cutoff = DrudeCutoff{10.0};
    return b;
}

NoisePath silent(double dt, std::size_t n) { return NoisePath{dt, std::vector<double>(n, 0.0)}; }

double hermiticity(const Matrix& m) { return (m - m.adjoint()).cwiseAbs().maxCoeff(); }

} // namespace

TEST(Operators, CanonicalCommutatorOnLeadingBlock) {
    const int dim = 20;
    const auto ops = build_operators(harmonic(1.3, 0.7), 0.9, dim);
    const Matrix c = ops.x.entries * ops.p.entries - ops.p.entries * ops.x.entries;
    const Matrix expected = Complex(0.0, 1.0) * Matrix::Identity(dim - 2, dim - 2);
    EXPECT_LT((c.topLeftCorner(dim - 2, dim - 2) - expected).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT(hermiticity(ops.x.entries), 1e-15);
    EXPECT_LT(hermiticity(ops.p.entries), 1e-15);
    EXPECT_EQ(ops.x.label, OperatorLabel::X);
    EXPECT_EQ(ops.hamiltonian.label, OperatorLabel::HS);
}

TEST(Operators, HarmonicHamiltonianIsDiagonalInMatchedBasis) {
    const int dim = 16;
    const double omega = 1.7, hbar = 0.5;
    const auto ops = build_operators(harmonic(omega, 2.0), omega, dim, hbar);
    const Matrix& h = ops.hamiltonian.entries;
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
            const double expected = i == j ? hbar * omega * (i + 0.5) : 0.0;
            EXPECT_NEAR(std::abs(h(i, j) - expected), 0.0, 1e-12) << i << "," << j;
        }
}

TEST(Operators, FreeHamiltonianMatchesProjectedLadderElements) {
    const int dim = 10;
    const double m = 1.5, w = 0.8;
    SystemSpec free;
    free.mass = m;
    free.potential = FreePotential{};
    const auto ops = build_operators(free, w, dim);
    // P² = (ħmω/2)(a†a + aa† − a² − a†²), projected onto the first dim levels.
    Matrix oracle = Matrix::Zero(dim, dim);
    for (int k = 0; k < dim; ++k) {
        oracle(k, k) = 2.0 * k + 1.0;
        if (k + 2 < dim) {
            oracle(k, k + 2) = -std::sqrt((k + 1.0) * (k + 2.0));
            oracle(k + 2, k) = oracle(k, k + 2);
        }
    }
    oracle *= (m * w / 2.0) / (2.0 * m);
    EXPECT_LT((ops.hamiltonian.entries - oracle).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Operators, RejectsSmallBasesAndBadFrequencies) {
    EXPECT_INVALID(build_operators(harmonic(), 1.0, 3), "solver.dim");
    SystemSpec quartic;
    quartic.potential = QuarticPotential{};
    EXPECT_INVALID(build_operators(quartic, 1.0, 7), "solver.dim");
    EXPECT_NO_THROW(build_operators(quartic, 1.0, 8));
    EXPECT_INVALID(build_operators(harmonic(), 0.0, 8), "solver.basis_omega");
    EXPECT_INVALID(build_operators(harmonic(1.0, -1.0), 1.0, 8), "system.mass");
}

TEST(InitialState, GroundCoherentAndThermalAreValid) {
    const auto ops = build_operators(harmonic(), 1.0, 48);
    const auto ground = initial_density(ops, GroundState{});
    EXPECT_NO_THROW(ground.validate());
    EXPECT_NEAR(observable(ground, ops.x).real(), 0.0, 1e-15);
    const OperatorMatrix x2{OperatorLabel::Custom, ops.x.entries * ops.x.entries};
    EXPECT_NEAR(observable(ground, x2).real(), 0.5, 1e-14);

    const Complex alpha(0.8, -0.3);
    const auto coherent = initial_density(ops, CoherentState{alpha});
    EXPECT_NO_THROW(coherent.validate());
    EXPECT_NEAR(observable(coherent, ops.x).real(), std::sqrt(2.0) * alpha.real(), 1e-10);
    EXPECT_NEAR(observable(coherent, ops.p).real(), std::sqrt(2.0) * alpha.imag(), 1e-10);
    EXPECT_NEAR((coherent.entries * coherent.entries).trace().real(), 1.0, 1e-12);

    const auto thermal = initial_density(ops, ThermalState{2.0, 1.0});
    EXPECT_NO_THROW(thermal.validate());
    // ⟨X²⟩ = (ħ/2mω) coth(ħω/2kT)
    EXPECT_NEAR(observable(thermal, x2).real(), 0.5 / std::tanh(0.25), 1e-8);
    EXPECT_INVALID(initial_density(ops, ThermalState{0.0, 1.0}), "bath.temperature");
    EXPECT_INVALID(initial_density(ops, CoherentState{Complex(NAN, 0.0)}), "solver.alpha");
}

TEST(Observable, IdentityAndMismatch) {
    const auto ops = build_operators(harmonic(), 1.0, 12);
    const auto rho = initial_density(ops, CoherentState{Complex(0.5, 0.5)});
    const OperatorMatrix identity{OperatorLabel::Custom, Matrix::Identity(12, 12)};
    EXPECT_NEAR(std::abs(observable(rho, identity) - Complex(1.0)), 0.0, 1e-14);
    const OperatorMatrix small{OperatorLabel::Custom, Matrix::Identity(4, 4)};
    EXPECT_INVALID(observable(rho, small), "operator");
}

TEST(DensityMatrix, ValidateRejectsBadMatrices) {
    DensityMatrix rho{Matrix::Identity(3, 3)};
    EXPECT_INVALID(rho.validate(), "rho");
    rho.entries = Matrix::Identity(3, 3) / 3.0;
    EXPECT_NO_THROW(rho.validate());
    rho.entries(0, 1) = Complex(0.1, 0.0);
    EXPECT_INVALID(rho.validate(), "rho");
    rho.entries = Matrix::Zero(2, 2);
    rho.entries(0, 0) = 1.5;
    rho.entries(1, 1) = -0.5;
    EXPECT_INVALID(rho.validate(), "rho");
}

TEST(Evolve, ClosedEvolutionKeepsPurityAndTrace) {
    const auto ops = build_operators(harmonic(), 1.0, 24);
    const auto rho0 = initial_density(ops, CoherentState{Complex(0.7, 0.0)});
    KuboOptions options;
    options.record_every = 100;
    const auto run = evolve_noisy(rho0, ops, drude(0.0, 1.0), silent(0.01, 629), options);
    EXPECT_LT(run.max_trace_error, 1e-10);
    for (const auto& s : run.samples) EXPECT_NEAR(s.purity, 1.0, 1e-8);
    EXPECT_EQ(run.samples.size(), 7u);
    EXPECT_EQ(run.snapshots.size(), run.samples.size());
    EXPECT_EQ(run.mean_x.size(), 629u);
    // After a full period the coherent state returns.
    EXPECT_NEAR(run.mean_x.back(), std::sqrt(2.0) * 0.7 * std::cos(6.28), 1e-6);
    EXPECT_FALSE(run.leakage_alarm);
}

TEST(Evolve, FirstMomentsFollowClassicalPath) {
    const auto system = harmonic();
    const auto bath = drude(0.01, 0.5);
    const double dt = 0.002;
    const int n = 2001;
    EnsembleSpec e;
    e.master_seed = 5;
    e.n_realizations = 1;
    const auto noise = NoiseSampler(bath, dt, n, e).sample(0);
    const auto ops = build_operators(system, 1.0, 24);
    const Complex alpha(1.0, 0.5);
    KuboOptions options;
    options.record_every = 500;
    const auto run = evolve_noisy(initial_density(ops, CoherentState{alpha}), ops, bath, noise, options);
    const auto path = integrate(system, bath, noise, std::sqrt(2.0) * alpha.real(), std::sqrt(2.0) * alpha.imag());
    double err = 0.0, scale = 0.0;
    for (std::size_t j = 0; j < path.size(); ++j) {
        err = std::max(err, std::abs(run.mean_x[j] - path.x[j]));
        scale = std::max(scale, std::abs(path.x[j]));
    }
    EXPECT_LT(err / scale, 1e-4);
}

TEST(Evolve, LeakageIsFlagged) {
    const auto ops = build_operators(harmonic(), 1.0, 8);
    const auto rho0 = initial_density(ops, CoherentState{Complex(2.0, 0.0)});
    const auto run = evolve_noisy(rho0, ops, drude(0.0, 1.0), silent(0.01, 50));
    EXPECT_TRUE(run.leakage_alarm);
    EXPECT_GT(run.max_leak, 1e-3);
}

TEST(Evolve, RejectsBadInputs) {
    const auto ops = build_operators(harmonic(), 1.0, 8);
    const auto rho0 = initial_density(ops, GroundState{});
    const auto other = build_operators(harmonic(), 1.0, 10);
    EXPECT_INVALID(evolve_noisy(rho0, other, drude(0.1, 1.0), silent(0.01, 10)), "rho0");
    EXPECT_INVALID(evolve_noisy(rho0, ops, drude(0.1, 1.0), silent(0.01, 1)), "noise");
    KuboOptions options;
    options.substeps = 0;
    EXPECT_INVALID(evolve_noisy(rho0, ops, drude(0.1, 1.0), silent(0.01, 10), options), "solver.substeps");
    options.substeps = 1;
    options.record_every = 0;
    EXPECT_INVALID(evolve_noisy(rho0, ops, drude(0.1, 1.0), silent(0.01, 10), options), "solver.record_every");
    auto bad = drude(-1.0, 1.0);
    EXPECT_INVALID(evolve_noisy(rho0, ops, bad, silent(0.01, 10)), "bath.gamma");
}

TEST(KuboEnsemble, IdenticalRunsGiveZeroError) {
    const auto ops = build_operators(harmonic(), 1.0, 12);
    const auto rho0 = initial_density(ops, CoherentState{Complex(0.5, 0.0)});
    KuboOptions options;
    options.record_every = 10;
    const auto run = evolve_noisy(rho0, ops, drude(0.2, 1.0), silent(0.01, 101), options);
    const std::vector<KuboRun> runs(3, run);
    const auto ensemble = average_ensemble(runs);
    ASSERT_EQ(ensemble.times.size(), run.samples.size());
    for (std::size_t k = 0; k < ensemble.times.size(); ++k) {
        EXPECT_NEAR(ensemble.x[k].mean, run.samples[k].mean_x, 1e-15);
        EXPECT_LT(ensemble.x[k].standard_error, 1e-15);
        EXPECT_LT(ensemble.p2[k].standard_error, 1e-15);
    }
    const auto avg = windowed_average(runs, KuboObservable::MeanX2, 0.0, 1.0);
    EXPECT_LT(avg.standard_error, 1e-15);
    EXPECT_INVALID(windowed_average(runs, KuboObservable::MeanX, 5.0, 6.0), "window");
}

TEST(KuboEnsemble, MeanDensityIsHermitianWithUnitTrace) {
    const auto system = harmonic();
    const auto bath = drude(0.05, 1.0);
    EnsembleSpec e;
    e.master_seed = 9;
    e.n_realizations = 4;
    const NoiseSampler sampler(bath, 0.005, 401, e);
    const auto ops = build_operators(system, 1.0, 16);
    const auto rho0 = initial_density(ops, GroundState{});
    KuboOptions options;
    options.record_every = 100;
    std::vector<KuboRun> runs;
    for (int i = 0; i < 4; ++i) runs.push_back(evolve_noisy(rho0, ops, bath, sampler.sample(i), options));
    const auto ensemble = average_ensemble(runs);
    ASSERT_FALSE(ensemble.mean.empty());
    for (const auto& rho : ensemble.mean) {
        EXPECT_LT(hermiticity(rho.entries), 1e-12);
        EXPECT_NEAR(rho.entries.trace().real(), 1.0, 1e-10);
    }
    EXPECT_EQ(ensemble.realizations, 4u);
    EXPECT_INVALID(average_ensemble(std::vector<KuboRun>{runs[0]}), "runs");
}

TEST(KuboEnsemble, CsvHeaders) {
    const auto ops = build_operators(harmonic(), 1.0, 8);
    const auto run = evolve_noisy(initial_density(ops, GroundState{}), ops, drude(0.0, 1.0), silent(0.1, 3));
    std::stringstream out;
    write_kubo_run_csv(out, run);
    std::string line;
    std::getline(out, line);
    EXPECT_EQ(line, "t,re_mean_x,re_mean_p,mean_x2,mean_p2,trace,purity,min_eig,leak");
    std::stringstream ens;
    write_kubo_ensemble_csv(ens, average_ensemble(std::vector<KuboRun>{run, run}));
    std::getline(ens, line);
    EXPECT_EQ(line, "t,re_mean_x,se_x,re_mean_p,se_p,mean_x2,se_x2,mean_p2,se_p2,trace,purity,min_eig,leak");
}
