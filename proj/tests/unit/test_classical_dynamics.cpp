#include <cmath>
#include <random>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qbm/classical_dynamics.hpp"

using namespace qbm;

namespace {

SystemSpec harmonic(double omega0 = 1.0, double mass = 1.0) {
    SystemSpec s;
    s.mass = mass;
    s.potential = HarmonicPotential{omega0};
    return s;
}

BathSpec bath(double gamma, double temperature = 1.0, double omega_c = 20.0) {
    BathSpec b;
    b.gamma = gamma;
    b.temperature = temperature;
    b.cutoff = HardCutoff{omega_c};
    return b;
}

NoisePath silent(double dt, std::size_t n) { return NoisePath{dt, std::vector<double>(n, 0.0)}; }

std::vector<Trajectory> hot_ensemble(const SystemSpec& system, double gamma, double kT, int count, double window,
                                     std::size_t& burn_in) {
    const auto b = bath(gamma, kT, 20.0);
    const double dt = oracle::pi / 20.0;
    burn_in = default_burn_in(system, b, dt);
    const int n = static_cast<int>(burn_in) + static_cast<int>(window / dt);
    EnsembleSpec e;
    e.master_seed = 77;
    e.n_realizations = count;
    const auto paths = NoiseSampler(b, dt, n, e).sample_all(1);
    std::vector<Trajectory> out;
    for (const auto& p : paths) out.push_back(integrate(system, b, p, 0.0, 0.0));
    return out;
}

} // namespace

TEST(Potential, ForcesMatchDefinitions) {
    SystemSpec free;
    free.potential = FreePotential{};
    EXPECT_EQ(potential_force(free, 3.0), 0.0);
    EXPECT_DOUBLE_EQ(potential_force(harmonic(2.0, 3.0), 0.5), -3.0 * 4.0 * 0.5);
    SystemSpec quartic;
    quartic.potential = QuarticPotential{1.0, 1.0};
    EXPECT_DOUBLE_EQ(potential_force(quartic, 0.5), -1.5);
    SystemSpec well;
    well.potential = DoubleWellPotential{2.0, 1.5};
    const double x = 0.7;
    const double u = x / 1.5;
    EXPECT_NEAR(potential_force(well, x), -4.0 * 2.0 * u * (u * u - 1.0) / 1.5, 1e-14);
    EXPECT_EQ(potential_force(well, 1.5), 0.0);
}

TEST(Potential, ForceIsMinusEnergyGradient) {
    SystemSpec well;
    well.potential = DoubleWellPotential{1.3, 0.8};
    const double h = 1e-5;
    for (double x : {-1.1, -0.2, 0.4, 1.7}) {
        const double fd = -(potential_energy(well, x + h) - potential_energy(well, x - h)) / (2 * h);
        EXPECT_NEAR(potential_force(well, x), fd, 1e-6);
    }
}

TEST(Potential, NamesAndLinearity) {
    EXPECT_EQ(potential_name(FreePotential{}), "free");
    EXPECT_EQ(potential_name(HarmonicPotential{}), "harmonic");
    EXPECT_EQ(potential_name(QuarticPotential{}), "quartic");
    EXPECT_EQ(potential_name(DoubleWellPotential{}), "double_well");
    EXPECT_TRUE(harmonic().is_linear());
    EXPECT_EQ(harmonic(2.5).linear_frequency(), 2.5);
    SystemSpec quartic;
    quartic.potential = QuarticPotential{};
    EXPECT_FALSE(quartic.is_linear());
    EXPECT_INVALID(quartic.linear_frequency(), "system.potential");
}

TEST(Potential, RejectsInvalidSystems) {
    EXPECT_INVALID(harmonic(1.0, -1.0).validate(), "system.mass");
    EXPECT_INVALID(harmonic(0.0).validate(), "system.omega0");
    SystemSpec well;
    well.potential = DoubleWellPotential{1.0, 0.0};
    EXPECT_INVALID(well.validate(), "system.x0");
    EXPECT_INVALID(potential_force(harmonic(), NAN), "x");
}

TEST(Integrate, ConservativeOscillatorIsSecondOrder) {
    const double x0 = 1.0, p0 = 0.5;
    auto max_error = [&](double dt, std::size_t steps, double& drift) {
        const auto t = integrate(harmonic(), bath(0.0), silent(dt, steps + 1), x0, p0);
        double err = 0.0;
        const double e0 = 0.5 * p0 * p0 + 0.5 * x0 * x0;
        drift = 0.0;
        for (std::size_t j = 0; j < t.size(); ++j) {
            const double time = t.time(j);
            err = std::max(err, std::abs(t.x[j] - (x0 * std::cos(time) + p0 * std::sin(time))));
            drift = std::max(drift, std::abs(0.5 * t.p[j] * t.p[j] + 0.5 * t.x[j] * t.x[j] - e0) / e0);
        }
        return err;
    };
    double drift = 0.0;
    const double coarse = max_error(0.01, 10000, drift);
    EXPECT_LT(drift, 1e-4);
    double unused = 0.0;
    const double fine = max_error(0.005, 20000, unused);
    EXPECT_NEAR(coarse / fine, 4.0, 0.2);
}

TEST(Integrate, DampedEnvelopeDecaysAtHalfFriction) {
    const double gamma = 0.2;
    const double dt = 0.01;
    const std::size_t steps = 5000;  // five decay times 2m/γ
    const auto t = integrate(harmonic(), bath(gamma), silent(dt, steps + 1), 1.0, 0.0);
    const double wd = std::sqrt(1.0 - gamma * gamma / 4.0);
    for (std::size_t j = 0; j < t.size(); j += 10) {
        const double time = t.time(j);
        const double envelope = std::exp(-gamma * time / 2.0);
        const double exact = envelope * (std::cos(wd * time) + gamma / (2.0 * wd) * std::sin(wd * time));
        ASSERT_LE(std::abs(t.x[j] - exact), 0.01 * envelope) << "t " << time;
    }
}

TEST(Integrate, MatchesRungeKuttaOracleForDrivenFreeParticle) {
    // Constant force F on a damped free particle: v(t) = F/γ (1 − e^{−γt/m}).
    SystemSpec free;
    free.potential = FreePotential{};
    NoisePath force{0.01, std::vector<double>(501, 2.0)};
    const auto t = integrate(free, bath(0.5), force, 0.0, 0.0);
    EXPECT_NEAR(t.p.back(), 2.0 / 0.5 * (1.0 - std::exp(-0.5 * 5.0)), 1e-4);
}

TEST(Integrate, OverflowReportsTheStep) {
    SystemSpec runaway;
    runaway.potential = QuarticPotential{0.0, -1.0};
    try {
        integrate(runaway, bath(0.0), silent(0.1, 1000), 10.0, 0.0);
        FAIL() << "expected NumericalAlarm";
    } catch (const NumericalAlarm& e) {
        EXPECT_GT(e.step(), 0);
        EXPECT_LT(e.step(), 1000);
    }
}

TEST(Integrate, RejectsBadInputs) {
    EXPECT_INVALID(integrate(harmonic(), bath(1.0), silent(0.1, 1), 0.0, 0.0), "noise");
    EXPECT_INVALID(integrate(harmonic(), bath(1.0), silent(0.1, 4), NAN, 0.0), "x0");
    EXPECT_INVALID(integrate(harmonic(), bath(1.0), silent(0.1, 4), 0.0, INFINITY), "p0");
    EXPECT_INVALID(integrate(harmonic(1.0, 0.0), bath(1.0), silent(0.1, 4), 0.0, 0.0), "system.mass");
}

TEST(Ensemble, HighTemperatureEquipartitionAgreesWithWhiteNoiseReference) {
    const double kT = 2000.0, gamma = 0.2;
    std::size_t burn_in = 0;
    const auto trajectories = hot_ensemble(harmonic(), gamma, kT, 300, 400.0, burn_in);
    const auto report = ensemble_statistics(trajectories, burn_in);
    EXPECT_NEAR(report.avg_x2.mean / kT, 1.0, 0.05);
    EXPECT_NEAR(report.avg_p2.mean / kT, 1.0, 0.05);

    // Euler–Maruyama with white noise of strength 2γkT.
    std::mt19937_64 engine(31);
    std::normal_distribution<double> normal;
    const double dt = 0.005;
    const int burn = static_cast<int>(50.0 / dt), window = static_cast<int>(400.0 / dt);
    double sum_x2 = 0.0;
    for (int r = 0; r < 100; ++r) {
        double x = 0.0, p = 0.0;
        for (int j = 0; j < burn + window; ++j) {
            const double kick = std::sqrt(2.0 * gamma * kT * dt) * normal(engine);
            const double px = p;
            p += (-x - gamma * p) * dt + kick;
            x += px * dt;
            if (j >= burn) sum_x2 += x * x;
        }
    }
    const double reference = sum_x2 / (100.0 * window);
    EXPECT_NEAR(report.avg_x2.mean / reference, 1.0, 0.05);
}

TEST(Ensemble, FreeParticleMomentumVarianceIsMkT) {
    SystemSpec free;
    free.mass = 2.0;
    free.potential = FreePotential{};
    std::size_t burn_in = 0;
    const auto trajectories = hot_ensemble(free, 1.0, 500.0, 200, 100.0, burn_in);
    const auto report = ensemble_statistics(trajectories, burn_in);
    EXPECT_NEAR(report.avg_p2.mean / (2.0 * 500.0), 1.0, 0.05);
}

TEST(Ensemble, SymmetricDoubleWellHasZeroMeanPosition) {
    SystemSpec well;
    well.potential = DoubleWellPotential{1.0, 1.0};
    auto b = bath(1.0, 0.5);
    b.cutoff = DrudeCutoff{10.0};
    EnsembleSpec e;
    e.master_seed = 8;
    e.n_realizations = 200;
    const auto paths = NoiseSampler(b, 0.05, 1000, e).sample_all(1);
    std::vector<Trajectory> trajectories;
    for (std::size_t i = 0; i < paths.size(); ++i)
        trajectories.push_back(integrate(well, b, paths[i], i % 2 ? 1.0 : -1.0, 0.0));
    const auto report = ensemble_statistics(trajectories, 200);
    EXPECT_LE(std::abs(report.avg_x.mean), 5.0 * report.avg_x.standard_error);
}

TEST(Ensemble, IdenticalTrajectoriesHaveZeroErrors) {
    const auto t = integrate(harmonic(), bath(0.3), silent(0.05, 100), 1.0, 0.0);
    const std::vector<Trajectory> copies(4, t);
    const auto report = ensemble_statistics(copies, 10);
    for (std::size_t j = 0; j < t.size(); ++j) {
        EXPECT_EQ(report.x.mean[j], t.x[j]);
        EXPECT_EQ(report.x.standard_error[j], 0.0);
        EXPECT_EQ(report.p2.standard_error[j], 0.0);
    }
    EXPECT_EQ(report.avg_x2.standard_error, 0.0);
    EXPECT_EQ(report.realizations, 4u);
}

TEST(Ensemble, RejectsInconsistentInput) {
    const auto a = integrate(harmonic(), bath(0.3), silent(0.05, 100), 1.0, 0.0);
    const auto b = integrate(harmonic(), bath(0.3), silent(0.05, 50), 1.0, 0.0);
    EXPECT_INVALID(ensemble_statistics(std::vector<Trajectory>{a, b}, 0), "trajectories");
    EXPECT_INVALID(ensemble_statistics(std::vector<Trajectory>{a}, 0), "trajectories");
    EXPECT_INVALID(ensemble_statistics(std::vector<Trajectory>{a, a}, 100), "burn_in");
}

TEST(Ensemble, DefaultBurnInIsTenRelaxationTimes) {
    EXPECT_EQ(default_burn_in(harmonic(1.0, 2.0), bath(0.5), 0.1), 400u);
    EXPECT_EQ(default_burn_in(harmonic(), bath(0.0), 0.1), 0u);
}

TEST(Ensemble, CsvHeaders) {
    const auto t = integrate(harmonic(), bath(0.3), silent(0.05, 5), 1.0, 0.0);
    std::stringstream out;
    write_trajectory_csv(out, t);
    std::string line;
    std::getline(out, line);
    EXPECT_EQ(line, "t,x,p");
    const auto report = ensemble_statistics(std::vector<Trajectory>{t, t}, 0);
    std::stringstream m;
    write_moments_csv(m, report);
    std::getline(m, line);
    EXPECT_EQ(line, "t,mean_x,se_x,mean_p,se_p,mean_x2,se_x2,mean_p2,se_p2");
}
