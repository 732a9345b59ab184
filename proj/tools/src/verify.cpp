#include "qbm_tools/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "qbm/bath_kernel.hpp"
#include "qbm/classical_dynamics.hpp"
#include "qbm/csv.hpp"
#include "qbm/heisenberg_commutator.hpp"
#include "qbm/kubo_solver.hpp"
#include "qbm/noise_sampler.hpp"
#include "qbm/parallel.hpp"
#include "qbm/rng.hpp"

namespace fs = std::filesystem;

namespace qbm::tools {
namespace {

constexpr double kPi = std::numbers::pi;

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

std::string fixed(double v, int digits = 3) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::uint64_t sub_seed(std::uint64_t master, std::uint64_t criterion) { return stream_seed(master, 1000 + criterion); }

// Adaptive Gauss–Kronrod reference for the noise kernel, written from the
// defining integral without touching the library's spectral helpers.
double oracle_kernel(double gamma, double kT, const Cutoff& cutoff, double lag) {
    const bool hard = std::holds_alternative<HardCutoff>(cutoff);
    const double wc = hard ? std::get<HardCutoff>(cutoff).omega_c : std::get<DrudeCutoff>(cutoff).omega_d;
    const double upper = hard ? wc : 40.0 * wc;
    auto f = [&](double w) {
        const double x = w / (2.0 * kT);
        const double w_coth = x == 0.0 ? 2.0 * kT : w / std::tanh(x);
        const double window = hard ? 1.0 : 1.0 / (1.0 + (w / wc) * (w / wc));
        return w_coth * window * std::cos(w * lag);
    };
    // Split at every half period so each piece is smooth and non-oscillatory.
    const double period = lag > 0.0 ? kPi / lag : upper;
    const int pieces = std::max(1, static_cast<int>(std::ceil(upper / period)));
    double sum = 0.0;
    for (int k = 0; k < pieces; ++k) {
        const double a = upper * k / pieces;
        const double b = upper * (k + 1) / pieces;
        sum += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 6, 1e-14);
    }
    return gamma / kPi * sum;
}

// Closed form of -(2γħ/π) ∫₀^Ω ω sin(ωτ) dω.
double closed_form_antisymmetric(double gamma, double omega, double tau) {
    const double s = std::sin(omega * tau);
    const double c = std::cos(omega * tau);
    return -2.0 * gamma / kPi * (s - omega * tau * c) / (tau * tau);
}

CriterionResult kernel_correctness(const fs::path& dir) {
    const double dt = 0.05;
    const int lags = 64;
    auto out = csv::open(dir / "kernel_oracle.csv");
    csv::write_header(out, "cutoff,temperature,lag,K_T,oracle,rel_err");
    double worst = 0.0;
    const Cutoff cutoffs[] = {HardCutoff{50.0}, DrudeCutoff{10.0}};
    for (const auto& cutoff : cutoffs) {
        for (double temperature : {0.5, 2.0, 20.0}) {
            BathSpec bath;
            bath.gamma = 1.0;
            bath.temperature = temperature;
            bath.cutoff = cutoff;
            const auto grid = tabulate_kernel(bath, dt, lags);
            for (int j = 0; j < lags; ++j) {
                const double ref = oracle_kernel(1.0, temperature, cutoff, grid.lag(j));
                const double rel = std::abs(grid.values[j] - ref) / std::abs(ref);
                worst = std::max(worst, rel);
                out << (std::holds_alternative<HardCutoff>(cutoff) ? "hard" : "drude") << ','
                    << csv::format(temperature) << ',' << csv::format(grid.lag(j)) << ','
                    << csv::format(grid.values[j]) << ',' << csv::format(ref) << ',' << csv::format(rel) << '\n';
            }
        }
    }
    return {1, "kernel matches adaptive quadrature oracle", worst <= 1e-8, "max rel err " + sci(worst),
            "<= 1e-8"};
}

CriterionResult classical_limit(const fs::path& dir) {
    const double omega_c = 10.0;
    const double width = 8.0 / omega_c;
    auto relative_error = [&](double kT) {
        BathSpec bath;
        bath.gamma = 1.0;
        bath.temperature = kT;
        bath.cutoff = HardCutoff{omega_c};
        const double action = smeared_gaussian_action(bath, width);
        const double white = 2.0 * kT * bath.gamma;
        return std::pair{action, std::abs(action - white) / white};
    };
    const double kT = 1000.0;  // ħω_c / kT = 0.01
    const auto [a1, e1] = relative_error(kT);
    const auto [a2, e2] = relative_error(10.0 * kT);
    const double ratio = e1 / e2;
    auto out = csv::open(dir / "classical_limit.csv");
    csv::write_header(out, "temperature,action,white_noise,rel_err");
    csv::write_row(out, {kT, a1, 2.0 * kT, e1});
    csv::write_row(out, {10.0 * kT, a2, 20.0 * kT, e2});
    const bool ok = e1 <= 0.02 && ratio >= 90.0 && ratio <= 110.0;
    return {2, "smeared kernel tends to 2kT gamma", ok,
            "rel err " + sci(e1) + ", shrink factor " + fixed(ratio, 1), "<= 2%, shrink in [90, 110]"};
}

CriterionResult noise_fidelity(std::uint64_t seed, int threads, const fs::path& dir) {
    BathSpec bath;
    bath.gamma = 1.0;
    bath.temperature = 2.0;
    bath.cutoff = HardCutoff{50.0};
    const double dt = 0.05;
    const int n = 256;
    const int max_lag = static_cast<int>(std::lround(10.0 / dt));

    EnsembleSpec circ;
    circ.master_seed = sub_seed(seed, 3);
    circ.n_realizations = 10000;
    const auto circ_paths = NoiseSampler(bath, dt, n, circ).sample_all(threads);
    const auto c = empirical_covariance(circ_paths, max_lag);

    EnsembleSpec spec = circ;
    spec.master_seed = sub_seed(seed, 30);
    spec.n_realizations = 2000;
    spec.method = SamplingMethod::SpectralSynthesis;
    const auto spec_paths = NoiseSampler(bath, dt, n, spec).sample_all(threads);
    const auto s = empirical_covariance(spec_paths, max_lag);

    const auto kernel = tabulate_kernel(bath, dt, max_lag + 1);
    auto out = csv::open(dir / "noise_covariance.csv");
    csv::write_header(out, "lag,K_T,circulant,se_circulant,spectral,se_spectral");
    double worst_kernel = 0.0;
    double worst_cross = 0.0;
    for (int j = 0; j <= max_lag; ++j) {
        worst_kernel = std::max(worst_kernel, std::abs(c.mean[j] - kernel.values[j]) / c.standard_error[j]);
        const double combined = std::hypot(c.standard_error[j], s.standard_error[j]);
        worst_cross = std::max(worst_cross, std::abs(c.mean[j] - s.mean[j]) / combined);
        csv::write_row(out, {kernel.lag(j), kernel.values[j], c.mean[j], c.standard_error[j], s.mean[j],
                             s.standard_error[j]});
    }
    const bool ok = worst_kernel <= 5.0 && worst_cross <= 5.0;
    return {3, "sampled covariance matches kernel", ok,
            "max |dev|/SE " + fixed(worst_kernel, 2) + " (kernel), " + fixed(worst_cross, 2) + " (backends)",
            "<= 5 SE"};
}

struct EquilibriumResult {
    CriterionResult result;
    MeanWithError x2_normalized;
};

EquilibriumResult classical_equilibrium(std::uint64_t seed, int threads, const fs::path& dir) {
    BathSpec bath;
    bath.gamma = 0.2;
    bath.temperature = 2000.0;
    bath.cutoff = HardCutoff{20.0};
    SystemSpec system;
    system.mass = 1.0;
    system.potential = HarmonicPotential{1.0};
    // Sampling at the Nyquist rate of the cutoff makes the grid noise white.
    const double dt = kPi / 20.0;
    const std::size_t burn_in = default_burn_in(system, bath, dt);
    const int n = static_cast<int>(burn_in) + static_cast<int>(std::ceil(400.0 / dt));

    EnsembleSpec ensemble;
    ensemble.master_seed = sub_seed(seed, 4);
    ensemble.n_realizations = 1000;
    const auto paths = NoiseSampler(bath, dt, n, ensemble).sample_all(threads);
    std::vector<Trajectory> trajectories(paths.size());
    parallel_for(paths.size(), threads,
                 [&](std::size_t i) { trajectories[i] = integrate(system, bath, paths[i], 0.0, 0.0); });
    const auto report = ensemble_statistics(trajectories, burn_in);

    const double kT = bath.thermal_energy();
    const double x2_target = kT / (system.mass * 1.0);
    const double p2_target = system.mass * kT;
    const double ex = std::abs(report.avg_x2.mean / x2_target - 1.0);
    const double ep = std::abs(report.avg_p2.mean / p2_target - 1.0);
    auto out = csv::open(dir / "classical_equilibrium.csv");
    csv::write_header(out, "quantity,mean,se,target,rel_err");
    csv::write_row(out, {0.0, report.avg_x2.mean, report.avg_x2.standard_error, x2_target, ex});
    csv::write_row(out, {1.0, report.avg_p2.mean, report.avg_p2.standard_error, p2_target, ep});
    const bool ok = ex <= 0.05 && ep <= 0.05;
    EquilibriumResult r;
    r.result = {4, "classical ensemble reaches equipartition", ok,
                "<x2> rel err " + sci(ex) + ", <p2> rel err " + sci(ep), "<= 5%"};
    r.x2_normalized = {report.avg_x2.mean / x2_target, report.avg_x2.standard_error / x2_target};
    return r;
}

CriterionResult kubo_structure(std::uint64_t seed, int threads, const fs::path& dir) {
    SystemSpec system;
    system.potential = HarmonicPotential{1.0};
    BathSpec bath;
    bath.gamma = 0.01;
    bath.temperature = 1.0;
    bath.cutoff = DrudeCutoff{10.0};
    const double dt = 0.002;
    const int steps = 10000;
    const auto ops = build_operators(system, 1.0, 32);
    const auto rho0 = initial_density(ops, CoherentState{{1.0, 0.0}});

    KuboOptions options;
    options.record_every = 500;
    options.store_snapshots = false;

    EnsembleSpec ensemble;
    ensemble.master_seed = sub_seed(seed, 5);
    ensemble.n_realizations = 4;
    const auto paths = NoiseSampler(bath, dt, steps + 1, ensemble).sample_all(threads);
    std::vector<KuboRun> runs(paths.size());
    parallel_for(paths.size(), threads,
                 [&](std::size_t i) { runs[i] = evolve_noisy(rho0, ops, bath, paths[i], options); });

    double trace_err = 0.0;
    double herm_err = 0.0;
    auto out = csv::open(dir / "kubo_structure.csv");
    csv::write_header(out, "realization,max_trace_error,max_hermiticity_error");
    for (const auto& r : runs) {
        trace_err = std::max(trace_err, r.max_trace_error);
        herm_err = std::max(herm_err, r.max_hermiticity_error);
        csv::write_row(out, {static_cast<double>(r.realization_index), r.max_trace_error, r.max_hermiticity_error});
    }

    BathSpec closed = bath;
    closed.gamma = 0.0;
    NoisePath silent;
    silent.dt = dt;
    silent.values.assign(steps + 1, 0.0);
    const auto pure = evolve_noisy(rho0, ops, closed, silent, options);
    double purity_err = 0.0;
    for (const auto& s : pure.samples) purity_err = std::max(purity_err, std::abs(s.purity - 1.0));
    csv::write_row(out, {-1.0, pure.max_trace_error, purity_err});

    const bool ok = trace_err <= 1e-8 && herm_err <= 1e-10 && purity_err <= 1e-8;
    return {5, "Kubo evolution keeps trace, Hermiticity, purity", ok,
            "trace " + sci(trace_err) + ", hermiticity " + sci(herm_err) + ", purity " + sci(purity_err),
            "trace <= 1e-8, hermiticity <= 1e-10, purity <= 1e-8"};
}

CriterionResult ehrenfest(std::uint64_t seed, int threads, const fs::path& dir) {
    SystemSpec system;
    system.potential = HarmonicPotential{1.0};
    BathSpec bath;
    bath.gamma = 0.01;
    bath.temperature = 1.0;
    bath.cutoff = DrudeCutoff{10.0};
    const double dt = 0.002;
    const int n = static_cast<int>(std::ceil(10.0 * 2.0 * kPi / dt)) + 1;
    const auto ops = build_operators(system, 1.0, 24);
    const std::complex<double> alpha{1.0, 0.5};
    const auto rho0 = initial_density(ops, CoherentState{alpha});
    const double x0 = std::sqrt(2.0) * alpha.real();
    const double p0 = std::sqrt(2.0) * alpha.imag();

    KuboOptions options;
    options.record_every = 500;
    options.store_snapshots = false;

    EnsembleSpec ensemble;
    ensemble.master_seed = sub_seed(seed, 6);
    ensemble.n_realizations = 3;
    const auto paths = NoiseSampler(bath, dt, n, ensemble).sample_all(threads);
    std::vector<double> errors(paths.size());
    parallel_for(paths.size(), threads, [&](std::size_t i) {
        const auto run = evolve_noisy(rho0, ops, bath, paths[i], options);
        const auto traj = integrate(system, bath, paths[i], x0, p0);
        double scale = 0.0;
        double diff = 0.0;
        for (std::size_t j = 0; j < traj.size(); ++j) {
            scale = std::max({scale, std::abs(traj.x[j]), std::abs(traj.p[j])});
            diff = std::max({diff, std::abs(run.mean_x[j] - traj.x[j]), std::abs(run.mean_p[j] - traj.p[j])});
        }
        errors[i] = diff / scale;
    });
    auto out = csv::open(dir / "ehrenfest.csv");
    csv::write_header(out, "realization,rel_sup_err");
    for (std::size_t i = 0; i < errors.size(); ++i) csv::write_row(out, {static_cast<double>(i), errors[i]});
    const double worst = *std::max_element(errors.begin(), errors.end());
    return {6, "Kubo first moments follow the classical path", worst <= 1e-4, "max rel sup err " + sci(worst),
            "<= 1e-4"};
}

CriterionResult cross_formalism(std::uint64_t seed, int threads, const fs::path& dir,
                                const MeanWithError& classical) {
    SystemSpec system;
    system.potential = HarmonicPotential{1.0};
    BathSpec bath;
    bath.gamma = 1.0;
    bath.temperature = 4.0;
    bath.cutoff = DrudeCutoff{10.0};
    // A noisy density matrix contracts in phase space without diffusing; past
    // roughly ln(2kT/ħω) relaxation times it stops being a state, so the
    // comparison window sits inside the first relaxation time.
    const double relax = system.mass / bath.gamma;
    const double t_begin = 0.5 * relax;
    const double t_end = relax;
    const double dt = 0.005;
    const int n = static_cast<int>(std::ceil(t_end / dt)) + 1;
    const auto ops = build_operators(system, 1.0, 56);
    const auto rho0 = initial_density(ops, ThermalState{bath.temperature, bath.boltzmann});

    KuboOptions options;
    options.substeps = 2;
    options.record_every = 10;
    options.store_snapshots = false;

    EnsembleSpec ensemble;
    ensemble.master_seed = sub_seed(seed, 7);
    ensemble.n_realizations = 400;
    const auto paths = NoiseSampler(bath, dt, n, ensemble).sample_all(threads);
    std::vector<KuboRun> runs(paths.size());
    parallel_for(paths.size(), threads,
                 [&](std::size_t i) { runs[i] = evolve_noisy(rho0, ops, bath, paths[i], options); });
    const auto x2 = windowed_average(runs, KuboObservable::MeanX2, t_begin, t_end);
    const double target = bath.thermal_energy();
    const MeanWithError kubo{x2.mean / target, x2.standard_error / target};
    const double combined = std::hypot(kubo.standard_error, classical.standard_error);
    const double z = std::abs(kubo.mean - classical.mean) / combined;
    double leak = 0.0;
    for (const auto& r : runs) leak = std::max(leak, r.max_leak);
    const bool sane = std::isfinite(z) && leak <= 1e-2;

    auto out = csv::open(dir / "cross_formalism.csv");
    csv::write_header(out, "kubo_x2_norm,kubo_se,classical_x2_norm,classical_se,z,max_leak");
    csv::write_row(out, {kubo.mean, kubo.standard_error, classical.mean, classical.standard_error, z, leak});
    return {7, "Kubo and classical equilibria agree", sane && z <= 3.0,
            "kubo " + fixed(kubo.mean, 4) + " vs classical " + fixed(classical.mean, 4) + ", " + fixed(z, 2) +
                " combined SE, leak " + sci(leak),
            "<= 3 combined SE, leak <= 1e-2"};
}

CriterionResult unitarity(const fs::path& dir) {
    BathSpec bath;
    bath.gamma = 1.0;
    bath.temperature = 2.0;
    bath.cutoff = HardCutoff{200.0};
    const auto times = uniform_times(5.0, 101);
    const int modes = 20000;

    auto out = csv::open(dir / "unitarity.csv");
    csv::write_header(out, "system,modes,sup_dev_quantum,sup_err_commutative");
    double worst_dev = 0.0;
    double worst_gain = std::numeric_limits<double>::infinity();
    double worst_commutative = 0.0;
    int index = 0;
    for (const Potential& potential : {Potential{FreePotential{}}, Potential{HarmonicPotential{1.0}}}) {
        SystemSpec system;
        system.potential = potential;
        const auto coarse = commutator_trace(system, bath, ModeBath::uniform(bath, modes), times);
        const auto fine = commutator_trace(system, bath, ModeBath::uniform(bath, 2 * modes), times);
        const auto commutative = commutator_trace_commutative(system, bath, times);
        double err = 0.0;
        for (std::size_t k = 0; k < times.size(); ++k)
            err = std::max(err, std::abs(commutative.values[k] - std::exp(-bath.gamma * times[k] / system.mass)));
        const double dev = coarse.sup_deviation_from_one();
        const double dev_fine = fine.sup_deviation_from_one();
        worst_dev = std::max(worst_dev, dev);
        worst_gain = std::min(worst_gain, dev / dev_fine);
        worst_commutative = std::max(worst_commutative, err);
        csv::write_row(out, {static_cast<double>(index), static_cast<double>(modes), dev, err});
        csv::write_row(out, {static_cast<double>(index), static_cast<double>(2 * modes), dev_fine, err});
        ++index;
    }
    const bool ok = worst_dev <= 1e-3 && worst_gain >= 2.0 && worst_commutative <= 1e-10;
    return {8, "quantum noise keeps [x,p] = i hbar, c-number noise does not", ok,
            "sup|C-1| " + sci(worst_dev) + ", gain per doubling " + fixed(worst_gain, 3) + ", commutative err " +
                sci(worst_commutative),
            "sup|C-1| <= 1e-3, gain >= 2, commutative <= 1e-10"};
}

CriterionResult fdt(const fs::path& dir) {
    BathSpec bath;
    bath.gamma = 1.0;
    bath.temperature = 2.0;
    bath.cutoff = HardCutoff{200.0};
    const double lag = 0.3;
    const double kernel = evaluate_kernel(bath, lag);

    auto out = csv::open(dir / "fdt.csv");
    csv::write_header(out, "modes,d_omega,mode_sum,K_T,rel_err");
    std::vector<double> spacing, error;
    for (int modes : {20000, 40000, 80000}) {
        const auto mb = ModeBath::uniform(bath, modes);
        const double sum = symmetric_noise_correlation(bath, mb, lag, 0.0);
        spacing.push_back(mb.d_omega);
        error.push_back(std::abs(sum - kernel) / std::abs(kernel));
        csv::write_row(out, {static_cast<double>(modes), mb.d_omega, sum, kernel, error.back()});
    }
    double order_lo = std::numeric_limits<double>::infinity();
    double order_hi = -order_lo;
    for (std::size_t k = 1; k < error.size(); ++k) {
        const double order = std::log(error[k - 1] / error[k]) / std::log(spacing[k - 1] / spacing[k]);
        order_lo = std::min(order_lo, order);
        order_hi = std::max(order_hi, order);
    }

    const auto gl = ModeBath::gauss_legendre(bath, bath.quadrature_nodes);
    auto anti = csv::open(dir / "fdt_antisymmetric.csv");
    csv::write_header(anti, "lag,mode_sum,closed_form,abs_err");
    double anti_err = 0.0;
    for (double tau : {0.05, 0.3, 1.0, 2.5}) {
        const double sum = antisymmetric_noise_commutator(bath, gl, tau, 0.0);
        const double exact = closed_form_antisymmetric(bath.gamma, 200.0, tau);
        anti_err = std::max(anti_err, std::abs(sum - exact) / std::max(1.0, std::abs(exact)));
        csv::write_row(anti, {tau, sum, exact, std::abs(sum - exact)});
    }
    const bool ok = order_lo >= 0.8 && order_hi <= 1.2 && anti_err <= 1e-10;
    return {9, "mode sums reproduce the fluctuation-dissipation pair", ok,
            "order in [" + fixed(order_lo) + ", " + fixed(order_hi) + "], antisymmetric err " + sci(anti_err),
            "order in [0.8, 1.2], antisymmetric <= 1e-10"};
}

void write_summary(const fs::path& file, const std::vector<CriterionResult>& results) {
    auto out = csv::open(file);
    csv::write_header(out, "criterion,passed,measured,threshold");
    for (const auto& r : results)
        out << r.id << ',' << (r.passed ? "pass" : "fail") << ",\"" << r.measured << "\",\"" << r.threshold << "\"\n";
}

std::vector<char> read_bytes(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

} // namespace

std::vector<CriterionResult> run_checks(std::uint64_t seed, int threads, const fs::path& dir) {
    fs::create_directories(dir);
    std::vector<CriterionResult> results;
    results.push_back(kernel_correctness(dir));
    results.push_back(classical_limit(dir));
    results.push_back(noise_fidelity(seed, threads, dir));
    const auto equilibrium = classical_equilibrium(seed, threads, dir);
    results.push_back(equilibrium.result);
    results.push_back(kubo_structure(seed, threads, dir));
    results.push_back(ehrenfest(seed, threads, dir));
    results.push_back(cross_formalism(seed, threads, dir, equilibrium.x2_normalized));
    results.push_back(unitarity(dir));
    results.push_back(fdt(dir));
    write_summary(dir / "checks.csv", results);
    return results;
}

bool identical_trees(const fs::path& a, const fs::path& b, std::string& detail) {
    std::vector<fs::path> files_a, files_b;
    for (const auto& e : fs::recursive_directory_iterator(a))
        if (e.is_regular_file()) files_a.push_back(fs::relative(e.path(), a));
    for (const auto& e : fs::recursive_directory_iterator(b))
        if (e.is_regular_file()) files_b.push_back(fs::relative(e.path(), b));
    std::sort(files_a.begin(), files_a.end());
    std::sort(files_b.begin(), files_b.end());
    if (files_a != files_b) {
        detail = "file sets differ";
        return false;
    }
    for (const auto& rel : files_a) {
        if (read_bytes(a / rel) != read_bytes(b / rel)) {
            detail = rel.string() + " differs";
            return false;
        }
    }
    detail = std::to_string(files_a.size()) + " files identical";
    return true;
}

std::vector<CriterionResult> run_verify(const VerifyOptions& options) {
    const fs::path dir = options.output_dir / "verify";
    fs::remove_all(dir);
    auto results = run_checks(options.master_seed, options.threads, dir);
    if (options.check_reproducibility) {
        const fs::path repeat = options.output_dir / "verify_repeat";
        fs::remove_all(repeat);
        run_checks(options.master_seed, options.threads, repeat);
        std::string detail;
        const bool same = identical_trees(dir, repeat, detail);
        results.push_back({10, "same seed gives bit-identical CSV", same, detail, "all files identical"});
    }
    write_summary(dir / "summary.csv", results);
    return results;
}

void print_results(std::ostream& out, const std::vector<CriterionResult>& results) {
    for (const auto& r : results) {
        out << (r.passed ? "[PASS] " : "[FAIL] ") << r.id << ". " << r.name << ": " << r.measured << " (required "
            << r.threshold << ")\n";
    }
}

bool all_passed(const std::vector<CriterionResult>& results) {
    return std::all_of(results.begin(), results.end(), [](const auto& r) { return r.passed; });
}

} // namespace qbm::tools
