#include "qbm_tools/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "qbm/classical_dynamics.hpp"
#include "qbm/csv.hpp"
#include "qbm/error.hpp"
#include "qbm/heisenberg_commutator.hpp"
#include "qbm/kubo_solver.hpp"
#include "qbm/noise_sampler.hpp"
#include "qbm/parallel.hpp"

namespace fs = std::filesystem;

namespace qbm::tools {
namespace {

std::string indexed(const char* stem, int index) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s_%05d.csv", stem, index);
    return buf;
}

std::vector<NoisePath> sample_ensemble(const RunConfig& c, int threads) {
    NoiseSampler sampler(c.bath, c.grid.dt, c.grid.n, c.ensemble);
    return sampler.sample_all(threads);
}

} // namespace

fs::path write_resolved_config(const RunConfig& config) {
    const fs::path file = config.output_dir / "resolved_config";
    auto out = csv::open(file);
    write_resolved(out, config);
    return file;
}

std::vector<fs::path> run_kernel(const RunConfig& c) {
    c.validate();
    const auto grid = tabulate_kernel(c.bath, c.grid.dt, c.grid.n);
    const fs::path file = c.output_dir / "kernel.csv";
    auto out = csv::open(file);
    write_kernel_csv(out, grid);
    return {file};
}

std::vector<fs::path> run_sample_noise(const RunConfig& c, int threads) {
    c.validate();
    NoiseSampler sampler(c.bath, c.grid.dt, c.grid.n, c.ensemble);
    const auto paths = sampler.sample_all(threads);
    std::vector<fs::path> written;
    for (const auto& path : paths) {
        const fs::path file = c.output_dir / "noise" / indexed("path", path.realization_index);
        auto out = csv::open(file);
        write_noise_csv(out, path);
        written.push_back(file);
    }
    if (paths.size() >= 2) {
        const int max_lag = c.grid.n / 2;
        const auto estimate = empirical_covariance(paths, max_lag);
        const auto kernel = tabulate_kernel(c.bath, c.grid.dt, max_lag + 1);
        const fs::path file = c.output_dir / "covariance.csv";
        auto out = csv::open(file);
        write_covariance_csv(out, estimate, kernel.values);
        written.push_back(file);
    }
    const fs::path summary = c.output_dir / "noise_summary.csv";
    auto out = csv::open(summary);
    out << "embedding_size,clipped_fraction,realizations\n"
        << sampler.embedding_size() << ',' << csv::format(sampler.clipped_fraction()) << ',' << paths.size() << '\n';
    written.push_back(summary);
    return written;
}

std::vector<fs::path> run_classical(const RunConfig& c, int threads) {
    c.validate();
    const auto paths = sample_ensemble(c, threads);
    std::vector<Trajectory> trajectories(paths.size());
    parallel_for(paths.size(), threads, [&](std::size_t i) {
        trajectories[i] = integrate(c.system, c.bath, paths[i], c.classical.x0, c.classical.p0);
    });
    std::vector<fs::path> written;
    for (const auto& t : trajectories) {
        const fs::path file = c.output_dir / "trajectories" / indexed("traj", t.realization_index);
        auto out = csv::open(file);
        write_trajectory_csv(out, t);
        written.push_back(file);
    }
    if (trajectories.size() >= 2) {
        const std::size_t burn_in =
            c.classical.burn_in >= 0 ? static_cast<std::size_t>(c.classical.burn_in)
                                     : default_burn_in(c.system, c.bath, c.grid.dt);
        require(burn_in < static_cast<std::size_t>(c.grid.n), "classical.burn_in",
                "burn-in of " + std::to_string(burn_in) + " steps does not fit in grid.n");
        const auto report = ensemble_statistics(trajectories, burn_in);
        const fs::path moments = c.output_dir / "moments.csv";
        auto out = csv::open(moments);
        write_moments_csv(out, report);
        written.push_back(moments);

        const fs::path summary = c.output_dir / "moments_summary.csv";
        auto sout = csv::open(summary);
        csv::write_header(sout, "quantity,mean,se");
        const std::pair<const char*, const MeanWithError*> rows[] = {{"x", &report.avg_x},
                                                                      {"p", &report.avg_p},
                                                                      {"x2", &report.avg_x2},
                                                                      {"p2", &report.avg_p2},
                                                                      {"xp", &report.avg_xp}};
        for (auto [name, value] : rows)
            sout << name << ',' << csv::format(value->mean) << ',' << csv::format(value->standard_error) << '\n';
        written.push_back(summary);
    }
    return written;
}

std::vector<fs::path> run_kubo(const RunConfig& c, int threads) {
    c.validate();
    const auto ops = build_operators(c.system, c.solver.basis_omega, c.solver.dim, c.bath.hbar);
    const auto rho0 = initial_density(ops, c.initial_state());
    const auto paths = sample_ensemble(c, threads);

    KuboOptions options;
    options.substeps = c.solver.substeps;
    options.record_every = static_cast<std::size_t>(c.solver.record_every);
    const double records = static_cast<double>(c.grid.n) / c.solver.record_every + 1.0;
    const double bytes = records * paths.size() * c.solver.dim * c.solver.dim * 16.0;
    options.store_snapshots = paths.size() >= 2 && bytes < 512.0 * 1024 * 1024;

    std::vector<KuboRun> runs(paths.size());
    parallel_for(paths.size(), threads, [&](std::size_t i) {
        runs[i] = evolve_noisy(rho0, ops, c.bath, paths[i], options);
    });

    std::vector<fs::path> written;
    for (const auto& run : runs) {
        const fs::path file = c.output_dir / "kubo" / indexed("run", run.realization_index);
        auto out = csv::open(file);
        write_kubo_run_csv(out, run);
        written.push_back(file);
    }
    if (runs.size() >= 2) {
        const auto ensemble = average_ensemble(runs);
        const fs::path file = c.output_dir / "kubo_ensemble.csv";
        auto out = csv::open(file);
        write_kubo_ensemble_csv(out, ensemble);
        written.push_back(file);
    }
    for (const auto& run : runs)
        if (run.leakage_alarm)
            throw NumericalAlarm("truncation leakage " + std::to_string(run.max_leak) + " in realization " +
                                 std::to_string(run.realization_index) + "; raise solver.dim");
    return written;
}

std::vector<fs::path> run_commutator(const RunConfig& c) {
    c.validate();
    const auto times = uniform_times(c.commutator.t_max, c.commutator.n_times);
    const auto modes = ModeBath::uniform(c.bath, c.commutator.modes);
    const CommutatorTrace traces[] = {commutator_trace(c.system, c.bath, modes, times),
                                      commutator_trace_commutative(c.system, c.bath, times)};
    std::vector<fs::path> written;
    const fs::path file = c.output_dir / "commutator.csv";
    {
        auto out = csv::open(file);
        write_commutator_csv(out, traces);
    }
    written.push_back(file);

    const auto rows = refinement_study(c.system, c.bath, c.commutator.modes, c.commutator.levels, times);
    const fs::path refinement = c.output_dir / "refinement.csv";
    auto out = csv::open(refinement);
    write_refinement_csv(out, rows);
    written.push_back(refinement);
    return written;
}

} // namespace qbm::tools
