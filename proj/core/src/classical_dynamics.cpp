#include "qbm/classical_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "qbm/csv.hpp"
#include "qbm/error.hpp"

namespace qbm {

Trajectory integrate(const SystemSpec& system, const BathSpec& bath, const NoisePath& noise, double x0,
                     double p0) {
    system.validate();
    bath.validate();
    require(noise.size() >= 2 && noise.dt > 0.0, "noise", "path needs >= 2 points and dt > 0");
    require(std::isfinite(x0), "x0", "must be finite");
    require(std::isfinite(p0), "p0", "must be finite");

    const double m = system.mass;
    const double friction = bath.gamma / m;
    const double dt = noise.dt;
    const auto coeffs = potential_coefficients(system);
    auto force = [&](double x) {
        return -(coeffs[1] + x * (2.0 * coeffs[2] + x * (3.0 * coeffs[3] + x * 4.0 * coeffs[4])));
    };

    Trajectory traj;
    traj.dt = dt;
    traj.realization_index = noise.realization_index;
    traj.x.resize(noise.size());
    traj.p.resize(noise.size());
    traj.x[0] = x0;
    traj.p[0] = p0;

    double x = x0;
    double p = p0;
    for (std::size_t n = 0; n + 1 < noise.size(); ++n) {
        const double k1x = p / m;
        const double k1p = force(x) - friction * p + noise.values[n];
        const double xp = x + dt * k1x;
        const double pp = p + dt * k1p;
        const double k2x = pp / m;
        const double k2p = force(xp) - friction * pp + noise.values[n + 1];
        x += 0.5 * dt * (k1x + k2x);
        p += 0.5 * dt * (k1p + k2p);
        if (!std::isfinite(x) || !std::isfinite(p))
            throw NumericalAlarm("classical integration overflow", static_cast<long>(n + 1));
        traj.x[n + 1] = x;
        traj.p[n + 1] = p;
    }
    return traj;
}

namespace {

struct Accumulator {
    double sum{0.0};
    double sum_sq{0.0};
    void add(double v) {
        sum += v;
        sum_sq += v * v;
    }
    MeanWithError finish(double count) const {
        const double mean = sum / count;
        const double var = count > 1.0 ? std::max(0.0, (sum_sq - count * mean * mean) / (count - 1.0)) : 0.0;
        return {mean, std::sqrt(var / count)};
    }
};

void resize(MomentSeries& s, std::size_t n) {
    s.mean.resize(n);
    s.standard_error.resize(n);
}

} // namespace

MomentsReport ensemble_statistics(std::span<const Trajectory> trajectories, std::size_t burn_in) {
    require(trajectories.size() >= 2, "trajectories", "need at least 2 trajectories");
    const std::size_t length = trajectories.front().size();
    const double dt = trajectories.front().dt;
    for (const auto& t : trajectories)
        if (t.size() != length || t.dt != dt) throw ValidationError("trajectories", "heterogeneous grids");
    require(burn_in < length, "burn_in", "must be shorter than the trajectory");

    MomentsReport report;
    report.dt = dt;
    report.burn_in = burn_in;
    report.realizations = trajectories.size();
    for (auto* s : {&report.x, &report.p, &report.x2, &report.p2, &report.xp}) resize(*s, length);

    const double count = static_cast<double>(trajectories.size());
    for (std::size_t j = 0; j < length; ++j) {
        Accumulator ax, ap, ax2, ap2, axp;
        for (const auto& t : trajectories) {
            const double x = t.x[j];
            const double p = t.p[j];
            ax.add(x);
            ap.add(p);
            ax2.add(x * x);
            ap2.add(p * p);
            axp.add(x * p);
        }
        const std::pair<MomentSeries*, const Accumulator*> pairs[] = {
            {&report.x, &ax}, {&report.p, &ap}, {&report.x2, &ax2}, {&report.p2, &ap2}, {&report.xp, &axp}};
        for (auto [series, acc] : pairs) {
            const auto r = acc->finish(count);
            series->mean[j] = r.mean;
            series->standard_error[j] = r.standard_error;
        }
    }

    Accumulator tx, tp, tx2, tp2, txp;
    const double window = static_cast<double>(length - burn_in);
    for (const auto& t : trajectories) {
        double sx = 0.0, sp = 0.0, sx2 = 0.0, sp2 = 0.0, sxp = 0.0;
        for (std::size_t j = burn_in; j < length; ++j) {
            sx += t.x[j];
            sp += t.p[j];
            sx2 += t.x[j] * t.x[j];
            sp2 += t.p[j] * t.p[j];
            sxp += t.x[j] * t.p[j];
        }
        tx.add(sx / window);
        tp.add(sp / window);
        tx2.add(sx2 / window);
        tp2.add(sp2 / window);
        txp.add(sxp / window);
    }
    report.avg_x = tx.finish(count);
    report.avg_p = tp.finish(count);
    report.avg_x2 = tx2.finish(count);
    report.avg_p2 = tp2.finish(count);
    report.avg_xp = txp.finish(count);
    return report;
}

std::size_t default_burn_in(const SystemSpec& system, const BathSpec& bath, double dt) {
    if (bath.gamma <= 0.0) return 0;
    return static_cast<std::size_t>(std::ceil(10.0 * system.mass / bath.gamma / dt));
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory) {
    csv::write_header(out, "t,x,p");
    for (std::size_t j = 0; j < trajectory.size(); ++j)
        csv::write_row(out, {trajectory.time(j), trajectory.x[j], trajectory.p[j]});
}

void write_moments_csv(std::ostream& out, const MomentsReport& report) {
    csv::write_header(out, "t,mean_x,se_x,mean_p,se_p,mean_x2,se_x2,mean_p2,se_p2");
    for (std::size_t j = 0; j < report.x.mean.size(); ++j)
        csv::write_row(out, {static_cast<double>(j) * report.dt, report.x.mean[j], report.x.standard_error[j],
                             report.p.mean[j], report.p.standard_error[j], report.x2.mean[j],
                             report.x2.standard_error[j], report.p2.mean[j], report.p2.standard_error[j]});
}

} // namespace qbm
