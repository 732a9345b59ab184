#include "qbm_tools/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "qbm/csv.hpp"
#include "qbm/error.hpp"

namespace qbm::tools {
namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double to_double(const std::string& key, std::string_view text) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw ValidationError(key, "expected a number, got '" + std::string(text) + "'");
    return v;
}

template <class Int>
Int to_integer(const std::string& key, std::string_view text) {
    Int v{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw ValidationError(key, "expected an integer, got '" + std::string(text) + "'");
    return v;
}

const char* method_name(SamplingMethod m) {
    return m == SamplingMethod::CirculantEmbedding ? "circulant" : "spectral";
}

struct PotentialParams {
    std::string name;
    double omega0{1.0}, a{1.0}, b{1.0}, barrier{1.0}, x0{1.0};
};

PotentialParams unpack(const Potential& potential) {
    PotentialParams p;
    p.name = std::string(potential_name(potential));
    if (auto* h = std::get_if<HarmonicPotential>(&potential)) p.omega0 = h->omega0;
    if (auto* q = std::get_if<QuarticPotential>(&potential)) {
        p.a = q->a;
        p.b = q->b;
    }
    if (auto* d = std::get_if<DoubleWellPotential>(&potential)) {
        p.barrier = d->barrier;
        p.x0 = d->x0;
    }
    return p;
}

Potential pack(const PotentialParams& p) {
    if (p.name == "free") return FreePotential{};
    if (p.name == "harmonic") return HarmonicPotential{p.omega0};
    if (p.name == "quartic") return QuarticPotential{p.a, p.b};
    if (p.name == "double_well") return DoubleWellPotential{p.barrier, p.x0};
    throw ValidationError("system.potential", "unknown potential '" + p.name + "'");
}

} // namespace

void RunConfig::validate() const {
    bath.validate();
    system.validate();
    require(std::isfinite(grid.dt) && grid.dt > 0.0, "grid.dt", "must be > 0");
    require(grid.n >= 2, "grid.n", "must be >= 2");
    ensemble.validate();
    require(solver.dim >= 4, "solver.dim", "must be >= 4");
    require(std::isfinite(solver.basis_omega) && solver.basis_omega > 0.0, "solver.basis_omega", "must be > 0");
    require(solver.initial_state == "ground" || solver.initial_state == "coherent" ||
                solver.initial_state == "thermal",
            "solver.initial_state", "must be ground, coherent or thermal");
    require(std::isfinite(solver.alpha.real()) && std::isfinite(solver.alpha.imag()), "solver.alpha_re",
            "must be finite");
    require(solver.substeps >= 1, "solver.substeps", "must be >= 1");
    require(solver.record_every >= 1, "solver.record_every", "must be >= 1");
    require(std::isfinite(classical.x0), "classical.x0", "must be finite");
    require(std::isfinite(classical.p0), "classical.p0", "must be finite");
    require(commutator.modes >= 1, "commutator.modes", "must be >= 1");
    require(std::isfinite(commutator.t_max) && commutator.t_max > 0.0, "commutator.t_max", "must be > 0");
    require(commutator.n_times >= 2, "commutator.n_times", "must be >= 2");
    require(commutator.levels >= 1, "commutator.levels", "must be >= 1");
    require(!output_dir.empty(), "output_dir", "must not be empty");
}

InitialState RunConfig::initial_state() const {
    if (solver.initial_state == "ground") return GroundState{};
    if (solver.initial_state == "thermal") return ThermalState{bath.temperature, bath.boltzmann};
    return CoherentState{solver.alpha};
}

KeyValues parse_key_values(std::istream& in) {
    KeyValues values;
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        std::string_view view = line;
        if (auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
        view = trim(view);
        if (view.empty()) continue;
        const auto eq = view.find('=');
        if (eq == std::string_view::npos)
            throw ValidationError("config", "line " + std::to_string(number) + ": expected 'key = value'");
        const auto key = trim(view.substr(0, eq));
        const auto value = trim(view.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ValidationError("config", "line " + std::to_string(number) + ": empty key or value");
        values[std::string(key)] = std::string(value);
    }
    return values;
}

KeyValues load_key_values(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ValidationError("config", "cannot read " + file.string());
    return parse_key_values(in);
}

std::pair<std::string, std::string> parse_override(std::string_view text) {
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) throw ValidationError("set", "expected key=value, got '" + std::string(text) + "'");
    const auto key = trim(text.substr(0, eq));
    const auto value = trim(text.substr(eq + 1));
    if (key.empty() || value.empty()) throw ValidationError("set", "empty key or value in '" + std::string(text) + "'");
    return {std::string(key), std::string(value)};
}

RunConfig apply_values(RunConfig c, const KeyValues& values) {
    PotentialParams pot = unpack(c.system.potential);
    std::string cutoff_kind = std::holds_alternative<HardCutoff>(c.bath.cutoff) ? "hard" : "drude";
    double cutoff_omega = c.bath.cutoff_frequency();

    for (const auto& [key, text] : values) {
        auto num = [&] { return to_double(key, text); };
        auto integer = [&] { return to_integer<int>(key, text); };
        if (key == "bath.gamma") c.bath.gamma = num();
        else if (key == "bath.temperature") c.bath.temperature = num();
        else if (key == "bath.hbar") c.bath.hbar = num();
        else if (key == "bath.boltzmann") c.bath.boltzmann = num();
        else if (key == "bath.cutoff") {
            if (text != "hard" && text != "drude") throw ValidationError(key, "must be hard or drude");
            cutoff_kind = text;
        } else if (key == "bath.cutoff_omega") cutoff_omega = num();
        else if (key == "bath.quadrature_nodes") c.bath.quadrature_nodes = integer();
        else if (key == "system.mass") c.system.mass = num();
        else if (key == "system.potential") pot.name = text;
        else if (key == "system.omega0") pot.omega0 = num();
        else if (key == "system.a") pot.a = num();
        else if (key == "system.b") pot.b = num();
        else if (key == "system.barrier") pot.barrier = num();
        else if (key == "system.x0") pot.x0 = num();
        else if (key == "grid.dt") c.grid.dt = num();
        else if (key == "grid.n") c.grid.n = integer();
        else if (key == "ensemble.master_seed") c.ensemble.master_seed = to_integer<std::uint64_t>(key, text);
        else if (key == "ensemble.n_realizations") c.ensemble.n_realizations = integer();
        else if (key == "ensemble.method") {
            if (text == "circulant") c.ensemble.method = SamplingMethod::CirculantEmbedding;
            else if (text == "spectral") c.ensemble.method = SamplingMethod::SpectralSynthesis;
            else throw ValidationError(key, "must be circulant or spectral");
        } else if (key == "ensemble.clip_budget") c.ensemble.clip_budget = num();
        else if (key == "ensemble.spectral_modes") c.ensemble.spectral_modes = integer();
        else if (key == "solver.dim") c.solver.dim = integer();
        else if (key == "solver.basis_omega") c.solver.basis_omega = num();
        else if (key == "solver.initial_state") c.solver.initial_state = text;
        else if (key == "solver.alpha_re") c.solver.alpha.real(num());
        else if (key == "solver.alpha_im") c.solver.alpha.imag(num());
        else if (key == "solver.substeps") c.solver.substeps = integer();
        else if (key == "solver.record_every") c.solver.record_every = integer();
        else if (key == "classical.x0") c.classical.x0 = num();
        else if (key == "classical.p0") c.classical.p0 = num();
        else if (key == "classical.burn_in") c.classical.burn_in = integer();
        else if (key == "commutator.modes") c.commutator.modes = integer();
        else if (key == "commutator.t_max") c.commutator.t_max = num();
        else if (key == "commutator.n_times") c.commutator.n_times = integer();
        else if (key == "commutator.levels") c.commutator.levels = integer();
        else if (key == "output_dir") c.output_dir = text;
        else throw ValidationError(key, "unknown configuration key");
    }

    if (cutoff_kind == "hard") c.bath.cutoff = HardCutoff{cutoff_omega};
    else c.bath.cutoff = DrudeCutoff{cutoff_omega};
    c.system.potential = pack(pot);
    return c;
}

void write_resolved(std::ostream& out, const RunConfig& c) {
    auto line = [&](std::string_view key, const std::string& value) { out << key << " = " << value << '\n'; };
    auto num = [&](std::string_view key, double v) { line(key, csv::format(v)); };
    const bool hard = std::holds_alternative<HardCutoff>(c.bath.cutoff);
    num("bath.gamma", c.bath.gamma);
    num("bath.temperature", c.bath.temperature);
    num("bath.hbar", c.bath.hbar);
    num("bath.boltzmann", c.bath.boltzmann);
    line("bath.cutoff", hard ? "hard" : "drude");
    num("bath.cutoff_omega", c.bath.cutoff_frequency());
    line("bath.quadrature_nodes", std::to_string(c.bath.quadrature_nodes));
    const auto pot = unpack(c.system.potential);
    num("system.mass", c.system.mass);
    line("system.potential", pot.name);
    if (pot.name == "harmonic") num("system.omega0", pot.omega0);
    if (pot.name == "quartic") {
        num("system.a", pot.a);
        num("system.b", pot.b);
    }
    if (pot.name == "double_well") {
        num("system.barrier", pot.barrier);
        num("system.x0", pot.x0);
    }
    num("grid.dt", c.grid.dt);
    line("grid.n", std::to_string(c.grid.n));
    line("ensemble.master_seed", std::to_string(c.ensemble.master_seed));
    line("ensemble.n_realizations", std::to_string(c.ensemble.n_realizations));
    line("ensemble.method", method_name(c.ensemble.method));
    num("ensemble.clip_budget", c.ensemble.clip_budget);
    line("ensemble.spectral_modes", std::to_string(c.ensemble.spectral_modes));
    line("solver.dim", std::to_string(c.solver.dim));
    num("solver.basis_omega", c.solver.basis_omega);
    line("solver.initial_state", c.solver.initial_state);
    num("solver.alpha_re", c.solver.alpha.real());
    num("solver.alpha_im", c.solver.alpha.imag());
    line("solver.substeps", std::to_string(c.solver.substeps));
    line("solver.record_every", std::to_string(c.solver.record_every));
    num("classical.x0", c.classical.x0);
    num("classical.p0", c.classical.p0);
    line("classical.burn_in", std::to_string(c.classical.burn_in));
    line("commutator.modes", std::to_string(c.commutator.modes));
    num("commutator.t_max", c.commutator.t_max);
    line("commutator.n_times", std::to_string(c.commutator.n_times));
    line("commutator.levels", std::to_string(c.commutator.levels));
    line("output_dir", c.output_dir.string());
}

} // namespace qbm::tools
