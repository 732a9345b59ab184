// config.hpp: flat `key = value` run configuration shared by every subcommand
#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>

#include "qbm/bath_kernel.hpp"
#include "qbm/kubo_solver.hpp"
#include "qbm/noise_sampler.hpp"
#include "qbm/system.hpp"

namespace qbm::tools {

struct GridSpec {
    double dt{0.05};
    int n{256};
};

struct SolverSpec {
    int dim{32};
    double basis_omega{1.0};
    std::string initial_state{"coherent"};  // ground | coherent | thermal
    std::complex<double> alpha{1.0, 0.0};
    int substeps{1};
    int record_every{1};
};

struct ClassicalSpec {
    double x0{0.0};
    double p0{0.0};
    int burn_in{-1};  // grid steps; negative means ten relaxation times
};

struct CommutatorSpec {
    int modes{20000};
    double t_max{5.0};
    int n_times{101};
    int levels{3};
};

struct RunConfig {
    BathSpec bath;
    SystemSpec system;
    GridSpec grid;
    EnsembleSpec ensemble;
    SolverSpec solver;
    ClassicalSpec classical;
    CommutatorSpec commutator;
    std::filesystem::path output_dir{"qbm_out"};

    // Every nested invariant; throws ValidationError naming the dotted key.
    void validate() const;
    InitialState initial_state() const;
};

// Raw key/value pairs in file order of last assignment.
using KeyValues = std::map<std::string, std::string, std::less<>>;

// Parses `key = value` lines; `#` starts a comment. Throws ValidationError with
// field "config" (and the line number) on malformed lines.
KeyValues parse_key_values(std::istream& in);
KeyValues load_key_values(const std::filesystem::path& file);

// Splits `key=value`; throws ValidationError on a missing '='.
std::pair<std::string, std::string> parse_override(std::string_view text);

// Applies keys on top of `base`. Unknown keys and unparsable values throw
// ValidationError naming the key.
RunConfig apply_values(RunConfig base, const KeyValues& values);

// Every key with its resolved value, in a form parse_key_values reads back.
void write_resolved(std::ostream& out, const RunConfig& config);

} // namespace qbm::tools
