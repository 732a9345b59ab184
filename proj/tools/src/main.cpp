#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "qbm/error.hpp"
#include "qbm/parallel.hpp"
#include "qbm_tools/commands.hpp"
#include "qbm_tools/config.hpp"
#include "qbm_tools/verify.hpp"

namespace fs = std::filesystem;
using namespace qbm;
using namespace qbm::tools;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitAlarm = 2;

struct Flags {
    std::string config;
    std::vector<std::string> overrides;
    std::string out;
    std::uint64_t seed{0};
    bool seed_given{false};
    int threads{0};
};

RunConfig resolve(const Flags& flags) {
    KeyValues values;
    if (!flags.config.empty()) values = load_key_values(flags.config);
    for (const auto& text : flags.overrides) {
        auto [key, value] = parse_override(text);
        values[key] = value;
    }
    RunConfig config = apply_values(RunConfig{}, values);
    if (flags.seed_given) config.ensemble.master_seed = flags.seed;
    if (!flags.out.empty()) config.output_dir = flags.out;
    config.validate();
    return config;
}

void report(const std::vector<fs::path>& files) {
    for (const auto& f : files) std::cout << f.string() << '\n';
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"qbm: quantum Brownian motion experiments"};
    app.require_subcommand(1);
    Flags flags;
    app.add_option("--config", flags.config, "key = value configuration file")->check(CLI::ExistingFile);
    app.add_option("--set", flags.overrides, "override a configuration key (key=value), repeatable");
    app.add_option("--out", flags.out, "output directory (overrides output_dir)");
    app.add_option("--seed", flags.seed, "master seed (overrides ensemble.master_seed)");
    app.add_option("--threads", flags.threads, "worker threads (default: QBM_THREADS or 1)")
        ->check(CLI::PositiveNumber);

    const char* names[] = {"kernel", "sample-noise", "classical", "kubo", "commutator", "verify"};
    const char* help[] = {"tabulate the noise kernel", "sample noise paths and their covariance",
                          "classical Langevin ensemble", "noisy density-matrix ensemble",
                          "commutator traces and mode refinement", "run the acceptance checks"};
    for (int i = 0; i < 6; ++i) app.add_subcommand(names[i], help[i])->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }
    flags.seed_given = app.count("--seed") > 0;
    const std::string command = app.get_subcommands().front()->get_name();
    const int threads = flags.threads > 0 ? flags.threads : default_thread_count();

    try {
        const RunConfig config = resolve(flags);
        write_resolved_config(config);
        if (command == "kernel") report(run_kernel(config));
        else if (command == "sample-noise") report(run_sample_noise(config, threads));
        else if (command == "classical") report(run_classical(config, threads));
        else if (command == "kubo") report(run_kubo(config, threads));
        else if (command == "commutator") report(run_commutator(config));
        else {
            VerifyOptions options;
            options.master_seed = config.ensemble.master_seed;
            options.threads = threads;
            options.output_dir = config.output_dir;
            const auto results = run_verify(options);
            print_results(std::cout, results);
            return all_passed(results) ? EXIT_SUCCESS : EXIT_FAILURE;
        }
    } catch (const ValidationError& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kExitValidation;
    } catch (const NumericalAlarm& e) {
        std::cerr << "numerical alarm";
        if (e.step() >= 0) std::cerr << " at step " << e.step();
        std::cerr << ": " << e.what() << '\n';
        return kExitAlarm;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    }
    return EXIT_SUCCESS;
}
