// verify.hpp: the acceptance suite: ten numbered checks against independent
// oracles, each writing its evidence as CSV
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace qbm::tools {

struct CriterionResult {
    int id{0};
    std::string name;
    bool passed{false};
    std::string measured;   // what was observed
    std::string threshold;  // what was required
};

struct VerifyOptions {
    std::uint64_t master_seed{20240601};
    int threads{1};
    std::filesystem::path output_dir{"qbm_out"};
    // Criterion 10 reruns checks 1-9 into a second directory and compares bytes.
    bool check_reproducibility{true};
};

// Checks 1-9, CSV evidence under `dir`. Deterministic for a given seed,
// independent of the thread count.
std::vector<CriterionResult> run_checks(std::uint64_t master_seed, int threads, const std::filesystem::path& dir);

// Files under a and b with identical relative paths and bytes.
bool identical_trees(const std::filesystem::path& a, const std::filesystem::path& b, std::string& detail);

// Full suite: output_dir/verify, plus output_dir/verify_repeat for criterion 10.
// Writes verify/summary.csv.
std::vector<CriterionResult> run_verify(const VerifyOptions& options);

// One `[PASS]`/`[FAIL]` line per criterion.
void print_results(std::ostream& out, const std::vector<CriterionResult>& results);

bool all_passed(const std::vector<CriterionResult>& results);

} // namespace qbm::tools
