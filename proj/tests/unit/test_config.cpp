#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qbm_tools/config.hpp"

using namespace qbm;
using namespace qbm::tools;

TEST(Config, ParsesKeyValuesWithComments) {
    std::istringstream in("# header\nbath.gamma = 0.5  # inline\n\n  system.potential=free\nbath.gamma = 0.25\n");
    const auto values = parse_key_values(in);
    ASSERT_EQ(values.size(), 2u);
    EXPECT_EQ(values.at("bath.gamma"), "0.25");
    EXPECT_EQ(values.at("system.potential"), "free");
}

TEST(Config, MalformedLineNamesConfig) {
    std::istringstream in("bath.gamma = 1\nnot a pair\n");
    try {
        parse_key_values(in);
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_EQ(e.field(), "config");
        EXPECT_NE(std::string(e.what()).find('2'), std::string::npos);
    }
}

TEST(Config, AppliesTypedValues) {
    KeyValues values{{"bath.cutoff", "hard"},        {"bath.cutoff_omega", "25"},
                     {"system.potential", "double_well"}, {"system.barrier", "2"},
                     {"system.x0", "1.5"},           {"ensemble.method", "spectral"},
                     {"solver.initial_state", "thermal"}, {"grid.n", "64"}};
    const auto config = apply_values(RunConfig{}, values);
    EXPECT_EQ(std::get<HardCutoff>(config.bath.cutoff).omega_c, 25.0);
    const auto& well = std::get<DoubleWellPotential>(config.system.potential);
    EXPECT_EQ(well.barrier, 2.0);
    EXPECT_EQ(well.x0, 1.5);
    EXPECT_EQ(config.ensemble.method, SamplingMethod::SpectralSynthesis);
    EXPECT_EQ(config.grid.n, 64);
    EXPECT_TRUE(std::holds_alternative<ThermalState>(config.initial_state()));
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
    EXPECT_INVALID(apply_values(RunConfig{}, {{"bath.colour", "blue"}}), "bath.colour");
    EXPECT_INVALID(apply_values(RunConfig{}, {{"bath.gamma", "lots"}}), "bath.gamma");
    EXPECT_INVALID(apply_values(RunConfig{}, {{"grid.n", "3.5"}}), "grid.n");
    EXPECT_INVALID(apply_values(RunConfig{}, {{"bath.cutoff", "smooth"}}), "bath.cutoff");
    EXPECT_INVALID(parse_override("bath.gamma"), "set");
    const auto [key, value] = parse_override("system.mass=2");
    EXPECT_EQ(key, "system.mass");
    EXPECT_EQ(value, "2");
}

TEST(Config, ValidateNamesNestedFields) {
    auto config = apply_values(RunConfig{}, {{"system.mass", "-1"}});
    EXPECT_INVALID(config.validate(), "system.mass");
    config = apply_values(RunConfig{}, {{"grid.dt", "0"}});
    EXPECT_INVALID(config.validate(), "grid.dt");
    config = apply_values(RunConfig{}, {{"solver.dim", "2"}});
    EXPECT_INVALID(config.validate(), "solver.dim");
}

TEST(Config, ResolvedOutputRoundTrips) {
    const auto config = apply_values(RunConfig{}, {{"bath.gamma", "0.123456789012345"}, {"bath.cutoff", "hard"},
                                                   {"solver.alpha_im", "-0.25"}, {"output_dir", "somewhere"}});
    std::stringstream out;
    write_resolved(out, config);
    const auto back = apply_values(RunConfig{}, parse_key_values(out));
    EXPECT_EQ(back.bath.gamma, config.bath.gamma);
    EXPECT_TRUE(std::holds_alternative<HardCutoff>(back.bath.cutoff));
    EXPECT_EQ(back.solver.alpha, config.solver.alpha);
    EXPECT_EQ(back.output_dir, config.output_dir);
    std::stringstream again;
    write_resolved(again, back);
    EXPECT_EQ(again.str(), out.str());
}
