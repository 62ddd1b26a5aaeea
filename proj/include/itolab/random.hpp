#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "itolab/driver.hpp"
#include "itolab/scenario.hpp"
#include "itolab/spaces.hpp"

namespace itolab {

/// splitmix64 finaliser; derives independent stream seeds from (seed, stream).
std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

/// Engine for one (seed, stream) pair.
std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream = 0);

struct RandomScenarioSpec {
    std::uint64_t seed = 0;
    std::size_t max_jumps = 50;
    std::size_t max_spaces = 3;
    std::size_t max_dim = 4;
    std::vector<double> exponents{1.0, 1.5, 2.0, 3.0};
    /// Smallest driver jump relative to the total mass.
    double min_jump = 1e-3;
    /// Add up to two density segments to the driver.
    bool with_density = false;
    /// Draw W1p spaces as well as L_p spaces.
    bool with_sobolev = true;
};

/// Random weighted L_p / W1p family on R^d.
SpaceFamily random_space_family(std::mt19937_64& rng, const RandomScenarioSpec& spec);

/// Random driver with mass at most 1; jump times in (0, horizon).
IncreasingDriver random_driver(std::mt19937_64& rng, std::size_t max_jumps, double horizon, double min_jump,
                               bool with_density);

/// Random real step function with up to max_pieces pieces on (0, horizon).
StepFunction<double> random_step(std::mt19937_64& rng, std::size_t max_pieces, double horizon, Side side);

/// Random valid scenario: step drifts with admissible dominators, a pure-jump
/// noise path partly sharing the driver's jump times, driver mass at most 1.
Scenario random_scenario(const RandomScenarioSpec& spec);

/// H = V = R (weight 1, L_2), v* = 1, a single driver jump of size 1 at t = 1, h = 0.
Scenario one_jump_scenario();

/// H = V = R, v* = 1, h = 0; A has density 1/2 on (0, 1] and a jump 1/2 at t = 1/2.
Scenario mixed_driver_scenario();

} // namespace itolab
