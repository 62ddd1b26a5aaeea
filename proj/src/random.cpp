#include "itolab/random.hpp"

#include <algorithm>
#include <cmath>

#include "itolab/error.hpp"

namespace itolab {

namespace {

constexpr double default_horizon = 2.0;

double uniform(std::mt19937_64& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

std::size_t pick(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

bool coin(std::mt19937_64& rng, double p) { return std::bernoulli_distribution(p)(rng); }

std::vector<double> positive_weights(std::mt19937_64& rng, std::size_t n) {
    std::vector<double> w(n);
    for (auto& x : w) x = uniform(rng, 0.5, 1.5);
    return w;
}

HVector random_vector(std::mt19937_64& rng, std::size_t d, double scale) {
    HVector x(d);
    for (std::size_t j = 0; j < d; ++j) x[j] = uniform(rng, -scale, scale);
    return x;
}

// Sorted distinct times in (0, horizon).
std::vector<double> random_times(std::mt19937_64& rng, std::size_t count, double horizon) {
    std::vector<double> times;
    while (times.size() < count) {
        double t = uniform(rng, 0.0, horizon);
        if (t > 0.0 && std::find(times.begin(), times.end(), t) == times.end()) times.push_back(t);
    }
    std::sort(times.begin(), times.end());
    return times;
}

std::vector<double> merge_unique(std::vector<double> a, const std::vector<double>& b) {
    a.insert(a.end(), b.begin(), b.end());
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    return a;
}

} // namespace

std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream) {
    return std::mt19937_64(split_seed(seed, stream));
}

SpaceFamily random_space_family(std::mt19937_64& rng, const RandomScenarioSpec& spec) {
    if (spec.max_dim == 0 || spec.max_spaces == 0 || spec.exponents.empty()) {
        throw Error(ErrorCode::invalid_argument, "random family needs positive dimension, space count and exponents");
    }
    const std::size_t d = pick(rng, 1, spec.max_dim);
    const std::size_t m = pick(rng, 1, spec.max_spaces);
    std::vector<SpaceDescriptor> spaces;
    for (std::size_t i = 0; i < m; ++i) {
        double p = spec.exponents[pick(rng, 0, spec.exponents.size() - 1)];
        if (spec.with_sobolev && coin(rng, 0.4)) {
            spaces.push_back(w1p_space(p, positive_weights(rng, d), uniform(rng, 0.5, 2.0), positive_weights(rng, d + 1)));
        } else {
            spaces.push_back(lp_space(p, positive_weights(rng, d)));
        }
    }
    return SpaceFamily(positive_weights(rng, d), std::move(spaces));
}

IncreasingDriver random_driver(std::mt19937_64& rng, std::size_t max_jumps, double horizon, double min_jump,
                               bool with_density) {
    const std::size_t K = max_jumps == 0 ? 0 : pick(rng, 1, max_jumps);
    auto times = random_times(rng, K, horizon);

    // Raw sizes spread over a bounded ratio so every jump stays above min_jump
    // of the total after normalisation.
    const double spread = K == 0 ? 1.0 : std::max(1.0, 1.0 / (min_jump * static_cast<double>(K)));
    std::vector<double> raw(K);
    for (auto& s : raw) s = std::exp(uniform(rng, 0.0, std::log(spread)));

    std::vector<DensitySegment> density;
    double density_raw = 0.0;
    if (with_density) {
        auto ends = random_times(rng, 2 * pick(rng, 1, 2), horizon);
        double total_raw = 0.0;
        for (double s : raw) total_raw += s;
        for (std::size_t k = 0; k + 1 < ends.size(); k += 2) {
            double slope = uniform(rng, 0.2, 1.0);
            density.push_back({ends[k], ends[k + 1], slope});
            density_raw += slope * (ends[k + 1] - ends[k]);
        }
        // Scale the density part to carry a comparable share of the mass.
        const double want = K == 0 ? 1.0 : total_raw * uniform(rng, 0.3, 1.0);
        for (auto& seg : density) seg.slope *= want / density_raw;
        density_raw = want;
    }

    double total = density_raw;
    for (double s : raw) total += s;
    const double mass = coin(rng, 0.2) ? 1.0 : uniform(rng, 0.3, 1.0);
    const double factor = total > 0.0 ? mass / total : 0.0;

    std::vector<DriverJump> jumps;
    for (std::size_t k = 0; k < K; ++k) jumps.push_back({times[k], raw[k] * factor});
    for (auto& seg : density) seg.slope *= factor;
    return IncreasingDriver(std::move(jumps), std::move(density));
}

StepFunction<double> random_step(std::mt19937_64& rng, std::size_t max_pieces, double horizon, Side side) {
    const std::size_t pieces = pick(rng, 1, std::max<std::size_t>(1, max_pieces));
    auto breaks = random_times(rng, pieces - 1, horizon);
    std::vector<double> values(pieces);
    for (auto& v : values) v = uniform(rng, -2.0, 2.0);
    return StepFunction<double>(std::move(breaks), std::move(values), side);
}

Scenario random_scenario(const RandomScenarioSpec& spec) {
    auto rng = make_engine(spec.seed);
    SpaceFamily spaces = random_space_family(rng, spec);
    const std::size_t d = spaces.dim();
    const double T = default_horizon;
    IncreasingDriver driver = random_driver(rng, spec.max_jumps, T, spec.min_jump, spec.with_density);

    std::vector<double> jump_times;
    for (const auto& j : driver.jumps()) jump_times.push_back(j.time);

    // Noise events: some shared with driver jumps, some on their own.
    std::vector<double> shared;
    for (double t : jump_times) {
        if (coin(rng, 0.4)) shared.push_back(t);
    }
    auto noise_times = merge_unique(shared, random_times(rng, pick(rng, 0, 10), T));
    HVector h0 = random_vector(rng, d, 1.0);
    std::vector<HVector> noise_values;
    HVector running = h0;
    for (std::size_t k = 0; k < noise_times.size(); ++k) {
        running += random_vector(rng, d, 1.0);
        noise_values.push_back(running);
    }
    MartingalePath noise(h0, noise_times, std::move(noise_values));

    std::vector<DualStepProcess> drifts;
    for (std::size_t i = 0; i < spaces.count(); ++i) {
        std::vector<double> breaks;
        for (double t : jump_times) {
            if (coin(rng, 0.3)) breaks.push_back(t);
        }
        breaks = merge_unique(breaks, random_times(rng, pick(rng, 0, 4), T));
        std::vector<HVector> values;
        std::vector<double> eta;
        for (std::size_t k = 0; k <= breaks.size(); ++k) {
            HVector w = random_vector(rng, d, 2.0);
            // Any dominator at or above the dual norm is admissible; some slack is
            // added on purpose.
            eta.push_back(dual_norm_lp_part(w, i, spaces) * (1.0 + (coin(rng, 0.5) ? uniform(rng, 0.0, 0.5) : 0.0)));
            values.push_back(std::move(w));
        }
        drifts.emplace_back(i, std::move(breaks), std::move(values), std::move(eta), spaces);
    }
    return Scenario(std::move(spaces), std::move(driver), std::move(noise), std::move(drifts), T);
}

namespace {

Scenario scalar_scenario(IncreasingDriver driver, double horizon) {
    SpaceFamily spaces({1.0}, {lp_space(2.0, {1.0})});
    MartingalePath noise(HVector{0.0}, {}, {});
    std::vector<DualStepProcess> drifts;
    drifts.push_back(DualStepProcess::with_default_dominator(0, {}, {HVector{1.0}}, spaces));
    return Scenario(std::move(spaces), std::move(driver), std::move(noise), std::move(drifts), horizon);
}

} // namespace

Scenario one_jump_scenario() { return scalar_scenario(IncreasingDriver({{1.0, 1.0}}), 2.0); }

Scenario mixed_driver_scenario() {
    return scalar_scenario(IncreasingDriver({{0.5, 0.5}}, {{0.0, 1.0, 0.5}}), 1.0);
}

} // namespace itolab
