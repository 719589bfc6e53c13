#pragma once

// Quenched random walk in a fixed environment, the observation stream it
// produces, and the independent corruption channel.

#include "rwre/environment.hpp"
#include "rwre/random.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace rwre {

struct Trajectory {
    std::vector<std::int64_t> positions; ///< X_0 = 0, X_1, ..., X_n
    std::uint64_t env_seed = 0;
    std::uint64_t walk_seed = 0;

    [[nodiscard]] std::size_t steps() const noexcept { return positions.empty() ? 0 : positions.size() - 1; }
};

/// Hidden quantities behind an observation stream; only kept for evaluation.
struct ObservationTruth {
    std::vector<double> chi_prime;
    std::vector<std::uint8_t> xi;
    std::vector<double> y;
    Trajectory trajectory;
};

/// The corrupted stream chi. Entry i carries time index start_index + i
/// (0 for Site; 1 for Bond, where no edge has been crossed at time 0).
struct ObservationRun {
    std::vector<double> chi;
    std::int64_t start_index = 0;
    std::optional<ObservationTruth> truth;
};

/// P(X_{n+1} = z+1 | X_n = z).
inline double step_prob_right(Environment& env, std::int64_t z) {
    if (env.spec().situation == Situation::Site) return env.value(z);
    const double right = env.value(z);
    const double left = env.value(z - 1);
    return right / (left + right);
}

/// n_steps steps of the walk started at 0; deterministic given (env, walk_seed).
inline Trajectory simulate(Environment& env, std::int64_t n_steps, std::uint64_t walk_seed) {
    RWRE_REQUIRE(n_steps >= 1, ErrorCode::PreconditionViolation, "simulate needs n_steps >= 1");
    Trajectory traj;
    traj.env_seed = env.seed();
    traj.walk_seed = walk_seed;
    traj.positions.resize(static_cast<std::size_t>(n_steps) + 1);
    SequentialStream rng(walk_seed);
    std::int64_t x = 0;
    traj.positions[0] = 0;
    for (std::int64_t k = 1; k <= n_steps; ++k) {
        x += rng.uniform() < step_prob_right(env, x) ? 1 : -1;
        traj.positions[static_cast<std::size_t>(k)] = x;
    }
    return traj;
}

/// chi'(n) = omega(X_n) for Site (n = 0..N) and omega(min(X_{n-1}, X_n)) for
/// Bond (n = 1..N).
inline std::vector<double> observe(const Trajectory& traj, Environment& env) {
    const auto& xs = traj.positions;
    std::vector<double> out;
    if (env.spec().situation == Situation::Site) {
        out.reserve(xs.size());
        for (auto x : xs) out.push_back(env.value(x));
    } else {
        RWRE_REQUIRE(xs.size() >= 2, ErrorCode::PreconditionViolation, "bond observations need at least one step");
        out.reserve(xs.size() - 1);
        for (std::size_t n = 1; n < xs.size(); ++n) out.push_back(env.value(std::min(xs[n - 1], xs[n])));
    }
    return out;
}

/// chi(n) = chi'(n) (1 - xi(n)) + Y(n) xi(n) with xi ~ Bernoulli(p), Y ~ nu i.i.d.
///
/// Three uniforms are consumed per entry (xi, nu component, nu value) whether or
/// not the entry is corrupted, so runs are aligned across values of p.
inline ObservationRun corrupt(std::span<const double> chi_prime, double p, const DistributionSpec& nu,
                              std::uint64_t noise_seed, bool keep_truth = false, std::int64_t start_index = 0) {
    RWRE_REQUIRE(p >= 0.0 && p < 1.0, ErrorCode::PreconditionViolation, "corruption probability must lie in [0,1)");
    validate_spec(nu);
    ObservationRun run;
    run.start_index = start_index;
    run.chi.resize(chi_prime.size());
    ObservationTruth truth;
    if (keep_truth) {
        truth.chi_prime.assign(chi_prime.begin(), chi_prime.end());
        truth.xi.resize(chi_prime.size());
        truth.y.resize(chi_prime.size());
    }
    SequentialStream rng(noise_seed);
    for (std::size_t n = 0; n < chi_prime.size(); ++n) {
        const bool flip = rng.uniform() < p;
        const double u1 = rng.uniform();
        const double u2 = rng.uniform();
        const double y = nu.sample(u1, u2);
        run.chi[n] = flip ? y : chi_prime[n];
        if (keep_truth) {
            truth.xi[n] = flip ? 1 : 0;
            truth.y[n] = y;
        }
    }
    if (keep_truth) run.truth = std::move(truth);
    return run;
}

/// simulate -> observe -> corrupt in one call. The trajectory is attached to the
/// truth record when keep_truth is set.
inline ObservationRun generate_run(Environment& env, std::int64_t n_steps, std::uint64_t walk_seed, double p,
                                   const DistributionSpec& nu, std::uint64_t noise_seed, bool keep_truth) {
    Trajectory traj = simulate(env, n_steps, walk_seed);
    const std::vector<double> chi_prime = observe(traj, env);
    const std::int64_t start = env.spec().situation == Situation::Site ? 0 : 1;
    ObservationRun run = corrupt(chi_prime, p, nu, noise_seed, keep_truth, start);
    if (keep_truth) run.truth->trajectory = std::move(traj);
    return run;
}

} // namespace rwre
