#pragma once

#include "rwre/distribution.hpp"
#include "rwre/random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace rwre {

/// Lazily realized i.i.d. field omega(z), z in Z.
///
/// The value at site z depends only on (spec, seed, z), so any query order gives
/// the same field. Realized values are memoized in two growable arrays (z >= 0
/// and z < 0). An Environment is owned by a single replica; it is not safe to
/// query one instance from several threads.
class Environment {
public:
    Environment(DistributionSpec spec, std::uint64_t seed) : spec_(std::move(spec)), seed_(seed), stream_(seed) {
        validate_spec(spec_);
        support_ = spec_.support_interval();
    }

    [[nodiscard]] const DistributionSpec& spec() const noexcept { return spec_; }
    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }

    /// omega(z); memoized.
    double value(std::int64_t z) {
        if (z >= 0) {
            const auto i = static_cast<std::size_t>(z);
            if (i < right_.size()) return right_[i];
            realize(right_, i + 1, 0, +1);
            return right_[i];
        }
        const auto i = static_cast<std::size_t>(-(z + 1));
        if (i < left_.size()) return left_[i];
        realize(left_, i + 1, -1, -1);
        return left_[i];
    }

    double operator()(std::int64_t z) { return value(z); }

    /// Draw for site z without touching the cache.
    [[nodiscard]] double draw(std::int64_t z) const {
        const double v = spec_.sample(stream_.uniform(z, 0), stream_.uniform(z, 1));
        if (!(v > support_.first && v < support_.second))
            throw Error(ErrorCode::SupportViolation, "environment draw outside the support");
        return v;
    }

    /// Number of realized sites on each side of the origin.
    [[nodiscard]] std::size_t realized_right() const noexcept { return right_.size(); }
    [[nodiscard]] std::size_t realized_left() const noexcept { return left_.size(); }

private:
    void realize(std::vector<double>& side, std::size_t size, std::int64_t first, std::int64_t dir) {
        const std::size_t target = std::max({size, side.size() * 2, std::size_t{256}});
        side.reserve(target);
        for (std::size_t i = side.size(); i < target; ++i)
            side.push_back(draw(first + dir * static_cast<std::int64_t>(i)));
    }

    DistributionSpec spec_;
    std::uint64_t seed_;
    KeyedStream stream_;
    std::pair<double, double> support_;
    std::vector<double> right_; // sites 0, 1, 2, ...
    std::vector<double> left_;  // sites -1, -2, ...
};

/// Free-function form of Environment::value.
inline double env_value(Environment& env, std::int64_t z) { return env.value(z); }

} // namespace rwre
