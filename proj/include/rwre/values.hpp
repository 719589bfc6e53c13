#pragma once

// Observed values are compared by exact bit pattern everywhere; these helpers
// give hashed containers that follow that rule.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace rwre {

[[nodiscard]] inline std::uint64_t value_key(double v) noexcept { return std::bit_cast<std::uint64_t>(v); }
[[nodiscard]] inline double key_value(std::uint64_t k) noexcept { return std::bit_cast<double>(k); }

[[nodiscard]] inline bool same_value(double a, double b) noexcept { return value_key(a) == value_key(b); }

struct ValueKeyHash {
    std::size_t operator()(std::uint64_t k) const noexcept {
        k ^= k >> 33;
        k *= 0xFF51AFD7ED558CCDULL;
        k ^= k >> 33;
        return static_cast<std::size_t>(k);
    }
};

/// Set of doubles under bit equality.
class ValueSet {
public:
    ValueSet() = default;
    ValueSet(std::initializer_list<double> values) {
        for (double v : values) insert(v);
    }

    bool insert(double v) { return keys_.insert(value_key(v)).second; }
    [[nodiscard]] bool contains(double v) const { return keys_.contains(value_key(v)); }
    [[nodiscard]] std::size_t size() const noexcept { return keys_.size(); }
    [[nodiscard]] bool empty() const noexcept { return keys_.empty(); }

    /// Values sorted ascending (deterministic iteration order).
    [[nodiscard]] std::vector<double> sorted() const {
        std::vector<double> out;
        out.reserve(keys_.size());
        for (auto k : keys_) out.push_back(key_value(k));
        std::sort(out.begin(), out.end());
        return out;
    }

    friend bool operator==(const ValueSet& a, const ValueSet& b) { return a.keys_ == b.keys_; }

private:
    std::unordered_set<std::uint64_t, ValueKeyHash> keys_;
};

template <typename T>
using ValueMap = std::unordered_map<std::uint64_t, T, ValueKeyHash>;

} // namespace rwre
