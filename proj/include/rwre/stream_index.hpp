#pragma once

#include "rwre/values.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace rwre {

/// Dense relabeling of an observation stream: every distinct value (bit
/// equality) gets an id, with its occurrence count and first/last position.
/// All scanning passes in the reconstruction work on the id array.
class IndexedStream {
public:
    using Id = std::uint32_t;

    explicit IndexedStream(std::span<const double> chi) : chi_(chi) {
        ids_.resize(chi.size());
        lookup_.reserve(chi.size() / 4 + 16);
        for (std::size_t k = 0; k < chi.size(); ++k) {
            auto [it, inserted] = lookup_.try_emplace(value_key(chi[k]), static_cast<Id>(values_.size()));
            const Id id = it->second;
            if (inserted) {
                values_.push_back(chi[k]);
                count_.push_back(0);
                first_.push_back(k);
                last_.push_back(k);
            }
            ids_[k] = id;
            ++count_[id];
            last_[id] = k;
        }
    }

    [[nodiscard]] std::span<const double> chi() const noexcept { return chi_; }
    [[nodiscard]] std::size_t size() const noexcept { return ids_.size(); }
    [[nodiscard]] std::size_t distinct() const noexcept { return values_.size(); }

    [[nodiscard]] Id id(std::size_t k) const { return ids_[k]; }
    [[nodiscard]] const std::vector<Id>& ids() const noexcept { return ids_; }
    [[nodiscard]] double value(Id id) const { return values_[id]; }
    [[nodiscard]] std::size_t count(Id id) const { return count_[id]; }
    [[nodiscard]] std::size_t first(Id id) const { return first_[id]; }
    [[nodiscard]] std::size_t last(Id id) const { return last_[id]; }

    [[nodiscard]] std::optional<Id> find(double v) const {
        auto it = lookup_.find(value_key(v));
        if (it == lookup_.end()) return std::nullopt;
        return it->second;
    }

    /// Per-id membership flags for a value set (values absent from the stream are ignored).
    [[nodiscard]] std::vector<std::uint8_t> flags(const ValueSet& set) const {
        std::vector<std::uint8_t> f(values_.size(), 0);
        for (double v : set.sorted())
            if (auto i = find(v)) f[*i] = 1;
        return f;
    }

private:
    std::span<const double> chi_;
    std::vector<Id> ids_;
    std::vector<double> values_;
    std::vector<std::size_t> count_;
    std::vector<std::size_t> first_;
    std::vector<std::size_t> last_;
    ValueMap<Id> lookup_;
};

} // namespace rwre
