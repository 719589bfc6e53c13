#pragma once

#include "rwre/h_stats.hpp"
#include "rwre/values.hpp"

#include <algorithm>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rwre {

/// Origin of an observed value.
enum class Label : std::uint8_t { RhoAtom, NuAtom, RhoContinuous, NuContinuous, Undecided };

inline std::string_view to_string(Label l) {
    switch (l) {
    case Label::RhoAtom: return "RhoAtom";
    case Label::NuAtom: return "NuAtom";
    case Label::RhoContinuous: return "RhoContinuous";
    case Label::NuContinuous: return "NuContinuous";
    case Label::Undecided: return "Undecided";
    }
    return "Undecided";
}

inline std::optional<Label> label_from_string(std::string_view s) {
    for (Label l : {Label::RhoAtom, Label::NuAtom, Label::RhoContinuous, Label::NuContinuous, Label::Undecided})
        if (to_string(l) == s) return l;
    return std::nullopt;
}

[[nodiscard]] constexpr bool from_environment(Label l) noexcept {
    return l == Label::RhoAtom || l == Label::RhoContinuous;
}

/// The statistics a decision was based on. Which fields are meaningful depends
/// on `rule`.
struct Evidence {
    std::string rule;
    std::size_t occurrences = 0;
    std::size_t first_index = 0;
    std::optional<HStats> stats;
    std::size_t anchor_windows = 0;  ///< (a0, a1, alpha, a2) windows found
    std::size_t witness_windows = 0; ///< (a1, alpha, alpha) windows for an anchor a1
    double standard_error = 0.0;
};

struct ValueClass {
    double value = 0.0;
    Label label = Label::Undecided;
    Evidence evidence;
};

/// Labels for the values of one stream. Values that are not listed occurred
/// at most once; they carry the label `unlisted` (NuContinuous unless noise
/// classification is switched off).
class Classification {
public:
    void set(ValueClass vc) {
        const auto key = value_key(vc.value);
        if (auto it = index_.find(key); it != index_.end()) {
            entries_[it->second] = std::move(vc);
            return;
        }
        index_.emplace(key, entries_.size());
        entries_.push_back(std::move(vc));
    }

    [[nodiscard]] const ValueClass* find(double v) const {
        auto it = index_.find(value_key(v));
        return it == index_.end() ? nullptr : &entries_[it->second];
    }

    [[nodiscard]] Label label_of(double v) const {
        const auto* vc = find(v);
        return vc ? vc->label : unlisted;
    }

    [[nodiscard]] bool is_clean(double v) const { return from_environment(label_of(v)); }

    /// Entries in order of first appearance in the stream.
    [[nodiscard]] std::vector<ValueClass> entries() const {
        auto out = entries_;
        std::stable_sort(out.begin(), out.end(), [](const ValueClass& a, const ValueClass& b) {
            return a.evidence.first_index < b.evidence.first_index;
        });
        return out;
    }

    /// Values with the given label, in order of first appearance.
    [[nodiscard]] std::vector<double> ordered(Label l) const {
        std::vector<double> out;
        for (const auto& vc : entries())
            if (vc.label == l) out.push_back(vc.value);
        return out;
    }

    [[nodiscard]] ValueSet values_with(Label l) const {
        ValueSet s;
        for (const auto& vc : entries_)
            if (vc.label == l) s.insert(vc.value);
        return s;
    }

    [[nodiscard]] std::size_t count(Label l) const {
        return static_cast<std::size_t>(
            std::count_if(entries_.begin(), entries_.end(), [l](const ValueClass& vc) { return vc.label == l; }));
    }

    [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }

    std::size_t singletons = 0;             ///< values seen exactly once, not listed
    Label unlisted = Label::NuContinuous;   ///< label of values that are not listed

private:
    std::vector<ValueClass> entries_;
    ValueMap<std::size_t> index_;
};

} // namespace rwre
