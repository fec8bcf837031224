#pragma once

#include <algorithm>
#include <array>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "gramseg/rational.hpp"

namespace gramseg {

// One monophonic note: onset and duration in quarter notes, MIDI pitch.
struct NoteEvent {
  Rational onset;
  int pitch = 0;
  Rational duration;
};

// The five viewpoint functions. The ordinal values fix the slot order inside
// feature vectors and the subset enumeration behind combination indices.
enum class ViewpointId : int {
  pitch = 1,
  duration = 2,
  ioi = 3,
  pitch_contour = 4,
  pitch_interval = 5,
};

inline constexpr std::array<ViewpointId, 5> kAllViewpoints = {
    ViewpointId::pitch, ViewpointId::duration, ViewpointId::ioi,
    ViewpointId::pitch_contour, ViewpointId::pitch_interval};

constexpr std::string_view to_string(ViewpointId id) {
  switch (id) {
    case ViewpointId::pitch: return "pitch";
    case ViewpointId::duration: return "duration";
    case ViewpointId::ioi: return "ioi";
    case ViewpointId::pitch_contour: return "pitchC";
    case ViewpointId::pitch_interval: return "pitchI";
  }
  return "?";
}

inline ViewpointId parse_viewpoint_id(std::string_view name) {
  for (ViewpointId id : kAllViewpoints)
    if (name == to_string(id)) return id;
  throw std::invalid_argument("unknown viewpoint: " + std::string(name));
}

// Fixed-width vector of optional values, one slot per combination member in
// ordinal order; null marks the undefined binary viewpoints at index 0.
// Equality is componentwise with null equal only to null.
struct FeatureVector {
  std::vector<std::optional<Rational>> values;

  std::size_t width() const noexcept { return values.size(); }

  friend bool operator==(const FeatureVector& a, const FeatureVector& b) {
    return a.values == b.values;
  }
  friend bool operator!=(const FeatureVector& a, const FeatureVector& b) {
    return !(a == b);
  }
  friend bool operator<(const FeatureVector& a, const FeatureVector& b) {
    return a.values < b.values;
  }
};

inline constexpr int kViewpointCombinationCount = 31;

// A non-empty subset of the five viewpoints, identified by its 1-based
// position in the enumeration of all non-empty subsets ordered first by
// cardinality, then lexicographically by member ordinals.
class ViewpointCombination {
 public:
  static ViewpointCombination from_vci(int vci) {
    if (vci < 1 || vci > kViewpointCombinationCount)
      throw std::invalid_argument("viewpoint combination index out of range: " +
                                  std::to_string(vci));
    return ViewpointCombination(table()[static_cast<std::size_t>(vci - 1)], vci);
  }

  static ViewpointCombination from_members(std::vector<ViewpointId> members) {
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    if (members.empty())
      throw std::invalid_argument("viewpoint combination must be non-empty");
    const auto& all = table();
    for (std::size_t i = 0; i < all.size(); ++i)
      if (all[i] == members)
        return ViewpointCombination(all[i], static_cast<int>(i + 1));
    throw std::invalid_argument("unrecognized viewpoint combination");
  }

  int vci() const noexcept { return vci_; }
  const std::vector<ViewpointId>& members() const noexcept { return members_; }
  std::size_t width() const noexcept { return members_.size(); }

 private:
  ViewpointCombination(std::vector<ViewpointId> members, int vci)
      : members_(std::move(members)), vci_(vci) {}

  static const std::vector<std::vector<ViewpointId>>& table() {
    static const std::vector<std::vector<ViewpointId>> subsets = [] {
      std::vector<std::vector<ViewpointId>> out;
      for (unsigned mask = 1; mask < 32; ++mask) {
        std::vector<ViewpointId> members;
        for (std::size_t bit = 0; bit < kAllViewpoints.size(); ++bit)
          if (mask & (1u << bit)) members.push_back(kAllViewpoints[bit]);
        out.push_back(std::move(members));
      }
      std::stable_sort(out.begin(), out.end(),
                       [](const auto& a, const auto& b) {
                         if (a.size() != b.size()) return a.size() < b.size();
                         return a < b;
                       });
      return out;
    }();
    return subsets;
  }

  std::vector<ViewpointId> members_;
  int vci_ = 0;
};

inline ViewpointCombination vci_to_combination(int vci) {
  return ViewpointCombination::from_vci(vci);
}

inline int vp_pitch(const NoteEvent& e) noexcept { return e.pitch; }

inline Rational vp_duration(const NoteEvent& e) noexcept { return e.duration; }

// The printed definition of the inter-onset interval differs from the values
// it is known to take on real data; the onset difference is what the data
// shows, the duration difference is kept selectable for auditing.
enum class IoiMode { onset_difference, duration_difference };

inline std::optional<Rational> vp_ioi(const NoteEvent* prev, const NoteEvent& e,
                                      IoiMode mode = IoiMode::onset_difference) {
  if (prev == nullptr) return std::nullopt;
  if (mode == IoiMode::duration_difference) return e.duration - prev->duration;
  return e.onset - prev->onset;
}

inline std::optional<int> vp_pitch_contour(const NoteEvent* prev, const NoteEvent& e) {
  if (prev == nullptr) return std::nullopt;
  if (e.pitch > prev->pitch) return 1;
  if (e.pitch < prev->pitch) return -1;
  return 0;
}

inline std::optional<int> vp_pitch_interval(const NoteEvent* prev, const NoteEvent& e) {
  if (prev == nullptr) return std::nullopt;
  return e.pitch - prev->pitch;
}

// Maps every note event to a feature vector, one slot per combination member
// in ordinal order; binary viewpoints see the previous event and are null at
// index 0.
inline std::vector<FeatureVector> transform(const ViewpointCombination& combination,
                                            std::span<const NoteEvent> events,
                                            IoiMode mode = IoiMode::onset_difference) {
  std::vector<FeatureVector> out;
  out.reserve(events.size());
  const NoteEvent* prev = nullptr;
  for (const NoteEvent& e : events) {
    FeatureVector fv;
    fv.values.reserve(combination.width());
    for (ViewpointId id : combination.members()) {
      switch (id) {
        case ViewpointId::pitch:
          fv.values.emplace_back(Rational(vp_pitch(e)));
          break;
        case ViewpointId::duration:
          fv.values.emplace_back(vp_duration(e));
          break;
        case ViewpointId::ioi:
          fv.values.push_back(vp_ioi(prev, e, mode));
          break;
        case ViewpointId::pitch_contour: {
          auto c = vp_pitch_contour(prev, e);
          fv.values.push_back(c ? std::optional<Rational>(Rational(*c)) : std::nullopt);
          break;
        }
        case ViewpointId::pitch_interval: {
          auto c = vp_pitch_interval(prev, e);
          fv.values.push_back(c ? std::optional<Rational>(Rational(*c)) : std::nullopt);
          break;
        }
      }
    }
    out.push_back(std::move(fv));
    prev = &e;
  }
  return out;
}

inline std::vector<FeatureVector> transform(const ViewpointCombination& combination,
                                            const std::vector<NoteEvent>& events,
                                            IoiMode mode = IoiMode::onset_difference) {
  return transform(combination, std::span<const NoteEvent>(events), mode);
}

}  // namespace gramseg
