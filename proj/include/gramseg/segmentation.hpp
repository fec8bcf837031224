#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gramseg/grammar.hpp"
#include "gramseg/viewpoints.hpp"

namespace gramseg {

// Inclusive index range [start, end] into a note-event sequence; phrases are
// at least two events long, so start < end always.
class Occurrence {
 public:
  Occurrence(std::size_t start, std::size_t end) : start_(start), end_(end) {
    if (start >= end)
      throw std::invalid_argument("occurrence requires start < end: [" +
                                  std::to_string(start) + ", " + std::to_string(end) + "]");
  }

  std::size_t start() const noexcept { return start_; }
  std::size_t end() const noexcept { return end_; }
  std::size_t length() const noexcept { return end_ - start_ + 1; }

  friend bool operator==(const Occurrence& a, const Occurrence& b) noexcept {
    return a.start_ == b.start_ && a.end_ == b.end_;
  }
  friend bool operator<(const Occurrence& a, const Occurrence& b) noexcept {
    return a.start_ != b.start_ ? a.start_ < b.start_ : a.end_ < b.end_;
  }

 private:
  std::size_t start_;
  std::size_t end_;
};

// A labeled set of occurrences; a phrase with two or more occurrences is a
// pattern.
struct Phrase {
  std::string label;
  std::vector<Occurrence> occurrences;
};

// A set of disjointly labeled phrases over one sequence, either ground truth
// or extracted from a grammar.
struct Annotation {
  std::vector<Phrase> phrases;

  bool empty() const noexcept { return phrases.empty(); }
};

struct AnnotatedSequence {
  std::string id;
  std::vector<NoteEvent> events;
  Annotation ground_truth;
};

inline void validate_events(std::span<const NoteEvent> events, const std::string& context) {
  const NoteEvent* prev = nullptr;
  for (std::size_t i = 0; i < events.size(); ++i) {
    const NoteEvent& e = events[i];
    if (e.pitch < 0 || e.pitch > 127)
      throw std::invalid_argument(context + ": pitch out of range at index " +
                                  std::to_string(i));
    if (!(Rational(0) < e.duration))
      throw std::invalid_argument(context + ": non-positive duration at index " +
                                  std::to_string(i));
    if (prev != nullptr && !(prev->onset < e.onset))
      throw std::invalid_argument(context + ": onsets not strictly increasing at index " +
                                  std::to_string(i));
    prev = &e;
  }
}

// Checks label uniqueness, occurrence bounds, and pairwise disjointness of
// occurrences across the whole annotation.
inline void validate_annotation(const Annotation& annotation, std::size_t sequence_length,
                                const std::string& context) {
  std::set<std::string> labels;
  std::vector<Occurrence> all;
  for (const Phrase& phrase : annotation.phrases) {
    if (!labels.insert(phrase.label).second)
      throw std::invalid_argument(context + ": duplicate phrase label '" + phrase.label + "'");
    if (phrase.occurrences.empty())
      throw std::invalid_argument(context + ": phrase '" + phrase.label +
                                  "' has no occurrences");
    for (const Occurrence& o : phrase.occurrences) {
      if (o.end() >= sequence_length)
        throw std::invalid_argument(context + ": occurrence [" + std::to_string(o.start()) +
                                    ", " + std::to_string(o.end()) +
                                    "] exceeds sequence length " +
                                    std::to_string(sequence_length));
      all.push_back(o);
    }
  }
  std::sort(all.begin(), all.end());
  for (std::size_t i = 1; i < all.size(); ++i)
    if (all[i].start() <= all[i - 1].end())
      throw std::invalid_argument(context + ": overlapping occurrences at [" +
                                  std::to_string(all[i].start()) + ", " +
                                  std::to_string(all[i].end()) + "]");
}

// Reads the discovered annotation off a grammar: each non-terminal in the
// start rule's rhs marks one occurrence at the running terminal index, and
// equal non-terminals form one phrase labeled by their id. Non-terminals
// expanding to a single terminal cannot form an occurrence and are dropped
// (counted via dropped_singletons when supplied).
template <typename Token>
Annotation extract_annotation(const Grammar<Token>& g, std::size_t sequence_length,
                              std::size_t* dropped_singletons = nullptr) {
  auto lengths = detail::expansion_lengths(g);
  if (lengths.at(kStartSymbol) != sequence_length)
    throw std::invalid_argument("extract_annotation: start rule expands to " +
                                std::to_string(lengths.at(kStartSymbol)) +
                                " tokens, expected " + std::to_string(sequence_length));

  std::size_t dropped = 0;
  std::vector<NonTerminalId> order;
  std::map<NonTerminalId, std::vector<Occurrence>> groups;
  std::size_t index = 0;
  for (const auto& sym : g.rule_rhs(kStartSymbol)) {
    if (sym.is_terminal()) {
      ++index;
      continue;
    }
    const std::size_t len = lengths.at(sym.id());
    if (len >= 2) {
      auto [it, inserted] = groups.try_emplace(sym.id());
      if (inserted) order.push_back(sym.id());
      it->second.emplace_back(index, index + len - 1);
    } else {
      ++dropped;
    }
    index += len;
  }

  Annotation annotation;
  for (NonTerminalId id : order)
    annotation.phrases.push_back(Phrase{std::to_string(id), std::move(groups.at(id))});
  if (dropped_singletons != nullptr) *dropped_singletons = dropped;
  return annotation;
}

// Builds a ground-truth annotation from visual-line phrase occurrences:
// lines are concatenated into one sequence, and occurrences whose
// (pitch, duration) pair sequences are identical share a phrase label.
// Labels are A, B, ... in first-appearance order. Single-event lines cannot
// form an occurrence and contribute events only.
inline AnnotatedSequence essen_group_phrases(std::string id,
                                             const std::vector<std::vector<NoteEvent>>& lines) {
  if (lines.empty()) throw std::invalid_argument("essen_group_phrases: no lines");
  for (const auto& line : lines)
    if (line.empty()) throw std::invalid_argument("essen_group_phrases: empty line in " + id);

  AnnotatedSequence out;
  out.id = std::move(id);

  using LineKey = std::vector<std::pair<int, Rational>>;
  std::map<LineKey, std::size_t> groups;
  std::vector<std::vector<Occurrence>> occurrences;

  std::size_t index = 0;
  for (const auto& line : lines) {
    LineKey key;
    key.reserve(line.size());
    for (const NoteEvent& e : line) {
      key.emplace_back(e.pitch, e.duration);
      out.events.push_back(e);
    }
    if (line.size() >= 2) {
      auto [it, inserted] = groups.try_emplace(std::move(key), occurrences.size());
      if (inserted) occurrences.emplace_back();
      occurrences[it->second].emplace_back(index, index + line.size() - 1);
    }
    index += line.size();
  }

  validate_events(out.events, out.id);

  for (std::size_t i = 0; i < occurrences.size(); ++i) {
    // Spreadsheet-style labels: A..Z, AA, AB, ...
    std::string label;
    std::size_t n = i;
    for (;;) {
      label.insert(label.begin(), static_cast<char>('A' + n % 26));
      if (n < 26) break;
      n = n / 26 - 1;
    }
    out.ground_truth.phrases.push_back(Phrase{std::move(label), std::move(occurrences[i])});
  }
  return out;
}

inline bool has_repeated_pattern(const Annotation& annotation) {
  for (const Phrase& phrase : annotation.phrases)
    if (phrase.occurrences.size() >= 2) return true;
  return false;
}

}  // namespace gramseg
