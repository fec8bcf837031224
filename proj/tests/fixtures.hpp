#pragma once

// Shared fixture data for the unit and acceptance suites: small grammar
// builders, the two hymn sequences used by the golden tests, and a grammar
// isomorphism check.

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "gramseg/grammar.hpp"
#include "gramseg/segmentation.hpp"
#include "gramseg/viewpoints.hpp"

namespace fixtures {

template <typename Token>
gramseg::Symbol<Token> term(Token t) {
  return gramseg::Symbol<Token>::terminal(std::move(t));
}

template <typename Token>
gramseg::Symbol<Token> nt(gramseg::NonTerminalId id) {
  return gramseg::Symbol<Token>::nonterminal(id);
}

inline gramseg::SymbolSeq<char> chars(const std::string& s) {
  gramseg::SymbolSeq<char> out;
  for (char c : s) out.push_back(term<char>(c));
  return out;
}

// Rule-set isomorphism up to non-terminal renaming. Requires every rule to be
// reachable from the start rule (true for utility-clean grammars).
template <typename Token>
bool grammar_isomorphic(const gramseg::Grammar<Token>& a, const gramseg::Grammar<Token>& b) {
  if (a.rule_count() != b.rule_count()) return false;
  std::map<gramseg::NonTerminalId, gramseg::NonTerminalId> fwd;
  std::map<gramseg::NonTerminalId, gramseg::NonTerminalId> rev;
  std::function<bool(gramseg::NonTerminalId, gramseg::NonTerminalId)> same =
      [&](gramseg::NonTerminalId ia, gramseg::NonTerminalId ib) {
        auto it = fwd.find(ia);
        if (it != fwd.end()) return it->second == ib && rev.at(ib) == ia;
        if (rev.contains(ib)) return false;
        fwd[ia] = ib;
        rev[ib] = ia;
        const auto& ra = a.rule(ia).rhs;
        const auto& rb = b.rule(ib).rhs;
        if (ra.size() != rb.size()) return false;
        for (std::size_t i = 0; i < ra.size(); ++i) {
          if (ra[i].is_terminal() != rb[i].is_terminal()) return false;
          if (ra[i].is_terminal()) {
            if (!(ra[i].token() == rb[i].token())) return false;
          } else if (!same(ra[i].id(), rb[i].id())) {
            return false;
          }
        }
        return true;
      };
  if (!same(gramseg::kStartSymbol, gramseg::kStartSymbol)) return false;
  return fwd.size() == a.rule_count();
}

// ---- Hymn 2 (74 duration tokens) ----

inline const std::vector<double>& hymn2_durations() {
  static const std::vector<double> durations = {
      1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.5, 0.5, 0.5, 0.5, 1.0, 0.5, 0.5,
      1.0, 1.0, 2.0,  // bars 1-4
      1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.5, 0.5, 0.5, 0.5, 1.0, 0.5, 0.5,
      1.0, 1.0, 2.0,  // bars 5-8
      1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 2.0, 0.5, 0.5, 0.5, 0.5, 1.0, 0.5, 0.5, 1.0,
      1.0, 2.0,  // bars 9-12
      0.5, 0.5, 0.5, 0.5, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.5, 0.5, 0.5, 0.5, 0.5,
      0.5, 0.5, 0.5, 1.0, 1.0, 2.0,  // bars 13-16
  };
  return durations;
}

// The published ten-rule grammar that Sequitur finds on the duration tokens,
// built over an arbitrary token factory so it can be instantiated with plain
// doubles or feature vectors.
template <typename Token>
gramseg::Grammar<Token> hymn2_reference_grammar(
    const std::function<Token(double)>& make_token) {
  using S = gramseg::Symbol<Token>;
  auto t = [&](double v) { return S::terminal(make_token(v)); };
  auto n = [](gramseg::NonTerminalId id) { return S::nonterminal(id); };
  gramseg::Grammar<Token> g = gramseg::Grammar<Token>::from_start(
      {n(1), n(1), n(2), n(3), n(4), n(5), n(2), t(1.0), n(6), n(6), n(3)});
  g.add_rule(1, {n(2), n(2), n(4)});
  g.add_rule(2, {n(7), n(7)});
  g.add_rule(3, {n(7), t(2.0)});
  g.add_rule(4, {n(5), n(9), t(1.0), t(2.0)});
  g.add_rule(5, {n(8), n(9)});
  g.add_rule(6, {n(8), n(8)});
  g.add_rule(7, {t(1.0), t(1.0)});
  g.add_rule(8, {t(0.5), t(0.5)});
  g.add_rule(9, {n(8), t(1.0)});
  return g;
}

// Hymn 2 as note events: onsets accumulate the duration sequence; pitch is
// irrelevant for the duration-viewpoint golden tests and kept constant.
inline std::vector<gramseg::NoteEvent> hymn2_events() {
  std::vector<gramseg::NoteEvent> events;
  gramseg::Rational onset(0);
  for (double d : hymn2_durations()) {
    gramseg::Rational duration = gramseg::Rational::from_double(d);
    events.push_back({onset, 60, duration});
    onset = onset + duration;
  }
  return events;
}

// Annotator 1's published ground truth for Hymn 2.
inline gramseg::Annotation hymn2_annotator1() {
  using gramseg::Occurrence;
  gramseg::Annotation a;
  a.phrases.push_back({"A", {Occurrence(0, 7), Occurrence(53, 62)}});
  a.phrases.push_back({"B", {Occurrence(8, 17), Occurrence(26, 35)}});
  a.phrases.push_back({"C", {Occurrence(18, 25)}});
  a.phrases.push_back({"D", {Occurrence(36, 42)}});
  a.phrases.push_back({"E", {Occurrence(43, 52)}});
  a.phrases.push_back({"F", {Occurrence(63, 73)}});
  return a;
}

// ---- Hymn 5 (30 note events from the viewpoint table) ----

inline std::vector<gramseg::NoteEvent> hymn5_events() {
  static const double onsets[] = {0,  1,  2,  3,  4,  5,  6,  8,  9,  9.5,
                                  10, 11, 12, 13, 14, 16, 17, 18, 19, 20,
                                  21, 22, 24, 25, 26, 27, 27.5, 28, 29, 30};
  static const int pitches[] = {60, 65, 63, 68, 70, 70, 72, 73, 72, 70,
                                72, 68, 67, 65, 63, 70, 63, 65, 67, 68,
                                70, 72, 73, 70, 68, 65, 68, 70, 70, 68};
  static const double durations[] = {1, 1, 1,   1,   1, 1, 2, 1, 0.5, 0.5,
                                     1, 1, 1,   1,   2, 1, 1, 1, 1,   1,
                                     1, 2, 1,   1,   1, 0.5, 0.5, 1, 1, 2};
  std::vector<gramseg::NoteEvent> events;
  for (std::size_t i = 0; i < 30; ++i)
    events.push_back({gramseg::Rational::from_double(onsets[i]), pitches[i],
                      gramseg::Rational::from_double(durations[i])});
  return events;
}

// Expected VCI-31 feature table for Hymn 5; row order pitch, duration, ioi,
// pitchC, pitchI. A quiet NaN stands for the null value.
inline const std::vector<std::vector<double>>& hymn5_vci31_table() {
  constexpr double kNull = -1e9;  // sentinel, mapped to null by the test
  static const std::vector<std::vector<double>> table = {
      {60, 65, 63, 68, 70, 70, 72, 73, 72, 70, 72, 68, 67, 65, 63, 70, 63, 65,
       67, 68, 70, 72, 73, 70, 68, 65, 68, 70, 70, 68},
      {1, 1, 1, 1, 1, 1, 2, 1, 0.5, 0.5, 1, 1, 1, 1, 2, 1, 1, 1, 1, 1, 1, 2,
       1, 1, 1, 0.5, 0.5, 1, 1, 2},
      {kNull, 1, 1, 1, 1, 1, 1, 2, 1, 0.5, 0.5, 1, 1, 1, 1, 2, 1, 1, 1, 1, 1,
       1, 2, 1, 1, 1, 0.5, 0.5, 1, 1},
      {kNull, 1, -1, 1, 1, 0, 1, 1, -1, -1, 1, -1, -1, -1, -1, 1, -1, 1, 1, 1,
       1, 1, 1, -1, -1, -1, 1, 1, 0, -1},
      {kNull, 5, -2, 5, 2, 0, 2, 1, -1, -2, 2, -4, -1, -2, -2, 7, -7, 2, 2, 1,
       2, 2, 1, -3, -2, -3, 3, 2, 0, -2},
  };
  return table;
}

inline constexpr double kHymn5Null = -1e9;

// Single-value duration feature vectors, the terminals of duration grammars.
inline gramseg::FeatureVector duration_fv(double d) {
  return gramseg::FeatureVector{{gramseg::Rational::from_double(d)}};
}

}  // namespace fixtures
