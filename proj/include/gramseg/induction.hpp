#pragma once

#include <array>
#include <functional>
#include <optional>
#include <type_traits>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

#include "gramseg/grammar.hpp"

namespace gramseg {

enum class AlgorithmId { lz78, sequitur, repair, longest_first, most_compressive };

inline constexpr std::array<AlgorithmId, 5> kAllAlgorithms = {
    AlgorithmId::lz78, AlgorithmId::sequitur, AlgorithmId::repair,
    AlgorithmId::longest_first, AlgorithmId::most_compressive};

constexpr std::string_view to_string(AlgorithmId id) {
  switch (id) {
    case AlgorithmId::lz78: return "lz78";
    case AlgorithmId::sequitur: return "sequitur";
    case AlgorithmId::repair: return "repair";
    case AlgorithmId::longest_first: return "longest_first";
    case AlgorithmId::most_compressive: return "most_compressive";
  }
  return "?";
}

inline AlgorithmId parse_algorithm_id(std::string_view name) {
  for (AlgorithmId id : kAllAlgorithms)
    if (name == to_string(id)) return id;
  throw std::invalid_argument("unknown algorithm: " + std::string(name));
}

// Objective functions for the iterative repeat-replace framework.
enum class Objective { repair, longest_first, most_compressive };

inline Objective objective_for(AlgorithmId id) {
  switch (id) {
    case AlgorithmId::repair: return Objective::repair;
    case AlgorithmId::longest_first: return Objective::longest_first;
    case AlgorithmId::most_compressive: return Objective::most_compressive;
    default: throw std::invalid_argument("not an IRR algorithm");
  }
}

// Occurrence count of the candidate repeat.
template <typename Token>
long long score_repair(const SymbolSeq<Token>& w, const Grammar<Token>& g) {
  return static_cast<long long>(count(w, g));
}

// Length of the candidate repeat.
template <typename Token>
long long score_longest(const SymbolSeq<Token>& w, const Grammar<Token>& /*g*/) {
  return static_cast<long long>(w.size());
}

// Net size reduction from replacing the candidate: symbols removed minus the
// non-terminal holes, the new rule body, and its delimiter.
template <typename Token>
long long score_most_compressive(const SymbolSeq<Token>& w, const Grammar<Token>& g) {
  const long long len = static_cast<long long>(w.size());
  const long long c = static_cast<long long>(count(w, g));
  return len * c - len - c - 1;
}

template <typename Token>
long long objective_score(Objective f, const SymbolSeq<Token>& w, const Grammar<Token>& g) {
  switch (f) {
    case Objective::repair: return score_repair(w, g);
    case Objective::longest_first: return score_longest(w, g);
    case Objective::most_compressive: return score_most_compressive(w, g);
  }
  throw std::invalid_argument("bad objective");
}

// One committed IRR substitution, reported to observers.
template <typename Token>
struct IrrStep {
  SymbolSeq<Token> pattern;
  long long score = 0;
  NonTerminalId nonterminal = 0;
  std::size_t size_before = 0;
  std::size_t size_after = 0;
};

template <typename Token>
using IrrObserver = std::function<void(const IrrStep<Token>&)>;

// Single-pass dictionary builder: grows a buffer until it no longer matches
// an existing rule's rhs, then freezes the buffer as a new rule.
template <typename Token>
Grammar<Token> induce_lz78(std::span<const Token> input) {
  Grammar<Token> g;
  SymbolSeq<Token> buffer;
  for (const Token& t : input) {
    buffer.push_back(Symbol<Token>::terminal(t));
    const Rule<Token>* hit = nullptr;
    for (const auto& rule : g.rules()) {
      if (rule.lhs == kStartSymbol) continue;  // the start rule is not a dictionary entry
      if (rule.rhs == buffer) {
        hit = &rule;
        break;
      }
    }
    if (hit != nullptr) {
      NonTerminalId id = hit->lhs;
      buffer.clear();
      buffer.push_back(Symbol<Token>::nonterminal(id));
    } else {
      NonTerminalId id = g.fresh_id();
      SymbolSeq<Token> start = g.rule_rhs(kStartSymbol);
      start.push_back(Symbol<Token>::nonterminal(id));
      g.set_rhs(kStartSymbol, std::move(start));
      g.add_rule(id, std::move(buffer));
      buffer = SymbolSeq<Token>{};
    }
  }
  if (!buffer.empty()) {
    SymbolSeq<Token> start = g.rule_rhs(kStartSymbol);
    start.insert(start.end(), buffer.begin(), buffer.end());
    g.set_rhs(kStartSymbol, std::move(start));
  }
  return g;
}

namespace detail {

// First repeated digram (greedy non-overlapping count >= 2), candidates
// ordered by leftmost first occurrence in rule order.
template <typename Token>
std::optional<SymbolSeq<Token>> first_repeated_digram(const Grammar<Token>& g) {
  struct Candidate {
    SymbolSeq<Token> digram;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> positions;
  };
  std::vector<Candidate> candidates;
  std::map<std::pair<Symbol<Token>, Symbol<Token>>, std::size_t> index;
  std::uint32_t rule_pos = 0;
  for (const auto& rule : g.rules()) {
    const auto& seq = rule.rhs;
    for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
      auto [it, inserted] =
          index.try_emplace(std::make_pair(seq[i], seq[i + 1]), candidates.size());
      if (inserted) candidates.push_back({{seq[i], seq[i + 1]}, {}});
      candidates[it->second].positions.emplace_back(rule_pos, static_cast<std::uint32_t>(i));
    }
    ++rule_pos;
  }
  for (const auto& cand : candidates)
    if (greedy_count_from_positions(cand.positions, 2) >= 2) return cand.digram;
  return std::nullopt;
}

// First rule (in rule order) whose lhs occurs fewer than twice across all
// rhs; the start rule is exempt.
template <typename Token>
std::optional<NonTerminalId> first_underused_rule(const Grammar<Token>& g) {
  for (const auto& rule : g.rules()) {
    if (rule.lhs == kStartSymbol) continue;
    SymbolSeq<Token> pattern{Symbol<Token>::nonterminal(rule.lhs)};
    if (count(pattern, g) < 2) return rule.lhs;
  }
  return std::nullopt;
}

// Replaces every occurrence of N_id with the rule's rhs, then removes the rule.
template <typename Token>
void inline_rule(Grammar<Token>& g, NonTerminalId id) {
  const SymbolSeq<Token> body = g.rule_rhs(id);
  const Symbol<Token> needle = Symbol<Token>::nonterminal(id);
  for (const auto& rule : g.rules()) {
    if (rule.lhs == id) continue;
    bool hit = false;
    for (const auto& sym : rule.rhs)
      if (sym == needle) {
        hit = true;
        break;
      }
    if (!hit) continue;
    SymbolSeq<Token> out;
    out.reserve(rule.rhs.size() + body.size());
    for (const auto& sym : rule.rhs) {
      if (sym == needle)
        out.insert(out.end(), body.begin(), body.end());
      else
        out.push_back(sym);
    }
    g.set_rhs(rule.lhs, std::move(out));
  }
  g.remove_rule(id);
}

// Restores digram uniqueness and rule utility; runs to a fixed point.
template <typename Token>
void sequitur_enforce(Grammar<Token>& g) {
  for (;;) {
    bool changed = false;
    while (auto digram = first_repeated_digram(g)) {
      changed = true;
      // Reuse an existing rule whose rhs equals the digram instead of
      // minting a duplicate; its own defining rhs is left untouched.
      std::optional<NonTerminalId> reuse;
      for (const auto& rule : g.rules()) {
        if (rule.lhs == kStartSymbol) continue;
        if (rule.rhs == *digram) {
          reuse = rule.lhs;
          break;
        }
      }
      if (reuse) {
        substitute_in_place(g, std::span<const Symbol<Token>>(*digram), *reuse, reuse);
      } else {
        NonTerminalId id = g.fresh_id();
        substitute_in_place(g, std::span<const Symbol<Token>>(*digram), id);
        g.add_rule(id, std::move(*digram));
      }
    }
    while (auto underused = first_underused_rule(g)) {
      changed = true;
      inline_rule(g, *underused);
    }
    if (!changed) break;
  }
}

}  // namespace detail

// Online induction that maintains digram uniqueness and rule utility after
// every consumed token.
template <typename Token>
Grammar<Token> induce_sequitur(std::span<const Token> input) {
  Grammar<Token> g;
  for (const Token& t : input) {
    SymbolSeq<Token> start = g.rule_rhs(kStartSymbol);
    start.push_back(Symbol<Token>::terminal(t));
    g.set_rhs(kStartSymbol, std::move(start));
    detail::sequitur_enforce(g);
  }
  return g;
}

// Iterative repeat replace: repeatedly substitutes the argmax-scoring repeat
// while the substitution strictly shrinks the grammar. Ties are broken by
// earlier first occurrence, then shorter pattern, then symbol order.
template <typename Token>
Grammar<Token> induce_irr(std::span<const Token> input, Objective f,
                          const std::type_identity_t<IrrObserver<Token>>& observer = {}) {
  Grammar<Token> g = Grammar<Token>::from_tokens(input);
  for (;;) {
    auto cg = detail::CodedGrammar<Token>::build(g);
    auto infos = detail::repeats_coded(cg);
    if (infos.empty()) break;

    auto score_of = [&](const detail::RepeatInfo& info) -> long long {
      const long long len = static_cast<long long>(info.length);
      const long long c = static_cast<long long>(info.count);
      switch (f) {
        case Objective::repair: return c;
        case Objective::longest_first: return len;
        case Objective::most_compressive: return len * c - len - c - 1;
      }
      return 0;
    };

    std::size_t best = 0;
    long long best_score = score_of(infos[0]);
    for (std::size_t i = 1; i < infos.size(); ++i) {
      long long s = score_of(infos[i]);
      if (s > best_score) {
        best = i;
        best_score = s;
      }
    }

    SymbolSeq<Token> pattern =
        cg.decode_window(infos[best].rule, infos[best].pos, infos[best].length);
    NonTerminalId id = g.fresh_id();
    Grammar<Token> next = substitute(g, pattern, id);
    next.add_rule(id, pattern);

    std::size_t before = grammar_size(g);
    std::size_t after = grammar_size(next);
    if (after >= before) break;
    if (observer) observer(IrrStep<Token>{std::move(pattern), best_score, id, before, after});
    g = std::move(next);
  }
  return g;
}

template <typename Token>
Grammar<Token> induce(std::span<const Token> input, AlgorithmId algorithm) {
  switch (algorithm) {
    case AlgorithmId::lz78: return induce_lz78(input);
    case AlgorithmId::sequitur: return induce_sequitur(input);
    case AlgorithmId::repair:
    case AlgorithmId::longest_first:
    case AlgorithmId::most_compressive:
      return induce_irr(input, objective_for(algorithm));
  }
  throw std::invalid_argument("bad algorithm id");
}

template <typename Token>
Grammar<Token> induce(const std::vector<Token>& input, AlgorithmId algorithm) {
  return induce(std::span<const Token>(input), algorithm);
}

}  // namespace gramseg
