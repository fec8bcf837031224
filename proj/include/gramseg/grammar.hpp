#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

namespace gramseg {

using NonTerminalId = std::uint32_t;

// Id 0 names the start rule N_s in every grammar.
inline constexpr NonTerminalId kStartSymbol = 0;

// Raised when a grammar breaks a structural invariant: a right-hand side
// references an undefined non-terminal, or the derivation graph has a cycle.
class GrammarError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A grammar symbol: either a terminal carrying an opaque token or a
// non-terminal naming a rule. Tokens must be equality comparable and totally
// ordered; the order gives symbols a deterministic total order (terminals
// before non-terminals, terminals by token order, non-terminals by id) that
// the induction algorithms use for tie-breaking.
template <typename Token>
class Symbol {
 public:
  static Symbol terminal(Token token) {
    return Symbol(Storage(std::in_place_index<0>, std::move(token)));
  }
  static Symbol nonterminal(NonTerminalId id) {
    return Symbol(Storage(std::in_place_index<1>, id));
  }

  bool is_terminal() const noexcept { return storage_.index() == 0; }
  bool is_nonterminal() const noexcept { return storage_.index() == 1; }

  const Token& token() const { return std::get<0>(storage_); }
  NonTerminalId id() const { return std::get<1>(storage_); }

  friend bool operator==(const Symbol& a, const Symbol& b) {
    if (a.storage_.index() != b.storage_.index()) return false;
    if (a.is_terminal()) return a.token() == b.token();
    return a.id() == b.id();
  }
  friend bool operator!=(const Symbol& a, const Symbol& b) { return !(a == b); }

  friend bool operator<(const Symbol& a, const Symbol& b) {
    if (a.storage_.index() != b.storage_.index()) return a.is_terminal();
    if (a.is_terminal()) return a.token() < b.token();
    return a.id() < b.id();
  }

 private:
  using Storage = std::variant<Token, NonTerminalId>;
  explicit Symbol(Storage s) : storage_(std::move(s)) {}
  Storage storage_;
};

template <typename Token>
using SymbolSeq = std::vector<Symbol<Token>>;

template <typename Token>
struct Rule {
  NonTerminalId lhs = kStartSymbol;
  SymbolSeq<Token> rhs;
};

template <typename Token>
NonTerminalId lhs(const Rule<Token>& rule) {
  return rule.lhs;
}

template <typename Token>
const SymbolSeq<Token>& rhs(const Rule<Token>& rule) {
  return rule.rhs;
}

// An ordered list of production rules with a distinguished start rule.
// Rules keep insertion order; expansion and serialization iterate in that
// order. Fresh ids are monotone and never recycled, even after removals.
template <typename Token>
class Grammar {
 public:
  Grammar() {
    rules_.push_back(Rule<Token>{kStartSymbol, {}});
    index_.emplace(kStartSymbol, 0);
  }

  static Grammar from_start(SymbolSeq<Token> start_rhs) {
    Grammar g;
    g.rules_.front().rhs = std::move(start_rhs);
    return g;
  }

  static Grammar from_tokens(std::span<const Token> input) {
    SymbolSeq<Token> seq;
    seq.reserve(input.size());
    for (const Token& t : input) seq.push_back(Symbol<Token>::terminal(t));
    return from_start(std::move(seq));
  }

  const std::vector<Rule<Token>>& rules() const noexcept { return rules_; }
  std::size_t rule_count() const noexcept { return rules_.size(); }

  bool defines(NonTerminalId id) const { return index_.contains(id); }

  const Rule<Token>& rule(NonTerminalId id) const {
    auto it = index_.find(id);
    if (it == index_.end())
      throw GrammarError("undefined non-terminal N_" + std::to_string(id));
    return rules_[it->second];
  }

  const SymbolSeq<Token>& rule_rhs(NonTerminalId id) const { return rule(id).rhs; }

  void set_rhs(NonTerminalId id, SymbolSeq<Token> new_rhs) {
    auto it = index_.find(id);
    if (it == index_.end())
      throw GrammarError("undefined non-terminal N_" + std::to_string(id));
    rules_[it->second].rhs = std::move(new_rhs);
  }

  void add_rule(NonTerminalId id, SymbolSeq<Token> new_rhs) {
    if (defines(id))
      throw std::invalid_argument("rule already defined for N_" + std::to_string(id));
    index_.emplace(id, rules_.size());
    rules_.push_back(Rule<Token>{id, std::move(new_rhs)});
    if (id >= next_id_) next_id_ = id + 1;
  }

  void remove_rule(NonTerminalId id) {
    if (id == kStartSymbol)
      throw std::invalid_argument("cannot remove the start rule");
    auto it = index_.find(id);
    if (it == index_.end())
      throw GrammarError("undefined non-terminal N_" + std::to_string(id));
    std::size_t pos = it->second;
    rules_.erase(rules_.begin() + static_cast<std::ptrdiff_t>(pos));
    index_.erase(it);
    for (auto& [key, value] : index_)
      if (value > pos) --value;
  }

  // Next unused id; consumed (and bumped) by add_rule.
  NonTerminalId fresh_id() const noexcept { return next_id_; }

  friend bool operator==(const Grammar& a, const Grammar& b) {
    if (a.rules_.size() != b.rules_.size()) return false;
    for (std::size_t i = 0; i < a.rules_.size(); ++i) {
      if (a.rules_[i].lhs != b.rules_[i].lhs) return false;
      if (a.rules_[i].rhs != b.rules_[i].rhs) return false;
    }
    return true;
  }

 private:
  std::vector<Rule<Token>> rules_;
  std::unordered_map<NonTerminalId, std::size_t> index_;
  NonTerminalId next_id_ = 1;
};

namespace detail {

// Greedy leftmost non-overlapping match offsets of pattern within one rhs.
template <typename Token>
std::vector<std::size_t> greedy_matches(const SymbolSeq<Token>& seq,
                                        std::span<const Symbol<Token>> pattern) {
  std::vector<std::size_t> offsets;
  const std::size_t m = pattern.size();
  if (m == 0 || seq.size() < m) return offsets;
  std::size_t i = 0;
  while (i + m <= seq.size()) {
    if (std::equal(pattern.begin(), pattern.end(), seq.begin() + static_cast<std::ptrdiff_t>(i))) {
      offsets.push_back(i);
      i += m;
    } else {
      ++i;
    }
  }
  return offsets;
}

// Replaces every greedy leftmost non-overlapping occurrence of pattern in
// every rhs (except skip_rule's own, when given) with the single symbol n.
template <typename Token>
void substitute_in_place(Grammar<Token>& g, std::span<const Symbol<Token>> pattern,
                         NonTerminalId n,
                         std::optional<NonTerminalId> skip_rule = std::nullopt) {
  const std::size_t m = pattern.size();
  const Symbol<Token> replacement = Symbol<Token>::nonterminal(n);
  for (const auto& rule : g.rules()) {
    if (skip_rule && rule.lhs == *skip_rule) continue;
    const SymbolSeq<Token>& old_rhs = rule.rhs;
    if (old_rhs.size() < m) continue;
    SymbolSeq<Token> out;
    bool changed = false;
    std::size_t i = 0;
    while (i < old_rhs.size()) {
      if (i + m <= old_rhs.size() &&
          std::equal(pattern.begin(), pattern.end(),
                     old_rhs.begin() + static_cast<std::ptrdiff_t>(i))) {
        out.push_back(replacement);
        i += m;
        changed = true;
      } else {
        out.push_back(old_rhs[i]);
        ++i;
      }
    }
    if (changed) g.set_rhs(rule.lhs, std::move(out));
  }
}

// A grammar recoded over dense integer symbol codes. Terminal codes are the
// rank of the token among the sorted distinct terminals, so integer
// comparison of codes agrees with Symbol ordering.
template <typename Token>
struct CodedGrammar {
  using Code = std::int64_t;
  static constexpr Code kNtBase = Code(1) << 32;

  std::vector<Token> terminals;            // sorted, distinct
  std::vector<std::vector<Code>> seqs;     // one per rule, in rule order
  std::vector<NonTerminalId> rule_ids;     // lhs per seq

  static CodedGrammar build(const Grammar<Token>& g) {
    CodedGrammar cg;
    for (const auto& rule : g.rules())
      for (const auto& sym : rule.rhs)
        if (sym.is_terminal()) cg.terminals.push_back(sym.token());
    std::sort(cg.terminals.begin(), cg.terminals.end());
    cg.terminals.erase(std::unique(cg.terminals.begin(), cg.terminals.end()),
                       cg.terminals.end());
    cg.seqs.reserve(g.rule_count());
    for (const auto& rule : g.rules()) {
      std::vector<Code> seq;
      seq.reserve(rule.rhs.size());
      for (const auto& sym : rule.rhs) seq.push_back(cg.code(sym));
      cg.seqs.push_back(std::move(seq));
      cg.rule_ids.push_back(rule.lhs);
    }
    return cg;
  }

  Code code(const Symbol<Token>& sym) const {
    if (sym.is_nonterminal()) return kNtBase + sym.id();
    auto it = std::lower_bound(terminals.begin(), terminals.end(), sym.token());
    return static_cast<Code>(it - terminals.begin());
  }

  Symbol<Token> decode(Code c) const {
    if (c >= kNtBase)
      return Symbol<Token>::nonterminal(static_cast<NonTerminalId>(c - kNtBase));
    return Symbol<Token>::terminal(terminals[static_cast<std::size_t>(c)]);
  }

  SymbolSeq<Token> decode_window(std::size_t rule, std::size_t pos, std::size_t len) const {
    SymbolSeq<Token> out;
    out.reserve(len);
    for (std::size_t k = 0; k < len; ++k) out.push_back(decode(seqs[rule][pos + k]));
    return out;
  }
};

struct RepeatInfo {
  std::size_t rule = 0;   // first raw occurrence
  std::size_t pos = 0;
  std::size_t length = 0;
  std::size_t count = 0;  // greedy non-overlapping occurrences across all rhs
};

// Greedy non-overlapping count over raw positions sorted by (rule, pos).
inline std::size_t greedy_count_from_positions(
    const std::vector<std::pair<std::uint32_t, std::uint32_t>>& positions,
    std::size_t length) {
  std::size_t count = 0;
  std::uint32_t cur_rule = UINT32_MAX;
  std::uint64_t next_free = 0;
  for (auto [rule, pos] : positions) {
    if (rule != cur_rule) {
      cur_rule = rule;
      next_free = 0;
    }
    if (pos >= next_free) {
      ++count;
      next_free = static_cast<std::uint64_t>(pos) + length;
    }
  }
  return count;
}

// Every subsequence of length >= 2 (within a single rhs) whose greedy
// non-overlapping occurrence count across all rhs is >= 2. Content groups
// are grown length by length; a group is extended only while it still has
// at least two raw occurrences, which is necessary for any extension to
// repeat. Results are ordered by (first occurrence, length).
template <typename Token>
std::vector<RepeatInfo> repeats_coded(const CodedGrammar<Token>& cg) {
  using Code = typename CodedGrammar<Token>::Code;
  using Pos = std::pair<std::uint32_t, std::uint32_t>;

  std::vector<RepeatInfo> out;

  // Seed with digram groups, positions in (rule, pos) order.
  std::map<std::pair<Code, Code>, std::vector<Pos>> seeds;
  for (std::size_t r = 0; r < cg.seqs.size(); ++r) {
    const auto& seq = cg.seqs[r];
    for (std::size_t i = 0; i + 1 < seq.size(); ++i)
      seeds[{seq[i], seq[i + 1]}].emplace_back(static_cast<std::uint32_t>(r),
                                               static_cast<std::uint32_t>(i));
  }

  struct Group {
    std::vector<Pos> positions;
    std::size_t length;
  };
  std::vector<Group> frontier;
  for (auto& [key, positions] : seeds)
    if (positions.size() >= 2) frontier.push_back({std::move(positions), 2});

  while (!frontier.empty()) {
    std::vector<Group> next;
    for (auto& group : frontier) {
      std::size_t cnt = greedy_count_from_positions(group.positions, group.length);
      if (cnt >= 2) {
        auto [rule, pos] = group.positions.front();
        out.push_back({rule, pos, group.length, cnt});
      }
      // Extend by one symbol, splitting the group by the next code.
      std::map<Code, std::vector<Pos>> children;
      for (auto [rule, pos] : group.positions) {
        const auto& seq = cg.seqs[rule];
        if (pos + group.length < seq.size())
          children[seq[pos + group.length]].emplace_back(rule, pos);
      }
      for (auto& [code, positions] : children)
        if (positions.size() >= 2) next.push_back({std::move(positions), group.length + 1});
    }
    frontier = std::move(next);
  }

  std::sort(out.begin(), out.end(), [](const RepeatInfo& a, const RepeatInfo& b) {
    if (a.rule != b.rule) return a.rule < b.rule;
    if (a.pos != b.pos) return a.pos < b.pos;
    return a.length < b.length;
  });
  return out;
}

// Expansion length of every defined non-terminal; detects cycles and
// dangling references without materializing token sequences.
template <typename Token>
std::unordered_map<NonTerminalId, std::size_t> expansion_lengths(const Grammar<Token>& g) {
  enum class State { open, closed };
  std::unordered_map<NonTerminalId, std::size_t> lengths;
  std::unordered_map<NonTerminalId, State> state;

  // Iterative DFS; a node is pushed twice: once to open, once to close.
  std::vector<std::pair<NonTerminalId, bool>> stack;
  for (const auto& root : g.rules()) {
    if (lengths.contains(root.lhs)) continue;
    stack.emplace_back(root.lhs, false);
    while (!stack.empty()) {
      auto [id, closing] = stack.back();
      stack.pop_back();
      if (closing) {
        std::size_t total = 0;
        for (const auto& sym : g.rule(id).rhs) {
          if (sym.is_terminal())
            ++total;
          else
            total += lengths.at(sym.id());
        }
        lengths[id] = total;
        state[id] = State::closed;
        continue;
      }
      if (lengths.contains(id)) continue;
      auto it = state.find(id);
      if (it != state.end() && it->second == State::open)
        throw GrammarError("derivation cycle through N_" + std::to_string(id));
      state[id] = State::open;
      stack.emplace_back(id, true);
      for (const auto& sym : g.rule(id).rhs)
        if (sym.is_nonterminal() && !lengths.contains(sym.id()))
          stack.emplace_back(sym.id(), false);
    }
  }
  return lengths;
}

}  // namespace detail

// Number of non-overlapping occurrences of pattern across all rule rhs
// sequences, counted greedily left to right within each rhs; occurrences
// never cross rule boundaries.
template <typename Token>
std::size_t count(std::span<const Symbol<Token>> pattern, const Grammar<Token>& g) {
  if (pattern.empty()) throw std::invalid_argument("count: empty pattern");
  std::size_t total = 0;
  for (const auto& rule : g.rules())
    total += detail::greedy_matches(rule.rhs, pattern).size();
  return total;
}

template <typename Token>
std::size_t count(const SymbolSeq<Token>& pattern, const Grammar<Token>& g) {
  return count(std::span<const Symbol<Token>>(pattern), g);
}

// Every contiguous subsequence of length >= 2, drawn from a single rhs, that
// occurs at least twice (greedy non-overlapping count across all rhs).
// Ordered by first occurrence in rule order, then by length.
template <typename Token>
std::vector<SymbolSeq<Token>> repeats(const Grammar<Token>& g) {
  auto cg = detail::CodedGrammar<Token>::build(g);
  std::vector<SymbolSeq<Token>> out;
  for (const auto& info : detail::repeats_coded(cg))
    out.push_back(cg.decode_window(info.rule, info.pos, info.length));
  return out;
}

// Grammar with every non-overlapping occurrence of pattern replaced by the
// single symbol n; no rule for n is added.
template <typename Token>
Grammar<Token> substitute(const Grammar<Token>& g, std::span<const Symbol<Token>> pattern,
                          NonTerminalId n) {
  if (pattern.empty()) throw std::invalid_argument("substitute: empty pattern");
  if (g.defines(n))
    throw std::invalid_argument("substitute: N_" + std::to_string(n) + " already defined");
  Grammar<Token> out = g;
  detail::substitute_in_place(out, pattern, n);
  return out;
}

template <typename Token>
Grammar<Token> substitute(const Grammar<Token>& g, const SymbolSeq<Token>& pattern,
                          NonTerminalId n) {
  return substitute(g, std::span<const Symbol<Token>>(pattern), n);
}

// Length of the sequence formed by joining all rhs with one delimiter
// between consecutive rules.
template <typename Token>
std::size_t grammar_size(const Grammar<Token>& g) {
  std::size_t total = 0;
  for (const auto& rule : g.rules()) total += rule.rhs.size();
  return total + g.rule_count() - 1;
}

// The unique terminal sequence derived from n by exhaustive rule application.
template <typename Token>
std::vector<Token> expand(const Grammar<Token>& g, NonTerminalId n) {
  if (!g.defines(n))
    throw GrammarError("undefined non-terminal N_" + std::to_string(n));
  auto lengths = detail::expansion_lengths(g);  // validates reachable cycles/refs

  std::vector<Token> out;
  out.reserve(lengths.at(n));
  // Explicit stack of (rule, position) frames.
  std::vector<std::pair<NonTerminalId, std::size_t>> stack{{n, 0}};
  while (!stack.empty()) {
    auto& [id, pos] = stack.back();
    const SymbolSeq<Token>& seq = g.rule(id).rhs;
    if (pos == seq.size()) {
      stack.pop_back();
      continue;
    }
    const Symbol<Token>& sym = seq[pos];
    ++pos;
    if (sym.is_terminal())
      out.push_back(sym.token());
    else
      stack.emplace_back(sym.id(), 0);
  }
  return out;
}

}  // namespace gramseg
