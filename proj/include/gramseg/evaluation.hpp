#pragma once

#include <algorithm>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gramseg/segmentation.hpp"

namespace gramseg {

// Minimum number of single-element insertions, deletions, and substitutions
// transforming a into b, all at unit cost.
template <typename T>
std::size_t levenshtein(std::span<const T> a, std::span<const T> b) {
  if (a.size() > b.size()) return levenshtein(b, a);
  std::vector<std::size_t> row(a.size() + 1);
  for (std::size_t i = 0; i <= a.size(); ++i) row[i] = i;
  for (std::size_t j = 1; j <= b.size(); ++j) {
    std::size_t diagonal = row[0];
    row[0] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
      std::size_t next_diagonal = row[i];
      if (a[i - 1] == b[j - 1])
        row[i] = diagonal;
      else
        row[i] = 1 + std::min({row[i], row[i - 1], diagonal});
      diagonal = next_diagonal;
    }
  }
  return row[a.size()];
}

template <typename T>
std::size_t levenshtein(const std::vector<T>& a, const std::vector<T>& b) {
  return levenshtein(std::span<const T>(a), std::span<const T>(b));
}

// Normalized similarity 1 - Lev(a, b) / max(|a|, |b|), in [0, 1].
template <typename T>
double similarity(std::span<const T> a, std::span<const T> b) {
  const std::size_t longest = std::max(a.size(), b.size());
  if (longest == 0)
    throw std::invalid_argument("similarity: both sequences empty");
  return 1.0 - static_cast<double>(levenshtein(a, b)) / static_cast<double>(longest);
}

template <typename T>
double similarity(const std::vector<T>& a, const std::vector<T>& b) {
  return similarity(std::span<const T>(a), std::span<const T>(b));
}

// The subsequence an occurrence demarcates, as a view into seq.
template <typename T>
std::span<const T> extract(const Occurrence& o, std::span<const T> seq) {
  if (o.end() >= seq.size())
    throw std::invalid_argument("extract: occurrence [" + std::to_string(o.start()) + ", " +
                                std::to_string(o.end()) + "] exceeds sequence length " +
                                std::to_string(seq.size()));
  return seq.subspan(o.start(), o.length());
}

struct FuzzyMatchResult {
  std::size_t matched_ground_truth = 0;  // |A|, phrases of P matched by some phrase of Q
  std::size_t matched_discovered = 0;    // |B|, phrases of Q matched by some phrase of P
};

// Fuzzy phrase-set intersection: a phrase pair matches when any pair of their
// occurrences extracts subsequences with similarity >= tau; each phrase
// counts at most once.
template <typename T>
FuzzyMatchResult fuzzy_intersection(const Annotation& p, const Annotation& q,
                                    std::span<const T> seq, double tau) {
  if (tau < 0.0 || tau > 1.0)
    throw std::invalid_argument("fuzzy_intersection: tau must be within [0, 1]");
  std::vector<bool> matched_p(p.phrases.size(), false);
  std::vector<bool> matched_q(q.phrases.size(), false);
  for (std::size_t i = 0; i < p.phrases.size(); ++i) {
    for (std::size_t j = 0; j < q.phrases.size(); ++j) {
      if (matched_p[i] && matched_q[j]) continue;
      bool pair_matched = false;
      for (const Occurrence& op : p.phrases[i].occurrences) {
        auto wp = extract(op, seq);
        for (const Occurrence& oq : q.phrases[j].occurrences) {
          if (similarity(wp, extract(oq, seq)) >= tau) {
            pair_matched = true;
            break;
          }
        }
        if (pair_matched) break;
      }
      if (pair_matched) {
        matched_p[i] = true;
        matched_q[j] = true;
      }
    }
  }
  FuzzyMatchResult result;
  result.matched_ground_truth =
      static_cast<std::size_t>(std::count(matched_p.begin(), matched_p.end(), true));
  result.matched_discovered =
      static_cast<std::size_t>(std::count(matched_q.begin(), matched_q.end(), true));
  return result;
}

struct Scores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Precision counts discovered phrases that matched (|B| / |Q|), recall counts
// ground-truth phrases that matched (|A| / |P|); empty sets score zero.
template <typename T>
Scores precision_recall_f1(const Annotation& p, const Annotation& q, std::span<const T> seq,
                           double tau) {
  const FuzzyMatchResult m = fuzzy_intersection(p, q, seq, tau);
  Scores s;
  if (!q.phrases.empty())
    s.precision = static_cast<double>(m.matched_discovered) /
                  static_cast<double>(q.phrases.size());
  if (!p.phrases.empty())
    s.recall = static_cast<double>(m.matched_ground_truth) /
               static_cast<double>(p.phrases.size());
  if (s.precision + s.recall > 0.0)
    s.f1 = 2.0 * s.precision * s.recall / (s.precision + s.recall);
  return s;
}

// Entry (i, j) scores annotation i as ground truth against annotation j as
// discovered.
template <typename T>
std::vector<std::vector<double>> pairwise_f1_matrix(
    const std::vector<std::pair<std::string, Annotation>>& annotations,
    std::span<const T> seq, double tau) {
  if (annotations.size() < 2)
    throw std::invalid_argument("pairwise_f1_matrix: need at least two annotations");
  const std::size_t n = annotations.size();
  std::vector<std::vector<double>> matrix(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      matrix[i][j] =
          precision_recall_f1(annotations[i].second, annotations[j].second, seq, tau).f1;
  return matrix;
}

}  // namespace gramseg
