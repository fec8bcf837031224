#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "fixtures.hpp"
#include "gramseg/evaluation.hpp"
#include "oracles.hpp"

using namespace gramseg;

namespace {

std::vector<int> seq(std::initializer_list<int> v) { return std::vector<int>(v); }

Annotation one_phrase(const std::string& label, std::initializer_list<Occurrence> occs) {
  Annotation a;
  a.phrases.push_back({label, std::vector<Occurrence>(occs)});
  return a;
}

// Random annotation with phrase occurrences drawn inside [0, len).
Annotation random_annotation(std::mt19937& rng, std::size_t len, int max_phrases,
                             int max_occurrences) {
  Annotation a;
  std::uniform_int_distribution<int> phrase_dist(0, max_phrases);
  std::uniform_int_distribution<int> occ_dist(1, max_occurrences);
  int phrases = phrase_dist(rng);
  for (int p = 0; p < phrases; ++p) {
    Phrase phrase;
    phrase.label = "p" + std::to_string(p);
    int occs = occ_dist(rng);
    for (int k = 0; k < occs; ++k) {
      std::uniform_int_distribution<std::size_t> start_dist(0, len - 2);
      std::size_t start = start_dist(rng);
      std::uniform_int_distribution<std::size_t> end_dist(start + 1, len - 1);
      phrase.occurrences.emplace_back(start, end_dist(rng));
    }
    a.phrases.push_back(std::move(phrase));
  }
  return a;
}

}  // namespace

TEST_CASE("levenshtein basics") {
  CHECK(levenshtein(seq({1, 2, 3}), seq({1, 2, 3})) == 0);
  CHECK(levenshtein(seq({1, 2, 3}), seq({1, 2, 4})) == 1);
  CHECK(levenshtein(seq({}), seq({1, 2})) == 2);
  CHECK(levenshtein(seq({1, 2}), seq({})) == 2);
  CHECK(levenshtein(seq({1, 2, 3}), seq({2, 3})) == 1);
}

TEST_CASE("levenshtein equals the full-matrix oracle and is a metric") {
  std::mt19937 rng(59);
  std::uniform_int_distribution<std::size_t> len_dist(0, 6);
  std::uniform_int_distribution<int> tok(0, 2);
  auto gen = [&] {
    std::vector<int> v(len_dist(rng));
    for (auto& t : v) t = tok(rng);
    return v;
  };
  for (int trial = 0; trial < 400; ++trial) {
    auto a = gen();
    auto b = gen();
    auto c = gen();
    std::size_t ab = levenshtein(a, b);
    CHECK(ab == oracles::levenshtein(a, b));
    CHECK(ab == levenshtein(b, a));                       // symmetry
    CHECK((ab == 0) == (a == b));                         // identity
    CHECK(levenshtein(a, c) <= ab + levenshtein(b, c));   // triangle
  }
}

TEST_CASE("levenshtein compares feature vectors componentwise") {
  FeatureVector with_null{{std::nullopt, Rational(1)}};
  FeatureVector with_null2{{std::nullopt, Rational(1)}};
  FeatureVector filled{{Rational(0), Rational(1)}};
  std::vector<FeatureVector> a{with_null, filled};
  std::vector<FeatureVector> b{with_null2, filled};
  CHECK(levenshtein(a, b) == 0);
  std::vector<FeatureVector> c{filled, filled};
  CHECK(levenshtein(a, c) == 1);
}

TEST_CASE("similarity") {
  CHECK(similarity(seq({1, 2, 3}), seq({1, 2, 3})) == 1.0);
  CHECK_THAT(similarity(seq({1, 2, 3}), seq({1, 2, 4})),
             Catch::Matchers::WithinAbs(2.0 / 3.0, 1e-12));
  CHECK(similarity(seq({1}), seq({2, 3})) == 0.0);
  CHECK_THROWS_AS(similarity(seq({}), seq({})), std::invalid_argument);
  std::mt19937 rng(61);
  std::uniform_int_distribution<std::size_t> len_dist(1, 8);
  std::uniform_int_distribution<int> tok(0, 3);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<int> a(len_dist(rng));
    for (auto& t : a) t = tok(rng);
    CHECK(similarity(a, a) == 1.0);
    std::vector<int> b(len_dist(rng));
    for (auto& t : b) t = tok(rng);
    CHECK(similarity(a, b) == similarity(b, a));
    CHECK(similarity(a, b) >= 0.0);
    CHECK(similarity(a, b) <= 1.0);
  }
}

TEST_CASE("extract") {
  auto s = seq({10, 11, 12, 13});
  auto window = extract(Occurrence(0, 2), std::span<const int>(s));
  CHECK(std::vector<int>(window.begin(), window.end()) == seq({10, 11, 12}));

  auto s5 = seq({1, 2, 3, 4, 5});
  auto tail = extract(Occurrence(3, 4), std::span<const int>(s5));
  CHECK(std::vector<int>(tail.begin(), tail.end()) == seq({4, 5}));

  CHECK_THROWS_AS(extract(Occurrence(2, 5), std::span<const int>(s)), std::invalid_argument);
}

TEST_CASE("fuzzy intersection basics") {
  auto s = seq({1, 2, 3, 4, 1, 2, 3, 4});
  Annotation p;
  p.phrases.push_back({"A", {Occurrence(0, 3)}});
  p.phrases.push_back({"B", {Occurrence(4, 7)}});

  auto self = fuzzy_intersection(p, p, std::span<const int>(s), 0.7);
  CHECK(self.matched_ground_truth == 2);
  CHECK(self.matched_discovered == 2);

  Annotation empty;
  auto none = fuzzy_intersection(p, empty, std::span<const int>(s), 0.7);
  CHECK(none.matched_ground_truth == 0);
  CHECK(none.matched_discovered == 0);

  CHECK_THROWS_AS(fuzzy_intersection(p, p, std::span<const int>(s), 1.5),
                  std::invalid_argument);
}

TEST_CASE("fuzzy intersection near-match thresholds") {
  // P1 = (1,2,3,4) vs Q1 = (1,2,3,5): one substitution, similarity 0.75.
  // P2 = (1,9,9,5) vs Q1: two substitutions, similarity 0.5.
  auto s = seq({1, 2, 3, 4, 1, 9, 9, 5, 1, 2, 3, 5});
  Annotation p;
  p.phrases.push_back({"P1", {Occurrence(0, 3)}});
  p.phrases.push_back({"P2", {Occurrence(4, 7)}});
  Annotation q = one_phrase("Q1", {Occurrence(8, 11)});

  auto r = fuzzy_intersection(p, q, std::span<const int>(s), 0.7);
  CHECK(r.matched_ground_truth == 1);
  CHECK(r.matched_discovered == 1);

  // at tau 0.5 the second phrase matches as well
  auto loose = fuzzy_intersection(p, q, std::span<const int>(s), 0.5);
  CHECK(loose.matched_ground_truth == 2);
  CHECK(loose.matched_discovered == 1);
}

TEST_CASE("precision recall f1") {
  auto s = seq({1, 2, 3, 4, 5, 6, 7, 8});
  {
    Annotation p = one_phrase("A", {Occurrence(0, 3)});
    auto scores = precision_recall_f1(p, p, std::span<const int>(s), 0.7);
    CHECK(scores.precision == 1.0);
    CHECK(scores.recall == 1.0);
    CHECK(scores.f1 == 1.0);
  }
  {
    // |A| = 1 of |P| = 2, |B| = 1 of |Q| = 1
    Annotation p;
    p.phrases.push_back({"A", {Occurrence(0, 2)}});
    p.phrases.push_back({"B", {Occurrence(4, 6)}});
    Annotation q = one_phrase("X", {Occurrence(0, 2)});
    auto scores = precision_recall_f1(p, q, std::span<const int>(s), 1.0);
    CHECK(scores.precision == 1.0);
    CHECK(scores.recall == 0.5);
    CHECK_THAT(scores.f1, Catch::Matchers::WithinAbs(2.0 / 3.0, 1e-12));
  }
  {
    // no matches at all
    Annotation p = one_phrase("A", {Occurrence(0, 2)});
    Annotation q = one_phrase("X", {Occurrence(4, 7)});
    auto scores = precision_recall_f1(p, q, std::span<const int>(s), 1.0);
    CHECK(scores.precision == 0.0);
    CHECK(scores.recall == 0.0);
    CHECK(scores.f1 == 0.0);
  }
  {
    // zero-denominator conventions
    Annotation p = one_phrase("A", {Occurrence(0, 2)});
    Annotation empty;
    auto no_q = precision_recall_f1(p, empty, std::span<const int>(s), 0.7);
    CHECK(no_q.precision == 0.0);
    CHECK(no_q.f1 == 0.0);
    auto no_p = precision_recall_f1(empty, p, std::span<const int>(s), 0.7);
    CHECK(no_p.recall == 0.0);
    CHECK(no_p.f1 == 0.0);
  }
}

TEST_CASE("fuzzy intersection agrees with the brute-force oracle") {
  std::mt19937 rng(67);
  for (int trial = 0; trial < 150; ++trial) {
    std::uniform_int_distribution<std::size_t> len_dist(2, 16);
    std::size_t len = len_dist(rng);
    std::vector<int> s(len);
    std::uniform_int_distribution<int> tok(0, 3);
    for (auto& t : s) t = tok(rng);
    Annotation p = random_annotation(rng, len, 4, 3);
    Annotation q = random_annotation(rng, len, 4, 3);
    for (double tau : {0.0, 0.3, 0.7, 1.0}) {
      auto got = fuzzy_intersection(p, q, std::span<const int>(s), tau);
      auto want = oracles::fuzzy_intersection(p, q, s, tau);
      CHECK(got.matched_ground_truth == want.first);
      CHECK(got.matched_discovered == want.second);
    }
    // monotonicity: lowering tau never decreases either count
    std::size_t prev_a = 0;
    std::size_t prev_b = 0;
    for (double tau : {1.0, 0.7, 0.3, 0.0}) {
      auto got = fuzzy_intersection(p, q, std::span<const int>(s), tau);
      CHECK(got.matched_ground_truth >= prev_a);
      CHECK(got.matched_discovered >= prev_b);
      prev_a = got.matched_ground_truth;
      prev_b = got.matched_discovered;
    }
  }
}

TEST_CASE("exact-tau intersection counts distinct subsequence matches") {
  // with tau = 1 and pairwise-distinct extracted subsequences, the fuzzy
  // intersection degenerates to exact set intersection
  auto s = seq({1, 2, 3, 4, 5, 6, 1, 2});
  Annotation p;
  p.phrases.push_back({"A", {Occurrence(0, 1)}});   // (1,2)
  p.phrases.push_back({"B", {Occurrence(2, 3)}});   // (3,4)
  Annotation q;
  q.phrases.push_back({"X", {Occurrence(6, 7)}});   // (1,2) again
  q.phrases.push_back({"Y", {Occurrence(3, 4)}});   // (4,5)
  auto r = fuzzy_intersection(p, q, std::span<const int>(s), 1.0);
  CHECK(r.matched_ground_truth == 1);
  CHECK(r.matched_discovered == 1);
}

TEST_CASE("pairwise f1 matrix") {
  auto s = seq({1, 2, 3, 4, 1, 2, 3, 4});
  Annotation a = one_phrase("A", {Occurrence(0, 3), Occurrence(4, 7)});
  Annotation b = one_phrase("B", {Occurrence(0, 3), Occurrence(4, 7)});
  Annotation c = one_phrase("C", {Occurrence(1, 2)});

  std::vector<std::pair<std::string, Annotation>> annotations{
      {"first", a}, {"second", b}, {"third", c}};
  auto matrix = pairwise_f1_matrix(annotations, std::span<const int>(s), 0.7);
  REQUIRE(matrix.size() == 3);
  for (const auto& row : matrix) REQUIRE(row.size() == 3);
  CHECK(matrix[0][0] == 1.0);
  CHECK(matrix[0][1] == 1.0);
  CHECK(matrix[1][0] == 1.0);
  CHECK(matrix[0][2] == 0.0);  // (1,2,3,4) vs (2,3) similarity 0.5 < 0.7
  CHECK(matrix[2][2] == 1.0);

  std::vector<std::pair<std::string, Annotation>> too_few{{"only", a}};
  CHECK_THROWS_AS(pairwise_f1_matrix(too_few, std::span<const int>(s), 0.7),
                  std::invalid_argument);
}

TEST_CASE("hymn annotators split into two agreement camps") {
  // Annotators 2-5 segmented the hymn into four 4-bar phrases; 2 and 5 also
  // marked bars 1-4 and 5-8 as the same pattern, 3 and 4 did not. Annotator 1
  // used much shorter phrases, so under the duration viewpoint their phrases
  // match nobody at tau 0.7.
  auto events = fixtures::hymn2_events();
  auto tokens = transform(vci_to_combination(2), events);

  Annotation ann1 = fixtures::hymn2_annotator1();
  Annotation four_bars;  // annotators 3 and 4
  four_bars.phrases.push_back({"1-4", {Occurrence(0, 17)}});
  four_bars.phrases.push_back({"5-8", {Occurrence(18, 35)}});
  four_bars.phrases.push_back({"9-12", {Occurrence(36, 52)}});
  four_bars.phrases.push_back({"13-16", {Occurrence(53, 73)}});
  Annotation with_pattern;  // annotators 2 and 5
  with_pattern.phrases.push_back({"A", {Occurrence(0, 17), Occurrence(18, 35)}});
  with_pattern.phrases.push_back({"B", {Occurrence(36, 52)}});
  with_pattern.phrases.push_back({"C", {Occurrence(53, 73)}});

  std::vector<std::pair<std::string, Annotation>> annotations{
      {"ann1", ann1},
      {"ann2", with_pattern},
      {"ann3", four_bars},
      {"ann4", four_bars},
      {"ann5", with_pattern}};
  auto matrix =
      pairwise_f1_matrix(annotations, std::span<const FeatureVector>(tokens), 0.7);
  for (std::size_t j = 1; j < 5; ++j) {
    CHECK(matrix[0][j] == 0.0);
    CHECK(matrix[j][0] == 0.0);
  }
  for (std::size_t i = 1; i < 5; ++i)
    for (std::size_t j = 1; j < 5; ++j) CHECK(matrix[i][j] == 1.0);
}
