#pragma once

#include <filesystem>
#include <fstream>
#include <set>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "gramseg/evaluation.hpp"
#include "gramseg/grammar.hpp"
#include "gramseg/segmentation.hpp"
#include "gramseg/viewpoints.hpp"

namespace gramseg {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline nlohmann::json rational_to_json(const Rational& r) {
  if (r.is_integer()) return r.num();
  return r.to_double();
}

inline Rational rational_from_json(const nlohmann::json& j) {
  if (j.is_number_integer()) return Rational(j.get<long long>());
  if (j.is_number()) return Rational::from_double(j.get<double>());
  throw IoError("expected a number, got: " + j.dump());
}

inline nlohmann::json feature_vector_to_json(const FeatureVector& fv) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& v : fv.values)
    arr.push_back(v ? rational_to_json(*v) : nlohmann::json(nullptr));
  return arr;
}

inline FeatureVector feature_vector_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw IoError("feature vector must be an array");
  FeatureVector fv;
  fv.values.reserve(j.size());
  for (const auto& v : j)
    fv.values.push_back(v.is_null() ? std::nullopt
                                    : std::optional<Rational>(rational_from_json(v)));
  return fv;
}

inline nlohmann::json symbol_to_json(const Symbol<FeatureVector>& sym) {
  nlohmann::json j;
  if (sym.is_terminal())
    j["t"] = feature_vector_to_json(sym.token());
  else
    j["n"] = sym.id();
  return j;
}

inline Symbol<FeatureVector> symbol_from_json(const nlohmann::json& j) {
  if (j.contains("t")) return Symbol<FeatureVector>::terminal(feature_vector_from_json(j["t"]));
  if (j.contains("n"))
    return Symbol<FeatureVector>::nonterminal(j["n"].get<NonTerminalId>());
  throw IoError("symbol must carry either \"t\" or \"n\": " + j.dump());
}

inline nlohmann::json grammar_to_json(const Grammar<FeatureVector>& g) {
  nlohmann::json rules = nlohmann::json::array();
  for (const auto& rule : g.rules()) {
    nlohmann::json jr;
    jr["lhs"] = rule.lhs;
    nlohmann::json rhs = nlohmann::json::array();
    for (const auto& sym : rule.rhs) rhs.push_back(symbol_to_json(sym));
    jr["rhs"] = std::move(rhs);
    rules.push_back(std::move(jr));
  }
  return nlohmann::json{{"rules", std::move(rules)}};
}

inline Grammar<FeatureVector> grammar_from_json(const nlohmann::json& j) {
  if (!j.contains("rules") || !j["rules"].is_array())
    throw IoError("grammar must carry a \"rules\" array");
  Grammar<FeatureVector> g;
  bool saw_start = false;
  for (const auto& jr : j["rules"]) {
    NonTerminalId id = jr.at("lhs").get<NonTerminalId>();
    SymbolSeq<FeatureVector> rhs;
    for (const auto& js : jr.at("rhs")) rhs.push_back(symbol_from_json(js));
    if (id == kStartSymbol) {
      if (saw_start) throw IoError("grammar defines the start rule twice");
      saw_start = true;
      g.set_rhs(kStartSymbol, std::move(rhs));
    } else {
      g.add_rule(id, std::move(rhs));
    }
  }
  if (!saw_start) throw IoError("grammar lacks a start rule");
  return g;
}

inline nlohmann::json annotation_to_json(const Annotation& annotation) {
  nlohmann::json arr = nlohmann::json::array();
  for (const Phrase& phrase : annotation.phrases) {
    nlohmann::json occurrences = nlohmann::json::array();
    for (const Occurrence& o : phrase.occurrences)
      occurrences.push_back(nlohmann::json::array({o.start(), o.end()}));
    arr.push_back(nlohmann::json{{"label", phrase.label},
                                 {"occurrences", std::move(occurrences)}});
  }
  return arr;
}

inline Annotation annotation_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw IoError("annotation must be an array of phrases");
  Annotation annotation;
  for (const auto& jp : j) {
    Phrase phrase;
    phrase.label = jp.at("label").get<std::string>();
    for (const auto& jo : jp.at("occurrences")) {
      if (!jo.is_array() || jo.size() != 2)
        throw IoError("occurrence must be a [start, end] pair");
      phrase.occurrences.emplace_back(jo[0].get<std::size_t>(), jo[1].get<std::size_t>());
    }
    annotation.phrases.push_back(std::move(phrase));
  }
  return annotation;
}

inline nlohmann::json note_event_to_json(const NoteEvent& e) {
  return nlohmann::json{{"onset", rational_to_json(e.onset)},
                        {"pitch", e.pitch},
                        {"duration", rational_to_json(e.duration)}};
}

inline NoteEvent note_event_from_json(const nlohmann::json& j) {
  NoteEvent e;
  e.onset = rational_from_json(j.at("onset"));
  e.pitch = j.at("pitch").get<int>();
  e.duration = rational_from_json(j.at("duration"));
  return e;
}

inline nlohmann::json annotated_sequence_to_json(const AnnotatedSequence& seq) {
  nlohmann::json events = nlohmann::json::array();
  for (const NoteEvent& e : seq.events) events.push_back(note_event_to_json(e));
  return nlohmann::json{{"id", seq.id},
                        {"events", std::move(events)},
                        {"annotation", annotation_to_json(seq.ground_truth)}};
}

inline AnnotatedSequence annotated_sequence_from_json(const nlohmann::json& j) {
  AnnotatedSequence seq;
  seq.id = j.at("id").get<std::string>();
  for (const auto& je : j.at("events")) seq.events.push_back(note_event_from_json(je));
  seq.ground_truth = annotation_from_json(j.at("annotation"));
  validate_events(seq.events, seq.id);
  validate_annotation(seq.ground_truth, seq.events.size(), seq.id);
  return seq;
}

namespace detail {

// Parses a file holding either one JSON value per line or a single top-level
// JSON array, applying fn to each element.
template <typename Fn>
void for_each_json_record(const std::filesystem::path& path, Fn&& fn) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  std::string text = buffer.str();
  std::size_t first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return;
  if (text[first] == '[') {
    nlohmann::json arr = nlohmann::json::parse(text);
    for (const auto& item : arr) fn(item);
    return;
  }
  // A single (possibly pretty-printed) object parses whole; anything else is
  // treated as one record per line.
  if (nlohmann::json whole = nlohmann::json::parse(text, nullptr, false); !whole.is_discarded()) {
    fn(whole);
    return;
  }
  std::istringstream lines(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      fn(nlohmann::json::parse(line));
    } catch (const nlohmann::json::parse_error& e) {
      throw IoError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

}  // namespace detail

inline std::vector<AnnotatedSequence> load_dataset_jsonl(const std::filesystem::path& path) {
  std::vector<AnnotatedSequence> out;
  std::set<std::string> ids;
  detail::for_each_json_record(path, [&](const nlohmann::json& j) {
    AnnotatedSequence seq = annotated_sequence_from_json(j);
    if (!ids.insert(seq.id).second)
      throw IoError(path.string() + ": duplicate sequence id '" + seq.id + "'");
    out.push_back(std::move(seq));
  });
  return out;
}

inline void save_dataset_jsonl(std::span<const AnnotatedSequence> sequences,
                               const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  for (const AnnotatedSequence& seq : sequences)
    out << annotated_sequence_to_json(seq).dump() << '\n';
}

// Line-grouped input: {"id": str, "lines": [[event, ...], ...]}. Ground truth
// is derived by grouping equivalent lines into phrases.
inline std::vector<AnnotatedSequence> load_essen_file(const std::filesystem::path& path) {
  std::vector<AnnotatedSequence> out;
  detail::for_each_json_record(path, [&](const nlohmann::json& j) {
    std::string id = j.at("id").get<std::string>();
    std::vector<std::vector<NoteEvent>> lines;
    for (const auto& jl : j.at("lines")) {
      std::vector<NoteEvent> line;
      for (const auto& je : jl) line.push_back(note_event_from_json(je));
      lines.push_back(std::move(line));
    }
    out.push_back(essen_group_phrases(std::move(id), lines));
  });
  return out;
}

inline Annotation load_annotation_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  nlohmann::json j = nlohmann::json::parse(in);
  return annotation_from_json(j);
}

// A single annotated sequence: either a bare JSON object or the first record
// of a JSONL file.
inline AnnotatedSequence load_sequence_file(const std::filesystem::path& path) {
  std::vector<AnnotatedSequence> found;
  detail::for_each_json_record(path, [&](const nlohmann::json& j) {
    if (found.empty()) found.push_back(annotated_sequence_from_json(j));
  });
  if (found.empty()) throw IoError(path.string() + ": no sequence records");
  return found.front();
}

}  // namespace gramseg
