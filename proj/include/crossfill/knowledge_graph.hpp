#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "crossfill/experts.hpp"

namespace crossfill {

struct Concept {
  std::string id;
  std::vector<std::string> lemmas;
  std::string definition;
  std::vector<std::pair<std::string, std::string>> relations;  // (kind, target concept id)
  std::vector<std::string> inflections;                        // normalized
};

class KnowledgeGraph {
 public:
  KnowledgeGraph() = default;

  explicit KnowledgeGraph(std::vector<Concept> concepts) : concepts_(std::move(concepts)) {
    for (std::size_t i = 0; i < concepts_.size(); ++i) {
      if (concepts_[i].lemmas.empty()) throw Error("concept '" + concepts_[i].id + "' has no lemmas");
      if (!by_id_.emplace(concepts_[i].id, i).second) throw Error("duplicate concept id '" + concepts_[i].id + "'");
    }
    for (const auto& c : concepts_) {
      for (const auto& [kind, target] : c.relations) {
        if (!by_id_.count(target)) throw Error("concept '" + c.id + "' relates to unknown concept '" + target + "'");
      }
    }
  }

  const std::vector<Concept>& concepts() const { return concepts_; }
  std::size_t size() const { return concepts_.size(); }
  bool empty() const { return concepts_.empty(); }

  const Concept& at(std::string_view id) const { return concepts_.at(by_id_.at(std::string(id))); }

  /// Lemmas, definition and the lemmas of related concepts, space-joined.
  std::string pseudo_document(const Concept& c) const {
    std::string doc;
    const auto append = [&](std::string_view s) {
      if (!doc.empty()) doc.push_back(' ');
      doc.append(s);
    };
    for (const auto& l : c.lemmas) append(l);
    append(c.definition);
    for (const auto& [kind, target] : c.relations) {
      for (const auto& l : at(target).lemmas) append(l);
    }
    return doc;
  }

 private:
  std::vector<Concept> concepts_;
  std::map<std::string, std::size_t> by_id_;
};

// Concept blocks separated by blank lines:
//
//   concept: C12
//   lemmas: malade; souffrant
//   definition: Atteint d'une maladie
//   relations: synonym C13; antonym C40
//   inflections: malades; souffrante
inline KnowledgeGraph parse_knowledge_graph(std::string_view content) {
  std::vector<Concept> concepts;
  std::optional<Concept> current;
  std::size_t line_no = 0;
  const auto list = [](std::string_view value) {
    std::vector<std::string> out;
    for (auto part : text::split(value, ';')) {
      part = text::trim(part);
      if (!part.empty()) out.emplace_back(part);
    }
    return out;
  };
  const auto flush = [&] {
    if (current) concepts.push_back(std::move(*current));
    current.reset();
  };
  for (std::string_view line : text::lines(content)) {
    ++line_no;
    line = text::trim(line);
    if (line.empty()) {
      flush();
      continue;
    }
    const std::size_t colon = line.find(':');
    if (colon == std::string_view::npos) throw Error("knowledge graph line " + std::to_string(line_no) + ": missing ':'");
    const std::string_view key = text::trim(line.substr(0, colon));
    const std::string_view value = text::trim(line.substr(colon + 1));
    if (key == "concept") {
      flush();
      current = Concept{};
      current->id = std::string(value);
      continue;
    }
    if (!current) throw Error("knowledge graph line " + std::to_string(line_no) + ": field outside a concept block");
    if (key == "lemmas") {
      current->lemmas = list(value);
    } else if (key == "definition") {
      current->definition = std::string(value);
    } else if (key == "relations") {
      for (const auto& rel : list(value)) {
        const auto sp = rel.find(' ');
        if (sp == std::string::npos) throw Error("knowledge graph line " + std::to_string(line_no) + ": relation needs 'kind target'");
        current->relations.emplace_back(rel.substr(0, sp), std::string(text::trim(std::string_view(rel).substr(sp + 1))));
      }
    } else if (key == "inflections") {
      for (const auto& inf : list(value)) current->inflections.push_back(text::normalize_answer(inf));
    } else {
      throw Error("knowledge graph line " + std::to_string(line_no) + ": unknown field '" + std::string(key) + "'");
    }
  }
  flush();
  return KnowledgeGraph(std::move(concepts));
}

inline KnowledgeGraph load_knowledge_graph(const std::filesystem::path& path) {
  return parse_knowledge_graph(read_file(path));
}

/// Searches concept pseudo-documents by cosine similarity and emits the
/// lemmas and inflections of the closest concepts.
class KnowledgeGraphExpert final : public Expert {
 public:
  KnowledgeGraphExpert(std::shared_ptr<const KnowledgeGraph> graph, SimilarityConfig config = {},
                       std::unique_ptr<TextEncoder> encoder = std::make_unique<TrigramTfidfEncoder>())
      : graph_(std::move(graph)), config_(config), encoder_(std::move(encoder)) {
    std::vector<std::string> docs;
    for (const auto& c : graph_->concepts()) docs.push_back(graph_->pseudo_document(c));
    encoder_->fit(docs);
    std::vector<SparseVector> vectors;
    for (const auto& d : docs) vectors.push_back(encoder_->encode(d));
    index_ = CosineIndex(vectors);
    for (const auto& c : graph_->concepts()) {
      std::set<std::string> answers;
      for (const auto& l : c.lemmas) {
        try {
          if (auto a = text::normalize_answer(l); !a.empty()) answers.insert(std::move(a));
        } catch (const Error&) {
          // lemmas with digits or symbols never fit a grid
        }
      }
      answers.insert(c.inflections.begin(), c.inflections.end());
      answers_.emplace_back(answers.begin(), answers.end());
    }
  }

  const std::string& id() const override { return id_; }

  std::vector<CosineIndex::Hit> nearest_concepts(std::string_view clue, std::size_t k) const {
    return index_.nearest(encoder_->encode(clue), k);
  }

  const TextEncoder& encoder() const { return *encoder_; }

  CandidateList generate(std::string_view clue, int length) const override {
    return CandidateList::from_scores(std::string(clue), id_, length, detail::as_pairs(scores(clue)));
  }

  std::vector<Candidate> generate_any_length(std::string_view clue) const override {
    return detail::normalized_any_length(scores(clue));
  }

 private:
  std::map<std::string, double> scores(std::string_view clue) const {
    const auto hits = nearest_concepts(clue, config_.k);
    std::vector<double> cos;
    for (const auto& h : hits) cos.push_back(h.score);
    const auto weights = softmax(cos, config_.temperature);
    std::map<std::string, double> out;
    for (std::size_t i = 0; i < hits.size(); ++i) {
      for (const auto& a : answers_[hits[i].doc]) out[a] += weights[i];
    }
    return out;
  }

  std::string id_{expert_ids::kKnowledgeGraph};
  std::shared_ptr<const KnowledgeGraph> graph_;
  SimilarityConfig config_;
  std::unique_ptr<TextEncoder> encoder_;
  CosineIndex index_;
  std::vector<std::vector<std::string>> answers_;
};

}  // namespace crossfill
