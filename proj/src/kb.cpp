#include "semchain/kb.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace semchain {

namespace detail {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace detail

namespace {

using detail::csv_field;

void validate_triple(const Triple& t) {
  if (t.head.empty() || t.predicate.empty() || t.tail.empty())
    throw std::invalid_argument("triple with empty field (head='" + t.head +
                                "', predicate='" + t.predicate + "', tail='" +
                                t.tail + "')");
  if (t.head == t.tail)
    throw std::invalid_argument("self-loop triple '" + t.head + "' -> '" +
                                t.tail + "' has a zero fact vector");
}

}  // namespace

IngestResult ingest_triples(std::istream& in, const EmbeddingStore& store,
                            MissingPolicy on_missing) {
  IngestResult out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;

    const auto tab1 = line.find('\t');
    const auto tab2 = tab1 == std::string::npos ? std::string::npos
                                                : line.find('\t', tab1 + 1);
    if (tab1 == std::string::npos || tab2 == std::string::npos ||
        line.find('\t', tab2 + 1) != std::string::npos)
      throw std::runtime_error(
          "triples line " + std::to_string(line_no) +
          ": expected head<TAB>predicate<TAB>tail");

    Triple t{line.substr(0, tab1), line.substr(tab1 + 1, tab2 - tab1 - 1),
             line.substr(tab2 + 1)};
    if (t.head.empty() || t.predicate.empty() || t.tail.empty())
      throw std::runtime_error("triples line " + std::to_string(line_no) +
                               ": empty field");
    if (t.head == t.tail)
      throw std::runtime_error("triples line " + std::to_string(line_no) +
                               ": self-loop '" + t.head + "' -> '" + t.tail +
                               "'");

    const bool head_known = store.contains(t.head);
    const bool tail_known = store.contains(t.tail);
    if (!head_known || !tail_known) {
      if (on_missing == MissingPolicy::kError)
        throw std::runtime_error("triples line " + std::to_string(line_no) +
                                 ": unknown term '" +
                                 (head_known ? t.tail : t.head) + "'");
      ++out.skipped;
      continue;
    }
    out.triples.push_back(std::move(t));
  }
  return out;
}

IngestResult ingest_triples_file(const std::string& path,
                                 const EmbeddingStore& store,
                                 MissingPolicy on_missing) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open triples file '" + path + "'");
  return ingest_triples(in, store, on_missing);
}

Eigen::VectorXd fact_vector(const EmbeddingStore& store, const Triple& t) {
  validate_triple(t);
  return store.vector_of(t.tail) - store.vector_of(t.head);
}

std::string Fact::predicate_label() const {
  std::string out;
  for (std::size_t i = 0; i < predicates.size(); ++i) {
    if (i) out += '|';
    out += predicates[i];
  }
  return out;
}

FactDictionary FactDictionary::build(
    const EmbeddingStore& store, const std::vector<Triple>& triples,
    std::optional<std::set<std::string>> predicate_filter) {
  FactDictionary d;
  d.store_ = &store;
  d.filter_ = std::move(predicate_filter);

  for (const Triple& t : triples) {
    if (d.filter_ && !d.filter_->count(t.predicate)) continue;
    validate_triple(t);
    store.index_of(t.head);  // throws naming an unknown term
    store.index_of(t.tail);

    const auto key = std::make_pair(t.head, t.tail);
    auto it = d.pair_index_.find(key);
    if (it == d.pair_index_.end()) {
      d.pair_index_.emplace(key, d.facts_.size());
      d.facts_.push_back(Fact{t.head, t.tail, {t.predicate}});
    } else {
      auto& preds = d.facts_[it->second].predicates;
      if (std::find(preds.begin(), preds.end(), t.predicate) == preds.end())
        preds.push_back(t.predicate);
    }
  }

  if (d.facts_.empty())
    throw std::runtime_error(
        "build_dictionary: no facts remain after filtering");

  d.atoms_.resize(store.dimension(), static_cast<Eigen::Index>(d.facts_.size()));
  for (std::size_t j = 0; j < d.facts_.size(); ++j)
    d.atoms_.col(static_cast<Eigen::Index>(j)) =
        store.vector_of(d.facts_[j].tail) - store.vector_of(d.facts_[j].head);
  d.sq_norms_ = d.atoms_.colwise().squaredNorm();
  return d;
}

std::optional<std::size_t> FactDictionary::find(std::string_view head,
                                                std::string_view tail) const {
  auto it = pair_index_.find(
      std::make_pair(std::string(head), std::string(tail)));
  if (it == pair_index_.end()) return std::nullopt;
  return it->second;
}

std::vector<Triple> FactDictionary::as_triples() const {
  std::vector<Triple> out;
  for (const Fact& f : facts_)
    for (const std::string& p : f.predicates)
      out.push_back(Triple{f.head, p, f.tail});
  return out;
}

void FactDictionary::export_csv(std::ostream& out) const {
  out << "fact_index,head,predicate,tail\n";
  for (std::size_t j = 0; j < facts_.size(); ++j)
    for (const std::string& p : facts_[j].predicates)
      out << j << ',' << csv_field(facts_[j].head) << ',' << csv_field(p)
          << ',' << csv_field(facts_[j].tail) << '\n';
}

Goal goal_vector(const EmbeddingStore& store, const std::string& g,
                 const std::string& p) {
  if (g == p)
    throw std::invalid_argument("goal_vector: identical endpoints '" + g +
                                "'");
  Goal goal;
  goal.given = g;
  goal.targets = {p};
  goal.vec = store.vector_of(p) - store.vector_of(g);
  return goal;
}

Goal disjunctive_goal(const EmbeddingStore& store, const std::string& g,
                      const std::vector<std::string>& candidates) {
  if (candidates.empty())
    throw std::invalid_argument("disjunctive_goal: no candidates");
  Goal goal;
  goal.given = g;
  goal.targets = candidates;
  goal.vec = -store.vector_of(g);
  for (const std::string& c : candidates) {
    if (c == g)
      throw std::invalid_argument(
          "disjunctive_goal: candidate equals the given term '" + g + "'");
    goal.vec += store.vector_of(c);
  }
  return goal;
}

}  // namespace semchain
