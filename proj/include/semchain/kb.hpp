#pragma once

#include "semchain/embeddings.hpp"

#include <Eigen/Core>

#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace semchain {

struct Triple {
  std::string head;
  std::string predicate;
  std::string tail;
  friend bool operator==(const Triple&, const Triple&) = default;
};

enum class MissingPolicy { kSkip, kError };

struct IngestResult {
  std::vector<Triple> triples;
  std::size_t skipped = 0;  // lines dropped under MissingPolicy::kSkip
};

// Reads "head<TAB>predicate<TAB>tail" lines; '#' lines and blank lines are
// ignored. Self-loops and malformed lines throw with a line number.
// Triples whose head or tail is not in the store are skipped (and counted)
// or rejected, per policy.
IngestResult ingest_triples(std::istream& in, const EmbeddingStore& store,
                            MissingPolicy on_missing);
IngestResult ingest_triples_file(const std::string& path,
                                 const EmbeddingStore& store,
                                 MissingPolicy on_missing);

// The vector a fact contributes to a sum: tail minus head, so that chained
// facts telescope.
Eigen::VectorXd fact_vector(const EmbeddingStore& store, const Triple& t);

// One dictionary atom: an entity pair plus every predicate asserted for it.
// Triples sharing endpoints share an atom because their vectors are
// identical and no solver could tell them apart; the predicates are all
// kept for reporting.
struct Fact {
  std::string head;
  std::string tail;
  std::vector<std::string> predicates;
  std::string predicate_label() const;  // "p" or "p|q|..."
};

// Immutable solving dictionary over a set of triples. Holds a reference to
// the store it was built from; the store must outlive the dictionary.
class FactDictionary {
 public:
  static FactDictionary build(
      const EmbeddingStore& store, const std::vector<Triple>& triples,
      std::optional<std::set<std::string>> predicate_filter = std::nullopt);

  std::size_t size() const { return facts_.size(); }
  const Fact& fact(std::size_t j) const { return facts_[j]; }
  const std::vector<Fact>& facts() const { return facts_; }

  // dimension x size; column j is the vector of fact(j).
  const Eigen::MatrixXd& atoms() const { return atoms_; }
  const Eigen::VectorXd& atom_sq_norms() const { return sq_norms_; }

  const EmbeddingStore& store() const { return *store_; }
  const std::optional<std::set<std::string>>& predicate_filter() const {
    return filter_;
  }

  std::optional<std::size_t> find(std::string_view head,
                                  std::string_view tail) const;
  std::vector<Triple> as_triples() const;

  // "fact_index,head,predicate,tail"; one row per predicate of each fact.
  void export_csv(std::ostream& out) const;

 private:
  FactDictionary() = default;

  std::vector<Fact> facts_;
  Eigen::MatrixXd atoms_;
  Eigen::VectorXd sq_norms_;
  const EmbeddingStore* store_ = nullptr;
  std::optional<std::set<std::string>> filter_;
  std::map<std::pair<std::string, std::string>, std::size_t> pair_index_;
};

// What the solver is asked to explain: reach one target (or any of several)
// starting from a given term. vec is -given + sum(targets).
struct Goal {
  std::string given;
  std::vector<std::string> targets;
  Eigen::VectorXd vec;
};

Goal goal_vector(const EmbeddingStore& store, const std::string& g,
                 const std::string& p);
Goal disjunctive_goal(const EmbeddingStore& store, const std::string& g,
                      const std::vector<std::string>& candidates);

namespace detail {
// Quotes a CSV field only when it needs it.
std::string csv_field(const std::string& s);
}  // namespace detail

}  // namespace semchain
