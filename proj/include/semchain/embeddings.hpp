#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace semchain {

// One hit from a nearest-neighbor query.
struct Neighbor {
  std::string term;
  double similarity = 0.0;
};

// Vocabulary of terms embedded in a fixed-dimension real vector space.
// Built single-threaded, then treated as immutable; lookups return stable
// references for the lifetime of the store.
class EmbeddingStore {
 public:
  EmbeddingStore(Eigen::Index dimension, bool normalized);

  // Build phase only. Unit-normalizes the vector when the store is in
  // normalized mode. Throws on empty or duplicate terms, dimension
  // mismatches, and zero vectors that cannot be normalized.
  void add(std::string term, Eigen::VectorXd vec);
  void reserve(std::size_t count);

  Eigen::Index dimension() const { return dim_; }
  std::size_t size() const { return vecs_.size(); }
  bool normalized() const { return normalized_; }

  bool contains(std::string_view term) const;
  std::size_t index_of(std::string_view term) const;  // throws, naming the term
  const std::string& term_at(std::size_t i) const { return terms_[i]; }
  const Eigen::VectorXd& vector_at(std::size_t i) const { return vecs_[i]; }
  const Eigen::VectorXd& vector_of(std::string_view term) const;
  double norm_at(std::size_t i) const { return norms_[i]; }

  // Dense dimension x size copy, column i = vector of term_at(i).
  Eigen::MatrixXd term_matrix() const;

 private:
  Eigen::Index dim_;
  bool normalized_;
  std::vector<std::string> terms_;
  std::vector<Eigen::VectorXd> vecs_;
  std::vector<double> norms_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Parses word-vector text: a "<count> <dimension>" header line, then one
// "<term> <dimension floats>" line per term, space-separated. Malformed
// input throws with a line number.
EmbeddingStore load_embeddings(std::istream& in, bool normalize);
EmbeddingStore load_embeddings_file(const std::string& path, bool normalize);

// Deterministic synthetic vocabulary t0..t<count-1>: i.i.d. standard normal
// components, unit-normalized. Same seed, same store.
EmbeddingStore synth_embeddings(std::size_t count, Eigen::Index dimension,
                                std::uint64_t seed);

double cosine(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

// Top-k terms by cosine against the query; ties broken lexicographically.
std::vector<Neighbor> nearest(const EmbeddingStore& store,
                              const Eigen::VectorXd& query, std::size_t k);
std::vector<Neighbor> nearest(const EmbeddingStore& store,
                              const Eigen::VectorXd& query, std::size_t k,
                              const std::vector<std::string>& exclude);

// Unit-normalized mean of the member vectors.
Eigen::VectorXd category_vector(const EmbeddingStore& store,
                                const std::vector<std::string>& members);

// b - a + c completion; a, b and c are excluded from the ranking.
std::vector<Neighbor> analogy(const EmbeddingStore& store,
                              const std::string& a, const std::string& b,
                              const std::string& c, std::size_t k);

}  // namespace semchain
