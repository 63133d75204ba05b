#include "semchain/embeddings.hpp"

#include "semchain/rng.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>
#include <utility>

namespace semchain {

EmbeddingStore::EmbeddingStore(Eigen::Index dimension, bool normalized)
    : dim_(dimension), normalized_(normalized) {
  if (dimension < 2)
    throw std::invalid_argument("EmbeddingStore: dimension must be >= 2");
}

void EmbeddingStore::reserve(std::size_t count) {
  terms_.reserve(count);
  vecs_.reserve(count);
  norms_.reserve(count);
  index_.reserve(count);
}

void EmbeddingStore::add(std::string term, Eigen::VectorXd vec) {
  if (term.empty()) throw std::invalid_argument("add: empty term");
  if (vec.size() != dim_)
    throw std::invalid_argument("add: term '" + term + "' has dimension " +
                                std::to_string(vec.size()) + ", expected " +
                                std::to_string(dim_));
  if (index_.count(term))
    throw std::invalid_argument("add: duplicate term '" + term + "'");
  double n = vec.norm();
  if (normalized_) {
    if (n <= 0.0)
      throw std::invalid_argument("add: zero vector for term '" + term + "'");
    vec /= n;
    n = 1.0;
  }
  index_.emplace(term, terms_.size());
  terms_.push_back(std::move(term));
  vecs_.push_back(std::move(vec));
  norms_.push_back(n);
}

bool EmbeddingStore::contains(std::string_view term) const {
  return index_.find(std::string(term)) != index_.end();
}

std::size_t EmbeddingStore::index_of(std::string_view term) const {
  auto it = index_.find(std::string(term));
  if (it == index_.end())
    throw std::out_of_range("unknown term '" + std::string(term) + "'");
  return it->second;
}

const Eigen::VectorXd& EmbeddingStore::vector_of(std::string_view term) const {
  return vecs_[index_of(term)];
}

Eigen::MatrixXd EmbeddingStore::term_matrix() const {
  Eigen::MatrixXd m(dim_, static_cast<Eigen::Index>(vecs_.size()));
  for (std::size_t i = 0; i < vecs_.size(); ++i)
    m.col(static_cast<Eigen::Index>(i)) = vecs_[i];
  return m;
}

EmbeddingStore load_embeddings(std::istream& in, bool normalize) {
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("embeddings line 1: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  long long count = 0, dim = 0;
  {
    std::istringstream header(line);
    std::string extra;
    if (!(header >> count >> dim) || (header >> extra))
      throw std::runtime_error(
          "embeddings line 1: expected '<count> <dimension>' header");
  }
  if (count < 1 || dim < 2)
    throw std::runtime_error(
        "embeddings line 1: count must be >= 1 and dimension >= 2");

  EmbeddingStore store(static_cast<Eigen::Index>(dim), normalize);
  store.reserve(static_cast<std::size_t>(count));

  for (long long i = 0; i < count; ++i) {
    const std::size_t line_no = static_cast<std::size_t>(i) + 2;
    if (!std::getline(in, line))
      throw std::runtime_error("embeddings line " + std::to_string(line_no) +
                               ": unexpected end of input, declared " +
                               std::to_string(count) + " entries");
    if (!line.empty() && line.back() == '\r') line.pop_back();

    std::istringstream ls(line);
    std::string term;
    if (!(ls >> term))
      throw std::runtime_error("embeddings line " + std::to_string(line_no) +
                               ": missing term");
    Eigen::VectorXd v(dim);
    for (long long d = 0; d < dim; ++d) {
      if (!(ls >> v[d]))
        throw std::runtime_error("embeddings line " + std::to_string(line_no) +
                                 ": expected " + std::to_string(dim) +
                                 " floats for term '" + term + "'");
    }
    std::string extra;
    if (ls >> extra)
      throw std::runtime_error("embeddings line " + std::to_string(line_no) +
                               ": trailing tokens after term '" + term + "'");
    try {
      store.add(std::move(term), std::move(v));
    } catch (const std::exception& e) {
      throw std::runtime_error("embeddings line " + std::to_string(line_no) +
                               ": " + e.what());
    }
  }

  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty())
      throw std::runtime_error(
          "embeddings: more entries than the header declared (" +
          std::to_string(count) + ")");
  }
  return store;
}

EmbeddingStore load_embeddings_file(const std::string& path, bool normalize) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open embeddings file '" + path + "'");
  return load_embeddings(in, normalize);
}

EmbeddingStore synth_embeddings(std::size_t count, Eigen::Index dimension,
                                std::uint64_t seed) {
  if (count < 1)
    throw std::invalid_argument("synth_embeddings: count must be >= 1");
  if (dimension < 2)
    throw std::invalid_argument("synth_embeddings: dimension must be >= 2");
  std::mt19937_64 rng(seed);
  EmbeddingStore store(dimension, true);
  store.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Eigen::VectorXd v(dimension);
    for (Eigen::Index d = 0; d < dimension; ++d) v[d] = gaussian(rng);
    store.add("t" + std::to_string(i), std::move(v));
  }
  return store;
}

double cosine(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("cosine: dimension mismatch (" +
                                std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()) + ")");
  const double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0)
    throw std::domain_error("cosine: zero vector");
  return a.dot(b) / (na * nb);
}

std::vector<Neighbor> nearest(const EmbeddingStore& store,
                              const Eigen::VectorXd& query, std::size_t k,
                              const std::vector<std::string>& exclude) {
  if (query.size() != store.dimension())
    throw std::invalid_argument("nearest: query dimension " +
                                std::to_string(query.size()) + ", store has " +
                                std::to_string(store.dimension()));
  const double qn = query.norm();
  if (qn == 0.0) throw std::domain_error("nearest: zero query vector");

  std::unordered_set<std::string_view> excluded(exclude.begin(),
                                                exclude.end());
  std::vector<double> sims(store.size(), 0.0);
  std::vector<std::size_t> idx;
  idx.reserve(store.size());
  for (std::size_t i = 0; i < store.size(); ++i) {
    if (excluded.count(store.term_at(i))) continue;
    const double n = store.norm_at(i);
    if (n == 0.0) continue;  // raw zero vectors have no direction to rank
    sims[i] = store.vector_at(i).dot(query) / (n * qn);
    idx.push_back(i);
  }

  const std::size_t kk = std::min(k, idx.size());
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(kk),
                    idx.end(), [&](std::size_t a, std::size_t b) {
                      if (sims[a] != sims[b]) return sims[a] > sims[b];
                      return store.term_at(a) < store.term_at(b);
                    });

  std::vector<Neighbor> out;
  out.reserve(kk);
  for (std::size_t i = 0; i < kk; ++i)
    out.push_back({store.term_at(idx[i]), sims[idx[i]]});
  return out;
}

std::vector<Neighbor> nearest(const EmbeddingStore& store,
                              const Eigen::VectorXd& query, std::size_t k) {
  return nearest(store, query, k, {});
}

Eigen::VectorXd category_vector(const EmbeddingStore& store,
                                const std::vector<std::string>& members) {
  if (members.empty())
    throw std::invalid_argument("category_vector: empty member list");
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(store.dimension());
  for (const std::string& m : members) mean += store.vector_of(m);
  mean /= static_cast<double>(members.size());
  const double n = mean.norm();
  if (n == 0.0)
    throw std::domain_error(
        "category_vector: members average to the zero vector");
  return mean / n;
}

std::vector<Neighbor> analogy(const EmbeddingStore& store,
                              const std::string& a, const std::string& b,
                              const std::string& c, std::size_t k) {
  const Eigen::VectorXd query =
      store.vector_of(b) - store.vector_of(a) + store.vector_of(c);
  return nearest(store, query, k, {a, b, c});
}

}  // namespace semchain
