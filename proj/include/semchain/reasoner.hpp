#pragma once

#include "semchain/embeddings.hpp"
#include "semchain/kb.hpp"
#include "semchain/solver.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace semchain {

// How one link of a chain is justified: by a fact in the KB, by nothing
// but proximity in the embedding space, or by proximity that matches the
// offset of a selected fact elsewhere (an analogy).
enum class LinkKind { kDeductive, kAssociational, kAnalogical };

struct ChainStep {
  std::string from;
  std::string to;
  LinkKind kind = LinkKind::kAssociational;
  // Deductive: the fact asserting this edge. Analogical: the donor fact
  // whose offset this edge borrows. Absent for plain associational steps.
  std::optional<std::size_t> fact_index;
  double cost = 0.0;
  std::optional<double> weight;
};

struct ReasoningChain {
  std::vector<ChainStep> steps;  // contiguous: steps[i].to == steps[i+1].from
  double total_cost = 0.0;
  double residual_norm = 0.0;
  // Selected atoms that ended up neither on the path nor donated to an
  // analogy, with their weights. Ascending fact index.
  std::vector<std::pair<std::size_t, double>> unplaced;
};

struct AnswerEntry {
  std::size_t fact_index = 0;
  double weight = 0.0;
};

struct AnswerRanking {
  std::vector<AnswerEntry> entries;  // weight descending
};

// 1 - cosine of the two term vectors, clamped to [0, 2].
double semantic_distance(const EmbeddingStore& store, const std::string& a,
                         const std::string& b);

// Orders a solver solution into a walkable chain from g to p: builds the
// complete digraph on {g, p} plus the endpoints of all selected facts,
// prices selected-fact edges at epsilon and every other edge at semantic
// distance, and takes the least-cost path (ties broken lexicographically
// on the node sequence).
ReasoningChain order_chain(const SparseSolution& sol,
                           const FactDictionary& dict,
                           const EmbeddingStore& store, const std::string& g,
                           const std::string& p, double epsilon = 1e-4);

// Upgrades associational steps to analogical ones where an unplaced
// selected fact's offset matches the gap within pair_tol. Each donor is
// consumed at most once, in step order.
ReasoningChain classify_links(ReasoningChain chain, const SparseSolution& sol,
                              const FactDictionary& dict,
                              const EmbeddingStore& store,
                              double pair_tol = 0.35);

// goal_vector + solve + order_chain + classify_links.
ReasoningChain prove(const EmbeddingStore& store, const FactDictionary& dict,
                     const std::string& g, const std::string& p,
                     const SolverConfig& cfg, double epsilon = 1e-4,
                     double pair_tol = 0.35);

// Disjunctive query: which candidate facts explain g best. Solves the
// disjunctive goal with the sparse solver and ranks the selected atoms by
// weight (ties to the lower fact index).
AnswerRanking ask(const EmbeddingStore& store, const FactDictionary& dict,
                  const std::string& g,
                  const std::vector<std::string>& candidates,
                  const SolverConfig& cfg);

// One "from --[label]--> to (cost=..., weight=...)" line per step, then
// total_cost/residual_norm, then any unplaced facts. Labels are the fact
// predicates, GAP, or ANALOGY:head->tail.
std::string render_chain(const ReasoningChain& chain,
                         const FactDictionary& dict);
std::string chain_to_json(const ReasoningChain& chain,
                          const FactDictionary& dict);
std::string render_ranking(const AnswerRanking& ranking,
                           const FactDictionary& dict);

}  // namespace semchain
