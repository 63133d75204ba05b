#pragma once

#include "semchain/embeddings.hpp"
#include "semchain/kb.hpp"
#include "semchain/solver.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace semchain {

// Shared setup for the recovery experiments. counts is the sweep variable:
// terms per sum (experiment 1), facts per sum (2), or path length (3).
struct TrialConfig {
  std::vector<std::size_t> dict_sizes;
  std::vector<std::size_t> counts;
  std::size_t trials = 100;
  Eigen::Index dimension = 300;
  std::uint64_t seed = 0;
  SolverConfig solver;
  std::size_t neighbor_k = 20;
  // Synthetic entity pool for experiment 2; 0 means 2 * dict_size.
  std::size_t entity_count = 0;
};

struct TrialCell {
  std::size_t dict_size = 0;
  std::size_t k = 0;
  std::string metric;
  std::size_t successes = 0;
  std::size_t trials = 0;
  double wall_seconds = 0.0;
};

struct TrialReport {
  std::vector<TrialCell> cells;
  TrialConfig config;
};

// Can a sum of k random term vectors be separated back into its parts?
// Two metrics per (dict_size, k) cell: "nn" (all k terms among the
// neighbor_k nearest neighbors of the sum) and "lasso" (all k terms in the
// sparse solver's support over the term dictionary).
TrialReport exp1_term_recovery(const TrialConfig& cfg);

// Same question for sums of k entity-disjoint fact vectors over a
// synthetic KB; metric "recovered". Recovery is up to permutation: any
// selected atom set pairing the planted heads with the planted tails
// counts, because those sums are indistinguishable by construction.
TrialReport exp2_fact_recovery(const TrialConfig& cfg);

// Plants a k-step path in the given KB by random walk, then asks prove()
// to reconnect its endpoints. Metrics per cell: "deductive" (chain is all
// fact edges and its fact set connects g to p, with a brute-force path
// witness) and "with_gaps" (a chain came back but leaned on at least one
// associational step). Walk failures reduce the cell's trial count.
TrialReport exp3_path_recovery(const TrialConfig& cfg,
                               const FactDictionary& kb);

// Shortest fact path from g to p by breadth-first search, as fact indices
// into kb. nullopt when no path of length <= max_len exists. Refuses
// max_len > 10.
std::optional<std::vector<std::size_t>> brute_force_path(
    const FactDictionary& kb, const std::string& g, const std::string& p,
    std::size_t max_len);

// fact_count distinct random triples (predicate "rel", no self-loops) over
// the store's terms. Deterministic in the seed.
std::vector<Triple> synth_triples(const EmbeddingStore& store,
                                  std::size_t fact_count, std::uint64_t seed);

// Does the support contain atoms pairing the planted heads with the
// planted tails, one-to-one? Exposed as it defines experiment 2's success.
bool permutation_equivalent(const std::map<std::size_t, double>& support,
                            const std::vector<std::size_t>& planted,
                            const FactDictionary& dict);

// Header "dict_size,k,successes,trials,metric", one row per cell, stable
// across reruns of the same config.
void write_report_csv(std::ostream& out, const TrialReport& report);

}  // namespace semchain
