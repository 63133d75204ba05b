#include "semchain/expharness.hpp"

#include "semchain/reasoner.hpp"
#include "semchain/rng.hpp"

#include <algorithm>
#include <chrono>
#include <deque>
#include <iostream>
#include <ostream>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace semchain {

namespace {

// Salts keep the per-purpose RNG streams of one experiment run disjoint.
constexpr std::uint64_t kSaltExp1Store = 0xE1;
constexpr std::uint64_t kSaltExp2Store = 0xE2;
constexpr std::uint64_t kSaltExp2Facts = 0xE3;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void validate_common(const TrialConfig& cfg) {
  if (cfg.dict_sizes.empty())
    throw std::invalid_argument("experiment: no dictionary sizes");
  if (cfg.counts.empty())
    throw std::invalid_argument("experiment: no k values");
  if (cfg.trials == 0)
    throw std::invalid_argument("experiment: trials must be >= 1");
  for (std::size_t k : cfg.counts)
    if (k == 0) throw std::invalid_argument("experiment: k must be >= 1");
}

// k distinct draws from [0, n).
std::vector<std::size_t> sample_distinct(std::mt19937_64& rng, std::size_t n,
                                         std::size_t k) {
  std::set<std::size_t> seen;
  std::vector<std::size_t> out;
  while (out.size() < k) {
    const std::size_t v = uniform_index(rng, n);
    if (seen.insert(v).second) out.push_back(v);
  }
  return out;
}

void log_cell(const char* exp, const TrialCell& cell) {
  std::cerr << "[" << exp << "] dict=" << cell.dict_size << " k=" << cell.k
            << " " << cell.metric << "=" << cell.successes << "/"
            << cell.trials << " (" << cell.wall_seconds << "s)\n";
}

// Breadth-first connectivity over an explicit fact subset.
bool facts_connect(const FactDictionary& kb,
                   const std::vector<std::size_t>& facts,
                   const std::string& g, const std::string& p) {
  std::unordered_map<std::string, std::vector<std::size_t>> out_edges;
  for (std::size_t j : facts) out_edges[kb.fact(j).head].push_back(j);
  std::unordered_set<std::string> seen{g};
  std::deque<std::string> frontier{g};
  while (!frontier.empty()) {
    const std::string cur = frontier.front();
    frontier.pop_front();
    if (cur == p) return true;
    auto it = out_edges.find(cur);
    if (it == out_edges.end()) continue;
    for (std::size_t j : it->second)
      if (seen.insert(kb.fact(j).tail).second)
        frontier.push_back(kb.fact(j).tail);
  }
  return seen.count(p) > 0;
}

}  // namespace

std::vector<Triple> synth_triples(const EmbeddingStore& store,
                                  std::size_t fact_count,
                                  std::uint64_t seed) {
  const std::size_t n = store.size();
  if (n < 2)
    throw std::invalid_argument("synth_triples: need at least 2 terms");
  if (fact_count > n * (n - 1))
    throw std::invalid_argument(
        "synth_triples: more facts requested than distinct ordered pairs");
  std::mt19937_64 rng(seed);
  std::set<std::pair<std::size_t, std::size_t>> used;
  std::vector<Triple> out;
  out.reserve(fact_count);
  while (out.size() < fact_count) {
    const std::size_t h = uniform_index(rng, n);
    const std::size_t t = uniform_index(rng, n);
    if (h == t) continue;
    if (!used.insert({h, t}).second) continue;
    out.push_back(Triple{store.term_at(h), "rel", store.term_at(t)});
  }
  return out;
}

TrialReport exp1_term_recovery(const TrialConfig& cfg) {
  validate_common(cfg);
  if (cfg.neighbor_k == 0)
    throw std::invalid_argument("experiment 1: neighbor_k must be >= 1");
  for (std::size_t ds : cfg.dict_sizes)
    for (std::size_t k : cfg.counts)
      if (ds < k + cfg.neighbor_k)
        throw std::invalid_argument(
            "experiment 1: dict_size must be >= k + neighbor_k");

  TrialReport report;
  report.config = cfg;

  for (std::size_t ds : cfg.dict_sizes) {
    const EmbeddingStore store = synth_embeddings(
        ds, cfg.dimension, mix_seed({cfg.seed, ds, kSaltExp1Store}));
    const Eigen::MatrixXd terms = store.term_matrix();
    const Eigen::VectorXd sqn = terms.colwise().squaredNorm();

    for (std::size_t k : cfg.counts) {
      const auto start = Clock::now();
      std::size_t nn_hits = 0, lasso_hits = 0;
      for (std::size_t trial = 0; trial < cfg.trials; ++trial) {
        std::mt19937_64 rng(mix_seed({cfg.seed, ds, k, trial}));
        const std::vector<std::size_t> picks = sample_distinct(rng, ds, k);
        Eigen::VectorXd sum = Eigen::VectorXd::Zero(cfg.dimension);
        for (std::size_t i : picks) sum += store.vector_at(i);

        const auto neighbors = nearest(store, sum, cfg.neighbor_k);
        std::unordered_set<std::string> found;
        for (const Neighbor& nb : neighbors) found.insert(nb.term);
        bool nn_ok = true;
        for (std::size_t i : picks)
          if (!found.count(store.term_at(i))) {
            nn_ok = false;
            break;
          }
        if (nn_ok) ++nn_hits;

        const SparseSolution sol = solve_lasso(terms, sum, cfg.solver, &sqn);
        bool lasso_ok = true;
        for (std::size_t i : picks)
          if (!sol.weights.count(i)) {
            lasso_ok = false;
            break;
          }
        if (lasso_ok) ++lasso_hits;
      }
      const double wall = seconds_since(start);
      report.cells.push_back({ds, k, "nn", nn_hits, cfg.trials, wall});
      report.cells.push_back({ds, k, "lasso", lasso_hits, cfg.trials, wall});
      log_cell("exp1", report.cells[report.cells.size() - 2]);
      log_cell("exp1", report.cells.back());
    }
  }
  return report;
}

TrialReport exp2_fact_recovery(const TrialConfig& cfg) {
  validate_common(cfg);
  for (std::size_t ds : cfg.dict_sizes)
    for (std::size_t k : cfg.counts)
      if (ds < k + cfg.neighbor_k)
        throw std::invalid_argument(
            "experiment 2: dict_size must be >= k + neighbor_k");

  TrialReport report;
  report.config = cfg;

  for (std::size_t ds : cfg.dict_sizes) {
    const std::size_t entities =
        cfg.entity_count ? cfg.entity_count : 2 * ds;
    const EmbeddingStore store = synth_embeddings(
        entities, cfg.dimension, mix_seed({cfg.seed, ds, kSaltExp2Store}));
    const std::vector<Triple> triples =
        synth_triples(store, ds, mix_seed({cfg.seed, ds, kSaltExp2Facts}));
    const FactDictionary dict = FactDictionary::build(store, triples);

    for (std::size_t k : cfg.counts) {
      const auto start = Clock::now();
      std::size_t hits = 0;
      for (std::size_t trial = 0; trial < cfg.trials; ++trial) {
        std::mt19937_64 rng(mix_seed({cfg.seed, ds, k, trial}));

        // Entity-disjoint planted facts, so the sum determines the parts
        // up to head/tail pairing.
        std::vector<std::size_t> planted;
        std::unordered_set<std::string> used_entities;
        std::size_t attempts = 0;
        while (planted.size() < k) {
          if (++attempts > 1000 * (k + 1)) {
            planted.clear();
            used_entities.clear();
            attempts = 0;
          }
          const std::size_t j = uniform_index(rng, dict.size());
          const Fact& f = dict.fact(j);
          if (used_entities.count(f.head) || used_entities.count(f.tail))
            continue;
          used_entities.insert(f.head);
          used_entities.insert(f.tail);
          planted.push_back(j);
        }

        Eigen::VectorXd sum = Eigen::VectorXd::Zero(cfg.dimension);
        for (std::size_t j : planted)
          sum += dict.atoms().col(static_cast<Eigen::Index>(j));

        const SparseSolution sol = solve(dict, sum, cfg.solver);
        if (permutation_equivalent(sol.weights, planted, dict)) ++hits;
      }
      const double wall = seconds_since(start);
      report.cells.push_back({ds, k, "recovered", hits, cfg.trials, wall});
      log_cell("exp2", report.cells.back());
    }
  }
  return report;
}

bool permutation_equivalent(const std::map<std::size_t, double>& support,
                            const std::vector<std::size_t>& planted,
                            const FactDictionary& dict) {
  const std::size_t k = planted.size();
  if (k == 0) return true;
  if (k > 63) return false;

  std::vector<std::string> heads, tails;
  heads.reserve(k);
  tails.reserve(k);
  for (std::size_t j : planted) {
    heads.push_back(dict.fact(j).head);
    tails.push_back(dict.fact(j).tail);
  }

  // adjacency[i][j]: some supported atom runs heads[i] -> tails[j]
  std::vector<std::uint64_t> adjacency(k, 0);
  for (const auto& [j, w] : support) {
    const Fact& f = dict.fact(j);
    for (std::size_t hi = 0; hi < k; ++hi) {
      if (f.head != heads[hi]) continue;
      for (std::size_t ti = 0; ti < k; ++ti)
        if (f.tail == tails[ti]) adjacency[hi] |= std::uint64_t{1} << ti;
    }
  }

  // Perfect matching of heads to tails by backtracking (k stays small).
  std::vector<std::uint64_t> stack_mask{0};
  std::vector<std::size_t> next_tail{0};
  while (!stack_mask.empty()) {
    const std::size_t depth = stack_mask.size() - 1;
    if (depth == k) return true;
    bool advanced = false;
    for (std::size_t ti = next_tail.back(); ti < k; ++ti) {
      const std::uint64_t bit = std::uint64_t{1} << ti;
      if ((adjacency[depth] & bit) && !(stack_mask.back() & bit)) {
        next_tail.back() = ti + 1;
        stack_mask.push_back(stack_mask.back() | bit);
        next_tail.push_back(0);
        advanced = true;
        break;
      }
    }
    if (!advanced) {
      stack_mask.pop_back();
      next_tail.pop_back();
    }
  }
  return false;
}

TrialReport exp3_path_recovery(const TrialConfig& cfg,
                               const FactDictionary& kb) {
  if (cfg.counts.empty())
    throw std::invalid_argument("experiment 3: no path lengths");
  if (cfg.trials == 0)
    throw std::invalid_argument("experiment 3: trials must be >= 1");
  for (std::size_t k : cfg.counts)
    if (k == 0 || k > 10)
      throw std::invalid_argument(
          "experiment 3: path lengths must be in 1..10");

  std::unordered_map<std::string, std::vector<std::size_t>> out_edges;
  std::vector<std::string> heads;  // first-seen order keeps runs stable
  for (std::size_t j = 0; j < kb.size(); ++j) {
    auto [it, fresh] = out_edges.try_emplace(kb.fact(j).head);
    it->second.push_back(j);
    if (fresh) heads.push_back(kb.fact(j).head);
  }

  TrialReport report;
  report.config = cfg;

  for (std::size_t k : cfg.counts) {
    const auto start = Clock::now();
    std::size_t walks = 0, deductive = 0, with_gaps = 0;
    for (std::size_t trial = 0; trial < cfg.trials; ++trial) {
      std::mt19937_64 rng(mix_seed({cfg.seed, kb.size(), k, trial}));

      // Plant a k-step simple path by random walk; give up after a bounded
      // number of attempts and shrink the cell.
      std::string g, p;
      bool planted = false;
      for (int attempt = 0; attempt < 200 && !planted; ++attempt) {
        std::string cur = heads[uniform_index(rng, heads.size())];
        std::unordered_set<std::string> visited{cur};
        const std::string start_node = cur;
        bool ok = true;
        for (std::size_t step = 0; step < k; ++step) {
          auto it = out_edges.find(cur);
          if (it == out_edges.end()) {
            ok = false;
            break;
          }
          std::vector<std::size_t> viable;
          for (std::size_t j : it->second)
            if (!visited.count(kb.fact(j).tail)) viable.push_back(j);
          if (viable.empty()) {
            ok = false;
            break;
          }
          const std::size_t j = viable[uniform_index(rng, viable.size())];
          cur = kb.fact(j).tail;
          visited.insert(cur);
        }
        if (ok) {
          g = start_node;
          p = cur;
          planted = true;
        }
      }
      if (!planted) continue;
      ++walks;

      const ReasoningChain chain =
          prove(kb.store(), kb, g, p, cfg.solver);
      bool all_deductive = !chain.steps.empty();
      std::vector<std::size_t> chain_facts;
      for (const ChainStep& s : chain.steps) {
        if (s.kind == LinkKind::kDeductive)
          chain_facts.push_back(*s.fact_index);
        else
          all_deductive = false;
      }

      const bool connects =
          all_deductive && facts_connect(kb, chain_facts, g, p);
      const bool witnessed =
          connects && brute_force_path(kb, g, p, k).has_value();
      if (all_deductive && connects && witnessed)
        ++deductive;
      else if (!all_deductive)
        ++with_gaps;
    }
    const double wall = seconds_since(start);
    report.cells.push_back({kb.size(), k, "deductive", deductive, walks, wall});
    report.cells.push_back({kb.size(), k, "with_gaps", with_gaps, walks, wall});
    log_cell("exp3", report.cells[report.cells.size() - 2]);
    log_cell("exp3", report.cells.back());
  }
  return report;
}

std::optional<std::vector<std::size_t>> brute_force_path(
    const FactDictionary& kb, const std::string& g, const std::string& p,
    std::size_t max_len) {
  if (max_len > 10)
    throw std::invalid_argument(
        "brute_force_path: refusing max_len > 10 (combinatorial guard)");
  if (g == p) return std::vector<std::size_t>{};

  std::unordered_map<std::string, std::vector<std::size_t>> out_edges;
  for (std::size_t j = 0; j < kb.size(); ++j)
    out_edges[kb.fact(j).head].push_back(j);

  // BFS expanding facts in index order; parent links reconstruct the path.
  std::unordered_map<std::string, std::size_t> via;  // node -> incoming fact
  std::deque<std::pair<std::string, std::size_t>> frontier{{g, 0}};
  std::unordered_set<std::string> seen{g};
  while (!frontier.empty()) {
    const auto [cur, depth] = frontier.front();
    frontier.pop_front();
    if (depth >= max_len) continue;
    auto it = out_edges.find(cur);
    if (it == out_edges.end()) continue;
    for (std::size_t j : it->second) {
      const std::string& next = kb.fact(j).tail;
      if (!seen.insert(next).second) continue;
      via.emplace(next, j);
      if (next == p) {
        std::vector<std::size_t> path;
        std::string node = p;
        while (node != g) {
          const std::size_t fact = via.at(node);
          path.push_back(fact);
          node = kb.fact(fact).head;
        }
        std::reverse(path.begin(), path.end());
        return path;
      }
      frontier.emplace_back(next, depth + 1);
    }
  }
  return std::nullopt;
}

void write_report_csv(std::ostream& out, const TrialReport& report) {
  out << "dict_size,k,successes,trials,metric\n";
  for (const TrialCell& c : report.cells)
    out << c.dict_size << ',' << c.k << ',' << c.successes << ',' << c.trials
        << ',' << c.metric << '\n';
}

}  // namespace semchain
