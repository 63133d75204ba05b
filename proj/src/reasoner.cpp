#include "semchain/reasoner.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace semchain {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

const char* kind_name(LinkKind k) {
  switch (k) {
    case LinkKind::kDeductive: return "deductive";
    case LinkKind::kAssociational: return "associational";
    case LinkKind::kAnalogical: return "analogical";
  }
  return "?";
}

}  // namespace

double semantic_distance(const EmbeddingStore& store, const std::string& a,
                         const std::string& b) {
  const double d = 1.0 - cosine(store.vector_of(a), store.vector_of(b));
  return std::clamp(d, 0.0, 2.0);
}

ReasoningChain order_chain(const SparseSolution& sol,
                           const FactDictionary& dict,
                           const EmbeddingStore& store, const std::string& g,
                           const std::string& p, double epsilon) {
  if (epsilon < 0.0)
    throw std::invalid_argument("order_chain: epsilon must be >= 0");
  if (g == p)
    throw std::invalid_argument("order_chain: identical endpoints '" + g +
                                "'");
  store.vector_of(g);  // both endpoints must resolve; throws naming the term
  store.vector_of(p);

  // Node set: endpoints plus the entities of every selected fact,
  // lexicographically ordered so that path tie-breaking is well defined.
  std::set<std::string> nodeset{g, p};
  for (const auto& [j, w] : sol.weights) {
    nodeset.insert(dict.fact(j).head);
    nodeset.insert(dict.fact(j).tail);
  }
  const std::vector<std::string> nodes(nodeset.begin(), nodeset.end());
  const int n = static_cast<int>(nodes.size());

  std::unordered_map<std::string, int> id;
  for (int i = 0; i < n; ++i) id.emplace(nodes[i], i);
  const int src = id.at(g), dst = id.at(p);

  std::map<std::pair<int, int>, std::size_t> fact_edge;
  for (const auto& [j, w] : sol.weights)
    fact_edge.emplace(
        std::make_pair(id.at(dict.fact(j).head), id.at(dict.fact(j).tail)), j);

  std::vector<const Eigen::VectorXd*> vec(nodes.size());
  for (int i = 0; i < n; ++i)
    vec[static_cast<std::size_t>(i)] = &store.vector_of(nodes[i]);

  auto edge_cost = [&](int u, int v) -> double {
    if (fact_edge.count({u, v})) return epsilon;
    const double d = 1.0 - cosine(*vec[static_cast<std::size_t>(u)],
                                  *vec[static_cast<std::size_t>(v)]);
    return std::clamp(d, 0.0, 2.0);
  };

  // Dijkstra over the complete digraph, carrying whole paths so that
  // equal-cost routes settle in lexicographic node-sequence order.
  struct Entry {
    double dist;
    std::vector<int> path;
  };
  auto later = [](const Entry& a, const Entry& b) {
    if (a.dist != b.dist) return a.dist > b.dist;
    return a.path > b.path;
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(later)> queue(later);
  std::vector<bool> settled(nodes.size(), false);
  std::vector<int> best_path;

  queue.push({0.0, {src}});
  while (!queue.empty()) {
    Entry e = queue.top();
    queue.pop();
    const int v = e.path.back();
    if (settled[static_cast<std::size_t>(v)]) continue;
    settled[static_cast<std::size_t>(v)] = true;
    if (v == dst) {
      best_path = std::move(e.path);
      break;
    }
    for (int u = 0; u < n; ++u) {
      if (u == v || settled[static_cast<std::size_t>(u)]) continue;
      Entry next{e.dist + edge_cost(v, u), e.path};
      next.path.push_back(u);
      queue.push(std::move(next));
    }
  }
  // The graph is complete, so the destination always settles.

  ReasoningChain chain;
  chain.residual_norm = sol.residual_norm;
  std::set<std::size_t> placed;
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < best_path.size(); ++i) {
    const int u = best_path[i], v = best_path[i + 1];
    ChainStep step;
    step.from = nodes[static_cast<std::size_t>(u)];
    step.to = nodes[static_cast<std::size_t>(v)];
    auto fe = fact_edge.find({u, v});
    if (fe != fact_edge.end()) {
      step.kind = LinkKind::kDeductive;
      step.fact_index = fe->second;
      step.weight = sol.weights.at(fe->second);
      step.cost = epsilon;
      placed.insert(fe->second);
    } else {
      step.kind = LinkKind::kAssociational;
      step.cost = edge_cost(u, v);
    }
    total += step.cost;
    chain.steps.push_back(std::move(step));
  }
  chain.total_cost = total;
  for (const auto& [j, w] : sol.weights)
    if (!placed.count(j)) chain.unplaced.emplace_back(j, w);
  return chain;
}

ReasoningChain classify_links(ReasoningChain chain, const SparseSolution& sol,
                              const FactDictionary& dict,
                              const EmbeddingStore& store, double pair_tol) {
  if (pair_tol < 0.0)
    throw std::invalid_argument("classify_links: pair_tol must be >= 0");

  std::set<std::size_t> available;
  for (const auto& [j, w] : chain.unplaced) available.insert(j);
  (void)sol;  // weights travel on chain.unplaced, kept for interface symmetry

  for (ChainStep& step : chain.steps) {
    if (step.kind != LinkKind::kAssociational) continue;
    const Eigen::VectorXd gap =
        store.vector_of(step.to) - store.vector_of(step.from);
    std::size_t donor = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j : available) {
      const Fact& f = dict.fact(j);
      const Eigen::VectorXd offset =
          store.vector_of(f.tail) - store.vector_of(f.head);
      const double diff = (gap - offset).norm();
      if (diff < best) {  // strict: ties go to the lowest index
        best = diff;
        donor = j;
      }
    }
    if (best <= pair_tol) {
      step.kind = LinkKind::kAnalogical;
      step.fact_index = donor;
      auto it = sol.weights.find(donor);
      if (it != sol.weights.end()) step.weight = it->second;
      available.erase(donor);
    }
  }

  std::erase_if(chain.unplaced,
                [&](const auto& e) { return !available.count(e.first); });
  return chain;
}

ReasoningChain prove(const EmbeddingStore& store, const FactDictionary& dict,
                     const std::string& g, const std::string& p,
                     const SolverConfig& cfg, double epsilon,
                     double pair_tol) {
  const Goal goal = goal_vector(store, g, p);
  const SparseSolution sol = solve(dict, goal.vec, cfg);
  ReasoningChain chain = order_chain(sol, dict, store, g, p, epsilon);
  return classify_links(std::move(chain), sol, dict, store, pair_tol);
}

AnswerRanking ask(const EmbeddingStore& store, const FactDictionary& dict,
                  const std::string& g,
                  const std::vector<std::string>& candidates,
                  const SolverConfig& cfg) {
  const Goal goal = disjunctive_goal(store, g, candidates);
  const SparseSolution sol = solve_lasso(dict, goal.vec, cfg);
  AnswerRanking ranking;
  for (const auto& [j, w] : sol.weights) ranking.entries.push_back({j, w});
  std::sort(ranking.entries.begin(), ranking.entries.end(),
            [](const AnswerEntry& a, const AnswerEntry& b) {
              if (a.weight != b.weight) return a.weight > b.weight;
              return a.fact_index < b.fact_index;
            });
  return ranking;
}

std::string render_chain(const ReasoningChain& chain,
                         const FactDictionary& dict) {
  std::ostringstream out;
  for (const ChainStep& s : chain.steps) {
    out << s.from << " --[";
    switch (s.kind) {
      case LinkKind::kDeductive:
        out << dict.fact(*s.fact_index).predicate_label();
        break;
      case LinkKind::kAssociational:
        out << "GAP";
        break;
      case LinkKind::kAnalogical: {
        const Fact& f = dict.fact(*s.fact_index);
        out << "ANALOGY:" << f.head << "->" << f.tail;
        break;
      }
    }
    out << "]--> " << s.to << " (cost=" << num(s.cost);
    if (s.weight) out << ", weight=" << num(*s.weight);
    out << ")\n";
  }
  out << "total_cost=" << num(chain.total_cost)
      << " residual_norm=" << num(chain.residual_norm) << "\n";
  for (const auto& [j, w] : chain.unplaced) {
    const Fact& f = dict.fact(j);
    out << "unplaced: " << f.head << " --[" << f.predicate_label() << "]--> "
        << f.tail << " (weight=" << num(w) << ")\n";
  }
  return out.str();
}

std::string chain_to_json(const ReasoningChain& chain,
                          const FactDictionary& dict) {
  nlohmann::json j;
  j["steps"] = nlohmann::json::array();
  for (const ChainStep& s : chain.steps) {
    nlohmann::json step;
    step["kind"] = kind_name(s.kind);
    step["from"] = s.from;
    step["to"] = s.to;
    step["cost"] = s.cost;
    step["predicate"] = nullptr;
    step["weight"] = nullptr;
    if (s.weight) step["weight"] = *s.weight;
    if (s.fact_index) {
      const Fact& f = dict.fact(*s.fact_index);
      if (s.kind == LinkKind::kDeductive)
        step["predicate"] = f.predicate_label();
      else
        step["donor"] = {{"head", f.head},
                         {"predicate", f.predicate_label()},
                         {"tail", f.tail}};
    }
    j["steps"].push_back(std::move(step));
  }
  j["total_cost"] = chain.total_cost;
  j["residual_norm"] = chain.residual_norm;
  j["unplaced"] = nlohmann::json::array();
  for (const auto& [idx, w] : chain.unplaced) {
    const Fact& f = dict.fact(idx);
    j["unplaced"].push_back({{"fact_index", idx},
                             {"head", f.head},
                             {"predicate", f.predicate_label()},
                             {"tail", f.tail},
                             {"weight", w}});
  }
  return j.dump(2);
}

std::string render_ranking(const AnswerRanking& ranking,
                           const FactDictionary& dict) {
  std::ostringstream out;
  for (const AnswerEntry& e : ranking.entries) {
    const Fact& f = dict.fact(e.fact_index);
    out << num(e.weight) << '\t' << f.head << '\t' << f.predicate_label()
        << '\t' << f.tail << '\n';
  }
  return out.str();
}

}  // namespace semchain
