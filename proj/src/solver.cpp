#include "semchain/solver.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <utility>
#include <vector>

namespace semchain {

namespace {

void validate_problem(const Eigen::MatrixXd& atoms,
                      const Eigen::VectorXd& goal) {
  if (atoms.cols() == 0)
    throw std::invalid_argument("solver: empty dictionary");
  if (atoms.rows() != goal.size())
    throw std::invalid_argument(
        "solver: goal dimension " + std::to_string(goal.size()) +
        " does not match atom dimension " + std::to_string(atoms.rows()));
}

void validate_config(const SolverConfig& cfg) {
  if (cfg.max_atoms == 0)
    throw std::invalid_argument("solver: max_atoms must be positive");
  if (cfg.lambda < 0.0)
    throw std::invalid_argument("solver: lambda must be >= 0");
  if (cfg.elastic_net_alpha < 0.0 || cfg.elastic_net_alpha > 1.0)
    throw std::invalid_argument("solver: elastic_net_alpha must be in [0, 1]");
  if (cfg.weight_floor < 0.0)
    throw std::invalid_argument("solver: weight_floor must be >= 0");
  if (cfg.max_iterations == 0)
    throw std::invalid_argument("solver: max_iterations must be positive");
  if (cfg.convergence_tol <= 0.0)
    throw std::invalid_argument("solver: convergence_tol must be positive");
}

Eigen::MatrixXd gather(const Eigen::MatrixXd& atoms,
                       const std::vector<Eigen::Index>& cols) {
  Eigen::MatrixXd sub(atoms.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < cols.size(); ++i)
    sub.col(static_cast<Eigen::Index>(i)) = atoms.col(cols[i]);
  return sub;
}

// Floor-prune, cap the support at max_atoms by |weight| (ties to the lower
// index), and recompute the residual from what survives.
void finalize_solution(const Eigen::MatrixXd& atoms,
                       const Eigen::VectorXd& goal,
                       std::vector<std::pair<std::size_t, double>> entries,
                       const SolverConfig& cfg, SparseSolution& sol) {
  std::erase_if(entries, [&](const auto& e) {
    return e.second == 0.0 || std::abs(e.second) < cfg.weight_floor;
  });
  if (entries.size() > cfg.max_atoms) {
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
      const double ma = std::abs(a.second), mb = std::abs(b.second);
      if (ma != mb) return ma > mb;
      return a.first < b.first;
    });
    entries.resize(cfg.max_atoms);
  }
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  Eigen::VectorXd r = goal;
  sol.weights.clear();
  for (const auto& [j, w] : entries) {
    sol.weights.emplace(j, w);
    r -= w * atoms.col(static_cast<Eigen::Index>(j));
  }
  sol.residual_norm = r.norm();
}

// Largest violation of the subgradient optimality conditions for the
// elastic-net problem at (w, r = goal - Aw). Zero at the exact optimum.
double kkt_gap(const Eigen::MatrixXd& atoms, const Eigen::VectorXd& r,
               const Eigen::VectorXd& w, double l1, double l2, bool nonneg) {
  const Eigen::VectorXd corr = atoms.transpose() * r;
  double gap = 0.0;
  for (Eigen::Index j = 0; j < atoms.cols(); ++j) {
    const double cj = corr[j] - l2 * w[j];
    if (w[j] > 0.0)
      gap = std::max(gap, std::abs(cj - l1));
    else if (w[j] < 0.0)
      gap = std::max(gap, std::abs(cj + l1));
    else if (nonneg)
      gap = std::max(gap, corr[j] - l1);
    else
      gap = std::max(gap, std::abs(corr[j]) - l1);
  }
  return std::max(gap, 0.0);
}

}  // namespace

Eigen::VectorXd nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  if (A.rows() != b.size())
    throw std::invalid_argument("nnls: dimension mismatch");
  const Eigen::Index n = A.cols();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  if (n == 0) return x;

  std::vector<bool> passive(static_cast<std::size_t>(n), false);
  Eigen::VectorXd r = b;
  const double tol = 1e-12 * std::max(1.0, b.norm());
  const int max_steps = 3 * static_cast<int>(n) + 30;

  for (int outer = 0; outer < max_steps; ++outer) {
    // Most positive dual coordinate enters the passive (free) set.
    const Eigen::VectorXd dual = A.transpose() * r;
    Eigen::Index enter = -1;
    double best = tol;
    for (Eigen::Index j = 0; j < n; ++j)
      if (!passive[static_cast<std::size_t>(j)] && dual[j] > best) {
        best = dual[j];
        enter = j;
      }
    if (enter < 0) break;
    passive[static_cast<std::size_t>(enter)] = true;

    for (int inner = 0; inner < max_steps; ++inner) {
      std::vector<Eigen::Index> ps;
      for (Eigen::Index j = 0; j < n; ++j)
        if (passive[static_cast<std::size_t>(j)]) ps.push_back(j);
      const Eigen::MatrixXd Ap = gather(A, ps);
      const Eigen::VectorXd z = Ap.colPivHouseholderQr().solve(b);

      bool feasible = true;
      for (Eigen::Index i = 0; i < z.size(); ++i)
        if (z[i] <= 0.0) {
          feasible = false;
          break;
        }
      if (feasible) {
        x.setZero();
        for (std::size_t i = 0; i < ps.size(); ++i)
          x[ps[i]] = z[static_cast<Eigen::Index>(i)];
        break;
      }

      // Step from x toward z until the first free coordinate hits zero,
      // then clamp it back to the active set.
      double alpha = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < ps.size(); ++i) {
        const double zi = z[static_cast<Eigen::Index>(i)];
        if (zi <= 0.0) {
          const double xi = x[ps[i]];
          alpha = std::min(alpha, xi / (xi - zi));
        }
      }
      for (std::size_t i = 0; i < ps.size(); ++i) {
        const double zi = z[static_cast<Eigen::Index>(i)];
        x[ps[i]] += alpha * (zi - x[ps[i]]);
      }
      for (std::size_t i = 0; i < ps.size(); ++i)
        if (x[ps[i]] <= tol) {
          x[ps[i]] = 0.0;
          passive[static_cast<std::size_t>(ps[i])] = false;
        }
    }
    r = b - A * x;
  }
  return x;
}

SparseSolution solve_omp(const Eigen::MatrixXd& atoms,
                         const Eigen::VectorXd& goal,
                         const SolverConfig& cfg) {
  validate_problem(atoms, goal);
  validate_config(cfg);

  SparseSolution sol;
  sol.config = cfg;

  const Eigen::Index n = atoms.cols();
  const std::size_t budget =
      std::min<std::size_t>(cfg.max_atoms, static_cast<std::size_t>(n));

  Eigen::VectorXd r = goal;
  double rnorm = r.norm();
  sol.residual_history.push_back(rnorm);

  std::vector<Eigen::Index> support;
  std::vector<bool> selected(static_cast<std::size_t>(n), false);
  Eigen::VectorXd weights;
  const double corr_floor = 1e-12 * std::max(1.0, goal.norm());

  while (support.size() < budget && rnorm > cfg.convergence_tol) {
    const Eigen::VectorXd corr = atoms.transpose() * r;
    Eigen::Index pick = -1;
    double best = corr_floor;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (selected[static_cast<std::size_t>(j)]) continue;
      const double v = cfg.nonnegative ? corr[j] : std::abs(corr[j]);
      if (v > best) {  // strict: ties go to the lowest index
        best = v;
        pick = j;
      }
    }
    if (pick < 0) break;

    support.push_back(pick);
    selected[static_cast<std::size_t>(pick)] = true;

    const Eigen::MatrixXd sub = gather(atoms, support);
    const Eigen::VectorXd w = cfg.nonnegative
                                  ? nnls(sub, goal)
                                  : Eigen::VectorXd(
                                        sub.colPivHouseholderQr().solve(goal));
    const Eigen::VectorXd nr = goal - sub * w;
    const double nrnorm = nr.norm();
    if (!(nrnorm < rnorm)) {  // no improvement; undo and stop
      support.pop_back();
      selected[static_cast<std::size_t>(pick)] = false;
      break;
    }
    r = nr;
    rnorm = nrnorm;
    weights = w;
    sol.residual_history.push_back(rnorm);
    ++sol.iterations;
  }

  std::vector<std::pair<std::size_t, double>> entries;
  for (std::size_t i = 0; i < support.size(); ++i)
    entries.emplace_back(static_cast<std::size_t>(support[i]),
                         weights[static_cast<Eigen::Index>(i)]);
  finalize_solution(atoms, goal, std::move(entries), cfg, sol);
  sol.converged = true;
  return sol;
}

SparseSolution solve_lasso(const Eigen::MatrixXd& atoms,
                           const Eigen::VectorXd& goal,
                           const SolverConfig& cfg,
                           const Eigen::VectorXd* sq_norms) {
  validate_problem(atoms, goal);
  validate_config(cfg);

  SparseSolution sol;
  sol.config = cfg;

  const Eigen::Index n = atoms.cols();
  Eigen::VectorXd sqn;
  if (sq_norms) {
    if (sq_norms->size() != n)
      throw std::invalid_argument("solver: sq_norms size mismatch");
    sqn = *sq_norms;
  } else {
    sqn = atoms.colwise().squaredNorm();
  }

  const double l1 = cfg.lambda * cfg.elastic_net_alpha;
  const double l2 = cfg.lambda * (1.0 - cfg.elastic_net_alpha);

  Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd r = goal;
  bool converged = false;
  std::size_t sweep = 0;

  while (sweep < cfg.max_iterations) {
    ++sweep;
    double max_delta = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (sqn[j] <= 0.0) continue;
      const double rho = atoms.col(j).dot(r) + w[j] * sqn[j];
      const double denom = sqn[j] + l2;
      double wj;
      if (cfg.nonnegative) {
        wj = std::max(0.0, rho - l1) / denom;
      } else {
        const double mag = std::max(0.0, std::abs(rho) - l1);
        wj = std::copysign(mag, rho) / denom;
      }
      const double delta = wj - w[j];
      if (delta != 0.0) {
        r -= delta * atoms.col(j);
        w[j] = wj;
        max_delta = std::max(max_delta, std::abs(delta));
      }
    }
    sol.residual_history.push_back(r.norm());
    if (max_delta < cfg.convergence_tol) {
      // Coordinate stationarity can be reached while a zero coordinate
      // still wants in; accept only once the KKT gap is closed too.
      if (l1 > 0.0 &&
          kkt_gap(atoms, r, w, l1, l2, cfg.nonnegative) >
              5.0 * cfg.convergence_tol)
        continue;
      converged = true;
      break;
    }
  }

  sol.iterations = sweep;
  sol.converged = converged;

  std::vector<std::pair<std::size_t, double>> entries;
  for (Eigen::Index j = 0; j < n; ++j)
    if (w[j] != 0.0) entries.emplace_back(static_cast<std::size_t>(j), w[j]);
  finalize_solution(atoms, goal, std::move(entries), cfg, sol);
  return sol;
}

SparseSolution brute_force_sparse(const Eigen::MatrixXd& atoms,
                                  const Eigen::VectorXd& goal,
                                  std::size_t max_k) {
  validate_problem(atoms, goal);
  const std::size_t n = static_cast<std::size_t>(atoms.cols());
  if (n > 64 || max_k > 4)
    throw std::invalid_argument(
        "brute_force_sparse: refusing atoms > 64 or max_k > 4 "
        "(combinatorial guard)");

  SparseSolution best;
  best.config = SolverConfig{};
  best.config.method = SolveMethod::kOmp;
  best.config.max_atoms = std::max<std::size_t>(max_k, 1);
  best.config.lambda = 0.0;
  best.config.nonnegative = false;
  best.config.weight_floor = 0.0;
  best.residual_norm = goal.norm();
  best.residual_history.push_back(best.residual_norm);

  std::size_t evaluated = 0;
  std::vector<Eigen::Index> combo;
  std::vector<std::pair<std::size_t, double>> best_entries;

  // Supports enumerated by size then lexicographic index tuple; a strict
  // improvement test makes the first minimum win ties.
  for (std::size_t s = 1; s <= std::min(max_k, n); ++s) {
    combo.resize(s);
    for (std::size_t i = 0; i < s; ++i) combo[i] = static_cast<Eigen::Index>(i);
    while (true) {
      const Eigen::MatrixXd sub = gather(atoms, combo);
      const Eigen::VectorXd w = sub.colPivHouseholderQr().solve(goal);
      const double res = (goal - sub * w).norm();
      ++evaluated;
      if (res < best.residual_norm) {
        best.residual_norm = res;
        best_entries.clear();
        for (std::size_t i = 0; i < s; ++i)
          best_entries.emplace_back(static_cast<std::size_t>(combo[i]),
                                    w[static_cast<Eigen::Index>(i)]);
      }
      // next lexicographic combination
      std::size_t i = s;
      while (i > 0 &&
             combo[i - 1] ==
                 static_cast<Eigen::Index>(n - s + i - 1))
        --i;
      if (i == 0) break;
      ++combo[i - 1];
      for (std::size_t j = i; j < s; ++j) combo[j] = combo[j - 1] + 1;
    }
  }

  best.iterations = evaluated;
  best.weights.clear();
  Eigen::VectorXd r = goal;
  for (const auto& [j, wv] : best_entries) {
    if (wv == 0.0) continue;
    best.weights.emplace(j, wv);
    r -= wv * atoms.col(static_cast<Eigen::Index>(j));
  }
  best.residual_norm = r.norm();
  best.residual_history.push_back(best.residual_norm);
  return best;
}

SparseSolution solve_omp(const FactDictionary& dict,
                         const Eigen::VectorXd& goal, const SolverConfig& cfg) {
  return solve_omp(dict.atoms(), goal, cfg);
}

SparseSolution solve_lasso(const FactDictionary& dict,
                           const Eigen::VectorXd& goal,
                           const SolverConfig& cfg) {
  return solve_lasso(dict.atoms(), goal, cfg, &dict.atom_sq_norms());
}

SparseSolution brute_force_sparse(const FactDictionary& dict,
                                  const Eigen::VectorXd& goal,
                                  std::size_t max_k) {
  return brute_force_sparse(dict.atoms(), goal, max_k);
}

SparseSolution solve(const FactDictionary& dict, const Eigen::VectorXd& goal,
                     const SolverConfig& cfg) {
  return cfg.method == SolveMethod::kOmp ? solve_omp(dict, goal, cfg)
                                         : solve_lasso(dict, goal, cfg);
}

void export_solution_csv(std::ostream& out, const SparseSolution& sol,
                         const FactDictionary& dict) {
  std::vector<std::pair<std::size_t, double>> rows(sol.weights.begin(),
                                                   sol.weights.end());
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  out << "fact_index,weight,head,predicate,tail\n";
  char buf[32];
  for (const auto& [j, w] : rows) {
    std::snprintf(buf, sizeof buf, "%.10g", w);
    const Fact& f = dict.fact(j);
    out << j << ',' << buf << ',' << detail::csv_field(f.head) << ','
        << detail::csv_field(f.predicate_label()) << ','
        << detail::csv_field(f.tail) << '\n';
  }
}

}  // namespace semchain
