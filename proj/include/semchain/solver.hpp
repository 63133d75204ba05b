#pragma once

#include "semchain/kb.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <iosfwd>
#include <map>
#include <vector>

namespace semchain {

enum class SolveMethod { kOmp, kLasso };

struct SolverConfig {
  SolveMethod method = SolveMethod::kLasso;
  std::size_t max_atoms = 20;      // hard support cap
  double lambda = 0.2;             // regularization strength
  double elastic_net_alpha = 1.0;  // 1 = pure L1, 0 = pure ridge
  bool nonnegative = true;
  double weight_floor = 0.05;      // weights below this are pruned after solving
  std::size_t max_iterations = 1000;
  double convergence_tol = 1e-6;
};

// A sparse combination of dictionary atoms approximating a goal vector.
// weights holds only the surviving support (every |w| >= weight_floor,
// no exact zeros); residual_norm is recomputed from those weights.
struct SparseSolution {
  std::map<std::size_t, double> weights;
  double residual_norm = 0.0;
  std::size_t iterations = 0;
  bool converged = true;
  std::vector<double> residual_history;  // per greedy pick / per sweep
  SolverConfig config;
};

// Columns of `atoms` are the dictionary. Greedy orthogonal matching
// pursuit: pick the atom with the largest raw correlation to the residual
// (ties to the lowest index), refit all selected weights by (nonnegative)
// least squares, repeat until max_atoms, a convergence_tol residual, or no
// atom improves the fit.
SparseSolution solve_omp(const Eigen::MatrixXd& atoms,
                         const Eigen::VectorXd& goal,
                         const SolverConfig& cfg);

// Cyclic coordinate descent on 0.5*|goal - Aw|^2 + lambda*(alpha*|w|_1 +
// 0.5*(1-alpha)*|w|^2), optionally constrained to w >= 0. Sweeps run until
// the largest coordinate change falls below convergence_tol and the KKT
// gap is closed, or max_iterations sweeps (converged = false).
// sq_norms, when given, must be the per-column squared norms.
SparseSolution solve_lasso(const Eigen::MatrixXd& atoms,
                           const Eigen::VectorXd& goal,
                           const SolverConfig& cfg,
                           const Eigen::VectorXd* sq_norms = nullptr);

// Exhaustive oracle: least-squares over every support of size <= max_k,
// minimum residual wins, ties to the smallest support then lowest index
// tuple. Refuses atoms > 64 or max_k > 4.
SparseSolution brute_force_sparse(const Eigen::MatrixXd& atoms,
                                  const Eigen::VectorXd& goal,
                                  std::size_t max_k);

SparseSolution solve_omp(const FactDictionary& dict,
                         const Eigen::VectorXd& goal, const SolverConfig& cfg);
SparseSolution solve_lasso(const FactDictionary& dict,
                           const Eigen::VectorXd& goal,
                           const SolverConfig& cfg);
SparseSolution brute_force_sparse(const FactDictionary& dict,
                                  const Eigen::VectorXd& goal,
                                  std::size_t max_k);

// Dispatch on cfg.method.
SparseSolution solve(const FactDictionary& dict, const Eigen::VectorXd& goal,
                     const SolverConfig& cfg);

// Lawson-Hanson active-set nonnegative least squares: argmin |Ax - b| s.t.
// x >= 0. Intended for small column counts (the solver's support sizes).
Eigen::VectorXd nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b);

// "fact_index,weight,head,predicate,tail", weights descending.
void export_solution_csv(std::ostream& out, const SparseSolution& sol,
                         const FactDictionary& dict);

}  // namespace semchain
