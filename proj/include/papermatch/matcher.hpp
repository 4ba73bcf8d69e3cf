#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "papermatch/transform.hpp"
#include "papermatch/types.hpp"

namespace papermatch {

enum class PenaltyShape { abs, square };

// Assignment program instance. suitability(r, p) is the full matrix of known,
// predicted and imputed scores; coi pairs are never assignable.
struct MatchProblem {
  Eigen::MatrixXd suitability;  // N x M
  int r_target = 1;             // reviewers per paper, exact
  int p_min = 0;                // per-reviewer load bounds
  int p_max = std::numeric_limits<int>::max() / 4;
  double lambda = 0.0;          // balance penalty weight
  PenaltyShape penalty_shape = PenaltyShape::abs;
  std::optional<TransformSpec> transform;  // applied to suitability before solving
  std::vector<Key> coi;

  int n_reviewers() const { return static_cast<int>(suitability.rows()); }
  int n_papers() const { return static_cast<int>(suitability.cols()); }
  double mean_load() const {  // x-bar = M * R_target / N, real-valued
    return static_cast<double>(n_papers()) * r_target / n_reviewers();
  }
};

struct Assignment {
  std::vector<Key> pairs;  // sorted by (reviewer, paper)
  double objective_value = 0.0;        // penalized value under the solved objective
  double raw_suitability_sum = 0.0;    // sum of (transformed) suitabilities over pairs
  std::vector<int> per_reviewer_load;
};

// Element-wise g(s); identity returns the input unchanged.
Eigen::MatrixXd apply_transform(const TransformSpec& spec, const Eigen::MatrixXd& s);

// Optimal assignment maximizing the summed suitability subject to exact
// paper coverage, reviewer load bounds and COI exclusion. Exact via min-cost
// flow; the constraint matrix is totally unimodular so the flow optimum is
// integral. Throws std::runtime_error with a diagnosis when infeasible.
Assignment solve_basic(const MatchProblem& problem);

// Adds the soft load-equity term: maximizes sum s.x - lambda * sum_r
// f(load_r - x_bar), hard bounds retained. Convex penalties enter as
// per-unit marginal costs on parallel load arcs, which keeps the flow
// reduction exact. lambda == 0 delegates to solve_basic.
Assignment solve_balance(const MatchProblem& problem);

struct VerifyResult {
  bool ok = true;
  std::vector<std::string> violations;
};

// Independent re-check of all Assignment invariants plus an objective
// recomputation from scratch. Never throws.
VerifyResult verify(const Assignment& assignment, const MatchProblem& problem);

// Canonical objective evaluation used for all reported values: pairs summed
// in (reviewer, paper) order, then the balance penalty subtracted. Shared so
// equal pair sets always produce bit-identical objectives.
double pair_sum(const Eigen::MatrixXd& suitability, const std::vector<Key>& pairs);
double balance_penalty(const std::vector<int>& loads, double mean_load, double lambda,
                       PenaltyShape shape);

}  // namespace papermatch
