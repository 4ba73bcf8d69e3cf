#include "papermatch/matcher.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "papermatch/min_cost_flow.hpp"

namespace papermatch {

Eigen::MatrixXd apply_transform(const TransformSpec& spec, const Eigen::MatrixXd& s) {
  if (spec.kind == TransformSpec::Kind::identity) return s;
  return s.unaryExpr([&](double x) { return spec.apply(x); });
}

double pair_sum(const Eigen::MatrixXd& suitability, const std::vector<Key>& pairs) {
  double sum = 0.0;
  for (const Key& k : pairs) sum += suitability(k.reviewer, k.paper);
  return sum;
}

double balance_penalty(const std::vector<int>& loads, double mean_load, double lambda,
                       PenaltyShape shape) {
  double penalty = 0.0;
  for (int load : loads) {
    const double d = static_cast<double>(load) - mean_load;
    penalty += shape == PenaltyShape::abs ? std::abs(d) : d * d;
  }
  return lambda * penalty;
}

namespace {

double penalty_f(PenaltyShape shape, double x) {
  return shape == PenaltyShape::abs ? std::abs(x) : x * x;
}

struct Prepared {
  Eigen::MatrixXd effective;   // suitability after the optional transform
  std::vector<char> coi_mask;  // n*m
  int effective_p_max;         // load can never exceed M anyway
};

Prepared prepare(const MatchProblem& problem) {
  const int n = problem.n_reviewers();
  const int m = problem.n_papers();
  if (n < 1 || m < 1) throw std::runtime_error("matcher: empty problem");
  if (problem.r_target < 1) throw std::runtime_error("matcher: r_target must be >= 1");
  if (problem.r_target > n)
    throw std::runtime_error("matcher: r_target exceeds the number of reviewers");
  if (problem.p_min < 0 || problem.p_min > problem.p_max)
    throw std::runtime_error("matcher: need 0 <= p_min <= p_max");

  const long long demand = static_cast<long long>(m) * problem.r_target;
  if (static_cast<long long>(n) * problem.p_min > demand) {
    std::ostringstream msg;
    msg << "infeasible: N*p_min = " << static_cast<long long>(n) * problem.p_min
        << " exceeds total demand M*r_target = " << demand;
    throw std::runtime_error(msg.str());
  }
  if (static_cast<long long>(n) * std::min<long long>(problem.p_max, m) < demand) {
    std::ostringstream msg;
    msg << "infeasible: N*p_max = " << static_cast<long long>(n) * problem.p_max
        << " cannot cover total demand M*r_target = " << demand;
    throw std::runtime_error(msg.str());
  }

  Prepared prep;
  prep.effective = problem.transform
                       ? apply_transform(*problem.transform, problem.suitability)
                       : problem.suitability;
  prep.coi_mask.assign(static_cast<std::size_t>(n) * m, 0);
  for (const Key& k : problem.coi) {
    if (k.reviewer < 0 || k.reviewer >= n || k.paper < 0 || k.paper >= m)
      throw std::runtime_error("matcher: COI key outside matrix");
    prep.coi_mask[static_cast<std::size_t>(k.reviewer) * m + k.paper] = 1;
  }
  for (int p = 0; p < m; ++p) {
    int available = 0;
    for (int r = 0; r < n; ++r)
      if (!prep.coi_mask[static_cast<std::size_t>(r) * m + p]) ++available;
    if (available < problem.r_target) {
      std::ostringstream msg;
      msg << "infeasible: paper " << p << " has only " << available
          << " conflict-free reviewers but needs " << problem.r_target;
      throw std::runtime_error(msg.str());
    }
  }
  for (int r = 0; r < n; ++r)
    for (int p = 0; p < m; ++p)
      if (!prep.coi_mask[static_cast<std::size_t>(r) * m + p] &&
          !std::isfinite(prep.effective(r, p)))
        throw std::runtime_error("matcher: non-finite suitability at (" +
                                 std::to_string(r) + "," + std::to_string(p) + ")");

  prep.effective_p_max = std::min(problem.p_max, m);
  return prep;
}

Assignment solve_flow(const MatchProblem& problem, const Prepared& prep,
                      bool balance) {
  const int n = problem.n_reviewers();
  const int m = problem.n_papers();
  const int source = 0, sink = 1;
  const auto reviewer_node = [](int r) { return 2 + r; };
  const auto paper_node = [n](int p) { return 2 + n + p; };
  const double mean = problem.mean_load();

  MinCostFlow flow(2 + n + m);
  for (int r = 0; r < n; ++r) {
    if (!balance) {
      flow.add_arc(source, reviewer_node(r), problem.p_min, prep.effective_p_max, 0.0);
    } else {
      // Unit load arcs with convex marginal penalty costs; the k-th unit of
      // load costs lambda * (f(k - xbar) - f(k-1 - xbar)).
      for (int k = 1; k <= prep.effective_p_max; ++k) {
        const double marginal =
            problem.lambda * (penalty_f(problem.penalty_shape, k - mean) -
                              penalty_f(problem.penalty_shape, k - 1 - mean));
        flow.add_arc(source, reviewer_node(r), k <= problem.p_min ? 1 : 0, 1, marginal);
      }
    }
  }
  std::vector<int> pair_arcs(static_cast<std::size_t>(n) * m, -1);
  for (int r = 0; r < n; ++r)
    for (int p = 0; p < m; ++p) {
      if (prep.coi_mask[static_cast<std::size_t>(r) * m + p]) continue;
      pair_arcs[static_cast<std::size_t>(r) * m + p] =
          flow.add_arc(reviewer_node(r), paper_node(p), 0, 1, -prep.effective(r, p));
    }
  for (int p = 0; p < m; ++p)
    flow.add_arc(paper_node(p), sink, problem.r_target, problem.r_target, 0.0);
  flow.add_arc(sink, source, 0, m * problem.r_target, 0.0);

  if (!flow.solve()) {
    std::ostringstream msg;
    msg << "infeasible: no assignment satisfies the load bounds and conflicts";
    for (int node : flow.unsatisfied_nodes()) {
      if (node >= 2 + n) {
        const int p = node - 2 - n;
        int available = 0;
        for (int r = 0; r < n; ++r)
          if (!prep.coi_mask[static_cast<std::size_t>(r) * m + p]) ++available;
        msg << "; paper " << p << " cannot reach " << problem.r_target
            << " reviewers (" << available
            << " conflict-free, remainder saturated by load bounds)";
        break;
      }
      if (node >= 2) {
        msg << "; reviewer " << (node - 2) << " cannot reach its minimum load "
            << problem.p_min;
        break;
      }
    }
    throw std::runtime_error(msg.str());
  }

  Assignment assignment;
  assignment.per_reviewer_load.assign(n, 0);
  for (int r = 0; r < n; ++r)
    for (int p = 0; p < m; ++p) {
      const int arc = pair_arcs[static_cast<std::size_t>(r) * m + p];
      if (arc < 0) continue;
      const int x = flow.flow(arc);
      if (x != 0 && x != 1)
        throw std::logic_error("matcher: non-binary assignment variable");
      if (x == 1) {
        assignment.pairs.push_back({r, p});
        ++assignment.per_reviewer_load[r];
      }
    }
  // pairs are already sorted by construction order (reviewer-major).
  assignment.raw_suitability_sum = pair_sum(prep.effective, assignment.pairs);
  assignment.objective_value =
      assignment.raw_suitability_sum -
      (balance ? balance_penalty(assignment.per_reviewer_load, mean, problem.lambda,
                                 problem.penalty_shape)
               : 0.0);
  return assignment;
}

}  // namespace

Assignment solve_basic(const MatchProblem& problem) {
  const Prepared prep = prepare(problem);
  return solve_flow(problem, prep, /*balance=*/false);
}

Assignment solve_balance(const MatchProblem& problem) {
  if (problem.lambda < 0.0) throw std::runtime_error("matcher: negative lambda");
  if (problem.lambda == 0.0) return solve_basic(problem);
  const Prepared prep = prepare(problem);
  return solve_flow(problem, prep, /*balance=*/true);
}

VerifyResult verify(const Assignment& assignment, const MatchProblem& problem) {
  VerifyResult result;
  auto violation = [&result](const std::string& what) {
    result.ok = false;
    result.violations.push_back(what);
  };

  const int n = problem.n_reviewers();
  const int m = problem.n_papers();
  std::vector<int> paper_count(m, 0), loads(n, 0);
  std::vector<char> seen(static_cast<std::size_t>(n) * m, 0);
  std::vector<char> coi_mask(static_cast<std::size_t>(n) * m, 0);
  for (const Key& k : problem.coi)
    if (k.reviewer >= 0 && k.reviewer < n && k.paper >= 0 && k.paper < m)
      coi_mask[static_cast<std::size_t>(k.reviewer) * m + k.paper] = 1;

  for (const Key& k : assignment.pairs) {
    if (k.reviewer < 0 || k.reviewer >= n || k.paper < 0 || k.paper >= m) {
      violation("pair (" + std::to_string(k.reviewer) + "," + std::to_string(k.paper) +
                ") outside matrix");
      continue;
    }
    const std::size_t idx = static_cast<std::size_t>(k.reviewer) * m + k.paper;
    if (seen[idx])
      violation("pair (" + std::to_string(k.reviewer) + "," + std::to_string(k.paper) +
                ") assigned twice");
    seen[idx] = 1;
    if (coi_mask[idx])
      violation("conflict-of-interest pair (" + std::to_string(k.reviewer) + "," +
                std::to_string(k.paper) + ") assigned");
    ++paper_count[k.paper];
    ++loads[k.reviewer];
  }
  for (int p = 0; p < m; ++p)
    if (paper_count[p] != problem.r_target)
      violation("paper " + std::to_string(p) + " assigned " +
                std::to_string(paper_count[p]) + " reviewers, expected " +
                std::to_string(problem.r_target));
  for (int r = 0; r < n; ++r)
    if (loads[r] < problem.p_min || loads[r] > problem.p_max)
      violation("reviewer " + std::to_string(r) + " load " + std::to_string(loads[r]) +
                " outside [" + std::to_string(problem.p_min) + "," +
                std::to_string(problem.p_max) + "]");
  if (assignment.per_reviewer_load != loads)
    violation("per_reviewer_load inconsistent with pairs");

  const Eigen::MatrixXd effective =
      problem.transform ? apply_transform(*problem.transform, problem.suitability)
                        : problem.suitability;
  std::vector<Key> sorted_pairs = assignment.pairs;
  std::sort(sorted_pairs.begin(), sorted_pairs.end());
  const double raw = pair_sum(effective, sorted_pairs);
  const double objective =
      raw - (problem.lambda > 0.0
                 ? balance_penalty(loads, problem.mean_load(), problem.lambda,
                                   problem.penalty_shape)
                 : 0.0);
  if (std::abs(raw - assignment.raw_suitability_sum) > 1e-6)
    violation("recomputed suitability sum differs from reported value");
  if (std::abs(objective - assignment.objective_value) > 1e-6)
    violation("recomputed objective differs from reported value");
  return result;
}

}  // namespace papermatch
