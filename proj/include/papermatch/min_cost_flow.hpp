#pragma once

#include <limits>
#include <vector>

namespace papermatch {

// Min-cost flow with per-arc [lower, upper] bounds and real-valued costs.
// Lower bounds are handled by the standard forced-flow reduction to a
// super-source/super-sink problem; the remaining flow is routed by
// successive shortest paths (SPFA for the initial potentials, then Dijkstra
// on reduced costs). Capacities and flows are integral throughout, so the
// solution is integral whenever one exists.
//
// The caller must not create a negative-cost cycle with positive residual
// capacity in the initial (zero-flow) graph.
class MinCostFlow {
 public:
  explicit MinCostFlow(int n_nodes);

  // Returns an arc id usable with flow(). Bounds must satisfy
  // 0 <= lower <= upper.
  int add_arc(int from, int to, int lower, int upper, double cost);

  // Computes a feasible min-cost circulation. Returns false when the lower
  // bounds / capacities admit no feasible flow.
  bool solve();

  int flow(int arc) const;
  double total_cost() const;

  // After a failed solve: nodes whose forced inflow/outflow could not be
  // satisfied, in node order.
  std::vector<int> unsatisfied_nodes() const;

 private:
  struct Arc {
    int to;
    int cap;       // residual capacity
    double cost;
  };

  void spfa_potentials(int source);
  bool dijkstra(int source, int sink);

  int n_;
  std::vector<Arc> arcs_;                 // arc 2i is paired with reverse 2i+1
  std::vector<std::vector<int>> adjacency_;
  std::vector<int> lower_;                // per public arc
  std::vector<int> upper_minus_lower_;    // per public arc
  std::vector<long long> excess_;
  std::vector<double> potential_;
  std::vector<double> dist_;
  std::vector<int> parent_arc_;
  bool solved_ = false;
  bool feasible_ = false;
  double forced_cost_ = 0.0;
};

}  // namespace papermatch
