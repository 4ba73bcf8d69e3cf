#include "papermatch/min_cost_flow.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <queue>
#include <stdexcept>

namespace papermatch {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

MinCostFlow::MinCostFlow(int n_nodes) : n_(n_nodes) {
  if (n_nodes < 0) throw std::invalid_argument("MinCostFlow: negative node count");
  // Two extra slots for the super-source/sink appended by solve().
  adjacency_.resize(n_ + 2);
  excess_.assign(n_ + 2, 0);
}

int MinCostFlow::add_arc(int from, int to, int lower, int upper, double cost) {
  if (solved_) throw std::logic_error("MinCostFlow: add_arc after solve");
  if (from < 0 || from >= n_ || to < 0 || to >= n_)
    throw std::out_of_range("MinCostFlow: arc endpoint outside graph");
  if (lower < 0 || lower > upper)
    throw std::invalid_argument("MinCostFlow: need 0 <= lower <= upper");
  if (!std::isfinite(cost))
    throw std::invalid_argument("MinCostFlow: arc cost must be finite");

  const int id = static_cast<int>(lower_.size());
  lower_.push_back(lower);
  upper_minus_lower_.push_back(upper - lower);
  excess_[to] += lower;
  excess_[from] -= lower;
  forced_cost_ += static_cast<double>(lower) * cost;

  adjacency_[from].push_back(static_cast<int>(arcs_.size()));
  arcs_.push_back({to, upper - lower, cost});
  adjacency_[to].push_back(static_cast<int>(arcs_.size()));
  arcs_.push_back({from, 0, -cost});
  return id;
}

void MinCostFlow::spfa_potentials(int source) {
  const int n_all = n_ + 2;
  potential_.assign(n_all, kInf);
  potential_[source] = 0.0;
  std::deque<int> queue{source};
  std::vector<char> in_queue(n_all, 0);
  in_queue[source] = 1;
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    in_queue[u] = 0;
    for (int arc_id : adjacency_[u]) {
      const Arc& arc = arcs_[arc_id];
      if (arc.cap <= 0) continue;
      const double cand = potential_[u] + arc.cost;
      if (cand < potential_[arc.to] - 1e-15) {
        potential_[arc.to] = cand;
        if (!in_queue[arc.to]) {
          in_queue[arc.to] = 1;
          queue.push_back(arc.to);
        }
      }
    }
  }
  for (double& p : potential_)
    if (p == kInf) p = 0.0;
}

bool MinCostFlow::dijkstra(int source, int sink) {
  const int n_all = n_ + 2;
  dist_.assign(n_all, kInf);
  parent_arc_.assign(n_all, -1);
  std::vector<char> done(n_all, 0);
  using Entry = std::pair<double, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  dist_[source] = 0.0;
  heap.emplace(0.0, source);
  while (!heap.empty()) {
    auto [d, u] = heap.top();
    heap.pop();
    if (done[u]) continue;
    done[u] = 1;
    if (u == sink) break;
    for (int arc_id : adjacency_[u]) {
      const Arc& arc = arcs_[arc_id];
      if (arc.cap <= 0 || done[arc.to]) continue;
      // Reduced cost; clamp float dust so Dijkstra's invariant holds.
      const double rc = std::max(0.0, arc.cost + potential_[u] - potential_[arc.to]);
      const double cand = dist_[u] + rc;
      if (cand < dist_[arc.to]) {
        dist_[arc.to] = cand;
        parent_arc_[arc.to] = arc_id;
        heap.emplace(cand, arc.to);
      }
    }
  }
  if (dist_[sink] == kInf) return false;
  const double cap = dist_[sink];
  for (int v = 0; v < n_all; ++v)
    potential_[v] += done[v] ? std::min(dist_[v], cap) : cap;
  return true;
}

bool MinCostFlow::solve() {
  if (solved_) throw std::logic_error("MinCostFlow: solve called twice");
  solved_ = true;

  const int ss = n_;
  const int tt = n_ + 1;
  long long required = 0;
  for (int v = 0; v < n_; ++v) {
    if (excess_[v] > 0) {
      required += excess_[v];
      adjacency_[ss].push_back(static_cast<int>(arcs_.size()));
      arcs_.push_back({v, static_cast<int>(excess_[v]), 0.0});
      adjacency_[v].push_back(static_cast<int>(arcs_.size()));
      arcs_.push_back({ss, 0, 0.0});
    } else if (excess_[v] < 0) {
      adjacency_[v].push_back(static_cast<int>(arcs_.size()));
      arcs_.push_back({tt, static_cast<int>(-excess_[v]), 0.0});
      adjacency_[tt].push_back(static_cast<int>(arcs_.size()));
      arcs_.push_back({v, 0, 0.0});
    }
  }
  if (required == 0) {
    feasible_ = true;
    return true;
  }

  spfa_potentials(ss);
  long long pushed = 0;
  while (pushed < required && dijkstra(ss, tt)) {
    int bottleneck = std::numeric_limits<int>::max();
    for (int v = tt; v != ss;) {
      const int arc_id = parent_arc_[v];
      bottleneck = std::min(bottleneck, arcs_[arc_id].cap);
      v = arcs_[arc_id ^ 1].to;
    }
    for (int v = tt; v != ss;) {
      const int arc_id = parent_arc_[v];
      arcs_[arc_id].cap -= bottleneck;
      arcs_[arc_id ^ 1].cap += bottleneck;
      v = arcs_[arc_id ^ 1].to;
    }
    pushed += bottleneck;
  }
  feasible_ = (pushed == required);
  return feasible_;
}

int MinCostFlow::flow(int arc) const {
  if (!solved_) throw std::logic_error("MinCostFlow: flow before solve");
  // Residual capacity on the reverse arc equals the routed flow.
  return lower_[arc] + arcs_[2 * arc + 1].cap;
}

double MinCostFlow::total_cost() const {
  if (!solved_) throw std::logic_error("MinCostFlow: cost before solve");
  double cost = forced_cost_;
  for (std::size_t a = 0; a < lower_.size(); ++a)
    cost += static_cast<double>(arcs_[2 * a + 1].cap) * arcs_[2 * a].cost;
  return cost;
}

std::vector<int> MinCostFlow::unsatisfied_nodes() const {
  if (!solved_) throw std::logic_error("MinCostFlow: query before solve");
  std::vector<int> nodes;
  if (feasible_) return nodes;
  // SS arcs with leftover capacity mark unsatisfied surpluses; TT arcs with
  // leftover capacity mark unmet demands.
  for (std::size_t a = 2 * lower_.size(); a < arcs_.size(); a += 2) {
    if (arcs_[a].cap > 0) {
      const int from = arcs_[a + 1].to;
      nodes.push_back(from == n_ ? arcs_[a].to : from);
    }
  }
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  return nodes;
}

}  // namespace papermatch
