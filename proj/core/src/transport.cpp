#include "derivroots/transport.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>

#include "derivroots/errors.hpp"

namespace derivroots {

namespace {

using Flow = std::int64_t;
constexpr Flow kQuantum = Flow{1} << 50;

std::vector<Flow> quantize(std::span<const double> w) {
  std::vector<Flow> q(w.size());
  Flow total = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    q[i] = static_cast<Flow>(std::llround(w[i] * static_cast<double>(kQuantum)));
    total += q[i];
  }
  const auto largest = static_cast<std::size_t>(std::max_element(w.begin(), w.end()) - w.begin());
  q[largest] += kQuantum - total;
  if (q[largest] < 0) throw ValidationError("weights", "weights do not sum to 1");
  return q;
}

// Spanning-tree network simplex for the uncapacitated transportation
// problem. Nodes 0..n-1 supply, n..n+m-1 demand, n+m is the root joined to
// every node by an artificial arc.
class NetworkSimplex {
 public:
  NetworkSimplex(std::vector<Flow> supply, std::vector<Flow> demand, std::span<const double> cost)
      : n_(supply.size()), m_(demand.size()), cost_matrix_(cost) {
    nodes_ = n_ + m_ + 1;
    root_ = n_ + m_;
    real_arcs_ = n_ * m_;
    const std::size_t arcs = real_arcs_ + n_ + m_;
    flow_.assign(arcs, 0);
    state_.assign(real_arcs_, 1);  // 1: at lower bound, 0: in tree
    double max_cost = 0.0;
    for (double c : cost) max_cost = std::max(max_cost, std::abs(c));
    artificial_cost_ = (max_cost + 1.0) * static_cast<double>(nodes_);
    epsilon_ = 1e-13 * (max_cost + 1.0);

    parent_.assign(nodes_, kNone);
    pred_.assign(nodes_, kNone);
    up_.assign(nodes_, 0);
    depth_.assign(nodes_, 0);
    pi_.assign(nodes_, 0.0);
    first_child_.assign(nodes_, kNone);
    next_sibling_.assign(nodes_, kNone);
    prev_sibling_.assign(nodes_, kNone);
    art_source_.assign(n_ + m_, 0);
    art_target_.assign(n_ + m_, 0);
    art_cost_.assign(n_ + m_, 0.0);
    for (std::size_t u = 0; u < n_ + m_; ++u) {
      const std::size_t e = real_arcs_ + u;
      const Flow s = u < n_ ? supply[u] : -demand[u - n_];
      if (s >= 0) {
        art_source_[u] = u;
        art_target_[u] = root_;
        art_cost_[u] = 0.0;
        flow_[e] = s;
        pi_[u] = 0.0;
      } else {
        art_source_[u] = root_;
        art_target_[u] = u;
        art_cost_[u] = artificial_cost_;
        flow_[e] = -s;
        pi_[u] = artificial_cost_;
      }
      attach(u, root_, e);
      depth_[u] = 1;
    }
    block_ = std::max<std::size_t>(10, static_cast<std::size_t>(std::sqrt(static_cast<double>(real_arcs_))));
  }

  double solve() {
    while (find_entering()) pivot();
    for (std::size_t u = 0; u < n_ + m_; ++u) {
      if (flow_[real_arcs_ + u] != 0) {
        throw AccuracyError(static_cast<double>(flow_[real_arcs_ + u]),
                            "transport problem ended with artificial flow");
      }
    }
    long double total = 0.0L;
    for (std::size_t e = 0; e < real_arcs_; ++e) {
      if (flow_[e] != 0) total += static_cast<long double>(flow_[e]) * cost_matrix_[e];
    }
    return static_cast<double>(total / static_cast<long double>(kQuantum));
  }

 private:
  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

  std::size_t source(std::size_t e) const {
    return e < real_arcs_ ? e / m_ : art_source_[e - real_arcs_];
  }
  std::size_t target(std::size_t e) const {
    return e < real_arcs_ ? n_ + e % m_ : art_target_[e - real_arcs_];
  }
  double cost(std::size_t e) const {
    return e < real_arcs_ ? cost_matrix_[e] : art_cost_[e - real_arcs_];
  }
  double reduced(std::size_t e) const { return cost(e) + pi_[source(e)] - pi_[target(e)]; }

  void attach(std::size_t u, std::size_t p, std::size_t arc) {
    parent_[u] = p;
    pred_[u] = arc;
    up_[u] = source(arc) == u ? 1 : 0;
    prev_sibling_[u] = kNone;
    next_sibling_[u] = first_child_[p];
    if (first_child_[p] != kNone) prev_sibling_[first_child_[p]] = u;
    first_child_[p] = u;
  }

  void detach(std::size_t u) {
    const std::size_t p = parent_[u];
    if (prev_sibling_[u] != kNone) {
      next_sibling_[prev_sibling_[u]] = next_sibling_[u];
    } else {
      first_child_[p] = next_sibling_[u];
    }
    if (next_sibling_[u] != kNone) prev_sibling_[next_sibling_[u]] = prev_sibling_[u];
    parent_[u] = kNone;
    prev_sibling_[u] = next_sibling_[u] = kNone;
  }

  // Block search: the most negative reduced cost within the first block
  // that contains any negative one.
  bool find_entering() {
    double best = -epsilon_;
    std::size_t cand = kNone;
    std::size_t scanned = 0;
    std::size_t e = next_arc_;
    std::size_t in_block = 0;
    while (scanned < real_arcs_) {
      if (state_[e]) {
        const double c = reduced(e);
        if (c < best) {
          best = c;
          cand = e;
        }
      }
      ++scanned;
      if (++e == real_arcs_) e = 0;
      if (++in_block == block_) {
        if (cand != kNone) break;
        in_block = 0;
      }
    }
    if (cand == kNone) return false;
    in_arc_ = cand;
    next_arc_ = e;
    return true;
  }

  void pivot() {
    const std::size_t s = source(in_arc_), t = target(in_arc_);
    // Lowest common ancestor.
    std::size_t a = s, b = t;
    while (a != b) {
      if (depth_[a] >= depth_[b]) {
        a = parent_[a];
      } else {
        b = parent_[b];
      }
    }
    const std::size_t join = a;

    // Leaving arc by the strongly feasible rule. Flow is pushed along the
    // entering arc from s to t, so arcs on the s side pointing up lose
    // flow, as do arcs on the t side pointing down.
    Flow delta = std::numeric_limits<Flow>::max();
    std::size_t out = kNone;
    bool on_first = false;
    for (std::size_t u = s; u != join; u = parent_[u]) {
      if (up_[u] && flow_[pred_[u]] < delta) {
        delta = flow_[pred_[u]];
        out = u;
        on_first = true;
      }
    }
    for (std::size_t u = t; u != join; u = parent_[u]) {
      if (!up_[u] && flow_[pred_[u]] <= delta) {
        delta = flow_[pred_[u]];
        out = u;
        on_first = false;
      }
    }
    if (out == kNone) throw AccuracyError(0.0, "transport problem is unbounded");

    if (delta > 0) {
      flow_[in_arc_] += delta;
      for (std::size_t u = s; u != join; u = parent_[u]) flow_[pred_[u]] += up_[u] ? -delta : delta;
      for (std::size_t u = t; u != join; u = parent_[u]) flow_[pred_[u]] += up_[u] ? delta : -delta;
    }

    const std::size_t u_in = on_first ? s : t;
    const std::size_t v_in = on_first ? t : s;
    const std::size_t leaving = pred_[out];
    state_[in_arc_] = 0;
    if (leaving < real_arcs_) state_[leaving] = 1;

    // Re-root the cut subtree at u_in and hang it below v_in.
    std::vector<std::size_t>& path = path_;
    path.clear();
    for (std::size_t u = u_in;; u = parent_[u]) {
      path.push_back(u);
      if (u == out) break;
    }
    std::vector<std::size_t> arcs(path.size());
    for (std::size_t i = 0; i < path.size(); ++i) arcs[i] = pred_[path[i]];
    for (std::size_t i = path.size(); i-- > 0;) detach(path[i]);
    attach(u_in, v_in, in_arc_);
    for (std::size_t i = 1; i < path.size(); ++i) attach(path[i], path[i - 1], arcs[i - 1]);

    const double sigma = u_in == source(in_arc_) ? pi_[v_in] - cost(in_arc_) - pi_[u_in]
                                                 : pi_[v_in] + cost(in_arc_) - pi_[u_in];
    // Shift potentials and depths over the moved subtree.
    stack_.clear();
    stack_.push_back(u_in);
    while (!stack_.empty()) {
      const std::size_t u = stack_.back();
      stack_.pop_back();
      pi_[u] += sigma;
      depth_[u] = depth_[parent_[u]] + 1;
      for (std::size_t c = first_child_[u]; c != kNone; c = next_sibling_[c]) stack_.push_back(c);
    }
  }

  std::size_t n_, m_, nodes_ = 0, root_ = 0, real_arcs_ = 0;
  std::span<const double> cost_matrix_;
  double artificial_cost_ = 0.0, epsilon_ = 0.0;
  std::vector<Flow> flow_;
  std::vector<char> state_;
  std::vector<std::size_t> parent_, pred_, depth_, first_child_, next_sibling_, prev_sibling_;
  std::vector<char> up_;
  std::vector<double> pi_;
  std::vector<std::size_t> art_source_, art_target_;
  std::vector<double> art_cost_;
  std::vector<std::size_t> path_, stack_;
  std::size_t block_ = 10, next_arc_ = 0, in_arc_ = 0;
};

}  // namespace

double transport_cost(std::span<const double> supply, std::span<const double> demand,
                      std::span<const double> cost) {
  if (supply.empty() || demand.empty()) throw ValidationError("weights", "measures must be nonempty");
  if (supply.size() + demand.size() > kTransportSupportCap) {
    throw ScaleError("combined support " + std::to_string(supply.size() + demand.size()) +
                     " exceeds the exact transport cap " + std::to_string(kTransportSupportCap) +
                     "; subsample the measures");
  }
  if (cost.size() != supply.size() * demand.size()) {
    throw ValidationError("cost", "cost matrix has the wrong size");
  }
  if (demand.size() == 1) {
    long double total = 0.0L;
    for (std::size_t i = 0; i < supply.size(); ++i) total += static_cast<long double>(supply[i]) * cost[i];
    return static_cast<double>(total);
  }
  if (supply.size() == 1) {
    long double total = 0.0L;
    for (std::size_t j = 0; j < demand.size(); ++j) total += static_cast<long double>(demand[j]) * cost[j];
    return static_cast<double>(total);
  }
  NetworkSimplex solver(quantize(supply), quantize(demand), cost);
  return solver.solve();
}

}  // namespace derivroots
