#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "itersolve/convergence.hpp"
#include "itersolve/errors.hpp"
#include "itersolve/matrix.hpp"
#include "itersolve/solve.hpp"
#include "itersolve/stationary.hpp"

namespace itersolve::traffic {

struct Node {
  std::string id;
  double external_net_inflow = 0.0;  // vehicles/day entering minus leaving at this junction

  friend bool operator==(const Node&, const Node&) = default;
};

struct Branch {
  std::size_t from;  // node index
  std::size_t to;

  friend bool operator==(const Branch&, const Branch&) = default;
};

/// Junctions with external flows and the directed branches between them.
class FlowNetwork {
 public:
  FlowNetwork() = default;

  FlowNetwork(std::vector<Node> nodes, std::vector<Branch> branches)
      : nodes_(std::move(nodes)), branches_(std::move(branches)) {
    std::unordered_set<std::string> seen;
    for (const auto& n : nodes_) {
      if (!seen.insert(n.id).second) throw InvalidArgument("duplicate node id '" + n.id + "'");
      if (!std::isfinite(n.external_net_inflow)) throw InvalidArgument("node '" + n.id + "' has a non-finite flow");
    }
    for (std::size_t k = 0; k < branches_.size(); ++k) {
      if (branches_[k].from >= nodes_.size() || branches_[k].to >= nodes_.size()) {
        throw InvalidArgument("branch " + std::to_string(k) + " references a missing node");
      }
    }
  }

  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  const std::vector<Branch>& branches() const noexcept { return branches_; }

  std::optional<std::size_t> find(std::string_view id) const {
    for (std::size_t i = 0; i < nodes_.size(); ++i)
      if (nodes_[i].id == id) return i;
    return std::nullopt;
  }

  /// Single directed cycle through every node: one branch in and one out everywhere.
  bool is_ring() const {
    const std::size_t n = nodes_.size();
    if (n == 0 || branches_.size() != n) return false;
    std::vector<std::size_t> out(n, n), in_count(n, 0);
    for (const auto& b : branches_) {
      if (out[b.from] != n) return false;
      out[b.from] = b.to;
      ++in_count[b.to];
    }
    for (std::size_t c : in_count)
      if (c != 1) return false;
    std::size_t cur = 0;
    for (std::size_t step = 1; step < n; ++step) {
      cur = out[cur];
      if (cur == 0) return false;
    }
    return out[cur] == 0;
  }

  friend bool operator==(const FlowNetwork&, const FlowNetwork&) = default;

 private:
  std::vector<Node> nodes_;
  std::vector<Branch> branches_;
};

struct ExitCounts {
  std::string label;
  double inflow = 0.0;   // on-ramp AADT
  double outflow = 0.0;  // off-ramp AADT
};

/// Per-exit AADT in ring order.
struct RingSpec {
  std::vector<ExitCounts> exits;
  std::size_t size() const noexcept { return exits.size(); }
};

struct LinearSystem {
  SparseMatrix a;
  Vector b;
};

/// One balance row per node (outgoing branch +1, incoming -1, rhs = external net inflow).
/// A row is negated when needed so that the branch sharing its index carries +1; for a
/// ring built by generate_ring this gives +1 on the diagonal, -1 on the superdiagonal
/// and -1 in the bottom-left corner.
inline LinearSystem assemble(const FlowNetwork& net) {
  const auto& nodes = net.nodes();
  const auto& branches = net.branches();
  std::vector<std::vector<std::pair<std::size_t, double>>> rows(nodes.size());
  for (std::size_t k = 0; k < branches.size(); ++k) {
    const auto& br = branches[k];
    if (br.from == br.to) {
      throw InvalidArgument("branch " + std::to_string(k) + " is a self-loop at node '" + nodes[br.from].id + "'");
    }
    rows[br.from].emplace_back(k, 1.0);
    rows[br.to].emplace_back(k, -1.0);
  }
  std::vector<Triplet> triplets;
  Vector b(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (rows[i].empty()) throw InvalidArgument("node '" + nodes[i].id + "' has no incident branch");
    double sign = 1.0;
    for (const auto& [col, v] : rows[i])
      if (col == i && v < 0.0) sign = -1.0;
    for (const auto& [col, v] : rows[i]) triplets.push_back({i, col, sign * v});
    b[i] = sign * nodes[i].external_net_inflow;
  }
  return {SparseMatrix::from_triplets(nodes.size(), branches.size(), std::move(triplets)), std::move(b)};
}

/// Ring of n exits; branch i is the segment leaving exit i toward exit i-1 (wrapping).
inline FlowNetwork generate_ring(const RingSpec& spec) {
  const std::size_t n = spec.size();
  if (n < 3) throw InvalidArgument("a ring needs at least 3 exits, got " + std::to_string(n));
  std::vector<Node> nodes;
  std::vector<Branch> branches;
  nodes.reserve(n);
  branches.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& e = spec.exits[i];
    if (!(e.inflow >= 0.0) || !(e.outflow >= 0.0) || !std::isfinite(e.inflow) || !std::isfinite(e.outflow)) {
      throw InvalidArgument("exit '" + e.label + "' needs finite, non-negative AADT values");
    }
    nodes.push_back({e.label.empty() ? std::to_string(i + 1) : e.label, e.inflow - e.outflow});
    branches.push_back({i, (i + n - 1) % n});
  }
  return {std::move(nodes), std::move(branches)};
}

struct ReducedSystem {
  SparseMatrix a_tilde;        // m x (m-1)
  DenseMatrix normal_matrix;   // a_tilde^T a_tilde
  Vector normal_rhs;           // a_tilde^T b
  std::size_t dropped_column;  // always the last
};

/// Drops the last unknown of a system whose null space contains the all-ones vector and
/// forms the normal equations of what remains.
template <RowMatrix M>
ReducedSystem reduce(const M& a, std::span<const double> b) {
  if (a.rows() != a.cols() || a.rows() < 2) {
    throw InvalidArgument("reduction needs a square matrix of size >= 2, got " + detail::dims(a.rows(), a.cols()));
  }
  if (b.size() != a.rows()) throw InvalidArgument("rhs length does not match the matrix");
  const std::size_t m = a.rows();
  const Vector ones(m, 1.0);
  if (norm_inf(matvec(a, ones)) > 1e-9) {
    throw InvalidArgument("matrix is not circulant-balanced; reduction inapplicable");
  }
  std::vector<Triplet> kept;
  for (std::size_t r = 0; r < m; ++r) {
    a.for_each_in_row(r, [&](std::size_t c, double v) {
      if (c + 1 < m && v != 0.0) kept.push_back({r, c, v});
    });
  }
  auto a_tilde = SparseMatrix::from_triplets(m, m - 1, std::move(kept));
  auto normal = gram(a_tilde);
  auto rhs = gram_rhs(a_tilde, b);
  return {std::move(a_tilde), std::move(normal), std::move(rhs), m - 1};
}

struct Reconstruction {
  Vector flows;  // length m
  double shift;
};

inline double median(Vector v) {
  if (v.empty()) throw InvalidArgument("median of an empty vector");
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 == 1 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

/// The reduced solution pins the dropped unknown at 0. Shifting every unknown by the
/// median c of the reduced values stays in the solution set and sets the dropped one to c.
inline Reconstruction reconstruct(std::span<const double> x_tilde) {
  if (x_tilde.empty()) throw InvalidArgument("cannot reconstruct from an empty reduced solution");
  const double c = median(Vector(x_tilde.begin(), x_tilde.end()));
  Vector out;
  out.reserve(x_tilde.size() + 1);
  for (double v : x_tilde) out.push_back(v + c);
  out.push_back(c);
  return {std::move(out), c};
}

/// Removes the listed exits from a ring, joining each one's incoming and outgoing
/// segments. Remaining nodes keep their order and labels; branch k afterwards is the
/// segment leaving remaining node k.
inline FlowNetwork close_exits(const FlowNetwork& net, std::span<const std::string> exit_ids) {
  if (!net.is_ring()) throw InvalidArgument("exit closure needs a ring network");
  const std::size_t n = net.nodes().size();
  std::vector<bool> closed(n, false);
  for (const auto& id : exit_ids) {
    const auto idx = net.find(id);
    if (!idx) throw InvalidArgument("cannot close unknown exit '" + id + "'");
    closed[*idx] = true;
  }
  const auto remaining = static_cast<std::size_t>(std::count(closed.begin(), closed.end(), false));
  if (remaining < 3) {
    throw InvalidArgument("closing these exits leaves " + std::to_string(remaining) + " nodes; a ring needs 3");
  }
  std::vector<std::size_t> next(n);
  for (const auto& br : net.branches()) next[br.from] = br.to;

  std::vector<std::size_t> new_index(n, n);
  std::vector<Node> nodes;
  for (std::size_t i = 0; i < n; ++i) {
    if (closed[i]) continue;
    new_index[i] = nodes.size();
    nodes.push_back(net.nodes()[i]);
  }
  std::vector<Branch> branches;
  for (std::size_t i = 0; i < n; ++i) {
    if (closed[i]) continue;
    std::size_t to = next[i];
    while (closed[to]) to = next[to];
    branches.push_back({new_index[i], new_index[to]});
  }
  return {std::move(nodes), std::move(branches)};
}

struct SegmentFlows {
  Vector flows;  // vehicles/day on each branch
  double shift_constant = 0.0;
  double residual_norm = 0.0;  // |A x - b|_2 of the full system
};

struct TrafficOptions {
  double eta = 1e-3;
  std::size_t max_iterations = 100000;
  std::optional<MethodKind> method;  // automatic selection when absent
  std::optional<double> omega;       // SOR weight; the profiled weight when absent
};

struct TrafficResult {
  SegmentFlows segments;
  SolveReport report;
  MatrixProfile profile;
  bool unbalanced_inflows = false;  // external flows do not sum to zero; result is a least-squares fit
};

inline bool flows_balanced(std::span<const double> b) {
  double sum = 0.0, mag = 0.0;
  for (double v : b) {
    sum += v;
    mag += std::abs(v);
  }
  return std::abs(sum) <= 1e-9 * std::max(1.0, mag);
}

/// assemble -> reduce -> classify -> select (or the override) -> solve -> reconstruct.
inline TrafficResult solve_traffic(const FlowNetwork& net, const TrafficOptions& opts = {}) {
  const auto sys = assemble(net);
  const auto reduced = reduce(sys.a, sys.b);

  TrafficResult out;
  out.unbalanced_inflows = !flows_balanced(sys.b);
  out.profile = classify(reduced.normal_matrix, reduced.normal_rhs, opts.eta);

  SolverConfig cfg;
  cfg.eta = opts.eta;
  cfg.max_iterations = opts.max_iterations;
  if (!opts.method) {
    cfg.method = select_method(out.profile).method;
  } else if (*opts.method == MethodKind::SOR) {
    cfg.method = Method::sor(opts.omega.value_or(out.profile.sor_omega));
  } else {
    cfg.method = {*opts.method, 1.0};
  }
  out.report = solve(reduced.normal_matrix, reduced.normal_rhs, cfg, &out.profile);

  auto rec = reconstruct(out.report.solution);
  const Vector r = residual(sys.a, rec.flows, sys.b);
  out.segments = {std::move(rec.flows), rec.shift, norm2(r)};
  return out;
}

}  // namespace itersolve::traffic
