#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <utility>
#include <vector>

#include "heisqi/error.hpp"
#include "heisqi/random.hpp"
#include "heisqi/visual_metric.hpp"

namespace heisqi {

/// Discretisation of the chain infimum: a random net in [-box_radius, box_radius]^{2n+1}.
/// Without neighbor_count the graph is complete for sample_count <= 2000 and a
/// 32-nearest-neighbour graph beyond that.
struct NetConfig {
  int sample_count = 1000;
  double box_radius = 1.0;
  std::optional<int> neighbor_count;
  std::uint64_t seed = 0;

  int effective_neighbors() const {
    if (neighbor_count) return *neighbor_count;
    return sample_count <= 2000 ? sample_count + 1 : 32;
  }
};

/// Net sample i depends only on (seed, i): a smaller net is a prefix of a larger one.
inline std::vector<LieElement> net_samples(int n, const NetConfig& net) {
  std::vector<LieElement> out;
  out.reserve(static_cast<std::size_t>(net.sample_count));
  const int d = 2 * n + 1;
  for (int i = 0; i < net.sample_count; ++i) {
    RngStream rng(net.seed, 0xc4a1, static_cast<std::uint64_t>(i) * static_cast<std::uint64_t>(d));
    out.push_back(sample_box(n, net.box_radius, rng));
  }
  return out;
}

namespace detail {

inline std::vector<double> dense_dijkstra(const QuasimetricParams& qp, const std::vector<AdaptedPoint>& pts,
                                          std::size_t source) {
  const std::size_t v = pts.size();
  std::vector<double> dist(v, std::numeric_limits<double>::infinity());
  std::vector<bool> done(v, false);
  dist[source] = 0.0;
  for (std::size_t it = 0; it < v; ++it) {
    std::size_t u = v;
    for (std::size_t j = 0; j < v; ++j)
      if (!done[j] && (u == v || dist[j] < dist[u])) u = j;
    if (u == v || dist[u] == std::numeric_limits<double>::infinity()) break;
    done[u] = true;
    for (std::size_t j = 0; j < v; ++j) {
      if (done[j]) continue;
      const double cand = dist[u] + dist_A(qp, pts[u], pts[j]);
      if (cand < dist[j]) dist[j] = cand;
    }
  }
  return dist;
}

inline std::vector<double> knn_dijkstra(const QuasimetricParams& qp, const std::vector<AdaptedPoint>& pts,
                                        std::size_t source, std::size_t target, int neighbors) {
  const std::size_t v = pts.size();
  std::vector<std::vector<std::pair<std::size_t, double>>> adj(v);
  std::vector<std::pair<double, std::size_t>> row;
  const std::size_t kk = std::min<std::size_t>(static_cast<std::size_t>(neighbors), v - 1);
  for (std::size_t i = 0; i < v; ++i) {
    row.clear();
    for (std::size_t j = 0; j < v; ++j)
      if (j != i) row.emplace_back(dist_A(qp, pts[i], pts[j]), j);
    std::partial_sort(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(kk), row.end());
    for (std::size_t r = 0; r < kk; ++r) {
      adj[i].emplace_back(row[r].second, row[r].first);
      adj[row[r].second].emplace_back(i, row[r].first);
    }
  }
  const double direct = dist_A(qp, pts[source], pts[target]);
  adj[source].emplace_back(target, direct);
  adj[target].emplace_back(source, direct);

  std::vector<double> dist(v, std::numeric_limits<double>::infinity());
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[source] = 0.0;
  heap.emplace(0.0, source);
  while (!heap.empty()) {
    const auto [du, u] = heap.top();
    heap.pop();
    if (du > dist[u]) continue;
    for (const auto& [w, len] : adj[u]) {
      const double cand = du + len;
      if (cand < dist[w]) {
        dist[w] = cand;
        heap.emplace(cand, w);
      }
    }
  }
  return dist;
}

}  // namespace detail

/// Shortest chain sum from p to q through the net, with edge weights d_A.
/// Approximates from above the largest metric below d_A, which is
/// biLipschitz to d_A when the smallest effective exponent is at least 1.
inline double chain_dist(const QuasimetricParams& qp, const LieElement& p, const LieElement& q, const NetConfig& net) {
  const GradedStructure& gs = qp.structure();
  gs.require(p);
  gs.require(q);
  if (qp.exponent(0) < 1.0 - 1e-12) {
    throw Error(ErrorKind::HypothesisViolated, "smallest effective exponent s*alpha_1 = " +
                                                   std::to_string(qp.exponent(0)) + " < 1");
  }
  if (net.sample_count < 2) throw Error(ErrorKind::InvalidArgument, "sample_count must be at least 2");
  if (net.neighbor_count && *net.neighbor_count < 1) {
    throw Error(ErrorKind::InvalidArgument, "neighbor_count must be at least 1");
  }
  if (p.coords().cwiseAbs().maxCoeff() > net.box_radius || q.coords().cwiseAbs().maxCoeff() > net.box_radius) {
    throw Error(ErrorKind::OutOfBox, "endpoints must lie in the sampling box");
  }
  if (p == q) return 0.0;

  std::vector<AdaptedPoint> pts;
  pts.reserve(static_cast<std::size_t>(net.sample_count) + 2);
  pts.emplace_back(gs, p);
  pts.emplace_back(gs, q);
  for (const auto& x : net_samples(gs.n(), net)) pts.emplace_back(gs, x);

  const int neighbors = net.effective_neighbors();
  const auto dist = neighbors >= static_cast<int>(pts.size()) - 1 ? detail::dense_dijkstra(qp, pts, 0)
                                                                  : detail::knn_dijkstra(qp, pts, 0, 1, neighbors);
  return dist[1];
}

}  // namespace heisqi
