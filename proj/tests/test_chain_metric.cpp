#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "heisqi/automorphism.hpp"
#include "heisqi/chain_metric.hpp"

using namespace heisqi;

namespace {

GradedStructure diag_structure(int n, std::initializer_list<double> d) {
  return decompose(
      diagonal_derivation(n, Eigen::Map<const Eigen::VectorXd>(d.begin(), static_cast<Eigen::Index>(d.size()))));
}

// d_A for diag(1,1,2) on H_1 written out by hand: the standard basis is a
// Darboux basis, so d = |(dx, dy)| + |dz - (x dy - y dx)/2|^{1/2}.
double oracle_dist_112(const Eigen::Vector3d& p, const Eigen::Vector3d& q) {
  const double dx = q[0] - p[0], dy = q[1] - p[1];
  const double dz = q[2] - p[2] - 0.5 * (p[0] * q[1] - p[1] * q[0]);
  return std::hypot(dx, dy) + std::sqrt(std::abs(dz));
}

// Independent shortest path: symmetric k-nearest-neighbour graph plus the
// direct p-q edge, full sort for neighbour selection, set-based Dijkstra.
double oracle_chain_112(const std::vector<Eigen::Vector3d>& pts, std::size_t k) {
  const std::size_t v = pts.size();
  std::vector<std::vector<std::pair<std::size_t, double>>> adj(v);
  for (std::size_t i = 0; i < v; ++i) {
    std::vector<std::pair<double, std::size_t>> row;
    for (std::size_t j = 0; j < v; ++j)
      if (j != i) row.emplace_back(oracle_dist_112(pts[i], pts[j]), j);
    std::sort(row.begin(), row.end());
    for (std::size_t r = 0; r < std::min(k, row.size()); ++r) {
      adj[i].emplace_back(row[r].second, row[r].first);
      adj[row[r].second].emplace_back(i, row[r].first);
    }
  }
  adj[0].emplace_back(1, oracle_dist_112(pts[0], pts[1]));
  std::vector<double> dist(v, std::numeric_limits<double>::infinity());
  std::set<std::pair<double, std::size_t>> frontier{{0.0, 0}};
  dist[0] = 0.0;
  while (!frontier.empty()) {
    const auto [du, u] = *frontier.begin();
    frontier.erase(frontier.begin());
    for (const auto& [w, len] : adj[u]) {
      if (du + len < dist[w]) {
        frontier.erase({dist[w], w});
        dist[w] = du + len;
        frontier.insert({dist[w], w});
      }
    }
  }
  return dist[1];
}

}  // namespace

TEST(ChainDist, TrivialCases) {
  const GradedStructure gs = diag_structure(1, {1, 2, 3});
  const QuasimetricParams qp(gs);
  NetConfig net;
  net.sample_count = 200;
  const LieElement p(1, {0.1, -0.2, 0.3});
  EXPECT_EQ(chain_dist(qp, p, p, net), 0.0);
  RngStream rng(8, 1);
  for (int i = 0; i < 20; ++i) {
    const LieElement a = sample_box(1, 1.0, rng), b = sample_box(1, 1.0, rng);
    const double c = chain_dist(qp, a, b, net);
    EXPECT_GT(c, 0.0);
    EXPECT_LE(c, dist_A(qp, a, b));
  }
}

TEST(ChainDist, Errors) {
  const GradedStructure gs = diag_structure(1, {1, 2, 3});
  const QuasimetricParams half(gs, 0.5), qp(gs);
  NetConfig net;
  net.sample_count = 50;
  try {
    chain_dist(half, LieElement(1), LieElement(1, {1, 0, 0}), net);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::HypothesisViolated);
  }
  try {
    chain_dist(qp, LieElement(1), LieElement(1, {2, 0, 0}), net);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::OutOfBox);
  }
}

TEST(ChainDist, NetSamplesArePrefixes) {
  NetConfig small, large;
  small.sample_count = 100;
  large.sample_count = 400;
  const auto a = net_samples(2, small), b = net_samples(2, large);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i], b[i]);
}

TEST(ChainDist, AddingNetPointsNeverIncreases) {
  const GradedStructure gs = diag_structure(1, {1, 2, 3});
  const QuasimetricParams qp(gs);
  RngStream rng(9, 2);
  for (int trial = 0; trial < 5; ++trial) {
    const LieElement p = sample_box(1, 1.0, rng), q = sample_box(1, 1.0, rng);
    double prev = std::numeric_limits<double>::infinity();
    for (int count : {10, 50, 200, 800}) {
      NetConfig net;
      net.sample_count = count;
      const double c = chain_dist(qp, p, q, net);
      EXPECT_LE(c, prev);
      prev = c;
    }
  }
}

TEST(ChainDist, GraphMetricOnFixedNet) {
  const GradedStructure gs = diag_structure(1, {1, 2, 3});
  const QuasimetricParams qp(gs);
  NetConfig net;
  net.sample_count = 300;
  const auto pts = net_samples(1, net);
  for (int i = 0; i < 10; ++i) {
    // Endpoints drawn from the net itself, so every query sees the same graph.
    const LieElement& a = pts[i];
    const LieElement& b = pts[i + 10];
    const LieElement& c = pts[i + 20];
    const double ab = chain_dist(qp, a, b, net), ba = chain_dist(qp, b, a, net);
    EXPECT_NEAR(ab, ba, 1e-12 * ab);
    EXPECT_LE(chain_dist(qp, a, c, net), ab + chain_dist(qp, b, c, net) + 1e-12);
  }
}

TEST(ChainDist, KnnGraphMatchesIndependentOracle) {
  const GradedStructure gs = diag_structure(1, {1, 1, 2});
  const QuasimetricParams qp(gs);
  NetConfig net;
  net.sample_count = 2500;
  net.neighbor_count = 16;
  RngStream rng(10, 3);
  for (int trial = 0; trial < 3; ++trial) {
    const LieElement p = sample_box(1, 1.0, rng), q = sample_box(1, 1.0, rng);
    std::vector<Eigen::Vector3d> pts = {p.coords(), q.coords()};
    for (const auto& x : net_samples(1, net)) pts.emplace_back(x.coords());
    const double want = oracle_chain_112(pts, 16);
    EXPECT_NEAR(chain_dist(qp, p, q, net), want, 1e-12 * want);
  }
}

// Regression value for the default 32-neighbour graph on 5000 samples. The
// direct edge is already the shortest chain here, so the ratio is exactly 1;
// recomputed with the independent oracle above.
TEST(ChainDist, FrozenRatioOnComplexHyperbolicExample) {
  const GradedStructure gs = diag_structure(1, {1, 1, 2});
  const QuasimetricParams qp(gs);
  NetConfig net;
  net.sample_count = 5000;
  net.seed = 0;
  const LieElement p(1), q(1, {1, 0, 0});
  const double ratio = chain_dist(qp, p, q, net) / dist_A(qp, p, q);
  EXPECT_NEAR(ratio, 1.0, 1e-12);
  std::vector<Eigen::Vector3d> pts = {p.coords(), q.coords()};
  for (const auto& x : net_samples(1, net)) pts.emplace_back(x.coords());
  EXPECT_NEAR(oracle_chain_112(pts, 32), 1.0, 1e-12);
}
