#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <thread>
#include <vector>

#include "heisqi/error.hpp"
#include "heisqi/random.hpp"
#include "heisqi/visual_metric.hpp"

namespace heisqi {

struct RegularityReport {
  std::vector<double> radii;
  std::vector<double> volume_estimates;
  std::vector<double> normalized_volumes;  // m(B(o,r)) / r^Q
  double fitted_exponent = 0.0;
  double target_exponent = 0.0;
  double relative_error = 0.0;  // |Q_hat - Q| / Q
  std::int64_t samples_per_radius = 0;
};

/// Homogeneous dimension (n+1)(alpha_1 + alpha_k) s of the boundary.
inline double homogeneous_dimension(const QuasimetricParams& qp) {
  const GradedStructure& gs = qp.structure();
  return (gs.n() + 1) * (gs.alpha(0) + gs.alpha(gs.k() - 1)) * qp.scale();
}

namespace detail {

inline constexpr int kRegularityShards = 64;

// Hits inside B(o, r) among the samples of one shard. Sample j of radius
// index ri uses counters [j*d, (j+1)*d) of stream (seed, ri).
inline std::int64_t ball_hits(const QuasimetricParams& qp, double r, const Eigen::VectorXd& half_widths,
                              std::uint64_t seed, std::uint64_t stream, std::int64_t begin, std::int64_t end) {
  const GradedStructure& gs = qp.structure();
  const int d = gs.dim();
  const CounterRng rng(seed, stream);
  Eigen::VectorXd c(d);
  std::int64_t hits = 0;
  for (std::int64_t j = begin; j < end; ++j) {
    const auto base = static_cast<std::uint64_t>(j) * static_cast<std::uint64_t>(d);
    for (int t = 0; t < d; ++t) c[t] = rng.uniform(base + static_cast<std::uint64_t>(t), -half_widths[t], half_widths[t]);
    if (norm_A_adapted(qp, c) <= r) ++hits;
  }
  return hits;
}

}  // namespace detail

/// Monte-Carlo volume of d_A-balls B(o, r), Lebesgue measure in adapted
/// coordinates, by rejection from the box with half-width r^{s alpha_i} on
/// block i (which contains the ball). Fits the log-volume/log-radius slope.
/// Deterministic for a seed regardless of the number of threads.
inline RegularityReport regularity_estimate(const QuasimetricParams& qp, const std::vector<double>& radii,
                                            std::int64_t samples, std::uint64_t seed) {
  if (radii.size() < 2) throw Error(ErrorKind::InvalidArgument, "need at least two radii");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0)) throw Error(ErrorKind::InvalidArgument, "radii must be positive");
    if (i > 0 && !(radii[i] > radii[i - 1])) throw Error(ErrorKind::InvalidArgument, "radii must be increasing");
  }
  if (samples < 1) throw Error(ErrorKind::InvalidArgument, "samples must be positive");

  const GradedStructure& gs = qp.structure();
  const int d = gs.dim();
  RegularityReport rep;
  rep.radii = radii;
  rep.samples_per_radius = samples;
  rep.target_exponent = homogeneous_dimension(qp);

  const int shards = detail::kRegularityShards;
  const unsigned threads = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(), shards));
  for (std::size_t ri = 0; ri < radii.size(); ++ri) {
    const double r = radii[ri];
    Eigen::VectorXd half(d);
    for (int i = 0; i <= gs.k(); ++i)
      half.segment(gs.block_offset(i), gs.block_dim(i)).setConstant(std::pow(r, qp.exponent(i)));
    double box_volume = 1.0;
    for (int t = 0; t < d; ++t) box_volume *= 2.0 * half[t];

    std::vector<std::int64_t> hits(shards, 0);
    auto work = [&](unsigned tid) {
      for (int s = static_cast<int>(tid); s < shards; s += static_cast<int>(threads)) {
        const std::int64_t begin = samples * s / shards, end = samples * (s + 1) / shards;
        hits[s] = detail::ball_hits(qp, r, half, seed, ri, begin, end);
      }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(work, t);
    work(0);
    for (auto& th : pool) th.join();

    std::int64_t total = 0;
    for (auto h : hits) total += h;
    const double vol = box_volume * static_cast<double>(total) / static_cast<double>(samples);
    rep.volume_estimates.push_back(vol);
    rep.normalized_volumes.push_back(vol / std::pow(r, rep.target_exponent));
  }

  // Least-squares slope of log V against log r.
  const double m = static_cast<double>(radii.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    const double x = std::log(radii[i]), y = std::log(rep.volume_estimates[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  rep.fitted_exponent = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  rep.relative_error = std::abs(rep.fitted_exponent - rep.target_exponent) / rep.target_exponent;
  return rep;
}

}  // namespace heisqi
