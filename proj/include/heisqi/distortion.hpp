#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "heisqi/error.hpp"
#include "heisqi/heisenberg.hpp"
#include "heisqi/random.hpp"
#include "heisqi/visual_metric.hpp"

namespace heisqi {

using PointMap = std::function<LieElement(const LieElement&)>;

struct DistortionProbe {
  double radius = 0.0;
  double upper = 0.0;  // L_F(x, r)
  double lower = 0.0;  // l_F(x, r)
  std::int64_t upper_count = 0;
  std::int64_t lower_count = 0;
};

struct DistortionReport {
  std::vector<DistortionProbe> probes;
  double upper_limit = 0.0;  // estimate of L_F(x)
  double lower_limit = 0.0;  // estimate of l_F(x)
  // (K, C) with C/K d <= d(F., F.) <= C K d over every sampled pair.
  double quasisimilarity_K = 1.0;
  double quasisimilarity_C = 1.0;
  std::optional<double> reciprocal_product;  // L_{F^-1}(F x) * l_F(x)
  std::int64_t samples_per_radius = 0;
};

namespace detail {

// Rescales y along the dilations of (H_n, d) so that its d-norm becomes rho.
inline Eigen::VectorXd dilate_to(const QuasimetricParams& qp, Eigen::VectorXd c, double rho) {
  const GradedStructure& gs = qp.structure();
  const double cur = norm_A_adapted(qp, c);
  const double lam = rho / cur;
  for (int i = 0; i <= gs.k(); ++i) c.segment(gs.block_offset(i), gs.block_dim(i)) *= std::pow(lam, qp.exponent(i));
  return c;
}

// Extrapolates f(r) linearly to r = 0 from the three smallest radii.
inline double extrapolate_to_zero(const std::vector<std::pair<double, double>>& pts) {
  std::vector<std::pair<double, double>> s = pts;
  std::sort(s.begin(), s.end());
  const std::size_t m = std::min<std::size_t>(3, s.size());
  if (m == 1) return s[0].second;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    sx += s[i].first;
    sy += s[i].second;
    sxx += s[i].first * s[i].first;
    sxy += s[i].first * s[i].second;
  }
  const double md = static_cast<double>(m);
  const double den = md * sxx - sx * sx;
  if (den == 0.0) return sy / md;
  const double slope = (md * sxy - sx * sy) / den;
  return (sy - slope * sx) / md;
}

}  // namespace detail

/// Finite-sample L_F(x, r) = sup{d(Fx, Fx') : d(x, x') <= r} and
/// l_F(x, r) = inf{d(Fx, Fx') : r <= d(x, x') <= 2r} (the upper cut makes the
/// infimum a finite-sample surrogate). Half the samples per radius sit on the
/// sphere d(x, x') = r, the rest at distances uniform in [r/2, 2r). Much
/// shorter displacements would only measure rounding: d is Hoelder near 0, so
/// 1e-16 residuals of x^{-1}x' are amplified by the 1/(s alpha) powers.
/// L is biased low and l biased high.
inline DistortionReport distortion_probe(const PointMap& map, const QuasimetricParams& src,
                                         const QuasimetricParams& dst, const LieElement& x,
                                         const std::vector<double>& radii, std::int64_t samples, std::uint64_t seed,
                                         const PointMap* inverse = nullptr) {
  if (radii.empty()) throw Error(ErrorKind::InvalidArgument, "need at least one radius");
  if (samples < 2) throw Error(ErrorKind::InvalidArgument, "need at least two samples per radius");
  const GradedStructure& gs = src.structure();
  gs.require(x);
  const int d = gs.dim();
  const LieElement fx = map(x);

  DistortionReport rep;
  rep.samples_per_radius = samples;
  double ratio_min = std::numeric_limits<double>::infinity(), ratio_max = 0.0;
  std::vector<std::pair<double, double>> up, lo;
  for (std::size_t ri = 0; ri < radii.size(); ++ri) {
    const double r = radii[ri];
    if (!(r > 0.0)) throw Error(ErrorKind::InvalidArgument, "radii must be positive");
    RngStream rng(seed, 0xd150 + ri);
    DistortionProbe pr{r, 0.0, std::numeric_limits<double>::infinity(), 0, 0};
    for (std::int64_t s = 0; s < samples; ++s) {
      Eigen::VectorXd c(d);
      do {
        for (int j = 0; j < d; ++j) c[j] = rng.uniform(-1.0, 1.0);
      } while (c.squaredNorm() == 0.0);
      const double rho = (s % 2 == 0) ? r : r * (0.5 + 1.5 * rng.uniform());
      const LieElement xp = bch_mul(x, gs.from_adapted(detail::dilate_to(src, c, rho)));
      const double dx = dist_A(src, x, xp);
      if (dx <= 0.0) continue;
      const double dfx = dist_A(dst, fx, map(xp));
      ratio_min = std::min(ratio_min, dfx / dx);
      ratio_max = std::max(ratio_max, dfx / dx);
      if (dx <= r * (1.0 + 1e-12)) {
        pr.upper = std::max(pr.upper, dfx);
        ++pr.upper_count;
      }
      if (dx >= r * (1.0 - 1e-12) && dx <= 2.0 * r) {
        pr.lower = std::min(pr.lower, dfx);
        ++pr.lower_count;
      }
    }
    if (pr.lower_count == 0) pr.lower = 0.0;
    up.emplace_back(r, pr.upper / r);
    lo.emplace_back(r, pr.lower / r);
    rep.probes.push_back(pr);
  }
  rep.upper_limit = detail::extrapolate_to_zero(up);
  rep.lower_limit = detail::extrapolate_to_zero(lo);
  if (ratio_max > 0.0 && std::isfinite(ratio_min)) {
    rep.quasisimilarity_C = std::sqrt(ratio_min * ratio_max);
    rep.quasisimilarity_K = std::sqrt(ratio_max / ratio_min);
  }
  if (inverse != nullptr) {
    const DistortionReport back = distortion_probe(*inverse, dst, src, fx, radii, samples, seed ^ 0x1fULL);
    rep.reciprocal_product = back.upper_limit * rep.lower_limit;
  }
  return rep;
}

struct EtaEnvelope {
  std::vector<double> bin_edges;        // upper edge of each log-t bin
  std::vector<double> rho_max;          // max rho per bin; NaN when empty
  std::vector<std::pair<double, double>> samples;  // raw (t, rho)
  std::int64_t skipped = 0;             // degenerate triples

  /// Monotone envelope eta(t): max rho over all bins up to the bin of t.
  double eta(double t) const {
    double best = 0.0;
    for (std::size_t b = 0; b < bin_edges.size(); ++b) {
      if (!std::isnan(rho_max[b])) best = std::max(best, rho_max[b]);
      if (t <= bin_edges[b]) break;
    }
    return best;
  }

  /// Sampled gauge of the inverse map, eta_1(t) = 1 / eta^{-1}(1/t): each bin
  /// (t_b, rho_b) contributes the point (1/rho_b, 1/t_b).
  std::vector<std::pair<double, double>> inverse_gauge() const {
    std::vector<std::pair<double, double>> out;
    double running = 0.0;
    for (std::size_t b = 0; b < bin_edges.size(); ++b) {
      if (std::isnan(rho_max[b])) continue;
      running = std::max(running, rho_max[b]);
      if (running > 0.0) out.emplace_back(1.0 / running, 1.0 / bin_edges[b]);
    }
    std::sort(out.begin(), out.end());
    return out;
  }
};

/// Samples triples (x, y, z) in [-1, 1]^{2n+1} and records
/// t = d(x,y)/d(x,z), rho = d(Fx,Fy)/d(Fx,Fz); the envelope bins log10 t over
/// [-3, 3] in `bins` equal steps (ratios outside fall in the end bins).
inline EtaEnvelope eta_envelope(const PointMap& map, const QuasimetricParams& src, const QuasimetricParams& dst,
                                std::int64_t triples, std::uint64_t seed, int bins = 24) {
  const int n = src.structure().n();
  RngStream rng(seed, 0xe7a);
  EtaEnvelope env;
  for (int b = 0; b < bins; ++b) env.bin_edges.push_back(std::pow(10.0, -3.0 + 6.0 * (b + 1) / bins));
  env.rho_max.assign(static_cast<std::size_t>(bins), std::numeric_limits<double>::quiet_NaN());
  for (std::int64_t i = 0; i < triples; ++i) {
    const LieElement x = sample_box(n, 1.0, rng), y = sample_box(n, 1.0, rng), z = sample_box(n, 1.0, rng);
    const double dxy = dist_A(src, x, y), dxz = dist_A(src, x, z);
    const LieElement fx = map(x);
    const double fxy = dist_A(dst, fx, map(y)), fxz = dist_A(dst, fx, map(z));
    if (dxy <= 0.0 || dxz <= 0.0 || fxz <= 0.0) {
      ++env.skipped;
      continue;
    }
    const double t = dxy / dxz, rho = fxy / fxz;
    env.samples.emplace_back(t, rho);
    const int b = std::clamp(static_cast<int>(std::floor((std::log10(t) + 3.0) / 6.0 * bins)), 0, bins - 1);
    auto& slot = env.rho_max[static_cast<std::size_t>(b)];
    slot = std::isnan(slot) ? rho : std::max(slot, rho);
  }
  return env;
}

struct AlmostSimilarityFit {
  double L = 0.0;         // least-squares slope through the origin
  double C = 0.0;         // max |d(Fx,Fy) - L d(x,y)|
  double residual = 0.0;  // RMS of the same
  std::int64_t pairs = 0;
};

/// Fits L d(x,y) - C <= d(Fx,Fy) <= L d(x,y) + C on sampled pairs in [-1, 1]^{2n+1}.
inline AlmostSimilarityFit almost_similarity_fit(const PointMap& map, const QuasimetricParams& src,
                                                 const QuasimetricParams& dst, std::int64_t pairs,
                                                 std::uint64_t seed) {
  const int n = src.structure().n();
  RngStream rng(seed, 0xa5f);
  std::vector<std::pair<double, double>> xy;
  double sxx = 0, sxy = 0;
  for (std::int64_t i = 0; i < pairs; ++i) {
    const LieElement p = sample_box(n, 1.0, rng), q = sample_box(n, 1.0, rng);
    const double a = dist_A(src, p, q), b = dist_A(dst, map(p), map(q));
    xy.emplace_back(a, b);
    sxx += a * a;
    sxy += a * b;
  }
  AlmostSimilarityFit fit;
  fit.pairs = pairs;
  if (sxx == 0.0) return fit;
  fit.L = sxy / sxx;
  double ss = 0.0;
  for (const auto& [a, b] : xy) {
    const double e = std::abs(b - fit.L * a);
    fit.C = std::max(fit.C, e);
    ss += e * e;
  }
  fit.residual = std::sqrt(ss / static_cast<double>(xy.size()));
  return fit;
}

}  // namespace heisqi
