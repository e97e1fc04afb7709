#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>

#include "heisqi/derivation.hpp"
#include "heisqi/error.hpp"
#include "heisqi/heisenberg.hpp"
#include "heisqi/random.hpp"

namespace heisqi {

/// A graded structure together with an exponent scale s: block i is measured
/// with exponent 1/(s alpha_i). Rescaling exponents (rather than taking
/// pointwise powers of the distance) keeps left invariance, the dilation
/// identity and the boundary isometries exact.
///
/// Holds a non-owning reference; the structure must outlive the params.
class QuasimetricParams {
 public:
  explicit QuasimetricParams(const GradedStructure& gs, double scale = 1.0) : gs_(&gs), scale_(scale) {
    if (!(scale > 0.0) || !std::isfinite(scale)) {
      throw Error(ErrorKind::InvalidArgument, "exponent scale must be positive");
    }
  }
  QuasimetricParams(GradedStructure&&, double = 1.0) = delete;

  const GradedStructure& structure() const noexcept { return *gs_; }
  double scale() const noexcept { return scale_; }
  /// Effective grading exponent s * alpha_i of block i.
  double exponent(int block) const { return scale_ * gs_->alpha(block); }

 private:
  const GradedStructure* gs_;
  double scale_;
};

/// Sum over blocks of |c_i|^{1/(s alpha_i)}, with c in adapted coordinates and
/// Euclidean block norms.
inline double norm_A_adapted(const QuasimetricParams& qp, const Eigen::VectorXd& c) {
  const GradedStructure& gs = qp.structure();
  double total = 0.0;
  for (int i = 0; i <= gs.k(); ++i) {
    const double r = c.segment(gs.block_offset(i), gs.block_dim(i)).norm();
    if (r > 0.0) total += std::pow(r, 1.0 / qp.exponent(i));
  }
  return total;
}

inline double norm_A(const QuasimetricParams& qp, const LieElement& x) {
  return norm_A_adapted(qp, qp.structure().adapted_coords(x));
}

/// Parabolic visual quasimetric d_A(p, q) = ||(-p) * q||_A.
inline double dist_A(const QuasimetricParams& qp, const LieElement& p, const LieElement& q) {
  return norm_A(qp, bch_mul(bch_inv(p), q));
}

/// Comparison norm |x_{k+1}|^{1/2} + sum_{i<=k} |x_i|.
inline double norm_0(const GradedStructure& gs, const LieElement& x) {
  const Eigen::VectorXd c = gs.adapted_coords(x);
  double total = std::sqrt(std::abs(c[gs.dim() - 1]));
  for (int i = 0; i < gs.k(); ++i) total += c.segment(gs.block_offset(i), gs.block_dim(i)).norm();
  return total;
}

/// Point cache for repeated distance evaluation: standard and adapted
/// coordinates side by side. (-p)*q in adapted coordinates is
/// c_q - c_p - w(p, q)/2 on the center coordinate, since the center generator
/// is the last adapted basis vector.
struct AdaptedPoint {
  Eigen::VectorXd standard;
  Eigen::VectorXd adapted;

  AdaptedPoint(const GradedStructure& gs, const LieElement& x) : standard(x.coords()), adapted(gs.adapted_coords(x)) {}
};

inline double dist_A(const QuasimetricParams& qp, const AdaptedPoint& p, const AdaptedPoint& q) {
  Eigen::VectorXd y = q.adapted - p.adapted;
  y[y.size() - 1] -= 0.5 * symplectic_form(p.standard, q.standard);
  return norm_A_adapted(qp, y);
}

struct QuasiTriangleStats {
  double max_ratio = 0.0;  // max d(p,r) / (d(p,q) + d(q,r))
  std::int64_t triples = 0;
};

/// Empirical quasi-triangle constant over random triples in [-box, box]^{2n+1}.
/// Measured, not asserted: the quasimetric comes with no stated constant.
inline QuasiTriangleStats quasi_triangle_ratio(const QuasimetricParams& qp, std::int64_t triples, std::uint64_t seed,
                                               double box = 1.0) {
  const GradedStructure& gs = qp.structure();
  RngStream rng(seed, 0x7a1);
  QuasiTriangleStats st;
  for (std::int64_t i = 0; i < triples; ++i) {
    const AdaptedPoint p(gs, sample_box(gs.n(), box, rng));
    const AdaptedPoint q(gs, sample_box(gs.n(), box, rng));
    const AdaptedPoint r(gs, sample_box(gs.n(), box, rng));
    const double denom = dist_A(qp, p, q) + dist_A(qp, q, r);
    if (denom <= 0.0) continue;
    st.max_ratio = std::max(st.max_ratio, dist_A(qp, p, r) / denom);
    ++st.triples;
  }
  return st;
}

}  // namespace heisqi
