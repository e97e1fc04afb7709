#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "heisqi/derivation.hpp"
#include "heisqi/error.hpp"
#include "heisqi/heisenberg.hpp"
#include "heisqi/random.hpp"
#include "heisqi/visual_metric.hpp"

namespace heisqi {

/// Complete quasiisometry invariant of G_A: k, (m_1..m_k) and the exponent
/// vector up to scale, (alpha_i / alpha_1)_{i<=k}.
struct QIInvariants {
  int k = 0;
  std::vector<int> dims;
  std::vector<double> ratios;
};

inline QIInvariants qi_invariants(const GradedStructure& gs) {
  QIInvariants inv;
  inv.k = gs.k();
  for (int i = 0; i < gs.k(); ++i) {
    inv.dims.push_back(gs.block_dim(i));
    inv.ratios.push_back(gs.alpha(i) / gs.alpha(0));
  }
  return inv;
}

struct Classification {
  bool equivalent = false;
  /// alpha_i = lambda * beta_i (a is the first argument, b the second).
  std::optional<double> lambda;
  std::string reason;
};

/// G_A and G_B are quasiisometric iff k = l, dim U_i = dim W_i and
/// alpha_i = lambda * beta_i for some lambda > 0.
inline Classification classify(const GradedStructure& a, const GradedStructure& b, double tol = 1e-9) {
  Classification out;
  if (a.n() != b.n()) {
    out.reason = "different Heisenberg index";
    return out;
  }
  const QIInvariants ia = qi_invariants(a), ib = qi_invariants(b);
  if (ia.k != ib.k) {
    out.reason = "k differs (" + std::to_string(ia.k) + " vs " + std::to_string(ib.k) + ")";
    return out;
  }
  if (ia.dims != ib.dims) {
    out.reason = "eigenspace dimensions differ";
    return out;
  }
  for (std::size_t i = 0; i < ia.ratios.size(); ++i) {
    if (std::abs(ia.ratios[i] - ib.ratios[i]) > tol * std::max(ia.ratios[i], ib.ratios[i])) {
      out.reason = "exponent ratios differ at index " + std::to_string(i + 1);
      return out;
    }
  }
  out.equivalent = true;
  out.lambda = a.alpha(0) / b.alpha(0);
  return out;
}

/// Boundary isometry F = G + id_Z sending the adapted basis of each U_i to the
/// adapted basis of W_i. With alpha_i = lambda beta_i it satisfies
///   d_A at scale 1/lambda (p, q) = d_B at scale 1 (F p, F q).
struct BoundaryMap {
  GradedStructure source;
  GradedStructure target;
  Eigen::MatrixXd matrix;
  double lambda = 1.0;

  /// Exponent scale on the source that makes F an exact isometry onto (target, 1).
  double source_scale() const { return 1.0 / lambda; }
};

inline BoundaryMap build_isometry(const GradedStructure& a, const GradedStructure& b, double tol = 1e-9) {
  const Classification c = classify(a, b, tol);
  if (!c.equivalent) throw Error(ErrorKind::NotEquivalent, c.reason);
  return {a, b, b.adapted_matrix() * a.adapted_inverse(), *c.lambda};
}

inline LieElement apply_map(const BoundaryMap& f, const LieElement& x) {
  f.source.require(x);
  return LieElement(x.n(), f.matrix * x.coords());
}

/// Inverse map, from the target back to the source.
inline BoundaryMap invert(const BoundaryMap& f) {
  return {f.target, f.source, f.source.adapted_matrix() * f.target.adapted_inverse(), 1.0 / f.lambda};
}

/// max |F[x,y] - [Fx,Fy]| over basis pairs.
inline double bracket_defect(const BoundaryMap& f) {
  const int n = f.source.n();
  const int d = 2 * n + 1;
  double defect = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      const LieElement x = LieElement::basis(n, i), y = LieElement::basis(n, j);
      defect = std::max(defect, (apply_map(f, bracket(x, y)) - bracket(apply_map(f, x), apply_map(f, y))).coords().norm());
    }
  return defect;
}

struct IsometryCheck {
  double max_relative_error = 0.0;
  std::int64_t pairs = 0;
  // Spread of d_B(Fp, Fq) / d_A(p, q)^lambda and the sum-power bound (k+1)^{|1-lambda|}.
  double bilipschitz_min = 0.0;
  double bilipschitz_max = 0.0;
  double bilipschitz_bound = 1.0;
};

/// Samples pairs in [-1, 1]^{2n+1} and measures the isometry contract.
inline IsometryCheck verify_isometry(const BoundaryMap& f, std::int64_t pairs, std::uint64_t seed) {
  const QuasimetricParams src(f.source, f.source_scale());
  const QuasimetricParams src_plain(f.source, 1.0);
  const QuasimetricParams dst(f.target, 1.0);
  const int n = f.source.n();
  RngStream rng(seed, 0x150);
  IsometryCheck out;
  out.bilipschitz_min = std::numeric_limits<double>::infinity();
  out.bilipschitz_bound = std::pow(f.source.k() + 1.0, std::abs(1.0 - f.lambda));
  for (std::int64_t i = 0; i < pairs; ++i) {
    const LieElement p = sample_box(n, 1.0, rng);
    const LieElement q = sample_box(n, 1.0, rng);
    const double da = dist_A(src, p, q);
    const double db = dist_A(dst, apply_map(f, p), apply_map(f, q));
    if (da <= 0.0) continue;
    out.max_relative_error = std::max(out.max_relative_error, std::abs(db - da) / da);
    const double ratio = db / std::pow(dist_A(src_plain, p, q), f.lambda);
    out.bilipschitz_min = std::min(out.bilipschitz_min, ratio);
    out.bilipschitz_max = std::max(out.bilipschitz_max, ratio);
    ++out.pairs;
  }
  if (out.pairs == 0) out.bilipschitz_min = 0.0;
  return out;
}

/// Largest principal angle gap between F(U_1) and W_1, measured as the norm of
/// the component of F(U_1) outside W_1 (0 when the subspaces coincide).
inline double first_layer_defect(const BoundaryMap& f) {
  const Eigen::MatrixXd img = f.matrix * f.source.eigenspace_bases()[0];
  const Eigen::MatrixXd q = detail::orthonormalize(f.target.eigenspace_bases()[0]);
  const Eigen::MatrixXd on = detail::orthonormalize(img);
  return (on - q * (q.transpose() * on)).norm();
}

}  // namespace heisqi
