#pragma once

#include <Eigen/Dense>

#include <cmath>

#include "heisqi/derivation.hpp"
#include "heisqi/heisenberg.hpp"
#include "heisqi/random.hpp"

namespace heisqi {

/// Maximum of |[Phi x, Phi y] - Phi [x, y]| over basis pairs.
inline double automorphism_defect(const Eigen::MatrixXd& phi) {
  const Eigen::Index d = phi.rows();
  double defect = 0.0;
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = i + 1; j < d; ++j) {
      const Eigen::VectorXd ei = Eigen::VectorXd::Unit(d, i), ej = Eigen::VectorXd::Unit(d, j);
      Eigen::VectorXd lhs = Eigen::VectorXd::Zero(d);
      lhs[d - 1] = symplectic_form(phi.col(i), phi.col(j));
      const Eigen::VectorXd rhs = symplectic_form(ei, ej) * phi.col(d - 1);
      defect = std::max(defect, (lhs - rhs).norm());
    }
  return defect;
}

/// Random automorphism of H_n: a product of symplectic transvections
/// x -> x + a w(v, x) v on the non-central part, a conformal factor c > 0
/// (so that [Phi x, Phi y] = c w(x,y) e), and a shift of each basis vector
/// along the center.
inline Eigen::MatrixXd random_automorphism(int n, RngStream& rng, int transvections = 3) {
  const int d = 2 * n + 1;
  const int v_dim = 2 * n;
  Eigen::MatrixXd s = Eigen::MatrixXd::Identity(v_dim, v_dim);
  for (int r = 0; r < transvections; ++r) {
    Eigen::VectorXd v(v_dim);
    for (int j = 0; j < v_dim; ++j) v[j] = rng.uniform(-1.0, 1.0);
    v /= v.norm();
    const double a = rng.uniform(-1.0, 1.0);
    // T(x) = x + a w(v, x) v; w(v, x) = v^T J x with J the standard form.
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(v_dim, v_dim);
    for (int i = 0; i < n; ++i) {
      j(2 * i, 2 * i + 1) = 1.0;
      j(2 * i + 1, 2 * i) = -1.0;
    }
    const Eigen::MatrixXd t = Eigen::MatrixXd::Identity(v_dim, v_dim) + a * v * (v.transpose() * j);
    s = t * s;
  }
  const double c = std::exp(rng.uniform(-0.5, 0.5));
  Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(d, d);
  phi.topLeftCorner(v_dim, v_dim) = std::sqrt(c) * s;
  for (int j = 0; j < v_dim; ++j) phi(d - 1, j) = rng.uniform(-1.0, 1.0);
  phi(d - 1, d - 1) = c;
  return phi;
}

/// Phi A Phi^{-1}, again a derivation when Phi is an automorphism.
inline DerivationSpec conjugate(const DerivationSpec& spec, const Eigen::MatrixXd& phi) {
  return DerivationSpec::from_matrix(spec.n(), phi * spec.matrix() * phi.inverse());
}

inline DerivationSpec diagonal_derivation(int n, const Eigen::VectorXd& diag) {
  if (diag.size() != 2 * n + 1) throw Error(ErrorKind::DimensionMismatch, "diagonal has wrong length");
  return DerivationSpec::from_matrix(n, diag.asDiagonal().toDenseMatrix());
}

}  // namespace heisqi
