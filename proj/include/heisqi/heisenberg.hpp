#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <initializer_list>
#include <string>

#include "heisqi/error.hpp"
#include "heisqi/random.hpp"

namespace heisqi {

/// Point of the Heisenberg algebra H_n = R^{2n+1} in the standard basis
/// e_1..e_{2n+1}; the only nonzero brackets are [e_{2i-1}, e_{2i}] = e_{2n+1}.
/// Via the exponential map this is also a point of the group (and of the
/// ideal boundary minus the point at infinity).
class LieElement {
 public:
  explicit LieElement(int n) : n_(check_index(n)), coords_(Eigen::VectorXd::Zero(2 * n + 1)) {}

  LieElement(int n, Eigen::VectorXd coords) : n_(check_index(n)), coords_(std::move(coords)) {
    if (coords_.size() != 2 * n_ + 1) {
      throw Error(ErrorKind::DimensionMismatch,
                  "coordinate vector has length " + std::to_string(coords_.size()) +
                      ", expected " + std::to_string(2 * n_ + 1));
    }
    if (!coords_.allFinite()) {
      throw Error(ErrorKind::InvalidArgument, "coordinates must be finite");
    }
  }

  LieElement(int n, std::initializer_list<double> coords)
      : LieElement(n, Eigen::Map<const Eigen::VectorXd>(coords.begin(),
                                                       static_cast<Eigen::Index>(coords.size()))) {}

  /// Standard basis vector e_{j+1} (0-based j).
  static LieElement basis(int n, int j) {
    LieElement x(n);
    if (j < 0 || j >= x.dim()) throw Error(ErrorKind::DimensionMismatch, "basis index out of range");
    x.coords_[j] = 1.0;
    return x;
  }

  /// The center generator e_{2n+1}.
  static LieElement center(int n) { return basis(n, 2 * n); }

  int n() const noexcept { return n_; }
  int dim() const noexcept { return 2 * n_ + 1; }
  const Eigen::VectorXd& coords() const noexcept { return coords_; }
  double operator[](int j) const { return coords_[j]; }
  double central() const { return coords_[2 * n_]; }

  LieElement operator-() const { return LieElement(n_, -coords_, Unchecked{}); }
  LieElement operator+(const LieElement& o) const {
    require_same(o);
    return LieElement(n_, coords_ + o.coords_, Unchecked{});
  }
  LieElement operator-(const LieElement& o) const {
    require_same(o);
    return LieElement(n_, coords_ - o.coords_, Unchecked{});
  }
  friend LieElement operator*(double a, const LieElement& x) {
    return LieElement(x.n_, a * x.coords_, Unchecked{});
  }

  bool operator==(const LieElement& o) const { return n_ == o.n_ && coords_ == o.coords_; }

  void require_same(const LieElement& o) const {
    if (o.n_ != n_) {
      throw Error(ErrorKind::DimensionMismatch,
                  "mixed Heisenberg indices " + std::to_string(n_) + " and " + std::to_string(o.n_));
    }
  }

 private:
  struct Unchecked {};
  LieElement(int n, Eigen::VectorXd coords, Unchecked) : n_(n), coords_(std::move(coords)) {}

  static int check_index(int n) {
    if (n < 1) throw Error(ErrorKind::DimensionMismatch, "Heisenberg index n must be positive");
    return n;
  }

  int n_;
  Eigen::VectorXd coords_;
};

/// Coefficient of e_{2n+1} in [x, y]: sum_i x_{2i-1} y_{2i} - x_{2i} y_{2i-1}.
/// Center components do not contribute.
inline double symplectic_form(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  const Eigen::Index n = (x.size() - 1) / 2;
  double w = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    w += x[2 * i] * y[2 * i + 1] - x[2 * i + 1] * y[2 * i];
  }
  return w;
}

inline double symplectic_form(const LieElement& x, const LieElement& y) {
  x.require_same(y);
  return symplectic_form(x.coords(), y.coords());
}

inline LieElement bracket(const LieElement& x, const LieElement& y) {
  return symplectic_form(x, y) * LieElement::center(x.n());
}

/// Group law X*Y = X + Y + [X,Y]/2 (closed-form BCH, exact in step two).
inline LieElement bch_mul(const LieElement& x, const LieElement& y) {
  x.require_same(y);
  Eigen::VectorXd z = x.coords() + y.coords();
  z[2 * x.n()] += 0.5 * symplectic_form(x.coords(), y.coords());
  return LieElement(x.n(), std::move(z));
}

inline LieElement bch_inv(const LieElement& x) { return -x; }

/// Uniform sample of the box [-radius, radius]^{2n+1}.
inline LieElement sample_box(int n, double radius, RngStream& rng) {
  Eigen::VectorXd c(2 * n + 1);
  for (Eigen::Index j = 0; j < c.size(); ++j) c[j] = rng.uniform(-radius, radius);
  return LieElement(n, std::move(c));
}

}  // namespace heisqi
