#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "heisqi/error.hpp"
#include "heisqi/heisenberg.hpp"

namespace heisqi {

/// Two eigenvalues a, b share a block when |a - b| <= kEigenGroupTol * max(|a|, 1).
inline constexpr double kEigenGroupTol = 1e-9;

struct EigenBlockSpec {
  double eigenvalue = 0.0;
  std::vector<Eigen::VectorXd> eigenvectors;
};

/// A linear map on H_n given either as a (2n+1)x(2n+1) matrix in the standard
/// basis or spectrally, as eigenvalues with eigenvectors.
class DerivationSpec {
 public:
  static DerivationSpec from_matrix(int n, Eigen::MatrixXd m) {
    check_n(n);
    const int d = 2 * n + 1;
    if (m.rows() != d || m.cols() != d) {
      throw Error(ErrorKind::DimensionMismatch, "derivation matrix must be " + std::to_string(d) +
                                                    "x" + std::to_string(d));
    }
    if (!m.allFinite()) throw Error(ErrorKind::InvalidArgument, "matrix entries must be finite");
    return DerivationSpec(n, std::move(m));
  }

  static DerivationSpec from_spectral(int n, std::vector<EigenBlockSpec> blocks) {
    check_n(n);
    const int d = 2 * n + 1;
    for (const auto& b : blocks) {
      if (!std::isfinite(b.eigenvalue)) throw Error(ErrorKind::InvalidArgument, "eigenvalue must be finite");
      if (b.eigenvectors.empty()) throw Error(ErrorKind::DimensionMismatch, "eigenvalue without eigenvectors");
      for (const auto& v : b.eigenvectors) {
        if (v.size() != d) {
          throw Error(ErrorKind::DimensionMismatch,
                      "eigenvector has length " + std::to_string(v.size()) + ", expected " + std::to_string(d));
        }
        if (!v.allFinite()) throw Error(ErrorKind::InvalidArgument, "eigenvector entries must be finite");
      }
    }
    return DerivationSpec(n, std::move(blocks));
  }

  int n() const noexcept { return n_; }
  int dim() const noexcept { return 2 * n_ + 1; }
  bool is_spectral() const noexcept { return std::holds_alternative<std::vector<EigenBlockSpec>>(form_); }
  const Eigen::MatrixXd& matrix_form() const { return std::get<Eigen::MatrixXd>(form_); }
  const std::vector<EigenBlockSpec>& spectral_form() const { return std::get<std::vector<EigenBlockSpec>>(form_); }

  /// Standard-basis matrix. For spectral input this is V diag(alpha) V^{-1};
  /// throws NonDiagonalizable if the eigenvectors do not form a basis.
  Eigen::MatrixXd matrix() const {
    if (!is_spectral()) return matrix_form();
    const int d = dim();
    std::vector<std::pair<double, Eigen::VectorXd>> cols;
    for (const auto& b : spectral_form())
      for (const auto& v : b.eigenvectors) cols.emplace_back(b.eigenvalue, v);
    if (static_cast<int>(cols.size()) != d) {
      throw Error(ErrorKind::NonDiagonalizable, "spectral form lists " + std::to_string(cols.size()) +
                                                    " eigenvectors, a basis needs " + std::to_string(d));
    }
    Eigen::MatrixXd v(d, d);
    Eigen::VectorXd lam(d);
    for (int j = 0; j < d; ++j) {
      v.col(j) = cols[j].second;
      lam[j] = cols[j].first;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(v);
    const auto& s = svd.singularValues();
    if (s[0] == 0.0 || s[d - 1] <= 1e-10 * s[0]) {
      throw Error(ErrorKind::NonDiagonalizable, "eigenvectors do not span R^" + std::to_string(d));
    }
    return v * lam.asDiagonal() * v.inverse();
  }

 private:
  DerivationSpec(int n, Eigen::MatrixXd m) : n_(n), form_(std::move(m)) {}
  DerivationSpec(int n, std::vector<EigenBlockSpec> b) : n_(n), form_(std::move(b)) {}

  static void check_n(int n) {
    if (n < 1) throw Error(ErrorKind::DimensionMismatch, "Heisenberg index n must be positive");
  }

  int n_;
  std::variant<Eigen::MatrixXd, std::vector<EigenBlockSpec>> form_;
};

struct LeibnizCheck {
  bool is_derivation = false;
  double max_defect = 0.0;
  int worst_a = 0;  // 0-based basis indices of the worst pair
  int worst_b = 0;
};

/// Checks A[e_a, e_b] = [A e_a, e_b] + [e_a, A e_b] on all basis pairs.
inline LeibnizCheck validate_derivation(const DerivationSpec& spec, double tol = 1e-9) {
  const Eigen::MatrixXd a = spec.matrix();
  const int d = spec.dim();
  const int c = d - 1;
  LeibnizCheck out;
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      const Eigen::VectorXd ei = Eigen::VectorXd::Unit(d, i);
      const Eigen::VectorXd ej = Eigen::VectorXd::Unit(d, j);
      Eigen::VectorXd lhs = symplectic_form(ei, ej) * a.col(c);
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(d);
      rhs[c] = symplectic_form(a.col(i), ej) + symplectic_form(ei, a.col(j));
      const double defect = (lhs - rhs).norm();
      if (defect > out.max_defect) {
        out.max_defect = defect;
        out.worst_a = i;
        out.worst_b = j;
      }
    }
  }
  out.is_derivation = out.max_defect <= tol;
  return out;
}

/// One paired block of an adapted basis. For lower < upper the columns of `e`
/// span U_lower and those of `eta` span U_upper; for lower == upper (the
/// self-paired middle block) both live in the same eigenspace. In either case
/// [e_s, eta_t] = delta_st * e_{2n+1}.
struct AdaptedPair {
  int lower = 0;
  int upper = 0;
  Eigen::MatrixXd e;
  Eigen::MatrixXd eta;

  bool is_middle() const noexcept { return lower == upper; }
};

struct AdaptedBasis {
  std::vector<AdaptedPair> pairs;
  Eigen::VectorXd center;

  /// Adapted basis of eigenspace `block` (0-based; the center block is k).
  /// Middle blocks are interleaved e_1, eta_1, e_2, eta_2, ...
  Eigen::MatrixXd block_basis(int block) const {
    if (block == static_cast<int>(pairs.size()) * 2 - (has_middle() ? 1 : 0)) return center;
    for (const auto& p : pairs) {
      if (p.is_middle() && p.lower == block) {
        Eigen::MatrixXd out(p.e.rows(), 2 * p.e.cols());
        for (Eigen::Index s = 0; s < p.e.cols(); ++s) {
          out.col(2 * s) = p.e.col(s);
          out.col(2 * s + 1) = p.eta.col(s);
        }
        return out;
      }
      if (p.lower == block) return p.e;
      if (p.upper == block) return p.eta;
    }
    throw Error(ErrorKind::InvalidArgument, "block index out of range");
  }

  bool has_middle() const {
    return std::any_of(pairs.begin(), pairs.end(), [](const AdaptedPair& p) { return p.is_middle(); });
  }
};

namespace detail {

/// Canonical basis of the column span of `b`: the rows of the reduced row
/// echelon form of b^T (leading entries 1). Independent of the input basis.
inline Eigen::MatrixXd canonical_basis(const Eigen::MatrixXd& b, double rank_tol = 1e-9) {
  Eigen::MatrixXd r = b.transpose();
  const Eigen::Index rows = r.rows();
  const Eigen::Index cols = r.cols();
  const double scale = std::max(1.0, r.cwiseAbs().maxCoeff());
  Eigen::Index pivot_row = 0;
  for (Eigen::Index c = 0; c < cols && pivot_row < rows; ++c) {
    Eigen::Index best = pivot_row;
    for (Eigen::Index i = pivot_row + 1; i < rows; ++i)
      if (std::abs(r(i, c)) > std::abs(r(best, c))) best = i;
    if (std::abs(r(best, c)) <= rank_tol * scale) continue;
    r.row(pivot_row).swap(r.row(best));
    r.row(pivot_row) /= r(pivot_row, c);
    for (Eigen::Index i = 0; i < rows; ++i)
      if (i != pivot_row) r.row(i) -= r(i, c) * r.row(pivot_row);
    ++pivot_row;
  }
  return r.topRows(pivot_row).transpose();
}

inline Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& b) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(b);
  return qr.householderQ() * Eigen::MatrixXd::Identity(b.rows(), b.cols());
}

inline Eigen::MatrixXd pairing_matrix(const Eigen::MatrixXd& u, const Eigen::MatrixXd& w) {
  Eigen::MatrixXd om(u.cols(), w.cols());
  for (Eigen::Index s = 0; s < u.cols(); ++s)
    for (Eigen::Index t = 0; t < w.cols(); ++t) om(s, t) = symplectic_form(u.col(s), w.col(t));
  return om;
}

// Inductive construction for a pair U_i, U_{k+1-i}: pick e_s, eta_s with the
// largest remaining pairing, normalise so [e_s, eta_s] = e, then project the
// remaining vectors of U_i into ker ad(eta_s) and those of U_{k+1-i} into
// ker ad(e_s).
inline AdaptedPair pair_blocks(int lower, int upper, Eigen::MatrixXd u, Eigen::MatrixXd w, double tol) {
  const Eigen::Index m = u.cols();
  if (w.cols() != m) {
    throw Error(ErrorKind::DegeneratePairing, "paired eigenspaces " + std::to_string(lower + 1) + " and " +
                                                  std::to_string(upper + 1) + " have different dimensions");
  }
  AdaptedPair out{lower, upper, Eigen::MatrixXd(u.rows(), m), Eigen::MatrixXd(w.rows(), m)};
  std::vector<bool> u_used(m, false), w_used(m, false);
  for (Eigen::Index s = 0; s < m; ++s) {
    Eigen::Index ba = -1, bb = -1;
    double best = -1.0;
    for (Eigen::Index a = 0; a < m; ++a) {
      if (u_used[a]) continue;
      for (Eigen::Index b = 0; b < m; ++b) {
        if (w_used[b]) continue;
        const double om = std::abs(symplectic_form(u.col(a), w.col(b)));
        if (om > best) {
          best = om;
          ba = a;
          bb = b;
        }
      }
    }
    const double scale = u.col(ba).norm() * w.col(bb).norm();
    if (!(best > tol * scale)) {
      throw Error(ErrorKind::DegeneratePairing, "pairing between eigenspaces " + std::to_string(lower + 1) +
                                                    " and " + std::to_string(upper + 1) + " is singular");
    }
    const Eigen::VectorXd es = u.col(ba);
    const Eigen::VectorXd etas = w.col(bb) / symplectic_form(u.col(ba), w.col(bb));
    u_used[ba] = true;
    w_used[bb] = true;
    for (Eigen::Index a = 0; a < m; ++a)
      if (!u_used[a]) u.col(a) -= symplectic_form(u.col(a), etas) * es;
    for (Eigen::Index b = 0; b < m; ++b)
      if (!w_used[b]) w.col(b) -= symplectic_form(es, w.col(b)) * etas;
    out.e.col(s) = es;
    out.eta.col(s) = etas;
  }
  return out;
}

// Symplectic Gram-Schmidt on the self-paired middle eigenspace.
inline AdaptedPair darboux_block(int block, Eigen::MatrixXd v, double tol) {
  const Eigen::Index m = v.cols();
  if (m % 2 != 0) {
    throw Error(ErrorKind::DegeneratePairing,
                "self-paired eigenspace " + std::to_string(block + 1) + " has odd dimension");
  }
  const Eigen::Index half = m / 2;
  AdaptedPair out{block, block, Eigen::MatrixXd(v.rows(), half), Eigen::MatrixXd(v.rows(), half)};
  std::vector<bool> used(m, false);
  for (Eigen::Index s = 0; s < half; ++s) {
    Eigen::Index ba = -1, bb = -1;
    double best = -1.0;
    for (Eigen::Index a = 0; a < m; ++a) {
      if (used[a]) continue;
      for (Eigen::Index b = a + 1; b < m; ++b) {
        if (used[b]) continue;
        const double om = std::abs(symplectic_form(v.col(a), v.col(b)));
        if (om > best) {
          best = om;
          ba = a;
          bb = b;
        }
      }
    }
    const double scale = v.col(ba).norm() * v.col(bb).norm();
    if (!(best > tol * scale)) {
      throw Error(ErrorKind::DegeneratePairing,
                  "bracket restricted to eigenspace " + std::to_string(block + 1) + " is degenerate");
    }
    const Eigen::VectorXd es = v.col(ba);
    const Eigen::VectorXd etas = v.col(bb) / symplectic_form(v.col(ba), v.col(bb));
    used[ba] = used[bb] = true;
    for (Eigen::Index c = 0; c < m; ++c) {
      if (used[c]) continue;
      const Eigen::VectorXd x = v.col(c);
      v.col(c) = x - symplectic_form(x, etas) * es + symplectic_form(x, es) * etas;
    }
    out.e.col(s) = es;
    out.eta.col(s) = etas;
  }
  return out;
}

}  // namespace detail

/// Adapted basis from eigenspace bases U_1..U_{k+1} (sorted by eigenvalue,
/// center last). Throws DegeneratePairing if a pairing is numerically singular.
inline AdaptedBasis build_adapted_basis(int n, const std::vector<Eigen::MatrixXd>& bases, double tol = 1e-9) {
  const int k = static_cast<int>(bases.size()) - 1;
  if (k < 1) throw Error(ErrorKind::DegeneratePairing, "need at least one non-central eigenspace");
  AdaptedBasis out;
  out.center = Eigen::VectorXd::Unit(2 * n + 1, 2 * n);
  for (int i = 0; 2 * i <= k - 1; ++i) {
    const int j = k - 1 - i;
    if (i < j) {
      out.pairs.push_back(detail::pair_blocks(i, j, bases[i], bases[j], tol));
    } else {
      out.pairs.push_back(detail::darboux_block(i, bases[i], tol));
    }
  }
  return out;
}

/// Graded eigenstructure of a diagonalizable derivation with positive
/// eigenvalues alpha_1 < ... < alpha_{k+1}. Blocks are 0-based: block i holds
/// U_{i+1}, block k is the center. Immutable once built.
class GradedStructure {
 public:
  /// `bases[i]` spans the eigenspace of `alphas[i]`; alphas strictly increasing.
  static GradedStructure from_eigenspaces(int n, std::vector<double> alphas, std::vector<Eigen::MatrixXd> bases,
                                          double tol = 1e-9) {
    const int d = 2 * n + 1;
    if (alphas.size() != bases.size() || alphas.size() < 2) {
      throw Error(ErrorKind::InvalidArgument, "need matching eigenvalue and eigenspace lists with k >= 1");
    }
    int total = 0;
    for (std::size_t i = 0; i < bases.size(); ++i) {
      if (bases[i].rows() != d) throw Error(ErrorKind::DimensionMismatch, "eigenspace basis has wrong length");
      if (i > 0 && !(alphas[i] > alphas[i - 1])) {
        throw Error(ErrorKind::InvalidArgument, "eigenvalues must be strictly increasing");
      }
      total += static_cast<int>(bases[i].cols());
    }
    if (!(alphas.front() > 0.0)) throw Error(ErrorKind::NonPositiveEigenvalue, "eigenvalues must be positive");
    if (total != d) throw Error(ErrorKind::NonDiagonalizable, "eigenspaces do not span the algebra");
    const Eigen::MatrixXd& top = bases.back();
    if (top.cols() != 1 || top.col(0).head(d - 1).norm() > 1e-9 * top.col(0).norm()) {
      throw Error(ErrorKind::CenterMismatch, "top eigenspace is not the center line");
    }

    GradedStructure gs;
    gs.n_ = n;
    gs.alphas_ = std::move(alphas);
    gs.bases_ = std::move(bases);
    gs.adapted_ = build_adapted_basis(n, gs.bases_, tol);
    gs.offsets_.assign(1, 0);
    gs.p_.resize(d, d);
    for (int i = 0; i <= gs.k(); ++i) {
      const Eigen::MatrixXd b = gs.adapted_.block_basis(i);
      gs.p_.middleCols(gs.offsets_.back(), b.cols()) = b;
      gs.offsets_.push_back(gs.offsets_.back() + static_cast<int>(b.cols()));
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(gs.p_);
    if (!lu.isInvertible()) throw Error(ErrorKind::NonDiagonalizable, "adapted basis is singular");
    gs.pinv_ = lu.inverse();
    return gs;
  }

  int n() const noexcept { return n_; }
  int dim() const noexcept { return 2 * n_ + 1; }
  /// Number of non-central eigenvalues.
  int k() const noexcept { return static_cast<int>(alphas_.size()) - 1; }
  const std::vector<double>& eigenvalues() const noexcept { return alphas_; }
  double alpha(int block) const { return alphas_.at(block); }
  const std::vector<Eigen::MatrixXd>& eigenspace_bases() const noexcept { return bases_; }
  std::vector<int> dims() const {
    std::vector<int> out;
    for (const auto& b : bases_) out.push_back(static_cast<int>(b.cols()));
    return out;
  }
  int block_dim(int block) const { return offsets_.at(block + 1) - offsets_.at(block); }
  int block_offset(int block) const { return offsets_.at(block); }
  LieElement center_generator() const { return LieElement::center(n_); }
  const AdaptedBasis& adapted_basis() const noexcept { return adapted_; }

  /// Columns: the adapted basis, block by block, center last.
  const Eigen::MatrixXd& adapted_matrix() const noexcept { return p_; }
  const Eigen::MatrixXd& adapted_inverse() const noexcept { return pinv_; }

  Eigen::VectorXd adapted_coords(const LieElement& x) const {
    require(x);
    return pinv_ * x.coords();
  }
  LieElement from_adapted(const Eigen::VectorXd& c) const { return LieElement(n_, p_ * c); }

  /// Component of x in eigenspace `block`, in standard coordinates.
  LieElement block_component(const LieElement& x, int block) const {
    const Eigen::VectorXd c = adapted_coords(x);
    const int off = block_offset(block), m = block_dim(block);
    return LieElement(n_, p_.middleCols(off, m) * c.segment(off, m));
  }

  /// Per-coordinate eigenvalue in adapted order.
  Eigen::VectorXd coordinate_weights() const {
    Eigen::VectorXd w(dim());
    for (int i = 0; i <= k(); ++i) w.segment(block_offset(i), block_dim(i)).setConstant(alphas_[i]);
    return w;
  }

  /// The derivation P diag(alpha) P^{-1} in the standard basis.
  Eigen::MatrixXd derivation_matrix() const { return p_ * coordinate_weights().asDiagonal() * pinv_; }

  void require(const LieElement& x) const {
    if (x.n() != n_) {
      throw Error(ErrorKind::DimensionMismatch, "element of H_" + std::to_string(x.n()) +
                                                    " used with a structure on H_" + std::to_string(n_));
    }
  }

 private:
  GradedStructure() = default;

  int n_ = 0;
  std::vector<double> alphas_;
  std::vector<Eigen::MatrixXd> bases_;
  AdaptedBasis adapted_;
  std::vector<int> offsets_;
  Eigen::MatrixXd p_;
  Eigen::MatrixXd pinv_;
};

/// Overload operating on a built structure: rebuilds the adapted basis from
/// its eigenspace bases (deterministic, so equal to gs.adapted_basis()).
inline AdaptedBasis build_adapted_basis(const GradedStructure& gs, double tol = 1e-9) {
  return build_adapted_basis(gs.n(), gs.eigenspace_bases(), tol);
}

/// Eigen-decomposes a validated derivation into its graded structure.
inline GradedStructure decompose(const DerivationSpec& spec, double tol = 1e-9) {
  const LeibnizCheck lc = validate_derivation(spec, tol);
  if (!lc.is_derivation) {
    throw Error(ErrorKind::NotADerivation, "Leibniz defect " + std::to_string(lc.max_defect) + " on pair (e" +
                                               std::to_string(lc.worst_a + 1) + ", e" +
                                               std::to_string(lc.worst_b + 1) + ")");
  }
  const int n = spec.n();
  const int d = spec.dim();
  auto same = [](double a, double b) { return std::abs(a - b) <= kEigenGroupTol * std::max(std::abs(a), 1.0); };

  std::vector<double> alphas;
  std::vector<Eigen::MatrixXd> bases;

  if (spec.is_spectral()) {
    std::vector<std::pair<double, std::vector<Eigen::VectorXd>>> groups;
    for (const auto& b : spec.spectral_form()) {
      if (!(b.eigenvalue > 0.0)) {
        throw Error(ErrorKind::NonPositiveEigenvalue, "eigenvalue " + std::to_string(b.eigenvalue));
      }
      auto it = std::find_if(groups.begin(), groups.end(), [&](const auto& g) { return same(g.first, b.eigenvalue); });
      if (it == groups.end()) {
        groups.emplace_back(b.eigenvalue, b.eigenvectors);
      } else {
        it->second.insert(it->second.end(), b.eigenvectors.begin(), b.eigenvectors.end());
      }
    }
    std::sort(groups.begin(), groups.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto& [lam, vecs] : groups) {
      Eigen::MatrixXd b(d, static_cast<Eigen::Index>(vecs.size()));
      for (std::size_t j = 0; j < vecs.size(); ++j) b.col(static_cast<Eigen::Index>(j)) = vecs[j];
      alphas.push_back(lam);
      bases.push_back(std::move(b));
    }
  } else {
    const Eigen::MatrixXd& a = spec.matrix_form();
    Eigen::EigenSolver<Eigen::MatrixXd> es(a, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) {
      throw Error(ErrorKind::NonDiagonalizable, "eigenvalue iteration did not converge");
    }
    std::vector<double> lams;
    for (Eigen::Index i = 0; i < d; ++i) {
      const std::complex<double> z = es.eigenvalues()[i];
      if (std::abs(z.imag()) > 1e-6 * std::max(std::abs(z), 1.0)) {
        throw Error(ErrorKind::ComplexSpectrum, "eigenvalue " + std::to_string(z.real()) + " + " +
                                                    std::to_string(z.imag()) + "i");
      }
      lams.push_back(z.real());
    }
    std::sort(lams.begin(), lams.end());
    const double scale = std::max(1.0, std::abs(lams.back()));
    if (lams.front() <= kEigenGroupTol * scale) {
      throw Error(ErrorKind::NonPositiveEigenvalue, "eigenvalue " + std::to_string(lams.front()));
    }
    std::vector<std::pair<double, int>> groups;  // (mean, multiplicity)
    for (std::size_t i = 0; i < lams.size();) {
      std::size_t j = i + 1;
      double sum = lams[i];
      while (j < lams.size() && same(lams[i], lams[j])) sum += lams[j++];
      groups.emplace_back(sum / static_cast<double>(j - i), static_cast<int>(j - i));
      i = j;
    }
    const double anorm = std::max(1.0, a.norm());
    for (const auto& [lam, mult] : groups) {
      const Eigen::MatrixXd shifted = a - lam * Eigen::MatrixXd::Identity(d, d);
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(shifted, Eigen::ComputeFullV);
      const auto& s = svd.singularValues();
      if (s[d - mult] > 1e-7 * anorm) {
        throw Error(ErrorKind::NonDiagonalizable, "eigenvalue " + std::to_string(lam) + " has algebraic multiplicity " +
                                                      std::to_string(mult) + " but a smaller eigenspace");
      }
      alphas.push_back(lam);
      bases.push_back(detail::canonical_basis(svd.matrixV().rightCols(mult)));
    }
    Eigen::MatrixXd all(d, d);
    Eigen::Index col = 0;
    for (const auto& b : bases) {
      all.middleCols(col, b.cols()) = detail::orthonormalize(b);
      col += b.cols();
    }
    if (col != d) throw Error(ErrorKind::NonDiagonalizable, "eigenspaces do not span the algebra");
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(all);
    if (svd.singularValues()[d - 1] < 1e-6) {
      throw Error(ErrorKind::NonDiagonalizable, "eigenvectors are numerically dependent");
    }
  }

  {
    const Eigen::MatrixXd& top = bases.back();
    if (top.cols() != 1 || top.col(0).head(d - 1).norm() > 1e-9 * top.col(0).norm()) {
      throw Error(ErrorKind::CenterMismatch, "top eigenspace is not span(e_" + std::to_string(d) + ")");
    }
  }
  if (spec.is_spectral()) {
    Eigen::MatrixXd all(d, d);
    Eigen::Index col = 0;
    for (const auto& b : bases) {
      if (col + b.cols() > d) throw Error(ErrorKind::NonDiagonalizable, "too many eigenvectors");
      all.middleCols(col, b.cols()) = b;
      col += b.cols();
    }
    if (col != d) throw Error(ErrorKind::NonDiagonalizable, "eigenvectors do not span the algebra");
  }
  return GradedStructure::from_eigenspaces(n, std::move(alphas), std::move(bases), tol);
}

/// Spectral re-encoding of a structure (eigenvalues with eigenspace bases).
inline DerivationSpec to_spectral_spec(const GradedStructure& gs) {
  std::vector<EigenBlockSpec> blocks;
  for (int i = 0; i <= gs.k(); ++i) {
    EigenBlockSpec b{gs.alpha(i), {}};
    const auto& basis = gs.eigenspace_bases()[i];
    for (Eigen::Index j = 0; j < basis.cols(); ++j) b.eigenvectors.push_back(basis.col(j));
    blocks.push_back(std::move(b));
  }
  return DerivationSpec::from_spectral(gs.n(), std::move(blocks));
}

/// The automorphism e^{tA}: scales the U_i-component by e^{t alpha_i}.
inline LieElement flow(const GradedStructure& gs, double t, const LieElement& x) {
  Eigen::VectorXd c = gs.adapted_coords(x);
  for (int i = 0; i <= gs.k(); ++i) c.segment(gs.block_offset(i), gs.block_dim(i)) *= std::exp(t * gs.alpha(i));
  return gs.from_adapted(c);
}

struct StructureCheck {
  std::string name;
  bool passed = false;
  double defect = 0.0;  // nonnegative
  double value = 0.0;   // the measured quantity (same as defect unless noted)
};

struct StructureReport {
  std::vector<StructureCheck> checks;

  bool all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const StructureCheck& c) { return c.passed; });
  }
  double max_defect() const {
    double m = 0.0;
    for (const auto& c : checks) m = std::max(m, c.defect);
    return m;
  }
  const StructureCheck& check(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return c;
    throw Error(ErrorKind::InvalidArgument, "no check named " + name);
  }
};

/// Numerically verifies the eigenspace structure (center, vanishing and
/// nondegenerate pairings, eigenvalue and dimension symmetry) and the adapted
/// bracket table.
inline StructureReport verify_structure(const GradedStructure& gs, double tol = 1e-9) {
  const int k = gs.k();
  const int d = gs.dim();
  std::vector<Eigen::MatrixXd> on;
  for (const auto& b : gs.eigenspace_bases()) on.push_back(detail::orthonormalize(b));
  StructureReport rep;
  auto add = [&](std::string name, double defect, double value, bool passed) {
    rep.checks.push_back({std::move(name), passed, defect, value});
  };

  {
    const Eigen::VectorXd top = on[k].col(0);
    double defect = std::abs(gs.block_dim(k) - 1) + top.head(d - 1).norm();
    for (int j = 0; j < d; ++j) defect = std::max(defect, std::abs(symplectic_form(top, Eigen::VectorXd::Unit(d, j))));
    add("center", defect, defect, defect <= tol);
  }
  {
    double defect = 0.0;
    for (int i = 0; i <= k; ++i)
      for (int j = i; j <= k; ++j) {
        if (i + j == k - 1) continue;
        defect = std::max(defect, detail::pairing_matrix(on[i], on[j]).cwiseAbs().maxCoeff());
      }
    add("vanishing_brackets", defect, defect, defect <= tol);
  }
  {
    double margin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < k; ++i) {
      const Eigen::MatrixXd om = detail::pairing_matrix(on[i], on[k - 1 - i]);
      if (om.rows() != om.cols()) {
        margin = 0.0;
        continue;
      }
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(om);
      margin = std::min(margin, svd.singularValues().minCoeff());
    }
    add("nondegenerate_pairing", std::max(0.0, tol - margin), margin, margin > tol);
  }
  {
    double defect = 0.0;
    for (int i = 0; i < k; ++i) defect = std::max(defect, std::abs(gs.alpha(i) + gs.alpha(k - 1 - i) - gs.alpha(k)));
    defect /= gs.alpha(k);
    add("eigenvalue_symmetry", defect, defect, defect <= tol);
  }
  {
    double defect = 0.0;
    for (int i = 0; i < k; ++i) defect = std::max(defect, double(std::abs(gs.block_dim(i) - gs.block_dim(k - 1 - i))));
    if (k % 2 == 1 && gs.block_dim((k - 1) / 2) % 2 != 0) defect = std::max(defect, 1.0);
    add("dimension_symmetry", defect, defect, defect == 0.0);
  }
  {
    double defect = 0.0;
    for (const auto& p : gs.adapted_basis().pairs) {
      const Eigen::MatrixXd table = detail::pairing_matrix(p.e, p.eta);
      defect = std::max(defect, (table - Eigen::MatrixXd::Identity(table.rows(), table.cols())).cwiseAbs().maxCoeff());
      if (p.is_middle()) {
        defect = std::max(defect, detail::pairing_matrix(p.e, p.e).cwiseAbs().maxCoeff());
        defect = std::max(defect, detail::pairing_matrix(p.eta, p.eta).cwiseAbs().maxCoeff());
      }
    }
    add("adapted_table", defect, defect, defect <= tol);
  }
  return rep;
}

}  // namespace heisqi
