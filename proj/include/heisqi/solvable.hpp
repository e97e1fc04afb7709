#pragma once

#include "heisqi/derivation.hpp"
#include "heisqi/heisenberg.hpp"

namespace heisqi {

/// Element (g, t) of G_A = H_n x|_A R.
struct SolvElement {
  LieElement g;
  double t = 0.0;
};

/// (g, t1) . (h, t2) = (g * e^{t1 A} h, t1 + t2).
inline SolvElement solv_mul(const SolvElement& a, const SolvElement& b, const GradedStructure& gs) {
  gs.require(a.g);
  gs.require(b.g);
  return {bch_mul(a.g, flow(gs, a.t, b.g)), a.t + b.t};
}

inline SolvElement solv_inv(const SolvElement& a, const GradedStructure& gs) {
  return {flow(gs, -a.t, bch_inv(a.g)), -a.t};
}

}  // namespace heisqi
