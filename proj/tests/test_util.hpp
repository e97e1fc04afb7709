#pragma once

#include <gtest/gtest.h>

#include <string>

#include "heisqi/heisenberg.hpp"

namespace heisqi::testing {

inline void expect_near(const LieElement& a, const LieElement& b, double tol) {
  ASSERT_EQ(a.n(), b.n());
  EXPECT_LE((a.coords() - b.coords()).cwiseAbs().maxCoeff(), tol)
      << "got " << a.coords().transpose() << "\nexpected " << b.coords().transpose();
}

inline std::string samples_path(const std::string& name) { return std::string(HEISQI_SAMPLES_DIR) + "/" + name; }

}  // namespace heisqi::testing
