#pragma once

#include <gtest/gtest.h>

#include <cmath>

#include "qcs/error.hpp"

namespace qcs::testing {

template <class F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no qcs::Error thrown";
  return ErrorCode::Io;
}

/// Upper chi-square quantile at 1% via the Wilson-Hilferty approximation.
inline double chi2_crit_99(double dof) {
  const double z = 2.3263478740408408;
  const double a = 2.0 / (9.0 * dof);
  return dof * std::pow(1.0 - a + z * std::sqrt(a), 3.0);
}

}  // namespace qcs::testing
