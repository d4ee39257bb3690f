#pragma once

#include "kansa/kernels.hpp"

namespace kansa {

struct InvalidInput : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct LstsqResult {
  Vec x;
  int rank = 0;
  bool rank_deficient = false;
  // 1-norm condition estimate of the retained triangular factor.
  double cond_estimate = 0;
};

// Minimum-norm least squares through a column-pivoted complete orthogonal
// factorization. Columns whose pivots fall below rcond relative to the
// largest are treated as dependent.
LstsqResult lstsq(const Mat& A, const Vec& b, double rcond = 1e-15);

// sigma_max / sigma_min, +inf when sigma_min is below 1e-300.
double condition_number(const Mat& M);
Vec singular_values(const Mat& M);

bool all_finite(const Mat& M);
bool all_finite(const Vec& v);

}  // namespace kansa
