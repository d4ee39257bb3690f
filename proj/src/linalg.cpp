#include "kansa/linalg.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <limits>
#include <vector>

extern "C" {
void dlaqps_(const lapack_int* m, const lapack_int* n, const lapack_int* offset, const lapack_int* nb,
             lapack_int* kb, double* a, const lapack_int* lda, lapack_int* jpvt, double* tau, double* vn1,
             double* vn2, double* auxv, double* f, const lapack_int* ldf);
void dlaic1_(const lapack_int* job, const lapack_int* j, const double* x, const double* sest, const double* w,
             const double* gamma, double* sestpr, double* s, double* c);
}

namespace kansa {
namespace {

constexpr lapack_int kBlock = 32;

void check(lapack_int info, const char* what) {
  if (info != 0) throw std::runtime_error(std::string(what) + " failed with info " + std::to_string(info));
}

}  // namespace

bool all_finite(const Mat& M) { return M.allFinite(); }
bool all_finite(const Vec& v) { return v.allFinite(); }

LstsqResult lstsq(const Mat& A, const Vec& b, double rcond) {
  if (A.rows() != b.size()) throw InvalidInput("lstsq: row count mismatch");
  if (A.cols() == 0) throw InvalidInput("lstsq: empty system");
  if (!A.allFinite() || !b.allFinite()) throw InvalidInput("lstsq: non-finite entries");

  // The steps of dgelsy, with the pivoted QR stopped once the incremental condition estimate
  // has fixed the rank; RBF systems are often numerically rank ~n/20.
  const lapack_int m = static_cast<lapack_int>(A.rows());
  const lapack_int n = static_cast<lapack_int>(A.cols());
  const lapack_int mn = std::min(m, n);
  Mat a = A;
  std::vector<lapack_int> jpvt(n);
  std::vector<double> tau(mn), vn1(n), vn2(n), auxv(kBlock), f;
  for (lapack_int j = 0; j < n; ++j) jpvt[j] = j + 1, vn1[j] = vn2[j] = a.col(j).norm();

  lapack_int rank = 0, done = 0;
  double smax = 0, smin = 0;
  Vec xmin(mn), xmax(mn);
  bool settled = false;
  while (done < mn && !settled) {
    lapack_int cols = n - done, nb = std::min<lapack_int>(kBlock, mn - done), kb = 0;
    f.assign(static_cast<size_t>(cols) * nb, 0.0);
    dlaqps_(&m, &cols, &done, &nb, &kb, &a(0, done), &m, &jpvt[done], &tau[done], &vn1[done], &vn2[done],
            auxv.data(), f.data(), &cols);
    done += kb;
    for (; rank < done; ++rank) {
      const double diag = a(rank, rank);
      if (rank == 0) {
        smax = smin = std::abs(diag);
        if (smax == 0) {
          settled = true;
          break;
        }
        xmin[0] = xmax[0] = 1;
        continue;
      }
      const lapack_int job_min = 2, job_max = 1;
      double sminpr, smaxpr, s1, c1, s2, c2;
      dlaic1_(&job_min, &rank, xmin.data(), &smin, &a(0, rank), &diag, &sminpr, &s1, &c1);
      dlaic1_(&job_max, &rank, xmax.data(), &smax, &a(0, rank), &diag, &smaxpr, &s2, &c2);
      if (!(smaxpr * rcond <= sminpr)) {
        settled = true;
        break;
      }
      xmin.head(rank) *= s1, xmin[rank] = c1;
      xmax.head(rank) *= s2, xmax[rank] = c2;
      smin = sminpr, smax = smaxpr;
    }
  }

  LstsqResult out;
  out.x = Vec::Zero(n);
  out.rank = static_cast<int>(rank);
  out.rank_deficient = rank < mn;
  out.cond_estimate = std::numeric_limits<double>::infinity();
  if (rank == 0) return out;

  Vec rhs = b;
  check(LAPACKE_dormqr(LAPACK_COL_MAJOR, 'L', 'T', m, 1, rank, a.data(), m, tau.data(), rhs.data(), m), "dormqr");
  std::vector<double> tau2(rank);
  if (rank < n) check(LAPACKE_dtzrzf(LAPACK_COL_MAJOR, rank, n, a.data(), m, tau2.data()), "dtzrzf");
  Vec y = Vec::Zero(n);
  y.head(rank) = rhs.head(rank);
  check(LAPACKE_dtrtrs(LAPACK_COL_MAJOR, 'U', 'N', 'N', rank, 1, a.data(), m, y.data(), n), "dtrtrs");
  if (rank < n)
    check(LAPACKE_dormrz(LAPACK_COL_MAJOR, 'L', 'T', n, 1, rank, n - rank, a.data(), m, tau2.data(), y.data(), n),
          "dormrz");
  for (lapack_int i = 0; i < n; ++i) out.x[jpvt[i] - 1] = y[i];

  double rc = 0;
  LAPACKE_dtrcon(LAPACK_COL_MAJOR, '1', 'U', 'N', rank, a.data(), m, &rc);
  if (rc > 0) out.cond_estimate = 1.0 / rc;
  return out;
}

Vec singular_values(const Mat& M) {
  if (M.size() == 0) throw InvalidInput("singular_values: empty matrix");
  const lapack_int m = static_cast<lapack_int>(M.rows());
  const lapack_int n = static_cast<lapack_int>(M.cols());
  Mat a = M;
  Vec s(std::min(m, n));
  lapack_int info = LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'N', m, n, a.data(), m, s.data(), nullptr,
                                   1, nullptr, 1);
  if (info != 0) throw std::runtime_error("dgesdd failed with info " + std::to_string(info));
  return s;
}

double condition_number(const Mat& M) {
  if (!M.allFinite()) return std::numeric_limits<double>::infinity();
  Vec s = singular_values(M);
  double smax = s.maxCoeff();
  double smin = s.minCoeff();
  if (smin < 1e-300) return std::numeric_limits<double>::infinity();
  return smax / smin;
}

}  // namespace kansa
