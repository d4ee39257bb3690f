#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace kansa {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
// One point per row; the last column is time.
using Points = Eigen::MatrixXd;

enum class Family { Gaussian, InverseQuadratic, Multiquadric };

std::string family_name(Family f);
Family parse_family(const std::string& name);

struct CapabilityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Partial derivative orders per coordinate, total order at most 2.
struct DerivIndex {
  std::vector<int> orders;

  DerivIndex() = default;
  explicit DerivIndex(std::vector<int> o);

  static DerivIndex identity(int dim);
  // First derivative along coordinate c.
  static DerivIndex d(int dim, int c);
  // Second derivative along c1 then c2 (c1 == c2 for a pure second derivative).
  static DerivIndex d2(int dim, int c1, int c2);

  int dim() const { return static_cast<int>(orders.size()); }
  int total() const;
  bool operator==(const DerivIndex& o) const { return orders == o.orders; }
  bool operator<(const DerivIndex& o) const { return orders < o.orders; }
};

// Derivative index decoded into at most two coordinate slots (-1 when unused).
struct DerivSlots {
  int order = 0;
  int a = -1;
  int b = -1;
};
DerivSlots decode(const DerivIndex& idx);

class RbfKernel {
 public:
  RbfKernel() = default;
  RbfKernel(Family family, double epsilon);

  static RbfKernel gaussian_from_sigma(double sigma);

  Family family() const { return family_; }
  double epsilon() const { return eps_; }
  // Gaussian standard deviation, sigma = 1/(sqrt(2) eps).
  double sigma() const;
  static double sigma_from_epsilon(double eps);
  static double epsilon_from_sigma(double sigma);

  double eval(double r) const;

  // Partial of psi(|query - center|) w.r.t. query coordinates.
  double eval_partial(const DerivIndex& idx, const Eigen::Ref<const Vec>& center,
                      const Eigen::Ref<const Vec>& query) const;

  // Same, for a precomputed displacement d = query - center.
  double partial_from_diff(const DerivSlots& s, const double* d, int dim) const;
  // Several partials sharing one kernel evaluation; out has slots.size() entries.
  void partials_from_diff(const std::vector<DerivSlots>& slots, const double* d, int dim,
                          double* out) const;

 private:
  // phi and its first two derivatives in s = (eps r)^2.
  void phi(double s, double& p0, double& p1, double& p2) const;

  Family family_ = Family::Gaussian;
  double eps_ = 1.0;
};

}  // namespace kansa
