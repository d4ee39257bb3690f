#include "kansa/kernels.hpp"

#include <cmath>
#include <numeric>

namespace kansa {

std::string family_name(Family f) {
  switch (f) {
    case Family::Gaussian: return "gaussian";
    case Family::InverseQuadratic: return "inverse_quadratic";
    case Family::Multiquadric: return "multiquadric";
  }
  return "gaussian";
}

Family parse_family(const std::string& name) {
  if (name == "gaussian") return Family::Gaussian;
  if (name == "inverse_quadratic" || name == "iq") return Family::InverseQuadratic;
  if (name == "multiquadric" || name == "mq") return Family::Multiquadric;
  throw std::invalid_argument("unknown kernel family: " + name);
}

DerivIndex::DerivIndex(std::vector<int> o) : orders(std::move(o)) {
  for (int v : orders)
    if (v < 0) throw std::invalid_argument("negative derivative order");
  if (total() > 2) throw CapabilityError("derivative order above 2 is not supported");
}

DerivIndex DerivIndex::identity(int dim) { return DerivIndex(std::vector<int>(dim, 0)); }

DerivIndex DerivIndex::d(int dim, int c) {
  std::vector<int> o(dim, 0);
  o.at(c) = 1;
  return DerivIndex(o);
}

DerivIndex DerivIndex::d2(int dim, int c1, int c2) {
  std::vector<int> o(dim, 0);
  o.at(c1) += 1;
  o.at(c2) += 1;
  return DerivIndex(o);
}

int DerivIndex::total() const { return std::accumulate(orders.begin(), orders.end(), 0); }

DerivSlots decode(const DerivIndex& idx) {
  if (idx.total() > 2) throw CapabilityError("derivative order above 2 is not supported");
  DerivSlots s;
  for (int c = 0; c < idx.dim(); ++c) {
    for (int k = 0; k < idx.orders[c]; ++k) {
      if (s.a < 0) s.a = c;
      else s.b = c;
      ++s.order;
    }
  }
  return s;
}

RbfKernel::RbfKernel(Family family, double epsilon) : family_(family), eps_(epsilon) {
  if (!std::isfinite(epsilon)) throw std::invalid_argument("shape parameter must be finite");
  if (family == Family::Multiquadric ? epsilon < 0 : epsilon <= 0)
    throw std::invalid_argument("shape parameter out of range");
}

RbfKernel RbfKernel::gaussian_from_sigma(double sigma) {
  return RbfKernel(Family::Gaussian, epsilon_from_sigma(sigma));
}

double RbfKernel::sigma() const { return sigma_from_epsilon(eps_); }
double RbfKernel::sigma_from_epsilon(double eps) { return 1.0 / (std::sqrt(2.0) * eps); }
double RbfKernel::epsilon_from_sigma(double sigma) { return 1.0 / (std::sqrt(2.0) * sigma); }

void RbfKernel::phi(double s, double& p0, double& p1, double& p2) const {
  switch (family_) {
    case Family::Gaussian: {
      p0 = std::exp(-s);
      p1 = -p0;
      p2 = p0;
      return;
    }
    case Family::InverseQuadratic: {
      double q = 1.0 / (1.0 + s);
      p0 = q;
      p1 = -q * q;
      p2 = 2.0 * q * q * q;
      return;
    }
    case Family::Multiquadric: {
      double q = std::sqrt(1.0 + s);
      p0 = q;
      p1 = 0.5 / q;
      p2 = -0.25 / (q * q * q);
      return;
    }
  }
}

double RbfKernel::eval(double r) const {
  double p0 = 0, p1 = 0, p2 = 0;
  phi(eps_ * eps_ * r * r, p0, p1, p2);
  return p0;
}

double RbfKernel::partial_from_diff(const DerivSlots& s, const double* d, int dim) const {
  double out;
  partials_from_diff({s}, d, dim, &out);
  return out;
}

void RbfKernel::partials_from_diff(const std::vector<DerivSlots>& slots, const double* d,
                                   int dim, double* out) const {
  double e2 = eps_ * eps_;
  double r2 = 0;
  for (int c = 0; c < dim; ++c) r2 += d[c] * d[c];
  double p0 = 0, p1 = 0, p2 = 0;
  phi(e2 * r2, p0, p1, p2);
  for (size_t k = 0; k < slots.size(); ++k) {
    const DerivSlots& s = slots[k];
    if (s.order == 0) {
      out[k] = p0;
    } else if (s.order == 1) {
      out[k] = 2.0 * e2 * d[s.a] * p1;
    } else {
      double v = 4.0 * e2 * e2 * d[s.a] * d[s.b] * p2;
      if (s.a == s.b) v += 2.0 * e2 * p1;
      out[k] = v;
    }
  }
}

double RbfKernel::eval_partial(const DerivIndex& idx, const Eigen::Ref<const Vec>& center,
                               const Eigen::Ref<const Vec>& query) const {
  if (center.size() != query.size() || idx.dim() != query.size())
    throw std::invalid_argument("dimension mismatch in eval_partial");
  DerivSlots s = decode(idx);
  Vec d = query - center;
  return partial_from_diff(s, d.data(), static_cast<int>(d.size()));
}

}  // namespace kansa
