#include "gpt/target.hpp"

#include <stdexcept>

namespace gpt {

BoxPriorTarget::BoxPriorTarget(Eigen::VectorXd lower, Eigen::VectorXd upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() != upper_.size() || lower_.size() == 0)
    throw std::invalid_argument("box bounds must be non-empty and of equal length");
  if (!(lower_.array() < upper_.array()).all())
    throw std::invalid_argument("box lower bound must be below upper bound");
}

bool BoxPriorTarget::in_domain(const ParamVector& theta) const {
  if (theta.size() != lower_.size()) return false;
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    // NaN compares false and lands outside.
    if (!(theta[i] >= lower_[i] && theta[i] <= upper_[i])) return false;
  }
  return true;
}

double BoxPriorTarget::log_prior(const ParamVector& theta) const {
  return in_domain(theta) ? 0.0 : -kOutOfDomain;
}

ParamVector BoxPriorTarget::sample_prior(RandomStream& rng) const {
  ParamVector theta(lower_.size());
  for (Eigen::Index i = 0; i < theta.size(); ++i)
    theta[i] = lower_[i] + (upper_[i] - lower_[i]) * rng.uniform();
  return theta;
}

std::vector<Qoi> BoxPriorTarget::qois() const {
  std::vector<Qoi> out;
  for (Eigen::Index i = 0; i < lower_.size(); ++i)
    out.push_back(Qoi{"theta" + std::to_string(i + 1), [i](const ParamVector& t) { return t[i]; }});
  return out;
}

}  // namespace gpt
