#ifndef GPT_TARGET_HPP
#define GPT_TARGET_HPP

#include <functional>
#include <string>
#include <vector>

#include "gpt/core.hpp"
#include "gpt/rng.hpp"

namespace gpt {

struct Qoi {
  std::string name;
  std::function<double(const ParamVector&)> eval;
};

/**
 * Abstract posterior pi(theta) ∝ exp(-Phi(theta; y)) w.r.t. a prior.
 *
 * Implementations are pure and reentrant. Off the prior support the potential
 * is +inf and the log-prior is -inf, never an exception.
 */
class TargetModel {
 public:
  virtual ~TargetModel() = default;

  virtual std::string name() const = 0;
  virtual int dim() const = 0;
  virtual bool in_domain(const ParamVector& theta) const = 0;
  /// Phi(theta; y); kOutOfDomain off the prior support.
  virtual double potential(const ParamVector& theta) const = 0;
  /// Log prior density w.r.t. the reference measure (Lebesgue), up to a constant.
  virtual double log_prior(const ParamVector& theta) const = 0;
  virtual ParamVector sample_prior(RandomStream& rng) const = 0;
  virtual std::vector<Qoi> qois() const = 0;

  /// Diagonal standard deviations of a centered normal prior, or nullptr if the
  /// prior is not of that form (pCN needs it).
  virtual const Eigen::VectorXd* normal_prior_scale() const { return nullptr; }
};

/// Uniform prior on an axis-aligned box; subclasses provide the potential inside.
class BoxPriorTarget : public TargetModel {
 public:
  BoxPriorTarget(Eigen::VectorXd lower, Eigen::VectorXd upper);

  int dim() const override { return static_cast<int>(lower_.size()); }
  bool in_domain(const ParamVector& theta) const override;
  double log_prior(const ParamVector& theta) const override;
  ParamVector sample_prior(RandomStream& rng) const override;
  /// Coordinate QoIs theta_1, ..., theta_d.
  std::vector<Qoi> qois() const override;

  const Eigen::VectorXd& lower() const { return lower_; }
  const Eigen::VectorXd& upper() const { return upper_; }

 private:
  Eigen::VectorXd lower_;
  Eigen::VectorXd upper_;
};

}  // namespace gpt

#endif  // GPT_TARGET_HPP
