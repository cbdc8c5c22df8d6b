#pragma once

#include <Eigen/Dense>

namespace safenav {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Value of a scalar field of (t, x) together with its first and second
/// partial derivatives: the data needed to push a barrier through one
/// Lie-derivative step and a class-K gain.
struct ScalarJet2 {
  double value = 0.0;
  double dt = 0.0;   // d/dt
  double dtt = 0.0;  // d^2/dt^2
  Vec grad;          // d/dx
  Vec dt_grad;       // d^2/dt dx
  Mat hess;          // d^2/dx^2, symmetric

  ScalarJet2() = default;
  explicit ScalarJet2(Eigen::Index n)
      : grad(Vec::Zero(n)), dt_grad(Vec::Zero(n)), hess(Mat::Zero(n, n)) {}

  Eigen::Index dim() const { return grad.size(); }

  static ScalarJet2 constant(double v, Eigen::Index n) {
    ScalarJet2 j(n);
    j.value = v;
    return j;
  }

  /// Embed a jet over the leading `n` coordinates into a larger state space.
  /// All derivatives with respect to the trailing coordinates are zero.
  ScalarJet2 lifted(Eigen::Index state_dim) const {
    const Eigen::Index p = dim();
    ScalarJet2 out(state_dim);
    out.value = value;
    out.dt = dt;
    out.dtt = dtt;
    out.grad.head(p) = grad;
    out.dt_grad.head(p) = dt_grad;
    out.hess.topLeftCorner(p, p) = hess;
    return out;
  }
};

}  // namespace safenav
