#include "safenav/softblend.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace safenav {

namespace {

void check_args(std::span<const double> z, double kappa) {
  if (z.empty()) throw std::invalid_argument("softblend: empty argument list");
  if (!(kappa > 0.0)) throw std::invalid_argument("softblend: kappa must be > 0");
  for (double v : z) {
    if (!std::isfinite(v)) throw std::invalid_argument("softblend: non-finite argument");
  }
}

}  // namespace

double stable_softmin(std::span<const double> z, double kappa) {
  check_args(z, kappa);
  const double lo = *std::min_element(z.begin(), z.end());
  double s = 0.0;
  for (double v : z) s += std::exp(-kappa * (v - lo));  // every exponent <= 0
  return lo - std::log(s) / kappa;
}

double stable_softmax(std::span<const double> z, double kappa) {
  check_args(z, kappa);
  const double hi = *std::max_element(z.begin(), z.end());
  double s = 0.0;
  for (double v : z) s += std::exp(kappa * (v - hi));
  return hi + std::log(s) / kappa - std::log(static_cast<double>(z.size())) / kappa;
}

void softblend_weights(std::span<const double> z, double kappa, BlendMode mode,
                       std::vector<double>& w) {
  check_args(z, kappa);
  w.resize(z.size());
  const double sign = (mode == BlendMode::Max) ? 1.0 : -1.0;
  double pivot = (mode == BlendMode::Max) ? *std::max_element(z.begin(), z.end())
                                          : *std::min_element(z.begin(), z.end());
  double s = 0.0;
  for (size_t j = 0; j < z.size(); ++j) {
    w[j] = std::exp(sign * kappa * (z[j] - pivot));
    s += w[j];
  }
  for (double& wj : w) wj /= s;
}

ScalarJet2 softblend_jet(std::span<const ScalarJet2> args, double kappa,
                         BlendMode mode, std::vector<double>* weights) {
  if (args.empty()) throw std::invalid_argument("softblend_jet: empty argument list");
  const Eigen::Index n = args[0].dim();
  for (const auto& a : args) {
    if (a.dim() != n) throw std::invalid_argument("softblend_jet: dimension mismatch");
  }

  std::vector<double> values(args.size());
  for (size_t j = 0; j < args.size(); ++j) values[j] = args[j].value;

  std::vector<double> w;
  softblend_weights(values, kappa, mode, w);

  ScalarJet2 out(n);
  out.value = (mode == BlendMode::Max) ? stable_softmax(values, kappa)
                                       : stable_softmin(values, kappa);

  // First derivatives: convex combination.
  Vec mean_grad = Vec::Zero(n);
  double mean_dt = 0.0;
  for (size_t j = 0; j < args.size(); ++j) {
    mean_grad.noalias() += w[j] * args[j].grad;
    mean_dt += w[j] * args[j].dt;
  }
  out.grad = mean_grad;
  out.dt = mean_dt;

  // Second derivatives: weighted second derivatives plus the kappa-scaled
  // covariance of the first derivatives. Sign follows the blend direction.
  const double sign = (mode == BlendMode::Max) ? 1.0 : -1.0;
  Mat hess = Mat::Zero(n, n);
  Vec dt_grad = Vec::Zero(n);
  double dtt = 0.0;
  for (size_t j = 0; j < args.size(); ++j) {
    const auto& a = args[j];
    hess.noalias() += w[j] * a.hess;
    hess.noalias() += (sign * kappa * w[j]) * (a.grad * a.grad.transpose());
    dt_grad.noalias() += w[j] * a.dt_grad;
    dt_grad.noalias() += (sign * kappa * w[j] * a.dt) * a.grad;
    dtt += w[j] * (a.dtt + sign * kappa * a.dt * a.dt);
  }
  hess.noalias() -= (sign * kappa) * (mean_grad * mean_grad.transpose());
  dt_grad.noalias() -= (sign * kappa * mean_dt) * mean_grad;
  dtt -= sign * kappa * mean_dt * mean_dt;

  out.hess = 0.5 * (hess + hess.transpose());  // exact symmetrization
  out.dt_grad = dt_grad;
  out.dtt = dtt;

  if (weights) *weights = std::move(w);
  return out;
}

// ---------------------------------------------------------------------------
// Smoothstep
// ---------------------------------------------------------------------------

namespace {

constexpr int kMaxOrder = 8;

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

// The transition polynomial P(s) = s^{r+1} sum_j C(r+j,j) C(2r+1,r-j) (-s)^j
// evaluated through its equivalent nonnegative product form
//   P(s) = sum_{k=r+1}^{2r+1} C(2r+1,k) s^k (1-s)^{2r+1-k},
//   P'(s) = (2r+1) C(2r,r) s^r (1-s)^r.
// The dense-coefficient form cancels catastrophically for r >= 7; this one
// is a sum of nonnegative terms and keeps P in [0,1] to machine precision.
struct PolyTable {
  double bernstein[kMaxOrder + 1] = {0};  // C(2r+1, r+1+j), j = 0..r
  double d1_scale = 0.0;                  // (2r+1) C(2r, r)
};

const PolyTable& poly_table(int r) {
  static PolyTable tables[kMaxOrder + 1];
  static bool built = [] {
    for (int r = 1; r <= kMaxOrder; ++r) {
      PolyTable& t = tables[r];
      for (int j = 0; j <= r; ++j) t.bernstein[j] = binomial(2 * r + 1, r + 1 + j);
      t.d1_scale = (2.0 * r + 1.0) * binomial(2 * r, r);
    }
    return true;
  }();
  (void)built;
  return tables[r];
}

void eval_poly(const PolyTable& t, int r, double s, double& p, double& dp, double& ddp) {
  const double u = 1.0 - s;
  p = 0.0;
  for (int j = 0; j <= r; ++j)
    p += t.bernstein[j] * std::pow(s, r + 1 + j) * std::pow(u, r - j);
  const double core = std::pow(s, r - 1) * std::pow(u, r - 1);
  dp = t.d1_scale * core * s * u;
  ddp = t.d1_scale * static_cast<double>(r) * core * (1.0 - 2.0 * s);
}

}  // namespace

void SmoothstepSpec::validate() const {
  if (!(nu >= 1.0)) throw std::invalid_argument("smoothstep: nu must be >= 1");
  if (kind == Kind::Polynomial) {
    if (r < 1 || r > kMaxOrder) throw std::invalid_argument("smoothstep: polynomial order out of range");
  } else {
    if (r < 1 || r > 2) throw std::invalid_argument("smoothstep: sinusoidal kind requires r in {1,2}");
  }
}

Smoothstep3 smoothstep_jet(double t, const SmoothstepSpec& spec) {
  spec.validate();
  Smoothstep3 out;
  if (t <= 0.0) return out;  // value 0, flat
  if (t >= 1.0 / spec.nu) {
    out.value = 1.0;
    return out;
  }
  if (spec.kind == SmoothstepSpec::Kind::Polynomial) {
    const double s = spec.nu * t;
    double p, dp, ddp;
    eval_poly(poly_table(spec.r), spec.r, s, p, dp, ddp);
    out.value = p;
    out.d1 = spec.nu * dp;
    out.d2 = spec.nu * spec.nu * ddp;
  } else {
    const double two_pi = 2.0 * M_PI;
    const double a = two_pi * spec.nu * t;
    out.value = spec.nu * t - std::sin(a) / two_pi;
    out.d1 = spec.nu * (1.0 - std::cos(a));
    out.d2 = two_pi * spec.nu * spec.nu * std::sin(a);
  }
  return out;
}

}  // namespace safenav
