#include "safenav/barrier.hpp"

#include <cmath>
#include <sstream>

#include "safenav/softblend.hpp"

namespace safenav {

namespace {

Vec beam_direction_2d(double azimuth) {
  Vec d(2);
  d << std::cos(azimuth), std::sin(azimuth);
  return d;
}

Vec beam_direction_3d(double azimuth, double elevation) {
  Vec d(3);
  d << std::sin(elevation) * std::cos(azimuth),
      std::sin(elevation) * std::sin(azimuth), std::cos(elevation);
  return d;
}

Mat rotation_2d(double azimuth) {
  Mat r(2, 2);
  r << std::cos(azimuth), std::sin(azimuth),  //
      -std::sin(azimuth), std::cos(azimuth);
  return r;
}

Mat rotation_3d(double azimuth, double elevation) {
  const double ct = std::cos(azimuth), st = std::sin(azimuth);
  const double cp = std::cos(elevation), sp = std::sin(elevation);
  Mat r(3, 3);
  r << ct * sp, st * sp, cp,  //
      -st, ct, 0.0,           //
      -ct * cp, -st * cp, sp;
  return r;
}

// tau = +-e(heading -+ fov/2) . (pos - center) - offset with e(a) = (-sin a, cos a).
void fov_half_planes(const DetectionRegion& rg, Vec& e_lo, Vec& e_hi) {
  const double lo = rg.heading - 0.5 * rg.fov;
  const double hi = rg.heading + 0.5 * rg.fov;
  e_lo.resize(2);
  e_lo << -std::sin(lo), std::cos(lo);
  e_hi.resize(2);
  e_hi << std::sin(hi), -std::cos(hi);  // negated: interior is below the upper edge
}

double region_value_impl(const DetectionRegion& rg, const Vec& pos) {
  const Vec delta = pos - rg.center;
  const double beta = rg.radius * rg.radius - delta.squaredNorm();
  if (rg.kind == DetectionRegion::Kind::Disk360) return beta;
  Vec e_lo, e_hi;
  fov_half_planes(rg, e_lo, e_hi);
  const double z[3] = {beta, e_lo.dot(delta) - rg.offset, e_hi.dot(delta) - rg.offset};
  return stable_softmin(z, rg.rho);
}

ScalarJet2 region_jet_impl(const DetectionRegion& rg, const Vec& pos) {
  const Eigen::Index n = pos.size();
  const Vec delta = pos - rg.center;

  ScalarJet2 beta(n);
  beta.value = rg.radius * rg.radius - delta.squaredNorm();
  beta.grad = -2.0 * delta;
  beta.hess = -2.0 * Mat::Identity(n, n);
  if (rg.kind == DetectionRegion::Kind::Disk360) return beta;

  Vec e_lo, e_hi;
  fov_half_planes(rg, e_lo, e_hi);
  ScalarJet2 tau_lo(n), tau_hi(n);
  tau_lo.value = e_lo.dot(delta) - rg.offset;
  tau_lo.grad = e_lo;
  tau_hi.value = e_hi.dot(delta) - rg.offset;
  tau_hi.grad = e_hi;

  const ScalarJet2 args[3] = {beta, tau_lo, tau_hi};
  return softblend_jet(args, rg.rho, BlendMode::Min);
}

}  // namespace

double ExclusionTerm::value(const Vec& pos) const {
  const Vec delta = pos - center;
  return delta.dot(quad * delta) - 1.0;
}

void ExclusionTerm::accumulate_jet(const Vec& pos, double& v, Vec& grad, Mat& hess) const {
  const Vec delta = pos - center;
  const Vec qd = quad * delta;
  v = delta.dot(qd) - 1.0;
  grad = 2.0 * qd;
  hess = 2.0 * quad;
}

double PerceptionBarrier::region_value(const Vec& pos) const {
  return region_value_impl(region, pos);
}

ScalarJet2 PerceptionBarrier::region_jet(const Vec& pos) const {
  return region_jet_impl(region, pos);
}

double PerceptionBarrier::value(const Vec& pos) const {
  const double xi = region_value_impl(region, pos);
  if (terms.empty()) return xi;
  std::vector<double> z;
  z.reserve(terms.size() + 1);
  z.push_back(xi);
  for (const auto& term : terms) z.push_back(term.value(pos));
  return stable_softmin(z, rho);
}

ScalarJet2 PerceptionBarrier::position_jet(const Vec& pos) const {
  if (pos.size() != dim) throw std::invalid_argument("barrier: position dimension mismatch");
  ScalarJet2 xi = region_jet_impl(region, pos);
  if (terms.empty()) return xi;

  std::vector<ScalarJet2> args;
  args.reserve(terms.size() + 1);
  args.push_back(std::move(xi));
  for (const auto& term : terms) {
    ScalarJet2 j(dim);
    term.accumulate_jet(pos, j.value, j.grad, j.hess);
    args.push_back(std::move(j));
  }
  return softblend_jet(args, rho, BlendMode::Min);
}

ScalarJet2 eval_barrier_jet(const PerceptionBarrier& b, const Vec& x) {
  if (x.size() < b.dim) throw std::invalid_argument("barrier: state dimension mismatch");
  return b.position_jet(x.head(b.dim)).lifted(x.size());
}

double solve_fov_offset(double beta_value_at_pose, double theta_f, double rho) {
  (void)theta_f;
  if (!(rho > 0.0)) throw std::invalid_argument("solve_fov_offset: rho must be > 0");
  if (!(beta_value_at_pose > 0.0))
    throw SynthesisError("solve_fov_offset: region function nonpositive at pose");

  const auto residual = [&](double eps) {
    const double z[3] = {beta_value_at_pose, -eps, -eps};
    return stable_softmin(z, rho);
  };

  double lo = -10.0, hi = 10.0;
  double f_lo = residual(lo), f_hi = residual(hi);
  // residual is strictly decreasing in eps
  if (!(f_lo > 0.0 && f_hi < 0.0)) {
    std::ostringstream msg;
    msg << "solve_fov_offset: no sign change in [-10,10], residuals " << f_lo << ", " << f_hi;
    throw SynthesisError(msg.str());
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = residual(mid);
    if (std::abs(f_mid) < 1e-10) return mid;
    if (f_mid > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  throw SynthesisError("solve_fov_offset: bisection did not converge");
}

PerceptionBarrier synthesize_barrier(const Scan& scan, const BarrierConfig& cfg) {
  if (!(cfg.max_range > 0.0) || !(cfg.eps_a > 0.0) || cfg.eps_beta < 0.0 || !(cfg.rho > 0.0))
    throw std::invalid_argument("synthesize_barrier: nonpositive configuration");
  if (!(cfg.max_range - cfg.eps_beta > 0.0))
    throw std::invalid_argument("synthesize_barrier: eps_beta >= max_range");
  if (cfg.vbar) {
    const double margin = dynamic_margin(cfg.period, cfg.window_n, *cfg.vbar);
    if (cfg.eps_a < margin - 1e-12 || cfg.eps_beta < margin - 1e-12)
      throw std::invalid_argument("synthesize_barrier: margins below the dynamic-environment bound");
  }
  if (scan.dim != 2 && scan.dim != 3) throw std::invalid_argument("synthesize_barrier: dim must be 2 or 3");
  if (scan.pose.size() != scan.dim) throw std::invalid_argument("synthesize_barrier: pose dimension mismatch");

  PerceptionBarrier b;
  b.dim = scan.dim;
  b.rho = cfg.rho;
  b.index_k = scan.index_k;

  b.terms.reserve(scan.points.size());
  for (const auto& pt : scan.points) {
    if (pt.range < 0.0 || pt.range > cfg.max_range + 1e-9)
      throw SynthesisError("synthesize_barrier: point range outside [0, max_range]");
    const double half = 0.5 * (cfg.max_range - pt.range);
    const double a = half + cfg.eps_a;
    const double z = std::sqrt(a * a - half * half);

    ExclusionTerm term;
    const Vec dir = (scan.dim == 2) ? beam_direction_2d(pt.azimuth)
                                    : beam_direction_3d(pt.azimuth, pt.elevation);
    // midpoint of the detected point and its projection onto the detection boundary
    term.center = scan.pose + 0.5 * (pt.range + cfg.max_range) * dir;
    term.rotation = (scan.dim == 2) ? rotation_2d(pt.azimuth)
                                    : rotation_3d(pt.azimuth, pt.elevation);
    term.semi_axes.resize(scan.dim);
    term.semi_axes(0) = a;
    for (int i = 1; i < scan.dim; ++i) term.semi_axes(i) = z;
    Mat p = Mat::Zero(scan.dim, scan.dim);
    for (int i = 0; i < scan.dim; ++i) p(i, i) = 1.0 / (term.semi_axes(i) * term.semi_axes(i));
    term.quad = term.rotation.transpose() * p * term.rotation;
    b.terms.push_back(std::move(term));
  }

  b.region.center = scan.pose;
  b.region.radius = cfg.max_range - cfg.eps_beta;
  if (!cfg.fov) {
    b.region.kind = DetectionRegion::Kind::Disk360;
    return b;
  }

  if (scan.dim != 2) throw std::invalid_argument("synthesize_barrier: limited FOV is 2D only");
  b.region.kind = DetectionRegion::Kind::LimitedFov;
  b.region.heading = scan.heading;
  b.region.fov = *cfg.fov;
  b.region.rho = cfg.rho;

  // Solve the half-plane offset so the capture pose sits on (or, with the
  // interior margin, just inside) the zero level of the whole snapshot.
  const double target = cfg.fov_interior_margin;
  const auto pose_value = [&](double eps) {
    PerceptionBarrier probe = b;
    probe.region.offset = eps;
    return probe.value(scan.pose) - target;
  };
  double lo = -10.0, hi = 10.0;
  double f_lo = pose_value(lo), f_hi = pose_value(hi);
  if (!(f_lo > 0.0 && f_hi < 0.0)) {
    std::ostringstream msg;
    msg << "synthesize_barrier: FOV offset root-find failed; pose value at eps=-10 is "
        << f_lo + target << ", at eps=10 is " << f_hi + target
        << " (an obstacle may be closer than the margin)";
    throw SynthesisError(msg.str());
  }
  double eps = 0.0;
  for (int it = 0; it < 200; ++it) {
    eps = 0.5 * (lo + hi);
    const double f_mid = pose_value(eps);
    if (std::abs(f_mid) < 1e-10) break;
    if (f_mid > 0.0)
      lo = eps;
    else
      hi = eps;
  }
  b.region.offset = eps;
  return b;
}

}  // namespace safenav
