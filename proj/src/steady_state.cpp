#include "tlrcool/steady_state.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include "tlrcool/errors.hpp"
#include "tlrcool/stability.hpp"

namespace tlrcool {

namespace {

void require_natural(const SystemParams& params) {
  if (params.units != Units::natural)
    throw InvalidParameter(
        "steady-state solver expects natural units; convert with "
        "to_natural_units first");
}

// radiation-pressure spring constant C = hbar g0^2 / (m omega_b^2), hbar = 1
double pressure_coeff(const SystemParams& p) {
  return p.g0 * p.g0 / (p.m * p.omega_b * p.omega_b);
}

double cubic_eval(double x, double b, double c, double d) {
  return ((x + b) * x + c) * x + d;
}

void newton_polish(double& x, double b, double c, double d) {
  for (int i = 0; i < 8; ++i) {
    const double f = cubic_eval(x, b, c, d);
    const double df = (3.0 * x + 2.0 * b) * x + c;
    if (df == 0.0) return;
    const double step = f / df;
    x -= step;
    if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(x))) return;
  }
}

WorkingPoint assemble_point(const SystemParams& params,
                            std::complex<double> epsilon, double delta,
                            double delta0, DetuningMode mode) {
  WorkingPoint wp;
  wp.delta = delta;
  wp.a_mean = cavity_amplitude(epsilon, params.kappa, delta);
  const double abs_a = std::abs(wp.a_mean);
  wp.x_mean = params.g0 * (abs_a * abs_a + 0.5) /
              (params.m * params.omega_b * params.omega_b);
  wp.g_eff = params.g0 * abs_a;
  wp.delta0 = delta0;
  wp.mode = mode;
  wp.linearization_ok = abs_a > 10.0;
  return wp;
}

// Effective detuning of the nonlinear steady state for bare detuning delta0:
// real roots of delta = delta0 - C (|eps|^2/(kappa^2+delta^2) + 1/2).
std::vector<double> detuning_roots(const SystemParams& params, double eps2,
                                   double delta0) {
  const double c_rp = pressure_coeff(params);
  const double beta = delta0 - 0.5 * c_rp;
  const double k2 = params.kappa * params.kappa;
  return solve_cubic_real(-beta, k2, c_rp * eps2 - beta * k2);
}

}

std::complex<double> cavity_amplitude(std::complex<double> epsilon,
                                      double kappa, double delta) {
  if (!(std::isfinite(kappa) && kappa > 0))
    throw InvalidParameter("cavity_amplitude needs kappa > 0");
  return epsilon / std::complex<double>(kappa, delta);
}

WorkingPoint working_point_at_delta(const SystemParams& params,
                                    std::complex<double> epsilon,
                                    double delta) {
  params.validate();
  require_natural(params);
  WorkingPoint wp = assemble_point(params, epsilon, delta, 0.0,
                                   DetuningMode::given_delta);
  wp.delta0 = delta + params.g0 * wp.x_mean;
  return wp;
}

std::vector<double> solve_cubic_real(double b, double c, double d) {
  // depressed form t^3 + p t + q, x = t - b/3
  const double b2 = b * b;
  const double p = c - b2 / 3.0;
  const double q = (2.0 * b2 * b / 27.0) - b * c / 3.0 + d;

  std::vector<double> roots;
  const double disc = 0.25 * q * q + p * p * p / 27.0;

  if (p == 0.0 && q == 0.0) {
    roots.push_back(0.0);
  } else if (disc > 0.0) {
    // one real root; avoid cancellation by extracting the large cube root
    const double s = std::sqrt(disc);
    const double u = std::cbrt(-0.5 * q - std::copysign(s, q));
    const double t = (u == 0.0) ? std::cbrt(-q) : u - p / (3.0 * u);
    roots.push_back(t);
  } else if (disc == 0.0) {
    const double u = std::cbrt(-0.5 * q);
    roots.push_back(2.0 * u);
    roots.push_back(-u);
  } else {
    // three distinct real roots (trigonometric form, p < 0 here)
    const double r = std::sqrt(-p / 3.0);
    double arg = 1.5 * q / (p * r);
    arg = std::clamp(arg, -1.0, 1.0);
    const double theta = std::acos(arg) / 3.0;
    constexpr double two_thirds_pi = 2.0943951023931953;
    for (int k = 0; k < 3; ++k)
      roots.push_back(2.0 * r * std::cos(theta - two_thirds_pi * k));
  }

  for (double& t : roots) {
    double x = t - b / 3.0;
    newton_polish(x, b, c, d);
    t = x;
  }
  std::sort(roots.begin(), roots.end());

  // merge numerically coincident roots
  std::vector<double> unique;
  const double scale = std::max({1.0, std::abs(b), std::sqrt(std::abs(c)),
                                 std::cbrt(std::abs(d))});
  for (double r : roots)
    if (unique.empty() || std::abs(r - unique.back()) > 1e-11 * scale)
      unique.push_back(r);
  return unique;
}

WorkingPointResult solve_working_point(const SystemParams& params,
                                       const DriveParams& drive) {
  params.validate();
  require_natural(params);
  if (!std::isfinite(drive.delta0) || !std::isfinite(std::abs(drive.epsilon)))
    throw InvalidParameter("drive parameters must be finite");

  const double eps2 = std::norm(drive.epsilon);
  const std::vector<double> deltas = detuning_roots(params, eps2, drive.delta0);

  WorkingPointResult result;
  for (double delta : deltas) {
    SteadyStateRoot root;
    root.point = assemble_point(params, drive.epsilon, delta, drive.delta0,
                                DetuningMode::given_delta0);
    root.verdict = is_stable(drift_matrix(root.point, params));
    result.roots.push_back(root);
  }

  // principal root: continuation from the eps = 0 solution, marching the
  // drive power up and tracking the nearest root at every step
  const double c_rp = pressure_coeff(params);
  double track = drive.delta0 - 0.5 * c_rp;
  const int n_steps = 256;
  for (int i = 1; i <= n_steps; ++i) {
    const double s = static_cast<double>(i) / n_steps;
    const std::vector<double> rs =
        detuning_roots(params, eps2 * s * s, drive.delta0);
    double best = rs.front();
    for (double r : rs)
      if (std::abs(r - track) < std::abs(best - track)) best = r;
    track = best;
  }

  std::size_t principal = 0;
  for (std::size_t i = 1; i < result.roots.size(); ++i)
    if (std::abs(result.roots[i].point.delta - track) <
        std::abs(result.roots[principal].point.delta - track))
      principal = i;
  result.roots[principal].principal = true;
  result.principal = result.roots[principal].point;

  int stable_count = 0;
  for (const auto& r : result.roots)
    if (r.verdict == Verdict::stable) ++stable_count;
  result.multistable = stable_count > 1;
  return result;
}

WorkingPointResult solve_working_point(const SystemParams& params,
                                       const DriveInput& drive) {
  if (drive.mode == DetuningMode::given_delta) {
    WorkingPointResult result;
    result.principal =
        working_point_at_delta(params, drive.epsilon, drive.detuning);
    SteadyStateRoot root;
    root.point = result.principal;
    root.verdict = is_stable(drift_matrix(root.point, params));
    root.principal = true;
    result.roots.push_back(root);
    result.multistable = false;
    return result;
  }
  return solve_working_point(params,
                             DriveParams{drive.epsilon, drive.detuning});
}

}
