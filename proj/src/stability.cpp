#include "tlrcool/stability.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "tlrcool/errors.hpp"

namespace tlrcool {

namespace {

constexpr double num_eps = 1e-12; // relative numerical zero band

// Faddeev-LeVerrier coefficients of det(sI - M), ascending in s.
std::array<double, 5> char_poly_of(const Eigen::Matrix4d& m) {
  std::array<double, 5> c{};
  c[4] = 1.0;
  Eigen::Matrix4d n = m;
  c[3] = -n.trace();
  n = m * (n + c[3] * Eigen::Matrix4d::Identity());
  c[2] = -n.trace() / 2.0;
  n = m * (n + c[2] * Eigen::Matrix4d::Identity());
  c[1] = -n.trace() / 3.0;
  n = m * (n + c[1] * Eigen::Matrix4d::Identity());
  c[0] = -n.trace() / 4.0;
  return c;
}

}

DriftMatrix drift_matrix(const WorkingPoint& wp, const SystemParams& params) {
  params.validate();
  const double m = params.m;
  const double wb = params.omega_b;
  const double gb = params.gamma_b;
  const double kap = params.kappa;
  const double g0 = params.g0;
  const double delta = wp.delta;
  const double ar = wp.a_mean.real();
  const double ai = wp.a_mean.imag();
  const double s2 = std::sqrt(2.0);

  DriftMatrix dm;
  Eigen::Matrix4d& a = dm.a;
  a(0, 0) = 0.0;          a(0, 1) = 1.0 / m; a(0, 2) = 0.0;          a(0, 3) = 0.0;
  a(1, 0) = -m * wb * wb; a(1, 1) = -gb;     a(1, 2) = s2 * g0 * ar; a(1, 3) = s2 * g0 * ai;
  a(2, 0) = -s2 * g0 * ai; a(2, 1) = 0.0;    a(2, 2) = -kap;         a(2, 3) = delta;
  a(3, 0) = s2 * g0 * ar;  a(3, 1) = 0.0;    a(3, 2) = -delta;       a(3, 3) = -kap;

  dm.char_poly = char_poly_of(a);
  dm.char_poly_scale = char_poly_of(a.cwiseAbs());
  for (double& s : dm.char_poly_scale) s = std::abs(s);
  return dm;
}

double max_real_eigenvalue(const DriftMatrix& dm) {
  Eigen::EigenSolver<Eigen::Matrix4d> es(dm.a, false);
  return es.eigenvalues().real().maxCoeff();
}

Verdict verdict_from_eigenvalues(const DriftMatrix& dm, double tol_margin) {
  const double margin = max_real_eigenvalue(dm);
  if (margin < -tol_margin) return Verdict::stable;
  if (margin > tol_margin) return Verdict::unstable;
  return Verdict::marginal;
}

Verdict verdict_from_routh_hurwitz(const DriftMatrix& dm, double tol_margin) {
  const double a3 = dm.char_poly[3];
  const double a2 = dm.char_poly[2];
  const double a1 = dm.char_poly[1];
  const double a0 = dm.char_poly[0];

  // Numerical zero bands: roundoff scale from the |A| recursion plus the
  // coefficient shift a tol_margin eigenvalue displacement would cause.
  const double s3 = dm.char_poly_scale[3];
  const double s2 = dm.char_poly_scale[2];
  const double s1 = dm.char_poly_scale[1];
  const double s0 = dm.char_poly_scale[0];
  const double band3 = num_eps * s3 + 4.0 * tol_margin;
  const double band0 = num_eps * s0 + tol_margin * (std::abs(a1) + s1 * num_eps);

  bool marginal = false;
  auto classify = [&marginal](double entry, double band) -> bool {
    if (std::abs(entry) <= band) {
      marginal = true;
      return true; // undecided, keep scanning
    }
    return entry > 0.0;
  };

  bool positive = true;
  positive &= classify(a3, band3);

  const double a3_safe = std::max(std::abs(a3), band3);
  const double b1 = (a3 * a2 - a1) / a3;
  const double b1_scale = (std::abs(a3 * a2) + std::abs(a1)) / a3_safe +
                          num_eps * (s3 * std::abs(a2) + s2 * std::abs(a3));
  const double band_b1 = num_eps * b1_scale + 3.0 * tol_margin * std::abs(a3);
  positive &= classify(b1, band_b1);

  const double b1_safe = std::max(std::abs(b1), band_b1);
  const double c1 = (b1 * a1 - a3 * a0) / b1;
  const double c1_scale =
      (std::abs(b1 * a1) + std::abs(a3 * a0)) / b1_safe + num_eps * s1;
  const double band_c1 =
      num_eps * c1_scale + tol_margin * (std::abs(a2) + std::abs(a1));
  positive &= classify(c1, band_c1);

  positive &= classify(a0, band0);

  if (marginal) return Verdict::marginal;
  return positive ? Verdict::stable : Verdict::unstable;
}

Verdict is_stable(const DriftMatrix& dm, double tol_margin) {
  const Verdict ve = verdict_from_eigenvalues(dm, tol_margin);
  const Verdict vr = verdict_from_routh_hurwitz(dm, tol_margin);
  if (ve == Verdict::marginal || vr == Verdict::marginal)
    return Verdict::marginal;
  if (ve != vr)
    throw MethodDisagreement(
        std::string("stability routes disagree: eigenvalues say ") +
        to_string(ve) + ", Routh-Hurwitz says " + to_string(vr));
  return ve;
}

}
