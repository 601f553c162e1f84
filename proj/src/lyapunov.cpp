#include "tlrcool/lyapunov.hpp"

#include <cmath>

#include "tlrcool/errors.hpp"

namespace tlrcool {

Eigen::Matrix4d diffusion_matrix(const SystemParams& params,
                                 const BathOccupations& bath) {
  params.validate();
  Eigen::Matrix4d d = Eigen::Matrix4d::Zero();
  // white mechanical force noise 2 gamma_b m k_B T (k_B = 1 natural);
  // cavity quadrature input noise kappa (2 n_cav + 1)
  d(1, 1) = 2.0 * params.gamma_b * params.m * params.mech_temperature();
  d(2, 2) = params.kappa * (2.0 * bath.n_cav + 1.0);
  d(3, 3) = d(2, 2);
  return d;
}

Eigen::Matrix4d lyapunov_covariance(const DriftMatrix& dm,
                                    const Eigen::Matrix4d& diffusion) {
  if (verdict_from_eigenvalues(dm) != Verdict::stable)
    throw NoStationaryState(
        "Lyapunov equation has no positive stationary solution: drift matrix "
        "is not strictly stable");

  // vec(AV + VA^T) = (I (x) A + A (x) I) vec(V) = -vec(D)
  Eigen::Matrix<double, 16, 16> k = Eigen::Matrix<double, 16, 16>::Zero();
  const Eigen::Matrix4d& a = dm.a;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int l = 0; l < 4; ++l) {
        k(4 * j + i, 4 * j + l) += a(i, l); // I (x) A
        k(4 * j + i, 4 * l + i) += a(j, l); // A (x) I
      }
  Eigen::Matrix<double, 16, 1> rhs;
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < 4; ++i) rhs(4 * j + i) = -diffusion(i, j);

  const Eigen::Matrix<double, 16, 1> vec = k.fullPivLu().solve(rhs);
  Eigen::Matrix4d v;
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < 4; ++i) v(i, j) = vec(4 * j + i);
  v = 0.5 * (v + v.transpose()).eval(); // symmetrise roundoff

  const double resid = (a * v + v * a.transpose() + diffusion).norm();
  if (resid > 1e-10 * std::max(diffusion.norm(), 1e-300) + 1e-13 * v.norm())
    throw NoStationaryState("Lyapunov solve residual too large: " +
                            std::to_string(resid));
  return v;
}

bool satisfies_heisenberg(const Eigen::Matrix4d& v, double tol) {
  const double det_xp = v(0, 0) * v(1, 1) - v(0, 1) * v(0, 1);
  const double det_xy = v(2, 2) * v(3, 3) - v(2, 3) * v(2, 3);
  return det_xp >= 0.25 - tol && det_xy >= 0.25 - tol;
}

OracleComparison compare_with_quadrature(const WorkingPoint& wp,
                                         const SystemParams& params,
                                         const BathOccupations& bath,
                                         IntegrationOptions quad_opts,
                                         double white_tol, double coth_tol) {
  params.validate();
  OracleComparison out;

  DriftMatrix dm = drift_matrix(wp, params);
  if (verdict_from_eigenvalues(dm) != Verdict::stable) {
    out.white.note = "working point not strictly stable";
    out.full_coth.note = out.white.note;
    return out;
  }
  const Eigen::Matrix4d v = lyapunov_covariance(dm, diffusion_matrix(params, bath));

  auto fill = [&](OracleBranch& br, ThermalNoiseModel model) {
    const VariancePair vp =
        mechanical_variances(wp, params, bath.n_cav, model, quad_opts);
    br.lyapunov_var_x = v(0, 0);
    br.lyapunov_var_p = v(1, 1);
    br.quad_var_x = vp.var_x.value;
    br.quad_var_p = vp.var_p.value;
    const double dx = std::abs(br.quad_var_x - br.lyapunov_var_x) /
                      std::abs(br.lyapunov_var_x);
    const double dp = std::abs(br.quad_var_p - br.lyapunov_var_p) /
                      std::abs(br.lyapunov_var_p);
    br.max_rel_dev = std::max(dx, dp);
    br.applicable = true;
  };

  // identical white model on both sides: must match to quadrature accuracy
  fill(out.white, ThermalNoiseModel::white_classical);
  out.white.pass = out.white.max_rel_dev < white_tol;

  // physical coth spectrum vs the white oracle: only comparable deep in the
  // classical regime
  const double t_quanta = params.mech_temperature() / params.omega_b;
  if (t_quanta > 100.0) {
    fill(out.full_coth, ThermalNoiseModel::full_coth);
    out.full_coth.pass = out.full_coth.max_rel_dev < coth_tol;
  } else {
    out.full_coth.applicable = false;
    out.full_coth.note =
        "k_B T / (hbar omega_b) = " + std::to_string(t_quanta) +
        " <= 100: white-noise oracle not comparable to the quantum spectrum";
  }
  return out;
}

}
