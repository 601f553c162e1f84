#pragma once

#include <Eigen/Dense>

#include "tlrcool/params.hpp"
#include "tlrcool/quadrature.hpp"
#include "tlrcool/stability.hpp"

namespace tlrcool {

// Diffusion matrix of the white-noise model over (dx, dp, dX, dY):
// diag(0, 2 gamma_b m k_B T_mech, kappa (2 n_cav + 1), kappa (2 n_cav + 1)).
Eigen::Matrix4d diffusion_matrix(const SystemParams& params,
                                 const BathOccupations& bath);

// Steady covariance V solving A V + V A^T + D = 0 (vectorized dense solve).
// Requires a strictly stable drift matrix; throws NoStationaryState
// otherwise. The residual is verified to 1e-10 * ||D||.
Eigen::Matrix4d lyapunov_covariance(const DriftMatrix& dm,
                                    const Eigen::Matrix4d& diffusion);

// det of the (x,p) and (X,Y) 2x2 blocks must be >= (hbar/2)^2 = 1/4.
bool satisfies_heisenberg(const Eigen::Matrix4d& v, double tol = 1e-9);

struct OracleBranch {
  bool applicable = false;
  std::string note;        // why not applicable, when so
  double lyapunov_var_x = 0;
  double lyapunov_var_p = 0;
  double quad_var_x = 0;
  double quad_var_p = 0;
  double max_rel_dev = 0;
  bool pass = false;
};

struct OracleComparison {
  OracleBranch white;      // white thermal noise on both sides: exact match
  OracleBranch full_coth;  // physical spectrum vs white oracle; needs
                           // k_B T / (hbar omega_b) > 100
};

// Cross-checks the spectral-integration pipeline against the Lyapunov
// solution of the same linear system. white_tol defaults to 1e-3, coth_tol
// to 1e-2 (the coth spectrum is not white, agreement is only asymptotic in
// temperature).
OracleComparison compare_with_quadrature(const WorkingPoint& wp,
                                         const SystemParams& params,
                                         const BathOccupations& bath,
                                         IntegrationOptions quad_opts = {},
                                         double white_tol = 1e-3,
                                         double coth_tol = 1e-2);

}
