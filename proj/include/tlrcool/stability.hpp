#pragma once

#include <array>

#include <Eigen/Dense>

#include "tlrcool/params.hpp"
#include "tlrcool/steady_state.hpp"
#include "tlrcool/verdict.hpp"

namespace tlrcool {

// Drift matrix of the linearised fluctuation dynamics over
// (dx, dp, dX, dY) with dX = (da + da^+)/sqrt(2), dY = (da - da^+)/(i sqrt2):
//
//   d/dt dx =  dp/m
//   d/dt dp = -m wb^2 dx - gamma_b dp + sqrt2 hbar g0 (Re<a> dX + Im<a> dY)
//   d/dt dX = -kappa dX + delta dY - sqrt2 g0 Im<a> dx
//   d/dt dY = -delta dX - kappa dY + sqrt2 g0 Re<a> dx
struct DriftMatrix {
  Eigen::Matrix4d a = Eigen::Matrix4d::Zero();
  // char_poly[k] multiplies s^k in det(sI - A); char_poly[4] == 1.
  std::array<double, 5> char_poly{};
  // Same recursion run on |A| entrywise: magnitude scale per coefficient,
  // used to tell "numerically zero" from "genuinely signed".
  std::array<double, 5> char_poly_scale{};
};

DriftMatrix drift_matrix(const WorkingPoint& wp, const SystemParams& params);

double max_real_eigenvalue(const DriftMatrix& dm);

// Hurwitz test on the eigenvalues: stable if every real part < -tol_margin,
// unstable if any > +tol_margin, marginal otherwise.
Verdict verdict_from_eigenvalues(const DriftMatrix& dm,
                                 double tol_margin = 1e-12);

// Routh-Hurwitz first-column test on the characteristic polynomial,
// independent of the eigensolver. Entries inside the numerical zero band
// give marginal.
Verdict verdict_from_routh_hurwitz(const DriftMatrix& dm,
                                   double tol_margin = 1e-12);

// Runs both routes. If either says marginal the result is marginal; if both
// are definite they must agree, otherwise throws MethodDisagreement.
Verdict is_stable(const DriftMatrix& dm, double tol_margin = 1e-12);

}
