#include "tlrcool/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>

#include "tlrcool/errors.hpp"

namespace tlrcool {

namespace {

// 15-point Kronrod extension of 7-point Gauss (QUADPACK qk15 tables).
// xgk entries with odd index (plus the center) are the Gauss points.
constexpr double xgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double wgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double wg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a = 0, b = 0;
  double val = 0, err = 0;
  int annulus = -1; // -1 = core
  bool alive = true;
};

// QUADPACK-style panel estimate with the (200 e)^1.5 error sharpening.
void gk15(const std::function<double(double)>& f, Panel& p) {
  const double c = 0.5 * (p.a + p.b);
  const double h = 0.5 * (p.b - p.a);
  const double fc = f(c);
  double resk = wgk[7] * fc;
  double resg = wg[3] * fc;
  double resabs = std::abs(resk);
  double fv1[7], fv2[7];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * xgk[j];
    fv1[j] = f(c - dx);
    fv2[j] = f(c + dx);
    const double sum = fv1[j] + fv2[j];
    resk += wgk[j] * sum;
    resabs += wgk[j] * (std::abs(fv1[j]) + std::abs(fv2[j]));
    if (j % 2 == 1) resg += wg[j / 2] * sum;
  }
  const double reskh = 0.5 * resk;
  double resasc = wgk[7] * std::abs(fc - reskh);
  for (int j = 0; j < 7; ++j)
    resasc += wgk[j] * (std::abs(fv1[j] - reskh) + std::abs(fv2[j] - reskh));
  resasc *= h;
  resabs *= h;

  p.val = resk * h;
  double err = std::abs((resk - resg) * h);
  if (resasc != 0.0 && err != 0.0)
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  const double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps))
    err = std::max(err, 50.0 * eps * resabs);
  p.err = err;
}

struct Workspace {
  std::vector<Panel> panels;
  // max-heap over (error snapshot, index); stale entries skipped on pop
  std::priority_queue<std::pair<double, std::size_t>> heap;
  double total_val = 0;
  double total_err = 0;
  long n_eval = 0;
  int alive_panels = 0;

  void add(const std::function<double(double)>& f, double a, double b,
           int annulus) {
    Panel p;
    p.a = a;
    p.b = b;
    p.annulus = annulus;
    gk15(f, p);
    n_eval += 15;
    total_val += p.val;
    total_err += p.err;
    panels.push_back(p);
    heap.emplace(p.err, panels.size() - 1);
    ++alive_panels;
  }

  // Splits the worst refinable panel; false if none is refinable.
  bool refine_worst(const std::function<double(double)>& f) {
    while (!heap.empty()) {
      auto [err, idx] = heap.top();
      heap.pop();
      Panel& p = panels[idx];
      if (!p.alive || err != p.err) continue;
      const double mid = 0.5 * (p.a + p.b);
      const double width_floor =
          64.0 * std::numeric_limits<double>::epsilon() *
          std::max({std::abs(p.a), std::abs(p.b), 1e-300});
      if (p.b - p.a <= width_floor) continue; // cannot resolve further
      p.alive = false;
      --alive_panels;
      total_val -= p.val;
      total_err -= p.err;
      const double a = p.a, b = p.b;
      const int ann = p.annulus;
      add(f, a, mid, ann);
      add(f, mid, b, ann);
      return true;
    }
    return false;
  }

  double annulus_value(int annulus) const {
    double v = 0;
    for (const Panel& p : panels)
      if (p.alive && p.annulus == annulus) v += p.val;
    return v;
  }
};

}

PeakSet locate_peaks(const WorkingPoint& wp, const SystemParams& params) {
  params.validate();
  const double wb = params.omega_b;
  PeakSet out;

  // mechanical resonance: fixed point omega^2 = omega_b_eff^2(omega)
  double x = wb;
  bool converged = false;
  for (int it = 0; it < 50; ++it) {
    const double s = omega_b_eff_sq(x, wp, params);
    if (!(std::isfinite(s) && s > 0)) break;
    const double xn = std::sqrt(s);
    const bool done = std::abs(xn - x) <= 1e-10 * wb;
    x = xn;
    if (done) {
      converged = true;
      break;
    }
  }

  const double cav_center = std::hypot(params.kappa, wp.delta);

  if (converged) {
    const double w = std::max(std::abs(gamma_b_eff(x, wp, params)), 1e-12 * wb);
    out.peaks.push_back({x, w});
    out.peaks.push_back({-x, w});
  } else {
    // dense |chi_eff| scan, bracket every local maximum
    out.used_fallback = true;
    const double hi = 3.0 * std::max(wb, cav_center + 3.0 * params.kappa);
    const int n = 4000;
    std::vector<double> mag(n);
    std::vector<double> om(n);
    for (int i = 0; i < n; ++i) {
      om[i] = hi * (i + 1) / n;
      try {
        mag[i] = std::abs(chi_eff(om[i], wp, params));
      } catch (const SingularSusceptibility&) {
        mag[i] = std::numeric_limits<double>::infinity();
      }
    }
    for (int i = 1; i + 1 < n; ++i) {
      if (mag[i] >= mag[i - 1] && mag[i] > mag[i + 1]) {
        const double w =
            std::max(std::abs(gamma_b_eff(om[i], wp, params)), 1e-12 * wb);
        out.peaks.push_back({om[i], w});
        out.peaks.push_back({-om[i], w});
      }
    }
    if (out.peaks.empty()) {
      out.peaks.push_back({wb, std::max(params.gamma_b, 1e-12 * wb)});
      out.peaks.push_back({-wb, std::max(params.gamma_b, 1e-12 * wb)});
    }
  }

  out.peaks.push_back({cav_center, params.kappa});
  out.peaks.push_back({-cav_center, params.kappa});
  return out;
}

QuadratureResult integrate_spectrum(const std::function<double(double)>& f,
                                    const std::vector<Peak>& peaks,
                                    const IntegrationOptions& opts) {
  if (!(opts.rel_tol > 0) || !(opts.eval_budget > 0))
    throw InvalidParameter("integration tolerance and budget must be positive");

  double start = opts.start_scale;
  if (start <= 0) {
    for (const Peak& p : peaks)
      start = std::max(start, std::abs(p.center) + std::abs(p.width));
    start = 10.0 * std::max(start, 0.1);
  }
  const bool has_cutoff =
      opts.omega_cutoff > 0 && std::isfinite(opts.omega_cutoff);
  if (has_cutoff) start = std::min(start, opts.omega_cutoff);

  // breakpoints: domain edges, zero, every peak center +- {1,3,10,30} widths
  std::vector<double> pts{-start, 0.0, start};
  constexpr double rings[] = {1.0, 3.0, 10.0, 30.0};
  for (const Peak& p : peaks) {
    if (std::abs(p.center) < start) pts.push_back(p.center);
    for (double r : rings) {
      for (double sgn : {-1.0, 1.0}) {
        const double x = p.center + sgn * r * p.width;
        if (std::abs(x) < start) pts.push_back(x);
      }
    }
  }
  std::sort(pts.begin(), pts.end());
  std::vector<double> uniq;
  for (double x : pts)
    if (uniq.empty() || x - uniq.back() > 1e-14 * start) uniq.push_back(x);
  if (uniq.back() < start) uniq.push_back(start);

  Workspace ws;
  for (std::size_t i = 0; i + 1 < uniq.size(); ++i)
    ws.add(f, uniq[i], uniq[i + 1], -1);

  const double floor = std::max(opts.value_floor, 0.0);
  auto target = [&]() {
    return opts.rel_tol * std::max(std::abs(ws.total_val), floor);
  };
  bool budget_out = false;
  auto refine_to_target = [&]() {
    while (ws.total_err > 0.5 * target()) {
      if (ws.n_eval + 30 > opts.eval_budget) {
        budget_out = true;
        return;
      }
      if (!ws.refine_worst(f)) return; // resolution floor reached
    }
  };

  refine_to_target();

  // grow the domain outward until the tail is negligible or the hard
  // cutoff (model-validity edge) is reached
  double tail_estimate = 0;
  bool growth_exhausted = false;
  if (!budget_out) {
    double edge = start;
    bool domain_complete = has_cutoff && edge >= opts.omega_cutoff;
    int step = 0;
    while (!domain_complete) {
      if (step++ >= opts.max_growth_steps) {
        growth_exhausted = true;
        break;
      }
      double next = edge * opts.growth_factor;
      if (has_cutoff) next = std::min(next, opts.omega_cutoff);
      const double mid = std::sqrt(edge * next);
      ws.add(f, edge, mid, step);
      ws.add(f, mid, next, step);
      ws.add(f, -mid, -edge, step);
      ws.add(f, -next, -mid, step);
      refine_to_target();
      const double contribution = std::abs(ws.annulus_value(step));
      if (budget_out) break;
      if (has_cutoff && next >= opts.omega_cutoff) {
        // truncation at the cutoff defines the integral; no tail error
        tail_estimate = 0;
        break;
      }
      if (contribution < target()) {
        // geometric tail bound, exact for 1/omega^2 decay
        tail_estimate = contribution / (opts.growth_factor - 1.0);
        break;
      }
      edge = next;
    }
    if (growth_exhausted && ws.panels.size() > 0) {
      // divergent or far-from-converged tail: surface it in the error
      tail_estimate = std::abs(ws.annulus_value(step - 1));
    }
  }

  if (!budget_out) refine_to_target();

  QuadratureResult res;
  res.value = ws.total_val;
  res.abs_error_estimate = ws.total_err + tail_estimate;
  res.n_evaluations = ws.n_eval;
  res.panels_used = ws.alive_panels;
  res.converged = !budget_out && !growth_exhausted &&
                  res.abs_error_estimate <=
                      opts.rel_tol * std::max(std::abs(res.value), floor);
  return res;
}

VariancePair mechanical_variances(const WorkingPoint& wp,
                                  const SystemParams& params, double n_cav,
                                  ThermalNoiseModel model,
                                  IntegrationOptions opts) {
  params.validate();
  if (params.units != Units::natural)
    throw InvalidParameter("mechanical_variances expects natural units");

  VariancePair out;
  out.peaks = locate_peaks(wp, params);

  if (opts.omega_cutoff <= 0) opts.omega_cutoff = params.omega_a;
  if (opts.start_scale <= 0)
    opts.start_scale =
        10.0 * std::max({params.omega_b, std::abs(wp.delta), params.kappa});

  constexpr double two_pi = 2.0 * std::numbers::pi;
  const double zp_x = 0.5 / (params.m * params.omega_b); // hbar/(2 m omega_b)
  const double zp_p = 0.5 * params.m * params.omega_b;

  IntegrationOptions ox = opts;
  ox.value_floor = two_pi * zp_x;
  QuadratureResult rx = integrate_spectrum(
      [&](double w) { return s_x(w, wp, params, n_cav, model); },
      out.peaks.peaks, ox);

  IntegrationOptions op = opts;
  op.value_floor = two_pi * zp_p;
  QuadratureResult rp = integrate_spectrum(
      [&](double w) { return s_p(w, wp, params, n_cav, model); },
      out.peaks.peaks, op);

  rx.value /= two_pi;
  rx.abs_error_estimate /= two_pi;
  rp.value /= two_pi;
  rp.abs_error_estimate /= two_pi;
  out.var_x = rx;
  out.var_p = rp;
  return out;
}

}
