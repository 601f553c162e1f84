#include "tlrcool/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "tlrcool/errors.hpp"

namespace tlrcool {

std::vector<double> SweepAxis::values() const {
  if (count < 1)
    throw ConfigError("sweep axis '" + name + "': count must be >= 1");
  std::vector<double> v(static_cast<std::size_t>(count));
  if (count == 1) {
    v[0] = min;
    return v;
  }
  if (log) {
    if (min <= 0 || max <= 0)
      throw ConfigError("sweep axis '" + name +
                        "': log spacing needs positive bounds");
    const double l0 = std::log(min), l1 = std::log(max);
    for (int i = 0; i < count; ++i)
      v[static_cast<std::size_t>(i)] = std::exp(l0 + (l1 - l0) * i / (count - 1));
  } else {
    for (int i = 0; i < count; ++i)
      v[static_cast<std::size_t>(i)] = min + (max - min) * i / (count - 1);
  }
  v.front() = min; // keep endpoints exact
  v.back() = max;
  return v;
}

void apply_parameter(const std::string& name, double value, ModelInputs& model) {
  if (name == "delta") {
    model.drive.mode = DetuningMode::given_delta;
    model.drive.detuning = value;
  } else if (name == "delta0") {
    model.drive.mode = DetuningMode::given_delta0;
    model.drive.detuning = value;
  } else if (name == "kappa") {
    model.system.kappa = value;
  } else if (name == "temperature") {
    model.system.temperature = value;
  } else if (name == "gamma_b") {
    model.system.gamma_b = value;
  } else if (name == "q_b") {
    if (value <= 0) throw ConfigError("q_b must be positive");
    model.system.gamma_b = model.system.omega_b / value;
  } else if (name == "epsilon") {
    // scalar sweeps set the magnitude; any drive phase is kept
    const double mag = std::abs(model.drive.epsilon);
    model.drive.epsilon = mag > 0 ? model.drive.epsilon * (value / mag)
                                  : std::complex<double>(value, 0.0);
  } else if (name == "g0") {
    model.system.g0 = value;
  } else if (name == "n_cav") {
    if (value < 0) throw ConfigError("n_cav must be non-negative");
    model.system.t_cav = temperature_for_occupation(model.system.omega_a, value,
                                                    model.system.units);
  } else {
    throw ConfigError("unknown sweep parameter '" + name + "'");
  }
}

SweepTable run_sweep(const ModelInputs& base, const SweepSpec& spec,
                     const EngineOptions& opts, int workers) {
  if (spec.axes.empty() || spec.axes.size() > 2)
    throw ConfigError("sweep needs one or two axes, got " +
                      std::to_string(spec.axes.size()));
  const std::vector<double> v0 = spec.axes[0].values();
  const std::vector<double> v1 = spec.axes.size() == 2
                                     ? spec.axes[1].values()
                                     : std::vector<double>{0.0};
  const bool two_d = spec.axes.size() == 2;

  SweepTable table;
  table.spec = spec;
  table.cells.resize(v0.size() * v1.size());

  auto eval_cell = [&](std::size_t idx) {
    const std::size_t i = idx / v1.size();
    const std::size_t j = idx % v1.size();
    SweepCell& cell = table.cells[idx];
    cell.coord0 = v0[i];
    cell.coord1 = two_d ? v1[j] : 0.0;
    try {
      ModelInputs model = base;
      apply_parameter(spec.axes[0].name, v0[i], model);
      if (two_d) apply_parameter(spec.axes[1].name, v1[j], model);
      cell.report = evaluate_cooling(model.system, model.drive, opts);
    } catch (const std::exception& e) {
      cell.error = e.what();
    }
  };

  const std::size_t n = table.cells.size();
  std::size_t nw = workers > 0 ? static_cast<std::size_t>(workers)
                               : std::max(1u, std::thread::hardware_concurrency());
  nw = std::min(nw, n);
  if (nw <= 1) {
    for (std::size_t idx = 0; idx < n; ++idx) eval_cell(idx);
    return table;
  }

  // every cell slot is preallocated and claimed through one shared counter,
  // so the table contents are identical for any worker count
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(nw);
  for (std::size_t w = 0; w < nw; ++w)
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t idx = next.fetch_add(1, std::memory_order_relaxed);
        if (idx >= n) return;
        eval_cell(idx);
      }
    });
  for (auto& t : pool) t.join();
  return table;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Objective {
  const ModelInputs& base;
  const OptimizeSpec& spec;
  const EngineOptions& opts;
  long evals = 0;

  // best feasible point seen so far; ties resolve to the lexicographically
  // smallest coordinates so the result is deterministic
  std::vector<double> best_x;
  double best_f = kInf;

  double operator()(const std::vector<double>& x, CoolingReport* out = nullptr) {
    ++evals;
    double f = kInf;
    try {
      ModelInputs model = base;
      for (std::size_t k = 0; k < spec.free.size(); ++k)
        apply_parameter(spec.free[k], x[k], model);
      const CoolingReport r = evaluate_cooling(model.system, model.drive, opts);
      const bool feasible =
          (r.status == PointStatus::ok || r.status == PointStatus::unconverged) &&
          (!spec.require_weak_coupling || r.flags.weak_coupling);
      const double obj = spec.use_approx_objective ? r.n_bf_approx : r.n_bf_exact;
      if (feasible && std::isfinite(obj)) {
        f = obj;
        if (out) *out = r;
      }
    } catch (const std::exception&) {
      // out-of-domain point: infeasible, not fatal
    }
    if (f < best_f ||
        (f == best_f && f < kInf &&
         std::lexicographical_compare(x.begin(), x.end(), best_x.begin(),
                                      best_x.end()))) {
      best_f = f;
      best_x = x;
    }
    return f;
  }
};

// golden-section minimisation of f over [a, b] down to bracket width tol;
// plateaus and infeasible stretches resolve toward the lower end
template <typename F>
double golden_min(F&& f, double a, double b, double tol) {
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - gr * (b - a);
  double d = a + gr * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = f(d);
    }
  }
  return fc <= fd ? c : d;
}

} // namespace

OptimizeResult optimize(const ModelInputs& base, const OptimizeSpec& spec,
                        const EngineOptions& opts) {
  const std::size_t dim = spec.free.size();
  if (dim < 1 || dim > 2)
    throw ConfigError("optimize needs one or two free parameters");
  if (spec.bounds.size() != dim)
    throw ConfigError("optimize needs one bounds pair per free parameter");
  for (std::size_t k = 0; k < dim; ++k)
    if (!(spec.bounds[k].first < spec.bounds[k].second))
      throw ConfigError("optimize bounds for '" + spec.free[k] +
                        "' must satisfy min < max");
  if (spec.coarse_count < 3) throw ConfigError("optimize coarse_count must be >= 3");
  if (!(spec.param_tol > 0)) throw ConfigError("optimize param_tol must be positive");
  for (std::size_t k = 0; k < dim; ++k) {
    // reject unknown parameter names here, not as "nothing was feasible"
    ModelInputs scratch = base;
    apply_parameter(spec.free[k], spec.bounds[k].first, scratch);
  }

  Objective obj{base, spec, opts};

  std::vector<std::vector<double>> grid(dim);
  for (std::size_t k = 0; k < dim; ++k) {
    SweepAxis ax{spec.free[k], spec.bounds[k].first, spec.bounds[k].second,
                 spec.coarse_count, false};
    grid[k] = ax.values();
  }

  if (dim == 1) {
    for (double x : grid[0]) obj({x});
  } else {
    for (double x0 : grid[0])
      for (double x1 : grid[1]) obj({x0, x1});
  }
  if (!(obj.best_f < kInf))
    throw NoFeasiblePoint("no stable point satisfies the constraints within "
                          "the optimizer bounds");

  auto bracket = [&](std::size_t k, double center) {
    const double cell = (spec.bounds[k].second - spec.bounds[k].first) /
                        (spec.coarse_count - 1);
    const double lo = std::max(spec.bounds[k].first, center - cell);
    const double hi = std::min(spec.bounds[k].second, center + cell);
    return std::pair<double, double>{lo, hi};
  };

  std::vector<double> x = obj.best_x;
  if (dim == 1) {
    const auto [lo, hi] = bracket(0, x[0]);
    golden_min([&](double t) { return obj({t}); }, lo, hi, spec.param_tol);
  } else {
    for (int round = 0; round < 24; ++round) {
      double moved = 0;
      for (std::size_t k = 0; k < dim; ++k) {
        const auto [lo, hi] = bracket(k, x[k]);
        std::vector<double> probe = x;
        const double xk = golden_min(
            [&](double t) {
              probe[k] = t;
              return obj(probe);
            },
            lo, hi, spec.param_tol);
        moved = std::max(moved, std::abs(xk - x[k]));
        x[k] = xk;
        if (obj.best_f < kInf) x = obj.best_x; // restart descent from the best
      }
      if (moved < spec.param_tol) break;
    }
  }

  OptimizeResult res;
  res.argmin = obj.best_x;
  res.objective = obj.best_f;
  res.evaluations = obj.evals;
  const double check = obj(obj.best_x, &res.report);
  res.evaluations = obj.evals;
  if (!(check < kInf))
    throw NoFeasiblePoint("optimum re-evaluation became infeasible");
  res.objective = std::min(res.objective, check);
  return res;
}

}
