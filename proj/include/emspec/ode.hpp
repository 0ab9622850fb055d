// Adaptive Dormand-Prince 5(4) integrator over complex state vectors,
// with the usual embedded error estimate, PI-free step control, and FSAL
// reuse. The derivative callback sees only the state (the systems here are
// autonomous in the rotating frame); the monitor runs after every accepted
// step and can stop the integration early.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

namespace emspec {

struct Rk45Options {
  double rtol = 1e-9;
  double atol = 1e-12;
  double max_step = 0;  // 0 = unlimited
};

struct Rk45Stats {
  long accepted = 0;
  long rejected = 0;
};

// F:       void(const std::vector<cdouble>& y, std::vector<cdouble>& dydt)
// Monitor: bool(double t, const std::vector<cdouble>& y,
//               const std::vector<cdouble>& dydt)   -- true means stop
// Returns the time actually reached (== t_end unless the monitor stopped
// the run or the step size underflowed).
template <class F, class Monitor>
double rk45_integrate(F&& f, std::vector<std::complex<double>>& y, double t0, double t_end,
                      const Rk45Options& opt, Monitor&& monitor, Rk45Stats* stats = nullptr) {
  using cvec = std::vector<std::complex<double>>;
  const std::size_t n = y.size();

  // Dormand-Prince coefficients.
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  // 5th-order minus 4th-order weights (error estimate).
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  cvec k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n);

  auto scaled_error = [&](const cvec& ya, const cvec& yb) {
    double acc = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::complex<double> err = e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                       e6 * k6[i] + e7 * k7[i];
      const double sc = opt.atol + opt.rtol * std::max(std::abs(ya[i]), std::abs(yb[i]));
      const double r = std::abs(err) / sc;
      acc += r * r;
    }
    return n ? std::sqrt(acc / static_cast<double>(n)) : 0.0;
  };

  double t = t0;
  f(y, k1);
  if (monitor(t, y, k1)) return t;

  // Initial step from the usual d0/d1 heuristic.
  double h;
  {
    double d0 = 0, d1 = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double sc = opt.atol + opt.rtol * std::abs(y[i]);
      const double r0 = std::abs(y[i]) / sc, r1 = std::abs(k1[i]) / sc;
      d0 += r0 * r0;
      d1 += r1 * r1;
    }
    d0 = std::sqrt(d0);
    d1 = std::sqrt(d1);
    h = (d1 > 1e-300) ? 0.01 * d0 / d1 : 1e-6 * (t_end - t0);
    if (h <= 0 || !std::isfinite(h)) h = 1e-6 * (t_end - t0);
    h = std::min(h, t_end - t0);
  }
  if (opt.max_step > 0) h = std::min(h, opt.max_step);

  const double h_floor = 1e-14 * std::max(std::abs(t_end - t0), 1.0);
  while (t < t_end) {
    h = std::min(h, t_end - t);
    if (h < h_floor) break;  // underflow; caller sees t < t_end

    for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * (a21 * k1[i]);
    f(ytmp, k2);
    for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    f(ytmp, k3);
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    f(ytmp, k4);
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    f(ytmp, k5);
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    f(ytmp, k6);
    for (std::size_t i = 0; i < n; ++i)
      ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    f(ynew, k7);  // FSAL

    for (std::size_t i = 0; i < n; ++i) {
      // reuse k-slots to form the error with the step factored in
      k1[i] *= h; k3[i] *= h; k4[i] *= h; k5[i] *= h; k6[i] *= h; k7[i] *= h;
    }
    const double err = scaled_error(y, ynew);
    for (std::size_t i = 0; i < n; ++i) {
      k1[i] /= h; k3[i] /= h; k4[i] /= h; k5[i] /= h; k6[i] /= h; k7[i] /= h;
    }

    if (err <= 1.0) {
      t += h;
      y.swap(ynew);
      k1.swap(k7);
      if (stats) ++stats->accepted;
      if (monitor(t, y, k1)) return t;
      const double fac = std::clamp(0.9 * std::pow(std::max(err, 1e-10), -0.2), 0.2, 5.0);
      h *= fac;
    } else {
      if (stats) ++stats->rejected;
      h *= std::max(0.9 * std::pow(err, -0.2), 0.2);
    }
    if (opt.max_step > 0) h = std::min(h, opt.max_step);
  }
  return t;
}

}  // namespace emspec
