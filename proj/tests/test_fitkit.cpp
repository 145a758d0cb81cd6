#include <doctest.h>

#include <cmath>
#include <vector>

#include "multicopy/analytic.hpp"
#include "multicopy/fitkit.hpp"

using namespace multicopy;
using namespace multicopy::fitkit;

TEST_CASE("power-law fit recovers exact data") {
  std::vector<FitPoint> pts;
  for (int n : log_spaced_grid(10, 1000, 25)) pts.push_back({double(n), 3.5 * std::pow(n, 0.27)});
  const auto fit = fit_power_law(pts);
  CHECK(fit.a == doctest::Approx(3.5).epsilon(1e-12));
  CHECK(fit.b == doctest::Approx(0.27).epsilon(1e-12));
  CHECK(fit.rms_log_residual < 1e-12);
  CHECK(fit.n_points == static_cast<int>(pts.size()));
}

TEST_CASE("power-law fit matches closed-form OLS on noisy data") {
  const std::vector<FitPoint> pts{{1, 2.0}, {2, 3.0}, {4, 3.5}, {8, 6.0}};
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& p : pts) {
    const double x = std::log(p.n), y = std::log(p.y);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double k = pts.size();
  const double b = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  const double ln_a = (sy - b * sx) / k;
  const auto fit = fit_power_law(pts);
  CHECK(fit.b == doctest::Approx(b).epsilon(1e-12));
  CHECK(fit.a == doctest::Approx(std::exp(ln_a)).epsilon(1e-12));
}

TEST_CASE("power-law fit rejects bad input") {
  CHECK_THROWS_AS(fit_power_law(std::vector<FitPoint>{{1, 1}}), ValidationError);
  CHECK_THROWS_AS(fit_power_law(std::vector<FitPoint>{{1, 1}, {2, 0}}), ValidationError);
  CHECK_THROWS_AS(fit_power_law(std::vector<FitPoint>{{1, 1}, {2, kInfinity}}), ValidationError);
  CHECK_THROWS_AS(fit_power_law(std::vector<FitPoint>{{2, 1}, {2, 3}}), ValidationError);
}

TEST_CASE("fit_stats selects the N window") {
  std::vector<SnrStats> stats;
  for (int n : {5, 10, 20, 40, 80}) {
    SnrStats s;
    s.n_copies = n;
    s.mean_snr = 2.0 * std::sqrt(n);
    s.gir = n < 20 ? 1.0 : 7.0 * n;
    stats.push_back(s);
  }
  CHECK(fit_stats(stats, &SnrStats::mean_snr, 1, 100).b == doctest::Approx(0.5));
  const auto g = fit_stats(stats, &SnrStats::gir, 20, 80);
  CHECK(g.b == doctest::Approx(1.0));
  CHECK(g.n_points == 3);
  CHECK_THROWS_AS(fit_stats(stats, &SnrStats::gir, 80, 20), ValidationError);
}

TEST_CASE("optimal transmittance at N = 2 is exactly one half") {
  const auto opt = optimize_transmittance(2);
  CHECK(opt.t_star == 0.5);
  CHECK_THROWS_AS(optimize_transmittance(1), ValidationError);
}

TEST_CASE("optimal transmittance agrees with a dense grid search") {
  for (int n : {3, 10, 100, 300, 1000}) {
    // 10^6 points uniform in u = 1 - t over (0, 20/n].
    const int kPoints = 1000000;
    const double u_max = std::min(1.0, 20.0 / n);
    double best_t = 0.5, best = -1.0;
    for (int k = 1; k <= kPoints; ++k) {
      const double t = 1.0 - u_max * k / kPoints;
      if (t <= 0.0) continue;
      const double v = analytic::displacement_objective(t, n);
      if (v > best) {
        best = v;
        best_t = t;
      }
    }
    const auto opt = optimize_transmittance(n);
    CAPTURE(n);
    CHECK(std::abs(opt.t_star - best_t) <= 2.0 * u_max / kPoints);
    CHECK(analytic::displacement_objective(opt.t_star, n) >= best * (1.0 - 1e-14));
    CHECK(std::abs(analytic::displacement_objective_derivative(opt.t_star, n)) < 1e-6 * n);
  }
}

TEST_CASE("optimal transmittance scaling") {
  for (int n : {100, 300, 1000}) {
    const auto opt = optimize_transmittance(n);
    const double k = (1.0 - opt.t_star) * n;
    CHECK(k > 2.1);
    CHECK(k < 2.7);
  }
  const auto big = optimize_transmittance(1000);
  CHECK(big.displacement_ratio > 0.89);
  CHECK(big.displacement_ratio < 0.92);
  CHECK(optimize_transmittance(100).displacement_ratio > big.displacement_ratio);
}

TEST_CASE("optimum dominates a uniform grid for powers of two") {
  for (int n = 2; n <= 1024; n *= 2) {
    const double best = analytic::displacement_objective(optimize_transmittance(n).t_star, n);
    for (int k = 1; k < 10000; ++k) {
      const double v = analytic::displacement_objective(k / 10000.0, n);
      if (v > best * (1.0 + 1e-15)) {
        FAIL_CHECK("grid point beats optimum at n=" << n << " t=" << k / 10000.0);
        break;
      }
    }
  }
}

TEST_CASE("log_spaced_grid") {
  const auto g = log_spaced_grid(10, 1000, 25);
  CHECK(g.front() == 10);
  CHECK(g.back() == 1000);
  for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] > g[i - 1]);
  CHECK(log_spaced_grid(2, 4, 10) == std::vector<int>{2, 3, 4});
  CHECK_THROWS_AS(log_spaced_grid(10, 5, 3), ValidationError);
  CHECK_THROWS_AS(log_spaced_grid(1, 5, 1), ValidationError);
}
