#include "imexrk/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <random>
#include <stdexcept>

namespace imexrk {
namespace {

bool is_integer_ratio(double a, double b) {
  const double r = a / b;
  return std::abs(r - std::round(r)) <= 1e-9 * std::max(1.0, r);
}

SpectralField integrate(const ButcherPaird& pair, const ModelSpec& spec, const PeriodicGrid& grid,
                        const SpectralField& u0, double tau, double T) {
  const StepPlan plan = StepPlan::make(pair, spec, grid, tau);
  const long steps = static_cast<long>(std::llround(T / tau));
  SpectralField u = u0;
  for (long n = 0; n < steps; ++n) u = imex_step(plan, u);
  return u;
}

}  // namespace

SpectralField random_initial_field(const PeriodicGrid& grid, std::uint64_t seed, int max_mode, double amplitude) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  SpectralField u = SpectralField::zeros(grid);
  for (Eigen::Index i = 0; i < u.values.size(); ++i) u.values(i) = uniform(rng);

  Spectrum u_hat = forward(u);
  const Eigen::ArrayXi k = wavenumber_index_max(grid);
  for (Eigen::Index m = 0; m < u_hat.size(); ++m)
    if (k(m) > max_mode) u_hat(m) = 0.0;
  u = inverse(grid, u_hat);
  const double peak = u.values.abs().maxCoeff();
  if (peak > 0) u.values *= amplitude / peak;
  return u;
}

Stabilization default_stabilization(const StabilityReport<double>& report) {
  if (!report.unconditional) return {};
  return {*report.alpha0, *report.beta0};
}

double fit_order(const std::vector<double>& taus, const std::vector<double>& errors) {
  if (taus.size() != errors.size() || taus.size() < 2) throw std::invalid_argument("fit_order needs >= 2 points");
  const auto n = static_cast<double>(taus.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < taus.size(); ++i) {
    const double x = std::log(taus[i]), y = std::log(errors[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ConvergenceTable convergence_study(const ButcherPaird& pair, const ModelSpec& spec, const PeriodicGrid& grid,
                                   const SpectralField& u0, std::vector<double> taus, double T, int ref_divisor) {
  if (taus.size() < 3) throw std::invalid_argument("convergence study needs at least three time steps");
  if (ref_divisor < 1) throw std::invalid_argument("reference divisor must be positive");
  std::sort(taus.begin(), taus.end(), std::greater<>());
  for (std::size_t i = 0; i < taus.size(); ++i) {
    if (!(taus[i] > 0)) throw std::invalid_argument("time steps must be positive");
    if (i > 0 && taus[i] == taus[i - 1]) throw std::invalid_argument("time steps must be distinct");
    if (!is_integer_ratio(T, taus[i])) throw std::invalid_argument("time step does not divide the final time");
  }
  const double tau_min = taus.back();
  for (double tau : taus)
    if (!is_integer_ratio(tau, tau_min)) throw std::invalid_argument("time steps are not nested");

  ConvergenceTable table;
  table.tau_ref = tau_min / ref_divisor;

  // Members are independent; run them concurrently and collect in tau order.
  auto reference = std::async(std::launch::async, integrate, std::cref(pair), std::cref(spec), std::cref(grid),
                              std::cref(u0), table.tau_ref, T);
  std::vector<std::future<SpectralField>> members;
  for (double tau : taus)
    members.push_back(std::async(std::launch::async, integrate, std::cref(pair), std::cref(spec), std::cref(grid),
                                 std::cref(u0), tau, T));
  const SpectralField u_ref = reference.get();

  std::vector<double> errors;
  for (std::size_t i = 0; i < taus.size(); ++i) {
    SpectralField e = members[i].get();
    e.values -= u_ref.values;
    const double l2 = norm_L2(e);
    const double h1 = std::sqrt(l2 * l2 + std::pow(seminorm_H1(e), 2));
    table.rows.push_back({taus[i], h1, l2});
    errors.push_back(h1);
  }
  table.fitted_order = fit_order(taus, errors);
  return table;
}

}  // namespace imexrk
