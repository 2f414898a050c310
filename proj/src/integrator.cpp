#include "imexrk/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <complex>

namespace imexrk {
namespace {

constexpr double kDivergenceBound = 1e10;

using Complexd = std::complex<double>;

// N(v) = G f(v) + alpha G D v - beta G v, in Fourier space.
Spectrum explicit_term(const StepPlan& plan, const SpectralField& v, const Spectrum& v_hat) {
  const auto& sym = plan.symbols;
  Spectrum out = Spectrum::Zero(plan.grid.modes());
  if (plan.spec.nonlinear) {
    Spectrum f_hat = forward(nonlinearity(plan.spec, v));
    if (plan.dealias) dealias(plan.grid, f_hat);
    enforce_hermitian(plan.grid, f_hat);
    out = sym.g.multiplier.cast<Complexd>() * f_hat;
  }
  if (plan.spec.alpha != 0.0) out += plan.spec.alpha * sym.gd.multiplier.cast<Complexd>() * v_hat;
  if (plan.spec.beta != 0.0) out -= plan.spec.beta * sym.g.multiplier.cast<Complexd>() * v_hat;
  return out;
}

}  // namespace

StepPlan StepPlan::make(ButcherPaird pair, ModelSpec spec, PeriodicGrid grid, double tau, bool dealias) {
  if (!(tau > 0) || !std::isfinite(tau)) throw std::invalid_argument("time step must be positive and finite");
  if (const auto d = validate(pair); !d.empty()) throw std::invalid_argument("invalid tableau: " + d.front().message);
  StepPlan p;
  p.symbols = split_symbols(spec, grid);
  p.pair = std::move(pair);
  p.spec = spec;
  p.grid = grid;
  p.tau = tau;
  p.dealias = dealias;
  return p;
}

SpectralField imex_step(const StepPlan& plan, const SpectralField& u_n) {
  if (!(u_n.grid == plan.grid)) throw GridMismatchError();
  const int s = plan.pair.stages();
  const double tau = plan.tau;
  const auto& A = plan.pair.A;
  const auto& Ahat = plan.pair.Ahat;
  const Eigen::ArrayXcd gds = plan.symbols.gds.multiplier.cast<Complexd>();

  const Spectrum v0_hat = forward(u_n);
  std::vector<Spectrum> implicit_terms;  // L v_j, j = 1..s
  std::vector<Spectrum> explicit_terms;  // N(v_j), j = 0..s-1
  implicit_terms.reserve(static_cast<std::size_t>(s));
  explicit_terms.reserve(static_cast<std::size_t>(s));

  SpectralField v = u_n;
  Spectrum v_hat = v0_hat;
  for (int i = 0; i < s; ++i) {
    explicit_terms.push_back(explicit_term(plan, v, v_hat));
    Spectrum rhs = Spectrum::Zero(plan.grid.modes());
    for (int j = 0; j < i; ++j)
      if (A(i, j) != 0.0) rhs += A(i, j) * implicit_terms[static_cast<std::size_t>(j)];
    for (int j = 0; j <= i; ++j)
      if (Ahat(i, j) != 0.0) rhs += Ahat(i, j) * explicit_terms[static_cast<std::size_t>(j)];
    v_hat = v0_hat + tau * rhs;
    stage_solve_in_place(plan.symbols.gds, A(i, i), tau, v_hat);
    implicit_terms.push_back(gds * v_hat);

    v = inverse(plan.grid, v_hat);
    if (!v.values.allFinite() || v.values.abs().maxCoeff() > kDivergenceBound)
      throw DivergenceError(i + 1, 0);
  }
  return v;
}

long step_count(double T, double tau) {
  return static_cast<long>(std::ceil(T / tau - 1e-9));
}

Trajectory run(const StepPlan& plan, const SpectralField& u0, double T, int snapshot_stride) {
  if (!(T >= plan.tau)) throw std::invalid_argument("final time must be at least one time step");
  const long steps = step_count(T, plan.tau);
  Trajectory traj;
  traj.times.reserve(static_cast<std::size_t>(steps + 1));
  traj.energies.reserve(static_cast<std::size_t>(steps + 1));
  traj.mass.reserve(static_cast<std::size_t>(steps + 1));

  const auto record = [&](long n, const SpectralField& u) {
    traj.times.push_back(static_cast<double>(n) * plan.tau);
    traj.energies.push_back(energy(plan.spec, u));
    traj.mass.push_back(u.mean());
    if (snapshot_stride > 0 && n % snapshot_stride == 0) traj.snapshots.emplace_back(n, u);
  };

  SpectralField u = u0;
  record(0, u);
  for (long n = 1; n <= steps; ++n) {
    try {
      u = imex_step(plan, u);
    } catch (const DivergenceError& e) {
      throw DivergenceError(e.stage(), n);
    }
    record(n, u);
  }
  return traj;
}

double check_monotone(std::span<const double> energies) {
  if (energies.size() < 2) throw std::invalid_argument("check_monotone needs at least two energies");
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n + 1 < energies.size(); ++n) worst = std::max(worst, energies[n + 1] - energies[n]);
  return worst;
}

}  // namespace imexrk
