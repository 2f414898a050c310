#pragma once

#include "imexrk/integrator.hpp"
#include "imexrk/stability.hpp"

#include <cstdint>
#include <vector>

namespace imexrk {

/// Uniform noise, low-pass filtered to modes with integer index <= max_mode,
/// rescaled so that max |u| = amplitude. Deterministic in the seed.
SpectralField random_initial_field(const PeriodicGrid& grid, std::uint64_t seed, int max_mode = 8,
                                   double amplitude = 0.9);

struct Stabilization {
  double alpha = 0;
  double beta = 0;
};

/// Certificate thresholds (alpha0, beta0) for a certified pair; zeros otherwise.
Stabilization default_stabilization(const StabilityReport<double>& report);

struct ConvergenceRow {
  double tau = 0;
  double h1_error = 0;
  double l2_error = 0;
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;  // tau strictly decreasing
  double fitted_order = 0;
  double tau_ref = 0;
};

/// Least-squares slope of log(error) against log(tau).
double fit_order(const std::vector<double>& taus, const std::vector<double>& errors);

/// Self-convergence study: each tau integrates to T and is compared with the
/// same scheme run at tau_ref = min(tau) / ref_divisor. Taus must be
/// distinct, at least three, divide T, and be integer multiples of the
/// smallest one.
ConvergenceTable convergence_study(const ButcherPaird& pair, const ModelSpec& spec, const PeriodicGrid& grid,
                                   const SpectralField& u0, std::vector<double> taus, double T,
                                   int ref_divisor = 16);

}  // namespace imexrk
