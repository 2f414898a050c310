#pragma once

#include "imexrk/models.hpp"
#include "imexrk/spectral.hpp"
#include "imexrk/tableau.hpp"

#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace imexrk {

/// Raised when a stage value is non-finite or exceeds 1e10 in magnitude.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(int stage, long step)
      : std::runtime_error("divergence at step " + std::to_string(step) + ", stage " + std::to_string(stage)),
        stage_(stage),
        step_(step) {}
  int stage() const { return stage_; }
  long step() const { return step_; }

 private:
  int stage_;
  long step_;
};

struct StepPlan {
  ButcherPaird pair;
  ModelSpec spec;
  PeriodicGrid grid;
  double tau = 0;
  bool dealias = false;  // 2/3 rule on the nonlinearity
  SplitSymbols symbols;

  static StepPlan make(ButcherPaird pair, ModelSpec spec, PeriodicGrid grid, double tau, bool dealias = false);
};

/// One IMEX step:
///   v_0 = u_n,
///   v_i = v_0 + tau [ sum_{j<i} a_ij L v_j + sum_{j<=i} ahat_ij N(v_{j-1}) ] + tau a_ii L v_i,
/// with L = G D_s and N(v) = -G f_s(v) = G f(v) + alpha G D v - beta G v.
/// Returns v_s.
SpectralField imex_step(const StepPlan& plan, const SpectralField& u_n);

struct Trajectory {
  std::vector<double> times;     // t_0 = 0 first
  std::vector<double> energies;  // one per time
  std::vector<double> mass;      // mean(u) per time
  std::vector<std::pair<long, SpectralField>> snapshots;
};

/// Integrates ceil(T / tau) steps; snapshot_stride > 0 stores every k-th
/// state (and the initial one).
Trajectory run(const StepPlan& plan, const SpectralField& u0, double T, int snapshot_stride = 0);

/// Number of steps used by run().
long step_count(double T, double tau);

/// max_n (E_{n+1} - E_n); throws std::invalid_argument for fewer than 2 samples.
double check_monotone(std::span<const double> energies);
inline double check_monotone(const Trajectory& traj) { return check_monotone(traj.energies); }

}  // namespace imexrk
