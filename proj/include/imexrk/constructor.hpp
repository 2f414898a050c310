#pragma once

#include "imexrk/stability.hpp"
#include "imexrk/tableau.hpp"

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace imexrk {

/// Parameters of the 4-stage third-order ARS family with abscissae
/// c_sigma = (0, c2, c3, c4, 1).
///
/// zeta and zeta_hat prescribe the fourth moments b_sigma^T c_sigma^3 and
/// bhat_sigma^T c_sigma^3. After row sums and the four bilinear conditions
/// each matrix keeps one degree of freedom; free_A and free_Ahat fix it as the
/// coefficient of stage 3 on stage 1 in the reduced tableau (A(2,0) and
/// Ahat(2,0), zero-based).
struct Rk3FamilySpec {
  double c2 = 0;
  double c3 = 0;
  double c4 = 0;
  double zeta = 0;
  double zeta_hat = 0;
  double free_A = 0;
  double free_Ahat = 0;

  friend bool operator==(const Rk3FamilySpec&, const Rk3FamilySpec&) = default;
};

enum class WeightRole { Implicit, Explicit };

class DegenerateNodesError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ConstructionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Solves the moment system w^T e = 1, w^T c = 1/2, w^T c^2 = 1/3,
/// w^T c^3 = zeta on the padded abscissae. The implicit role pins the first
/// entry to zero, the explicit role the last.
Vector<double> solve_weights(const Vector<double>& c_sigma, double zeta, WeightRole role);

/// Builds the third-order pair for a family spec. Throws DegenerateNodesError
/// for repeated or trivial abscissae and ConstructionError when the bilinear
/// system is singular or the result violates a pair invariant.
ButcherPaird construct_rk3(const Rk3FamilySpec& spec);

struct ParameterRange {
  double lo = 0;
  double hi = 0;
};

struct Rk3SearchRanges {
  ParameterRange c2, c3, c4, zeta, zeta_hat, free_A, free_Ahat;

  /// Every range collapsed onto a single spec.
  static Rk3SearchRanges pinned(const Rk3FamilySpec& s);
};

struct Rk3Candidate {
  Rk3FamilySpec spec;
  ButcherPaird pair;
  StabilityReport<double> report;
  double score = 0;  // min(lambda_Q, lambda_H0)
};

/// Samples the family on a Halton sequence, keeps constructible candidates
/// with order-3 residual <= 1e-10, and ranks them by score (ties broken by
/// lambda_H2(0), then sample index).
std::vector<Rk3Candidate> search_energy_stable_rk3(const Rk3SearchRanges& ranges, int samples,
                                                   double lipschitz = 2.0);

/// key=value lines (c2, c3, c4, zeta, zeta_hat, free_A, free_Ahat); `#` comments.
Rk3FamilySpec parse_rk3_spec(std::string_view text);
std::string render_rk3_spec(const Rk3FamilySpec& spec);

}  // namespace imexrk
