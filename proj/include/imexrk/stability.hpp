#pragma once

#include "imexrk/jacobi.hpp"
#include "imexrk/tableau.hpp"

#include <optional>
#include <stdexcept>
#include <string>

namespace imexrk {

/// Positive-definiteness threshold on symmetrizer eigenvalues. Values in
/// (-kDefiniteTolerance, kDefiniteTolerance] are reported as marginal.
inline constexpr double kDefiniteTolerance = 1e-10;

/// Matrices whose symmetric parts decide unconditional energy decay.
template <typename Scalar>
struct CertificateMatrices {
  Matrix<Scalar> E_lower;  // lower-triangular ones
  Matrix<Scalar> E;        // all ones
  Matrix<Scalar> Id;
  Matrix<Scalar> Q;        // (Ahat^-1 A - I) E_lower + I
  Matrix<Scalar> H0;       // Ahat^-1 E_lower
  Matrix<Scalar> H2_0;     // Ahat^-1 A E_lower - E/2

  /// alpha Q + Ahat^-1 A E_lower - E/2
  Matrix<Scalar> H2(Scalar alpha) const { return alpha * Q + H2_0; }
};

class SingularExplicitMatrixError : public std::domain_error {
 public:
  SingularExplicitMatrixError() : std::domain_error("explicit coefficient matrix is singular") {}
};

class NoCertificateError : public std::domain_error {
 public:
  NoCertificateError()
      : std::domain_error("Q is not positive-definite; no stabilization threshold exists") {}
};

template <typename Scalar>
CertificateMatrices<Scalar> build_certificates(const ButcherPair<Scalar>& pair) {
  const Eigen::Index s = pair.A.rows();
  for (Eigen::Index i = 0; i < s; ++i)
    if (pair.Ahat(i, i) == Scalar(0)) throw SingularExplicitMatrixError();

  CertificateMatrices<Scalar> m;
  m.Id = Matrix<Scalar>::Identity(s, s);
  m.E = Matrix<Scalar>::Ones(s, s);
  m.E_lower = m.E.template triangularView<Eigen::Lower>();
  const auto Ahat_lower = pair.Ahat.template triangularView<Eigen::Lower>();
  const Matrix<Scalar> inv_A = Ahat_lower.solve(pair.A);  // forward substitution
  m.Q = (inv_A - m.Id) * m.E_lower + m.Id;
  m.H0 = Ahat_lower.solve(m.E_lower);
  m.H2_0 = inv_A * m.E_lower - m.E / Scalar(2);
  return m;
}

enum class Definiteness { Positive, Marginal, Negative };

template <typename Scalar>
Definiteness classify(Scalar lambda_min) {
  if (lambda_min > Scalar(kDefiniteTolerance)) return Definiteness::Positive;
  if (lambda_min > Scalar(-kDefiniteTolerance)) return Definiteness::Marginal;
  return Definiteness::Negative;
}

template <typename Scalar>
struct StabilityReport {
  Scalar lambda_Q{};
  Scalar lambda_H0{};
  Scalar lambda_H2_0{};
  Scalar lipschitz{};
  std::optional<Scalar> alpha0;       // max(0, -lambda_H2_0 / lambda_Q)
  std::optional<Scalar> beta0_per_L;  // 1 / (2 lambda_Q)
  std::optional<Scalar> beta0;        // L / (2 lambda_Q)
  bool unconditional = false;
  std::string diagnostics;
};

/// Unconditional energy-decay certificate for a pair at Lipschitz constant L.
template <typename Scalar>
StabilityReport<Scalar> certify_unconditional(const ButcherPair<Scalar>& pair, Scalar L) {
  const auto m = build_certificates(pair);
  StabilityReport<Scalar> r;
  r.lambda_Q = min_eig_symmetric_part(m.Q);
  r.lambda_H0 = min_eig_symmetric_part(m.H0);
  r.lambda_H2_0 = min_eig_symmetric_part(m.H2_0);
  r.lipschitz = L;
  const auto q = classify(r.lambda_Q);
  const auto h0 = classify(r.lambda_H0);
  r.unconditional = q == Definiteness::Positive && h0 == Definiteness::Positive;

  const auto describe = [&](const char* name, Definiteness d) {
    if (d == Definiteness::Marginal) r.diagnostics += std::string(name) + " marginal; ";
    if (d == Definiteness::Negative) r.diagnostics += std::string(name) + " not positive-definite; ";
  };
  describe("Q", q);
  describe("H0", h0);
  if (r.unconditional) {
    r.alpha0 = std::max(Scalar(0), -r.lambda_H2_0 / r.lambda_Q);
    r.beta0_per_L = Scalar(1) / (Scalar(2) * r.lambda_Q);
    r.beta0 = L * *r.beta0_per_L;
    if (r.lambda_H2_0 <= Scalar(0)) r.diagnostics += "H2(0) needs alpha stabilization; ";
  }
  if (!r.diagnostics.empty()) r.diagnostics.resize(r.diagnostics.size() - 2);
  return r;
}

/// Smallest alpha making H2(alpha) positive-definite by the threshold bound,
/// clamped at zero.
template <typename Scalar>
Scalar required_alpha(const ButcherPair<Scalar>& pair) {
  const auto m = build_certificates(pair);
  const Scalar lq = min_eig_symmetric_part(m.Q);
  if (classify(lq) != Definiteness::Positive) throw NoCertificateError();
  return std::max(Scalar(0), -min_eig_symmetric_part(m.H2_0) / lq);
}

/// Step-size condition for Allen-Cahn:
///   lambda_H0 / tau + beta lambda_Q >= L/2  and  alpha lambda_Q >= -lambda_H2(0),
/// under the standing requirement that Q and H0 are positive-definite.
template <typename Scalar>
bool ac_step_condition(const ButcherPair<Scalar>& pair, Scalar alpha, Scalar beta, Scalar L,
                       Scalar tau) {
  const auto m = build_certificates(pair);
  const Scalar lq = min_eig_symmetric_part(m.Q);
  const Scalar lh0 = min_eig_symmetric_part(m.H0);
  if (classify(lq) != Definiteness::Positive || classify(lh0) != Definiteness::Positive)
    return false;
  const Scalar lh2 = min_eig_symmetric_part(m.H2_0);
  // The second inequality is a definiteness statement and shares its tolerance.
  return lh0 / tau + beta * lq >= L / Scalar(2) &&
         alpha * lq + lh2 >= -Scalar(kDefiniteTolerance);
}

/// Step-size condition for Cahn-Hilliard:
///   (4 eps^2 / tau) lambda_H0 lambda_H2(alpha) + beta lambda_Q >= L/2,
/// with lambda_H2(alpha) evaluated at the given alpha; H2(alpha) must not be
/// indefinite.
template <typename Scalar>
bool ch_step_condition(const ButcherPair<Scalar>& pair, Scalar alpha, Scalar beta, Scalar L,
                       Scalar tau, Scalar epsilon) {
  const auto m = build_certificates(pair);
  const Scalar lq = min_eig_symmetric_part(m.Q);
  const Scalar lh0 = min_eig_symmetric_part(m.H0);
  if (classify(lq) != Definiteness::Positive || classify(lh0) != Definiteness::Positive)
    return false;
  const Scalar lh2 = min_eig_symmetric_part(m.H2(alpha));
  if (classify(lh2) == Definiteness::Negative) return false;
  return Scalar(4) * epsilon * epsilon / tau * lh0 * std::max(lh2, Scalar(0)) + beta * lq >=
         L / Scalar(2);
}

std::string render_report_text(const StabilityReport<double>& report);
/// key=value lines: lambda_Q, lambda_H0, lambda_H2_0, L, alpha0, beta0, verdict.
std::string render_report_kv(const StabilityReport<double>& report);

}  // namespace imexrk
