#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace imexrk {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Coupled DIRK / explicit tableau pair of ARS type in reduced s x s form.
///
/// Stage i solves with A(i, i) and uses the explicit coefficient Ahat(i, j)
/// on the nonlinearity evaluated at stage j - 1 (stage 0 is the step start),
/// so the explicit diagonal is legal and must be nonzero. Both schemes are
/// stiffly accurate: b and bhat are the last rows.
template <typename Scalar>
struct ButcherPair {
  Matrix<Scalar> A;
  Matrix<Scalar> Ahat;
  Vector<Scalar> b;
  Vector<Scalar> bhat;
  Vector<Scalar> c;
  /// Structural tolerance for row sums and stiff accuracy. Tableaux typed in
  /// as rounded decimals carry a looser value than exact ones.
  Scalar tolerance = Scalar(1e-12);

  int stages() const { return static_cast<int>(A.rows()); }

  /// Builds a pair from the two coefficient matrices; b, bhat are the last
  /// rows and c the implicit row sums.
  static ButcherPair from_matrices(Matrix<Scalar> A, Matrix<Scalar> Ahat,
                                   Scalar tolerance = Scalar(1e-12)) {
    ButcherPair p;
    p.c = A.rowwise().sum();
    p.b = A.row(A.rows() - 1).transpose();
    p.bhat = Ahat.row(Ahat.rows() - 1).transpose();
    p.A = std::move(A);
    p.Ahat = std::move(Ahat);
    p.tolerance = tolerance;
    return p;
  }

  /// Coefficient-wise equality; the tolerance is metadata and is ignored.
  friend bool operator==(const ButcherPair& x, const ButcherPair& y) {
    return x.A.rows() == y.A.rows() && x.A.cols() == y.A.cols() &&
           x.Ahat.rows() == y.Ahat.rows() && x.Ahat.cols() == y.Ahat.cols() &&
           x.b.size() == y.b.size() && x.bhat.size() == y.bhat.size() &&
           x.c.size() == y.c.size() && x.A == y.A && x.Ahat == y.Ahat &&
           x.b == y.b && x.bhat == y.bhat && x.c == y.c;
  }
};

using ButcherPaird = ButcherPair<double>;

/// Padded (s+1) x (s+1) twin tableaux with the leading zero stage.
template <typename Scalar>
struct SigmaPair {
  int sigma = 0;
  Matrix<Scalar> A_sigma;
  Matrix<Scalar> Ahat_sigma;
  Vector<Scalar> b_sigma;
  Vector<Scalar> bhat_sigma;
  Vector<Scalar> c_sigma;
};

enum class DiagnosticKind {
  Shape,
  NonFinite,
  ImplicitNotLowerTriangular,
  ExplicitNotLowerTriangular,
  RowSumMismatch,
  AbscissaMismatch,
  NotStifflyAccurate,
  ExplicitDiagonalZero,
  ImplicitDiagonalNegative,
};

struct Diagnostic {
  DiagnosticKind kind;
  int row = 0;     // 1-based stage, 0 when not applicable
  int column = 0;  // 1-based, 0 when not applicable
  std::string message;
};

/// Checks every pair invariant; an empty result means the pair is valid.
template <typename Scalar>
std::vector<Diagnostic> validate(const ButcherPair<Scalar>& pair) {
  using std::abs;
  std::vector<Diagnostic> out;
  const auto s = pair.A.rows();
  if (s < 1 || pair.A.cols() != s || pair.Ahat.rows() != s || pair.Ahat.cols() != s ||
      pair.b.size() != s || pair.bhat.size() != s || pair.c.size() != s) {
    out.push_back({DiagnosticKind::Shape, 0, 0, "inconsistent tableau dimensions"});
    return out;
  }
  if (!pair.A.allFinite() || !pair.Ahat.allFinite() || !pair.b.allFinite() ||
      !pair.bhat.allFinite() || !pair.c.allFinite()) {
    out.push_back({DiagnosticKind::NonFinite, 0, 0, "non-finite coefficient"});
    return out;
  }
  const Scalar tol = pair.tolerance;
  for (Eigen::Index i = 0; i < s; ++i) {
    const int row = static_cast<int>(i) + 1;
    for (Eigen::Index j = i + 1; j < s; ++j) {
      const int col = static_cast<int>(j) + 1;
      if (pair.A(i, j) != Scalar(0))
        out.push_back({DiagnosticKind::ImplicitNotLowerTriangular, row, col,
                       "implicit entry above diagonal at row " + std::to_string(row) +
                           ", column " + std::to_string(col)});
      if (pair.Ahat(i, j) != Scalar(0))
        out.push_back({DiagnosticKind::ExplicitNotLowerTriangular, row, col,
                       "explicit entry above diagonal at row " + std::to_string(row) +
                           ", column " + std::to_string(col)});
    }
    const Scalar implicit_sum = pair.A.row(i).sum();
    const Scalar explicit_sum = pair.Ahat.row(i).sum();
    if (abs(implicit_sum - explicit_sum) > tol)
      out.push_back({DiagnosticKind::RowSumMismatch, row, 0,
                     "row-sum mismatch at row " + std::to_string(row)});
    if (abs(implicit_sum - pair.c(i)) > tol || abs(explicit_sum - pair.c(i)) > tol)
      out.push_back({DiagnosticKind::AbscissaMismatch, row, 0,
                     "abscissa does not match row sums at row " + std::to_string(row)});
    if (pair.Ahat(i, i) == Scalar(0))
      out.push_back({DiagnosticKind::ExplicitDiagonalZero, row, row,
                     "explicit diagonal zero at stage " + std::to_string(row)});
    if (pair.A(i, i) < Scalar(0))
      out.push_back({DiagnosticKind::ImplicitDiagonalNegative, row, row,
                     "implicit diagonal negative at stage " + std::to_string(row)});
  }
  const Scalar stiff_defect =
      std::max((pair.b - pair.A.row(s - 1).transpose()).cwiseAbs().maxCoeff(),
               (pair.bhat - pair.Ahat.row(s - 1).transpose()).cwiseAbs().maxCoeff());
  if (stiff_defect > tol)
    out.push_back({DiagnosticKind::NotStifflyAccurate, static_cast<int>(s), 0,
                   "not stiffly accurate"});
  return out;
}

template <typename Scalar>
SigmaPair<Scalar> embed_sigma(const ButcherPair<Scalar>& pair) {
  const auto s = pair.A.rows();
  SigmaPair<Scalar> sp;
  sp.sigma = static_cast<int>(s) + 1;
  sp.A_sigma = Matrix<Scalar>::Zero(s + 1, s + 1);
  sp.Ahat_sigma = Matrix<Scalar>::Zero(s + 1, s + 1);
  sp.A_sigma.bottomRightCorner(s, s) = pair.A;
  sp.Ahat_sigma.bottomLeftCorner(s, s) = pair.Ahat;
  sp.b_sigma = Vector<Scalar>::Zero(s + 1);
  sp.bhat_sigma = Vector<Scalar>::Zero(s + 1);
  sp.b_sigma.tail(s) = pair.b;
  sp.bhat_sigma.head(s) = pair.bhat;
  sp.c_sigma = Vector<Scalar>::Zero(s + 1);
  sp.c_sigma.tail(s) = pair.c;
  return sp;
}

/// Inverse of embed_sigma: drops the leading zero stage.
template <typename Scalar>
ButcherPair<Scalar> strip_sigma(const SigmaPair<Scalar>& sp, Scalar tolerance = Scalar(1e-12)) {
  const int s = sp.sigma - 1;
  ButcherPair<Scalar> p;
  p.A = sp.A_sigma.bottomRightCorner(s, s);
  p.Ahat = sp.Ahat_sigma.bottomLeftCorner(s, s);
  p.b = sp.b_sigma.tail(s);
  p.bhat = sp.bhat_sigma.head(s);
  p.c = sp.c_sigma.tail(s);
  p.tolerance = tolerance;
  return p;
}

class UnsupportedOrderError : public std::invalid_argument {
 public:
  explicit UnsupportedOrderError(int p)
      : std::invalid_argument("unsupported order " + std::to_string(p) +
                              " (order checks cover 1..3)") {}
};

/// Maximum absolute residual of the order-p conditions on the padded pair:
/// row sums A_sigma e = Ahat_sigma e = c_sigma, the moments
/// w^T c^(j-1) = 1/j and the coupled products w^T M_1 ... M_(j-1) e = 1/j!
/// for w in {b_sigma, bhat_sigma} and every word over {A_sigma, Ahat_sigma}.
template <typename Scalar>
Scalar verify_order(const ButcherPair<Scalar>& pair, int p) {
  using std::abs;
  if (p < 1 || p > 3) throw UnsupportedOrderError(p);
  const SigmaPair<Scalar> sp = embed_sigma(pair);
  const Eigen::Index n = sp.sigma;
  const Vector<Scalar> e = Vector<Scalar>::Ones(n);

  Scalar residual = std::max((sp.A_sigma * e - sp.c_sigma).cwiseAbs().maxCoeff(),
                             (sp.Ahat_sigma * e - sp.c_sigma).cwiseAbs().maxCoeff());

  const Matrix<Scalar>* mats[2] = {&sp.A_sigma, &sp.Ahat_sigma};
  const Vector<Scalar>* weights[2] = {&sp.b_sigma, &sp.bhat_sigma};
  Scalar factorial = Scalar(1);
  for (int j = 1; j <= p; ++j) {
    factorial *= Scalar(j);
    const Vector<Scalar> moment = sp.c_sigma.array().pow(Scalar(j - 1)).matrix();
    for (const auto* w : weights)
      residual = std::max(residual, abs(w->dot(moment) - Scalar(1) / Scalar(j)));

    // Words of length j - 1 are enumerated by the bits of `word`.
    const int words = 1 << (j - 1);
    for (int word = 0; word < words; ++word) {
      Vector<Scalar> x = e;
      for (int k = j - 2; k >= 0; --k) x = *mats[(word >> k) & 1] * x;
      for (const auto* w : weights)
        residual = std::max(residual, abs(w->dot(x) - Scalar(1) / factorial));
    }
  }
  return residual;
}

}  // namespace imexrk
