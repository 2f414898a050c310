#pragma once

#include "imexrk/tableau.hpp"

#include <cmath>
#include <stdexcept>

namespace imexrk {

/// Eigenvalues (ascending) of the symmetric part (M + M^T)/2 by cyclic
/// Jacobi rotations. Sweeps continue until every off-diagonal magnitude is
/// below 1e-14 (relative to the matrix scale when that exceeds one).
template <typename Derived>
Vector<typename Derived::Scalar> symmetric_part_eigenvalues(const Eigen::MatrixBase<Derived>& M) {
  using Scalar = typename Derived::Scalar;
  using std::abs;
  using std::sqrt;
  if (M.rows() == 0 || M.rows() != M.cols())
    throw std::invalid_argument("symmetric_part_eigenvalues: matrix must be square and nonempty");

  const Eigen::Index n = M.rows();
  Matrix<Scalar> S = (M + M.transpose()) / Scalar(2);
  const Scalar scale = std::max(Scalar(1), S.norm());
  const Scalar threshold = Scalar(1e-14) * scale;

  const auto off_max = [&] {
    Scalar m = Scalar(0);
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) m = std::max(m, abs(S(p, q)));
    return m;
  };

  for (int sweep = 0; sweep < 100 && off_max() >= threshold; ++sweep) {
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const Scalar apq = S(p, q);
        if (apq == Scalar(0)) continue;
        const Scalar theta = (S(q, q) - S(p, p)) / (Scalar(2) * apq);
        const Scalar t = (theta >= Scalar(0) ? Scalar(1) : Scalar(-1)) /
                         (abs(theta) + sqrt(theta * theta + Scalar(1)));
        const Scalar cs = Scalar(1) / sqrt(t * t + Scalar(1));
        const Scalar sn = t * cs;
        // S <- J^T S J with the rotation acting on rows/columns p and q.
        for (Eigen::Index k = 0; k < n; ++k) {
          const Scalar skp = S(k, p), skq = S(k, q);
          S(k, p) = cs * skp - sn * skq;
          S(k, q) = sn * skp + cs * skq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const Scalar spk = S(p, k), sqk = S(q, k);
          S(p, k) = cs * spk - sn * sqk;
          S(q, k) = sn * spk + cs * sqk;
        }
        S(p, q) = S(q, p) = Scalar(0);
      }
    }
  }
  Vector<Scalar> ev = S.diagonal();
  std::sort(ev.data(), ev.data() + ev.size());
  return ev;
}

/// Smallest eigenvalue of (M + M^T)/2.
template <typename Derived>
typename Derived::Scalar min_eig_symmetric_part(const Eigen::MatrixBase<Derived>& M) {
  return symmetric_part_eigenvalues(M)(0);
}

}  // namespace imexrk
