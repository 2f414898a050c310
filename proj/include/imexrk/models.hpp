#pragma once

#include "imexrk/spectral.hpp"

#include <string>
#include <string_view>

namespace imexrk {

enum class ModelKind { AllenCahn, CahnHilliard, Mbe };

ModelKind parse_model_kind(std::string_view name);  // "ac", "ch", "mbe"
std::string_view model_name(ModelKind kind);

/// Phase-field model  u_t = G(-D u + f(u))  with stabilized splitting
/// D_s = -(1 + alpha) D + beta I.
///
///   AC:  G = -1,      D = eps^2 Lap,     f = truncated u^3 - u
///   CH:  G = Lap,     D = eps^2 Lap,     f = truncated u^3 - u
///   MBE: G = -1,      D = -eps^2 Lap^2,  f = div(grad u / (1 + |grad u|^2))
///
/// In every case f is the variational derivative of the potential part of
/// energy(), so the flow is the gradient flow of that energy.
struct ModelSpec {
  ModelKind kind = ModelKind::AllenCahn;
  double epsilon = 0.1;
  double cutoff = 1.0;     // truncation bound M of the double well
  double lipschitz = 2.0;  // 3 M^2 - 1 for AC/CH, 1 for MBE
  double alpha = 0.0;
  double beta = 0.0;
  bool nonlinear = true;   // false drops f entirely (linear test problems)

  /// Fills lipschitz from the model and cutoff.
  static ModelSpec make(ModelKind kind, double epsilon, double alpha = 0.0, double beta = 0.0,
                        double cutoff = 1.0);
};

/// Lipschitz constant of the truncated double-well derivative.
inline double double_well_lipschitz(double cutoff) { return 3.0 * cutoff * cutoff - 1.0; }

/// Double-well derivative (u^2 - 1) u, continued linearly outside [-M, M].
double f_trunc(double u, double cutoff = 1.0);
/// Potential (u^2 - 1)^2 / 4, continued quadratically outside [-M, M].
double F_trunc(double u, double cutoff = 1.0);

/// Discrete energy. The gradient (AC/CH) and Laplacian (MBE) terms are
/// evaluated modally so that they equal -(1/2)(u, D u) for the same symbols
/// the integrator uses.
double energy(const ModelSpec& spec, const SpectralField& u);

/// The model nonlinearity f(u) as a field.
SpectralField nonlinearity(const ModelSpec& spec, const SpectralField& u);

struct SplitSymbols {
  OperatorSymbol gds;  // G D_s: the implicit stage operator
  OperatorSymbol gd;   // G D
  OperatorSymbol g;    // G
};

SplitSymbols split_symbols(const ModelSpec& spec, const PeriodicGrid& grid);

}  // namespace imexrk
