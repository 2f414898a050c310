#pragma once

#include <Eigen/Core>

#include <complex>
#include <filesystem>
#include <functional>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace imexrk {

class GridMismatchError : public std::invalid_argument {
 public:
  GridMismatchError() : std::invalid_argument("fields live on different grids") {}
};

/// Uniform periodic grid of n points per dimension on [0, length)^dim.
struct PeriodicGrid {
  int dim = 1;
  int n = 128;
  double length = 2.0 * std::numbers::pi;

  /// Validates dim in {1, 2}, n >= 8 a power of two, length > 0.
  static PeriodicGrid make(int dim, int n, double length = 2.0 * std::numbers::pi);

  Eigen::Index points() const { return dim == 1 ? n : Eigen::Index(n) * n; }
  /// Size of the real-to-complex half spectrum.
  Eigen::Index modes() const { return dim == 1 ? n / 2 + 1 : Eigen::Index(n) * (n / 2 + 1); }
  double spacing() const { return length / n; }
  double cell_volume() const { return dim == 1 ? spacing() : spacing() * spacing(); }
  double wavenumber_unit() const { return 2.0 * std::numbers::pi / length; }

  friend bool operator==(const PeriodicGrid&, const PeriodicGrid&) = default;
};

/// Real state sampled on a periodic grid. In 2D values are row-major with x
/// the fast index: values[iy * n + ix].
struct SpectralField {
  PeriodicGrid grid;
  Eigen::ArrayXd values;

  static SpectralField zeros(const PeriodicGrid& grid);
  static SpectralField constant(const PeriodicGrid& grid, double c);
  /// Samples f(x, y) at grid points (y = 0 in 1D).
  static SpectralField sample(const PeriodicGrid& grid, const std::function<double(double, double)>& f);

  double mean() const { return values.mean(); }
};

/// Half spectrum in FFTW r2c layout.
using Spectrum = Eigen::ArrayXcd;

/// Real per-mode multiplier over the half spectrum.
struct OperatorSymbol {
  PeriodicGrid grid;
  Eigen::ArrayXd multiplier;
};

Spectrum forward(const SpectralField& u);
SpectralField inverse(const PeriodicGrid& grid, const Spectrum& u_hat);

/// |k|^2 per mode, k scaled by 2 pi / length.
Eigen::ArrayXd wavenumber_squared(const PeriodicGrid& grid);
/// Integer wavevector magnitude max(|kx|, |ky|) per mode (for filters).
Eigen::ArrayXi wavenumber_index_max(const PeriodicGrid& grid);

OperatorSymbol laplacian_symbol(const PeriodicGrid& grid);
OperatorSymbol constant_symbol(const PeriodicGrid& grid, double value);

SpectralField apply_symbol(const OperatorSymbol& sym, const SpectralField& u);

/// Solves (I - tau a_ii G D_s) v = rhs mode by mode, with gds the symbol of
/// G D_s. Throws std::domain_error if some denominator is not positive.
SpectralField stage_solve(const OperatorSymbol& gds, double a_ii, double tau, const SpectralField& rhs);
void stage_solve_in_place(const OperatorSymbol& gds, double a_ii, double tau, Spectrum& rhs_hat);

double inner(const SpectralField& u, const SpectralField& v);
double norm_L2(const SpectralField& u);
/// |u|_{H^1} = ||grad u||, evaluated modally so it equals -(u, Laplacian u).
double seminorm_H1(const SpectralField& u);
/// Inner product computed from two half spectra (Parseval).
double modal_inner(const PeriodicGrid& grid, const Spectrum& u_hat, const Spectrum& v_hat);
/// sum over modes of weight(k) |u_hat|^2, scaled like modal_inner.
double modal_quadratic(const PeriodicGrid& grid, const Spectrum& u_hat, const Eigen::ArrayXd& weight);

/// Spectral gradient components (Nyquist derivative set to zero).
std::vector<SpectralField> gradient(const SpectralField& u);
/// Spectral divergence of a vector field given by components.
SpectralField divergence(std::span<const SpectralField> components);

/// Zeroes modes with integer index above n/3 (2/3 rule).
void dealias(const PeriodicGrid& grid, Spectrum& u_hat);
/// Zeroes imaginary parts of self-conjugate modes; throws std::logic_error if
/// they exceed 1e-12 relative to the spectrum scale.
void enforce_hermitian(const PeriodicGrid& grid, Spectrum& u_hat);

/// Binary snapshot: little-endian u64 dim, u64 n, f64 length, then
/// row-major f64 values.
void write_snapshot(const std::filesystem::path& path, const SpectralField& u);
SpectralField read_snapshot(const std::filesystem::path& path);
/// CSV with columns x,u (1D) or x,y,u (2D).
void write_field_csv(const std::filesystem::path& path, const SpectralField& u);

}  // namespace imexrk
