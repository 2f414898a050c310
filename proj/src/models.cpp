#include "imexrk/models.hpp"

#include <cmath>
#include <stdexcept>

namespace imexrk {

ModelKind parse_model_kind(std::string_view name) {
  if (name == "ac") return ModelKind::AllenCahn;
  if (name == "ch") return ModelKind::CahnHilliard;
  if (name == "mbe") return ModelKind::Mbe;
  throw std::invalid_argument("unknown model '" + std::string(name) + "' (expected ac, ch or mbe)");
}

std::string_view model_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::AllenCahn: return "ac";
    case ModelKind::CahnHilliard: return "ch";
    case ModelKind::Mbe: return "mbe";
  }
  return "?";
}

ModelSpec ModelSpec::make(ModelKind kind, double epsilon, double alpha, double beta, double cutoff) {
  if (!(epsilon > 0)) throw std::invalid_argument("epsilon must be positive");
  if (!(cutoff >= 1)) throw std::invalid_argument("cutoff M must be >= 1");
  if (!(alpha >= 0) || !(beta >= 0)) throw std::invalid_argument("alpha and beta must be nonnegative");
  ModelSpec s;
  s.kind = kind;
  s.epsilon = epsilon;
  s.cutoff = cutoff;
  s.alpha = alpha;
  s.beta = beta;
  s.lipschitz = kind == ModelKind::Mbe ? 1.0 : double_well_lipschitz(cutoff);
  return s;
}

double f_trunc(double u, double M) {
  const double slope = 3.0 * M * M - 1.0;
  if (u > M) return slope * u - 2.0 * M * M * M;
  if (u < -M) return slope * u + 2.0 * M * M * M;
  return (u * u - 1.0) * u;
}

double F_trunc(double u, double M) {
  const double half_slope = 0.5 * (3.0 * M * M - 1.0);
  const double offset = 0.25 * (3.0 * M * M * M * M + 1.0);
  if (u > M) return half_slope * u * u - 2.0 * M * M * M * u + offset;
  if (u < -M) return half_slope * u * u + 2.0 * M * M * M * u + offset;
  const double w = u * u - 1.0;
  return 0.25 * w * w;
}

double energy(const ModelSpec& spec, const SpectralField& u) {
  const PeriodicGrid& g = u.grid;
  const Spectrum u_hat = forward(u);
  const Eigen::ArrayXd k2 = wavenumber_squared(g);
  const double eps2 = spec.epsilon * spec.epsilon;
  if (spec.kind == ModelKind::Mbe) {
    const double bending = 0.5 * eps2 * modal_quadratic(g, u_hat, k2 * k2);
    if (!spec.nonlinear) return bending;
    const auto grad = gradient(u);
    Eigen::ArrayXd slope2 = Eigen::ArrayXd::Zero(g.points());
    for (const auto& c : grad) slope2 += c.values.square();
    return bending - 0.5 * g.cell_volume() * slope2.log1p().sum();
  }
  const double interface = 0.5 * eps2 * modal_quadratic(g, u_hat, k2);
  if (!spec.nonlinear) return interface;
  const double M = spec.cutoff;
  return interface + g.cell_volume() * u.values.unaryExpr([M](double v) { return F_trunc(v, M); }).sum();
}

SpectralField nonlinearity(const ModelSpec& spec, const SpectralField& u) {
  if (!spec.nonlinear) return SpectralField::zeros(u.grid);
  if (spec.kind == ModelKind::Mbe) {
    auto grad = gradient(u);
    Eigen::ArrayXd denom = Eigen::ArrayXd::Ones(u.grid.points());
    for (const auto& c : grad) denom += c.values.square();
    for (auto& c : grad) c.values /= denom;
    // Variational derivative of the slope energy -(1/2) log(1 + |grad u|^2).
    return divergence(grad);
  }
  const double M = spec.cutoff;
  return {u.grid, u.values.unaryExpr([M](double v) { return f_trunc(v, M); })};
}

SplitSymbols split_symbols(const ModelSpec& spec, const PeriodicGrid& grid) {
  const Eigen::ArrayXd k2 = wavenumber_squared(grid);
  const double eps2 = spec.epsilon * spec.epsilon;
  Eigen::ArrayXd g_sym, d_sym;
  switch (spec.kind) {
    case ModelKind::AllenCahn:
      g_sym = Eigen::ArrayXd::Constant(grid.modes(), -1.0);
      d_sym = -eps2 * k2;
      break;
    case ModelKind::CahnHilliard:
      g_sym = -k2;
      d_sym = -eps2 * k2;
      break;
    case ModelKind::Mbe:
      g_sym = Eigen::ArrayXd::Constant(grid.modes(), -1.0);
      d_sym = -eps2 * k2 * k2;
      break;
  }
  const Eigen::ArrayXd ds_sym = -(1.0 + spec.alpha) * d_sym + spec.beta;
  return {{grid, g_sym * ds_sym}, {grid, g_sym * d_sym}, {grid, g_sym}};
}

}  // namespace imexrk
