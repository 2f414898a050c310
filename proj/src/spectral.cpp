#include "imexrk/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>

namespace imexrk {
namespace {

// FFTW's planner is not thread-safe; execution on distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

class Plans {
 public:
  explicit Plans(const PeriodicGrid& g) : points_(g.points()), modes_(g.modes()) {
    std::lock_guard lock(planner_mutex());
    real_ = fftw_alloc_real(static_cast<std::size_t>(points_));
    cplx_ = fftw_alloc_complex(static_cast<std::size_t>(modes_));
    if (g.dim == 1) {
      r2c_ = fftw_plan_dft_r2c_1d(g.n, real_, cplx_, FFTW_ESTIMATE);
      c2r_ = fftw_plan_dft_c2r_1d(g.n, cplx_, real_, FFTW_ESTIMATE);
    } else {
      r2c_ = fftw_plan_dft_r2c_2d(g.n, g.n, real_, cplx_, FFTW_ESTIMATE);
      c2r_ = fftw_plan_dft_c2r_2d(g.n, g.n, cplx_, real_, FFTW_ESTIMATE);
    }
  }
  Plans(const Plans&) = delete;
  Plans& operator=(const Plans&) = delete;
  ~Plans() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(r2c_);
    fftw_destroy_plan(c2r_);
    fftw_free(real_);
    fftw_free(cplx_);
  }

  void forward(const Eigen::ArrayXd& in, Spectrum& out) {
    std::memcpy(real_, in.data(), sizeof(double) * static_cast<std::size_t>(points_));
    fftw_execute(r2c_);
    out.resize(modes_);
    std::memcpy(static_cast<void*>(out.data()), cplx_, sizeof(fftw_complex) * static_cast<std::size_t>(modes_));
  }

  void inverse(const Spectrum& in, Eigen::ArrayXd& out) {
    std::memcpy(cplx_, in.data(), sizeof(fftw_complex) * static_cast<std::size_t>(modes_));
    fftw_execute(c2r_);  // destroys cplx_, which is scratch
    out.resize(points_);
    std::memcpy(out.data(), real_, sizeof(double) * static_cast<std::size_t>(points_));
    out /= static_cast<double>(points_);
  }

 private:
  Eigen::Index points_;
  Eigen::Index modes_;
  double* real_ = nullptr;
  fftw_complex* cplx_ = nullptr;
  fftw_plan r2c_ = nullptr;
  fftw_plan c2r_ = nullptr;
};

Plans& plans_for(const PeriodicGrid& g) {
  thread_local std::map<std::pair<int, int>, std::unique_ptr<Plans>> cache;
  auto& slot = cache[{g.dim, g.n}];
  if (!slot) slot = std::make_unique<Plans>(g);
  return *slot;
}

void require_same_grid(const PeriodicGrid& a, const PeriodicGrid& b) {
  if (!(a == b)) throw GridMismatchError();
}

int signed_index(int i, int n) { return i <= n / 2 ? i : i - n; }

// Calls fn(mode, kx_index, ky_index, last_dim_weight) over the half spectrum.
// The weight is 2 for modes standing in for their conjugate partner.
template <typename Fn>
void for_each_mode(const PeriodicGrid& g, Fn&& fn) {
  const int half = g.n / 2 + 1;
  const auto weight = [&](int j) { return (j == 0 || j == g.n / 2) ? 1.0 : 2.0; };
  if (g.dim == 1) {
    for (int j = 0; j < half; ++j) fn(Eigen::Index(j), j, 0, weight(j));
  } else {
    for (int i = 0; i < g.n; ++i)
      for (int j = 0; j < half; ++j)
        fn(Eigen::Index(i) * half + j, j, signed_index(i, g.n), weight(j));
  }
}

template <typename T>
void put_le(std::ostream& out, T v) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T)))
    throw std::runtime_error("truncated snapshot file");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T v;
  std::memcpy(&v, bytes, sizeof(T));
  return v;
}

}  // namespace

PeriodicGrid PeriodicGrid::make(int dim, int n, double length) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("grid dimension must be 1 or 2");
  if (n < 8 || (n & (n - 1)) != 0) throw std::invalid_argument("grid size must be a power of two >= 8");
  if (!(length > 0) || !std::isfinite(length)) throw std::invalid_argument("grid length must be positive");
  return {dim, n, length};
}

SpectralField SpectralField::zeros(const PeriodicGrid& grid) {
  return {grid, Eigen::ArrayXd::Zero(grid.points())};
}

SpectralField SpectralField::constant(const PeriodicGrid& grid, double c) {
  return {grid, Eigen::ArrayXd::Constant(grid.points(), c)};
}

SpectralField SpectralField::sample(const PeriodicGrid& grid,
                                    const std::function<double(double, double)>& f) {
  SpectralField u = zeros(grid);
  const double h = grid.spacing();
  if (grid.dim == 1) {
    for (int i = 0; i < grid.n; ++i) u.values(i) = f(i * h, 0.0);
  } else {
    for (int iy = 0; iy < grid.n; ++iy)
      for (int ix = 0; ix < grid.n; ++ix) u.values(Eigen::Index(iy) * grid.n + ix) = f(ix * h, iy * h);
  }
  return u;
}

Spectrum forward(const SpectralField& u) {
  Spectrum out;
  plans_for(u.grid).forward(u.values, out);
  return out;
}

SpectralField inverse(const PeriodicGrid& grid, const Spectrum& u_hat) {
  SpectralField u{grid, {}};
  plans_for(grid).inverse(u_hat, u.values);
  return u;
}

Eigen::ArrayXd wavenumber_squared(const PeriodicGrid& grid) {
  Eigen::ArrayXd k2(grid.modes());
  const double unit = grid.wavenumber_unit();
  for_each_mode(grid, [&](Eigen::Index m, int kx, int ky, double) {
    k2(m) = unit * unit * (double(kx) * kx + double(ky) * ky);
  });
  return k2;
}

Eigen::ArrayXi wavenumber_index_max(const PeriodicGrid& grid) {
  Eigen::ArrayXi k(grid.modes());
  for_each_mode(grid, [&](Eigen::Index m, int kx, int ky, double) {
    k(m) = std::max(std::abs(kx), std::abs(ky));
  });
  return k;
}

OperatorSymbol laplacian_symbol(const PeriodicGrid& grid) { return {grid, -wavenumber_squared(grid)}; }

OperatorSymbol constant_symbol(const PeriodicGrid& grid, double value) {
  return {grid, Eigen::ArrayXd::Constant(grid.modes(), value)};
}

SpectralField apply_symbol(const OperatorSymbol& sym, const SpectralField& u) {
  require_same_grid(sym.grid, u.grid);
  Spectrum u_hat = forward(u);
  u_hat *= sym.multiplier.cast<std::complex<double>>();
  return inverse(u.grid, u_hat);
}

void stage_solve_in_place(const OperatorSymbol& gds, double a_ii, double tau, Spectrum& rhs_hat) {
  if (a_ii == 0.0) return;
  const Eigen::ArrayXd denom = 1.0 - tau * a_ii * gds.multiplier;
  if (!(denom.minCoeff() > 0.0))
    throw std::domain_error("stage solve: non-positive denominator (operator not dissipative)");
  rhs_hat /= denom.cast<std::complex<double>>();
}

SpectralField stage_solve(const OperatorSymbol& gds, double a_ii, double tau, const SpectralField& rhs) {
  require_same_grid(gds.grid, rhs.grid);
  if (a_ii == 0.0) return rhs;
  Spectrum r_hat = forward(rhs);
  stage_solve_in_place(gds, a_ii, tau, r_hat);
  return inverse(rhs.grid, r_hat);
}

double inner(const SpectralField& u, const SpectralField& v) {
  require_same_grid(u.grid, v.grid);
  return u.grid.cell_volume() * (u.values * v.values).sum();
}

double norm_L2(const SpectralField& u) { return std::sqrt(inner(u, u)); }

double modal_inner(const PeriodicGrid& grid, const Spectrum& u_hat, const Spectrum& v_hat) {
  double sum = 0.0;
  for_each_mode(grid, [&](Eigen::Index m, int, int, double w) {
    sum += w * (u_hat(m) * std::conj(v_hat(m))).real();
  });
  return grid.cell_volume() * sum / static_cast<double>(grid.points());
}

double modal_quadratic(const PeriodicGrid& grid, const Spectrum& u_hat, const Eigen::ArrayXd& weight) {
  double sum = 0.0;
  for_each_mode(grid, [&](Eigen::Index m, int, int, double w) { sum += w * weight(m) * std::norm(u_hat(m)); });
  return grid.cell_volume() * sum / static_cast<double>(grid.points());
}

double seminorm_H1(const SpectralField& u) {
  return std::sqrt(modal_quadratic(u.grid, forward(u), wavenumber_squared(u.grid)));
}

std::vector<SpectralField> gradient(const SpectralField& u) {
  const PeriodicGrid& g = u.grid;
  const Spectrum u_hat = forward(u);
  const double unit = g.wavenumber_unit();
  std::vector<SpectralField> out;
  for (int d = 0; d < g.dim; ++d) {
    Spectrum component(g.modes());
    for_each_mode(g, [&](Eigen::Index m, int kx, int ky, double) {
      const int k = d == 0 ? kx : ky;
      const bool nyquist = std::abs(k) == g.n / 2;
      component(m) = nyquist ? std::complex<double>(0.0) : std::complex<double>(0.0, unit * k) * u_hat(m);
    });
    out.push_back(inverse(g, component));
  }
  return out;
}

SpectralField divergence(std::span<const SpectralField> components) {
  if (components.empty()) throw std::invalid_argument("divergence of an empty vector field");
  const PeriodicGrid& g = components.front().grid;
  if (static_cast<int>(components.size()) != g.dim) throw std::invalid_argument("divergence: wrong component count");
  const double unit = g.wavenumber_unit();
  Spectrum acc = Spectrum::Zero(g.modes());
  for (int d = 0; d < g.dim; ++d) {
    require_same_grid(g, components[static_cast<std::size_t>(d)].grid);
    const Spectrum c_hat = forward(components[static_cast<std::size_t>(d)]);
    for_each_mode(g, [&](Eigen::Index m, int kx, int ky, double) {
      const int k = d == 0 ? kx : ky;
      if (std::abs(k) != g.n / 2) acc(m) += std::complex<double>(0.0, unit * k) * c_hat(m);
    });
  }
  return inverse(g, acc);
}

void dealias(const PeriodicGrid& grid, Spectrum& u_hat) {
  const int cutoff = grid.n / 3;
  for_each_mode(grid, [&](Eigen::Index m, int kx, int ky, double) {
    if (std::abs(kx) > cutoff || std::abs(ky) > cutoff) u_hat(m) = 0.0;
  });
}

void enforce_hermitian(const PeriodicGrid& grid, Spectrum& u_hat) {
  const double scale = std::max(1.0, u_hat.abs().maxCoeff());
  const int half = grid.n / 2 + 1;
  const auto fix = [&](Eigen::Index m) {
    if (std::abs(u_hat(m).imag()) > 1e-12 * scale)
      throw std::logic_error("spectrum of a real field is not Hermitian");
    u_hat(m).imag(0.0);
  };
  if (grid.dim == 1) {
    fix(0);
    fix(grid.n / 2);
  } else {
    for (int i : {0, grid.n / 2})
      for (int j : {0, grid.n / 2}) fix(Eigen::Index(i) * half + j);
    // Column j = 0 and j = n/2 are conjugate-symmetric along the first index.
    for (int j : {0, grid.n / 2})
      for (int i = 1; i < grid.n / 2; ++i) {
        const Eigen::Index a = Eigen::Index(i) * half + j;
        const Eigen::Index b = Eigen::Index(grid.n - i) * half + j;
        if (std::abs(u_hat(a) - std::conj(u_hat(b))) > 1e-12 * scale)
          throw std::logic_error("spectrum of a real field is not Hermitian");
        const auto avg = 0.5 * (u_hat(a) + std::conj(u_hat(b)));
        u_hat(a) = avg;
        u_hat(b) = std::conj(avg);
      }
  }
}

void write_snapshot(const std::filesystem::path& path, const SpectralField& u) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write snapshot " + path.string());
  put_le<std::uint64_t>(out, static_cast<std::uint64_t>(u.grid.dim));
  put_le<std::uint64_t>(out, static_cast<std::uint64_t>(u.grid.n));
  put_le<double>(out, u.grid.length);
  for (Eigen::Index i = 0; i < u.values.size(); ++i) put_le<double>(out, u.values(i));
  if (!out) throw std::runtime_error("failed writing snapshot " + path.string());
}

SpectralField read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open snapshot " + path.string());
  const auto dim = get_le<std::uint64_t>(in);
  const auto n = get_le<std::uint64_t>(in);
  const auto length = get_le<double>(in);
  if (dim > 2 || n > (1u << 16)) throw std::runtime_error("corrupt snapshot header");
  SpectralField u = SpectralField::zeros(PeriodicGrid::make(static_cast<int>(dim), static_cast<int>(n), length));
  for (Eigen::Index i = 0; i < u.values.size(); ++i) u.values(i) = get_le<double>(in);
  return u;
}

void write_field_csv(const std::filesystem::path& path, const SpectralField& u) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.precision(17);
  const double h = u.grid.spacing();
  if (u.grid.dim == 1) {
    out << "x,u\n";
    for (int i = 0; i < u.grid.n; ++i) out << i * h << ',' << u.values(i) << '\n';
  } else {
    out << "x,y,u\n";
    for (int iy = 0; iy < u.grid.n; ++iy)
      for (int ix = 0; ix < u.grid.n; ++ix)
        out << ix * h << ',' << iy * h << ',' << u.values(Eigen::Index(iy) * u.grid.n + ix) << '\n';
  }
}

}  // namespace imexrk
