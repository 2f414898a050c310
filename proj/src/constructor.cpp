#include "imexrk/constructor.hpp"

#include <algorithm>
#include <charconv>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <thread>

namespace imexrk {
namespace {

constexpr double kNodeSeparation = 1e-12;
constexpr double kOrderTolerance = 1e-10;

void require_distinct(const Vector<double>& nodes) {
  for (Eigen::Index i = 0; i < nodes.size(); ++i)
    for (Eigen::Index j = i + 1; j < nodes.size(); ++j)
      if (std::abs(nodes(i) - nodes(j)) <= kNodeSeparation)
        throw DegenerateNodesError("degenerate nodes: abscissae " + std::to_string(i + 1) +
                                   " and " + std::to_string(j + 1) + " coincide");
}

// Stage 3 on stage 1 is fixed by `free`; (x, y) are the coefficients of
// stage 2 on stage 1 and stage 3 on stage 2. Diagonals close the row sums.
Matrix<double> assemble(double c2, double c3, double c4, double free, double x, double y,
                        const Vector<double>& last_row) {
  Matrix<double> M = Matrix<double>::Zero(4, 4);
  M(0, 0) = c2;
  M(1, 0) = x;
  M(1, 1) = c3 - x;
  M(2, 0) = free;
  M(2, 1) = y;
  M(2, 2) = c4 - free - y;
  M.row(3) = last_row.transpose();
  return M;
}

// Residuals of w^T M_sigma c_sigma = 1/6 for w in {b_sigma, bhat_sigma}.
Eigen::Vector2d bilinear_residual(const Matrix<double>& A_sigma, const Vector<double>& b_sigma,
                                  const Vector<double>& bhat_sigma,
                                  const Vector<double>& c_sigma) {
  const Vector<double> Mc = A_sigma * c_sigma;
  return {b_sigma.dot(Mc) - 1.0 / 6.0, bhat_sigma.dot(Mc) - 1.0 / 6.0};
}

// The two bilinear conditions are affine in (x, y); solve them by probing.
template <typename Embed>
Eigen::Vector2d solve_bilinear(Embed embed, const Vector<double>& b_sigma,
                               const Vector<double>& bhat_sigma, const Vector<double>& c_sigma,
                               const char* which) {
  const Eigen::Vector2d r0 = bilinear_residual(embed(0.0, 0.0), b_sigma, bhat_sigma, c_sigma);
  Eigen::Matrix2d J;
  J.col(0) = bilinear_residual(embed(1.0, 0.0), b_sigma, bhat_sigma, c_sigma) - r0;
  J.col(1) = bilinear_residual(embed(0.0, 1.0), b_sigma, bhat_sigma, c_sigma) - r0;
  const Eigen::FullPivLU<Eigen::Matrix2d> lu(J);
  if (!lu.isInvertible() || std::abs(J.determinant()) < 1e-14 * std::max(1.0, J.norm()))
    throw ConstructionError(std::string("construction failure: bilinear system for the ") +
                            which + " matrix is singular");
  return lu.solve(-r0);
}

double halton(int index, int base) {
  double f = 1.0, r = 0.0;
  for (int i = index; i > 0; i /= base) {
    f /= base;
    r += f * (i % base);
  }
  return r;
}

double parse_value(std::string_view s, const std::string& key) {
  const auto bad = [&]() -> double {
    throw std::invalid_argument("malformed value for '" + key + "': '" + std::string(s) + "'");
  };
  if (const auto slash = s.find('/'); slash != std::string_view::npos) {
    long long p = 0, q = 0;
    auto a = std::from_chars(s.data(), s.data() + slash, p);
    auto b = std::from_chars(s.data() + slash + 1, s.data() + s.size(), q);
    if (a.ec != std::errc() || a.ptr != s.data() + slash || b.ec != std::errc() ||
        b.ptr != s.data() + s.size() || q == 0)
      return bad();
    return static_cast<double>(p) / static_cast<double>(q);
  }
  double v = 0;
  auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) return bad();
  return v;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

Vector<double> solve_weights(const Vector<double>& c_sigma, double zeta, WeightRole role) {
  if (c_sigma.size() != 5) throw std::invalid_argument("solve_weights: c_sigma must have 5 entries");
  const Vector<double> nodes = role == WeightRole::Implicit ? c_sigma.tail(4) : c_sigma.head(4);
  require_distinct(nodes);

  Eigen::Matrix4d V;
  for (int m = 0; m < 4; ++m)
    for (int k = 0; k < 4; ++k) V(m, k) = std::pow(nodes(k), m);
  const Eigen::Vector4d rhs(1.0, 1.0 / 2.0, 1.0 / 3.0, zeta);
  const Eigen::FullPivLU<Eigen::Matrix4d> lu(V);
  if (!lu.isInvertible()) throw DegenerateNodesError("degenerate nodes: Vandermonde system is singular");
  const Eigen::Vector4d w = lu.solve(rhs);

  Vector<double> out = Vector<double>::Zero(5);
  if (role == WeightRole::Implicit)
    out.tail(4) = w;
  else
    out.head(4) = w;
  return out;
}

ButcherPaird construct_rk3(const Rk3FamilySpec& spec) {
  Vector<double> c_sigma(5);
  c_sigma << 0.0, spec.c2, spec.c3, spec.c4, 1.0;
  require_distinct(c_sigma);

  const Vector<double> b_sigma = solve_weights(c_sigma, spec.zeta, WeightRole::Implicit);
  const Vector<double> bhat_sigma = solve_weights(c_sigma, spec.zeta_hat, WeightRole::Explicit);
  const Vector<double> b = b_sigma.tail(4);
  const Vector<double> bhat = bhat_sigma.head(4);

  const auto implicit_sigma = [&](double x, double y) {
    Matrix<double> S = Matrix<double>::Zero(5, 5);
    S.bottomRightCorner(4, 4) = assemble(spec.c2, spec.c3, spec.c4, spec.free_A, x, y, b);
    return S;
  };
  const auto explicit_sigma = [&](double x, double y) {
    Matrix<double> S = Matrix<double>::Zero(5, 5);
    S.bottomLeftCorner(4, 4) = assemble(spec.c2, spec.c3, spec.c4, spec.free_Ahat, x, y, bhat);
    return S;
  };
  const Eigen::Vector2d xa = solve_bilinear(implicit_sigma, b_sigma, bhat_sigma, c_sigma, "implicit");
  const Eigen::Vector2d xe = solve_bilinear(explicit_sigma, b_sigma, bhat_sigma, c_sigma, "explicit");

  ButcherPaird pair;
  pair.A = assemble(spec.c2, spec.c3, spec.c4, spec.free_A, xa(0), xa(1), b);
  pair.Ahat = assemble(spec.c2, spec.c3, spec.c4, spec.free_Ahat, xe(0), xe(1), bhat);
  pair.b = b;
  pair.bhat = bhat;
  pair.c = c_sigma.tail(4);

  if (const auto diags = validate(pair); !diags.empty())
    throw ConstructionError("construction failure: " + diags.front().message);
  const double residual = verify_order(pair, 3);
  if (!(residual <= kOrderTolerance))
    throw ConstructionError("construction failure: order-3 residual " + std::to_string(residual) +
                            " exceeds tolerance");
  return pair;
}

Rk3SearchRanges Rk3SearchRanges::pinned(const Rk3FamilySpec& s) {
  return {{s.c2, s.c2}, {s.c3, s.c3}, {s.c4, s.c4}, {s.zeta, s.zeta},
          {s.zeta_hat, s.zeta_hat}, {s.free_A, s.free_A}, {s.free_Ahat, s.free_Ahat}};
}

std::vector<Rk3Candidate> search_energy_stable_rk3(const Rk3SearchRanges& ranges, int samples,
                                                   double lipschitz) {
  if (samples < 1) throw std::invalid_argument("search_energy_stable_rk3: samples must be >= 1");

  const ParameterRange* dims[7] = {&ranges.c2,       &ranges.c3,     &ranges.c4,
                                   &ranges.zeta,     &ranges.zeta_hat, &ranges.free_A,
                                   &ranges.free_Ahat};
  constexpr int bases[7] = {2, 3, 5, 7, 11, 13, 17};

  std::vector<std::optional<Rk3Candidate>> slots(static_cast<std::size_t>(samples));
  const auto evaluate = [&](int k) {
    double x[7];
    for (int d = 0; d < 7; ++d)
      x[d] = dims[d]->lo + (dims[d]->hi - dims[d]->lo) * halton(k + 1, bases[d]);
    const Rk3FamilySpec spec{x[0], x[1], x[2], x[3], x[4], x[5], x[6]};
    try {
      ButcherPaird pair = construct_rk3(spec);
      auto report = certify_unconditional(pair, lipschitz);
      const double score = std::min(report.lambda_Q, report.lambda_H0);
      slots[static_cast<std::size_t>(k)] = Rk3Candidate{spec, std::move(pair), std::move(report), score};
    } catch (const std::exception&) {
      // Unconstructible samples are dropped.
    }
  };

  // Each worker owns a strided subset of slots, so ordering never depends on
  // scheduling.
  const int workers =
      std::clamp(static_cast<int>(std::thread::hardware_concurrency()), 1, std::max(1, samples / 64));
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (int k = w; k < samples; k += workers) evaluate(k);
    });
  for (int k = 0; k < samples; k += workers) evaluate(k);
  for (auto& t : pool) t.join();

  std::vector<std::pair<int, Rk3Candidate>> kept;
  for (int k = 0; k < samples; ++k)
    if (slots[static_cast<std::size_t>(k)]) kept.emplace_back(k, std::move(*slots[static_cast<std::size_t>(k)]));
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (a.second.score != b.second.score) return a.second.score > b.second.score;
    if (a.second.report.lambda_H2_0 != b.second.report.lambda_H2_0)
      return a.second.report.lambda_H2_0 > b.second.report.lambda_H2_0;
    return a.first < b.first;
  });
  std::vector<Rk3Candidate> out;
  out.reserve(kept.size());
  for (auto& [k, cand] : kept) out.push_back(std::move(cand));
  return out;
}

Rk3FamilySpec parse_rk3_spec(std::string_view text) {
  std::map<std::string, double> values;
  std::size_t pos = 0;
  int line_no = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw std::invalid_argument("spec line " + std::to_string(line_no) + ": expected key=value");
    const std::string key(trim(line.substr(0, eq)));
    values[key] = parse_value(trim(line.substr(eq + 1)), key);
  }
  const auto get = [&](const char* key) {
    const auto it = values.find(key);
    if (it == values.end()) throw std::invalid_argument(std::string("spec is missing '") + key + "'");
    return it->second;
  };
  for (const auto& [key, v] : values) {
    static const char* known[] = {"c2", "c3", "c4", "zeta", "zeta_hat", "free_A", "free_Ahat"};
    if (std::find_if(std::begin(known), std::end(known), [&](const char* k) { return key == k; }) ==
        std::end(known))
      throw std::invalid_argument("unknown spec key '" + key + "'");
  }
  return {get("c2"), get("c3"), get("c4"), get("zeta"), get("zeta_hat"), get("free_A"), get("free_Ahat")};
}

std::string render_rk3_spec(const Rk3FamilySpec& s) {
  std::string out;
  char buf[64];
  const std::pair<const char*, double> rows[] = {{"c2", s.c2},         {"c3", s.c3},
                                                 {"c4", s.c4},         {"zeta", s.zeta},
                                                 {"zeta_hat", s.zeta_hat}, {"free_A", s.free_A},
                                                 {"free_Ahat", s.free_Ahat}};
  for (const auto& [k, v] : rows) {
    const auto end = std::to_chars(buf, buf + sizeof buf, v).ptr;  // shortest round-trip form
    out += std::string(k) + "=" + std::string(buf, end) + "\n";
  }
  return out;
}

}  // namespace imexrk
