#include "imexrk/tableau_io.hpp"

#include <algorithm>
#include <charconv>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <vector>

namespace imexrk {
namespace {

struct Token {
  std::string_view text;
  int line;
  int entry;
};

struct ParsedNumber {
  double value;
  int fraction_digits;  // -1 for exact literals (integers, p/q)
};

bool parse_integer(std::string_view s, std::int64_t& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

ParsedNumber parse_number(const Token& tok) {
  const std::string_view s = tok.text;
  const auto fail = [&]() -> ParsedNumber {
    throw TableauError("malformed number '" + std::string(s) + "' at line " +
                           std::to_string(tok.line) + ", entry " + std::to_string(tok.entry),
                       tok.line, tok.entry);
  };
  if (const auto slash = s.find('/'); slash != std::string_view::npos) {
    std::int64_t p = 0, q = 0;
    if (!parse_integer(s.substr(0, slash), p) || !parse_integer(s.substr(slash + 1), q) || q == 0)
      return fail();
    return {static_cast<double>(p) / static_cast<double>(q), -1};
  }
  std::string_view body = s;
  if (!body.empty() && body.front() == '+') body.remove_prefix(1);
  double value = 0;
  const auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), value);
  if (ec != std::errc() || ptr != body.data() + body.size() || !std::isfinite(value)) return fail();

  // Printing precision: digits after the point, shifted by any exponent.
  int digits = -1;
  const auto dot = body.find('.');
  const auto exp = body.find_first_of("eE");
  const auto mantissa_end = exp == std::string_view::npos ? body.size() : exp;
  if (dot != std::string_view::npos) digits = static_cast<int>(mantissa_end - dot - 1);
  if (exp != std::string_view::npos) {
    std::int64_t e = 0;
    if (!parse_integer(body.substr(exp + 1), e)) return fail();
    digits = std::max(digits, 0) - static_cast<int>(e);
    if (digits <= 0) digits = -1;
  }
  return {value, digits};
}

std::vector<std::vector<Token>> tokenize(std::string_view text) {
  std::vector<std::vector<Token>> lines;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    std::vector<Token> toks;
    std::size_t i = 0;
    int entry = 0;
    while (i < line.size()) {
      while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      std::size_t j = i;
      while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
      if (j > i) toks.push_back({line.substr(i, j - i), line_no, ++entry});
      i = j;
    }
    if (!toks.empty()) lines.push_back(std::move(toks));
    if (end == text.size()) break;
    pos = end + 1;
  }
  return lines;
}

}  // namespace

ButcherPaird parse_tableau(std::string_view text) {
  const auto lines = tokenize(text);
  if (lines.empty()) throw TableauError("empty tableau");
  if (lines[0].size() != 1)
    throw TableauError("first line must hold the stage count", lines[0][0].line, 1);
  std::int64_t s = 0;
  if (!parse_integer(lines[0][0].text, s) || s < 1 || s > 64)
    throw TableauError("invalid stage count '" + std::string(lines[0][0].text) + "'",
                       lines[0][0].line, 1);
  if (static_cast<std::int64_t>(lines.size()) != 2 * s + 1) {
    const int line = lines.back().front().line;
    throw TableauError("expected " + std::to_string(2 * s) + " coefficient rows, found " +
                           std::to_string(lines.size() - 1),
                       line, 0);
  }

  Matrix<double> A(s, s), Ahat(s, s);
  int digits = -1;
  for (std::int64_t r = 0; r < 2 * s; ++r) {
    const auto& row = lines[static_cast<std::size_t>(r + 1)];
    if (static_cast<std::int64_t>(row.size()) != s)
      throw TableauError("row length mismatch at line " + std::to_string(row.front().line) +
                             ": expected " + std::to_string(s) + " entries, found " +
                             std::to_string(row.size()),
                         row.front().line, 0);
    for (std::int64_t k = 0; k < s; ++k) {
      const ParsedNumber num = parse_number(row[static_cast<std::size_t>(k)]);
      digits = std::max(digits, num.fraction_digits);
      (r < s ? A(r, k) : Ahat(r - s, k)) = num.value;
    }
  }

  const double tolerance =
      digits < 0 ? 1e-12 : std::max(1e-10, static_cast<double>(s) * std::pow(10.0, -digits));
  ButcherPaird pair = ButcherPaird::from_matrices(std::move(A), std::move(Ahat), tolerance);

  // Row-sum mismatch is judged at the parse tolerance, never tighter than 1e-10.
  pair.tolerance = std::max(tolerance, 1e-10);
  auto diags = validate(pair);
  pair.tolerance = tolerance;
  if (!diags.empty()) {
    const Diagnostic& d = diags.front();
    const int line = d.row == 0 ? 0
                     : (d.kind == DiagnosticKind::ExplicitDiagonalZero ||
                        d.kind == DiagnosticKind::ExplicitNotLowerTriangular)
                         ? lines[static_cast<std::size_t>(s + d.row)].front().line
                         : lines[static_cast<std::size_t>(d.row)].front().line;
    std::string what = d.message;
    for (std::size_t i = 1; i < diags.size(); ++i) what += "; " + diags[i].message;
    throw TableauError(what, line, d.column);
  }
  return pair;
}

ButcherPaird read_tableau_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw TableauError("cannot open tableau file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_tableau(ss.str());
}

std::string render_tableau(const ButcherPaird& pair, std::string_view comment) {
  std::string out;
  if (!comment.empty()) {
    std::istringstream lines{std::string(comment)};
    for (std::string l; std::getline(lines, l);) out += "# " + l + "\n";
  }
  const int s = pair.stages();
  out += std::to_string(s) + "\n";
  char buf[40];
  for (const auto* M : {&pair.A, &pair.Ahat}) {
    for (int i = 0; i < s; ++i) {
      for (int j = 0; j < s; ++j) {
        const double v = (*M)(i, j);
        out.append(buf, std::to_chars(buf, buf + sizeof buf, v).ptr);  // shortest round-trip form
        out += j + 1 < s ? " " : "\n";
      }
    }
  }
  return out;
}

}  // namespace imexrk
