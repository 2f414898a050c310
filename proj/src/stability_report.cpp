#include "imexrk/stability.hpp"

#include <cstdio>
#include <string>

namespace imexrk {
namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

const char* verdict(const StabilityReport<double>& r) {
  return r.unconditional ? "CERTIFIED" : "NOT CERTIFIED";
}

}  // namespace

std::string render_report_text(const StabilityReport<double>& r) {
  std::string out;
  out += "lambda_min(Q)     = " + num(r.lambda_Q) + "\n";
  out += "lambda_min(H0)    = " + num(r.lambda_H0) + "\n";
  out += "lambda_min(H2(0)) = " + num(r.lambda_H2_0) + "\n";
  out += "Lipschitz L       = " + num(r.lipschitz) + "\n";
  if (r.unconditional) {
    out += "alpha >= alpha0   = " + num(*r.alpha0) + "\n";
    out += "beta  >= beta0    = " + num(*r.beta0) + "  (beta0/L = " + num(*r.beta0_per_L) + ")\n";
  }
  out += std::string("verdict: ") + verdict(r) + "\n";
  if (!r.diagnostics.empty()) out += "notes: " + r.diagnostics + "\n";
  return out;
}

std::string render_report_kv(const StabilityReport<double>& r) {
  std::string out;
  out += "lambda_Q=" + num(r.lambda_Q) + "\n";
  out += "lambda_H0=" + num(r.lambda_H0) + "\n";
  out += "lambda_H2_0=" + num(r.lambda_H2_0) + "\n";
  out += "L=" + num(r.lipschitz) + "\n";
  out += "alpha0=" + (r.alpha0 ? num(*r.alpha0) : std::string("none")) + "\n";
  out += "beta0=" + (r.beta0 ? num(*r.beta0) : std::string("none")) + "\n";
  out += std::string("verdict=") + verdict(r) + "\n";
  return out;
}

}  // namespace imexrk
