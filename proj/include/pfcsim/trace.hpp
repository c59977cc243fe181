#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace pfc {

/// One emitted sample of a scenario run.
struct TraceRow {
  double t = 0.0;
  double i = 0.0;
  double v = 0.0;
  double u = 0.0;
  double i_hat = 0.0;
  double E_hat = 0.0;
  double G_hat = 0.0;
  double mu1 = 0.0;
  double mu2 = 0.0;
  double zeta1 = 0.0;
  double zeta2 = 0.0;
  double zeta3 = 0.0;
  double V_lyap = 0.0;
  double V_lyap_rate = 0.0;
  double e_or_e_hat = 0.0;
  double pe_min_eig = 0.0;
  bool saturated = false;
};

inline constexpr std::array<std::string_view, 17> kTraceColumns = {
    "t",     "i",     "v",     "u",      "i_hat",       "E_hat",      "G_hat",
    "mu1",   "mu2",   "zeta1", "zeta2",  "zeta3",       "V_lyap",     "V_lyap_rate",
    "e_or_e_hat",     "pe_min_eig",      "saturated"};

/// Linear interpolation of every numeric field; saturated is taken from b.
TraceRow interpolate(const TraceRow& a, const TraceRow& b, double t);

/// CSV with a header row; doubles use 17 significant digits.
void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& rows);
void write_trace_csv(const std::string& path, const std::vector<TraceRow>& rows);

/// Throws std::runtime_error on I/O or format errors.
std::vector<TraceRow> read_trace_csv(std::istream& in);
std::vector<TraceRow> read_trace_csv(const std::string& path);

}  // namespace pfc
