#include "pfcsim/trace.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "pfcsim/config.hpp"

namespace pfc {

namespace {

// Row is TraceRow or const TraceRow.
template <typename Row, typename F>
void for_each_numeric(Row& r, F&& f) {
  f(r.t), f(r.i), f(r.v), f(r.u), f(r.i_hat), f(r.E_hat), f(r.G_hat), f(r.mu1), f(r.mu2),
      f(r.zeta1), f(r.zeta2), f(r.zeta3), f(r.V_lyap), f(r.V_lyap_rate), f(r.e_or_e_hat),
      f(r.pe_min_eig);
}

}  // namespace

TraceRow interpolate(const TraceRow& a, const TraceRow& b, double t) {
  const double span = b.t - a.t;
  const double w = span > 0.0 ? (t - a.t) / span : 1.0;
  TraceRow out = a;
  std::size_t idx = 0;
  std::array<double, 16> bvals{};
  for_each_numeric(b, [&](const double& x) { bvals[idx++] = x; });
  idx = 0;
  for_each_numeric(out, [&](double& x) {
    x = x + w * (bvals[idx] - x);
    ++idx;
  });
  out.t = t;
  out.saturated = b.saturated;
  return out;
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& rows) {
  for (std::size_t c = 0; c < kTraceColumns.size(); ++c) {
    if (c) out << ',';
    out << kTraceColumns[c];
  }
  out << '\n';
  std::string line;
  for (const TraceRow& r : rows) {
    line.clear();
    for_each_numeric(r, [&](const double& x) {
      line += format_double(x);
      line += ',';
    });
    line += r.saturated ? '1' : '0';
    line += '\n';
    out << line;
  }
}

void write_trace_csv(const std::string& path, const std::vector<TraceRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open trace file '" + path + "' for writing");
  write_trace_csv(out, rows);
  if (!out) throw std::runtime_error("failed writing trace file '" + path + "'");
}

std::vector<TraceRow> read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("trace: missing header");
  std::string expected;
  for (std::size_t c = 0; c < kTraceColumns.size(); ++c) {
    if (c) expected += ',';
    expected += kTraceColumns[c];
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != expected) throw std::runtime_error("trace: unexpected header '" + line + "'");

  std::vector<TraceRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    TraceRow r;
    const char* p = line.data();
    const char* end = line.data() + line.size();
    auto fail = [&] {
      throw std::runtime_error("trace: malformed line " + std::to_string(line_no));
    };
    for_each_numeric(r, [&](double& x) {
      auto [next, ec] = std::from_chars(p, end, x);
      if (ec != std::errc{} || next == end || *next != ',') fail();
      p = next + 1;
    });
    if (end - p != 1 || (*p != '0' && *p != '1')) fail();
    r.saturated = *p == '1';
    rows.push_back(r);
  }
  return rows;
}

std::vector<TraceRow> read_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace file '" + path + "'");
  return read_trace_csv(in);
}

}  // namespace pfc
