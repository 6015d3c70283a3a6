#include "optexec/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace optexec {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  // Shortest representation that round-trips a double.
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, x);
    double back = 0.0;
    std::sscanf(buf, "%lf", &back);
    if (back == x) return buf;
  }
  return buf;
}

void write_profile_csv(const std::string& path, const Strategy& s) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_profile_csv: cannot open " + path);
  out << "i,t_mid,v_i,volume_i\n";
  const double dt = s.grid.dt();
  for (int i = 1; i <= s.grid.N; ++i)
    out << i << ',' << format_double(s.grid.midpoint(i)) << ','
        << format_double(s.rates[i - 1]) << ',' << format_double(s.rates[i - 1] * dt)
        << '\n';
}

void write_curve_csv(const std::string& path,
                     const std::vector<std::pair<double, double>>& curve) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_curve_csv: cannot open " + path);
  out << "hbar,squared_residual\n";
  for (const auto& [h, e] : curve)
    out << format_double(h) << ',' << format_double(e) << '\n';
}

}  // namespace optexec
