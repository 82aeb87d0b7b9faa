#include "irs/csv.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace irs {

namespace {

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

}  // namespace

void emit_csv(std::ostream& os, const std::vector<ResultRecord>& records, bool include_timing) {
  os << "sweep_value,scheme,q,user_rates,weighted_sum_rate,std_error";
  if (include_timing) os << ",wall_time";
  os << '\n';
  for (const auto& r : records) {
    os << fmt(r.sweep_value) << ',' << to_string(r.scheme) << ',' << (r.resolution ? r.resolution->to_string() : "-")
       << ',';
    for (Eigen::Index k = 0; k < r.user_rates.size(); ++k) os << (k ? ";" : "") << fmt(r.user_rates(k));
    os << ',' << fmt(r.weighted_sum_rate) << ',' << fmt(r.std_error);
    if (include_timing) os << ',' << fmt(r.wall_time);
    os << '\n';
  }
}

void emit_csv(const std::string& path, const std::vector<ResultRecord>& records, bool include_timing) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  emit_csv(out, records, include_timing);
  out.flush();
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace irs
