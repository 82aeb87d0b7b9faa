#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "irs/experiment.hpp"

namespace irs {

/// Columns: sweep_value,scheme,q,user_rates,weighted_sum_rate,std_error
/// [,wall_time]. user_rates is ';'-joined, q is "-" for resolution-free
/// schemes and "inf" for continuous phases. Floats use 6 significant digits.
void emit_csv(std::ostream& os, const std::vector<ResultRecord>& records, bool include_timing = false);

/// Writes to `path`; throws std::runtime_error naming the file on I/O failure.
void emit_csv(const std::string& path, const std::vector<ResultRecord>& records, bool include_timing = false);

}  // namespace irs
