#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "irs/experiment.hpp"

namespace irs {

/// "5 dBm" or "-80 dBm" to watts; a bare number is taken as watts.
double parse_power(std::string_view text);
/// "-30 dB" to a linear ratio; a bare number is taken as linear.
double parse_ratio(std::string_view text);
/// Rician factor: "3 dB", "rayleigh", "-inf dB", "inf" or a bare linear number.
double parse_rician(std::string_view text);
/// "inf" (continuous) or a bit count q >= 0.
PhaseResolution parse_resolution(std::string_view text);
/// Comma-separated numbers, e.g. "40,45,50".
std::vector<double> parse_grid(std::string_view text);

/// K users equally spaced on the x >= 0 half of a circle in the z = center.z
/// plane, at angles (k - 1/2) pi / K measured from the -y axis.
std::vector<Vec3> semicircle_users(const Vec3& center, double radius, int count);

/// Parses a YAML experiment description. Throws ConfigError.
ExperimentSpec parse_experiment(const std::string& yaml_text);
/// Loads a YAML file. Throws ConfigError naming the file when it is missing
/// or malformed.
ExperimentSpec load_experiment(const std::string& path);

/// Applies IRS_SEED and IRS_THREADS when set. Throws ConfigError on bad values.
void apply_env_overrides(ExperimentSpec& spec);

}  // namespace irs
