#pragma once

// Line-based run configuration: `key = value` per line, `#` starts a comment.
// Lists are comma separated; exponent pairs are written `q:p` (`inf` allowed).

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "magdirac/estimates.hpp"
#include "magdirac/spectrum.hpp"

namespace magdirac {

enum class Task {
  Spectrum,
  HeatCheck,
  SchrodingerCheck,
  SubordinationCheck,
  DiracCheck,
  DecayScan,
  BernsteinScan,
  StrichartzScan,
  NormCheck,
  SquareCheck,
};

std::string to_string(Task task);

struct RunConfig {
  Task task = Task::Spectrum;
  FieldParams field;
  std::optional<double> R;  // nullopt: chosen from the Gaussian tail of the truncation
  int Nr = 512;
  int Ntheta = 64;
  int K = 24;
  int L = 24;

  int j_min = 3;
  int j_max = 5;
  double t_scaled_min = 1.0;
  double t_scaled_max = 64.0;
  int t_points = 13;
  std::vector<Spin> spins{Spin::Up, Spin::Down};
  double T = 1.0;
  std::vector<std::pair<double, double>> pairs;
  std::vector<Flow> flows;
  std::vector<double> s_list;
  std::vector<double> p_list;
  std::vector<double> times;
  int family_size = 20;
  int family_modes = 6;
  std::uint64_t seed = 1;

  std::filesystem::path out = "out";
  std::optional<std::filesystem::path> cache;

  /// Range checks; ValidationError naming the offending field.
  void validate() const;
  /// Every key with its resolved value, one per line, in a fixed order.
  std::string canonical() const;
};

/// Parses and validates. Keys not given take the documented defaults, with
/// task-dependent defaults for the list-valued keys.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace magdirac
