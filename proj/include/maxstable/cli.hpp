#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "maxstable/gaussian_model.hpp"
#include "maxstable/inference.hpp"

namespace maxstable::cli {

enum class Mode { sample, estimate, kde, oracle, grid };
enum class Format { csv, json, table };

struct Config {
  Mode mode = Mode::estimate;
  CovarianceSpec cov = CovarianceSpec::brownian({1.0 / 3.0, 2.0 / 3.0, 1.0});
  std::vector<std::vector<double>> points;
  double budget = 1e4;
  BudgetUnit unit = BudgetUnit::draws;
  double alpha = 0.05;
  std::uint64_t seed = 1;
  double a = 0.5;
  double gamma = 0.5;
  int threads = 1;
  std::string output = "-";
  Format format = Format::csv;

  // grid mode
  double grid_lo1 = -1.0, grid_hi1 = 1.0, grid_lo2 = -1.0, grid_hi2 = 1.0;
  int grid_size = 21;
  std::vector<double> grid_fixed;

  // oracle mode
  std::int64_t oracle_samples = 1000000;
  double fd_step = 0.2;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

/// "brownian:t1,t2,..." (entries may be fractions like 1/3) or "matrix:PATH"
/// with one whitespace- or comma-separated row per line.
CovarianceSpec parse_covariance(const std::string& text);

/// A comma-separated list of numbers, fractions allowed.
std::vector<double> parse_vector(const std::string& text);

/// Points separated by ';', or "@PATH" with one point per line.
std::vector<std::vector<double>> parse_points(const std::string& text);

/// Parses argv into `config`. Returns an exit code when the program should
/// stop (help requested or bad arguments), after printing to `err`.
std::optional<int> parse(int argc, const char* const* argv, Config& config, std::ostream& out,
                         std::ostream& err);

/// Runs the configured mode, writing results to `out`. Library errors are
/// reported on `err` and mapped to exit codes.
int run(const Config& config, std::ostream& out, std::ostream& err);

/// parse + run, honouring --output.
int main(int argc, const char* const* argv);

}  // namespace maxstable::cli
