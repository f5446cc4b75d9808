#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "metric_file.hpp"

namespace einmob::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_input = 1;
inline constexpr int exit_degenerate = 2;
inline constexpr int exit_failed = 3;
inline constexpr int exit_error = 4;

struct CommonOptions {
  std::uint64_t seed = 0;
  double tol = 1e-9;
  std::size_t trials = 20;
};

/// Output of a command: a JSON report, or plain text for TSV emission.
struct Outcome {
  json report;
  std::optional<std::string> text;
  int exit_code = exit_ok;
};

[[nodiscard]] Outcome cmd_check(const MetricDocument& doc, const CommonOptions& opt);
[[nodiscard]] Outcome cmd_verify(const MetricDocument& doc, const std::optional<std::string>& solution,
                                 const CommonOptions& opt);

struct MobilityArgs {
  std::string fiber = "prolongation";
  int order = 3;
  std::size_t samples = 3;
  std::size_t loops = 2;
  double rank_tol = 1e-8;
};
[[nodiscard]] Outcome cmd_mobility(const MetricDocument& doc, const MobilityArgs& args, const CommonOptions& opt);

[[nodiscard]] Outcome cmd_cone(const MetricDocument& doc, int sign);
[[nodiscard]] Outcome cmd_product(const MetricDocument& a, const MetricDocument& b);
[[nodiscard]] Outcome cmd_enumerate(int n, const std::string& signature, const std::string& regime);
[[nodiscard]] Outcome cmd_figure1(int from, int to);

struct GeodesicArgs {
  std::size_t seeds = 20;
  int steps = 40;
  double step = 0.02;
  double minor_tol = 1e-6;
};
[[nodiscard]] Outcome cmd_geodesic_test(const MetricDocument& a, const MetricDocument& b, const GeodesicArgs& args,
                                        const CommonOptions& opt);

[[nodiscard]] Outcome cmd_catalog(const std::optional<std::string>& emit);

/// Error report printed on standard output when a command aborts.
[[nodiscard]] json error_report(const std::string& command, const std::string& message, int exit_code);

}  // namespace einmob::cli
