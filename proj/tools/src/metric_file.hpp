#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "einmob/constructions.hpp"
#include "einmob/metric.hpp"
#include "einmob/tensor.hpp"
#include "json.hpp"

namespace einmob::cli {

using json = nlohmann::ordered_json;

/// Bad or inconsistent input document (exit code 1).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// In-memory form of a metric definition file.
struct MetricDocument {
  std::string name;
  MetricField metric;
  std::vector<std::pair<std::string, TensorField>> solutions;      // symmetric (0,2)
  std::vector<std::pair<std::string, TensorField>> vector_fields;  // (1,0)
  std::optional<double> B;                                         // optional override

  [[nodiscard]] const TensorField* solution(const std::string& name) const;
  [[nodiscard]] const TensorField* vector_field(const std::string& name) const;
};

/// Parses a metric file document. The metric and each solution may be given
/// as a lower triangle (row i has i+1 entries) or as a full square matrix;
/// full matrices must be symmetric.
[[nodiscard]] MetricDocument parse_metric_json(const json& j);

/// Loads a file path, or a catalog entry written as `catalog:NAME`.
[[nodiscard]] MetricDocument load_metric(const std::string& source);

[[nodiscard]] MetricDocument from_catalog(const CatalogEntry& e);

/// Serialises with lower-triangle matrices.
[[nodiscard]] json to_json(const MetricDocument& doc);

}  // namespace einmob::cli
