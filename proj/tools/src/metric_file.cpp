#include "metric_file.hpp"

#include <fstream>
#include <set>

#include "einmob/calculus.hpp"
#include "einmob/chart.hpp"
#include "einmob/parse.hpp"

namespace einmob::cli {

namespace {

const json& field(const json& j, const char* key) {
  if (!j.contains(key)) throw InputError(std::string("missing field '") + key + "'");
  return j.at(key);
}

Expr parse_entry(const Chart& chart, const json& v, const std::string& where) {
  if (v.is_number()) return Expr(rationalize(v.get<double>()));
  if (!v.is_string()) throw InputError(where + ": expected an expression string");
  try {
    return chart.parse(v.get<std::string>());
  } catch (const ParseError& e) {
    throw InputError(where + ": " + e.what());
  }
}

std::vector<Expr> parse_matrix(const Chart& chart, const json& m, const std::string& what) {
  const int n = chart.dimension();
  if (!m.is_array() || static_cast<int>(m.size()) != n) {
    throw InputError(what + ": expected " + std::to_string(n) + " rows");
  }
  bool triangle = true;
  bool square = true;
  for (int i = 0; i < n; ++i) {
    if (!m[static_cast<std::size_t>(i)].is_array()) throw InputError(what + ": rows must be arrays");
    const int len = static_cast<int>(m[static_cast<std::size_t>(i)].size());
    triangle = triangle && len == i + 1;
    square = square && len == n;
  }
  if (!triangle && !square) throw InputError(what + ": rows must form a lower triangle or a square matrix");
  std::vector<Expr> c(static_cast<std::size_t>(n * n), Expr(0));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      const std::string where = what + "[" + std::to_string(i) + "][" + std::to_string(j) + "]";
      Expr e = parse_entry(chart, m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)], where);
      c[static_cast<std::size_t>(i * n + j)] = e;
      c[static_cast<std::size_t>(j * n + i)] = e;
    }
  }
  if (square && !triangle) {
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const std::string where = what + "[" + std::to_string(i) + "][" + std::to_string(j) + "]";
        Expr e = parse_entry(chart, m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)], where);
        if (!is_zero(e - c[static_cast<std::size_t>(j * n + i)], chart).is_zero()) {
          throw InputError(what + " is not symmetric at (" + std::to_string(i) + ", " + std::to_string(j) + ")");
        }
      }
    }
  }
  return c;
}

json lower_triangle(const TensorField& t) {
  const int n = t.dimension();
  json rows = json::array();
  for (int i = 0; i < n; ++i) {
    json row = json::array();
    for (int j = 0; j <= i; ++j) row.push_back(to_string(t[{i, j}]));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

const TensorField* MetricDocument::solution(const std::string& n) const {
  for (const auto& [k, v] : solutions) {
    if (k == n) return &v;
  }
  return nullptr;
}

const TensorField* MetricDocument::vector_field(const std::string& n) const {
  for (const auto& [k, v] : vector_fields) {
    if (k == n) return &v;
  }
  return nullptr;
}

MetricDocument parse_metric_json(const json& j) {
  if (!j.is_object()) throw InputError("metric file must be a JSON object");
  MetricDocument doc;
  doc.name = j.value("name", std::string("metric"));
  std::vector<std::string> coords;
  for (const auto& c : field(j, "coordinates")) {
    if (!c.is_string()) throw InputError("coordinates must be strings");
    coords.push_back(c.get<std::string>());
  }
  if (coords.empty()) throw InputError("at least one coordinate is required");
  if (std::set<std::string>(coords.begin(), coords.end()).size() != coords.size()) {
    throw InputError("duplicate coordinate names");
  }
  const auto n = coords.size();
  std::vector<Interval> box;
  if (j.contains("sample_box")) {
    const auto& b = j.at("sample_box");
    if (!b.is_array() || b.size() != n) throw InputError("sample_box needs one interval per coordinate");
    for (const auto& iv : b) {
      if (!iv.is_array() || iv.size() != 2 || !iv[0].is_number() || !iv[1].is_number()) {
        throw InputError("sample_box entries must be [lo, hi]");
      }
      Interval I{iv[0].get<double>(), iv[1].get<double>()};
      if (!(I.lo < I.hi)) throw InputError("sample_box interval is empty");
      box.push_back(I);
    }
  } else {
    box.assign(n, Interval{-1.0, 1.0});
  }
  std::map<std::string, double> constants;
  if (j.contains("constants")) {
    for (const auto& [k, v] : j.at("constants").items()) {
      if (!v.is_number()) throw InputError("constant '" + k + "' must be a number");
      constants[k] = v.get<double>();
    }
  }
  Chart bare(doc.name, coords, box, {}, constants);
  std::vector<Expr> excluded;
  if (j.contains("excluded")) {
    for (const auto& e : j.at("excluded")) excluded.push_back(parse_entry(bare, e, "excluded"));
  }
  Chart chart(doc.name, coords, box, excluded, constants);
  auto comps = parse_matrix(chart, field(j, "metric"), "metric");
  doc.metric = MetricField(chart, comps);
  if (j.contains("solutions")) {
    for (const auto& s : j.at("solutions")) {
      const std::string name = field(s, "name").get<std::string>();
      doc.solutions.emplace_back(name, TensorField::symmetric(chart, parse_matrix(chart, field(s, "matrix"), name)));
    }
  }
  if (j.contains("vector_fields")) {
    for (const auto& v : j.at("vector_fields")) {
      const std::string name = field(v, "name").get<std::string>();
      const auto& c = field(v, "components");
      if (!c.is_array() || c.size() != n) throw InputError(name + ": expected one component per coordinate");
      std::vector<Expr> comps_v;
      for (std::size_t i = 0; i < n; ++i) comps_v.push_back(parse_entry(chart, c[i], name));
      doc.vector_fields.emplace_back(name, TensorField::vector(chart, comps_v));
    }
  }
  if (j.contains("B")) doc.B = j.at("B").get<double>();
  return doc;
}

MetricDocument load_metric(const std::string& source) {
  const std::string prefix = "catalog:";
  if (source.rfind(prefix, 0) == 0) {
    const std::string name = source.substr(prefix.size());
    try {
      return from_catalog(catalog_entry(name));
    } catch (const std::invalid_argument& e) {
      throw InputError(e.what());
    }
  }
  std::ifstream in(source);
  if (!in) throw InputError("cannot open '" + source + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError("'" + source + "': " + e.what());
  }
  return parse_metric_json(j);
}

MetricDocument from_catalog(const CatalogEntry& e) {
  MetricDocument doc;
  doc.name = e.name;
  doc.metric = e.metric;
  for (const auto& s : e.solutions) doc.solutions.emplace_back(s.name, s.triple.L);
  if (e.xi) doc.vector_fields.emplace_back("xi", *e.xi);
  for (const auto& f : e.parallel_fields) doc.vector_fields.emplace_back(f.name, f.field);
  if (!e.solutions.empty()) doc.B = e.solutions.front().triple.B;
  return doc;
}

json to_json(const MetricDocument& doc) {
  const Chart& c = doc.metric.chart();
  json j;
  j["name"] = doc.name;
  j["coordinates"] = c.coordinates();
  j["metric"] = lower_triangle(doc.metric.as_tensor());
  json box = json::array();
  for (const auto& iv : c.box()) box.push_back({iv.lo, iv.hi});
  j["sample_box"] = box;
  json ex = json::array();
  for (const auto& e : c.excluded()) ex.push_back(to_string(e));
  j["excluded"] = ex;
  json consts = json::object();
  for (const auto& [k, v] : c.constants()) consts[k] = v;
  j["constants"] = consts;
  json sols = json::array();
  for (const auto& [name, t] : doc.solutions) sols.push_back({{"name", name}, {"matrix", lower_triangle(t)}});
  j["solutions"] = sols;
  json vfs = json::array();
  for (const auto& [name, v] : doc.vector_fields) {
    json comps = json::array();
    for (const auto& e : v.components()) comps.push_back(to_string(e));
    vfs.push_back({{"name", name}, {"components", comps}});
  }
  j["vector_fields"] = vfs;
  if (doc.B) j["B"] = *doc.B;
  return j;
}

}  // namespace einmob::cli
