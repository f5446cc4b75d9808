#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "einmob/curvature.hpp"
#include "einmob/enumerate.hpp"
#include "einmob/mobility.hpp"
#include "einmob/projective.hpp"

namespace einmob::cli {

namespace {

json header(const std::string& command) {
  json j;
  j["schema"] = 1;
  j["command"] = command;
  return j;
}

void echo(json& j, const CommonOptions& opt) {
  j["tol"] = opt.tol;
  j["seed"] = opt.seed;
  j["trials"] = opt.trials;
}

CheckOptions check_options(const CommonOptions& opt) {
  CheckOptions c;
  c.trials = opt.trials;
  c.seed = opt.seed;
  c.tol = opt.tol;
  return c;
}

json residual_json(const ResidualReport& r) {
  json j;
  j["max_abs"] = r.max_abs;
  j["scale"] = r.scale;
  j["witness"] = r.witness;
  return j;
}

// B of the document: the explicit override, or -Scal/(n(n-1)) when Einstein.
std::optional<double> resolve_B(const MetricDocument& doc, const CheckOptions& opt) {
  if (doc.B) return doc.B;
  EinsteinReport er = is_einstein(doc.metric, opt);
  if (er.einstein) return er.B;
  return std::nullopt;
}

json report_json(const MobilityReport& r) {
  json j;
  j["method"] = r.method;
  j["fiber"] = fiber_name(r.fiber);
  j["N"] = r.N;
  j["D"] = r.D;
  j["stabilized"] = r.stabilized;
  j["order"] = r.order;
  j["rank_sequence"] = r.rank_sequence;
  j["samples"] = r.samples;
  j["threshold"] = r.threshold;
  j["spectral_gap"] = std::isfinite(r.spectral_gap) ? json(r.spectral_gap) : json(nullptr);
  j["error_floor"] = r.error_floor;
  j["basis_point"] = r.basis_point;
  if (r.known_count > 0) {
    j["known_count"] = r.known_count;
    j["known_rank"] = r.known_rank;
    j["known_residual"] = r.known_residual;
    j["exact"] = r.exact;
  }
  if (r.k) j["k"] = *r.k;
  if (r.l) j["l"] = *r.l;
  if (r.counting_consistent) j["counting_consistent"] = *r.counting_consistent;
  if (r.signature_class) j["signature_class"] = class_name(*r.signature_class);
  if (r.in_admissible_list) j["in_admissible_list"] = *r.in_admissible_list;
  return j;
}

}  // namespace

json error_report(const std::string& command, const std::string& message, int exit_code) {
  json j = header(command);
  j["error"] = message;
  j["exit_code"] = exit_code;
  return j;
}

Outcome cmd_check(const MetricDocument& doc, const CommonOptions& opt) {
  const CheckOptions c = check_options(opt);
  const MetricField& g = doc.metric;
  Outcome out;
  json& j = out.report;
  j = header("check");
  echo(j, opt);
  j["name"] = doc.name;
  j["dimension"] = g.dimension();
  j["symmetric"] = true;
  SignatureCounts s = signature(g, opt.trials, opt.seed);
  j["nondegenerate"] = true;
  j["signature"] = {{"plus", s.plus}, {"minus", s.minus}};
  EinsteinReport er = is_einstein(g, c);
  j["scal"] = er.scal;
  j["einstein"] = er.einstein;
  j["einstein_residual"] = er.max_residual;
  if (er.einstein) {
    j["B"] = er.B;
  } else {
    j["witness"] = {{"point", er.witness}, {"component", er.witness_component}};
  }
  ConstantCurvatureReport cc = is_constant_curvature(g, c);
  j["constant_curvature"] = cc.constant;
  j["constant_curvature_residual"] = cc.max_residual;
  if (cc.constant) j["sectional_curvature"] = cc.c;
  return out;
}

Outcome cmd_verify(const MetricDocument& doc, const std::optional<std::string>& solution, const CommonOptions& opt) {
  const CheckOptions c = check_options(opt);
  Outcome out;
  json& j = out.report;
  j = header("verify");
  echo(j, opt);
  j["name"] = doc.name;
  std::vector<std::pair<std::string, TensorField>> chosen;
  if (solution) {
    const TensorField* t = doc.solution(*solution);
    if (!t) throw InputError("no solution named '" + *solution + "'");
    chosen.emplace_back(*solution, *t);
  } else {
    chosen = doc.solutions;
  }
  if (chosen.empty()) throw InputError("the metric file has no solutions to verify");
  const std::optional<double> B = resolve_B(doc, c);
  if (B) j["B"] = *B;
  bool all = true;
  double worst = 0;
  json list = json::array();
  for (const auto& [name, L] : chosen) {
    json s;
    s["name"] = name;
    MainReport m = verify_main(doc.metric, L, c);
    s["main"] = {{"pass", m.pass}, {"affine", m.affine}, {"residual", residual_json(m.residual)}};
    bool pass = m.pass;
    worst = std::max(worst, m.residual.max_abs);
    if (B) {
      try {
        ExtSysReport e = verify_extsys(doc.metric, make_triple(doc.metric, L, *B), c);
        s["extended_system"] = {{"pass", e.pass},
                                {"first", residual_json(e.first)},
                                {"second", residual_json(e.second)},
                                {"third", residual_json(e.third)}};
        pass = pass && e.pass;
        worst = std::max({worst, e.first.max_abs, e.second.max_abs, e.third.max_abs});
      } catch (const BMismatchError& ex) {
        s["extended_system"] = {{"pass", false}, {"error", ex.what()}};
        pass = false;
      }
    }
    s["pass"] = pass;
    all = all && pass;
    list.push_back(s);
  }
  j["solutions"] = list;
  j["max_residual"] = worst;
  j["pass"] = all;
  out.exit_code = all ? exit_ok : exit_failed;
  return out;
}

Outcome cmd_mobility(const MetricDocument& doc, const MobilityArgs& args, const CommonOptions& opt) {
  const CheckOptions c = check_options(opt);
  KernelOptions ko;
  ko.max_order = args.order;
  ko.samples = args.samples;
  ko.seed = opt.seed;
  ko.rank_tol = args.rank_tol;
  LoopOptions lo;
  lo.loops_per_plane = args.loops;
  lo.seed = opt.seed;
  lo.rank_tol = args.rank_tol;

  Outcome out;
  json& j = out.report;
  j = header("mobility");
  echo(j, opt);
  j["rank_tol"] = args.rank_tol;
  j["name"] = doc.name;
  j["fiber"] = args.fiber;
  MobilityReport kernel;
  MobilityReport loops;
  if (args.fiber == "prolongation") {
    const std::optional<double> B = resolve_B(doc, c);
    if (!B) throw std::invalid_argument("the prolongation bundle needs an Einstein metric");
    std::vector<SolutionTriple> known;
    for (const auto& [name, L] : doc.solutions) known.push_back(make_triple(doc.metric, L, *B));
    kernel = mobility_of_metric(doc.metric, known, ko);
    loops = loop_transport_dimension(build_prolongation(doc.metric, *B, c), lo);
    j["B"] = *B;
  } else if (args.fiber == "sym2") {
    kernel = parallel_tensor_dimension(doc.metric, ko);
    loops = loop_transport_dimension(LinearConnectionBundle(doc.metric, FiberKind::sym2), lo);
  } else if (args.fiber == "oneform") {
    kernel = parallel_oneform_dimension(doc.metric, ko);
    loops = loop_transport_dimension(LinearConnectionBundle(doc.metric, FiberKind::oneform), lo);
  } else if (args.fiber == "vector") {
    kernel = parallel_vector_dimension(doc.metric, ko);
    loops = loop_transport_dimension(LinearConnectionBundle(doc.metric, FiberKind::vector), lo);
  } else {
    throw InputError("unknown fiber '" + args.fiber + "' (prolongation, sym2, oneform, vector)");
  }
  j["D"] = kernel.D;
  j["oracles_agree"] = kernel.D == loops.D;
  if (kernel.known_count > 0) j["exact"] = kernel.exact;
  j["kernel"] = report_json(kernel);
  j["transport"] = report_json(loops);
  const bool ok = kernel.D == loops.D && kernel.stabilized;
  j["pass"] = ok;
  out.exit_code = ok ? exit_ok : exit_failed;
  return out;
}

Outcome cmd_cone(const MetricDocument& doc, int sign) {
  Construction c = cone(doc.metric, sign);
  MetricDocument d;
  d.name = "cone(" + doc.name + ")";
  d.metric = c.metric;
  d.vector_fields.emplace_back("xi", *c.xi);
  Outcome out;
  out.report = header("cone");
  out.report.update(to_json(d));
  return out;
}

Outcome cmd_product(const MetricDocument& a, const MetricDocument& b) {
  Construction ca{a.metric, std::nullopt, std::nullopt};
  Construction cb{b.metric, std::nullopt, std::nullopt};
  if (const TensorField* x = a.vector_field("xi")) ca.xi = *x;
  if (const TensorField* x = b.vector_field("xi")) cb.xi = *x;
  Construction p = product(ca, cb);
  MetricDocument d;
  d.name = a.name + "x" + b.name;
  d.metric = p.metric;
  if (p.xi) d.vector_fields.emplace_back("xi", *p.xi);
  Outcome out;
  out.report = header("product");
  out.report.update(to_json(d));
  return out;
}

Outcome cmd_enumerate(int n, const std::string& signature_text, const std::string& regime_text) {
  const SignatureClass cls = parse_class(signature_text);
  const Regime regime = parse_regime(regime_text);
  ValueList v;
  switch (regime) {
    case Regime::non_affine: v = mobility_values(n, cls); break;
    case Regime::affine_nonzero_scal:
    case Regime::affine_ricci_flat: v = affine_only_values(n, regime); break;
    case Regime::projective_dims: v = projective_dim_values(n, cls); break;
  }
  Outcome out;
  json& j = out.report;
  j = header("enumerate");
  j["n"] = n;
  j["signature"] = class_name(cls);
  j["regime"] = regime_name(regime);
  j["values"] = v.plain();
  json tagged = json::array();
  for (const auto& t : v.values) tagged.push_back({{"value", t.value}, {"tag", tag_name(t.tag)}});
  j["tagged"] = tagged;
  return out;
}

Outcome cmd_figure1(int from, int to) {
  std::ostringstream s;
  s << "n\tvalue\tlorentz_extra\n";
  for (const auto& row : figure1_table(from, to)) {
    for (int v : row.riemannian) s << row.n << '\t' << v << "\t0\n";
    for (int v : row.lorentz_extras) s << row.n << '\t' << v << "\t1\n";
  }
  Outcome out;
  out.text = s.str();
  return out;
}

Outcome cmd_geodesic_test(const MetricDocument& a, const MetricDocument& b, const GeodesicArgs& args,
                          const CommonOptions& opt) {
  if (a.metric.chart().coordinates() != b.metric.chart().coordinates()) {
    throw InputError("both metrics must use the same coordinates");
  }
  GeodesicOptions go;
  go.steps = args.steps;
  go.step = args.step;
  go.tol = args.minor_tol;
  auto seeds = random_seeds(a.metric.chart(), args.seeds, opt.seed);
  GeodesicReport r = geodesic_projective_test(a.metric, b.metric, seeds, go);
  Outcome out;
  json& j = out.report;
  j = header("geodesic-test");
  echo(j, opt);
  j["minor_tol"] = args.minor_tol;
  j["names"] = {a.name, b.name};
  j["seeds"] = args.seeds;
  j["steps"] = args.steps;
  j["step"] = args.step;
  j["worst_ratio"] = r.worst_ratio;
  std::size_t left = 0;
  std::size_t failed = 0;
  for (const auto& s : r.seeds) {
    left += s.left_chart ? 1 : 0;
    failed += s.pass ? 0 : 1;
  }
  j["seeds_left_chart"] = left;
  j["seeds_failed"] = failed;
  j["pass"] = r.pass;
  out.exit_code = r.pass ? exit_ok : exit_failed;
  return out;
}

Outcome cmd_catalog(const std::optional<std::string>& emit) {
  Outcome out;
  if (emit) {
    CatalogEntry e;
    try {
      e = catalog_entry(*emit);
    } catch (const std::invalid_argument& ex) {
      throw InputError(ex.what());
    }
    out.report = header("catalog");
    out.report.update(to_json(from_catalog(e)));
    return out;
  }
  json& j = out.report;
  j = header("catalog");
  json list = json::array();
  for (const auto& e : catalog()) {
    json item;
    item["name"] = e.name;
    item["description"] = e.description;
    item["dimension"] = e.metric.dimension();
    if (e.signature) item["signature"] = {{"plus", e.signature->plus}, {"minus", e.signature->minus}};
    if (e.scal) item["scal"] = *e.scal;
    if (e.mobility) item["mobility"] = *e.mobility;
    if (e.par02) item["par02"] = *e.par02;
    if (e.k) item["k"] = *e.k;
    if (e.l) item["l"] = *e.l;
    if (e.base) item["base"] = *e.base;
    json sols = json::array();
    for (const auto& s : e.solutions) sols.push_back(s.name);
    item["solutions"] = sols;
    json fields = json::array();
    for (const auto& f : e.parallel_fields) fields.push_back(f.name);
    item["parallel_fields"] = fields;
    list.push_back(item);
  }
  j["entries"] = list;
  return out;
}

}  // namespace einmob::cli
