#pragma once

// Subcommands of the gqem tool. Exit codes: 0 every check passed, 1 some
// check failed its tolerance, 2 configuration or usage error (no report is
// written in that case).

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "../identities.hpp"
#include "../models.hpp"
#include "../quadrature.hpp"
#include "../sampling.hpp"
#include "config.hpp"
#include "report.hpp"

namespace gqem::cli {

enum ExitCode : int { kPass = 0, kFail = 1, kConfig = 2 };

struct Options {
  std::string config_path;
  std::string json_path;
  std::string csv_path;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol_scale;
};

/// Selected checks, split by kind, in catalog order.
struct Selection {
  std::vector<std::string> pointwise;
  std::vector<std::string> sample;
  std::vector<std::string> integral;
};

inline Selection resolve_suite(const std::vector<std::string>& tokens) {
  std::set<std::string> want;
  bool all_p = false, all_s = false, all_i = false;
  for (const auto& t : tokens) {
    if (t == "all") {
      all_p = all_s = true;
    } else if (t == "pointwise") {
      all_p = true;
    } else if (t == "sample") {
      all_s = true;
    } else if (t == "integrals") {
      all_i = true;
    } else {
      bool known = find_pointwise(t) != nullptr;
      for (const auto& e : sample_catalog()) known = known || e.id == t;
      for (const auto& e : integral_catalog()) known = known || e.id == t;
      if (!known) throw ConfigError("suite: unknown check '" + t + "' (see the catalog command)");
      want.insert(t);
    }
  }
  Selection s;
  for (const auto& p : pointwise_identities())
    if (all_p || want.count(p.entry.id)) s.pointwise.push_back(p.entry.id);
  for (const auto& e : sample_catalog())
    if (all_s || want.count(e.id)) s.sample.push_back(e.id);
  for (const auto& e : integral_catalog())
    if (all_i || want.count(e.id)) s.integral.push_back(e.id);
  return s;
}

namespace detail {

inline RunConfig effective_config(const Options& o) {
  RunConfig c = load_config(o.config_path);
  if (o.seed) c.seed = *o.seed;
  if (o.tol_scale) {
    if (!(*o.tol_scale > 0.0) || !std::isfinite(*o.tol_scale)) throw ConfigError("--tol-scale must be positive");
    c.tol = c.tol.scaled(*o.tol_scale);
  }
  return c;
}

inline QemStructure build_structure(const ModelSpec& spec) {
  try {
    return example_structure(spec);
  } catch (const ArgumentError& e) {
    throw ConfigError(spec.describe() + ": " + e.what());
  }
}

inline void require_integrable(const ModelSpec& spec) {
  if (spec.family != Family::sphere)
    throw ConfigError(std::string("integral checks require a compact model (sphere); family '") +
                      to_string(spec.family) + "' is not compact");
  if (spec.chart != ChartKind::polar)
    throw ConfigError(std::string("integral checks run in the polar chart; set chart = polar (got '") +
                      to_string(spec.chart) + "')");
}

inline QuadratureGrid build_grid(const RunConfig& c, const QemStructure& s) {
  const auto res = c.grid.value_or(default_resolution(s.dim()));
  if (static_cast<int>(res.size()) != s.dim())
    throw ConfigError("grid needs " + std::to_string(s.dim()) + " node counts for n = " + std::to_string(s.dim()));
  return make_sphere_grid(s.chart, res);
}

inline std::vector<std::string> structure_notes(const ModelSpec& spec, const QemStructure& s) {
  std::vector<std::string> notes;
  if (spec.family == Family::hyperbolic)
    notes.push_back(
        "hyperbolic example: h_v = cosh(dist(., v)) >= 1 and lambda = -(n-1) - m(u - tau)/u, the sign that solves "
        "Hess f - (1/m) df (x) df = -m(u - tau)/u g; the variant -(n-1) - m(tau - u)/u does not satisfy the "
        "defining equation");
  if (s.m.is_infinite()) notes.push_back("m = inf: potential f = -(u - tau), lambda solved from the trace identity");
  if (s.provenance() == LambdaProvenance::trace_solved && !s.m.is_infinite())
    notes.push_back("lambda solved from the trace identity (closed form is stated for the unit sphere)");
  return notes;
}

struct Collected {
  Json identities = Json::array();
  Json sample_checks = Json::array();
  Json integrals = Json::array();
  Json sanity = Json::array();
  Json controls = Json::array();
  Json skipped = Json::array();
  bool pass = true;
  std::vector<std::string> lines;  // human summary

  void line(bool ok, const std::string& id, const std::string& detail) {
    lines.push_back(std::string(ok ? "PASS " : "FAIL ") + id + " " + detail);
    pass = pass && ok;
  }
};

inline std::string sci(double x) {
  std::ostringstream o;
  o << std::scientific << std::setprecision(3) << x;
  return o.str();
}

inline void run_pointwise(const QemStructure& s, const Selection& sel, const PointSet& pts, const Tolerances& tol,
                          Collected& out) {
  if (sel.pointwise.empty()) return;
  const auto r = run_pointwise_suite(s, sel.pointwise, pts, tol);
  for (const auto& c : r.checks) {
    const auto* p = find_pointwise(c.id);
    out.identities.push_back(identity_json(p->entry, c, required_order(p->entry.orders, s.provenance())));
    out.line(c.pass, c.id, "max_residual=" + sci(c.max_residual) + " tol=" + sci(c.tolerance));
  }
  for (const auto& k : r.skipped) out.skipped.push_back({{"id", k.id}, {"reason", k.reason}});
}

inline const CatalogEntry& sample_entry(const std::string& id) {
  for (const auto& e : sample_catalog())
    if (e.id == id) return e;
  throw ConfigError("unknown sample check '" + id + "'");
}

inline void run_sample_checks(const QemStructure& s, const Selection& sel, const PointSet& pts, const Tolerances& tol,
                              Collected& out) {
  for (const auto& id : sel.sample) {
    const auto& e = sample_entry(id);
    Json j;
    j["id"] = e.id;
    j["tag"] = e.tag;
    j["anchor"] = e.anchor;
    if (id == "lemma_m") {
      std::string why;
      if (s.dim() < 3) why = "requires n >= 3";
      if (s.m.is_infinite()) why = "requires finite m";
      if (!why.empty()) {
        out.skipped.push_back({{"id", id}, {"reason", why}});
        continue;
      }
      const auto r = lemma_m(s, pts);
      const double spread_tol = 0.1 * tol.order2;
      const bool ok = r.c_spread < spread_tol && r.hessian_residual < tol.order2 && r.lap_residual < tol.order2 &&
                      r.gradlam_residual < tol.order2;
      j["n_points"] = r.n_points;
      j["c_estimate"] = number(r.c_estimate);
      j["c_spread"] = number(r.c_spread);
      j["hessian_residual"] = number(r.hessian_residual);
      j["lap_residual"] = number(r.lap_residual);
      j["gradlam_residual"] = number(r.gradlam_residual);
      j["tolerance"] = tol.order2;
      j["c_spread_tolerance"] = spread_tol;
      j["pass"] = ok;
      out.line(ok, id,
               "c_spread=" + sci(r.c_spread) + " max_residual=" +
                   sci(std::max({r.hessian_residual, r.lap_residual, r.gradlam_residual})));
    } else if (id == "sign_scan") {
      const auto r = sign_scan_R_minus_nlambda(s, pts);
      const double eps = 1e-10;
      const bool trivial = std::abs(r.min) <= eps && std::abs(r.max) <= eps;
      const bool ok = !r.asserted || r.sign_changes || trivial;
      j["n_points"] = pts.size();
      j["min"] = number(r.min);
      j["max"] = number(r.max);
      j["sign_changes"] = r.sign_changes;
      j["conclusion_asserted"] = r.asserted;
      j["pass"] = ok;
      out.line(ok, id,
               "min=" + sci(r.min) + " max=" + sci(r.max) + (r.asserted ? "" : " (noncompact: not asserted)"));
    }
    out.sample_checks.push_back(j);
  }
}

inline void run_integrals(const RunConfig& c, const QemStructure& s, const std::vector<std::string>& ids,
                          Collected& out) {
  if (ids.empty()) return;
  const auto grid = build_grid(c, s);
  const auto I = integrate_structure(grid, s);
  const double tol = c.tol.integral;
  std::optional<BochnerIntegrals> b;
  if (!s.m.is_infinite()) b = bochner_integrals(I);
  for (const auto& id : ids) {
    std::optional<IntegralCheck> chk;
    if (id == "thm5_item1") chk = thm5_item1(I, grid, tol);
    if (id == "thm5_item2") chk = thm5_item2(I, grid, tol);
    if (id == "thm5_item4") chk = thm5_item4(I, grid, tol);
    if (id == "thm1_integral") chk = thm1_integral(I, grid, tol);
    if (id == "integrated_bochner_f") chk = integrated_bochner_f(I, grid, tol);
    if (id == "thm5_item3") {
      const auto t = thm5_item3(I);
      // a nontrivial structure must make the indicator positive
      chk = IntegralCheck{id, integral_entry(id).anchor, t.value, 0.0, t.value, grid.resolution_string(), 0.0,
                          t.positive || (I.hess2 == 0.0 && I.lap2 == 0.0)};
    }
    if (id == "eqD2u" || id == "corollary_equality" || id == "lemflat_integral") {
      if (!b) {
        out.skipped.push_back({{"id", id}, {"reason", "requires finite m (u = exp(-f/m))"}});
        continue;
      }
      if (id == "eqD2u") chk = eq_d2u(*b, grid, tol);
      if (id == "corollary_equality") chk = corollary_equality(*b, grid, 1e-2 * tol);
      if (id == "lemflat_integral") chk = lemflat_integral(*b, grid, 1e-3 * tol);
    }
    out.integrals.push_back(integral_json(*chk));
    out.line(chk->pass, id,
             "lhs=" + sci(chk->lhs) + " rhs=" + sci(chk->rhs) + " gap=" + sci(chk->gap) + " grid=" + chk->resolution);
  }
  if (I.has_u) out.lines.push_back("INFO grid nodes with |grad u| < 1e-8: " + std::to_string(I.u_near_critical));
}

inline void run_sanity(const RunConfig& c, const ModelSpec& spec, const QemStructure& s, Collected& out) {
  const auto grid = build_grid(c, s);
  const int n = s.dim();
  const double r = spec.radius;
  const double vol = sphere_volume(n, r);
  const auto h = height_field(spec, spec.v_axis);
  const double tol = 1e-4 * c.tol.integral;
  auto add = [&](const std::string& id, double value, double expected, bool relative, double t) {
    const double err = relative ? std::abs(value - expected) / std::abs(expected) : std::abs(value - expected);
    const bool ok = std::isfinite(err) && err < t;
    out.sanity.push_back({{"id", id}, {"value", number(value)}, {"expected", expected}, {"error", number(err)},
                          {"relative", relative}, {"tolerance", t}, {"pass", ok}});
    out.line(ok, id, "value=" + sci(value) + " error=" + sci(err));
  };
  add("area", integrate(grid, constant_field(1.0)), vol, true, tol);
  add("height_second_moment", integrate(grid, [&](Coords x) { return h(x) * h(x); }), vol * r * r / (n + 1), true,
      tol);
  add("stokes_height_cubed", stokes_sanity(grid, [&](Coords x) { return h(x) * h(x) * h(x); }), 0.0, false,
      1e-3 * c.tol.integral);
  add("integration_by_parts",
      integration_by_parts_defect(grid, [&](Coords x) { return h(x) * h(x); }, [&](Coords x) { return exp(h(x)); }),
      0.0, false, 1e-3 * c.tol.integral);
}

// Structures that violate the defining equation; the verifier must reject them.
inline void run_negative_controls(const RunConfig& c, Collected& out) {
  const Chart flat = make_chart([] {
    ModelSpec e;
    e.family = Family::euclidean;
    e.chart = ChartKind::cartesian;
    return e;
  }());
  const auto pts = sample_points(flat, 25, c.seed);
  struct Control {
    const char* id;
    const char* description;
    ScalarField f;
  };
  const Control controls[] = {
      {"control_cubic", "R^2, f = x_1^3, m = 2, lambda trace-solved", [](Coords x) { return x[0] * x[0] * x[0]; }},
      {"control_linear", "R^2, f = x_1, m = 2, lambda trace-solved", [](Coords x) { return x[0]; }},
  };
  for (const auto& ctl : controls) {
    const auto s = make_structure(flat, ctl.f, SyntheticDimension::finite(2.0));
    const auto r = is_gqem(s, pts, c.tol.order2);
    const bool rejected = !r.pass;
    out.controls.push_back({{"id", ctl.id},
                            {"description", ctl.description},
                            {"max_residual", number(r.defining.max_residual)},
                            {"tolerance", c.tol.order2},
                            {"rejected", rejected}});
    out.line(rejected, ctl.id, std::string("rejected=") + (rejected ? "true" : "false") +
                                   " max_residual=" + sci(r.defining.max_residual));
  }
}

inline Json report_head(const char* command, const RunConfig& c) {
  Json j;
  j["tool"] = "gqem";
  j["tool_version"] = kToolVersion;
  j["schema_version"] = kSchemaVersion;
  j["command"] = command;
  j["config"] = config_json(c);
  return j;
}

inline Json structure_json(const ModelSpec& spec, const QemStructure& s) {
  return {{"label", s.label},
          {"family", to_string(spec.family)},
          {"chart", to_string(spec.chart)},
          {"lambda_provenance", to_string(s.provenance())}};
}

inline void finish_report(Json& j, const Collected& out, const std::vector<std::string>& notes, double seconds) {
  j["identities"] = out.identities;
  j["sample_checks"] = out.sample_checks;
  j["integrals"] = out.integrals;
  j["sanity"] = out.sanity;
  j["negative_controls"] = out.controls;
  j["skipped"] = out.skipped;
  j["notes"] = notes;
  j["pass"] = out.pass;
  j["wall_time_s"] = seconds;
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write '" + path + "'");
  f << text;
}

inline double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace detail

inline int cmd_verify(const Options& o, std::ostream& out) {
  const auto t0 = std::chrono::steady_clock::now();
  const RunConfig c = detail::effective_config(o);
  const ModelSpec spec = c.single_spec();
  const QemStructure s = detail::build_structure(spec);
  const Selection sel = resolve_suite(c.suite);
  if (!sel.integral.empty()) detail::require_integrable(spec);
  if (c.grid && static_cast<int>(c.grid->size()) != spec.dim)
    throw ConfigError("grid needs " + std::to_string(spec.dim) + " node counts");
  const PointSet pts = sample_points(s.chart, c.points, c.seed);

  detail::Collected col;
  detail::run_pointwise(s, sel, pts, c.tol, col);
  detail::run_sample_checks(s, sel, pts, c.tol, col);
  detail::run_integrals(c, s, sel.integral, col);
  detail::run_negative_controls(c, col);

  Json j = detail::report_head("verify", c);
  j["structure"] = detail::structure_json(spec, s);
  detail::finish_report(j, col, detail::structure_notes(spec, s), detail::elapsed(t0));
  if (!o.json_path.empty()) detail::write_file(o.json_path, j.dump(2) + "\n");
  out << "verify " << s.label << "\n";
  for (const auto& l : col.lines) out << l << "\n";
  out << (col.pass ? "OVERALL PASS" : "OVERALL FAIL") << "\n";
  return col.pass ? kPass : kFail;
}

inline int cmd_integrate(const Options& o, std::ostream& out) {
  const auto t0 = std::chrono::steady_clock::now();
  const RunConfig c = detail::effective_config(o);
  const ModelSpec spec = c.single_spec();
  detail::require_integrable(spec);
  const QemStructure s = detail::build_structure(spec);
  std::vector<std::string> ids;
  for (const auto& t : c.suite) {
    if (t == "all" || t == "integrals") {
      ids.clear();
      for (const auto& e : integral_catalog()) ids.push_back(e.id);
      break;
    }
    integral_entry(t);  // validates
  }
  if (ids.empty()) {
    const Selection sel = resolve_suite(c.suite);
    if (!sel.pointwise.empty() || !sel.sample.empty())
      throw ConfigError("integrate runs integral checks only; suite lists a pointwise or sample check");
    ids = sel.integral;
  }
  if (c.grid && static_cast<int>(c.grid->size()) != spec.dim)
    throw ConfigError("grid needs " + std::to_string(spec.dim) + " node counts");

  detail::Collected col;
  detail::run_sanity(c, spec, s, col);
  detail::run_integrals(c, s, ids, col);

  Json j = detail::report_head("integrate", c);
  j["structure"] = detail::structure_json(spec, s);
  detail::finish_report(j, col, detail::structure_notes(spec, s), detail::elapsed(t0));
  if (!o.json_path.empty()) detail::write_file(o.json_path, j.dump(2) + "\n");
  out << "integrate " << s.label << "\n";
  for (const auto& l : col.lines) out << l << "\n";
  out << (col.pass ? "OVERALL PASS" : "OVERALL FAIL") << "\n";
  return col.pass ? kPass : kFail;
}

inline int cmd_scan(const Options& o, std::ostream& out) {
  const auto t0 = std::chrono::steady_clock::now();
  const RunConfig c = detail::effective_config(o);
  const Selection sel = resolve_suite(c.suite);
  if (!sel.integral.empty()) throw ConfigError("scan runs pointwise identities; drop integral checks from suite");
  if (sel.pointwise.empty()) throw ConfigError("scan needs at least one pointwise identity in suite");
  // validate every combination before computing anything
  std::vector<QemStructure> structures;
  std::vector<std::tuple<int, SyntheticDimension, double>> combos;
  for (int n : c.dims)
    for (const auto& m : c.ms)
      for (double tau : c.taus) {
        structures.push_back(detail::build_structure(c.spec(n, tau, m)));
        combos.emplace_back(n, m, tau);
      }

  bool pass = true;
  std::ostringstream csv;
  csv << "n,m,tau,identity,max_residual,pass\n";
  csv << std::setprecision(17);
  Json rows = Json::array();
  Json skipped = Json::array();
  for (std::size_t k = 0; k < structures.size(); ++k) {
    const auto& s = structures[k];
    const auto& [n, m, tau] = combos[k];
    const auto pts = sample_points(s.chart, c.points, c.seed);
    const auto r = run_pointwise_suite(s, sel.pointwise, pts, c.tol);
    for (const auto& chk : r.checks) {
      csv << n << "," << m.str() << "," << format_real(tau) << "," << chk.id << "," << format_real(chk.max_residual)
          << "," << (chk.pass ? "true" : "false") << "\n";
      rows.push_back({{"n", n},
                      {"m", m_json(m)},
                      {"tau", tau},
                      {"identity", chk.id},
                      {"max_residual", number(chk.max_residual)},
                      {"tolerance", chk.tolerance},
                      {"pass", chk.pass}});
      pass = pass && chk.pass;
    }
    for (const auto& sk : r.skipped)
      skipped.push_back({{"n", n}, {"m", m_json(m)}, {"tau", tau}, {"id", sk.id}, {"reason", sk.reason}});
  }
  Json j = detail::report_head("scan", c);
  j["rows"] = rows;
  j["skipped"] = skipped;
  j["pass"] = pass;
  j["wall_time_s"] = detail::elapsed(t0);
  if (!o.json_path.empty()) detail::write_file(o.json_path, j.dump(2) + "\n");
  if (!o.csv_path.empty()) {
    detail::write_file(o.csv_path, csv.str());
  } else {
    out << csv.str();
  }
  out << "scan " << structures.size() << " combinations, " << rows.size() << " rows: "
      << (pass ? "OVERALL PASS" : "OVERALL FAIL") << "\n";
  return pass ? kPass : kFail;
}

inline int cmd_catalog(const Options& o, std::ostream& out) {
  const std::string text = catalog_json().dump(2) + "\n";
  if (!o.json_path.empty()) detail::write_file(o.json_path, text);
  out << text;
  return kPass;
}

/// Entry point shared by the executable and the tests.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical verification of generalized quasi-Einstein identities", "gqem"};
  app.require_subcommand(1, 1);
  Options o;
  auto add_common = [&](CLI::App* sub, bool need_config) {
    auto* cfg = sub->add_option("--config", o.config_path, "run configuration (key = value file)");
    if (need_config) cfg->required();
    sub->add_option("--json", o.json_path, "write the JSON report here");
    sub->add_option("--csv", o.csv_path, "write CSV rows here (scan)");
    sub->add_option_function<std::uint64_t>("--seed", [&](const std::uint64_t& v) { o.seed = v; }, "override seed");
    sub->add_option_function<double>("--tol-scale", [&](const double& v) { o.tol_scale = v; },
                                     "multiply every tolerance");
  };
  auto* verify = app.add_subcommand("verify", "pointwise and sample checks on one model");
  auto* integrate = app.add_subcommand("integrate", "integral identities on a sphere");
  auto* scan = app.add_subcommand("scan", "pointwise suite over lists of n, m and tau");
  auto* catalog = app.add_subcommand("catalog", "print the check catalog as JSON");
  add_common(verify, true);
  add_common(integrate, true);
  add_common(scan, true);
  add_common(catalog, false);
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kPass;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kPass;
  } catch (const CLI::ParseError& e) {
    err << "gqem: " << e.what() << "\n";
    return kConfig;
  }
  try {
    if (verify->parsed()) return cmd_verify(o, out);
    if (integrate->parsed()) return cmd_integrate(o, out);
    if (scan->parsed()) return cmd_scan(o, out);
    return cmd_catalog(o, out);
  } catch (const std::exception& e) {
    err << "gqem: " << e.what() << "\n";
    return kConfig;
  }
}

}  // namespace gqem::cli
