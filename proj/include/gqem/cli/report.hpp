#pragma once

// JSON report schema (schema_version 1):
//
//   tool, tool_version, schema_version, command
//   config            effective configuration (after --seed / --tol-scale)
//   structure         {label, family, chart, lambda_provenance}
//   identities[]      {id, tag, anchor, kind, tolerance_class, required_jet_order,
//                      n_points, max_residual, mean_residual, max_component, tolerance, pass}
//   sample_checks[]   {id, tag, anchor, ...check specific fields..., pass}
//   integrals[]       {id, anchor, lhs, rhs, relative_gap, resolution, tolerance, pass}
//   sanity[]          {id, value, expected, error, tolerance, pass}
//   negative_controls[] {id, description, max_residual, tolerance, rejected}
//   skipped[]         {id, reason}
//   notes[]           strings
//   pass              overall verdict
//   wall_time_s       the only field that varies between identical runs
//
// Scan CSV columns: n,m,tau,identity,max_residual,pass

#include <nlohmann/json.hpp>

#include <string>

#include "../identities.hpp"
#include "../quadrature.hpp"
#include "config.hpp"

namespace gqem::cli {

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr int kSchemaVersion = 1;

using Json = nlohmann::ordered_json;

/// Non-finite numbers become the strings "inf", "-inf" or "nan" instead of null.
inline Json number(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

inline Json m_json(SyntheticDimension m) {
  if (m.is_infinite()) return "inf";
  return m.value();
}

inline Json config_json(const RunConfig& c) {
  Json j;
  j["family"] = to_string(c.family);
  j["n"] = c.dims;
  j["r"] = c.radius;
  j["chart"] = to_string(c.chart.value_or(default_chart(c.family)));
  j["tau"] = c.taus;
  Json ms = Json::array();
  for (const auto& m : c.ms) ms.push_back(m_json(m));
  j["m"] = ms;
  j["v_axis"] = c.v_axis;
  j["suite"] = c.suite;
  j["points"] = c.points;
  j["seed"] = c.seed;
  if (c.grid) {
    j["grid"] = *c.grid;
  } else {
    j["grid"] = nullptr;
  }
  j["tol.order2"] = c.tol.order2;
  j["tol.order3"] = c.tol.order3;
  j["tol.order4"] = c.tol.order4;
  j["tol.integral"] = c.tol.integral;
  return j;
}

inline Json entry_json(const CatalogEntry& e) {
  Json j;
  j["id"] = e.id;
  j["tag"] = e.tag;
  j["anchor"] = e.anchor;
  j["kind"] = to_string(e.kind);
  j["orders"] = {{"g", e.orders.g}, {"f", e.orders.f}, {"lambda", e.orders.lambda}};
  j["tolerance_class"] = to_string(e.tolerance_class);
  return j;
}

inline Json identity_json(const CatalogEntry& e, const ResidualSummary& s, int order) {
  Json j;
  j["id"] = e.id;
  j["tag"] = e.tag;
  j["anchor"] = e.anchor;
  j["kind"] = to_string(e.kind);
  j["tolerance_class"] = to_string(e.tolerance_class);
  j["required_jet_order"] = order;
  j["n_points"] = s.n_points;
  j["max_residual"] = number(s.max_residual);
  j["mean_residual"] = number(s.mean_residual);
  j["max_component"] = number(s.max_component);
  j["tolerance"] = s.tolerance;
  j["pass"] = s.pass;
  return j;
}

inline Json integral_json(const IntegralCheck& c) {
  Json j;
  j["id"] = c.id;
  j["anchor"] = c.anchor;
  j["lhs"] = number(c.lhs);
  j["rhs"] = number(c.rhs);
  j["relative_gap"] = number(c.gap);
  j["resolution"] = c.resolution;
  j["tolerance"] = c.tolerance;
  j["pass"] = c.pass;
  return j;
}

inline Json catalog_json() {
  Json j;
  j["tool"] = "gqem";
  j["tool_version"] = kToolVersion;
  j["schema_version"] = kSchemaVersion;
  Json entries = Json::array();
  for (const auto& p : pointwise_identities()) entries.push_back(entry_json(p.entry));
  for (const auto& e : sample_catalog()) entries.push_back(entry_json(e));
  for (const auto& e : integral_catalog()) entries.push_back(entry_json(e));
  j["entries"] = entries;
  return j;
}

}  // namespace gqem::cli
