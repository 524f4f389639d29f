// Acceptance run: prints one PASS/FAIL line per criterion, exits nonzero on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <gqem/cli/commands.hpp>
#include <gqem/identities.hpp>
#include <gqem/models.hpp>
#include <gqem/quadrature.hpp>
#include <gqem/sampling.hpp>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "random_expr.hpp"

using namespace gqem;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", x);
  return buf;
}

constexpr int kPoints = 100;
constexpr std::uint64_t kSeed = 1;

// n in {2,3,4}, m in {1,2,5}, three valid tau per family.
template <class F>
void for_each_sweep_structure(F&& visit) {
  for (Family fam : test::families())
    for (int n : {2, 3, 4})
      for (double m : {1.0, 2.0, 5.0})
        for (double tau : test::taus(fam, n)) {
          const auto spec = test::model(fam, n, tau, m);
          visit(spec, example_structure(spec));
        }
}

Verdict criterion1() {
  Verdict v;
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  int combos = 0;
  for_each_sweep_structure([&](const ModelSpec& spec, const QemStructure& s) {
    ++combos;
    const auto pts = sample_points(s.chart, kPoints, kSeed);
    const auto r = run_pointwise_suite(s, {"defining_eq"}, pts, Tolerances{});
    worst = std::max(worst, r.checks.at(0).max_residual);
    v.require(r.checks.at(0).max_residual < 1e-8, spec.describe());
  });
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  v.require(combos == 81, "expected 81 structures (27 per family)");
  v.require(secs < 30.0, "runtime " + std::to_string(secs) + " s");
  v.detail = "structures=" + std::to_string(combos) + " sup residual=" + sci(worst) + " (<1e-8) time=" +
             std::to_string(secs).substr(0, 5) + "s (<30s)" + (v.detail.empty() ? "" : " FAILED: " + v.detail);
  return v;
}

Verdict criterion2() {
  Verdict v;
  const std::vector<std::string> ids{"lemma1_item1",   "lemma1_item2", "lemma1_item3", "trace_derivative_eq",
                                     "mdivgrad_eq",    "u_transform_eq", "radial_eq",  "lemma4"};
  std::map<std::string, double> worst;
  for_each_sweep_structure([&](const ModelSpec& spec, const QemStructure& s) {
    const auto pts = sample_points(s.chart, kPoints, kSeed);
    const auto r = run_pointwise_suite(s, ids, pts, Tolerances{});
    v.require(r.skipped.empty(), spec.describe() + " skipped a check");
    for (const auto& c : r.checks) {
      const double tol = c.id == "lemma4" ? 1e-6 : 1e-7;
      worst[c.id] = std::max(worst[c.id], c.max_residual);
      v.require(c.max_residual < tol, spec.describe() + " " + c.id);
    }
  });
  // lemma4 with Delta R from jets vs from finite differences of point values of R
  double fd_gap = 0.0;
  for (int n : {2, 3}) {
    const auto s = example_structure(test::sphere(n, 1.0, 2.0));
    const auto r_at = [&](const std::vector<double>& q) { return scalar_curvature(s.chart, q); };
    for (const auto& p : sample_points(s.chart, 10, kSeed)) {
      StructureAt at(s, p, 4);
      const double jet_res = lemma4_jet(at).value();
      const double half_lap_jet = 0.5 * at.geo().laplacian(at.geo().scalar_curvature()).value();
      const double fd_res = jet_res - half_lap_jet + 0.5 * test::fd_laplacian(s.chart, r_at, p, 1e-3);
      fd_gap = std::max(fd_gap, std::abs(jet_res - fd_res));
    }
  }
  // on the lumpy chart Delta R is far from zero, so the comparison is not vacuous
  const auto lumpy = test::lumpy_chart(3);
  const auto r_lumpy = [&](const std::vector<double>& q) { return scalar_curvature(lumpy, q); };
  for (const auto& p : sample_points(lumpy, 10, kSeed)) {
    LocalGeometry geo(lumpy, p, 4);
    const double jet = geo.laplacian(geo.scalar_curvature()).value();
    fd_gap = std::max(fd_gap, std::abs(jet - test::fd_laplacian(lumpy, r_lumpy, p, 1e-3)) / (1 + std::abs(jet)));
  }
  v.require(fd_gap < 1e-4, "lemma4 jet vs finite-difference gap " + sci(fd_gap));
  std::string d;
  for (const auto& [id, w] : worst) d += id + "=" + sci(w) + " ";
  v.detail = d + "jet_vs_fd=" + sci(fd_gap) + (v.detail.empty() ? "" : " FAILED: " + v.detail);
  return v;
}

Verdict criterion3() {
  Verdict v;
  std::string d;
  for (Family fam : test::families()) {
    for (double m : {1.0, 2.0, 5.0}) {
      const auto spec = test::model(fam, 3, test::taus(fam, 3)[1], m);
      const auto s = example_structure(spec);
      const auto r = lemma_m(s, sample_points(s.chart, kPoints, kSeed));
      v.require(r.c_spread < 1e-9, spec.describe() + " c_spread " + sci(r.c_spread));
      v.require(r.lap_residual < 1e-8, spec.describe() + " lap_u " + sci(r.lap_residual));
      v.require(r.gradlam_residual < 1e-8, spec.describe() + " grad(lambda u) " + sci(r.gradlam_residual));
      if (m == 2.0)
        d += std::string(to_string(fam)) + ": c=" + sci(r.c_estimate) + " spread=" + sci(r.c_spread) +
             " lap=" + sci(r.lap_residual) + " grad=" + sci(r.gradlam_residual) + " ";
    }
  }
  v.detail = d + (v.detail.empty() ? "" : " FAILED: " + v.detail);
  return v;
}

Verdict criterion4() {
  Verdict v;
  std::string d;
  for (int n : {2, 3}) {
    const auto spec = test::sphere(n, 1.0, 2.0);
    const auto s = example_structure(spec);
    const auto grid = make_sphere_grid(s.chart);
    const auto I = integrate_structure(grid, s);
    const auto b = bochner_integrals(I);
    double worst = 0.0;
    for (const auto& c : {thm5_item1(I, grid, 1e-6), thm5_item2(I, grid, 1e-6), thm5_item4(I, grid, 1e-6),
                          thm1_integral(I, grid, 1e-6), eq_d2u(b, grid, 1e-6)}) {
      worst = std::max(worst, c.gap);
      v.require(c.pass, "S^" + std::to_string(n) + " " + c.id + " gap " + sci(c.gap));
    }
    const auto cor = corollary_equality(b, grid, 1e-8);
    v.require(cor.pass, "S^" + std::to_string(n) + " corollary gap " + sci(cor.gap));

    const auto h = height_field(spec, 0);
    const double vol = sphere_volume(n, 1.0);
    const double area_err = std::abs(integrate(grid, constant_field(1.0)) - vol) / vol;
    const double h2 = vol / (n + 1);
    const double h2_err = std::abs(integrate(grid, [&](Coords x) { return h(x) * h(x); }) - h2) / h2;
    const double stokes = std::max(std::abs(stokes_sanity(grid, [&](Coords x) { return h(x) * h(x) * h(x); })),
                                   std::abs(stokes_sanity(grid, [&](Coords x) { return exp(h(x)); })));
    v.require(area_err < 1e-10, "area " + sci(area_err));
    v.require(h2_err < 1e-10, "int h^2 " + sci(h2_err));
    v.require(std::abs(stokes) < 1e-9, "int Laplacian " + sci(stokes));
    d += "S^" + std::to_string(n) + "[" + grid.resolution_string() + "] gap=" + sci(worst) +
         " corollary=" + sci(cor.gap) + " area=" + sci(area_err) + " h2=" + sci(h2_err) + " stokes=" + sci(stokes) +
         " ";
  }
  v.detail = d + (v.detail.empty() ? "" : " FAILED: " + v.detail);
  return v;
}

Verdict criterion5() {
  Verdict v;
  std::string d;
  for (int n : {2, 3}) {
    const auto s = example_structure(test::sphere(n, 1.0, 2.0));
    const auto scan = sign_scan_R_minus_nlambda(s, sample_points(s.chart, kPoints, kSeed));
    v.require(scan.min < 0.0 && scan.max > 0.0, "S^" + std::to_string(n) + " R - n lambda does not change sign");
    d += "S^" + std::to_string(n) + " R-n*lambda in [" + sci(scan.min) + "," + sci(scan.max) + "] ";
  }
  std::mt19937_64 rng(kSeed);
  std::normal_distribution<double> nd;
  int vectors = 0;
  for (int n = 2; n <= 5; ++n) {
    const auto c = make_chart(test::sphere(n, 1.0, 2.0));
    for (const auto& p : sample_points(c, 50, kSeed + n)) {
      std::vector<double> w(n);
      for (auto& x : w) x = nd(rng);
      ++vectors;
      v.require(rank_one_proportionality(w, metric_tensor(c, p), 1e-12).outcome == RankOneOutcome::impossible,
                "rank-one proportionality accepted a nonzero vector");
    }
  }
  d += "rank_one impossible for " + std::to_string(vectors) + " vectors ";
  const auto flat = make_chart(test::model(Family::euclidean, 2, 1.0, 2.0));
  const auto pts = sample_points(flat, kPoints, kSeed);
  const ScalarField cubic = [](Coords x) { return x[0] * x[0] * x[0]; };
  const ScalarField linear = [](Coords x) { return x[0]; };
  for (const auto& [name, f] : {std::pair{"cubic", cubic}, std::pair{"linear", linear}}) {
    const auto r = is_gqem(make_structure(flat, f, SyntheticDimension::finite(2.0)), pts, 1e-8);
    v.require(!r.pass && r.defining.max_residual > 1e-8, std::string(name) + " control accepted");
    d += std::string(name) + " residual=" + sci(r.defining.max_residual) + " ";
  }
  v.detail = d + (v.detail.empty() ? "" : " FAILED: " + v.detail);
  return v;
}

Verdict criterion6() {
  Verdict v;
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const long double h = 1e-3L;
  double worst_fd = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 3);
    const test::Expr e = test::random_expr(rng, n, 3);
    std::vector<long double> x(n);
    std::vector<double> xd(n);
    for (int i = 0; i < n; ++i) x[i] = xd[i] = u(rng);
    const Jet j = test::eval<Jet>(e, seed_point(xd, 3));
    for (int idx = 0; idx < j.size(); ++idx) {
      const auto& a = j.table().alpha(idx);
      const std::vector<int> alpha(a.begin(), a.begin() + n);
      const long double d1 = test::fd_partial(e, x, alpha, h);
      const long double d2 = test::fd_partial(e, x, alpha, h / 2);
      const double fd = static_cast<double>((4 * d2 - d1) / 3);
      worst_fd = std::max(worst_fd, std::abs(j.coeff(idx) - fd) / std::max(std::abs(j.coeff(idx)), 1.0));
    }
  }
  v.require(worst_fd < 1e-5, "jet vs Richardson " + sci(worst_fd));

  // Leibniz: partials of a product against the binomial sum
  double worst_leibniz = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 4);
    const int order = 1 + static_cast<int>(rng() % 4);
    Jet a(n, order), b(n, order);
    for (int i = 0; i < a.size(); ++i) {
      a.coeff(i) = u(rng);
      b.coeff(i) = u(rng);
    }
    const Jet p = a * b;
    const auto& t = a.table();
    for (int idx = 0; idx < p.size(); ++idx) {
      const auto& alpha = t.alpha(idx);
      double s = 0.0;
      for (int bidx = 0; bidx < p.size(); ++bidx) {
        const auto& beta = t.alpha(bidx);
        bool le = true;
        double w = 1.0;
        MultiIndex rest{};
        for (int i = 0; i < n; ++i) {
          if (beta[i] > alpha[i]) le = false;
          rest[i] = static_cast<std::uint8_t>(alpha[i] - beta[i]);
          for (int k = 0; k < beta[i] && le; ++k) w = w * (alpha[i] - k) / (k + 1);
        }
        if (le) s += w * a.coeff(bidx) * b.coeff(t.index_of(rest));
      }
      worst_leibniz = std::max(worst_leibniz, std::abs(p.coeff(idx) - s) / std::max(1.0, std::abs(s)));
    }
  }
  v.require(worst_leibniz < 1e-13, "Leibniz " + sci(worst_leibniz));

  // truncating a higher-order evaluation equals evaluating at the lower order
  double worst_trunc = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 3);
    const test::Expr e = test::random_expr(rng, n, 3);
    std::vector<double> x(n);
    for (auto& c : x) c = u(rng);
    for (int order = 2; order <= 4; ++order) {
      const Jet high = test::eval<Jet>(e, seed_point(x, order)).truncated(order - 1);
      const Jet low = test::eval<Jet>(e, seed_point(x, order - 1));
      for (int i = 0; i < low.size(); ++i)
        worst_trunc =
            std::max(worst_trunc, std::abs(high.coeff(i) - low.coeff(i)) / std::max(1.0, std::abs(low.coeff(i))));
    }
  }
  v.require(worst_trunc < 1e-13, "truncation " + sci(worst_trunc));
  v.detail = "composites=200 fd_rel=" + sci(worst_fd) + " (<1e-5) leibniz=" + sci(worst_leibniz) +
             " truncation=" + sci(worst_trunc) + " (<1e-13)" + (v.detail.empty() ? "" : " FAILED: " + v.detail);
  return v;
}

std::string slurp_without_wall_time(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::string line, kept;
  while (std::getline(in, line))
    if (line.find("wall_time_s") == std::string::npos) kept += line + "\n";
  return kept;
}

Verdict criterion7() {
  Verdict v;
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "gqem_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::vector<std::pair<std::string, std::string>> runs{
      {"verify", "family = hyperbolic\nn = 3\ntau = 1\nm = 2\nsuite = all\npoints = 100\nseed = 11\n"},
      {"integrate", "family = sphere\nn = 2\ntau = 1\nm = 2\nseed = 11\n"},
      {"scan", "family = sphere\nn = 2,3\ntau = 1,3\nm = 2,inf\nsuite = pointwise\npoints = 20\nseed = 11\n"},
  };
  int compared = 0;
  for (const auto& [cmd, text] : runs) {
    const auto cfg = (dir / (cmd + ".cfg")).string();
    std::ofstream(cfg) << text;
    std::string reports[2], stdouts[2];
    for (int k = 0; k < 2; ++k) {
      const auto json = (dir / (cmd + std::to_string(k) + ".json")).string();
      const auto csv = (dir / (cmd + std::to_string(k) + ".csv")).string();
      std::vector<std::string> args{"gqem", cmd, "--config", cfg, "--json", json};
      if (cmd == "scan") args.insert(args.end(), {"--csv", csv});
      std::vector<const char*> argv;
      for (const auto& a : args) argv.push_back(a.c_str());
      std::ostringstream out, err;
      const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
      v.require(code == 0, cmd + " exit " + std::to_string(code) + " " + err.str());
      reports[k] = slurp_without_wall_time(json);
      if (cmd == "scan") reports[k] += slurp_without_wall_time(csv);
      stdouts[k] = out.str();
    }
    v.require(!reports[0].empty() && reports[0] == reports[1], cmd + " reports differ");
    v.require(stdouts[0] == stdouts[1], cmd + " console output differs");
    ++compared;
  }
  fs::remove_all(dir);
  v.detail = std::to_string(compared) + " commands run twice, reports byte-identical apart from wall_time_s" +
             (v.detail.empty() ? "" : " FAILED: " + v.detail);
  return v;
}

}  // namespace

int main() {
  const std::pair<const char*, Verdict (*)()> criteria[] = {
      {"defining equation sweep", criterion1},   {"lemma suite", criterion2},
      {"Einstein case lemma", criterion3},       {"integral suite on S^2 and S^3", criterion4},
      {"theorem consequences and controls", criterion5}, {"jet differentiation", criterion6},
      {"determinism", criterion7},
  };
  int failures = 0;
  for (std::size_t k = 0; k < std::size(criteria); ++k) {
    Verdict v;
    try {
      v = criteria[k].second();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("exception: ") + e.what();
    }
    failures += v.pass ? 0 : 1;
    std::cout << "criterion " << k + 1 << " " << (v.pass ? "PASS" : "FAIL") << " " << criteria[k].first << ": "
              << v.detail << std::endl;
  }
  std::cout << (failures == 0 ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL") << std::endl;
  return failures == 0 ? 0 : 1;
}
