#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "conekit/errors.hpp"
#include "conekit/metric_assembly.hpp"
#include "conekit/reports.hpp"
#include "conekit/verification.hpp"

using namespace conekit;
namespace fs = std::filesystem;

namespace {

constexpr int kExitFail = 1;
constexpr int kExitError = 2;

struct Flags {
  std::string config;
  std::vector<std::string> base;
  int p = 0, k = 0, r = 0, pmax = 0, n = 0;
  std::string kind, out;
  std::uint64_t seed = 0;
  double tol_curvature = 0, tol_closed = 0, perturb_mu = 0, einstein_constant = 0, scale_omega = 0;
  std::vector<std::string> suites;
  int interior_points = 0;
  bool timings = false;
};

struct Options {
  CLI::Option *base, *p, *k, *r, *pmax, *n, *kind, *out, *seed, *tol_curvature, *tol_closed, *perturb_mu,
      *einstein_constant, *scale_omega, *suites, *interior_points;
};

Options add_flags(CLI::App& app, Flags& f) {
  Options o{};
  app.add_option("--config", f.config, "flat JSON config file (version \"1\"); flags override it");
  o.base = app.add_option("--base", f.base, "cp N | product d1,d2,...")->expected(2);
  o.p = app.add_option("--p", f.p, "fibre period p");
  o.k = app.add_option("--k", f.k, "twist k");
  o.kind = app.add_option("--case", f.kind, "small1 | small2 | canonical");
  o.r = app.add_option("--r", f.r, "canonical split r");
  o.pmax = app.add_option("--pmax", f.pmax, "largest p to enumerate");
  o.n = app.add_option("--n", f.n, "dimension for the lemma suite");
  o.seed = app.add_option("--seed", f.seed, "sampling seed");
  o.tol_curvature = app.add_option("--tol-curvature", f.tol_curvature, "curvature tolerance");
  o.tol_closed = app.add_option("--tol-closed", f.tol_closed, "closedness tolerance");
  o.out = app.add_option("--out", f.out, "output directory");
  o.perturb_mu = app.add_option("--perturb-mu", f.perturb_mu, "control: shift mu by this amount");
  o.einstein_constant = app.add_option("--einstein-constant", f.einstein_constant, "control: link Einstein constant");
  o.scale_omega = app.add_option("--scale-omega", f.scale_omega, "control: multiply the Kähler form");
  o.suites = app.add_option("--suite", f.suites, "suite names (repeatable or comma separated)")->delimiter(',');
  o.interior_points = app.add_option("--interior-points", f.interior_points, "interior sample count");
  app.add_flag("--timings", f.timings, "include wall times in reports");
  return o;
}

RunConfig resolve(const Flags& f, const Options& o) {
  RunConfig cfg = f.config.empty() ? RunConfig{} : load_config(f.config);
  nlohmann::json j{{"version", kFormatVersion}};
  if (o.base->count()) j["base"] = f.base[0] + " " + f.base[1];
  if (o.p->count()) j["p"] = f.p;
  if (o.k->count()) j["k"] = f.k;
  if (o.kind->count()) j["case"] = f.kind;
  if (o.r->count()) j["r"] = f.r;
  if (o.pmax->count()) j["pmax"] = f.pmax;
  if (o.n->count()) j["n"] = f.n;
  if (o.seed->count()) j["seed"] = f.seed;
  if (o.tol_curvature->count()) j["tol_curvature"] = f.tol_curvature;
  if (o.tol_closed->count()) j["tol_closed"] = f.tol_closed;
  if (o.out->count()) j["out"] = f.out;
  if (o.perturb_mu->count()) j["perturb_mu"] = f.perturb_mu;
  if (o.einstein_constant->count()) j["einstein_constant"] = f.einstein_constant;
  if (o.scale_omega->count()) j["scale_omega"] = f.scale_omega;
  if (o.interior_points->count()) j["interior_points"] = f.interior_points;
  if (f.timings) j["timings"] = true;
  apply_config(cfg, j);
  if (o.suites->count()) cfg.suites = f.suites;
  return cfg;
}

int cmd_enumerate(const RunConfig& cfg) {
  const BaseManifold base = cfg.base();
  const auto cands = enumerate_candidates(cfg.dimension(), base.fano_index(), cfg.pmax);
  std::printf("# base %s, n=%d, I=%d, pmax=%d\n", base.describe().c_str(), cfg.dimension(), base.fano_index(),
              cfg.pmax);
  std::printf("%-4s %-4s %-10s %-3s %-9s %s\n", "p", "k", "case", "r", "status", "reason");
  int admissible = 0;
  for (const auto& c : cands) {
    const auto& fp = c.family;
    const std::string k = fp.k > 0 ? std::to_string(fp.k) : "-";
    const std::string kind = fp.k > 0 ? to_string(fp.kind) : "-";
    const std::string r = fp.kind == ResolutionCase::Canonical && fp.k > 0 ? std::to_string(fp.r) : "-";
    std::printf("%-4d %-4s %-10s %-3s %-9s %s\n", fp.p, k.c_str(), kind.c_str(), r.c_str(),
                c.admissible ? "ok" : "rejected", c.reason.c_str());
    if (c.admissible) ++admissible;
  }
  std::printf("# %d admissible\n", admissible);
  return 0;
}

int cmd_solve(const RunConfig& cfg) {
  const FamilyParams fp = cfg.family();
  fp.validate();
  const RootSolution rs = solve_family(fp);
  std::cout << serialize(solution_record(fp, rs));
  return 0;
}

int cmd_verify(const RunConfig& cfg) {
  std::vector<std::string> suites = cfg.suites.empty() ? suite_names() : cfg.suites;
  for (const auto& s : suites)
    if (std::find(suite_names().begin(), suite_names().end(), s) == suite_names().end())
      throw PreconditionError("unknown suite '" + s + "'");
  const bool want_lemmas = std::find(suites.begin(), suites.end(), "lemmas") != suites.end();
  std::erase(suites, std::string("lemmas"));

  std::vector<VerificationReport> reports;
  if (!suites.empty()) {
    const FamilyParams fp = cfg.family();
    fp.validate();
    reports = run_suites(fp, cfg.base(), suites, cfg.samples, cfg.tolerances, cfg.controls());
  }
  if (want_lemmas) reports.push_back(run_lemma_suites(cfg.n.value_or(cfg.dimension()), cfg.samples, cfg.tolerances));

  fs::create_directories(cfg.out);
  for (const auto& r : reports) write_text_file((fs::path(cfg.out) / (r.suite + ".json")).string(), serialize(to_json(r, cfg.timings)));
  const auto summary = summary_json(reports);
  write_text_file((fs::path(cfg.out) / "summary.json").string(), serialize(summary));
  std::cout << serialize(summary);
  if (!summary.at("pass").get<bool>()) {
    std::cerr << "verification failed; worst suite: " << summary.at("worst_suite").get<std::string>() << "\n";
    return kExitFail;
  }
  return 0;
}

int cmd_profile(const RunConfig& cfg) {
  const FamilyParams fp = cfg.family();
  fp.validate();
  const BaseManifold base = cfg.base();
  const RootSolution rs = solve_family(fp);
  const AssembledMetric am = assemble(fp, rs, base);
  const int n = fp.n;
  const int count = 201;
  fs::create_directories(cfg.out);
  auto out = [&](const std::string& name) { return (fs::path(cfg.out) / name).string(); };

  std::vector<std::vector<double>> rows;
  const double dir = rs.branch == Branch::XMinus ? -1.0 : 1.0;
  for (int i = 0; i < count; ++i) {
    const double x = rs.x_star + dir * cfg.samples.x_span * i / (count - 1);
    rows.push_back({x, am.X(x)});
  }
  write_text_file(out("X.csv"), csv_text({"x", "X"}, rows));

  rows.clear();
  for (int i = 0; i < count; ++i) {
    const double y = i == count - 1 ? rs.y2 : rs.y1 + (rs.y2 - rs.y1) * i / (count - 1);
    rows.push_back({y, am.Y(y)});
  }
  write_text_file(out("Y.csv"), csv_text({"y", "Y"}, rows));

  std::vector<std::vector<double>> q, r, d;
  for (double nu : nu_grid(n, cfg.samples.lemma_grid)) {
    q.push_back({nu, period_ratio(nu, n)});
    r.push_back({nu, complement_ratio(nu, n)});
    d.push_back({nu, root_combination(nu, n)});
  }
  write_text_file(out("Q.csv"), csv_text({"nu", "Q"}, q));
  write_text_file(out("R.csv"), csv_text({"nu", "R"}, r));
  write_text_file(out("D.csv"), csv_text({"nu", "D"}, d));

  const LinkMetric lm = link_metric(fp, rs, base);
  SampleStream s(cfg.samples.seed, "profile:" + fp.id());
  std::vector<std::vector<double>> lpts;
  for (int i = 0; i < cfg.samples.asymptotic_points; ++i) {
    std::vector<double> p{s.uniform(0.0, 6.283185307179586), 0.0, s.uniform(0.0, 6.283185307179586)};
    p[1] = rs.y1 + (rs.y2 - rs.y1) * (cfg.samples.margin + (1.0 - 2.0 * cfg.samples.margin) * s.uniform());
    const auto b = sample_base(base, s, cfg.samples.base_radius);
    p.insert(p.end(), b.begin(), b.end());
    lpts.push_back(std::move(p));
  }
  const auto e = cone_deviation(pullback(am.metric_field(), asymptotic_chart(am)), cone_metric(lm), lpts,
                                cfg.samples.r_grid);
  rows.clear();
  for (std::size_t i = 0; i < e.size(); ++i) rows.push_back({cfg.samples.r_grid[i], e[i]});
  write_text_file(out("cone_deviation.csv"), csv_text({"r", "e"}, rows));

  // Fibre coordinates: family 0 holds x fixed and sweeps y, family 1 the reverse.
  // The polar chart only exists where V collapses at x = y1.
  if (fp.kind == ResolutionCase::SmallResolutionI) {
    rows.clear();
    const int curves = 6, pts = 41;
    for (int c = 1; c <= curves; ++c) {
      const double x = rs.y1 - 0.5 * c;
      for (int i = 0; i < pts; ++i) {
        const double y = rs.y1 + (rs.y2 - rs.y1) * i / (pts - 1);
        const auto fpol = fibre_polar(fp, rs, x, y, 0.0, 0.0);
        rows.push_back({0.0, x, y, fpol.r1, fpol.r2});
      }
    }
    for (int c = 1; c <= curves; ++c) {
      const double y = rs.y1 + (rs.y2 - rs.y1) * c / (curves + 1);
      for (int i = 0; i < pts; ++i) {
        const double x = rs.y1 - 3.0 * i / (pts - 1);
        const auto fpol = fibre_polar(fp, rs, x, y, 0.0, 0.0);
        rows.push_back({1.0, x, y, fpol.r1, fpol.r2});
      }
    }
    write_text_file(out("fibre_curves.csv"), csv_text({"family", "x", "y", "R1", "R2"}, rows));
  }
  std::printf("wrote profiles for %s to %s\n", fp.id().c_str(), cfg.out.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Verification tools for asymptotically conical Ricci-flat Kähler metrics"};
  app.require_subcommand(1);
  app.fallthrough();
  Flags flags;
  const Options opts = add_flags(app, flags);
  auto* enumerate = app.add_subcommand("enumerate", "list admissible families");
  auto* solve = app.add_subcommand("solve", "solve one family and print the solution record");
  auto* verify = app.add_subcommand("verify", "run verification suites and write JSON reports");
  auto* profile = app.add_subcommand("profile", "write CSV profiles");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitError;
  }

  try {
    const RunConfig cfg = resolve(flags, opts);
    if (enumerate->parsed()) return cmd_enumerate(cfg);
    if (solve->parsed()) return cmd_solve(cfg);
    if (verify->parsed()) return cmd_verify(cfg);
    if (profile->parsed()) return cmd_profile(cfg);
  } catch (const AdmissibilityError& e) {
    std::cout << serialize(error_json("inadmissible", e.what()));
    return kExitError;
  } catch (const PreconditionError& e) {
    std::cout << serialize(error_json("usage", e.what()));
    return kExitError;
  } catch (const std::exception& e) {
    std::cout << serialize(error_json("internal", e.what()));
    return kExitError;
  }
  return kExitError;
}
