// Acceptance run: one PASS/FAIL line per criterion, exit status 0 iff all pass.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "conekit/reports.hpp"
#include "conekit/verification.hpp"

#ifndef CONEKIT_CLI_PATH
#error "CONEKIT_CLI_PATH must point at the CLI binary"
#endif

using namespace conekit;
namespace fs = std::filesystem;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Pinned tolerances.
constexpr double kRicci = 1e-7;
constexpr double kClosed = 1e-9;
constexpr double kJSquared = 1e-10;
constexpr double kNijenhuis = 1e-8;
constexpr double kLinkEinstein = 1e-7;
constexpr double kReeb = 1e-10;
constexpr double kEndpoint = 1e-4;
constexpr double kIdentity = 1e-11;
constexpr double kSmoothAngle = 1e-6;  // relative
constexpr double kOrbifoldAngle = 1e-5;  // relative
constexpr double kConeControl = 1e-10;
constexpr double kSlope = 0.10;  // relative
constexpr double kRuntime = 60.0;  // seconds
constexpr int kInteriorPoints = 50;
constexpr int kLemmaGrid = 1000;
constexpr int kPmax = 10;

Tolerances pinned() {
  Tolerances t;
  t.curvature = kRicci;
  t.closed = kClosed;
  t.j_squared = kJSquared;
  t.nijenhuis = kNijenhuis;
  t.reeb = kReeb;
  t.endpoint = kEndpoint;
  t.identity = kIdentity;
  t.cone_control = kConeControl;
  t.slope = kSlope;
  return t;
}

SampleSpec spec() {
  SampleSpec s;
  s.seed = 1;
  s.interior_points = kInteriorPoints;
  s.lemma_grid = kLemmaGrid;
  return s;
}

const std::vector<FamilyParams>& flagship() {
  static const std::vector<FamilyParams> f{{1, 2, 2, 3, ResolutionCase::SmallResolutionI, 0},
                                           {1, 2, 3, 4, ResolutionCase::SmallResolutionII, 0},
                                           {1, 2, 2, 3, ResolutionCase::Canonical, 1}};
  return f;
}

struct Outcome {
  bool pass = true;
  std::string detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

int failures = 0;

void report(int n, const std::string& title, const Outcome& o, const std::string& summary) {
  std::printf("criterion %2d %s: %s (%s)%s%s\n", n, o.pass ? "PASS" : "FAIL", title.c_str(), summary.c_str(),
              o.detail.empty() ? "" : " -- ", o.detail.c_str());
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

double check_residual(const VerificationReport& r, const std::string& name) {
  for (const auto& c : r.checks)
    if (c.name == name) return c.residual;
  return HUGE_VAL;
}

VerificationReport suite(const FamilyParams& fp, const std::string& name) {
  return run_suites(fp, fubini_study_base(fp.n), {name}, spec(), pinned()).front();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(CONEKIT_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("conekit_acceptance_" + name);
  fs::remove_all(p);
  return p;
}

void criterion1() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (const auto& fp : flagship()) {
    const VerificationReport r = suite(fp, "ricci");
    const double ric = check_residual(r, "ricci");
    worst = std::max(worst, ric);
    o.require(ric < kRicci, fp.id() + " Ric " + sci(ric));
    o.require(r.sample_count == kInteriorPoints, fp.id() + " sample count");
    o.require(r.pass, fp.id() + " suite failed");
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  o.require(secs < kRuntime, "runtime " + std::to_string(secs) + " s");
  report(1, "flagship Ricci-flatness", o, "max |Ric| " + sci(worst) + " < " + sci(kRicci) + ", " + std::to_string(secs) + " s");
}

void criterion2() {
  Outcome o;
  double dw = 0, jj = 0, nj = 0;
  for (const auto& fp : flagship()) {
    const VerificationReport r = suite(fp, "kahler");
    dw = std::max(dw, check_residual(r, "d_omega"));
    jj = std::max(jj, check_residual(r, "j_squared"));
    nj = std::max(nj, check_residual(r, "nijenhuis"));
    o.require(r.pass, fp.id() + " kahler suite failed");
  }
  o.require(dw < kClosed, "d omega " + sci(dw));
  o.require(jj < kJSquared, "J^2 + 1 " + sci(jj));
  o.require(nj < kNijenhuis, "Nijenhuis " + sci(nj));
  report(2, "Kahler structure", o, "d omega " + sci(dw) + ", J^2+1 " + sci(jj) + ", N " + sci(nj));
}

void criterion3() {
  Outcome o;
  double ein = 0, reeb = 0;
  for (const auto& fp : flagship()) {
    const VerificationReport r = suite(fp, "link");
    ein = std::max(ein, check_residual(r, "link_einstein"));
    reeb = std::max(reeb, check_residual(r, "reeb_unit_norm"));
    o.require(r.pass, fp.id() + " link suite failed");
  }
  o.require(ein < kLinkEinstein, "link Einstein " + sci(ein));
  o.require(reeb < kReeb, "Reeb norm " + sci(reeb));
  report(3, "link Einstein with constant 2n+2", o, "residual " + sci(ein) + ", Reeb " + sci(reeb));
}

void criterion4() {
  Outcome o;
  std::string s;
  for (int n = 1; n <= 3; ++n) {
    const VerificationReport r = run_lemma_suites(n, spec(), pinned());
    o.require(r.sample_count >= kLemmaGrid, "grid size");
    for (const char* c : {"q_strictly_increasing", "r_strictly_decreasing", "q_low_end", "q_high_end",
                          "near_nu_max_series"}) {
      const double v = check_residual(r, c);
      bool ok = false;
      for (const auto& ch : r.checks)
        if (ch.name == c) ok = ch.pass;
      o.require(ok, "n=" + std::to_string(n) + " " + c + " " + sci(v));
    }
    o.require(r.pass, "n=" + std::to_string(n) + " lemma suite failed");
    s += (n > 1 ? ", " : "") + std::string("n=") + std::to_string(n) + " Q ends " + sci(check_residual(r, "q_low_end")) +
         "/" + sci(check_residual(r, "q_high_end"));
  }
  report(4, "period-ratio monotonicity and endpoints", o, s);
}

void criterion5() {
  Outcome o;
  int count = 0;
  double worst = 0.0;
  const std::vector<std::pair<int, int>> bases{{1, 2}, {2, 3}, {2, 2}};
  for (auto [n, i] : bases)
    for (const auto& fp : enumerate_families(n, i, kPmax)) {
      const VerificationReport r = verify_identities(fp, solve_family(fp), pinned());
      ++count;
      for (const auto& c : r.checks) {
        if (c.tolerance == kIdentity) worst = std::max(worst, c.residual);
        o.require(c.pass, fp.id() + " " + c.name + " " + sci(c.residual));
      }
    }
  report(5, "exact identities for every family with p <= 10", o,
         std::to_string(count) + " families, worst " + sci(worst) + " < " + sci(kIdentity));
}

void criterion6() {
  Outcome o;
  auto rel = [](double a, double b) { return std::abs(a / b - 1.0); };
  const FamilyParams p1{2, 3, 1, 2, ResolutionCase::SmallResolutionI, 0};
  const VerificationReport a = suite(p1, "collapse");
  double smooth = 0.0;
  for (const char* m : {"fibre_angle_1", "fibre_angle_2"})
    smooth = std::max(smooth, a.metrics.count(m) ? rel(a.metrics.at(m), kTwoPi) : HUGE_VAL);
  o.require(smooth < kSmoothAngle, "p=1 angles " + sci(smooth));
  o.require(a.pass, "p=1 collapse suite failed");

  const VerificationReport b = suite(flagship()[2], "collapse");
  double period = 0.0;
  for (const char* m : {"pole1_period", "pole2_period"})
    period = std::max(period, b.metrics.count(m) ? rel(b.metrics.at(m), kTwoPi) : HUGE_VAL);
  o.require(period < kSmoothAngle, "canonical periods " + sci(period));
  o.require(b.pass, "canonical collapse suite failed");

  const FamilyParams s2 = flagship()[1];
  const VerificationReport c = suite(s2, "collapse");
  const int d = s2.d();
  double orb = 0.0;
  if (c.metrics.count("pole1_angle") && c.metrics.count("pole2_angle")) {
    orb = std::max(rel(c.metrics.at("pole1_angle"), kTwoPi / d), rel(c.metrics.at("pole2_angle"), kTwoPi / (s2.p - d)));
  } else {
    orb = HUGE_VAL;
  }
  o.require(orb < kOrbifoldAngle, "weighted poles " + sci(orb));
  o.require(c.pass, "small resolution II collapse suite failed");
  report(6, "collapse angles and periods", o,
         "p=1 " + sci(smooth) + ", canonical " + sci(period) + ", weighted " + sci(orb) + " relative");
}

void criterion7() {
  Outcome o;
  const BaseManifold cp1 = fubini_study_base(1);
  int checked = 0;
  for (const auto& fp : enumerate_families(1, 2, kPmax)) {
    const ChernData cd = periods(fp, cp1);
    o.require(cd.fibre_period == Rational(fp.p) && cd.base_periods.size() == 1 && cd.base_periods[0] == Rational(fp.k),
              fp.id() + " periods");
    if (fp.kind == ResolutionCase::Canonical) {
      const CanonicalDegrees deg = canonical_orbifold_degrees(fp, cp1);
      // K_M^orb pairs to −(k/r, (pI − k)/(p − r)) against sections over a line with ⟨c₁(K_V^{1/I}), Σ⟩ = −1.
      const long pi = static_cast<long>(fp.p) * fp.fano_index;
      o.require(-deg.deg1 == Rational(fp.k, fp.r), fp.id() + " first degree " + deg.deg1.str());
      o.require(-deg.deg2 == Rational(pi - fp.k, fp.p - fp.r), fp.id() + " second degree " + deg.deg2.str());
      o.require(deg.fano == (fp.k < pi), fp.id() + " Fano flag");
    }
    ++checked;
  }
  o.require(wcp_chern(2, 1) == Rational(2), "wcp_chern(2, 1) = " + wcp_chern(2, 1).str());
  report(7, "exact Chern data", o, std::to_string(checked) + " families, wcp_chern(2,1) = " + wcp_chern(2, 1).str());
}

void criterion8() {
  Outcome o;
  double cone = 0.0, slope = 0.0;
  for (const auto& fp : flagship()) {
    const VerificationReport r = suite(fp, "asymptotics");
    bool decreasing = false;
    for (const auto& c : r.checks)
      if (c.name == "strictly_decreasing") decreasing = c.pass;
    o.require(decreasing, fp.id() + " e(r) not strictly decreasing");
    cone = std::max(cone, check_residual(r, "calabi_mu0_cone"));
    slope = std::max(slope, check_residual(r, "calabi_slope"));
    o.require(r.pass, fp.id() + " asymptotics suite failed");
  }
  o.require(cone < kConeControl, "mu = 0 control " + sci(cone));
  o.require(slope < kSlope, "slope " + sci(slope));
  report(8, "asymptotically conical", o, "mu=0 control " + sci(cone) + ", slope error " + sci(slope));
}

void criterion9() {
  Outcome o;
  const fs::path out = scratch("controls");
  const std::string base = "verify --base cp 1 --p 2 --k 3 --case small1 --out " + out.string();
  const int clean_ricci = run_cli(base + " --suite ricci");
  const int clean_link = run_cli(base + " --suite link");
  const int clean_kahler = run_cli(base + " --suite kahler");
  const int mu = run_cli(base + " --suite ricci --perturb-mu 1e-3");
  const int lam = run_cli(base + " --suite link --einstein-constant 3");
  const int omega = run_cli(base + " --suite kahler --scale-omega 2");
  o.require(clean_ricci == 0 && clean_link == 0 && clean_kahler == 0, "unperturbed runs did not pass");
  o.require(mu == 1, "perturbed mu exit " + std::to_string(mu));
  o.require(lam == 1, "Einstein constant 2n+1 exit " + std::to_string(lam));
  o.require(omega == 1, "scaled omega exit " + std::to_string(omega));
  fs::remove_all(out);
  report(9, "falsifiability controls exit nonzero", o,
         "exits mu " + std::to_string(mu) + ", lambda " + std::to_string(lam) + ", omega " + std::to_string(omega));
}

void criterion10() {
  Outcome o;
  const fs::path a = scratch("run_a"), b = scratch("run_b");
  const std::string common = " --base cp 1 --p 2 --k 3 --case small1 --seed 7 --out ";
  for (const auto& dir : {a, b}) {
    o.require(run_cli("verify" + common + dir.string()) == 0, "verify run failed");
    o.require(run_cli("profile" + common + dir.string()) == 0, "profile run failed");
  }
  int files = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    const fs::path other = b / e.path().filename();
    o.require(fs::exists(other), e.path().filename().string() + " missing in second run");
    if (fs::exists(other)) o.require(slurp(e.path()) == slurp(other), e.path().filename().string() + " differs");
    ++files;
  }
  o.require(files >= 10, "only " + std::to_string(files) + " files written");
  fs::remove_all(a);
  fs::remove_all(b);
  report(10, "byte-identical reruns", o, std::to_string(files) + " JSON/CSV files compared");
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  criterion10();
  std::printf("%d of 10 criteria passed\n", 10 - failures);
  return failures == 0 ? 0 : 1;
}
