#include "conekit/reports.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "conekit/errors.hpp"

namespace conekit {

using nlohmann::json;

namespace {

std::string format_double(double v) {
  if (std::isnan(v)) return "\"nan\"";
  if (std::isinf(v)) return v > 0 ? "\"inf\"" : "\"-inf\"";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s(buf);
  // Keep the value typed as a float on re-parse.
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

void write(std::ostringstream& os, const json& j, int depth) {
  const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' ');
  const std::string close(static_cast<std::size_t>(2 * depth), ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) os << ",\n";
        first = false;
        os << pad << json(it.key()).dump() << ": ";
        write(os, it.value(), depth + 1);
      }
      os << "\n" << close << "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      os << "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) os << ",\n";
        os << pad;
        write(os, j[i], depth + 1);
      }
      os << "\n" << close << "]";
      return;
    }
    case json::value_t::number_float:
      os << format_double(j.get<double>());
      return;
    default:
      os << j.dump();
  }
}

double number(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "nan") return std::nan("");
    if (s == "inf") return HUGE_VAL;
    if (s == "-inf") return -HUGE_VAL;
    throw PreconditionError("expected a number, got string '" + s + "'");
  }
  return j.get<double>();
}

json dbl(double v) {
  if (std::isfinite(v)) return v;
  return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep))
    if (!cur.empty()) out.push_back(cur);
  return out;
}

void parse_base(RunConfig& cfg, const std::string& spec) {
  std::istringstream is(spec);
  std::string kind, dims;
  is >> kind >> dims;
  if (kind != "cp" && kind != "product") throw PreconditionError("base must be 'cp N' or 'product d1,d2,...'");
  std::vector<int> parsed;
  for (const auto& t : split(dims, ',')) {
    try {
      parsed.push_back(std::stoi(t));
    } catch (const std::exception&) {
      throw PreconditionError("bad base dimension '" + t + "'");
    }
  }
  if (parsed.empty()) throw PreconditionError("base needs a dimension");
  if (kind == "cp" && (parsed.size() != 1 || parsed[0] < 1)) throw PreconditionError("cp base takes one N >= 1");
  if (kind == "product")
    for (int d : parsed)
      if (d < 2) throw PreconditionError("product factors CP^{d-1} need d >= 2");
  cfg.base_kind = kind;
  cfg.base_dims = parsed;
}

std::string base_string(const RunConfig& cfg) {
  std::string s = cfg.base_kind + " ";
  for (std::size_t i = 0; i < cfg.base_dims.size(); ++i) s += (i ? "," : "") + std::to_string(cfg.base_dims[i]);
  return s;
}

}  // namespace

std::string serialize(const json& j) {
  std::ostringstream os;
  write(os, j, 0);
  os << "\n";
  return os.str();
}

json to_json(const FamilyParams& fp) {
  json j{{"n", fp.n}, {"fano_index", fp.fano_index}, {"p", fp.p}, {"k", fp.k}, {"case", to_string(fp.kind)},
         {"id", fp.id()}};
  if (fp.kind == ResolutionCase::Canonical) j["r"] = fp.r;
  return j;
}

FamilyParams family_from_json(const json& j) {
  FamilyParams fp;
  fp.n = j.at("n").get<int>();
  fp.fano_index = j.at("fano_index").get<int>();
  fp.p = j.at("p").get<int>();
  fp.k = j.at("k").get<int>();
  fp.kind = parse_case(j.at("case").get<std::string>());
  fp.r = j.value("r", 0);
  return fp;
}

json to_json(const RootSolution& rs) {
  return json{{"nu", dbl(rs.nu)},   {"y1", dbl(rs.y1)},          {"y2", dbl(rs.y2)},
              {"mu", dbl(rs.mu)},   {"x_star", dbl(rs.x_star)},  {"branch", to_string(rs.branch)},
              {"ell", dbl(rs.ell)}, {"sign", rs.sign},           {"mu_interval", rs.mu_interval}};
}

RootSolution solution_from_json(const json& j) {
  RootSolution rs;
  rs.nu = number(j.at("nu"));
  rs.y1 = number(j.at("y1"));
  rs.y2 = number(j.at("y2"));
  rs.mu = number(j.at("mu"));
  rs.x_star = number(j.at("x_star"));
  const auto b = j.at("branch").get<std::string>();
  if (b != "XMinus" && b != "XPlus") throw PreconditionError("unknown branch '" + b + "'");
  rs.branch = b == "XMinus" ? Branch::XMinus : Branch::XPlus;
  rs.ell = number(j.at("ell"));
  rs.sign = j.at("sign").get<int>();
  rs.mu_interval = j.at("mu_interval").get<std::string>();
  return rs;
}

json solution_record(const FamilyParams& fp, const RootSolution& rs) {
  const double target = static_cast<double>(fp.p) * fp.fano_index / fp.k;
  json res{{"q_of_nu", dbl(std::abs(period_ratio(rs.nu, fp.n) - target))},
           {"p_at_y1", dbl(std::abs(momentum_polynomial(rs.y1, rs.nu, fp.n)))},
           {"p_at_y2", dbl(std::abs(momentum_polynomial(rs.y2, rs.nu, fp.n)))},
           {"q_at_x_star", dbl(std::abs(collapse_polynomial(rs.x_star, rs.mu, fp.n)))}};
  return json{{"version", kFormatVersion}, {"family", to_json(fp)}, {"solution", to_json(rs)}, {"residuals", res}};
}

json to_json(const VerificationReport& r, bool with_timing) {
  json worst = json::array();
  for (const auto& o : r.worst) {
    json pt = json::array();
    for (double v : o.point) pt.push_back(dbl(v));
    worst.push_back({{"point", pt}, {"residual", dbl(o.residual)}});
  }
  json checks = json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"name", c.name}, {"residual", dbl(c.residual)}, {"tolerance", dbl(c.tolerance)}, {"pass", c.pass}});
  json metrics = json::object();
  for (const auto& [k, v] : r.metrics) metrics[k] = dbl(v);
  json j{{"version", kFormatVersion},
         {"family_id", r.family_id},
         {"suite", r.suite},
         {"sample_count", r.sample_count},
         {"max_residual", dbl(r.max_residual)},
         {"tolerance", dbl(r.tolerance)},
         {"pass", r.pass},
         {"worst", worst},
         {"checks", checks},
         {"metrics", metrics},
         {"exact", r.exact},
         {"notes", r.notes}};
  if (with_timing) j["wall_time_s"] = dbl(r.wall_time_s);
  return j;
}

VerificationReport report_from_json(const json& j) {
  if (j.value("version", "") != std::string(kFormatVersion)) throw PreconditionError("unsupported report version");
  VerificationReport r;
  r.family_id = j.at("family_id").get<std::string>();
  r.suite = j.at("suite").get<std::string>();
  r.sample_count = j.at("sample_count").get<int>();
  r.max_residual = number(j.at("max_residual"));
  r.tolerance = number(j.at("tolerance"));
  r.pass = j.at("pass").get<bool>();
  for (const auto& o : j.at("worst")) {
    Offender off;
    for (const auto& v : o.at("point")) off.point.push_back(number(v));
    off.residual = number(o.at("residual"));
    r.worst.push_back(off);
  }
  for (const auto& c : j.at("checks"))
    r.checks.push_back({c.at("name").get<std::string>(), number(c.at("residual")), number(c.at("tolerance")),
                        c.at("pass").get<bool>()});
  for (const auto& [k, v] : j.at("metrics").items()) r.metrics[k] = number(v);
  r.exact = j.at("exact").get<std::map<std::string, std::string>>();
  r.notes = j.at("notes").get<std::vector<std::string>>();
  if (j.contains("wall_time_s")) r.wall_time_s = number(j.at("wall_time_s"));
  return r;
}

json summary_json(const std::vector<VerificationReport>& reports) {
  json suites = json::array();
  json failed = json::array();
  bool all = !reports.empty();
  std::string worst;
  double worst_ratio = -1.0;
  for (const auto& r : reports) {
    suites.push_back({{"suite", r.suite},
                      {"family_id", r.family_id},
                      {"pass", r.pass},
                      {"max_residual", dbl(r.max_residual)},
                      {"tolerance", dbl(r.tolerance)}});
    all = all && r.pass;
    if (!r.pass) failed.push_back(r.suite);
    const double ratio = r.tolerance > 0 ? r.max_residual / r.tolerance : (r.pass ? 0.0 : HUGE_VAL);
    if (ratio > worst_ratio) {
      worst_ratio = ratio;
      worst = r.suite;
    }
  }
  return json{{"version", kFormatVersion}, {"pass", all}, {"suites", suites}, {"failed", failed},
              {"worst_suite", worst}};
}

json error_json(const std::string& kind, const std::string& message) {
  return json{{"version", kFormatVersion}, {"error", kind}, {"message", message}};
}

std::string csv_text(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + header[i];
  out += "\n";
  char buf[40];
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.16e", row[i]);
      if (i) out += ",";
      out += buf;
    }
    out += "\n";
  }
  return out;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw PreconditionError("cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw PreconditionError("failed writing '" + path + "'");
}

BaseManifold RunConfig::base() const {
  if (base_kind == "cp") return fubini_study_base(base_dims.front());
  return product_base(std::span<const int>(base_dims));
}

int RunConfig::dimension() const {
  if (base_kind == "cp") return base_dims.front();
  int n = 0;
  for (int d : base_dims) n += d - 1;
  return n;
}

FamilyParams RunConfig::family() const {
  FamilyParams fp;
  fp.n = dimension();
  fp.fano_index = base().fano_index();
  fp.p = p;
  fp.k = k;
  fp.kind = parse_case(kind);
  fp.r = fp.kind == ResolutionCase::Canonical ? r : 0;
  return fp;
}

ControlOptions RunConfig::controls() const { return {perturb_mu, scale_omega, einstein_constant}; }

void apply_config(RunConfig& cfg, const json& j) {
  if (!j.is_object()) throw PreconditionError("config must be a JSON object");
  if (!j.contains("version")) throw PreconditionError("config is missing \"version\"");
  if (!j.at("version").is_string() || j.at("version").get<std::string>() != kFormatVersion)
    throw PreconditionError("unsupported config version (expected \"1\")");
  for (const auto& [key, v] : j.items()) {
    try {
      if (key == "version") continue;
      else if (key == "base") parse_base(cfg, v.get<std::string>());
      else if (key == "p") cfg.p = v.get<int>();
      else if (key == "k") cfg.k = v.get<int>();
      else if (key == "case") cfg.kind = v.get<std::string>();
      else if (key == "r") cfg.r = v.get<int>();
      else if (key == "pmax") cfg.pmax = v.get<int>();
      else if (key == "n") cfg.n = v.get<int>();
      else if (key == "suite") cfg.suites = split(v.get<std::string>(), ',');
      else if (key == "out") cfg.out = v.get<std::string>();
      else if (key == "perturb_mu") cfg.perturb_mu = v.get<double>();
      else if (key == "scale_omega") cfg.scale_omega = v.get<double>();
      else if (key == "einstein_constant") cfg.einstein_constant = v.get<double>();
      else if (key == "timings") cfg.timings = v.get<bool>();
      else if (key == "seed") cfg.samples.seed = v.get<std::uint64_t>();
      else if (key == "interior_points") cfg.samples.interior_points = v.get<int>();
      else if (key == "link_points") cfg.samples.link_points = v.get<int>();
      else if (key == "asymptotic_points") cfg.samples.asymptotic_points = v.get<int>();
      else if (key == "calabi_points") cfg.samples.calabi_points = v.get<int>();
      else if (key == "margin") cfg.samples.margin = v.get<double>();
      else if (key == "x_span") cfg.samples.x_span = v.get<double>();
      else if (key == "base_radius") cfg.samples.base_radius = v.get<double>();
      else if (key == "lemma_grid") cfg.samples.lemma_grid = v.get<int>();
      else if (key == "tol_curvature") cfg.tolerances.curvature = v.get<double>();
      else if (key == "tol_closed") cfg.tolerances.closed = v.get<double>();
      else if (key == "tol_collapse") cfg.tolerances.collapse = v.get<double>();
      else if (key == "tol_identity") cfg.tolerances.identity = v.get<double>();
      else throw PreconditionError("unknown config key '" + key + "'");
    } catch (const json::exception& e) {
      throw PreconditionError("bad value for config key '" + key + "': " + e.what());
    }
  }
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw PreconditionError("cannot read config '" + path + "'");
  json j;
  try {
    j = json::parse(f);
  } catch (const json::exception& e) {
    throw PreconditionError("config '" + path + "' is not valid JSON: " + e.what());
  }
  RunConfig cfg;
  apply_config(cfg, j);
  return cfg;
}

json to_json(const RunConfig& cfg) {
  std::string suites;
  for (std::size_t i = 0; i < cfg.suites.size(); ++i) suites += (i ? "," : "") + cfg.suites[i];
  json j{{"version", cfg.version},
         {"base", base_string(cfg)},
         {"p", cfg.p},
         {"k", cfg.k},
         {"case", cfg.kind},
         {"r", cfg.r},
         {"pmax", cfg.pmax},
         {"suite", suites},
         {"out", cfg.out},
         {"perturb_mu", cfg.perturb_mu},
         {"scale_omega", cfg.scale_omega},
         {"einstein_constant", cfg.einstein_constant},
         {"timings", cfg.timings},
         {"seed", cfg.samples.seed},
         {"interior_points", cfg.samples.interior_points},
         {"link_points", cfg.samples.link_points},
         {"asymptotic_points", cfg.samples.asymptotic_points},
         {"calabi_points", cfg.samples.calabi_points},
         {"margin", cfg.samples.margin},
         {"x_span", cfg.samples.x_span},
         {"base_radius", cfg.samples.base_radius},
         {"lemma_grid", cfg.samples.lemma_grid},
         {"tol_curvature", cfg.tolerances.curvature},
         {"tol_closed", cfg.tolerances.closed},
         {"tol_collapse", cfg.tolerances.collapse},
         {"tol_identity", cfg.tolerances.identity}};
  if (cfg.n) j["n"] = *cfg.n;
  return j;
}

}  // namespace conekit
