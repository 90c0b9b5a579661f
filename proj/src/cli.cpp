#include "chiralvdw/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "chiralvdw/errors.hpp"
#include "chiralvdw/finite_difference.hpp"
#include "chiralvdw/forces.hpp"
#include "chiralvdw/molecule_io.hpp"

namespace chiralvdw {

namespace {

std::string num(double x) {
  if (x == 0.0) x = 0.0;  // no "-0"
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

// Shortest form that reads back to the same double.
std::string exact(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

const char* kScan = "scan";
const char* kPotential = "potential";
const char* kCavity = "cavity";
const char* kGreens = "greens-dump";

std::string quadrature_defaults(bool stencil, bool threads) {
  const QuadratureSpec xi;
  const QuadratureSpec plate = default_plate_spec();
  std::string q = "quadrature {\n";
  if (stencil) q += "  mode = nr\n";
  q += "  xi_nodes = " + std::to_string(xi.nodes) + "\n";
  q += "  xi_tolerance = " + num(xi.relative_tolerance) + "\n";
  q += "  xi_refinements = " + std::to_string(xi.max_refinements) + "\n";
  q += "  plate_nodes = " + std::to_string(plate.nodes) + "\n";
  q += "  plate_tolerance = " + num(plate.relative_tolerance) + "\n";
  q += "  plate_refinements = " + std::to_string(plate.max_refinements) + "\n";
  if (stencil) q += "  fd_step = 1e-4\n";
  if (threads) q += "  threads = 0\n";
  return q + "}\n";
}

std::string defaults_text(const std::string& scenario) {
  std::string t = "scenario = \"" + scenario + "\"\nunits = internal\nomega_ref = " + exact(si::atomic_frequency) + "\n";
  if (scenario == kCavity) {
    t += "molecules {\n  A = \"preset:3mcp-like\"\n  B = \"preset:rb-like\"\n  C = \"preset:3mcp-like\"\n}\n";
    t += "cavity {\n  z_low = 0\n  z_high = 0.01\n  chirality = +1\n}\n";
    t += "positions {\n  A = 0.0025\n  B = 0.005\n  C = 0.0075\n}\n";
    return t + quadrature_defaults(true, false);
  }
  t += "molecules {\n  A = \"preset:3mcp-like\"\n  B = \"preset:rb-like\"\n}\n";
  t += "environment = plate\nplate {\n  z0 = 0\n  chirality = +1\n}\n";
  if (scenario == kScan) {
    t += "positions {\n  A = [0, 0, 1]\n}\n";
    t += "grid {\n  x = 0\n  y_linspace = [0.5, 10, 20]\n  z_linspace = [0.5, 10, 20]\n}\n";
    return t + quadrature_defaults(true, true);
  }
  t += "positions {\n  A = [0, 0, 0.01]\n  B = [0, 0.01, 0.02]\n}\n";
  if (scenario == kGreens) t += "greens {\n  xi = [0.1, 1, 10]\n  part = total\n}\n";
  return t + quadrature_defaults(false, false);
}

// Dotted keys accepted besides the ones present in the defaults.
std::set<std::string> optional_keys(const std::string& scenario) {
  std::set<std::string> keys = {"output", "handedness.A", "handedness.B"};
  if (scenario == kCavity) {
    keys.insert("handedness.C");
    return keys;
  }
  for (const char* k : {"cavity.z_low", "cavity.z_high", "cavity.chirality", "plate.normal"}) keys.insert(k);
  if (scenario == kScan) {
    for (const char* k : {"grid.y_over_za", "grid.z_over_za", "calibration.target"}) keys.insert(k);
  }
  return keys;
}

void collect_keys(const TextDocument& doc, const std::string& prefix, std::set<std::string>& out) {
  for (const std::string& k : doc.keys()) {
    const std::string dotted = prefix.empty() ? k : prefix + "." + k;
    if (doc.find(k)) {
      out.insert(dotted);
    } else {
      for (const TextDocument* b : doc.blocks(k)) collect_keys(*b, dotted, out);
    }
  }
}

void merge_into(TextDocument& dst, const TextDocument& src, const std::string& prefix,
                const std::set<std::string>& allowed, const std::string& origin) {
  for (const std::string& k : src.keys()) {
    const std::string dotted = prefix.empty() ? k : prefix + "." + k;
    if (const TextValue* v = src.find(k)) {
      if (!allowed.count(dotted)) throw ConfigError(origin + ": unknown key '" + dotted + "'");
      dst.set(k, *v);
    } else {
      for (const TextDocument* b : src.blocks(k)) merge_into(dst.block_or_create(k), *b, dotted, allowed, origin);
    }
  }
}

void apply_overrides(TextDocument& doc, const std::string& scenario, const RunOverrides& ov,
                     const std::set<std::string>& allowed) {
  TextDocument flags;
  if (ov.full) {
    if (scenario != kScan && scenario != kCavity) throw ConfigError("--full applies to the scan and cavity scenarios");
    flags.set_dotted("quadrature.mode", "full");
  }
  if (ov.nodes < 0) throw ConfigError("--nodes must be positive");
  if (ov.nodes > 0) flags.set_dotted("quadrature.xi_nodes", std::to_string(ov.nodes));
  if (!ov.out.empty()) flags.set("output", TextValue{{ov.out}, false, 0});
  if (!ov.handedness.empty()) {
    std::stringstream ss(ov.handedness);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw ConfigError("--handedness: expected NAME=+1|-1, got '" + item + "'");
      const std::string name = item.substr(0, eq), value = item.substr(eq + 1);
      if (value != "+1" && value != "1" && value != "-1") {
        throw ConfigError("--handedness: value for '" + name + "' must be +1 or -1");
      }
      flags.set_dotted("handedness." + name, value);
    }
  }
  merge_into(doc, flags, "", allowed, "flags");

  TextDocument sets;
  for (const std::string& kv : ov.set) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("--set: expected KEY=VALUE, got '" + kv + "'");
    sets.set_dotted(kv.substr(0, eq), kv.substr(eq + 1));
  }
  merge_into(doc, sets, "", allowed, "--set");
}

RunConfig build(const std::string& scenario, const TextDocument* file, const RunOverrides& ov) {
  const auto& names = scenario_names();
  if (std::find(names.begin(), names.end(), scenario) == names.end()) {
    throw ConfigError("unknown scenario '" + scenario + "'");
  }
  RunConfig cfg;
  cfg.scenario = scenario;
  cfg.doc = default_run_config(scenario);
  std::set<std::string> allowed = optional_keys(scenario);
  collect_keys(cfg.doc, "", allowed);
  if (file) {
    if (const TextValue* s = file->find("scenario"); s && !s->items.empty() && s->items.front() != scenario) {
      throw ConfigError(file->origin() + ": key 'scenario' is '" + s->items.front() + "' but the command is '" +
                        scenario + "'");
    }
    merge_into(cfg.doc, *file, "", allowed, file->origin());
  }
  apply_overrides(cfg.doc, scenario, ov, allowed);
  return cfg;
}

// ---------------------------------------------------------------------------

struct Units {
  bool si = false;
  UnitScale scale;

  double length_in(double x) const { return si ? x / scale.length() : x; }
  double length_out(double x) const { return si ? x * scale.length() : x; }
  double energy_out(double e) const { return si ? e * scale.energy() : e; }
  double force_out(double f) const { return si ? f * scale.force() : f; }
  double frequency_in(double w) const { return si ? w / scale.omega_ref : w; }
  double frequency_out(double w) const { return si ? w * scale.omega_ref : w; }
  const char* length_unit() const { return si ? "m" : "c/omega_ref"; }
  const char* energy_unit() const { return si ? "J" : "hbar*omega_ref"; }
  const char* force_unit() const { return si ? "N" : "hbar*omega_ref^2/c"; }
  const char* frequency_unit() const { return si ? "rad/s" : "omega_ref"; }
};

Units read_units(const TextDocument& doc) {
  Units u;
  const std::string name = doc.get_string("units");
  if (name == "SI" || name == "si") {
    u.si = true;
  } else if (name != "internal") {
    throw ConfigError("key 'units' must be 'internal' or 'SI', got '" + name + "'");
  }
  u.scale.omega_ref = doc.get_double("omega_ref");
  if (!(u.scale.omega_ref > 0.0)) throw ConfigError("key 'omega_ref' must be positive");
  return u;
}

const TextDocument& require_block(const TextDocument& doc, const char* name) {
  const TextDocument* b = doc.block(name);
  if (!b) throw ConfigError("missing block '" + std::string(name) + "'");
  return *b;
}

PolarizabilityModel read_molecule(const RunConfig& cfg, const Units& u, const std::string& label) {
  const TextDocument& mols = require_block(cfg.doc, "molecules");
  std::string ref = mols.get_string(label);
  if (ref.rfind("preset:", 0) != 0 && !cfg.base_dir.empty()) {
    const std::filesystem::path p(ref);
    if (p.is_relative() && !std::filesystem::exists(p) && std::filesystem::exists(std::filesystem::path(cfg.base_dir) / p)) {
      ref = (std::filesystem::path(cfg.base_dir) / p).string();
    }
  }
  PolarizabilityModel m = resolve_molecule(ref, u.scale);
  if (const TextDocument* hand = cfg.doc.block("handedness"); hand && hand->has(label)) {
    const int h = hand->get_int(label);
    if (h != 1 && h != -1) throw ConfigError("key 'handedness." + label + "' must be +1 or -1");
    m = m.with_handedness(h);
  }
  return m;
}

int read_chirality(const TextDocument& block, const std::string& where) {
  const int c = block.get_int("chirality");
  if (c != 1 && c != -1) throw ConfigError("key '" + where + ".chirality' must be +1 or -1");
  return c;
}

Environment read_environment(const TextDocument& doc, const Units& u) {
  const std::string kind = doc.get_string("environment");
  if (kind == "free") return Environment::free_space();
  if (kind == "plate") {
    const TextDocument& p = require_block(doc, "plate");
    PlateSpec plate{u.length_in(p.get_double("z0")), read_chirality(p, "plate"), p.get_int("normal", +1)};
    if (plate.normal != 1 && plate.normal != -1) throw ConfigError("key 'plate.normal' must be +1 or -1");
    return Environment{{plate}};
  }
  if (kind == "cavity") {
    const TextDocument& c = require_block(doc, "cavity");
    const double lo = u.length_in(c.get_double("z_low")), hi = u.length_in(c.get_double("z_high"));
    if (!(lo < hi)) throw ConfigError("key 'cavity.z_high' must exceed 'cavity.z_low'");
    return Environment::cavity(lo, hi, read_chirality(c, "cavity"));
  }
  throw ConfigError("key 'environment' must be free, plate or cavity, got '" + kind + "'");
}

PotentialSpec read_spec(const TextDocument& doc) {
  const TextDocument& q = require_block(doc, "quadrature");
  PotentialSpec spec;
  spec.xi.nodes = q.get_int("xi_nodes");
  spec.xi.relative_tolerance = q.get_double("xi_tolerance");
  spec.xi.max_refinements = q.get_int("xi_refinements");
  spec.plate.nodes = q.get_int("plate_nodes");
  spec.plate.relative_tolerance = q.get_double("plate_tolerance");
  spec.plate.max_refinements = q.get_int("plate_refinements");
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("quadrature block: ") + e.what());
  }
  return spec;
}

EvaluationMode read_mode(const TextDocument& doc) {
  const std::string m = require_block(doc, "quadrature").get_string("mode");
  if (m == "nr") return EvaluationMode::NonRetarded;
  if (m == "full") return EvaluationMode::Full;
  throw ConfigError("key 'quadrature.mode' must be 'nr' or 'full', got '" + m + "'");
}

Vector3 read_position(const TextDocument& doc, const Units& u, const std::string& label) {
  const Vector3 p = require_block(doc, "positions").get_vector3(label);
  return Vector3(u.length_in(p.x()), u.length_in(p.y()), u.length_in(p.z()));
}

std::vector<double> read_axis(const TextDocument& grid, const std::string& axis) {
  const std::string list = axis + "_over_za", lin = axis + "_linspace";
  if (grid.has(list)) return grid.get_doubles(list);
  const std::vector<double> spec = grid.get_doubles(lin);
  if (spec.size() != 3 || spec[2] < 1 || spec[2] != std::floor(spec[2])) {
    throw ConfigError("key 'grid." + lin + "' must be [first, last, count] with a positive integer count");
  }
  const int n = static_cast<int>(spec[2]);
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(n == 1 ? spec[0] : spec[0] + (spec[1] - spec[0]) * i / (n - 1));
  return out;
}

std::string header(const RunConfig& cfg, const Units& u) {
  std::string h = "# chiralvdw " + cfg.scenario + "\n";
  h += "# units: length " + std::string(u.length_unit()) + ", energy " + u.energy_unit() + ", force " +
       u.force_unit() + "; omega_ref = " + num(u.scale.omega_ref) + " rad/s, c/omega_ref = " +
       num(u.scale.length()) + " m\n";
  h += "# effective configuration (lines prefixed '#| '):\n";
  std::stringstream ss(cfg.doc.to_text());
  std::string line;
  while (std::getline(ss, line)) h += "#| " + line + "\n";
  return h;
}

std::string csv_row(const std::vector<double>& v) {
  std::string row;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) row += ",";
    row += num(v[i]);
  }
  return row + "\n";
}

std::string annotate(const std::vector<std::pair<std::string, std::string>>& cols) {
  std::string row;
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (i) row += ",";
    row += cols[i].first + "[" + cols[i].second + "]";
  }
  return row + "\n";
}

ScenarioOutput run_scan(const RunConfig& cfg, const Units& u) {
  ScanConfig sc;
  sc.a = read_molecule(cfg, u, "A");
  sc.b = read_molecule(cfg, u, "B");
  sc.r_a = read_position(cfg.doc, u, "A");
  sc.env = read_environment(cfg.doc, u);
  sc.spec = read_spec(cfg.doc);
  sc.mode = read_mode(cfg.doc);
  const TextDocument& q = require_block(cfg.doc, "quadrature");
  sc.fd_relative_step = q.get_double("fd_step");
  const int threads = q.get_int("threads");
  if (threads < 0) throw ConfigError("key 'quadrature.threads' must be >= 0");
  sc.threads = static_cast<unsigned>(threads);
  const TextDocument& grid = require_block(cfg.doc, "grid");
  sc.set_plane_grid(u.length_in(grid.get_double("x")), read_axis(grid, "y"), read_axis(grid, "z"));

  ScenarioOutput out;
  out.text = header(cfg, u);
  if (const TextDocument* cal = cfg.doc.block("calibration"); cal && cal->has("target")) {
    if (sc.env.plates.size() != 1) throw ConfigError("key 'calibration.target' needs environment = plate");
    const PlateSpec& plate = sc.env.plates.front();
    if (sc.r_a.x() != 0.0 || sc.r_a.y() != 0.0) throw ConfigError("calibration needs A on the axis x = y = 0");
    const Calibration c = calibrate_chirality(sc.a, sc.b, plate.height(sc.r_a), plate, cal->get_double("target"), sc.spec);
    sc.a = c.model;
    out.text += "# calibration: magnetic moments of A scaled by " + num(c.magnetic_scale) +
                "; asymptotic ratios parallel " + num(c.after.parallel) + ", perpendicular " +
                num(c.after.perpendicular) + "\n";
  }
  const ScanResult res = ratio_field(sc);
  const char* L = u.length_unit();
  const char* E = u.energy_unit();
  const char* F = u.force_unit();
  out.text += annotate({{"x", L}, {"y", L}, {"z", L}, {"U_EE", E}, {"U_CE", E}, {"U_CC", E}, {"Fx_EE", F},
                        {"Fy_EE", F}, {"Fz_EE", F}, {"Fx_CE", F}, {"Fy_CE", F}, {"Fz_CE", F}, {"er_dot_F_EE", F},
                        {"er_dot_F_CE", F}, {"ratio_CE_EE", "1"}, {"err_estimate", "relative"}});
  const double nan = std::nan("");
  for (const ScanPoint& p : res.points) {
    std::vector<double> row = {u.length_out(p.position.x()), u.length_out(p.position.y()), u.length_out(p.position.z())};
    if (p.ok) {
      for (double e : {p.energies.EE, p.energies.CE, p.energies.CC}) row.push_back(u.energy_out(e));
      for (const Vector3* f : {&p.force_EE, &p.force_CE}) {
        for (int k = 0; k < 3; ++k) row.push_back(u.force_out((*f)(k)));
      }
      row.push_back(u.force_out(p.er_dot_F_EE));
      row.push_back(u.force_out(p.er_dot_F_CE));
      row.push_back(p.ratio);
      row.push_back(p.err_estimate);
    } else {
      row.resize(16, nan);
      out.warnings.push_back("scan point " + format_point(p.position) + " failed: " + p.failure);
    }
    out.text += csv_row(row);
  }
  if (res.failures() == res.points.size()) {
    throw NumericalError("scan: every grid point failed; first: " + res.points.front().failure);
  }
  return out;
}

ScenarioOutput run_potential(const RunConfig& cfg, const Units& u) {
  const PolarizabilityModel a = read_molecule(cfg, u, "A"), b = read_molecule(cfg, u, "B");
  const GeometryPair g{read_position(cfg.doc, u, "A"), read_position(cfg.doc, u, "B")};
  const Environment env = read_environment(cfg.doc, u);
  const PotentialBreakdown pb = potential_breakdown(a, b, g, env, read_spec(cfg.doc));
  ScenarioOutput out;
  out.text = header(cfg, u);
  const char* L = u.length_unit();
  const char* E = u.energy_unit();
  out.text += annotate({{"x_A", L}, {"y_A", L}, {"z_A", L}, {"x_B", L}, {"y_B", L}, {"z_B", L}, {"U_EE", E},
                        {"U_CE", E}, {"U_CC", E}, {"U_MM", E}, {"U_EM", E}, {"U_CM", E}, {"total", E},
                        {"err_EE", E}, {"err_CE", E}, {"err_CC", E}, {"err_MM", E}, {"err_EM", E}, {"err_CM", E},
                        {"err_total", E}});
  std::vector<double> row;
  for (const Vector3* r : {&g.r_a, &g.r_b}) {
    for (int k = 0; k < 3; ++k) row.push_back(u.length_out((*r)(k)));
  }
  for (double e : {pb.U_EE, pb.U_CE, pb.U_CC, pb.U_MM, pb.U_EM, pb.U_CM, pb.total, pb.errors.EE, pb.errors.CE,
                   pb.errors.CC, pb.errors.MM, pb.errors.EM, pb.errors.CM, pb.errors.total}) {
    row.push_back(u.energy_out(e));
  }
  out.text += csv_row(row);
  return out;
}

ScenarioOutput run_cavity(const RunConfig& cfg, const Units& u) {
  CavityConfig cc;
  cc.a = read_molecule(cfg, u, "A");
  cc.b = read_molecule(cfg, u, "B");
  cc.c = read_molecule(cfg, u, "C");
  const TextDocument& cav = require_block(cfg.doc, "cavity");
  cc.z_low = u.length_in(cav.get_double("z_low"));
  cc.z_high = u.length_in(cav.get_double("z_high"));
  cc.chirality = read_chirality(cav, "cavity");
  const TextDocument& pos = require_block(cfg.doc, "positions");
  cc.z_a = u.length_in(pos.get_double("A"));
  cc.z_b = u.length_in(pos.get_double("B"));
  cc.z_c = u.length_in(pos.get_double("C"));
  cc.spec = read_spec(cfg.doc);
  cc.mode = read_mode(cfg.doc);
  cc.fd_relative_step = require_block(cfg.doc, "quadrature").get_double("fd_step");
  const CavityReport rep = cavity_experiment(cc);

  ScenarioOutput out;
  out.text = header(cfg, u);
  out.text += "# " + rep.note + "\n";
  const double rel = rep.reference > 0.0 ? std::abs(rep.force_z) / rep.reference : 0.0;
  out.text += "# " + std::string(rel < 1e-6 ? "force on B vanishes" : "force on B does not vanish") +
              " (|F_z| / |F_z^EE(A-B)| = " + num(rel) + ")\n";
  const char* F = u.force_unit();
  out.text += annotate({{"Fz_total", F}, {"Fz_AB_EE", F}, {"Fz_AB_CE", F}, {"Fz_AB_CC", F}, {"Fz_CB_EE", F},
                        {"Fz_CB_CE", F}, {"Fz_CB_CC", F}, {"Fz_reference", F}, {"relative", "1"},
                        {"step", u.length_unit()}});
  std::vector<double> row;
  for (double f : {rep.force_z, rep.ab_EE, rep.ab_CE, rep.ab_CC, rep.cb_EE, rep.cb_CE, rep.cb_CC, rep.reference}) {
    row.push_back(u.force_out(f));
  }
  row.push_back(rel);
  row.push_back(u.length_out(rep.step));
  out.text += csv_row(row);
  return out;
}

ScenarioOutput run_greens(const RunConfig& cfg, const Units& u) {
  const GeometryPair g{read_position(cfg.doc, u, "A"), read_position(cfg.doc, u, "B")};
  const Environment env = read_environment(cfg.doc, u);
  env.validate();
  env.check_position(g.r_a);
  env.check_position(g.r_b);
  const PotentialSpec spec = read_spec(cfg.doc);
  const TextDocument& gd = require_block(cfg.doc, "greens");
  const std::string part = gd.get_string("part");
  if (part != "total" && part != "free" && part != "plate") {
    throw ConfigError("key 'greens.part' must be total, free or plate, got '" + part + "'");
  }
  ScenarioOutput out;
  out.text = header(cfg, u);
  const std::string L = u.length_unit();
  const std::string Lp = u.si ? "m" : "(c/omega_ref)";
  out.text += "# tensor units: G 1/" + Lp + ", curl_left and curl_right 1/" + Lp + "^2, curl_both 1/" + Lp + "^3\n";
  out.text += "xi[" + std::string(u.frequency_unit()) + "],x_A[" + L + "],y_A[" + L + "],z_A[" + L + "],x_B[" + L +
              "],y_B[" + L + "],z_B[" + L + "],tensor";
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) out.text += ",T" + std::to_string(i) + std::to_string(j);
  }
  out.text += "\n";
  for (double xi_in : gd.get_doubles("xi")) {
    const double xi = u.frequency_in(xi_in);
    if (!(xi > 0.0)) throw ConfigError("key 'greens.xi' entries must be positive");
    GreensBundle b = free_space_bundle(g, xi);
    if (part == "plate") b = GreensBundle{};
    if (part != "free") {
      for (const PlateSpec& p : env.plates) b += plate_bundle(g, p, xi, spec.plate).bundle;
    }
    const std::pair<const char*, const Tensor3*> rows[] = {
        {"G", &b.g}, {"curl_left", &b.curl_left}, {"curl_right", &b.curl_right}, {"curl_both", &b.curl_both}};
    for (int r = 0; r < 4; ++r) {
      const double scale = u.si ? std::pow(u.scale.length(), -(r == 0 ? 1 : r == 3 ? 3 : 2)) : 1.0;
      std::string line = num(u.frequency_out(xi));
      for (const Vector3* p : {&g.r_a, &g.r_b}) {
        for (int k = 0; k < 3; ++k) line += "," + num(u.length_out((*p)(k)));
      }
      line += std::string(",") + rows[r].first;
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) line += "," + num(scale * (*rows[r].second)(i, j));
      }
      out.text += line + "\n";
    }
  }
  return out;
}

}  // namespace

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names = {kPotential, kScan, kCavity, kGreens};
  return names;
}

TextDocument default_run_config(const std::string& scenario) {
  return TextDocument::parse(defaults_text(scenario), "<defaults>");
}

RunConfig make_run_config(const std::string& scenario, const std::string& config_path, const RunOverrides& overrides) {
  if (config_path.empty()) return build(scenario, nullptr, overrides);
  const TextDocument file = TextDocument::load(config_path);
  RunConfig cfg = build(scenario, &file, overrides);
  cfg.base_dir = std::filesystem::path(config_path).parent_path().string();
  return cfg;
}

RunConfig make_run_config_from_text(const std::string& scenario, const std::string& text, const RunOverrides& overrides) {
  const TextDocument file = TextDocument::parse(text, "<config>");
  return build(scenario, &file, overrides);
}

ScenarioOutput run_scenario(const RunConfig& cfg) {
  const Units u = read_units(cfg.doc);
  if (cfg.scenario == kScan) return run_scan(cfg, u);
  if (cfg.scenario == kPotential) return run_potential(cfg, u);
  if (cfg.scenario == kCavity) return run_cavity(cfg, u);
  if (cfg.scenario == kGreens) return run_greens(cfg, u);
  throw ConfigError("unknown scenario '" + cfg.scenario + "'");
}

std::string echoed_config(const std::string& output) {
  std::stringstream ss(output);
  std::string line, text;
  while (std::getline(ss, line)) {
    if (line.rfind("#| ", 0) == 0) text += line.substr(3) + "\n";
  }
  return text;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dispersion potentials and forces between chiral and achiral molecules near chiral plates", "vdw"};
  app.require_subcommand(1);
  std::string config;
  RunOverrides ov;
  const std::map<std::string, std::string> about = {
      {kPotential, "energy breakdown for one pair of molecules"},
      {kScan, "attractiveness-ratio field over a plane of B positions"},
      {kCavity, "force on B between two enantiomer candidates in a chiral cavity"},
      {kGreens, "dump Green tensors and their curls"}};
  for (const std::string& name : scenario_names()) {
    CLI::App* sub = app.add_subcommand(name, about.at(name));
    sub->add_option("--config", config, "run configuration file");
    sub->add_option("--set", ov.set, "override KEY=VALUE (dotted keys, repeatable)");
    sub->add_option("--out", ov.out, "output file (default: stdout)");
    sub->add_flag("--full", ov.full, "full quadrature instead of the non-retarded closed forms");
    sub->add_option("--nodes", ov.nodes, "initial frequency-quadrature nodes")->check(CLI::PositiveNumber);
    sub->add_option("--handedness", ov.handedness, "molecule handedness, e.g. A=+1,C=-1");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 1;
  }
  const std::string scenario = app.get_subcommands().front()->get_name();
  try {
    const RunConfig cfg = make_run_config(scenario, config, ov);
    const ScenarioOutput res = run_scenario(cfg);
    for (const std::string& w : res.warnings) err << "warning: " << w << "\n";
    const std::string path = cfg.doc.get_string("output", "");
    if (path.empty()) {
      out << res.text;
    } else {
      std::ofstream f(path, std::ios::binary);
      if (!f) throw IoError("cannot open '" + path + "' for writing");
      f << res.text;
      if (!f.flush()) throw IoError("failed writing '" + path + "'");
    }
    return 0;
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    err << "configuration error: " << e.what() << "\n";
    return 1;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace chiralvdw
