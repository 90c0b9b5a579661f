#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"

#include "chiralvdw/cli.hpp"
#include "chiralvdw/errors.hpp"
#include "chiralvdw/greens.hpp"
#include "chiralvdw/units.hpp"

using namespace chiralvdw;

namespace {

struct Run {
  int code = -1;
  std::string out, err;
};

Run vdw(std::vector<std::string> args) {
  args.insert(args.begin(), "vdw");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

// Non-comment lines: the column header followed by records.
std::vector<std::string> records(const std::string& text) {
  std::vector<std::string> out;
  for (const auto& line : split(text, '\n')) {
    if (!line.empty() && line[0] != '#') out.push_back(line);
  }
  return out;
}

std::string column_name(const std::string& annotated) { return annotated.substr(0, annotated.find('[')); }

const std::vector<std::string> kSmallGrid = {"--set", "grid.y_linspace=[0.5, 2, 4]", "--set", "grid.z_linspace=[0.5, 3, 3]"};

std::vector<std::string> with(std::vector<std::string> base, const std::vector<std::string>& extra) {
  base.insert(base.end(), extra.begin(), extra.end());
  return base;
}

std::string source_path(const std::string& rel) { return std::string(CHIRALVDW_SOURCE_DIR) + "/" + rel; }

}  // namespace

TEST_CASE("defaults exist for every scenario and reject unknown keys") {
  for (const auto& s : scenario_names()) {
    const TextDocument d = default_run_config(s);
    CHECK(d.get_string("scenario") == s);
    CHECK(d.block("quadrature") != nullptr);
  }
  CHECK_THROWS_AS(make_run_config_from_text("scan", "plate { colour = 2 }", {}), ConfigError);
  CHECK_THROWS_WITH_AS(make_run_config_from_text("scan", "plate { colour = 2 }", {}),
                       doctest::Contains("plate.colour"), ConfigError);
  CHECK_THROWS_AS(make_run_config_from_text("scan", "scenario = cavity", {}), ConfigError);
  CHECK_THROWS_AS(make_run_config_from_text("nonsense", "", {}), ConfigError);
}

TEST_CASE("scan CSV layout") {
  const Run r = vdw(with({"scan"}, kSmallGrid));
  REQUIRE(r.code == 0);
  const auto rows = records(r.out);
  REQUIRE(rows.size() == 1 + 12);
  const std::vector<std::string> expected = {"x", "y", "z", "U_EE", "U_CE", "U_CC", "Fx_EE", "Fy_EE",
                                             "Fz_EE", "Fx_CE", "Fy_CE", "Fz_CE", "er_dot_F_EE", "er_dot_F_CE",
                                             "ratio_CE_EE", "err_estimate"};
  const auto header = split(rows[0], ',');
  REQUIRE(header.size() == expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    CHECK(column_name(header[i]) == expected[i]);
    CHECK(header[i].find('[') != std::string::npos);
  }
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(split(rows[i], ',').size() == expected.size());
  // y fastest
  CHECK(split(rows[2], ',')[1] == "1");
  CHECK(split(rows[2], ',')[2] == "0.5");
  // 12 significant digits
  const std::string u = split(rows[1], ',')[3];
  CHECK(u.find('e') != std::string::npos);
  CHECK(u.substr(0, u.find('e')).size() <= 14);
}

TEST_CASE("scan output is deterministic and independent of the thread count") {
  const Run a = vdw(with({"scan"}, kSmallGrid));
  const Run b = vdw(with({"scan"}, kSmallGrid));
  const Run one = vdw(with({"scan", "--set", "quadrature.threads=1"}, kSmallGrid));
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(records(one.out) == records(a.out));
}

TEST_CASE("echoed configuration reproduces the run") {
  const Run first = vdw(with({"scan", "--set", "plate.chirality=-1", "--nodes", "24"}, kSmallGrid));
  REQUIRE(first.code == 0);
  const std::string echoed = echoed_config(first.out);
  CHECK(echoed.find("chirality = -1") != std::string::npos);
  CHECK(echoed.find("xi_nodes = 24") != std::string::npos);
  const auto path = std::filesystem::temp_directory_path() / "chiralvdw_echo.cfg";
  {
    std::ofstream f(path);
    f << echoed;
  }
  const Run second = vdw({"scan", "--config", path.string()});
  REQUIRE(second.code == 0);
  CHECK(second.out == first.out);
  std::filesystem::remove(path);
}

TEST_CASE("plate chirality override flips the ratio column") {
  const Run plus = vdw(with({"scan"}, kSmallGrid));
  const Run minus = vdw(with({"scan", "--set", "plate.chirality=-1"}, kSmallGrid));
  REQUIRE(plus.code == 0);
  REQUIRE(minus.code == 0);
  const auto p = records(plus.out), m = records(minus.out);
  REQUIRE(p.size() == m.size());
  for (std::size_t i = 1; i < p.size(); ++i) {
    const double rp = std::stod(split(p[i], ',')[14]), rm = std::stod(split(m[i], ',')[14]);
    CHECK(rm == doctest::Approx(-rp).epsilon(1e-9));
  }
}

TEST_CASE("cavity handedness flag") {
  const Run same = vdw({"cavity", "--handedness", "A=+1,C=+1"});
  REQUIRE(same.code == 0);
  CHECK(same.out.find("# force on B vanishes") != std::string::npos);
  CHECK(same.out.find("three-body") != std::string::npos);
  const Run opposite = vdw({"cavity", "--handedness", "A=+1,C=-1"});
  REQUIRE(opposite.code == 0);
  CHECK(opposite.out.find("does not vanish") != std::string::npos);
  const auto row = split(records(opposite.out)[1], ',');
  CHECK(std::stod(row[0]) == doctest::Approx(2.0 * std::stod(row[2])).epsilon(1e-6));
  CHECK(vdw({"cavity", "--handedness", "A=2"}).code == 1);
  CHECK(vdw({"cavity", "--set", "positions.C=0.008"}).code == 1);
}

TEST_CASE("exit codes") {
  CHECK(vdw({}).code == 1);
  CHECK(vdw({"scan", "--bogus"}).code == 1);
  const Run badkey = vdw({"scan", "--set", "quadrature.nodez=3"});
  CHECK(badkey.code == 1);
  CHECK(badkey.err.find("quadrature.nodez") != std::string::npos);
  const Run badmode = vdw({"scan", "--set", "quadrature.mode=fast"});
  CHECK(badmode.code == 1);
  CHECK(badmode.err.find("quadrature.mode") != std::string::npos);
  CHECK(vdw({"potential", "--full"}).code == 1);
  CHECK(vdw({"scan", "--config", "/nonexistent/run.cfg"}).code == 3);
  CHECK(vdw({"scan", "--set", "molecules.A=\"/nonexistent/a.mol\""}).code == 3);
  CHECK(vdw(with({"scan", "--out", "/nonexistent/dir/out.csv"}, kSmallGrid)).code == 3);

  const Run behind = vdw({"potential", "--set", "positions.B=[0, 0, -0.01]"});
  CHECK(behind.code == 2);
  CHECK(behind.err.find("(0, 0, -0.01)") != std::string::npos);
  const Run all_failed = vdw({"scan", "--set", "grid.y_linspace=[0, 0, 1]", "--set", "grid.z_linspace=[1, 1, 1]"});
  CHECK(all_failed.code == 2);
  const Run some_failed = vdw({"scan", "--set", "grid.y_linspace=[0, 1, 2]", "--set", "grid.z_linspace=[1, 1, 1]"});
  CHECK(some_failed.code == 0);
  CHECK(some_failed.err.find("warning") != std::string::npos);
  CHECK(records(some_failed.out)[1].find("nan") != std::string::npos);
}

TEST_CASE("--out writes the same document") {
  const auto path = std::filesystem::temp_directory_path() / "chiralvdw_out.csv";
  const Run r = vdw(with({"scan", "--out", path.string()}, kSmallGrid));
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  const Run direct = vdw(with({"scan"}, kSmallGrid));
  CHECK(records(ss.str()) == records(direct.out));
  std::filesystem::remove(path);
}

TEST_CASE("SI units convert lengths in and energies out") {
  const UnitScale scale;
  const double L = scale.length();
  const Run internal = vdw({"potential"});
  std::ostringstream a, b;
  a << "positions.A=[0, 0, " << 0.01 * L << "]";
  b << "positions.B=[0, " << 0.01 * L << ", " << 0.02 * L << "]";
  const Run si = vdw({"potential", "--set", "units=SI", "--set", a.str(), "--set", b.str()});
  REQUIRE(internal.code == 0);
  REQUIRE(si.code == 0);
  const auto ri = split(records(internal.out)[1], ','), rs = split(records(si.out)[1], ',');
  CHECK(column_name(split(records(si.out)[0], ',')[6]) == "U_EE");
  CHECK(split(records(si.out)[0], ',')[6] == "U_EE[J]");
  for (int c = 6; c <= 8; ++c) {
    CHECK(std::stod(rs[c]) == doctest::Approx(std::stod(ri[c]) * scale.energy()).epsilon(1e-8));
  }
  CHECK(std::stod(rs[5]) == doctest::Approx(0.02 * L).epsilon(1e-10));
}

TEST_CASE("greens-dump records") {
  const Run r = vdw({"greens-dump", "--set", "greens.xi=[0.5, 2]", "--set", "greens.part=free"});
  REQUIRE(r.code == 0);
  const auto rows = records(r.out);
  REQUIRE(rows.size() == 1 + 2 * 4);
  CHECK(split(rows[0], ',').size() == 17);
  const GeometryPair g{Vector3(0, 0, 0.01), Vector3(0, 0.01, 0.02)};
  const Tensor3 G = free_space_G(g, 2.0);
  const auto row = split(rows[5], ',');
  CHECK(row[7] == "G");
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) CHECK(std::stod(row[8 + 3 * i + j]) == doctest::Approx(G(i, j)).epsilon(1e-10));
  }
}

TEST_CASE("shipped example configurations run") {
  for (const auto& [scenario, file] : std::vector<std::pair<std::string, std::string>>{
           {"scan", "scan_plate.cfg"}, {"cavity", "cavity.cfg"}, {"potential", "potential.cfg"},
           {"greens-dump", "greens.cfg"}}) {
    CAPTURE(file);
    const Run r = vdw({scenario, "--config", source_path("data/configs/" + file)});
    CHECK(r.code == 0);
    CHECK(records(r.out).size() >= 2);
  }
}
