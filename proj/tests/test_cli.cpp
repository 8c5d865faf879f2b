#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <json.hpp>

#include "cli/commands.hpp"
#include "cli/config.hpp"
#include "cli/outputs.hpp"
#include "cli/svg.hpp"
#include "sgdphase/errors.hpp"
#include "sgdphase/genfunc.hpp"

namespace fs = std::filesystem;
using namespace sgdcli;
using sgdphase::Error;
using sgdphase::ErrorKind;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("sgdphaselab_test_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string str() const { return path.string(); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(p));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> row;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) row.push_back(cell);
    if (!line.empty() && line.back() == ',') row.push_back("");
    rows.push_back(row);
  }
  return rows;
}

ErrorKind parse_error_kind(const std::vector<std::string>& args) {
  try {
    parse_config(args)->validate();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::invalid_spec;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("minimal flags give defaults") {
  const auto c = parse_config({"simulate", "--nu", "1.5", "--kappa", "3"});
  REQUIRE(c);
  c->validate();
  CHECK(c->source() == Source::power_law);
  CHECK(c->alpha == 0.1);
  CHECK(c->beta == 0.0);
  CHECK(c->batch == 1);
  CHECK(c->modes == 1000);
  CHECK(c->gamma() == 1.0);
  CHECK(c->regimes == std::vector<std::string>{"se", "noiseless"});
}

TEST_CASE("conflicting sources") {
  CHECK(parse_error_kind({"simulate", "--csv", "x.csv", "--nu", "1.5", "--kappa", "3"}) ==
        ErrorKind::config_error);
}

TEST_CASE("out of range momentum") {
  CHECK(parse_error_kind({"simulate", "--nu", "1.5", "--kappa", "3", "--beta", "1.5"}) ==
        ErrorKind::invalid_spec);
  TempDir d("beta");
  CHECK(run_cli({"simulate", "--nu", "1.5", "--kappa", "3", "--beta", "1.5", "--out", d.str()}) == 2);
}

TEST_CASE("config file keys") {
  TempDir d("config");
  const auto file = (d.path / "run.toml").string();
  {
    std::ofstream(file) << "nu = 1.5\nkappa = 3\nalpha = 0.3\nbeta = 0.5\n";
  }
  const auto c = parse_config({"simulate", "--config", file, "--alpha", "0.2"});
  REQUIRE(c);
  CHECK(c->alpha == 0.2);
  CHECK(c->beta == 0.5);
  CHECK(*c->nu == 1.5);

  {
    std::ofstream(file) << "nu = 1.5\nkappa = 3\nlearning_rate = 0.3\n";
  }
  try {
    parse_config({"simulate", "--config", file});
    FAIL("unknown key accepted");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("learning_rate") != std::string::npos);
  }
}

TEST_CASE("grid parsing") {
  const auto g = parse_grid("0.1:4:40");
  CHECK(g.n == 40);
  CHECK(g.values().front() == 0.1);
  CHECK(g.values().back() == 4.0);
  CHECK_THROWS_AS(parse_grid("1:2"), Error);
  CHECK_THROWS_AS(parse_grid("1:2:0"), Error);
  CHECK_THROWS_AS(parse_grid("a:2:3"), Error);
}

TEST_CASE("malformed inputs exit with validation code") {
  TempDir d("fuzz");
  const std::vector<std::vector<std::string>> cases = {
      {"simulate"},
      {"nonsense", "--nu", "1.5", "--kappa", "3"},
      {"simulate", "--nu", "1.5"},
      {"simulate", "--nu", "abc", "--kappa", "3"},
      {"simulate", "--nu", "1.5", "--kappa", "3", "--alpha", "-1"},
      {"simulate", "--nu", "1.5", "--kappa", "3", "--batch", "0"},
      {"simulate", "--nu", "1.5", "--kappa", "3", "--modes", "0"},
      {"simulate", "--nu", "1.5", "--kappa", "3", "--regimes", "se,bogus"},
      {"simulate", "--nu", "1.5", "--kappa", "3", "--convention", "sideways"},
      {"simulate", "--nu", "1.5", "--kappa", "3", "--bogus-flag", "1"},
      {"simulate", "--csv", (d.path / "missing.csv").string()},
      {"stability-map", "--nu", "1.5", "--kappa", "3", "--grid-alpha", "1:2"},
      {"se-error", "--nu", "1.5", "--kappa", "3"},
      {"simulate", "--features", "4", "--samples", "8", "--batch", "9"},
  };
  for (const auto& args : cases) {
    auto full = args;
    full.push_back("--out");
    full.push_back(d.str());
    INFO(args.front() << " " << (args.size() > 1 ? args[1] : ""));
    CHECK(run_cli(full) == 2);
  }
  CHECK(fs::is_empty(d.path));
}

TEST_CASE("domain errors exit with code 3 and leave no files") {
  TempDir d("domain");
  CHECK(run_cli({"divergence", "--nu", "1.5", "--kappa", "3", "--alpha", "0.1", "--batch", "10",
                 "--modes", "200", "--steps", "100", "--out", d.str()}) == 3);
  CHECK(fs::is_empty(d.path));
}

TEST_CASE("manifest checksums match the files") {
  TempDir d("manifest");
  REQUIRE(run_cli({"simulate", "--nu", "1.5", "--kappa", "3", "--modes", "100", "--steps", "200",
                   "--plot", "--out", d.str()}) == 0);
  const auto m = nlohmann::json::parse(slurp(d.path / "manifest.json"));
  CHECK(m["tool"] == "sgdphaselab");
  CHECK(m["config"]["alpha"] == 0.1);
  REQUIRE(m["files"].size() >= 5);
  for (const auto& f : m["files"]) {
    const fs::path p = d.path / f["path"].get<std::string>();
    REQUIRE(fs::exists(p));
    CHECK(f["sha256"] == sha256_file(p.string()));
    CHECK(f["bytes"] == fs::file_size(p));
  }
}

TEST_CASE("trajectory sidecar echoes the run") {
  TempDir d("sidecar");
  REQUIRE(run_cli({"simulate", "--nu", "1.5", "--kappa", "3", "--modes", "100", "--steps", "50",
                   "--seed", "7", "--regimes", "se", "--out", d.str()}) == 0);
  const auto j = nlohmann::json::parse(slurp(d.path / "se.csv.json"));
  CHECK(j["seed"] == 7);
  CHECK(j["diverged"] == false);
  CHECK(j.contains("truncation_tail"));
  CHECK(j["truncation_tail"]["initial_loss"].get<double>() > 0);
}

TEST_CASE("repeated runs are byte identical") {
  TempDir a("repeat_a"), b("repeat_b");
  for (const auto* d : {&a, &b})
    REQUIRE(run_cli({"simulate", "--features", "6", "--samples", "12", "--batch", "3", "--alpha", "0.3",
                     "--steps", "60", "--runs", "50", "--seed", "11", "--regimes", "se,noiseless,full,mc",
                     "--out", d->str()}) == 0);
  for (const auto* name : {"se.csv", "noiseless.csv", "full.csv", "mc.csv"}) {
    INFO(name);
    CHECK(slurp(a.path / name) == slurp(b.path / name));
  }
}

TEST_CASE("full batch has no gradient noise") {
  TempDir d("fullbatch");
  REQUIRE(run_cli({"simulate", "--nu", "1.5", "--kappa", "3", "--modes", "50", "--steps", "40",
                   "--batch", "8", "--dataset-size", "8", "--regimes", "se", "--out", d.str()}) == 0);
  TempDir n("noiseless");
  REQUIRE(run_cli({"simulate", "--nu", "1.5", "--kappa", "3", "--modes", "50", "--steps", "40",
                   "--batch", "8", "--dataset-size", "8", "--regimes", "noiseless", "--out", n.str()}) == 0);
  const auto se = read_csv(d.path / "se.csv");
  const auto nl = read_csv(n.path / "noiseless.csv");
  REQUIRE(se.size() == 42);
  REQUIRE(se.size() == nl.size());
  for (std::size_t r = 1; r < se.size(); ++r) {
    REQUIRE(se[r].size() == 3);
    CHECK(se[r][2].empty());
    CHECK(se[r][1] == nl[r][1]);
  }
}

TEST_CASE("batch-size sweep") {
  TempDir d("blist");
  REQUIRE(run_cli({"simulate", "--nu", "1.5", "--kappa", "3", "--modes", "100", "--steps", "100",
                   "--regimes", "se", "--b-list", "1,4", "--out", d.str()}) == 0);
  const auto b1 = read_csv(d.path / "se_b1.csv");
  const auto b4 = read_csv(d.path / "se_b4.csv");
  REQUIRE(b1.size() == b4.size());
  // Larger batches carry less noise, so the loss is no higher.
  CHECK(std::stod(b4.back()[1]) < std::stod(b1.back()[1]));
  const auto j = nlohmann::json::parse(slurp(d.path / "se_b4.csv.json"));
  CHECK(j["params"]["gamma"] == 0.25);

  TempDir e("blist_bad");
  CHECK(run_cli({"simulate", "--features", "4", "--samples", "8", "--b-list", "2,9", "--out", e.str()}) == 2);
  CHECK(fs::is_empty(e.path));
}

TEST_CASE("stability map boundary column") {
  TempDir d("stabmap");
  const std::vector<std::string> args = {"stability-map", "--nu", "1.5", "--kappa", "3", "--batch", "10",
                                         "--modes", "200", "--steps", "1000", "--grid-alpha", "0.1:4:20",
                                         "--grid-beta", "0:0.9:10", "--out", d.str()};
  REQUIRE(run_cli(args) == 0);
  const auto rows = read_csv(d.path / "stability_map.csv");
  REQUIRE(rows.size() == 201);
  CHECK(rows[0] == std::vector<std::string>{"alpha", "beta", "final_loss", "predicted_U1",
                                            "predicted_boundary"});

  auto c = *parse_config(args);
  const auto p = build_problem(c);
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::size_t> pick(1, 200);
  for (int k = 0; k < 10; ++k) {
    const auto& row = rows[pick(rng)];
    const double alpha = std::stod(row[0]), beta = std::stod(row[1]);
    const sgdphase::GenFuncParams gp{alpha, beta, c.gamma(), c.tau2};
    const auto report = sgdphase::stability_report(p.spectrum, gp);
    CHECK(row[3] == format_number(report.U1));
    CHECK(row[4] == format_number(sgdphase::critical_alpha(p.spectrum, gp)));
    CHECK(row[4] == format_number(report.alpha_critical));
  }

  // Non-convergent cells sit on the far side of the boundary, up to one cell.
  const double step = (4.0 - 0.1) / 19.0;
  const double l0 = p.spectrum.initial_loss();
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const double alpha = std::stod(rows[r][0]);
    const double bound = std::stod(rows[r][4]);
    const double loss = std::stod(rows[r][2]);
    const bool converged = std::isfinite(loss) && loss < l0;
    const bool predicted = alpha < bound;
    if (converged != predicted) CHECK(std::abs(alpha - bound) <= step);
  }
}

TEST_CASE("svg output") {
  svg::LineChart chart;
  chart.title = "t";
  svg::Series s{"loss", {}, {}};
  for (int i = 1; i <= 1000; i *= 2) {
    s.x.push_back(i);
    s.y.push_back(3.0 * std::pow(double(i), -1.5));
  }
  chart.series.push_back(s);
  chart.guides.push_back({"t^-1.5", -1.5, 1.0, 3.0});
  const auto a = svg::render_loglog(chart);
  CHECK(a == svg::render_loglog(chart));

  SUBCASE("power law runs parallel to its guide") {
    const std::regex poly(R"(points="([^"]*)\")");
    std::smatch m;
    REQUIRE(std::regex_search(a, m, poly));
    std::vector<std::pair<double, double>> pts;
    std::istringstream ps(m[1].str());
    std::string tok;
    while (ps >> tok) {
      const auto comma = tok.find(',');
      pts.emplace_back(std::stod(tok.substr(0, comma)), std::stod(tok.substr(comma + 1)));
    }
    REQUIRE(pts.size() >= 2);
    const double series_slope = (pts.back().second - pts.front().second) / (pts.back().first - pts.front().first);
    const std::regex guide(R"DELIM(<line clip-path="url\(#plot\)" x1="([-0-9.]+)" y1="([-0-9.]+)" x2="([-0-9.]+)" y2="([-0-9.]+)")DELIM");
    REQUIRE(std::regex_search(a, m, guide));
    const double guide_slope = (std::stod(m[4]) - std::stod(m[2])) / (std::stod(m[3]) - std::stod(m[1]));
    CHECK(series_slope == doctest::Approx(guide_slope).epsilon(0.01));
  }

  SUBCASE("errors") {
    CHECK_THROWS_AS(svg::render_loglog(svg::LineChart{}), Error);
    auto bad = chart;
    bad.series[0].y[2] = 0.0;
    try {
      svg::render_loglog(bad);
      FAIL("non-positive value accepted");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::axis_domain);
    }
  }
}

TEST_CASE("output set rollback") {
  TempDir d("rollback");
  OutputSet out(d.str());
  out.write("a.csv", "x\n");
  out.write("b.csv", "y\n");
  CHECK(fs::exists(d.path / "a.csv"));
  out.rollback();
  CHECK(fs::is_empty(d.path));
}

TEST_CASE("format_number round trips") {
  for (double x : {0.1, 1.0 / 3.0, 1e-300, 6.02e23, -2.5}) CHECK(std::stod(format_number(x)) == x);
  CHECK(format_number(NAN) == "nan");
  CHECK(format_number(INFINITY) == "inf");
  CHECK(format_number(-INFINITY) == "-inf");
}

}  // TEST_SUITE
