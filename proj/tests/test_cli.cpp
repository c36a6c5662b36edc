#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "strainband/cli.hpp"

using namespace strainband;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<double>> parse_csv(const std::string& text, std::string* header) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  if (header) *header = line;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

TEST_CASE("exit codes") {
  CHECK(cli_run({"bands", "--orient", "nope", "--out", "x.csv"}) == 2);
  CHECK(cli_run({"unknown-subcommand"}) == 2);
  // q outside the fundamental interval -> config error
  CHECK(cli_run({"bands", "--orient", "ac", "--q", "0.0:0.9:3", "--nt", "4",
                 "--out", "cli_bad.csv"}) == 2);
}

TEST_CASE("bands2d file shape and Dirac point row") {
  const std::string path = "cli_b2d.csv";
  CHECK(cli_run({"bands2d", "--n", "66", "--out", path}) == 0);
  std::string header;
  auto rows = parse_csv(slurp(path), &header);
  CHECK(header == std::string("k1,k2,E1,E2"));
  CHECK(rows.size() == 66 * 66);  // file row count = n^2 + 1 including header
  double emax = 0.0;
  bool dirac_row = false;
  for (const auto& r : rows) {
    REQUIRE(r.size() == 4);
    emax = std::max(emax, r[3]);
    if (std::abs(r[2]) < 1e-10 && std::abs(r[3]) < 1e-10) dirac_row = true;
  }
  CHECK(emax == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(dirac_row);  // K = a1/3 is on the grid when 3 | n
  std::remove(path.c_str());
}

TEST_CASE("bands CSV round-trips at 17 significant digits") {
  const std::string path = "cli_bands.csv";
  CHECK(cli_run({"bands", "--orient", "ac", "--deform", "none", "--delta", "0", "--nt",
                 "12", "--q", "-0.2:0.2:5", "--num", "8", "--out", path}) == 0);
  std::string header;
  std::string text = slurp(path);
  auto rows = parse_csv(text, &header);
  CHECK(header == std::string("q,E1,E2,E3,E4,E5,E6,E7,E8"));
  REQUIRE(rows.size() == 5);
  for (const auto& r : rows) REQUIRE(r.size() == 9);
  // round trip: re-emitting the parsed numbers at %.17g reproduces the bytes
  std::ostringstream rebuilt;
  rebuilt << header << "\n";
  for (const auto& r : rows) {
    for (size_t i = 0; i < r.size(); ++i) rebuilt << (i ? "," : "") << fmt17(r[i]);
    rebuilt << "\n";
  }
  CHECK(rebuilt.str() == text);
  std::remove(path.c_str());
}

TEST_CASE("identical config produces byte-identical output at any thread count") {
  const std::string p1 = "cli_t1.csv", p8 = "cli_t8.csv";
  std::vector<std::string> base = {"bands",  "--orient", "ac",  "--deform", "quad-ac",
                                   "--delta", "0.04",     "--nt", "24",      "--q",
                                   "-0.2:0.2:9", "--num", "12"};
  auto run = [&](const std::string& out, const std::string& threads) {
    auto args = base;
    args.insert(args.end(), {"--threads", threads, "--out", out});
    REQUIRE(cli_run(args) == 0);
  };
  run(p1, "1");
  run(p8, "8");
  CHECK(slurp(p1) == slurp(p8));
  std::remove(p1.c_str());
  std::remove(p8.c_str());
}

TEST_CASE("strain CSV: triaxial pseudo-field column is constant 4 t1") {
  const std::string path = "cli_strain.csv";
  CHECK(cli_run({"strain", "--u", "triaxial", "--t1", "-2", "--grid", "5", "--out",
                 path}) == 0);
  std::string header;
  auto rows = parse_csv(slurp(path), &header);
  CHECK(header == std::string("X1,X2,A1,A2,B"));
  REQUIRE(rows.size() == 25);
  for (const auto& r : rows) {
    CHECK(r[4] == doctest::Approx(-8.0).epsilon(1e-9));
    // A = 2 t1 (-X2, X1)
    CHECK(r[2] == doctest::Approx(-2.0 * -2.0 * r[1]).epsilon(1e-9));
    CHECK(r[3] == doctest::Approx(2.0 * -2.0 * r[0]).epsilon(1e-9));
  }
  std::remove(path.c_str());
}

TEST_CASE("dirac JSON re-parses and holds the Landau levels") {
  const std::string path = "cli_dirac.json";
  CHECK(cli_run({"dirac", "--d", "quad-ac", "--t1", "-2", "--kpar", "0", "--w", "20",
                 "--n", "2048", "--out", path}) == 0);
  nlohmann::json j = nlohmann::json::parse(slurp(path));
  auto in_gap = j.at("in_gap_eigenvalues").get<std::vector<double>>();
  REQUIRE(in_gap.size() >= 7);
  // contains 0, +-3, +-3sqrt2 within 1e-2
  auto has = [&](double v) {
    for (double e : in_gap)
      if (std::abs(e - v) < 1e-2 * std::max(1.0, std::abs(v))) return true;
    return false;
  };
  CHECK(has(0.0));
  CHECK(has(3.0));
  CHECK(has(-3.0));
  CHECK(has(3.0 * std::sqrt(2.0)));
  std::remove(path.c_str());
}

TEST_CASE("modes JSON schema") {
  const std::string path = "cli_modes.json";
  CHECK(cli_run({"modes", "--orient", "ac", "--deform", "quad-ac", "--delta", "0.04",
                 "--nt", "60", "--t1", "-2", "--q", "0", "--tol", "0.06", "--layer",
                 "10", "--out", path}) == 0);
  nlohmann::json j = nlohmann::json::parse(slurp(path));
  CHECK(j.at("q").get<double>() == 0.0);
  REQUIRE(j.at("modes").is_array());
  REQUIRE(j.at("modes").size() >= 4);
  for (const auto& m : j.at("modes")) {
    CHECK(m.contains("eigenvalue"));
    std::string label = m.at("label").get<std::string>();
    CHECK((label == "left" || label == "right" || label == "bulk"));
    double w = m.at("boundary_weight").get<double>();
    CHECK(w >= 0.0);
    CHECK(w <= 1.0 + 1e-12);
    CHECK(m.at("profile").size() == 121);  // 2*60+1 cells
  }
  std::remove(path.c_str());
}

TEST_CASE("config file keys mirror flags and flags override") {
  const std::string cfg = "cli_cfg.json";
  {
    std::ofstream out(cfg);
    out << "{\"orient\": \"ac\", \"deform\": \"none\", \"delta\": 0, \"nt\": 12, "
           "\"q\": \"-0.2:0.2:3\", \"num\": 6, \"out\": \"cli_cfg_out.csv\"}\n";
  }
  CHECK(cli_run({"bands", "--config", cfg}) == 0);
  auto rows1 = parse_csv(slurp("cli_cfg_out.csv"), nullptr);
  CHECK(rows1.size() == 3);
  // flag overrides the file value
  CHECK(cli_run({"bands", "--config", cfg, "--q", "-0.2:0.2:5"}) == 0);
  auto rows2 = parse_csv(slurp("cli_cfg_out.csv"), nullptr);
  CHECK(rows2.size() == 5);
  std::remove(cfg.c_str());
  std::remove("cli_cfg_out.csv");
}
