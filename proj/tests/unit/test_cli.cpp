#include <doctest.h>

#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "pcbayes/cli.hpp"
#include "pcbayes/io.hpp"

using namespace pcbayes;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "pcbayes");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / "pcbayes_cli_test" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(io::read_text(p)); }

fs::path write(const fs::path& p, const std::string& text) {
  io::write_text(p, text);
  return p;
}

}  // namespace

TEST_CASE("estimate: closed form on the four-category example") {
  const auto dir = scratch("estimate");
  const auto x = write(dir / "x.csv", "cause,1,2,3,4\ncase,2,1,1,0\n");
  const auto y = write(dir / "y.csv", "cause,A0,A1\ncase,3,1\n");
  const auto s = write(dir / "scheme.json", R"({"k":4,"groups":[[1,2],[3,4]]})");
  const auto r = run({"estimate", "--x", x, "--y", y, "--scheme", s, "--out", dir / "out"});
  REQUIRE(r.code == 0);
  const auto theta = io::read_real_table(dir / "out" / "theta.csv");
  REQUIRE(theta.values.size() == 1);
  const std::vector<double> want{0.4, 4.0 / 15, 2.0 / 9, 1.0 / 9};
  for (int i = 0; i < 4; ++i) CHECK(theta.values[0][i] == doctest::Approx(want[i]).epsilon(1e-14));
  CHECK_FALSE(fs::exists(dir / "out" / "mc_se.csv"));
  const auto manifest = read_json(dir / "out" / "manifest.json");
  CHECK(manifest["command"] == "estimate");
  CHECK(manifest["seed"] == 0);
  CHECK(manifest["parameters"]["method"] == "closed_form");
}

TEST_CASE("estimate: jeffreys prior and missing y") {
  const auto dir = scratch("estimate_full");
  const auto x = write(dir / "x.csv", "cause,a,b\nr,3,1\n");
  REQUIRE(run({"estimate", "--x", x, "--prior", "jeffreys", "--out", dir}).code == 0);
  const auto theta = io::read_real_table(dir / "theta.csv");
  CHECK(theta.values[0][0] == doctest::Approx(3.5 / 5.0));
  const auto manifest = read_json(dir / "manifest.json");
  CHECK(manifest["parameters"]["alpha"] == std::vector<double>{0.5, 0.5});
  CHECK(manifest["parameters"]["method"] == "full_only");
}

TEST_CASE("estimate: overlapping schemes go through Gibbs and write mc_se") {
  const auto dir = scratch("estimate_gibbs");
  const auto x = write(dir / "x.csv", "cause,a,b,c\nr,1,1,1\n");
  const auto y = write(dir / "y.csv", "cause,A,B\nr,2,2\n");
  const auto s = write(dir / "s.json", R"({"k":3,"groups":[[1,2],[2,3]]})");
  REQUIRE(run({"estimate", "--x", x, "--y", y, "--scheme", s, "--out", dir, "--seed", "4"}).code == 0);
  const auto theta = io::read_real_table(dir / "theta.csv");
  const auto se = io::read_real_table(dir / "mc_se.csv");
  const std::vector<double> exact{71.0 / 255, 113.0 / 255, 71.0 / 255};
  for (int i = 0; i < 3; ++i) CHECK(std::abs(theta.values[0][i] - exact[i]) <= 3 * se.values[0][i]);
  CHECK(run({"estimate", "--x", x, "--y", y, "--scheme", s, "--out", dir, "--sampler", "closed"})
            .code == 2);
}

TEST_CASE("estimate: validation failures exit 2 with a message") {
  const auto dir = scratch("estimate_bad");
  const auto x = write(dir / "x.csv", "cause,a,b,c\nr,1,1,1\n");
  const auto y = write(dir / "y.csv", "cause,A\nr,2\n");
  const auto s = write(dir / "s.json", R"({"k":3,"groups":[[1,2]]})");
  const auto r = run({"estimate", "--x", x, "--y", y, "--scheme", s, "--out", dir});
  CHECK(r.code == 2);
  CHECK(r.err.find("complement") != std::string::npos);
  CHECK(run({"estimate", "--x", dir / "missing.csv"}).code == 2);
  CHECK(run({"estimate"}).code == 2);
  CHECK(run({}).code == 2);
}

TEST_CASE("simulate: setting ii at N = 100 gives six negative rows") {
  const auto dir = scratch("simulate");
  const auto r = run({"simulate", "--setting", "ii", "--fix", "N=100", "--replications", "4000",
                      "--out", dir});
  REQUIRE(r.code == 0);
  const std::string csv = io::read_text(dir / "risk_curves.csv");
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line.rfind("setting_id,N,N_prime,estimator,risk,se,delta,delta_se,dominance_flag", 0) == 0);
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    REQUIRE(cells.size() == 12);
    CHECK(cells[0] == "ii");
    CHECK(cells[1] == "100");
    CHECK(std::stod(cells[6]) < 0.0);
    CHECK(cells[9] == "frequentist");
  }
  CHECK(rows == 6);
  CHECK(read_json(dir / "manifest.json")["parameters"]["replications"] == 4000);
}

TEST_CASE("simulate: output does not depend on threads") {
  const auto a = scratch("sim_t1"), b = scratch("sim_t3");
  const std::vector<std::string> base{"simulate", "--setting", "iii", "--N", "20", "--Nprime",
                                      "30",       "--replications", "300", "--gibbs-iterations",
                                      "300",      "--gibbs-burn-in", "100"};
  auto args_a = base, args_b = base;
  args_a.insert(args_a.end(), {"--out", a.string(), "--threads", "1"});
  args_b.insert(args_b.end(), {"--out", b.string(), "--threads", "3"});
  REQUIRE(run(args_a).code == 0);
  REQUIRE(run(args_b).code == 0);
  CHECK(io::read_text(a / "risk_curves.csv") == io::read_text(b / "risk_curves.csv"));
  CHECK(io::read_text(a / "risk_curves.csv").find(",bayes,") != std::string::npos);
}

TEST_CASE("simulate: usage errors") {
  const auto dir = scratch("simulate_bad");
  CHECK(run({"simulate", "--setting", "ii", "--replications", "0", "--out", dir}).code == 2);
  CHECK(run({"simulate", "--setting", "v", "--out", dir}).code == 2);
  CHECK(run({"simulate", "--setting", "ii", "--fix", "M=3", "--out", dir}).code == 2);
  CHECK(run({"simulate", "--setting", "iii", "--risk", "frequentist", "--estimator", "closed",
             "--replications", "100", "--N", "5", "--Nprime", "5", "--out", dir})
            .code == 2);
  CHECK(run({"simulate", "--out", dir}).code == 2);
}

TEST_CASE("fixture and reconcile: MCHSS margin and BDHS routing") {
  const auto dir = scratch("reconcile");
  REQUIRE(run({"fixture", "--name", "mchss", "--out", dir / "m"}).code == 0);
  const auto m = dir / "m";
  REQUIRE(run({"reconcile", "--reference", m / "reference.csv", "--aggregated", m / "aggregated.csv",
               "--scheme", m / "scheme.json", "--truth", m / "truth.csv", "--baseline", "seeds=100",
               "--out", m / "out"})
              .code == 0);
  const auto report = read_json(m / "out" / "report.json");
  CHECK(report["sampler"] == "closed_form");
  CHECK(report["bayes_accuracy"].get<double>() - report["baseline_accuracy"].get<double>() >= 0.15);
  CHECK(io::read_count_table(m / "out" / "predicted.csv").total() ==
        io::read_count_table(m / "truth.csv").total());

  REQUIRE(run({"fixture", "--name", "bdhs", "--out", dir / "b"}).code == 0);
  const auto b = dir / "b";
  REQUIRE(run({"reconcile", "--reference", b / "reference.csv", "--aggregated", b / "aggregated.csv",
               "--scheme", b / "scheme.json", "--iterations", "3000", "--burn-in", "500", "--out",
               b / "out"})
              .code == 0);
  CHECK(read_json(b / "out" / "report.json")["sampler"] == "gibbs");

  CHECK(run({"reconcile", "--reference", m / "reference.csv", "--aggregated", m / "aggregated.csv",
             "--scheme", m / "scheme.json", "--baseline", "seeds=10", "--out", m / "out2"})
            .code == 2);
  CHECK(run({"fixture", "--name", "other", "--out", dir / "x"}).code == 2);
}

TEST_CASE("reconcile: identical reference and truth") {
  const auto dir = scratch("reconcile_same");
  const auto t = write(dir / "t.csv", "cause,a,b,c,d\nr1,40,60,10,30\nr2,8,2,5,5\n");
  const auto agg = write(dir / "agg.csv", "cause,A,B\nr1,100,40\nr2,10,10\n");
  const auto s = write(dir / "s.json", R"({"k":4,"groups":[[1,2],[3,4]]})");
  REQUIRE(run({"reconcile", "--reference", t, "--aggregated", agg, "--scheme", s, "--truth", t,
               "--out", dir / "out"})
              .code == 0);
  CHECK(read_json(dir / "out" / "report.json")["bayes_accuracy"].get<double>() >= 0.97);
}

TEST_CASE("help and version exit 0") {
  CHECK(run({"--help"}).code == 0);
  CHECK(run({"--version"}).code == 0);
}
