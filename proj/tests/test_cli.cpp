#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"

using nlohmann::json;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = dlab::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

json error_line(const Outcome& o) { return json::parse(o.err.substr(0, o.err.find('\n'))); }

}  // namespace

TEST_CASE("moment output embeds its configuration") {
  const auto o = run({"moment", "--sigma", "1.5", "--T", "20", "--seed", "9"});
  REQUIRE(o.code == dlab::cli::kExitOk);
  CHECK(o.err.empty());
  const auto doc = json::parse(o.out);
  CHECK(doc["config"]["subcommand"] == "moment");
  CHECK(doc["config"]["series"]["name"] == "zeta");
  CHECK(doc["config"]["sigma"] == 1.5);
  CHECK(doc["config"]["k"] == 1);
  CHECK(doc["config"]["step"] == 0.01);
  CHECK(doc["config"]["seed"] == 9);
  CHECK(!doc["config"].contains("threads"));
  CHECK(doc["result"]["target"] == doctest::Approx(1.2020569031595943));
  CHECK(doc["result"]["estimate"] > 1.0);
}

TEST_CASE("moment CSV for a Dirichlet polynomial file") {
  const auto path = std::filesystem::temp_directory_path() / "dlab_cli_poly.json";
  std::ofstream(path) << R"({"kind": "explicit", "coeffs": [[1, 1, 0], [2, 1, 0]]})";
  const auto o = run({"--output", "csv", "moment", "--series", path.string(), "--sigma", "1", "--T", "200"});
  std::filesystem::remove(path);
  REQUIRE(o.code == 0);
  std::istringstream lines(o.out);
  std::string header, row;
  std::getline(lines, header);
  std::getline(lines, row);
  CHECK(header == "sigma,k,T,step,estimate,target,rel_error");
  CHECK(row.rfind("1,1,200,0.01,", 0) == 0);
  CHECK(row.find(",1.25,") != std::string::npos);
}

TEST_CASE("zeros subcommand finds the ladder") {
  const auto o = run({"zeros", "--series", "builtin:eta-factor", "--rect", "0.5,1.5,0,100"});
  REQUIRE(o.code == 0);
  const auto doc = json::parse(o.out);
  CHECK(doc["result"]["zeros"].size() == 12);
  for (const auto& z : doc["result"]["zeros"]) CHECK(z["residual"] < 1e-8);
  CHECK(doc["config"]["rect"] == json::array({0.5, 1.5, 0.0, 100.0}));

  const auto csv = run({"--output", "csv", "zeros", "--series", "builtin:eta-factor", "--rect", "0.9,1.1,8,10"});
  REQUIRE(csv.code == 0);
  std::istringstream lines(csv.out);
  std::string header, row;
  std::getline(lines, header);
  std::getline(lines, row);
  CHECK(header == "re,im,residual");
  double re = 0.0, im = 0.0, residual = 1.0;
  char c1 = 0, c2 = 0;
  std::istringstream(row) >> re >> c1 >> im >> c2 >> residual;
  CHECK(re == doctest::Approx(1.0));
  CHECK(im == doctest::Approx(9.0647202836543876));
  CHECK(residual < 1e-8);
}

TEST_CASE("density subcommand") {
  const auto o = run({"--output", "csv", "density", "--series", "builtin:eta-factor", "--sigma", "0.9,1.2", "--T", "50"});
  REQUIRE(o.code == 0);
  CHECK(o.out == "sigma,T,count\n0.9,50,6\n1.2,50,0\n");
}

TEST_CASE("flow subcommand") {
  const auto o = run({"flow", "--dims", "1", "--box", "0,0.5", "--T", "100000", "--step", "0.01", "--horizons", "2"});
  REQUIRE(o.code == 0);
  const auto rows = json::parse(o.out)["result"]["rows"];
  REQUIRE(rows.size() == 2);
  CHECK(rows[1]["t_horizon"] == 100000.0);
  CHECK(std::abs(rows[1]["estimate"].get<double>() - 0.5) < 0.01);
  CHECK(rows[1]["target"] == 0.5);

  const auto path = std::filesystem::temp_directory_path() / "dlab_cli_flow.json";
  std::ofstream(path) << R"({"flow": {"dims": 2, "T": 1000, "step": 0.01}, "box": [[0, 0.5], [0, 0.5]]})";
  const auto from_file = run({"--output", "csv", "flow", "--config", path.string(), "--horizons", "1"});
  std::filesystem::remove(path);
  REQUIRE(from_file.code == 0);
  CHECK(from_file.out.rfind("t-horizon,estimate,target,error\n1000,", 0) == 0);
}

TEST_CASE("recur, mollify and truncate subcommands") {
  const auto r = run({"recur", "--T", "20"});
  REQUIRE(r.code == 0);
  const auto rep = json::parse(r.out)["result"];
  CHECK(rep["hits"].size() == 4);
  CHECK(rep["rouche_passed"] == 4);

  const auto m = run({"--output", "csv", "mollify", "--X", "10,100", "--N", "20000"});
  REQUIRE(m.code == 0);
  CHECK(m.out.rfind("X,tail,remainder_bound\n10,", 0) == 0);

  const auto t = run({"truncate", "--s", "2+1i", "--k", "3", "--M", "1000", "--t", "3"});
  REQUIRE(t.code == 0);
  const auto tr = json::parse(t.out)["result"];
  CHECK(tr["twist_difference"] < 1e-9);
  CHECK(tr.contains("euler_product"));
}

TEST_CASE("output is byte-identical across thread counts") {
  const std::vector<std::vector<std::string>> commands{
      {"moment", "--sigma", "1.2", "--T", "30", "--k", "2"},
      {"zeros", "--series", "zeta", "--rect", "0.4,0.6,10,40"},
      {"flow", "--dims", "2", "--ball", "0.5,0.5", "--radius", "0.2", "--T", "2000", "--samples", "20000"},
      {"recur", "--T", "15"},
  };
  for (const auto& cmd : commands) {
    std::vector<std::string> one{"--threads", "1", "--seed", "4"};
    one.insert(one.end(), cmd.begin(), cmd.end());
    const auto base = run(one);
    REQUIRE(base.code == 0);
    for (const char* w : {"4", "8"}) {
      std::vector<std::string> many{"--threads", w, "--seed", "4"};
      many.insert(many.end(), cmd.begin(), cmd.end());
      CAPTURE(cmd[0]);
      CHECK(run(many).out == base.out);
    }
  }
}

TEST_CASE("--out writes the document to a file") {
  const auto path = std::filesystem::temp_directory_path() / "dlab_cli_out.json";
  const auto o = run({"--out", path.string(), "truncate", "--k", "2", "--M", "100"});
  REQUIRE(o.code == 0);
  CHECK(o.out.empty());
  std::ifstream in(path);
  const auto doc = json::parse(in);
  CHECK(doc["config"]["subcommand"] == "truncate");
  std::filesystem::remove(path);
}

TEST_CASE("exit codes and error lines") {
  const auto precondition = run({"moment", "--sigma", "0.4", "--T", "10"});
  CHECK(precondition.code == dlab::cli::kExitPrecondition);
  CHECK(precondition.out.empty());
  CHECK(error_line(precondition)["error"] == "precondition");

  const auto numerical = run({"mollify", "--sigma", "0.55", "--X", "10", "--N", "1000"});
  CHECK(numerical.code == dlab::cli::kExitNumerical);
  const auto err = error_line(numerical);
  CHECK(err["error"] == "numerical");
  CHECK(err["message"].get<std::string>().find("increase N") != std::string::npos);

  for (std::vector<std::string> bad : {std::vector<std::string>{}, {"bogus"}, {"moment", "--T", "5"},
                                       {"moment", "--sigma", "1", "--T", "5", "--frobnicate"},
                                       {"--output", "xml", "moment", "--sigma", "1", "--T", "5"},
                                       {"zeros", "--rect", "1,2,3"}, {"zeros", "--rect", "0,1,a,2"},
                                       {"flow", "--box", "0,0.5,0.2"}, {"truncate", "--s", "2+x"},
                                       {"moment", "--sigma", "1", "--T", "5", "--rule", "gauss"}}) {
    const auto o = run(bad);
    CAPTURE(bad.size());
    CHECK(o.code == dlab::cli::kExitUsage);
    CHECK(error_line(o)["error"] == "usage");
  }

  const auto series = run({"moment", "--series", "builtin:nope", "--sigma", "2", "--T", "5"});
  CHECK(series.code == dlab::cli::kExitPrecondition);
  const auto empty_rect = run({"zeros", "--rect", "1,0,0,1"});
  CHECK(empty_rect.code == dlab::cli::kExitPrecondition);

  const auto help = run({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("Subcommands") != std::string::npos);
}
