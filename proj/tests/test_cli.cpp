#include <catch2/catch_amalgamated.hpp>

#include <rag/rag.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "../tools/cli.hpp"

using namespace rag;
using Catch::Approx;

namespace {

struct CliResult {
  int code = 0;
  std::string out, err;
};

CliResult run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = rag::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name) : path("/tmp/ragtest_" + name) {}
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("cli design curvature") {
  CliResult r = run({"design", "curvature", "--b", "1", "--c", "1"});
  REQUIRE(r.code == 0);
  json j = json::parse(r.out);
  REQUIRE(j.at("beta").get<double>() == Approx(2.0));
  REQUIRE(j.at("guarantee").get<double>() == Approx(0.5));
  REQUIRE(j.at("f")[0].get<double>() == Approx(1.0));
}

TEST_CASE("cli frontier") {
  CliResult r = run({"frontier", "--q", "0.5"});
  REQUIRE(r.code == 0);
  json j = json::parse(r.out);
  REQUIRE(j.at("pob").get<double>() == Approx(0.5));
  REQUIRE(j.at("diverged") == false);
}

TEST_CASE("cli construct, validate and walk") {
  TempFile game("chain.json");
  CliResult r = run({"construct", "ci-chain", "--n", "3", "--c", "1", "--out", game.path});
  REQUIRE(r.code == 0);

  CliResult v = run({"game", "validate", "--game", game.path});
  REQUIRE(v.code == 0);

  CliResult w = run({"eff", "walk", "--game", game.path, "--k", "1"});
  REQUIRE(w.code == 0);
  json j = json::parse(w.out);
  REQUIRE(j.at("value").get<double>() == Approx(0.6));

  // deterministic byte-for-byte output
  CliResult w2 = run({"eff", "walk", "--game", game.path, "--k", "1"});
  REQUIRE(w.out == w2.out);
}

TEST_CASE("cli rejects a schema violation with exit 2") {
  TempFile game("broken.json");
  {
    Construction con = ci_chain_game(2, 1.0);
    json j = game_to_json(con.game);
    j["actions"][0].erase(0);  // drop the empty action
    std::ofstream out(game.path);
    out << j.dump();
  }
  CliResult r = run({"game", "validate", "--game", game.path});
  REQUIRE(r.code == 2);
  REQUIRE(r.err.find("validation") != std::string::npos);
}

TEST_CASE("cli exit codes") {
  REQUIRE(run({"design", "curvature", "--c", "1"}).code == 2);        // missing --b
  REQUIRE(run({"design", "pareto", "--chi", "0.2"}).code == 3);       // below threshold
  REQUIRE(run({"nonsense"}).code == 2);
  REQUIRE(run({"frontier", "--q", "0.9"}).code == 2);                 // out of range
}

TEST_CASE("cli eff lp and setcover agree on set covering") {
  TempFile util("f.json");
  {
    std::ofstream out(util.path);
    out << R"({"name":"f","values":[1,0,0,0]})";
  }
  CliResult lp = run({"eff", "lp", "--b", "1", "--c", "1", "--utility", util.path});
  REQUIRE(lp.code == 0);
  json jl = json::parse(lp.out);
  REQUIRE(jl.at("beta").get<double>() == Approx(2.0));

  CliResult sc = run({"eff", "setcover", "--utility", util.path, "--nmax", "16"});
  REQUIRE(sc.code == 0);
  json js = json::parse(sc.out);
  REQUIRE(js.at("pob").get<double>() == Approx(0.5));
  REQUIRE(js.at("poa").get<double>() == Approx(0.5));
}

TEST_CASE("cli json and csv carry the same numbers") {
  CliResult j = run({"design", "curvature", "--b", "2", "--c", "0.5", "--format", "json"});
  CliResult c = run({"design", "curvature", "--b", "2", "--c", "0.5", "--format", "csv"});
  REQUIRE(j.code == 0);
  REQUIRE(c.code == 0);
  json parsed = json::parse(j.out);
  double beta = parsed.at("beta").get<double>();
  std::ostringstream needle;
  needle << "beta,," << json(beta).dump();
  REQUIRE(c.out.find(needle.str()) != std::string::npos);
}

TEST_CASE("cli repro fig2") {
  CliResult r = run({"repro", "fig2"});
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  REQUIRE(line == "c,one_round_optimal,greedy,asymptotic");
  std::getline(in, line);
  REQUIRE(line.rfind("0,1,1,1", 0) == 0);
}
