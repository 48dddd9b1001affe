#include "cli.hpp"

#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct Outcome
{
  int code;
  std::string out;
  std::string err;
};

Outcome
invoke(std::initializer_list<std::string> args)
{
  std::vector<std::string> storage{ "multithresh" };
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& s : storage)
    argv.push_back(s.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = multithresh::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return { code, out.str(), err.str() };
}

std::string
slurp(const fs::path& p)
{
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path
scratch(const std::string& name)
{
  const auto dir = fs::temp_directory_path() / "multithresh_cli_tests";
  fs::create_directories(dir);
  return dir / name;
}

} // namespace

TEST_SUITE("cli")
{
  TEST_CASE("check constants")
  {
    const auto r = invoke({ "check", "constants", "--c", "16", "--K", "1" });
    CHECK(r.code == 0);
    CHECK(r.out.find("beta1=0.000108506944") != std::string::npos);
    CHECK(r.out.find("beta2=5.42534722") != std::string::npos);
  }

  TEST_CASE("check ongle")
  {
    const auto r = invoke({ "check", "ongle", "--rule", "hard", "--step", "0.05" });
    CHECK(r.code == 0);
    CHECK(r.out.find("c1=8 c2=2") != std::string::npos);
    CHECK(r.out.find("pass") != std::string::npos);
  }

  TEST_CASE("configuration errors exit with 1")
  {
    CHECK(invoke({ "rates", "--reps", "0" }).code == 1);
    CHECK(invoke({ "rates", "--target", "nope" }).code == 1);
    CHECK(invoke({ "rates", "--n", "512,1024" }).code == 1);
    CHECK(invoke({ "frobnicate" }).code == 1);
    CHECK(invoke({ "simulate", "--noise", "gaussian", "--model", "regression" }).code == 1);
  }

  TEST_CASE("simulate and estimate")
  {
    const auto sample = scratch("uniform.txt");
    CHECK(invoke({ "simulate", "--target", "uniform", "--n", "1024", "-o", sample.string() }).code == 0);
    const auto csv = scratch("estimate.csv");
    const auto r = invoke({ "estimate", "-i", sample.string(), "--target", "uniform", "--grid", "1024",
                            "--candidates", "-o", csv.string() });
    CHECK(r.code == 0);
    std::ifstream in(csv);
    std::string line;
    std::getline(in, line);
    CHECK(line.rfind("x,f_tilde,u0,u1", 0) == 0);
    int rows = 0;
    while (std::getline(in, line)) {
      const double f = std::stod(line.substr(line.find(',') + 1));
      CHECK((f >= 0.0 && f <= 1.0));
      ++rows;
    }
    CHECK(rows == 1024);

    const auto diag = nlohmann::json::parse(slurp(fs::path(csv.string() + ".diagnostics.json")));
    CHECK(diag["n"] == 1024);
    CHECK(diag["M"] == diag["weights"].size());
    CHECK(diag["j1"] == 8);

    const auto csv2 = scratch("estimate2.csv");
    invoke({ "estimate", "-i", sample.string(), "--target", "uniform", "--grid", "1024", "--candidates", "-o",
             csv2.string() });
    CHECK(slurp(csv) == slurp(csv2));
  }

  TEST_CASE("malformed samples exit with 2 and name the line")
  {
    const auto sample = scratch("bad.txt");
    {
      std::ofstream out(sample);
      out << "0.1\n0.2\nabc\n";
    }
    const auto r = invoke({ "estimate", "-i", sample.string() });
    CHECK(r.code == 2);
    CHECK(r.err.find("line 3") != std::string::npos);
  }

  TEST_CASE("rates, config file and oracle")
  {
    const auto cfg = scratch("run.cfg");
    {
      std::ofstream out(cfg);
      out << "# small regression run\nmodel = regression\ntarget = bump\nrho = 1.0\nreps = 3\n"
          << "n = [128, 256, 512]\n";
    }
    const auto a = scratch("rates_a.csv");
    const auto b = scratch("rates_b.csv");
    CHECK(invoke({ "--config", cfg.string(), "rates", "-o", a.string() }).code == 0);
    // flags win over the file
    CHECK(invoke({ "--config", cfg.string(), "rates", "--reps", "2", "-o", b.string() }).code == 0);
    const auto text = slurp(a);
    CHECK(text.rfind("model,target,family,rule,n,", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 9);
    const auto btext = slurp(b);
    CHECK(std::count(btext.begin(), btext.end(), '\n') == 1 + 6);

    const auto again = scratch("rates_again.csv");
    invoke({ "--config", cfg.string(), "rates", "-o", again.string() });
    CHECK(slurp(again) == text);

    const auto summary = slurp(scratch("rates_a.summary.csv"));
    CHECK(summary.find("expected_slope") != std::string::npos);
    CHECK(summary.find("regression,bump") != std::string::npos);

    const auto r = invoke({ "check", "oracle", "--results", a.string() });
    CHECK(r.code == 0);
    CHECK(r.out.find("bound satisfied") != std::string::npos);
    CHECK(r.out.find("ratio=") != std::string::npos);
  }

  TEST_CASE("expected slope for the triangle target")
  {
    const auto out = scratch("tri.csv");
    CHECK(invoke({ "rates", "--n", "64,128,256", "--reps", "1", "--rho", "1", "-o", out.string() }).code == 0);
    CHECK(slurp(scratch("tri.summary.csv")).find("-0.66666666666666663") != std::string::npos);
  }
}
