#include <filesystem>
#include <fstream>
#include <sstream>

#include <catch_amalgamated.hpp>

#include "cli/commands.hpp"
#include "cli/config.hpp"
#include "cli/output.hpp"
#include "cli/verify.hpp"
#include "regbf/errors.hpp"

using Catch::Approx;
using namespace regbf::cli;

TEST_CASE("config parsing", "[cli][config]") {
  const auto c = Config::parse(
      "# comment\n"
      "system = gause   # trailing\n"
      "reg.name = \"sqrt_sigmoid\"\n"
      "sweep.eps = 1e-3, 1e-4\n"
      "sweep.mu = 0:1:5\n"
      "flag = true\n"
      "label = \"a # b\"\n");
  CHECK(c.get_string("system", "") == "gause");
  CHECK(c.get_string("reg.name", "") == "sqrt_sigmoid");
  CHECK(c.get_list("sweep.eps", {}) == std::vector<double>{1e-3, 1e-4});
  CHECK(c.get_list("sweep.mu", {}) == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
  CHECK(c.get_bool("flag", false));
  CHECK(c.get_string("label", "") == "a # b");
  CHECK(c.get_double("missing", 2.5) == 2.5);
}

TEST_CASE("config errors", "[cli][config]") {
  CHECK_THROWS_AS(Config::parse("a = 1\na = 2\n"), regbf::ConfigError);
  CHECK_THROWS_AS(Config::parse("no equals sign\n"), regbf::ConfigError);
  CHECK_THROWS_AS(Config::parse("bad key! = 1\n"), regbf::ConfigError);
  const auto c = Config::parse("x = abc\nsystem.gause.r = 1\n");
  CHECK_THROWS_AS(c.get_double("x", 0.0), regbf::ConfigError);
  CHECK_THROWS_AS(c.get_int("x", 0), regbf::ConfigError);
  CHECK_THROWS_AS(c.require_known({"system.*"}), regbf::ConfigError);
  CHECK_NOTHROW(c.require_known({"x", "system.*"}));
  try {
    Config::parse("a = 1\nbroken\n", "run.cfg");
    FAIL("no throw");
  } catch (const regbf::ConfigError& e) {
    CHECK(std::string(e.what()).find("run.cfg:2") != std::string::npos);
  }
}

TEST_CASE("config hash is order independent", "[cli][config]") {
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
  const auto a = Config::parse("x = 1\ny = 2\n");
  const auto b = Config::parse("y = 2\n# reordered\nx = 1\n");
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a).size() == 16);
  CHECK(config_hash(a) != config_hash(Config::parse("x = 1\ny = 3\n")));
}

TEST_CASE("real formatting and CSV tables", "[cli][output]") {
  CHECK(format_real(0.5) == "5.0000000000000000e-01");
  CHECK(format_real(std::nan("")) == "nan");
  CsvTable t({"eps[-]", "period[t]"});
  t.add_row({1e-3, 2.0});
  t.add_row("AH", {1.0});
  CHECK(t.rows() == 2);
  CHECK(t.str() ==
        "eps[-],period[t]\n"
        "1.0000000000000000e-03,2.0000000000000000e+00\n"
        "AH,1.0000000000000000e+00\n");
}

TEST_CASE("SVG carries the config hash", "[cli][output]") {
  SvgPlot plot;
  plot.title = "t";
  plot.series.push_back({"s", {1.0, 2.0}, {1.0, 4.0}, true});
  const auto svg = plot.render("0123456789abcdef");
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("config-hash: 0123456789abcdef") != std::string::npos);
  CHECK(svg == plot.render("0123456789abcdef"));
}

TEST_CASE("regularization from config", "[cli]") {
  CHECK(reg_from_config(Config::parse("")).name == "sqrt_sigmoid");
  const auto r = reg_from_config(Config::parse("reg.expr = 1/2 + atan(s)/3.141592653589793\nreg.k = 1\nreg.beta = 0.3183\n"));
  CHECK(r.k == 1);
  CHECK(r(1.0) == Approx(0.75));
  CHECK_THROWS_AS(reg_from_config(Config::parse("reg.expr = s +\nreg.k = 1\nreg.beta = 1\n")), regbf::ParseError);
}

TEST_CASE("dispatch maps failures to exit codes", "[cli]") {
  const auto dir = std::filesystem::temp_directory_path() / "regbf_cli_test";
  GlobalOptions g;
  g.out_dir = dir;
  std::ostringstream log, err;
  CHECK(dispatch("validate-reg", Config::parse(""), g, log, err) == kOk);
  CHECK(std::filesystem::exists(dir / "validate_reg_report.json"));
  CHECK(std::filesystem::exists(dir / "validate-reg.json"));
  CHECK(dispatch("validate-reg", Config::parse("reg.expr = (1 + tanh(s))/2\nreg.k = 1\nreg.beta = 1\n"), g, log,
                 err) == kCriterionFailure);
  CHECK(dispatch("validate-reg", Config::parse("reg.bogus = 1\n"), g, log, err) == kConfigError);
  CHECK(dispatch("hopf-scaling", Config::parse("sweep.eps = 1\n"), g, log, err) == kConfigError);
  CHECK(err.str().find("unknown config key") != std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST_CASE("pws-report is deterministic", "[cli]") {
  const auto dir = std::filesystem::temp_directory_path() / "regbf_cli_pws";
  GlobalOptions g;
  g.out_dir = dir;
  std::ostringstream log, err;
  const auto cfg = Config::parse("system = gause\n");
  REQUIRE(dispatch("pws-report", cfg, g, log, err) == kOk);
  auto slurp = [&] {
    std::ifstream in(dir / "pws_report.json");
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  const auto first = slurp();
  REQUIRE(dispatch("pws-report", cfg, g, log, err) == kOk);
  CHECK(first == slurp());
  CHECK(first.find("\"admissible\": false") != std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST_CASE("fast verify passes and fault injection is caught", "[cli][verify]") {
  VerifyOptions opts;
  opts.fast = true;
  opts.only = {1, 2, 3, 10};
  for (const auto& r : run_verify(opts)) {
    INFO(format_line(r));
    CHECK(r.passed());
  }
  opts.only = {1};
  opts.corrupt_beta = 1.05;
  const auto bad = run_verify(opts);
  REQUIRE(bad.size() == 1);
  CHECK_FALSE(bad[0].passed());
  CHECK(format_line(bad[0]).find("Hopf agreement") != std::string::npos);
  CHECK(to_json(bad[0])["passed"] == false);
}
