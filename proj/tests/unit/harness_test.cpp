#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "rrt/error.hpp"
#include "rrt/format.hpp"
#include "rrt/harness.hpp"

namespace {

rrt::ConfigMap base(const char* experiment) { return {{"experiment", experiment}, {"seed", "11"}}; }

std::string csv_of(const rrt::ResultTable& t) {
  std::ostringstream out;
  write_csv(out, t);
  return out.str();
}

const rrt::Check& find_check(const rrt::ExperimentResult& r, const std::string& name) {
  for (const auto& ch : r.checks)
    if (ch.name == name) return ch;
  FAIL("no check named " << name);
  throw std::logic_error("unreachable");
}

}  // namespace

TEST_SUITE("harness") {
  TEST_CASE("experiment names round trip") {
    for (const char* name : {"depth-law", "depth-exact-check", "arcsine", "outdeg-profile", "scaling", "subcritical",
                             "texpect", "sanity", "bench"})
      CHECK(rrt::experiment_name(rrt::parse_experiment(name)) == name);
    CHECK_THROWS_AS(rrt::parse_experiment("depth_law"), rrt::UsageError);
  }

  TEST_CASE("config validation") {
    CHECK_THROWS_AS(rrt::make_config({{"seed", "1"}}), rrt::UsageError);
    CHECK_THROWS_AS(rrt::make_config({{"experiment", "sanity"}}), rrt::ConfigError);
    CHECK_THROWS_AS(rrt::make_config({{"experiment", "nope"}, {"seed", "1"}}), rrt::UsageError);
    auto bad = base("sanity");
    bad["colour"] = "red";
    CHECK_THROWS_AS(rrt::make_config(bad), rrt::ConfigError);
    for (const auto& [key, value] : std::vector<std::pair<std::string, std::string>>{
             {"n", "0"}, {"reps", "0"}, {"threads", "0"}, {"rho", "1"}, {"tolerance", "-1"},
             {"window", "0.5"}, {"alpha_level", "0"}, {"env.model", "quadratic"}, {"increment.kind", "cauchy"},
             {"edge.kind", "gamma"}, {"n", "ten"}}) {
      auto c = base("sanity");
      c[key] = value;
      CHECK_THROWS_AS(rrt::make_config(c), rrt::ConfigError);
    }
    auto exact = base("depth-exact-check");
    exact["edge.kind"] = "exponential";
    CHECK_THROWS_AS(rrt::run_experiment(rrt::make_config(exact)), rrt::ConfigError);
  }

  TEST_CASE("defaults and echo") {
    auto values = base("texpect");
    values["threads"] = "4";
    values["out"] = "x.csv";
    const auto c = rrt::make_config(values);
    CHECK(c.n == 10000);
    CHECK(c.reps == 10000);
    CHECK(c.tolerance == 0.05);
    CHECK(c.threads == 4);
    CHECK(c.env.kind == rrt::EnvKind::product_form);
    CHECK_FALSE(c.echo.contains("threads"));
    CHECK_FALSE(c.echo.contains("out"));
    CHECK(c.echo.at("n") == "10000");
    const auto s = rrt::make_config(base("subcritical"));
    CHECK(s.env.kind == rrt::EnvKind::power);
    CHECK(s.env.alpha == -2.0);
  }

  TEST_CASE("sanity on the constant environment passes") {
    const auto r = rrt::run_experiment(rrt::make_config(base("sanity")));
    CHECK(r.passed);
    CHECK(find_check(r, "tree_structure_violations").value == 0.0);
    CHECK(r.table.names() == std::vector<std::string>{"check", "value", "bound"});
    CHECK(r.summary_json.find("\"passed\": true") != std::string::npos);
    CHECK(r.summary_json.find("\"wall_time_seconds\"") != std::string::npos);
  }

  TEST_CASE("csv quoting and table errors") {
    rrt::ResultTable t;
    t.add_column("name", std::vector<std::string>{"plain", "a,b", "say \"hi\""});
    t.add_column("x", std::vector<double>{0.5, 1.0, -2.0});
    CHECK(csv_of(t) == "name,x\nplain,0.5\n\"a,b\",1\n\"say \"\"hi\"\"\",-2\n");
    CHECK_THROWS_AS(t.add_column("x", std::vector<double>{1, 2, 3}), rrt::DomainError);
    CHECK_THROWS_AS(t.add_column("y", std::vector<double>{1}), rrt::DomainError);
    CHECK_THROWS_AS(t.column("name"), rrt::DomainError);
    CHECK_THROWS_AS(t.column("z"), rrt::DomainError);
    CHECK(t.column("x")[2] == -2.0);
  }

  TEST_CASE("number formatting") {
    CHECK(rrt::format_double(0.2) == "0.20000000000000001");
    CHECK(rrt::format_short(0.2) == "0.2");
    CHECK(rrt::format_short(1e-300) == "1e-300");
    CHECK(rrt::format_double(3.0) == "3");
  }

  TEST_CASE("table bytes do not depend on the thread count") {
    const std::vector<rrt::ConfigMap> small{
        {{"experiment", "depth-law"}, {"n", "300"}, {"reps", "200"}},
        {{"experiment", "depth-exact-check"}, {"n", "50"}, {"reps", "500"}},
        {{"experiment", "arcsine"}, {"n", "300"}, {"reps", "300"}},
        {{"experiment", "outdeg-profile"}, {"n", "300"}, {"reps", "100"}},
        {{"experiment", "scaling"}, {"n_grid", "100,300"}, {"reps", "100"}},
        {{"experiment", "subcritical"}, {"n_grid", "100,300"}},
        {{"experiment", "texpect"}, {"n", "300"}, {"reps", "200"}},
        {{"experiment", "sanity"}, {"n", "100"}, {"reps", "5"}},
        {{"experiment", "bench"}, {"n", "1000"}, {"reps", "2"}},
    };
    for (auto values : small) {
      CAPTURE(values.at("experiment"));
      values["seed"] = "5";
      values["threads"] = "1";
      const auto one = rrt::run_experiment(rrt::make_config(values));
      values["threads"] = "8";
      const auto eight = rrt::run_experiment(rrt::make_config(values));
      CHECK(one.table.rows() > 0);
      CHECK(csv_of(one.table) == csv_of(eight.table));
    }
  }

  TEST_CASE("plot projections") {
    auto values = base("outdeg-profile");
    values["n"] = "400";
    values["reps"] = "50";
    const auto profile = rrt::run_experiment(rrt::make_config(values));
    const auto p = rrt::emit_plot_data(profile.table, "outdeg-profile");
    CHECK(p.names() == std::vector<std::string>{"t", "mean_estimate", "stderr", "limit"});
    CHECK(p.rows() == profile.table.rows());

    values = base("arcsine");
    values["n"] = "300";
    values["reps"] = "200";
    const auto arcsine = rrt::run_experiment(rrt::make_config(values));
    const auto a = rrt::emit_plot_data(arcsine.table, "arcsine");
    CHECK(a.names() == std::vector<std::string>{"x", "ecdf", "arcsine_cdf"});
    CHECK(a.rows() == 101);
    CHECK(a.column("ecdf")[100] == 1.0);
    CHECK(a.column("arcsine_cdf")[50] == doctest::Approx(0.5).epsilon(1e-12));

    const rrt::ResultTable empty;
    CHECK(csv_of(rrt::emit_plot_data(empty, "outdeg-profile")) == "t,mean_estimate,stderr,limit\n");
    CHECK(csv_of(rrt::emit_plot_data(empty, "arcsine")) == "x,ecdf,arcsine_cdf\n");
    rrt::ResultTable partial;
    partial.add_column("t", std::vector<double>{0.5});
    CHECK_THROWS_AS(rrt::emit_plot_data(partial, "outdeg-profile"), rrt::DomainError);
    CHECK_THROWS_AS(rrt::emit_plot_data(partial, "depth-law"), rrt::DomainError);
  }

  TEST_CASE("write_outputs") {
    auto values = base("sanity");
    values["n"] = "50";
    const auto r = rrt::run_experiment(rrt::make_config(values));
    const auto dir = std::filesystem::temp_directory_path() / "rrt_harness_test";
    std::filesystem::create_directories(dir);
    const auto csv = dir / "sanity.csv";
    rrt::write_outputs(r, csv.string());
    std::ifstream in(dir / "sanity.json");
    std::stringstream json;
    json << in.rdbuf();
    CHECK(json.str() == r.summary_json + "\n");
    std::filesystem::remove_all(dir);
    CHECK_THROWS_AS(rrt::write_outputs(r, "/nonexistent/dir/out.csv"), rrt::IoError);
  }

  TEST_CASE("bench on the constant environment never rebuilds") {
    auto values = base("bench");
    values["env.model"] = "constant";
    values["reps"] = "1";
    const auto r = rrt::run_experiment(rrt::make_config(values));
    CHECK(r.table.column("rebuild_count")[0] == 0.0);
    CHECK(r.table.column("n")[0] == 1e6);
  }
}
