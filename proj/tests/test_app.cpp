#include <clocale>
#include <sstream>
#include <string>

#include "doctest.h"
#include "qfim/app/crossval.hpp"
#include "qfim/app/evaluate.hpp"
#include "qfim/app/format.hpp"
#include "qfim/app/sweep.hpp"

using namespace qfim;
using namespace qfim::app;
using doctest::Approx;

TEST_CASE("format_double") {
  CHECK(format_double(0.25) == "0.25");
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(-0.0) == "0");
  CHECK(format_double(1e-20) == "9.9999999999999995e-21");
  CHECK(std::stod(format_double(3.221199216928595)) == 3.221199216928595);
}

TEST_CASE("range parsing and grid points") {
  const auto r = Range::parse("0.1:5.0:0.25");
  const auto pts = r.points();
  REQUIRE(pts.size() == 21);
  CHECK(pts.front() == 0.1);
  CHECK(pts[1] == 0.35);
  CHECK(pts[19] == Approx(4.85));
  CHECK(pts.back() == 5.0);
  CHECK(Range::parse("0:1:0.25").points().size() == 5);
  CHECK(Range::parse("0:5:0.01").points().size() == 501);

  CHECK_THROWS_AS(Range::parse("1:0:0.1"), InvalidParameter);
  CHECK_THROWS_AS(Range::parse("0:1:0"), InvalidParameter);
  CHECK_THROWS_AS(Range::parse("-1:1:0.5"), InvalidParameter);
  CHECK_THROWS_AS(Range::parse("0:1"), InvalidParameter);
  CHECK_THROWS_AS(Range::parse("a:1:0.1"), InvalidParameter);
}

TEST_CASE("method names") {
  for (auto m : {Method::Pipeline, Method::General, Method::GaussianClosed, Method::All}) {
    CHECK(parse_method(name(m)) == m);
  }
  CHECK_THROWS_AS(parse_method("mathematica"), InvalidParameter);
}

TEST_CASE("evaluate") {
  const GaussianPsf<double> psf(1, 2);
  SUBCASE("gaussian-closed at (1, 0)") {
    const auto e = evaluate(psf, {1.0, 0.0, 0.0, 0.0}, Method::GaussianClosed);
    CHECK(e.method_used == "gaussian-closed");
    CHECK(e.qfim.h(0, 0) == 0.25);
    CHECK(e.qfim.h(2, 2) == 0.0625);
    CHECK(e.qfim.h(1, 1) == Approx(0.805300).epsilon(1e-6));
    CHECK(e.varsigma == 0.25);
  }
  SUBCASE("all at (1, 2)") {
    const auto e = evaluate(psf, {1.0, 0.0, 2.0, 0.0}, Method::All);
    REQUIRE(e.max_deviation);
    CHECK(*e.max_deviation <= 1e-8);
    CHECK(e.routes_compared.size() == 3);
    CHECK(e.rho_eigenvalues);
    CHECK(e.compatibility.separations_compatible());
  }
  SUBCASE("all at s = 0 skips the explicit route") {
    const auto e = evaluate(psf, {0.0, 0.0, 2.0, 0.0}, Method::All);
    CHECK(e.routes_compared.size() == 2);
    CHECK(*e.max_deviation <= 1e-8);
  }
  SUBCASE("coincident sources are refused") {
    CHECK_THROWS_AS(evaluate(psf, {}, Method::Pipeline), DegenerateBasis);
    CHECK_THROWS_AS(evaluate(psf, {}, Method::GaussianClosed), SmallSeparation);
    CHECK_THROWS_AS(evaluate(psf, {}, Method::General), DegenerateOverlap);
  }
}

TEST_CASE("eval JSON round-trips") {
  const auto e = evaluate(GaussianPsf<double>(1, 2), {1.0, 0.3, 2.0, -1.0}, Method::All);
  const auto j = to_json(e);
  const std::string once = j.dump();
  const std::string twice = nlohmann::json::parse(once).dump();
  CHECK(once == twice);
  const auto back = nlohmann::json::parse(once);
  CHECK(back["H"][1][1].get<double>() == e.qfim.h(1, 1));
  CHECK(back["Gamma"][0][1].get<double>() == e.qfim.gamma_mat(0, 1));
  CHECK(back["method_used"] == "pipeline");
  CHECK(back["compatibility"]["s_p_compatible"] == true);
}

TEST_CASE("routed evaluation") {
  const GaussianPsf<double> psf(1, 2);
  CHECK(evaluate_routed(psf, 0.0, 0.0, Method::Pipeline).route == "limit");
  CHECK(evaluate_routed(psf, 0.0, 0.0, Method::General).route == "limit");
  CHECK(evaluate_routed(psf, 0.0, 0.0, Method::GaussianClosed).route == "limit");
  CHECK(evaluate_routed(psf, 0.0, 2.0, Method::GaussianClosed).route == "general");
  CHECK(evaluate_routed(psf, 1.0, 2.0, Method::Pipeline).route == "pipeline");
  const auto all = evaluate_routed(psf, 1.0, 2.0, Method::All);
  CHECK(all.route == "gaussian-closed");
  REQUIRE(all.max_deviation);
  CHECK(*all.max_deviation < 1e-8);
}

TEST_CASE("sweep CSV") {
  SweepSpec spec;
  spec.k = 1;
  spec.z_r = 2;
  spec.swept = 's';
  spec.range = Range::parse("0:1:0.25");
  spec.fixed = 0;
  spec.normalized = true;

  const auto rows = run_sweep(spec, 3);
  std::ostringstream out;
  write_sweep_csv(out, spec, rows);
  const std::string csv = out.str();

  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);
  CHECK(line == kSweepHeader);
  std::getline(lines, line);
  // s = 0, p = 0 falls back to the limit values and says so
  CHECK(line == "s,0,0,1,4,0.25,1,0,0,0,0,0,1|limit");
  std::getline(lines, line);
  CHECK(line.rfind("s,0.25,0,1,", 0) == 0);
  CHECK(line.substr(line.size() - 2) == ",1");
  CHECK(csv.find('\r') == std::string::npos);
  CHECK(csv.back() == '\n');

  SUBCASE("thread count does not change the bytes") {
    std::ostringstream serial;
    write_sweep_csv(serial, spec, run_sweep(spec, 1));
    CHECK(serial.str() == csv);
  }
  SUBCASE("locale independent") {
    const char* old = std::setlocale(LC_ALL, nullptr);
    const std::string saved = old ? old : "C";
    if (std::setlocale(LC_ALL, "de_DE.UTF-8") != nullptr) {
      std::ostringstream again;
      write_sweep_csv(again, spec, run_sweep(spec, 2));
      CHECK(again.str() == csv);
    }
    std::setlocale(LC_ALL, saved.c_str());
  }
}

TEST_CASE("sweep spec validation") {
  SweepSpec spec;
  spec.swept = 'x';
  CHECK_THROWS_AS(spec.validate(), InvalidParameter);
  spec.swept = 'p';
  spec.k = -1;
  CHECK_THROWS_AS(spec.validate(), InvalidParameter);
}

TEST_CASE("parallel_for propagates the first failing index") {
  std::vector<int> hit(100, 0);
  parallel_for(100, 4, [&](std::size_t i) { hit[i] = 1; });
  CHECK(std::count(hit.begin(), hit.end(), 1) == 100);
  CHECK_THROWS_WITH(parallel_for(100, 4,
                                 [&](std::size_t i) {
                                   if (i % 10 == 3) throw std::runtime_error(std::to_string(i));
                                 }),
                    "3");
}

TEST_CASE("crossval") {
  CrossvalSpec spec;
  spec.s_range = Range::parse("0.1:5:0.7");
  spec.p_range = Range::parse("0.1:5:0.7");

  SUBCASE("default routes pass") {
    const auto rep = run_crossval(spec);
    CHECK(rep.passed());
    CHECK(rep.compared == rep.points);
    CHECK(rep.max_rel <= 1e-8);
  }
  SUBCASE("s = 0 compares pipeline and general only") {
    spec.s_range = Range::parse("0:0.5:1");  // {0, 0.5}
    spec.p_range = Range::parse("2:3:1");    // {2, 3}
    const auto rep = run_crossval(spec);
    CHECK(rep.passed());
    CHECK(rep.closed_skipped == 2);
    CHECK(rep.skipped == 0);
  }
  SUBCASE("coincident point is skipped") {
    spec.s_range = Range::parse("0:1:1");
    spec.p_range = Range::parse("0:1:1");
    const auto rep = run_crossval(spec);
    CHECK(rep.skipped == 1);
    CHECK(rep.passed());
  }
  SUBCASE("corrupted formula is caught entry by entry") {
    auto routes = default_routes();
    const auto good = routes.general;
    routes.general = [good](const GaussianPsf<double>& psf, double s, double p) {
      auto q = good(psf, s, p);
      q.h(3, 3) *= 1 + 1e-6;
      return q;
    };
    const auto rep = run_crossval(spec, routes);
    CHECK(!rep.passed());
    REQUIRE(!rep.failures.empty());
    CHECK(rep.failures.front().what.find("H_zz") != std::string::npos);
    std::ostringstream out;
    print_report(out, rep);
    CHECK(out.str().find("FAIL") != std::string::npos);
  }
  SUBCASE("sparsity violations are caught") {
    auto routes = default_routes();
    const auto good = routes.gaussian;
    routes.gaussian = [good](const GaussianPsf<double>& psf, double s, double p) {
      auto q = good(psf, s, p);
      q.gamma_mat(0, 2) = 1e-6;
      q.gamma_mat(2, 0) = -1e-6;
      return q;
    };
    const auto rep = run_crossval(spec, routes);
    CHECK(!rep.passed());
  }
}
