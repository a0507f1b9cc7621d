#include <array>
#include <vector>

#include "doctest.h"
#include "qfim/closed_forms.hpp"
#include "qfim/estimation.hpp"

using namespace qfim;
using doctest::Approx;

TEST_CASE("budget validation") {
  CHECK_NOTHROW((EstimationBudget{1, 1, 0.1}.validate()));
  CHECK_THROWS_AS((EstimationBudget{0, 1, 0.1}.validate()), InvalidParameter);
  CHECK_THROWS_AS((EstimationBudget{1, -1, 0.1}.validate()), InvalidParameter);
  CHECK_THROWS_AS((EstimationBudget{1, 1, 0.0}.validate()), InvalidParameter);
  CHECK(EstimationBudget{1, 1, 0.01}.weak_source());
  CHECK(!EstimationBudget{1, 1, 1.0}.weak_source());
}

TEST_CASE("qcrb_total") {
  CHECK(qcrb_total<double>(ParamMatrix4d::Identity(), {1, 1, 1.0}) == Approx(4.0));

  const ParamMatrix4d lim = small_separation_limit(GaussianPsf<double>(1, 2)).h;
  const auto rep = qcrb_report(lim, {1000, 1, 1.0});
  CHECK(rep.trace_inverse == Approx(25.0).epsilon(1e-12));
  CHECK(rep.bound == Approx(0.025).epsilon(1e-12));
  CHECK(rep.condition_number == Approx(16.0).epsilon(1e-12));
  CHECK(rep.per_parameter(0) == Approx(4.0 / 1000));

  ParamMatrix4d singular = ParamMatrix4d::Identity();
  singular(3, 3) = 0;
  CHECK_THROWS_AS(qcrb_total<double>(singular, {1, 1, 1.0}), SingularMatrix);
}

TEST_CASE("qcrb scales inversely with the photon budget") {
  const ParamMatrix4d lim = small_separation_limit(GaussianPsf<double>(1, 2)).h;
  const double base = qcrb_total<double>(lim, {1000, 3, 0.25});
  CHECK(qcrb_total<double>(lim, {2000, 3, 0.25}) == base / 2);
  CHECK(qcrb_total<double>(lim, {1000, 6, 0.25}) == base / 2);
  CHECK(qcrb_total<double>(lim, {1000, 3, 0.5}) == base / 2);
}

TEST_CASE("qcrb_subset") {
  const std::array sp = {Parameter::S, Parameter::P};
  const EstimationBudget budget{10, 1, 1.0};
  const GaussianPsf<double> psf(1, 2);
  // (s, p) block is diag(k/2z_R, 1/4z_R^2): bound (2z_R/k + 4z_R^2) / (nu M eps)
  for (double s : {0.1, 1.0, 4.0}) {
    for (double p : {0.0, 0.5, 3.0}) {
      const auto h = gaussian_closed_qfim(psf, s, p).qfim.h;
      CHECK(qcrb_subset<double>(h, sp, budget) == Approx(20.0 / 10).epsilon(1e-12));
    }
  }
  const auto h = gaussian_closed_qfim(psf, 1.0, 2.0).qfim.h;
  CHECK(qcrb_subset<double>(h, kAllParameters, budget) ==
        Approx(qcrb_total<double>(h, budget)).epsilon(1e-12));
  const std::array only_s = {Parameter::S};
  CHECK(qcrb_subset<double>(h, only_s, {1, 1, 1.0}) == Approx(4.0));
  CHECK_THROWS_AS(qcrb_subset<double>(h, std::span<const Parameter>{}, budget),
                  InvalidParameter);
  const std::array twice = {Parameter::S, Parameter::S};
  CHECK_THROWS_AS(qcrb_subset<double>(h, twice, budget), InvalidParameter);
}

TEST_CASE("compatibility report") {
  SUBCASE("diagonal H, zero Gamma") {
    const auto r = compatibility_report(ParamMatrix4d::Identity() * 3, ParamMatrix4d::Zero());
    CHECK(r.all_compatible());
    CHECK(r.separations_compatible());
  }
  SUBCASE("Gaussian at (1, 2)") {
    const auto q = gaussian_closed_qfim(GaussianPsf<double>(1, 2), 1.0, 2.0).qfim;
    const auto r = compatibility_report(q.h, q.gamma_mat);
    CHECK(r.separations_compatible());
    CHECK(!r.pair(Parameter::S, Parameter::XBar).measurement_compatible);
    CHECK(r.pair(Parameter::XBar, Parameter::S).statistically_independent);
    CHECK(!r.pair(Parameter::XBar, Parameter::ZBar).statistically_independent);
    CHECK(!r.all_compatible());
  }
  SUBCASE("limit matrices") {
    const auto q = small_separation_limit(GaussianPsf<double>(1, 2));
    CHECK(compatibility_report(q.h, q.gamma_mat).all_compatible());
  }
}
