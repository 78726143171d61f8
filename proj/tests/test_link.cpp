#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/log1p.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <vector>

#include "flexlink/link.hpp"

using namespace flexlink;
using mp50 = boost::multiprecision::cpp_bin_float_50;

namespace {

const std::vector<double> kRGrid{0.1, 0.5, 1.0, 2.0, 10.0};

std::vector<double> x_grid(double lo, double hi, int points) {
  std::vector<double> g;
  for (int i = 0; i < points; ++i)
    g.push_back(lo + (hi - lo) * i / double(points - 1));
  return g;
}

std::vector<LinkSpec> sp_family_grid() {
  std::vector<LinkSpec> links;
  for (double r : kRGrid) {
    links.push_back(LinkSpec::splogit(r));
    links.push_back(LinkSpec::spt(r, 5.0));
    links.push_back(LinkSpec::spep(r, 1.5));
  }
  return links;
}

// High-precision oracle for the splogit log c.d.f. / survival, written in
// cancellation-free form so 50 digits are genuine.
mp50 mp_log_logistic(const mp50& x) {
  // log sigma(x) = -log1p(e^{-x})
  return -boost::math::log1p(exp(-x));
}

mp50 mp_log1mexp(const mp50& u) {
  // log(1 - e^u) for u < 0
  if (u > mp50(-0.5)) return log(-boost::math::expm1(u));
  return boost::math::log1p(-exp(u));
}

std::pair<mp50, mp50> mp_splogit_logs(double r, double x) {
  const mp50 rr = r, xx = x;
  if (r <= 1.0) {
    const mp50 lc = rr * mp_log_logistic(xx / rr);
    return {lc, mp_log1mexp(lc)};
  }
  const mp50 ls = mp_log_logistic(-(rr * xx)) / rr;
  return {mp_log1mexp(ls), ls};
}

}  // namespace

TEST_CASE("cdf frozen values") {
  CHECK(cdf(LinkSpec::splogit(1.0), 0.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(cdf(LinkSpec::splogit(0.5), 0.0) ==
        doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
  CHECK(cdf(LinkSpec::splogit(2.0), 0.0) ==
        doctest::Approx(1.0 - std::sqrt(0.5)).epsilon(1e-12));
  CHECK(cdf(LinkSpec::cloglog(), 0.0) ==
        doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-12));
  CHECK(cdf(LinkSpec::logit(), std::numeric_limits<double>::infinity()) == 1.0);
  CHECK(cdf(LinkSpec::logit(), -std::numeric_limits<double>::infinity()) == 0.0);
}

TEST_CASE("log_cdf / log_sf frozen values") {
  // log sigma(x) ~ x for x << 0
  CHECK(log_cdf(LinkSpec::logit(), -50.0) == doctest::Approx(-50.0).epsilon(1e-12));
  CHECK(log_cdf(LinkSpec::splogit(1.0), 0.0) ==
        doctest::Approx(std::log(0.5)).epsilon(1e-14));
  CHECK(log_cdf(LinkSpec::loglog(), 0.0) == doctest::Approx(-1.0).epsilon(1e-14));
}

TEST_CASE("pdf frozen values") {
  CHECK(pdf(LinkSpec::spep(1.0, 2.0), 0.0) ==
        doctest::Approx(1.0 / std::sqrt(2.0 * M_PI)).epsilon(1e-12));
  CHECK(pdf(LinkSpec::spep(1.0, 1.0), 0.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(pdf(LinkSpec::splogit(1.0), 0.0) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("mode") {
  // f'(x) = (1 - e^x) f(x) vanishes at 0 for cloglog
  CHECK(mode(LinkSpec::cloglog()) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(mode(LinkSpec::logit()) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(mode(LinkSpec::splogit(2.0)) ==
        doctest::Approx(-mode(LinkSpec::splogit(0.5))).epsilon(1e-12));

  // numeric modes are genuine stationary points: |pdf'(mode)| small
  for (const auto& link :
       {LinkSpec::spt(0.5, 5.0), LinkSpec::spep(2.0, 1.5), LinkSpec::stukel(0.5, -0.5),
        LinkSpec::czado(1.5, 0.8)}) {
    const double m = mode(link);
    const double h = 1e-6;
    const double deriv = (pdf(link, m + h) - pdf(link, m - h)) / (2.0 * h);
    CHECK(std::fabs(deriv) < 1e-4);
  }
}

TEST_CASE("skewness closed forms") {
  CHECK(skewness(LinkSpec::splogit(1.0)) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(skewness(LinkSpec::cloglog()) == doctest::Approx(-0.26424).epsilon(1e-4));
  CHECK(skewness(LinkSpec::loglog()) == doctest::Approx(0.26424).epsilon(1e-4));
  CHECK(skewness(LinkSpec::splogit(0.5)) == doctest::Approx(-0.15470).epsilon(1e-4));
  CHECK(skewness(LinkSpec::splogit(2.0)) == doctest::Approx(0.15470).epsilon(1e-4));
  // 1 - 2 exp(-3.7)
  CHECK(skewness(LinkSpec::gev(2.7)) == doctest::Approx(0.9505529).epsilon(1e-6));
  // gev xi <= -1: density diverges at the upper endpoint
  CHECK(skewness(LinkSpec::gev(-3.3)) == -1.0);
  CHECK(skewness(LinkSpec::gev(-1.0)) == -1.0);
}

TEST_CASE("skewness closed vs numeric") {
  for (double r : {0.05, 0.2, 0.5, 1.0, 2.0, 5.0, 20.0}) {
    CHECK(std::fabs(skewness(LinkSpec::splogit(r)) -
                    skewness_numeric(LinkSpec::splogit(r))) < 1e-6);
    CHECK(std::fabs(skewness(LinkSpec::plogit(r)) -
                    skewness_numeric(LinkSpec::plogit(r))) < 1e-6);
    CHECK(std::fabs(skewness(LinkSpec::altersplogit(r)) -
                    skewness_numeric(LinkSpec::altersplogit(r))) < 1e-6);
  }
  for (double xi : {-0.9, -0.3, 0.0, 0.5, 0.9})
    CHECK(std::fabs(skewness(LinkSpec::gev(xi)) -
                    skewness_numeric(LinkSpec::gev(xi))) < 1e-6);
}

TEST_CASE("skewness limits") {
  CHECK(skewness(LinkSpec::splogit(1e-4)) < -0.99);
  CHECK(skewness(LinkSpec::splogit(1e4)) > 0.99);
  const double pl = skewness(LinkSpec::plogit(1e4));
  CHECK(pl > 0.25);
  CHECK(pl < 0.27);
  // altersplogit is capped near +-0.264 on both sides
  CHECK(skewness(LinkSpec::altersplogit(1e-4)) > -0.27);
  CHECK(skewness(LinkSpec::altersplogit(1e4)) < 0.27);
}

TEST_CASE("quantile") {
  CHECK(quantile(LinkSpec::logit(), 0.5) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(std::fabs(quantile(LinkSpec::cloglog(), 1.0 - std::exp(-1.0))) < 1e-12);
  CHECK(std::fabs(quantile(LinkSpec::splogit(2.0), 1.0 - std::sqrt(0.5))) < 1e-10);
  CHECK_THROWS_AS(quantile(LinkSpec::logit(), 0.0), std::domain_error);
  CHECK_THROWS_AS(quantile(LinkSpec::logit(), 1.0), std::domain_error);

  // round trip cdf(quantile(q)) = q within 1e-10 (root-found families too)
  for (const auto& link :
       {LinkSpec::splogit(0.3), LinkSpec::spt(2.0, 5.0), LinkSpec::spep(0.7, 1.3),
        LinkSpec::stukel(0.7, -0.4), LinkSpec::czado(1.7, 0.6), LinkSpec::gev(0.4),
        LinkSpec::gev(-0.4), LinkSpec::plogit(2.5), LinkSpec::altersplogit(0.4)}) {
    for (double q : {0.001, 0.05, 0.3, 0.5, 0.8, 0.95, 0.999})
      CHECK(cdf(link, quantile(link, q)) == doctest::Approx(q).epsilon(1e-10));
  }
}

TEST_CASE("stukel and czado transforms") {
  CHECK(stukel_transform(0.0, 0.0, 1.7) == 1.7);   // identity branch
  CHECK(stukel_transform(0.0, 0.0, -0.3) == -0.3);
  CHECK(stukel_transform(1.0, 0.5, 1.0) ==
        doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-14));
  CHECK(czado_transform(2.0, 0.5, 1.0) == doctest::Approx(1.5).epsilon(1e-14));
  // continuity at eta = 0 and across the alpha -> 0 limit
  for (double a : {-1.0, -1e-9, 0.0, 1e-9, 1.0}) {
    CHECK(stukel_transform(a, a, 1e-12) == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(czado_transform(a, a, 0.0) == doctest::Approx(0.0).epsilon(1e-10));
  }
  CHECK(stukel_transform(0.5, 0.0, 1e-7) ==
        doctest::Approx(stukel_transform(1e-9, 0.0, 1e-7)).epsilon(1e-6));
  CHECK(czado_transform(1e-9, 0.0, 2.0) ==
        doctest::Approx(std::log(3.0)).epsilon(1e-7));
  // saturation under exp overflow is documented as +-infinity
  CHECK(stukel_transform(2.0, 0.0, 400.0) ==
        std::numeric_limits<double>::infinity());
  CHECK(log_sf(LinkSpec::stukel(2.0, 0.0), 400.0) ==
        -std::numeric_limits<double>::infinity());
}

TEST_CASE("mirror identity across the sp families") {
  const auto grid = x_grid(-30.0, 30.0, 100);
  for (double r : kRGrid) {
    for (double x : grid) {
      CHECK(std::fabs(cdf(LinkSpec::splogit(r), x) +
                      cdf(LinkSpec::splogit(1.0 / r), -x) - 1.0) <= 1e-12);
      CHECK(std::fabs(cdf(LinkSpec::spt(r, 5.0), x) +
                      cdf(LinkSpec::spt(1.0 / r, 5.0), -x) - 1.0) <= 1e-12);
      CHECK(std::fabs(cdf(LinkSpec::spep(r, 1.5), x) +
                      cdf(LinkSpec::spep(1.0 / r, 1.5), -x) - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("continuity at r = 1") {
  const auto grid = x_grid(-20.0, 20.0, 100);
  for (double x : grid) {
    for (double r : {1.0 - 1e-8, 1.0 + 1e-8}) {
      CHECK(std::fabs(cdf(LinkSpec::splogit(r), x) - cdf(LinkSpec::logit(), x)) <=
            1e-6);
      CHECK(std::fabs(cdf(LinkSpec::spep(r, 2.0), x) -
                      cdf(LinkSpec::spep(1.0, 2.0), x)) <= 1e-6);
      CHECK(std::fabs(cdf(LinkSpec::spt(r, 5.0), x) -
                      cdf(LinkSpec::spt(1.0, 5.0), x)) <= 1e-6);
    }
  }
}

TEST_CASE("reduction to the baselines at r = 1") {
  const auto grid = x_grid(-8.0, 8.0, 33);
  // independent implementations: closed-form logistic, erfc normal,
  // quadrature Student t
  for (double x : grid) {
    CHECK(std::fabs(cdf(LinkSpec::splogit(1.0), x) - 1.0 / (1.0 + std::exp(-x))) <=
          1e-10);
    CHECK(std::fabs(cdf(LinkSpec::spep(1.0, 2.0), x) - 0.5 * std::erfc(-x / std::sqrt(2.0))) <=
          1e-10);
  }
  const double nu = 5.0;
  const double tnorm = std::exp(std::lgamma(0.5 * (nu + 1.0)) -
                                std::lgamma(0.5 * nu)) /
                       std::sqrt(nu * M_PI);
  boost::math::quadrature::tanh_sinh<double> integrator;
  for (double x : grid) {
    const auto density = [&](double t) {
      return tnorm * std::pow(1.0 + t * t / nu, -0.5 * (nu + 1.0));
    };
    const double ref = 0.5 + integrator.integrate(density, 0.0, std::fabs(x)) *
                                 (x >= 0 ? 1.0 : -1.0);
    CHECK(std::fabs(cdf(LinkSpec::spt(1.0, nu), x) - ref) <= 1e-10);
  }
}

TEST_CASE("splogit against plogit") {
  // identical up to the x/r scaling (hence identical skewness) for r <= 1
  for (double r : {0.1, 0.4, 0.9, 1.0}) {
    CHECK(skewness(LinkSpec::splogit(r)) ==
          doctest::Approx(skewness(LinkSpec::plogit(r))).epsilon(1e-14));
    for (double x : x_grid(-10.0, 10.0, 21))
      CHECK(cdf(LinkSpec::splogit(r), x) ==
            doctest::Approx(cdf(LinkSpec::plogit(r), x / r)).epsilon(1e-13));
  }
  // genuinely different families for r > 1
  CHECK(std::fabs(skewness(LinkSpec::splogit(2.0)) -
                  skewness(LinkSpec::plogit(2.0))) > 0.01);
}

TEST_CASE("monotonicity, positivity, unit mass") {
  auto links = sp_family_grid();
  links.push_back(LinkSpec::cloglog());
  links.push_back(LinkSpec::loglog());
  links.push_back(LinkSpec::gev(0.4));
  links.push_back(LinkSpec::gev(-0.4));
  links.push_back(LinkSpec::stukel(0.6, -0.5));
  links.push_back(LinkSpec::czado(1.4, 0.7));
  links.push_back(LinkSpec::plogit(3.0));
  links.push_back(LinkSpec::altersplogit(0.3));

  for (const auto& link : links) {
    double prev = -0.1;
    for (double x : x_grid(-40.0, 40.0, 161)) {
      const double c = cdf(link, x);
      CHECK(c >= prev - 1e-14);
      CHECK(pdf(link, x) >= 0.0);
      prev = c;
    }
    // integrate between extreme quantiles, split at interior quantiles so
    // each segment is well scaled; power-law tail segments (the spt family
    // with small r has tails out at 1e19) go through a log substitution.
    // The missing tail mass is 2e-10.
    using gk = boost::math::quadrature::gauss_kronrod<double, 61>;
    const auto density = [&](double t) { return pdf(link, t); };
    const auto segment = [&](double a, double b) {
      if (b < -10.0) {
        const auto g = [&](double s) { return pdf(link, -std::exp(s)) * std::exp(s); };
        return gk::integrate(g, std::log(-b), std::log(-a), 12, 1e-9);
      }
      if (a > 10.0) {
        const auto g = [&](double s) { return pdf(link, std::exp(s)) * std::exp(s); };
        return gk::integrate(g, std::log(a), std::log(b), 12, 1e-9);
      }
      return gk::integrate(density, a, b, 12, 1e-9);
    };
    const std::vector<double> probs{1e-10, 1e-4, 0.05, 0.25, 0.5,
                                    0.75,  0.95, 1.0 - 1e-4, 1.0 - 1e-10};
    double mass = 0.0;
    for (std::size_t s = 0; s + 1 < probs.size(); ++s)
      mass += segment(quantile(link, probs[s]), quantile(link, probs[s + 1]));
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("pdf is the derivative of cdf") {
  auto links = sp_family_grid();
  links.push_back(LinkSpec::stukel(0.8, 0.3));
  links.push_back(LinkSpec::czado(1.2, 0.9));
  links.push_back(LinkSpec::gev(0.3));
  for (const auto& link : links) {
    for (double x : x_grid(-5.0, 5.0, 21)) {
      const double h = 1e-5;
      const double num = (cdf(link, x + h) - cdf(link, x - h)) / (2.0 * h);
      CHECK(std::fabs(num - pdf(link, x)) < 1e-6);
    }
  }
}

TEST_CASE("spep cdf via incomplete gamma matches quadrature of the density") {
  boost::math::quadrature::tanh_sinh<double> integrator;
  for (double p : {1.0, 1.3, 1.7, 2.0}) {
    const double logc = std::log(2.0) + (1.0 / p - 1.0) * std::log(p) +
                        std::lgamma(1.0 / p);
    const auto density = [&](double t) {
      return std::exp(-std::pow(std::fabs(t), p) / p - logc);
    };
    for (double x : {-3.0, -1.0, -0.2, 0.0, 0.4, 1.5, 4.0}) {
      const double ref = 0.5 + (x >= 0 ? 1.0 : -1.0) *
                                   integrator.integrate(density, 0.0, std::fabs(x));
      CHECK(std::fabs(cdf(LinkSpec::spep(1.0, p), x) - ref) <= 1e-8);
    }
  }
}

TEST_CASE("log forms agree with a 50-digit oracle out to |x| = 700") {
  for (double r : {0.5, 1.0, 2.0}) {
    const LinkSpec link = LinkSpec::splogit(r);
    for (double x = -700.0; x <= 700.0 + 1e-9; x += 70.0) {
      const auto [olc, ols] = mp_splogit_logs(r, x);
      const double lc = log_cdf(link, x);
      const double ls = log_sf(link, x);
      const double ref_c = olc.convert_to<double>();
      const double ref_s = ols.convert_to<double>();
      CHECK(std::fabs(lc - ref_c) <= 1e-10 * std::max(1.0, std::fabs(ref_c)));
      CHECK(std::fabs(ls - ref_s) <= 1e-10 * std::max(1.0, std::fabs(ref_s)));
    }
  }
  // exp(log_cdf) = cdf and exp(log_sf) = 1 - cdf to relative 1e-12
  auto links = sp_family_grid();
  for (const auto& link : links) {
    for (double x : x_grid(-25.0, 25.0, 41)) {
      const double c = cdf(link, x);
      if (c > 1e-300 && c < 1.0)
        CHECK(std::exp(log_cdf(link, x)) == doctest::Approx(c).epsilon(1e-12));
      const double s = 1.0 - c;
      if (s > 1e-12 && s < 1.0)
        CHECK(std::exp(log_sf(link, x)) == doctest::Approx(s).epsilon(1e-11));
    }
  }
}

TEST_CASE("gev support endpoints") {
  const LinkSpec neg = LinkSpec::gev(-0.5);  // upper endpoint at 2
  CHECK(cdf(neg, 2.0) == 1.0);
  CHECK(cdf(neg, 5.0) == 1.0);  // exactly 1 beyond the endpoint
  CHECK(log_sf(neg, 5.0) == -std::numeric_limits<double>::infinity());
  const LinkSpec pos = LinkSpec::gev(0.5);  // lower endpoint at -2
  CHECK(cdf(pos, -2.0) == 0.0);
  CHECK(cdf(pos, -10.0) == 0.0);
  // continuity across xi = 0: the Gumbel (loglog) member
  for (double x : x_grid(-5.0, 5.0, 11)) {
    CHECK(cdf(LinkSpec::gev(1e-13), x) ==
          doctest::Approx(cdf(LinkSpec::loglog(), x)).epsilon(1e-9));
    CHECK(std::fabs(cdf(LinkSpec::gev(1e-7), x) - cdf(LinkSpec::loglog(), x)) < 1e-6);
  }
}

TEST_CASE("mirrored links") {
  const LinkSpec gm = LinkSpec::gev(0.3, /*mirror=*/true);
  for (double x : x_grid(-4.0, 4.0, 17))
    CHECK(cdf(gm, x) ==
          doctest::Approx(1.0 - cdf(LinkSpec::gev(0.3), -x)).epsilon(1e-13));
  CHECK(skewness(gm) == doctest::Approx(-skewness(LinkSpec::gev(0.3))).epsilon(1e-14));
  // the xi = 0 member of the mirrored family is the cloglog link
  LinkSpec g0 = LinkSpec::gev(0.0, true);
  for (double x : x_grid(-4.0, 4.0, 17))
    CHECK(cdf(g0, x) == doctest::Approx(cdf(LinkSpec::cloglog(), x)).epsilon(1e-12));
  // quantile consistency under mirroring
  for (double q : {0.1, 0.5, 0.9})
    CHECK(cdf(gm, quantile(gm, q)) == doctest::Approx(q).epsilon(1e-10));
}

TEST_CASE("invalid parameters are rejected") {
  CHECK_THROWS_AS(LinkSpec::splogit(0.0), std::invalid_argument);
  CHECK_THROWS_AS(LinkSpec::splogit(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(LinkSpec::spep(1.0, 0.9), std::invalid_argument);
  CHECK_THROWS_AS(LinkSpec::spep(1.0, 2.1), std::invalid_argument);
  CHECK_THROWS_AS(LinkSpec::spt(1.0, -2.0), std::invalid_argument);

  // accessing a parameter the family does not have is an error
  CHECK_THROWS_AS(LinkSpec::logit().power(), std::logic_error);
  CHECK_THROWS_AS(LinkSpec::splogit(1.0).gev_shape(), std::logic_error);
  CHECK_THROWS_AS(LinkSpec::gev(0.1).dof(), std::logic_error);

  // a spec carrying an extraneous field fails validation
  LinkSpec bad = LinkSpec::logit();
  bad.r = 2.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}
