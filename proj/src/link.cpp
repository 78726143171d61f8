#include "flexlink/link.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace flexlink {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kAlphaZeroTol = 1e-8;  // Stukel/Czado limit-branch switch
constexpr double kXiZeroTol = 1e-12;    // GEV Gumbel-branch switch

// log(1 + e^t) without overflow.
double softplus(double t) {
  if (t > 0.0) return t + std::log1p(std::exp(-t));
  return std::log1p(std::exp(t));
}

// log(1 - e^u) for u <= 0.
double log1mexp(double u) {
  if (u >= 0.0) return u == 0.0 ? -kInf : std::numeric_limits<double>::quiet_NaN();
  if (u > -M_LN2) return std::log(-std::expm1(u));
  return std::log1p(-std::exp(u));
}

// ---------------------------------------------------------------------------
// Baseline c.d.f.s, symmetric about zero. Each provides log F0, log f0 and,
// for the tails, asymptotic continuations where the regularized incomplete
// functions underflow.

// Standard logistic.
double logistic_log_cdf(double x) { return -softplus(-x); }
double logistic_log_pdf(double x) {
  const double a = std::fabs(x);
  return -a - 2.0 * std::log1p(std::exp(-a));
}
double logistic_quantile(double q) { return std::log(q) - std::log1p(-q); }

// Student t with nu degrees of freedom. Lower-tail probability computed via
// the regularized incomplete beta; power-law asymptote once that underflows.
double student_log_const(double nu) {
  return std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
         0.5 * std::log(nu * M_PI);
}

double student_log_tail(double nu, double a) {
  // log P(T > a) for a >= 0.
  if (a < 1e3) {
    const double z = nu / (nu + a * a);
    const double tail = 0.5 * boost::math::ibeta(0.5 * nu, 0.5, z);
    if (tail > 1e-290) return std::log(tail);
  }
  // f(t) ~ C nu^{(nu+1)/2} t^{-(nu+1)}, integrate the leading term.
  const double logc = student_log_const(nu);
  return logc + 0.5 * (nu + 1.0) * std::log(nu) - std::log(nu) -
         nu * std::log(a);
}

double student_log_cdf(double nu, double x) {
  if (x >= 0.0) {
    const double z = nu / (nu + x * x);
    const double tail = 0.5 * boost::math::ibeta(0.5 * nu, 0.5, z);
    return std::log1p(-tail);
  }
  return student_log_tail(nu, -x);
}

double student_log_pdf(double nu, double x) {
  return student_log_const(nu) -
         0.5 * (nu + 1.0) * std::log1p(x * x / nu);
}

// Exponential power with exponent p in [1,2] (sigma = 1, mu = 0), density
// c^{-1} exp(-|x|^p / p) with c = 2 p^{1/p-1} Gamma(1/p). The c.d.f. follows
// from the substitution z = |x|^p/p:
//   F0(x) = 1/2 + sign(x)/2 * P(1/p, |x|^p/p).
double ep_log_norm(double p) {
  return M_LN2 + (1.0 / p - 1.0) * std::log(p) + std::lgamma(1.0 / p);
}

double ep_log_tail(double p, double a) {
  // log P(X > a) for a >= 0.
  const double ia = 1.0 / p;
  const double z = std::pow(a, p) / p;
  if (z < 650.0) {
    const double tail = 0.5 * boost::math::gamma_q(ia, z);
    if (tail > 1e-290) return std::log(tail);
  }
  // Q(a,z) ~ z^{a-1} e^{-z} / Gamma(a) for large z.
  const double series = 1.0 + (ia - 1.0) / z + (ia - 1.0) * (ia - 2.0) / (z * z);
  return -M_LN2 + (ia - 1.0) * std::log(z) - z - std::lgamma(ia) +
         std::log(series);
}

double ep_log_cdf(double p, double x) {
  if (x >= 0.0) {
    const double z = std::pow(x, p) / p;
    const double tail = 0.5 * boost::math::gamma_q(1.0 / p, z);
    return std::log1p(-tail);
  }
  return ep_log_tail(p, -x);
}

double ep_log_pdf(double p, double x) {
  return -std::pow(std::fabs(x), p) / p - ep_log_norm(p);
}

// Baseline dispatch for the three symmetric power families.
enum class Baseline { logistic, student, ep };

Baseline baseline_of(LinkFamily family) {
  switch (family) {
    case LinkFamily::spt:
      return Baseline::student;
    case LinkFamily::spep:
      return Baseline::ep;
    default:
      return Baseline::logistic;
  }
}

double base_log_cdf(Baseline b, const LinkSpec& link, double x) {
  switch (b) {
    case Baseline::logistic:
      return logistic_log_cdf(x);
    case Baseline::student:
      return student_log_cdf(link.dof(), x);
    case Baseline::ep:
      return ep_log_cdf(link.ep_exponent(), x);
  }
  return 0.0;
}

double base_log_pdf(Baseline b, const LinkSpec& link, double x) {
  switch (b) {
    case Baseline::logistic:
      return logistic_log_pdf(x);
    case Baseline::student:
      return student_log_pdf(link.dof(), x);
    case Baseline::ep:
      return ep_log_pdf(link.ep_exponent(), x);
  }
  return 0.0;
}

// log(-log F0(v)), stable when F0(v) is within an ulp of 1. Uses the
// baseline's symmetry: 1 - F0(v) = F0(-v).
double base_log_neg_log_cdf(Baseline b, const LinkSpec& link, double v) {
  const double lf = base_log_cdf(b, link, v);
  if (lf < -1e-8) return std::log(-lf);
  // -log F0 = -log(1 - s) = s (1 + s/2 + ...) with s = F0(-v)
  const double ls = base_log_cdf(b, link, -v);
  return ls + std::log1p(0.5 * std::exp(ls));
}

// log(1 - e^u) for u <= 0 given log(-u); exact even where u has underflowed.
double log1mexp_guarded(double u, double log_neg_u) {
  if (u < -1e-8) return log1mexp(u);
  return log_neg_u + std::log1p(0.5 * u);  // 1 - e^u = -u (1 + u/2 + O(u^2))
}

// ---------------------------------------------------------------------------
// Symmetric power construction, Eq.-(2) branches; log F0^rho(x/rho) on the
// lower branch, its mirror reflection above r = 1.

double sp_log_cdf(Baseline b, const LinkSpec& link, double r, double x) {
  if (r <= 1.0) return r * base_log_cdf(b, link, x / r);
  const double inv = 1.0 / r;
  const double u = inv * base_log_cdf(b, link, -(r * x));
  return log1mexp_guarded(
      u, -std::log(r) + base_log_neg_log_cdf(b, link, -(r * x)));
}

double sp_log_sf(Baseline b, const LinkSpec& link, double r, double x) {
  if (r <= 1.0) {
    const double u = r * base_log_cdf(b, link, x / r);
    return log1mexp_guarded(
        u, std::log(r) + base_log_neg_log_cdf(b, link, x / r));
  }
  const double inv = 1.0 / r;
  return inv * base_log_cdf(b, link, -(r * x));
}

double sp_cdf(Baseline b, const LinkSpec& link, double r, double x) {
  if (r <= 1.0) return std::exp(r * base_log_cdf(b, link, x / r));
  const double inv = 1.0 / r;
  return 1.0 - std::exp(inv * base_log_cdf(b, link, -(r * x)));
}

// d/dx F0^rho(x/rho) = F0^{rho-1}(x/rho) f0(x/rho); the r > 1 branch has the
// same form in the reflected argument.
double sp_log_pdf(Baseline b, const LinkSpec& link, double r, double x) {
  if (r <= 1.0) {
    const double u = x / r;
    return (r - 1.0) * base_log_cdf(b, link, u) + base_log_pdf(b, link, u);
  }
  const double u = -(r * x);
  const double inv = 1.0 / r;
  return (inv - 1.0) * base_log_cdf(b, link, u) + base_log_pdf(b, link, u);
}

// altersplogit: the Eq.-(altersp) construction, branch formulas swapped.
double altersp_log_cdf(Baseline b, const LinkSpec& link, double r, double x) {
  if (r <= 1.0) {
    const double u = (1.0 / r) * base_log_cdf(b, link, -(r * x));
    return log1mexp_guarded(
        u, -std::log(r) + base_log_neg_log_cdf(b, link, -(r * x)));
  }
  return r * base_log_cdf(b, link, x / r);
}

double altersp_log_sf(Baseline b, const LinkSpec& link, double r, double x) {
  if (r <= 1.0) return (1.0 / r) * base_log_cdf(b, link, -(r * x));
  const double u = r * base_log_cdf(b, link, x / r);
  return log1mexp_guarded(u,
                          std::log(r) + base_log_neg_log_cdf(b, link, x / r));
}

double altersp_cdf(Baseline b, const LinkSpec& link, double r, double x) {
  if (r <= 1.0) return 1.0 - std::exp((1.0 / r) * base_log_cdf(b, link, -(r * x)));
  return std::exp(r * base_log_cdf(b, link, x / r));
}

double altersp_log_pdf(Baseline b, const LinkSpec& link, double r, double x) {
  if (r <= 1.0) {
    const double u = -(r * x);
    return (1.0 / r - 1.0) * base_log_cdf(b, link, u) + base_log_pdf(b, link, u);
  }
  const double u = x / r;
  return (r - 1.0) * base_log_cdf(b, link, u) + base_log_pdf(b, link, u);
}

// ---------------------------------------------------------------------------
// GEV, direct form G(x) = exp[-(1 + xi x)_+^{-1/xi}], mu = 0, sigma = 1.
// For xi < 0 the support has upper endpoint -1/xi (G = 1 beyond); for xi > 0
// it has lower endpoint -1/xi (G = 0 below).

double gev_neg_log(double xi, double x) {
  // Returns s = (1 + xi x)_+^{-1/xi}, +inf below lower support, 0 above upper.
  if (std::fabs(xi) < kXiZeroTol) return std::exp(-x);
  const double t = 1.0 + xi * x;
  if (t <= 0.0) return xi > 0.0 ? kInf : 0.0;
  return std::exp(-std::log(t) / xi);
}

double gev_log_cdf(double xi, double x) { return -gev_neg_log(xi, x); }

double gev_log_sf(double xi, double x) {
  const double s = gev_neg_log(xi, x);
  if (s == 0.0) return -kInf;
  return log1mexp(-s);
}

double gev_log_pdf(double xi, double x) {
  if (std::fabs(xi) < kXiZeroTol) return -x - std::exp(-x);
  const double t = 1.0 + xi * x;
  if (t <= 0.0) return -kInf;
  const double logt = std::log(t);
  return (-1.0 / xi - 1.0) * logt - std::exp(-logt / xi);
}

double gev_quantile(double xi, double q) {
  const double g = -std::log(q);
  if (std::fabs(xi) < kXiZeroTol) return -std::log(g);
  return std::expm1(-xi * std::log(g)) / xi;
}

// ---------------------------------------------------------------------------
// Stukel / Czado: c.d.f. logistic(h_alpha(x)).

double stukel_h(double a1, double a2, double eta) {
  if (eta >= 0.0) {
    if (std::fabs(a1) < kAlphaZeroTol) return eta;
    if (a1 > 0.0) {
      const double t = a1 * eta;
      if (t > 709.0) return kInf;  // exp overflow: saturate
      return std::expm1(t) / a1;
    }
    return -std::log1p(-a1 * eta) / a1;
  }
  const double m = -eta;
  if (std::fabs(a2) < kAlphaZeroTol) return eta;
  if (a2 > 0.0) {
    const double t = a2 * m;
    if (t > 709.0) return -kInf;
    return -std::expm1(t) / a2;
  }
  return std::log1p(-a2 * m) / a2;
}

double stukel_log_dh(double a1, double a2, double eta) {
  if (eta >= 0.0) {
    if (std::fabs(a1) < kAlphaZeroTol) return 0.0;
    if (a1 > 0.0) return a1 * eta;
    return -std::log1p(-a1 * eta);
  }
  const double m = -eta;
  if (std::fabs(a2) < kAlphaZeroTol) return 0.0;
  if (a2 > 0.0) return a2 * m;
  return -std::log1p(-a2 * m);
}

double czado_h(double a1, double a2, double eta) {
  if (eta >= 0.0) {
    if (std::fabs(a1) < kAlphaZeroTol) return std::log1p(eta);
    return std::expm1(a1 * std::log1p(eta)) / a1;
  }
  if (std::fabs(a2) < kAlphaZeroTol) return -std::log1p(-eta);
  return -std::expm1(a2 * std::log1p(-eta)) / a2;
}

double czado_log_dh(double a1, double a2, double eta) {
  if (eta >= 0.0) {
    const double a = std::fabs(a1) < kAlphaZeroTol ? 0.0 : a1;
    return (a - 1.0) * std::log1p(eta);
  }
  const double a = std::fabs(a2) < kAlphaZeroTol ? 0.0 : a2;
  return (a - 1.0) * std::log1p(-eta);
}

// ---------------------------------------------------------------------------

struct Unmirrored {
  const LinkSpec& link;
};

double raw_log_cdf(const LinkSpec& link, double x);
double raw_log_sf(const LinkSpec& link, double x);

double raw_cdf(const LinkSpec& link, double x) {
  const Baseline b = baseline_of(link.family);
  switch (link.family) {
    case LinkFamily::logit:
      return 1.0 / (1.0 + std::exp(-x));
    case LinkFamily::cloglog:
      return -std::expm1(-std::exp(x));
    case LinkFamily::loglog:
      return std::exp(-std::exp(-x));
    case LinkFamily::splogit:
    case LinkFamily::spt:
    case LinkFamily::spep:
      return sp_cdf(b, link, link.power(), x);
    case LinkFamily::plogit:
      return std::exp(link.power() * logistic_log_cdf(x));
    case LinkFamily::altersplogit:
      return altersp_cdf(b, link, link.power(), x);
    case LinkFamily::stukel:
      return 1.0 / (1.0 + std::exp(-stukel_h(link.shape1(), link.shape2(), x)));
    case LinkFamily::czado:
      return 1.0 / (1.0 + std::exp(-czado_h(link.shape1(), link.shape2(), x)));
    case LinkFamily::gev:
      return std::exp(gev_log_cdf(link.gev_shape(), x));
  }
  return 0.0;
}

double raw_log_cdf(const LinkSpec& link, double x) {
  const Baseline b = baseline_of(link.family);
  switch (link.family) {
    case LinkFamily::logit:
      return logistic_log_cdf(x);
    case LinkFamily::cloglog: {
      const double e = std::exp(x);
      return e < 1e-8 ? std::log(e - 0.5 * e * e) : std::log(-std::expm1(-e));
    }
    case LinkFamily::loglog:
      return -std::exp(-x);
    case LinkFamily::splogit:
    case LinkFamily::spt:
    case LinkFamily::spep:
      return sp_log_cdf(b, link, link.power(), x);
    case LinkFamily::plogit:
      return link.power() * logistic_log_cdf(x);
    case LinkFamily::altersplogit:
      return altersp_log_cdf(b, link, link.power(), x);
    case LinkFamily::stukel:
      return -softplus(-stukel_h(link.shape1(), link.shape2(), x));
    case LinkFamily::czado:
      return -softplus(-czado_h(link.shape1(), link.shape2(), x));
    case LinkFamily::gev:
      return gev_log_cdf(link.gev_shape(), x);
  }
  return 0.0;
}

double raw_log_sf(const LinkSpec& link, double x) {
  const Baseline b = baseline_of(link.family);
  switch (link.family) {
    case LinkFamily::logit:
      return logistic_log_cdf(-x);
    case LinkFamily::cloglog:
      return -std::exp(x);
    case LinkFamily::loglog: {
      const double e = std::exp(-x);
      return e < 1e-8 ? std::log(e - 0.5 * e * e) : std::log(-std::expm1(-e));
    }
    case LinkFamily::splogit:
    case LinkFamily::spt:
    case LinkFamily::spep:
      return sp_log_sf(b, link, link.power(), x);
    case LinkFamily::plogit: {
      const double r = link.power();
      const double u = r * logistic_log_cdf(x);
      return log1mexp_guarded(
          u, std::log(r) + base_log_neg_log_cdf(Baseline::logistic, link, x));
    }
    case LinkFamily::altersplogit:
      return altersp_log_sf(b, link, link.power(), x);
    case LinkFamily::stukel:
      return -softplus(stukel_h(link.shape1(), link.shape2(), x));
    case LinkFamily::czado:
      return -softplus(czado_h(link.shape1(), link.shape2(), x));
    case LinkFamily::gev:
      return gev_log_sf(link.gev_shape(), x);
  }
  return 0.0;
}

double raw_log_pdf(const LinkSpec& link, double x) {
  const Baseline b = baseline_of(link.family);
  switch (link.family) {
    case LinkFamily::logit:
      return logistic_log_pdf(x);
    case LinkFamily::cloglog:
      return x - std::exp(x);
    case LinkFamily::loglog:
      return -x - std::exp(-x);
    case LinkFamily::splogit:
    case LinkFamily::spt:
    case LinkFamily::spep:
      return sp_log_pdf(b, link, link.power(), x);
    case LinkFamily::plogit: {
      const double r = link.power();
      return std::log(r) + (r - 1.0) * logistic_log_cdf(x) + logistic_log_pdf(x);
    }
    case LinkFamily::altersplogit:
      return altersp_log_pdf(b, link, link.power(), x);
    case LinkFamily::stukel: {
      const double h = stukel_h(link.shape1(), link.shape2(), x);
      if (!std::isfinite(h)) return -kInf;
      return logistic_log_pdf(h) + stukel_log_dh(link.shape1(), link.shape2(), x);
    }
    case LinkFamily::czado: {
      const double h = czado_h(link.shape1(), link.shape2(), x);
      return logistic_log_pdf(h) + czado_log_dh(link.shape1(), link.shape2(), x);
    }
    case LinkFamily::gev:
      return gev_log_pdf(link.gev_shape(), x);
  }
  return 0.0;
}

// Golden-section maximization of the log density. The power families are
// searched on [-50,50] scaled by max(1,r); unimodality holds for every
// family in its admissible parameter range.
double numeric_mode(const LinkSpec& link) {
  double scale = 1.0;
  if (link.has_power())
    scale = std::max({1.0, link.power(), 1.0 / link.power()});
  double lo = -50.0 * scale;
  double hi = 50.0 * scale;
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - gr * (hi - lo);
  double d = lo + gr * (hi - lo);
  double fc = raw_log_pdf(link, c);
  double fd = raw_log_pdf(link, d);
  while (hi - lo > 1e-10) {
    if (fc > fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - gr * (hi - lo);
      fc = raw_log_pdf(link, c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + gr * (hi - lo);
      fd = raw_log_pdf(link, d);
    }
  }
  return 0.5 * (lo + hi);
}

double raw_mode(const LinkSpec& link) {
  switch (link.family) {
    case LinkFamily::logit:
    case LinkFamily::cloglog:
    case LinkFamily::loglog:
      return 0.0;
    case LinkFamily::splogit: {
      const double r = link.power();
      // F0(u*) = r/(r+1) gives u* = log r on the lower branch.
      if (r <= 1.0) return r * std::log(r);
      return std::log(r) / r;
    }
    case LinkFamily::plogit:
      return std::log(link.power());
    case LinkFamily::altersplogit: {
      const double r = link.power();
      if (r <= 1.0) return std::log(r) / r;
      return r * std::log(r);
    }
    case LinkFamily::gev: {
      const double xi = link.gev_shape();
      if (std::fabs(xi) < kXiZeroTol) return 0.0;
      if (xi <= -1.0) return -1.0 / xi;  // density diverges at the endpoint
      return std::expm1(-xi * std::log1p(xi)) / xi;  // ((1+xi)^{-xi} - 1)/xi
    }
    default:
      return numeric_mode(link);
  }
}

double raw_skewness(const LinkSpec& link) {
  switch (link.family) {
    case LinkFamily::logit:
      return 0.0;
    case LinkFamily::cloglog:
      return 2.0 / M_E - 1.0;
    case LinkFamily::loglog:
      return 1.0 - 2.0 / M_E;
    case LinkFamily::splogit: {
      const double r = link.power();
      if (r <= 1.0) return 1.0 - 2.0 * std::pow(r / (r + 1.0), r);
      return 2.0 * std::pow(1.0 / (r + 1.0), 1.0 / r) - 1.0;
    }
    case LinkFamily::plogit: {
      const double r = link.power();
      return 1.0 - 2.0 * std::pow(r / (r + 1.0), r);
    }
    case LinkFamily::altersplogit: {
      const double r = link.power();
      if (r <= 1.0) return 2.0 * std::pow(1.0 / (1.0 + r), 1.0 / r) - 1.0;
      return 1.0 - 2.0 * std::pow(r / (r + 1.0), r);
    }
    case LinkFamily::gev: {
      const double xi = link.gev_shape();
      if (xi <= -1.0) return -1.0;
      return 1.0 - 2.0 * std::exp(-(1.0 + xi));
    }
    default:
      return 1.0 - 2.0 * raw_cdf(link, raw_mode(link));
  }
}

double raw_quantile(const LinkSpec& link, double q) {
  switch (link.family) {
    case LinkFamily::logit:
      return logistic_quantile(q);
    case LinkFamily::cloglog:
      return std::log(-std::log1p(-q));
    case LinkFamily::loglog:
      return -std::log(-std::log(q));
    case LinkFamily::splogit: {
      const double r = link.power();
      if (r <= 1.0) return r * logistic_quantile(std::pow(q, 1.0 / r));
      return -logistic_quantile(std::pow(1.0 - q, r)) / r;
    }
    case LinkFamily::plogit:
      return logistic_quantile(std::pow(q, 1.0 / link.power()));
    case LinkFamily::altersplogit: {
      const double r = link.power();
      if (r <= 1.0) return -logistic_quantile(std::pow(1.0 - q, r)) / r;
      return r * logistic_quantile(std::pow(q, 1.0 / r));
    }
    case LinkFamily::gev:
      return gev_quantile(link.gev_shape(), q);
    default:
      break;
  }
  // Bracketed bisection on the monotone c.d.f.
  double lo = -1.0, hi = 1.0;
  if (link.has_power()) {
    const double s = std::max(1.0, link.power());
    lo *= s;
    hi *= s;
  }
  int guard = 0;
  while (raw_cdf(link, lo) > q) {
    lo *= 2.0;
    if (++guard > 1100) return -kInf;
  }
  guard = 0;
  while (raw_cdf(link, hi) < q) {
    hi *= 2.0;
    if (++guard > 1100) return kInf;  // saturating family never reaches q
  }
  for (int it = 0; it < 300; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double f = raw_cdf(link, mid);
    if (std::fabs(f - q) < 1e-13) return mid;
    (f < q ? lo : hi) = mid;
    if (hi - lo < 1e-14 * std::max(1.0, std::fabs(mid))) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

// ---------------------------------------------------------------------------
// LinkSpec

std::string to_string(LinkFamily family) {
  switch (family) {
    case LinkFamily::logit:
      return "logit";
    case LinkFamily::cloglog:
      return "cloglog";
    case LinkFamily::loglog:
      return "loglog";
    case LinkFamily::splogit:
      return "splogit";
    case LinkFamily::spt:
      return "spt";
    case LinkFamily::spep:
      return "spep";
    case LinkFamily::plogit:
      return "plogit";
    case LinkFamily::altersplogit:
      return "altersplogit";
    case LinkFamily::stukel:
      return "stukel";
    case LinkFamily::czado:
      return "czado";
    case LinkFamily::gev:
      return "gev";
  }
  return "?";
}

LinkFamily link_family_from_string(const std::string& name) {
  for (LinkFamily f :
       {LinkFamily::logit, LinkFamily::cloglog, LinkFamily::loglog,
        LinkFamily::splogit, LinkFamily::spt, LinkFamily::spep,
        LinkFamily::plogit, LinkFamily::altersplogit, LinkFamily::stukel,
        LinkFamily::czado, LinkFamily::gev}) {
    if (to_string(f) == name) return f;
  }
  throw std::invalid_argument("unknown link family: " + name);
}

LinkSpec LinkSpec::logit() { return LinkSpec{}; }
LinkSpec LinkSpec::cloglog() {
  LinkSpec s;
  s.family = LinkFamily::cloglog;
  return s;
}
LinkSpec LinkSpec::loglog() {
  LinkSpec s;
  s.family = LinkFamily::loglog;
  return s;
}

LinkSpec LinkSpec::splogit(double r) {
  LinkSpec s;
  s.family = LinkFamily::splogit;
  s.r = r;
  s.validate();
  return s;
}

LinkSpec LinkSpec::spt(double r, double nu) {
  LinkSpec s;
  s.family = LinkFamily::spt;
  s.r = r;
  s.nu = nu;
  s.validate();
  return s;
}

LinkSpec LinkSpec::spep(double r, double p) {
  LinkSpec s;
  s.family = LinkFamily::spep;
  s.r = r;
  s.p = p;
  s.validate();
  return s;
}

LinkSpec LinkSpec::plogit(double r) {
  LinkSpec s;
  s.family = LinkFamily::plogit;
  s.r = r;
  s.validate();
  return s;
}

LinkSpec LinkSpec::altersplogit(double r) {
  LinkSpec s;
  s.family = LinkFamily::altersplogit;
  s.r = r;
  s.validate();
  return s;
}

LinkSpec LinkSpec::stukel(double alpha1, double alpha2) {
  LinkSpec s;
  s.family = LinkFamily::stukel;
  s.alpha1 = alpha1;
  s.alpha2 = alpha2;
  s.validate();
  return s;
}

LinkSpec LinkSpec::czado(double alpha1, double alpha2) {
  LinkSpec s;
  s.family = LinkFamily::czado;
  s.alpha1 = alpha1;
  s.alpha2 = alpha2;
  s.validate();
  return s;
}

LinkSpec LinkSpec::gev(double xi, bool mirror) {
  LinkSpec s;
  s.family = LinkFamily::gev;
  s.xi = xi;
  s.mirror = mirror;
  s.validate();
  return s;
}

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument("LinkSpec: " + what);
}

}  // namespace

void LinkSpec::validate() const {
  const bool wants_r = family == LinkFamily::splogit || family == LinkFamily::spt ||
                       family == LinkFamily::spep || family == LinkFamily::plogit ||
                       family == LinkFamily::altersplogit;
  const bool wants_nu = family == LinkFamily::spt;
  const bool wants_p = family == LinkFamily::spep;
  const bool wants_alpha = family == LinkFamily::stukel || family == LinkFamily::czado;
  const bool wants_xi = family == LinkFamily::gev;

  require(wants_r == r.has_value(),
          wants_r ? "power parameter r required" : "r not applicable to " + to_string(family));
  require(wants_nu == nu.has_value(),
          wants_nu ? "degrees of freedom nu required" : "nu not applicable to " + to_string(family));
  require(wants_p == p.has_value(),
          wants_p ? "exponent p required" : "p not applicable to " + to_string(family));
  require(wants_alpha == (alpha1.has_value() && alpha2.has_value()) &&
              (wants_alpha || (!alpha1.has_value() && !alpha2.has_value())),
          wants_alpha ? "alpha1/alpha2 required" : "alpha not applicable to " + to_string(family));
  require(wants_xi == xi.has_value(),
          wants_xi ? "shape xi required" : "xi not applicable to " + to_string(family));

  if (r) require(*r > 0.0 && std::isfinite(*r), "r must be positive");
  if (nu) require(*nu > 0.0 && std::isfinite(*nu), "nu must be positive");
  if (p) require(*p >= 1.0 && *p <= 2.0, "p must be in [1,2]");
  if (alpha1) require(std::isfinite(*alpha1), "alpha1 must be finite");
  if (alpha2) require(std::isfinite(*alpha2), "alpha2 must be finite");
  if (xi) require(std::isfinite(*xi), "xi must be finite");
}

namespace {

double checked(const std::optional<double>& v, const char* name) {
  if (!v) throw std::logic_error(std::string("LinkSpec: parameter ") + name +
                                 " is not applicable to this family");
  return *v;
}

}  // namespace

double LinkSpec::power() const { return checked(r, "r"); }
double LinkSpec::dof() const { return checked(nu, "nu"); }
double LinkSpec::ep_exponent() const { return checked(p, "p"); }
double LinkSpec::shape1() const { return checked(alpha1, "alpha1"); }
double LinkSpec::shape2() const { return checked(alpha2, "alpha2"); }
double LinkSpec::gev_shape() const { return checked(xi, "xi"); }

bool LinkSpec::has_power() const { return r.has_value(); }

std::string LinkSpec::describe() const {
  std::string s = to_string(family);
  auto app = [&s](const char* n, const std::optional<double>& v) {
    if (v) s += std::string(" ") + n + "=" + std::to_string(*v);
  };
  app("r", r);
  app("nu", nu);
  app("p", p);
  app("alpha1", alpha1);
  app("alpha2", alpha2);
  app("xi", xi);
  if (mirror) s += " (mirrored)";
  return s;
}

// ---------------------------------------------------------------------------
// Public functions: thin wrappers applying the mirror reflection.

double cdf(const LinkSpec& link, double x) {
  link.validate();
  if (std::isnan(x)) throw std::invalid_argument("cdf: x is NaN");
  if (x == kInf) return 1.0;
  if (x == -kInf) return 0.0;
  if (link.mirror) return 1.0 - raw_cdf(link, -x);
  return raw_cdf(link, x);
}

double log_cdf(const LinkSpec& link, double x) {
  link.validate();
  if (std::isnan(x)) throw std::invalid_argument("log_cdf: x is NaN");
  if (x == kInf) return 0.0;
  if (x == -kInf) return -kInf;
  if (link.mirror) return raw_log_sf(link, -x);
  return raw_log_cdf(link, x);
}

double log_sf(const LinkSpec& link, double x) {
  link.validate();
  if (std::isnan(x)) throw std::invalid_argument("log_sf: x is NaN");
  if (x == kInf) return -kInf;
  if (x == -kInf) return 0.0;
  if (link.mirror) return raw_log_cdf(link, -x);
  return raw_log_sf(link, x);
}

double pdf(const LinkSpec& link, double x) { return std::exp(log_pdf(link, x)); }

double log_pdf(const LinkSpec& link, double x) {
  link.validate();
  if (std::isnan(x)) throw std::invalid_argument("log_pdf: x is NaN");
  if (!std::isfinite(x)) return -kInf;
  if (link.mirror) return raw_log_pdf(link, -x);
  return raw_log_pdf(link, x);
}

double mode(const LinkSpec& link) {
  link.validate();
  if (link.mirror) return -raw_mode(link);
  return raw_mode(link);
}

double skewness(const LinkSpec& link) {
  link.validate();
  if (link.mirror) return -raw_skewness(link);
  return raw_skewness(link);
}

double skewness_numeric(const LinkSpec& link) {
  link.validate();
  const double m = numeric_mode(link);
  const double g = 1.0 - 2.0 * raw_cdf(link, m);
  return link.mirror ? -g : g;
}

double quantile(const LinkSpec& link, double q) {
  link.validate();
  if (!(q > 0.0 && q < 1.0))
    throw std::domain_error("quantile: q must be in (0,1)");
  if (link.mirror) return -raw_quantile(link, 1.0 - q);
  return raw_quantile(link, q);
}

double stukel_transform(double alpha1, double alpha2, double eta) {
  if (std::isnan(eta)) throw std::invalid_argument("stukel_transform: eta is NaN");
  return stukel_h(alpha1, alpha2, eta);
}

double czado_transform(double alpha1, double alpha2, double eta) {
  if (std::isnan(eta)) throw std::invalid_argument("czado_transform: eta is NaN");
  return czado_h(alpha1, alpha2, eta);
}

}  // namespace flexlink
