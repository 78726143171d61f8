#pragma once

#include <optional>
#include <string>

namespace flexlink {

enum class LinkFamily {
  logit,
  cloglog,
  loglog,
  splogit,
  spt,
  spep,
  plogit,
  altersplogit,
  stukel,
  czado,
  gev,
};

std::string to_string(LinkFamily family);
LinkFamily link_family_from_string(const std::string& name);

// Algebraic description of a link: family tag plus the shape parameters that
// apply to it. Accessing a parameter a family does not have is an error.
//
// The power families use the symmetric power construction
//   F(x,r) = F0^r(x/r)                 for 0 < r <= 1,
//   F(x,r) = 1 - F0^{1/r}(-r x)        for r > 1,
// with baseline F0 = logistic (splogit), Student t (spt) or exponential
// power (spep). plogit is the one-sided power link F0^r(x) and altersplogit
// swaps the two branches above. The gev family is the GEV c.d.f.
// exp[-(1 + xi x)_+^{-1/xi}] with mu = 0, sigma = 1.
//
// `mirror` selects the reflected member 1 - F(-x) of whichever family is
// chosen. It exists for the Wang-Dey form of the gev regression model,
// p = 1 - G(-eta), whose xi = 0 member is the cloglog link.
struct LinkSpec {
  LinkFamily family = LinkFamily::logit;
  bool mirror = false;

  std::optional<double> r;       // power parameter, > 0
  std::optional<double> nu;      // Student t degrees of freedom, > 0
  std::optional<double> p;       // exponential power exponent, in [1,2]
  std::optional<double> alpha1;  // Stukel / Czado upper-tail shape
  std::optional<double> alpha2;  // Stukel / Czado lower-tail shape
  std::optional<double> xi;      // GEV shape

  static LinkSpec logit();
  static LinkSpec cloglog();
  static LinkSpec loglog();
  static LinkSpec splogit(double r);
  static LinkSpec spt(double r, double nu);
  static LinkSpec spep(double r, double p);
  static LinkSpec plogit(double r);
  static LinkSpec altersplogit(double r);
  static LinkSpec stukel(double alpha1, double alpha2);
  static LinkSpec czado(double alpha1, double alpha2);
  static LinkSpec gev(double xi, bool mirror = false);

  // Throws std::invalid_argument on out-of-range or missing/extraneous
  // shape parameters.
  void validate() const;

  // Checked accessors; throw std::logic_error when not applicable.
  double power() const;
  double dof() const;
  double ep_exponent() const;
  double shape1() const;
  double shape2() const;
  double gev_shape() const;

  bool has_power() const;
  std::string describe() const;
};

// Distribution functions of the link c.d.f. F. x may be +-infinity.
double cdf(const LinkSpec& link, double x);
double log_cdf(const LinkSpec& link, double x);
double log_sf(const LinkSpec& link, double x);
double pdf(const LinkSpec& link, double x);
double log_pdf(const LinkSpec& link, double x);

// Global maximizer of the density. Closed form where available
// (logit/cloglog/loglog/splogit/plogit/altersplogit/gev), golden-section on
// the log density otherwise.
double mode(const LinkSpec& link);

// Arnold-Groeneveld skewness 1 - 2 F(mode), in [-1,1]. Closed form for the
// logistic power families, cloglog, loglog and gev; mode-based numeric
// computation for the rest. For gev with xi <= -1 the density diverges at
// the upper support endpoint and the skewness is -1 by convention.
double skewness(const LinkSpec& link);

// Mode-based numeric route regardless of family, for cross-checks.
double skewness_numeric(const LinkSpec& link);

// Inverse c.d.f. for q in (0,1). Closed form for
// logit/cloglog/loglog/splogit/plogit/altersplogit/gev, bracketed
// root-finding for spt/spep/stukel/czado. Saturates to +-infinity where the
// family's c.d.f. never reaches q (possible for czado with negative shape).
double quantile(const LinkSpec& link, double q);

// Stukel's piecewise transform h_alpha of the linear predictor; the Stukel
// link c.d.f. is logistic(h_alpha(eta)). Branches switch to the alpha -> 0
// limit when |alpha| < 1e-8.
double stukel_transform(double alpha1, double alpha2, double eta);

// Czado's two-sided power transform; the link c.d.f. is
// logistic(h_alpha(eta)).
double czado_transform(double alpha1, double alpha2, double eta);

}  // namespace flexlink
