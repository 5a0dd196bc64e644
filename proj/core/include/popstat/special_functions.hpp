#pragma once

namespace popstat::special {

/// Regularized incomplete beta I_x(a, b) for a, b > 0 and x in [0, 1].
///
/// Evaluated with the modified Lentz continued fraction on whichever of
/// I_x(a, b) and 1 - I_{1-x}(b, a) converges faster (x < (a+1)/(a+b+2)).
double regularized_incomplete_beta(double a, double b, double x);

/// CDF of Student's t with `df` > 0 degrees of freedom.
double student_t_cdf(double t, double df);

/// Two-sided tail probability P(|T| >= |t|).
double student_t_two_sided(double t, double df);

/// Standard normal CDF.
double normal_cdf(double z);

/// Inverse standard normal CDF for p in (0, 1). Acklam's rational
/// approximation polished with one Halley step (|error| < 1e-14).
double normal_quantile(double p);

}  // namespace popstat::special
