#pragma once

namespace edumine::special {

/// Regularized incomplete beta I_x(a, b) for a, b > 0 and x in [0, 1],
/// evaluated by the modified Lentz continued fraction. Relative accuracy
/// is around 1e-14 away from the extreme tails.
double incomplete_beta(double a, double b, double x);

/// Upper tail P(F > f) of Fisher's F distribution with (d1, d2) degrees of
/// freedom. Returns 1 for f <= 0 and 0 for f = +inf.
double f_upper_tail(double f, double d1, double d2);

}  // namespace edumine::special
