#pragma once

#include <span>

namespace treelocate {

/// Si(x) = \int_0^x sin(u)/u du, x >= 0.
double sine_integral(double x);
/// Ci(x) = gamma + ln x + \int_0^x (cos u - 1)/u du, x > 0.
double cosine_integral(double x);

/// Auxiliary function f(x) = \int_0^inf e^{-xu}/(1+u^2) du
///                        = Ci(x) sin x + (pi/2 - Si(x)) cos x,  x >= 0.
/// Computed without the cancellation the Ci/Si form suffers for large x.
double cisi_auxiliary_f(double x);

/// Standard normal c.d.f.
double normal_cdf(double x);
/// Phi(-z) * exp(z^2 / 2), finite for all z.
double scaled_normal_tail(double z);

/// log E[exp(-<U, y>)] with U uniform on the (k-1)-simplex, y >= 0.
///
/// This is (k-1)! times the divided difference of exp(-x) at y_1..y_k, up to
/// sign. It is the common kernel of the hypoexponential density and of
/// conditional Laplace transforms of exponential sums; evaluated stably for
/// repeated or clustered entries.
double log_simplex_laplace(std::span<const double> y);

} // namespace treelocate
