#pragma once

namespace cachenet {

// Lower incomplete gamma function γ(a, x) = ∫₀ˣ t^{a-1} e^{-t} dt for a > 0,
// x ≥ 0. Series expansion for x < a + 1, modified-Lentz continued fraction of
// the upper tail otherwise. Relative error below 1e-10 over the ranges used
// here (a in (1, 10], x in [0, ~100]).
double lower_incomplete_gamma(double a, double x);

// Γ(1 + u)·Γ(1 - u) = πu / sin(πu) for u in (0, 1). Evaluated through the
// reflection identity so the u → 1 pole is approached without cancellation
// between two large gamma values.
double gamma_reflection_product(double u);

}  // namespace cachenet
