#include "cachenet/special.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace cachenet {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kEps = 1e-16;
constexpr int kMaxTerms = 600;

// Regularized series: P(a, x) = x^a e^{-x} / Γ(a) · Σ_n x^n / (a (a+1) ... (a+n)).
double lower_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n < kMaxTerms; ++n) {
        term *= x / (a + n);
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * kEps) break;
    }
    return sum * std::exp(a * std::log(x) - x);
}

// Upper tail Γ(a, x) by the modified Lentz continued fraction.
double upper_cf(double a, double x) {
    const double tiny = std::numeric_limits<double>::min() / kEps;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kMaxTerms; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < kEps) break;
    }
    return h * std::exp(a * std::log(x) - x);
}

}  // namespace

double lower_incomplete_gamma(double a, double x) {
    if (!(a > 0.0)) throw std::invalid_argument("lower_incomplete_gamma: a must be > 0");
    if (x < 0.0) throw std::invalid_argument("lower_incomplete_gamma: x must be >= 0");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return lower_series(a, x);
    // For x >= a + 1 the lower tail holds more than half the mass, so the
    // subtraction from Γ(a) stays well conditioned.
    return std::tgamma(a) - upper_cf(a, x);
}

double gamma_reflection_product(double u) {
    if (!(u > 0.0 && u < 1.0))
        throw std::invalid_argument("gamma_reflection_product: u must be in (0, 1)");
    return kPi * u / std::sin(kPi * u);
}

}  // namespace cachenet
