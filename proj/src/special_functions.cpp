#include "treelocate/special_functions.hpp"

#include "treelocate/error.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <vector>

namespace treelocate {

namespace {

constexpr double kSeriesCrossover = 4.0;
constexpr double kEps = std::numeric_limits<double>::epsilon();

double si_series(double x)
{
    const double x2 = x * x;
    double power = x; // x^{2k+1}/(2k+1)!
    double sum = x;
    for (int k = 1; k < 100; ++k) {
        power *= -x2 / ((2.0 * k) * (2.0 * k + 1.0));
        const double term = power / (2.0 * k + 1.0);
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum))
            break;
    }
    return sum;
}

double ci_series(double x)
{
    const double x2 = x * x;
    double power = 1.0; // (-1)^k x^{2k}/(2k)!
    double sum = 0.0;
    for (int k = 1; k < 100; ++k) {
        power *= -x2 / ((2.0 * k - 1.0) * (2.0 * k));
        const double term = power / (2.0 * k);
        sum += term;
        if (std::abs(term) < 1e-18 * (std::abs(sum) + 1.0))
            break;
    }
    return std::numbers::egamma + std::log(x) + sum;
}

// exp(ix) E1(ix) by the modified Lentz continued fraction; valid for x > ~2.
std::complex<double> scaled_e1_imaginary(double x)
{
    constexpr double tiny = 1e-300;
    std::complex<double> b(1.0, x);
    std::complex<double> c(1.0 / tiny, 0.0);
    std::complex<double> d = 1.0 / b;
    std::complex<double> h = d;
    for (int i = 2; i < 1000; ++i) {
        const double a = -static_cast<double>((i - 1) * (i - 1));
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        const std::complex<double> del = c * d;
        h *= del;
        if (std::abs(del.real() - 1.0) + std::abs(del.imag()) < 1e-16)
            break;
    }
    return h;
}

// Mills ratio R(z) = Phi(-z)/phi(z) by backward continued fraction, z >= ~5.
double mills_ratio(double z)
{
    double tail = z;
    for (int k = 80; k >= 1; --k)
        tail = z + k / tail;
    return 1.0 / tail;
}

} // namespace

double sine_integral(double x)
{
    if (x < 0.0)
        throw Error(ErrorKind::NegativeArgument, "Si requires x >= 0");
    if (x == 0.0)
        return 0.0;
    if (x <= kSeriesCrossover)
        return si_series(x);
    const std::complex<double> h = scaled_e1_imaginary(x);
    const std::complex<double> e1 = h * std::complex<double>(std::cos(x), -std::sin(x));
    return e1.imag() + std::numbers::pi / 2.0;
}

double cosine_integral(double x)
{
    if (!(x > 0.0))
        throw Error(ErrorKind::NonpositiveArgument, "Ci requires x > 0");
    if (x <= kSeriesCrossover)
        return ci_series(x);
    const std::complex<double> h = scaled_e1_imaginary(x);
    const std::complex<double> e1 = h * std::complex<double>(std::cos(x), -std::sin(x));
    return -e1.real();
}

double cisi_auxiliary_f(double x)
{
    if (x < 0.0)
        throw Error(ErrorKind::NegativeArgument, "auxiliary f requires x >= 0");
    if (x == 0.0)
        return std::numbers::pi / 2.0;
    if (x <= kSeriesCrossover)
        return ci_series(x) * std::sin(x) + (std::numbers::pi / 2.0 - si_series(x)) * std::cos(x);
    return -scaled_e1_imaginary(x).imag();
}

double normal_cdf(double x)
{
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double scaled_normal_tail(double z)
{
    if (z < 20.0)
        return normal_cdf(-z) * std::exp(0.5 * z * z);
    return mills_ratio(z) / std::sqrt(2.0 * std::numbers::pi);
}

double log_simplex_laplace(std::span<const double> y)
{
    const std::size_t k = y.size();
    if (k == 0)
        throw Error(ErrorKind::EmptyRates, "simplex average over zero coordinates");
    for (double v : y)
        if (!(v >= 0.0) || !std::isfinite(v))
            throw Error(ErrorKind::NegativeArgument, "simplex Laplace argument must be finite and >= 0");

    const auto [lo_it, hi_it] = std::minmax_element(y.begin(), y.end());
    const double lo = *lo_it;
    const double spread = *hi_it - lo;
    if (k == 1 || spread == 0.0)
        return -lo;

    std::vector<double> z(y.begin(), y.end());
    for (double& v : z)
        v -= lo;
    std::sort(z.begin(), z.end());

    // Divided-difference closed form; accepted only when the alternating sum
    // is well conditioned (no clustered coordinates).
    bool distinct = true;
    for (std::size_t i = 1; i < k; ++i)
        distinct = distinct && z[i] > z[i - 1];
    if (distinct) {
        const double log_factorial = std::lgamma(static_cast<double>(k));
        double sum = 0.0;
        double abs_sum = 0.0;
        double max_log = -std::numeric_limits<double>::infinity();
        std::vector<double> log_mag(k);
        std::vector<int> sign(k);
        for (std::size_t i = 0; i < k; ++i) {
            double lm = -z[i];
            int s = 1;
            for (std::size_t j = 0; j < k; ++j) {
                if (j == i)
                    continue;
                const double diff = z[j] - z[i];
                lm -= std::log(std::abs(diff));
                if (diff < 0.0)
                    s = -s;
            }
            log_mag[i] = lm + log_factorial;
            sign[i] = s;
            max_log = std::max(max_log, log_mag[i]);
        }
        for (std::size_t i = 0; i < k; ++i) {
            const double m = std::exp(log_mag[i] - max_log);
            sum += sign[i] * m;
            abs_sum += m;
        }
        if (sum > 0.0 && abs_sum <= 1e3 * sum)
            return -lo + max_log + std::log(sum);
    }

    // Positive series: shift by the largest coordinate so every term is
    // nonnegative.  With zeta_j = (y_max - y_j)/spread in [0, 1],
    //   E exp(-<U,z>) = exp(-L) (k-1)! sum_n L^n h_n(zeta) / (n+k-1)!,
    // h_n the complete homogeneous symmetric polynomial, L = spread.
    std::vector<double> zeta(k);
    for (std::size_t j = 0; j < k; ++j)
        zeta[j] = (spread - z[j]) / spread;

    // b[j] holds (k-1)! L^n h_n(zeta_1..zeta_j) / (n+k-1)!, rescaled by exp(-offset).
    std::vector<double> b(k + 1, 1.0);
    double offset = 0.0;
    double total = b[k];
    const double big = 1e200;
    const std::size_t max_terms = static_cast<std::size_t>(spread + 40.0 * std::sqrt(spread) + 4.0 * k + 200.0);
    for (std::size_t n = 1; n < max_terms; ++n) {
        const double step = spread / static_cast<double>(n + k - 1);
        b[0] = 0.0;
        for (std::size_t j = 1; j <= k; ++j)
            b[j] = b[j - 1] + zeta[j - 1] * step * b[j];
        total += b[k];
        if (b[k] > big || total > big) {
            for (double& v : b)
                v /= big;
            total /= big;
            offset += std::log(big);
        }
        if (static_cast<double>(n) > spread && b[k] < kEps * 1e-2 * total)
            break;
    }
    return -lo - spread + offset + std::log(total);
}

} // namespace treelocate
