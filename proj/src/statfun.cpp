#include "t2qc/statfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "t2qc/errors.hpp"

namespace t2qc {

namespace {

// Series expansion of P(a,x), valid for x < a + 1.
double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int n = 0; n < 500; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for Q(a,x) (modified Lentz), valid for x >= a + 1.
double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 500; ++i) {
        double an = -double(i) * (double(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

// Acklam's rational approximation refined by one Halley step; used only to
// seed chi2_quantile iterations. Takes p in (0.5, 1), returns positive z.
double normal_quantile_abs(double p) {
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    double x;
    if (p < 0.97575) {
        double q = p - 0.5, r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    double e = 0.5 * std::erfc(-x * 0.7071067811865475244) - p;
    double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
    return x - u / (1.0 + 0.5 * x * u);
}

}  // namespace

double gamma_p(double a, double x) {
    if (a <= 0.0) throw NumericError("gamma_p: shape must be positive");
    if (x < 0.0) throw NumericError("gamma_p: x must be nonnegative");
    if (x == 0.0) return 0.0;
    return x < a + 1.0 ? gamma_p_series(a, x) : 1.0 - gamma_q_cf(a, x);
}

double gamma_q(double a, double x) {
    if (a <= 0.0) throw NumericError("gamma_q: shape must be positive");
    if (x < 0.0) throw NumericError("gamma_q: x must be nonnegative");
    if (x == 0.0) return 1.0;
    return x < a + 1.0 ? 1.0 - gamma_p_series(a, x) : gamma_q_cf(a, x);
}

double chi2_cdf(double x, double df) {
    if (x <= 0.0) return 0.0;
    return gamma_p(0.5 * df, 0.5 * x);
}

double chi2_sf(double x, double df) {
    if (x <= 0.0) return 1.0;
    return gamma_q(0.5 * df, 0.5 * x);
}

double chi2_quantile(double prob, double df) {
    if (!(prob > 0.0 && prob < 1.0))
        throw NumericError("chi2_quantile: prob must lie in (0,1)");
    if (df <= 0.0) throw NumericError("chi2_quantile: df must be positive");
    // Wilson-Hilferty start, then safeguarded Newton on the CDF.
    double z = prob < 0.5 ? -normal_quantile_abs(1.0 - prob)
                          : normal_quantile_abs(prob);
    double t = 1.0 - 2.0 / (9.0 * df) + z * std::sqrt(2.0 / (9.0 * df));
    double x = df * t * t * t;
    if (x <= 0.0) x = 1e-8;
    double lo = 0.0, hi = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 200; ++it) {
        double f = chi2_cdf(x, df) - prob;
        if (f > 0.0)
            hi = x;
        else
            lo = x;
        double a = 0.5 * df;
        double logpdf = -0.5 * x + (a - 1.0) * std::log(x) - a * std::log(2.0) -
                        std::lgamma(a);
        double step = f / std::exp(logpdf);
        double next = x - step;
        if (!(next > lo && next < hi))
            next = std::isinf(hi) ? 2.0 * x : 0.5 * (lo + hi);
        if (std::fabs(next - x) <= 1e-14 * std::max(1.0, x)) return next;
        x = next;
    }
    return x;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z * 0.7071067811865475244); }

double normal_sf(double z) { return 0.5 * std::erfc(z * 0.7071067811865475244); }

double empirical_quantile_ceil(std::vector<double> sample, double q) {
    if (sample.empty()) throw DataError("empirical quantile of empty sample");
    if (!(q > 0.0 && q <= 1.0))
        throw DataError("empirical quantile level must lie in (0,1]");
    std::size_t k = std::size_t(std::ceil(q * double(sample.size())));
    if (k < 1) k = 1;
    if (k > sample.size()) k = sample.size();
    std::nth_element(sample.begin(), sample.begin() + (k - 1), sample.end());
    return sample[k - 1];
}

double ks_distance(std::vector<double> sample, double (*cdf)(double, double),
                   double cdf_param) {
    if (sample.empty()) throw DataError("ks distance of empty sample");
    std::sort(sample.begin(), sample.end());
    const double n = double(sample.size());
    double dist = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        double f = cdf(sample[i], cdf_param);
        dist = std::max(dist, std::fabs(f - double(i) / n));
        dist = std::max(dist, std::fabs(double(i + 1) / n - f));
    }
    return dist;
}

}  // namespace t2qc
