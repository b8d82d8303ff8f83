#include "rcs/stats.hpp"

#include <algorithm>
#include <cmath>

#include "rcs/errors.hpp"

namespace rcs {

double pearson_r(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw ConfigError("pearson_r needs two equal-length vectors of size >= 2");
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, syy = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0.0 || syy == 0.0)
        throw ConfigError("pearson_r undefined: zero variance input");
    return sxy / std::sqrt(sxx * syy);
}

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw ConfigError("linear_fit needs two equal-length vectors of size >= 2");
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) throw ConfigError("linear_fit undefined: zero variance in x");
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double e = y[i] - (fit.slope * x[i] + fit.intercept);
        ss_res += e * e;
    }
    fit.r_squared = syy == 0.0 ? 1.0 : 1.0 - ss_res / syy;
    return fit;
}

double origin_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.empty())
        throw ConfigError("origin_slope needs two equal-length nonempty vectors");
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += x[i] * y[i];
        sxx += x[i] * x[i];
    }
    if (sxx == 0.0) throw ConfigError("origin_slope undefined: all-zero x");
    return sxy / sxx;
}

double kolmogorov_pvalue(double lambda) {
    if (lambda <= 0) return 1.0;
    double sum = 0.0;
    double sign = 1.0;
    for (int j = 1; j <= 100; ++j) {
        const double term = std::exp(-2.0 * j * j * lambda * lambda);
        sum += sign * term;
        sign = -sign;
        if (term < 1e-12) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_test_exponential(std::vector<double> samples) {
    if (samples.size() < 2) throw ConfigError("KS test needs >= 2 samples");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double cdf = 1.0 - std::exp(-std::max(samples[i], 0.0));
        d = std::max(d, std::abs(cdf - static_cast<double>(i) / n));
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - cdf));
    }
    KsResult r;
    r.statistic = d;
    const double sn = std::sqrt(n);
    r.p_value = kolmogorov_pvalue((sn + 0.12 + 0.11 / sn) * d);
    return r;
}

namespace {

// Regularized upper incomplete gamma Q(a, x), series/continued-fraction split.
double gamma_q(double a, double x) {
    if (x < 0 || a <= 0) throw ConfigError("gamma_q domain error");
    if (x == 0) return 1.0;
    if (x < a + 1.0) {
        // P(a,x) by series
        double ap = a, sum = 1.0 / a, del = sum;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::abs(del) < std::abs(sum) * 1e-14) break;
        }
        return 1.0 - sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
    // Q(a,x) by Lentz continued fraction
    double b = x + 1.0 - a, c = 1e308, d = 1.0 / b, h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < 1e-300) d = 1e-300;
        c = b + an / c;
        if (std::abs(c) < 1e-300) c = 1e-300;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-14) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double chi_squared_pvalue(double statistic, int dof) {
    if (dof < 1) throw ConfigError("chi_squared_pvalue needs dof >= 1");
    return gamma_q(dof / 2.0, statistic / 2.0);
}

}  // namespace rcs
