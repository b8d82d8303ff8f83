#pragma once

#include <span>
#include <vector>

namespace rcs {

// Pearson product-moment coefficient; throws ConfigError on zero variance.
double pearson_r(std::span<const double> x, std::span<const double> y);

struct LinearFit {
    double slope = 0;
    double intercept = 0;
    double r_squared = 0;
};
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

// Least-squares slope of a line through the origin.
double origin_slope(std::span<const double> x, std::span<const double> y);

// One-sample Kolmogorov-Smirnov test against Exponential(1).
struct KsResult {
    double statistic = 0;
    double p_value = 0;
};
KsResult ks_test_exponential(std::vector<double> samples);

// Asymptotic Kolmogorov tail probability at effective statistic lambda.
double kolmogorov_pvalue(double lambda);

// Upper-tail p-value of a chi-square statistic.
double chi_squared_pvalue(double statistic, int dof);

}  // namespace rcs
