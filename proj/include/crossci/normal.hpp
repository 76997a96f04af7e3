#ifndef CROSSCI_NORMAL_HPP
#define CROSSCI_NORMAL_HPP

namespace crossci {

/// Standard normal density.
double norm_pdf(double x);

/// Standard normal CDF, computed through erfc so that both tails keep
/// full relative accuracy.
double norm_cdf(double x);

/// Inverse of norm_cdf on (0, 1). Wichura's PPND16 rational
/// approximation followed by one Halley step; accurate to the last ulp
/// over the usable double range.
double norm_quantile(double p);

/// Two-sided critical value: norm_quantile(1 - alpha/2).
double critical_value(double alpha);

} // namespace crossci

#endif
