#pragma once

// Special functions, adaptive quadrature and a radix-2 FFT shared by the
// statistical modules. Everything here is pure and re-entrant.

#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

namespace rascap {

using cdouble = std::complex<double>;

inline constexpr double kLn2 = 0.69314718055994530942;

/// Raised when adaptive quadrature cannot reach the requested tolerance
/// within its panel/segment budget.
class QuadratureError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct QuadratureSpec {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  /// Semi-infinite integrals are truncated once |f| stays below
  /// tail_cutoff * (running peak of |f|) for two consecutive panels.
  double tail_cutoff = 1e-16;

  void validate() const;
};

/// Uniformly sampled complex sequence. As FFT input the length must be a
/// power of two.
struct ComplexSeries {
  double start = 0.0;
  double step = 1.0;
  std::vector<cdouble> values;
};

/// Q(a, x) = e^{-x} sum_{k<a} x^k / k!, the survival function of a
/// Gamma(a, 1) variable (chi-squared with 2a degrees of freedom, halved).
double regularized_upper_gamma(int a, double x);

/// Density of Gamma(a, 1) at x; zero for x < 0.
double gamma_density(int a, double x);

/// Solves Q(a, u) = p for u >= 0. Newton iteration on log Q with a
/// bisection safeguard over [0, a + 40 sqrt(a)] (widened if p is below the
/// bracket's tail mass).
double inverse_survival_threshold(int a, double p);

/// Adaptive Gauss-Kronrod (7/15) integration on a finite interval.
double integrate(const std::function<double(double)>& f, double lower,
                 double upper, const QuadratureSpec& spec = {});

/// Integral of f over [lower, inf). The upper limit is found by scanning
/// geometrically growing panels until the tail criterion of `spec` holds.
double integrate_semi_infinite(const std::function<double(double)>& f,
                               double lower, const QuadratureSpec& spec = {});

/// Complex-valued adaptive quadrature; the error of the real and imaginary
/// parts is controlled jointly through the modulus.
cdouble integrate_complex(const std::function<cdouble(double)>& f,
                          double lower, double upper,
                          const QuadratureSpec& spec = {});

bool is_power_of_two(std::size_t n);

/// Unnormalized forward DFT, X_k = sum_n x_n e^{-j 2 pi k n / N}.
/// The output is indexed by bin: start = 0, step = 2 pi / (N * in.step).
ComplexSeries fft_forward(const ComplexSeries& series);

/// Inverse DFT carrying the 1/N factor; step is mapped back so that
/// fft_inverse(fft_forward(s)) reproduces s (start included).
ComplexSeries fft_inverse(const ComplexSeries& spectrum, double start = 0.0);

/// Standard normal CDF.
double normal_cdf(double z);

}  // namespace rascap
