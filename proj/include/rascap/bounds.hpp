#pragma once

// Asymptotic laws of the two capacity bounds.
//
// Beamforming bound (L <= N_t): the sum of the top-L values of
// log2(1 + rho * gamma_i), gamma_i ~ Gamma(N_t, 1), is a trimmed sum and is
// approximated by a normal law with trimmed-sum mean and variance.
//
// MRC bound (L > N_t): each column's top-L sum of unit exponentials is
// approximated by N(mu_t, sigma_t^2) with closed-form moments; the bound is
// a sum of N_t i.i.d. terms log2(1 + rho * t), whose density is recovered by
// inverting the N_t-th power of the per-term characteristic function.

#include <complex>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "rascap/channel.hpp"
#include "rascap/numerics.hpp"

namespace rascap {

struct GaussianApprox {
  double mu = 0.0;
  double sigma_sq = 0.0;
  /// Trimming threshold in gain units: Q(N_t, u) = L / N_r for the
  /// beamforming bound, ln(N_r / L) for the MRC bound.
  double u = 0.0;
  Regime regime = Regime::Bub;

  double sigma() const;
};

/// Uniform table of a density and its CDF on x0, x0 + dx, ...
struct DensityGrid {
  double x0 = 0.0;
  double dx = 1.0;
  std::vector<double> pdf;
  std::vector<double> cdf;

  std::size_t size() const { return pdf.size(); }
  double x(std::size_t i) const { return x0 + dx * static_cast<double>(i); }
  /// Linear interpolation of the tabulated CDF; 0 left of the grid and the
  /// last knot's value right of it.
  double cdf_at(double x) const;
  double mass() const;
  double mean() const;
  double variance() const;
  /// Checks the mass, monotonicity and range invariants; throws
  /// std::runtime_error describing the first violation.
  void validate() const;
};

/// Samples of the characteristic function at omega = -omega_max + i * step,
/// i = 0..n_samples-1, step = 2 omega_max / n_samples.
struct CharacteristicGrid {
  double omega_max = 0.0;
  std::size_t n_samples = 0;
  std::vector<cdouble> values;
  /// Frequency beyond which |value| fell below the sampling cutoff and the
  /// samples were set to zero.
  double omega_cutoff = 0.0;

  double step() const { return 2.0 * omega_max / static_cast<double>(n_samples); }
  double omega(std::size_t i) const { return -omega_max + step() * static_cast<double>(i); }
};

/// |CF| at the Nyquist edge is too large for the chosen grid.
class AliasingError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Beamforming bound, trimmed-sum normal law. Moments use the integrated by
/// parts expansion (a boundary term plus N_t quadratures per moment).
GaussianApprox bub_gaussian(const SystemConfig& cfg,
                            const QuadratureSpec& spec = {});

/// Same law from direct quadrature of the moment integrals against the
/// Gamma(N_t, 1) density. Kept as an independent route for cross-checking.
GaussianApprox bub_gaussian_direct(const SystemConfig& cfg,
                                   const QuadratureSpec& spec = {});

class NormalLaw {
public:
  /// Throws std::domain_error for sigma_sq <= 0 (a point mass has no density).
  explicit NormalLaw(const GaussianApprox& approx);

  double mean() const { return mu_; }
  double sigma() const { return sigma_; }
  double pdf(double x) const;
  double cdf(double x) const;
  /// Tabulates over mean +/- 8 sigma.
  DensityGrid tabulate(std::size_t points = 4097) const;

private:
  double mu_;
  double sigma_;
};

NormalLaw bub_density(const GaussianApprox& approx);

/// Closed-form MRC moments: mu_t = L (1 + ln(N_r/L)),
/// sigma_t^2 = L (2 - L/N_r), u = ln(N_r/L).
GaussianApprox mub_moments(const SystemConfig& cfg);

/// Per-column characteristic function
/// int_0^inf exp(j w log2(1 + rho x)) N(x; mu_t, sigma_t^2) dx.
cdouble mub_characteristic(const SystemConfig& cfg, const GaussianApprox& approx,
                           double omega, const QuadratureSpec& spec = {});

/// The same value through the substitution t = (x - mu_t)/sigma_t,
/// (rho sigma_t)^zeta / sqrt(2 pi) * int (t + a)^zeta e^{-t^2/2} dt with
/// zeta = j w / ln 2 and a = (1 + rho mu_t) / (rho sigma_t).
cdouble mub_characteristic_substituted(const SystemConfig& cfg,
                                       const GaussianApprox& approx,
                                       double omega,
                                       const QuadratureSpec& spec = {});

struct ErgodicMoments {
  double mean = 0.0;
  double variance = 0.0;
};

/// N_t times the mean and variance of log2(1 + rho t) with t under the
/// (unrenormalized) truncated normal, by quadrature.
ErgodicMoments mub_quadrature_moments(const SystemConfig& cfg,
                                      const GaussianApprox& approx,
                                      const QuadratureSpec& spec = {});

struct DensitySampling {
  std::size_t n_samples = std::size_t{1} << 14;
  /// CF samples below this modulus (two in a row) end the frequency scan.
  double cf_cutoff = 1e-8;
  /// |CF| allowed at the Nyquist edge before AliasingError.
  double alias_tolerance = 1e-6;
  /// Capacity axis [x_min, x_max]; defaults to [0, mean + span_sigmas * sd].
  double span_sigmas = 12.0;
  std::optional<double> x_min;
  std::optional<double> x_max;
};

/// CF of the full MRC bound, [per-column CF]^{N_t}, on the frequency grid
/// dual to a capacity axis of n_samples points spaced dx.
CharacteristicGrid mub_characteristic_grid(const SystemConfig& cfg,
                                           const GaussianApprox& approx,
                                           double dx,
                                           const DensitySampling& sampling,
                                           const QuadratureSpec& spec = {});

inline constexpr double kRippleTolerance = 1e-6;

/// FFT inversion of a characteristic grid onto x0 + n dx, dx = pi/omega_max.
/// Negative Gibbs ripple down to -kRippleTolerance * max(1, peak pdf) is
/// clamped to zero; anything lower throws.
DensityGrid invert_characteristic(const CharacteristicGrid& cf, double x0);

DensityGrid mub_density(const SystemConfig& cfg, const QuadratureSpec& spec = {},
                        const DensitySampling& sampling = {});
DensityGrid mub_density(const SystemConfig& cfg, const GaussianApprox& approx,
                        const QuadratureSpec& spec,
                        const DensitySampling& sampling);

/// Mean and variance of an asymptotic bound. The normal law passes through;
/// a density grid is reduced by discrete moments.
ErgodicMoments asymptotic_ergodic(const GaussianApprox& approx);
ErgodicMoments asymptotic_ergodic(const DensityGrid& grid);

}  // namespace rascap
