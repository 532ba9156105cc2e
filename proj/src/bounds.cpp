#include "rascap/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>

namespace rascap {

namespace {

// x^k e^{-x} / k!, stable for large k and x.
double poisson_term(int k, double x) {
  if (k == 0) return std::exp(-x);
  if (x <= 0.0) return 0.0;
  return std::exp(k * std::log(x) - x - std::lgamma(k + 1.0));
}

// Trimmed-sum normal law from the raw moments
//   mu = N_r int_u g f,  m2 = N_r int_u g^2 f.
// The variance uses the conditional (centered) variance of g above the
// threshold and the threshold mapped through g.
GaussianApprox trimmed_law(const SystemConfig& cfg, double u, double mu,
                           double m2) {
  const double l = cfg.l;
  const double frac = l / cfg.n_r;
  const double cond_mean = mu / l;
  const double cond_var = std::max(0.0, m2 / l - cond_mean * cond_mean);
  const double g_u = std::log2(1.0 + cfg.rho_bar * u);
  const double gap = g_u - cond_mean;
  GaussianApprox a;
  a.mu = mu;
  a.sigma_sq = l * (cond_var + gap * gap * (1.0 - frac));
  a.u = u;
  a.regime = Regime::Bub;
  return a;
}

double bub_threshold(const SystemConfig& cfg) {
  return inverse_survival_threshold(cfg.n_t, static_cast<double>(cfg.l) / cfg.n_r);
}

}  // namespace

double GaussianApprox::sigma() const { return std::sqrt(std::max(0.0, sigma_sq)); }

GaussianApprox bub_gaussian(const SystemConfig& cfg, const QuadratureSpec& spec) {
  cfg.validate();
  const double rho = cfg.rho_bar;
  const double n_r = cfg.n_r;
  const double u = bub_threshold(cfg);
  const double q_u = regularized_upper_gamma(cfg.n_t, u);
  const double g_u = std::log2(1.0 + rho * u);

  // Integration by parts against d(-Q(N_t, x)), Q = sum_k x^k e^{-x}/k!.
  double first = 0.0;
  double second = 0.0;
  for (int k = 0; k < cfg.n_t; ++k) {
    first += integrate_semi_infinite(
        [&](double x) { return poisson_term(k, x) / (1.0 + rho * x); }, u, spec);
    second += integrate_semi_infinite(
        [&](double x) {
          return poisson_term(k, x) * std::log2(1.0 + rho * x) / (1.0 + rho * x);
        },
        u, spec);
  }
  const double mu = n_r * g_u * q_u + rho / kLn2 * n_r * first;
  const double m2 = n_r * g_u * g_u * q_u + 2.0 * rho / kLn2 * n_r * second;
  return trimmed_law(cfg, u, mu, m2);
}

GaussianApprox bub_gaussian_direct(const SystemConfig& cfg,
                                   const QuadratureSpec& spec) {
  cfg.validate();
  const double rho = cfg.rho_bar;
  const int n_t = cfg.n_t;
  const double u = bub_threshold(cfg);
  const double mu = cfg.n_r * integrate_semi_infinite(
                                  [&](double x) {
                                    return std::log2(1.0 + rho * x) *
                                           gamma_density(n_t, x);
                                  },
                                  u, spec);
  const double m2 = cfg.n_r * integrate_semi_infinite(
                                  [&](double x) {
                                    const double g = std::log2(1.0 + rho * x);
                                    return g * g * gamma_density(n_t, x);
                                  },
                                  u, spec);
  return trimmed_law(cfg, u, mu, m2);
}

NormalLaw::NormalLaw(const GaussianApprox& approx) : mu_(approx.mu) {
  if (!(approx.sigma_sq > 0.0)) {
    throw std::domain_error("normal law: sigma_sq must be > 0 (degenerate point mass)");
  }
  sigma_ = std::sqrt(approx.sigma_sq);
}

double NormalLaw::pdf(double x) const {
  const double z = (x - mu_) / sigma_;
  return std::exp(-0.5 * z * z) / (sigma_ * std::sqrt(2.0 * std::numbers::pi));
}

double NormalLaw::cdf(double x) const { return normal_cdf((x - mu_) / sigma_); }

DensityGrid NormalLaw::tabulate(std::size_t points) const {
  if (points < 2) throw std::invalid_argument("tabulate: need at least 2 points");
  DensityGrid g;
  g.x0 = mu_ - 8.0 * sigma_;
  g.dx = 16.0 * sigma_ / static_cast<double>(points - 1);
  g.pdf.resize(points);
  g.cdf.resize(points);
  for (std::size_t i = 0; i < points; ++i) {
    g.pdf[i] = pdf(g.x(i));
    g.cdf[i] = cdf(g.x(i));
  }
  return g;
}

NormalLaw bub_density(const GaussianApprox& approx) { return NormalLaw(approx); }

double DensityGrid::cdf_at(double x) const {
  if (cdf.empty() || x < x0) return 0.0;
  const double pos = (x - x0) / dx;
  const auto i = static_cast<std::size_t>(pos);
  if (i + 1 >= cdf.size()) return cdf.back();
  const double t = pos - static_cast<double>(i);
  return cdf[i] + t * (cdf[i + 1] - cdf[i]);
}

double DensityGrid::mass() const {
  double s = 0.0;
  for (double p : pdf) s += p;
  return s * dx;
}

double DensityGrid::mean() const {
  double s = 0.0, w = 0.0;
  for (std::size_t i = 0; i < pdf.size(); ++i) {
    s += x(i) * pdf[i];
    w += pdf[i];
  }
  return s / w;
}

double DensityGrid::variance() const {
  const double m = mean();
  double s = 0.0, w = 0.0;
  for (std::size_t i = 0; i < pdf.size(); ++i) {
    const double d = x(i) - m;
    s += d * d * pdf[i];
    w += pdf[i];
  }
  return s / w;
}

void DensityGrid::validate() const {
  if (pdf.empty() || pdf.size() != cdf.size()) {
    throw std::runtime_error("DensityGrid: empty or mismatched tables");
  }
  if (!(dx > 0.0)) throw std::runtime_error("DensityGrid: dx must be > 0");
  const double m = mass();
  if (std::abs(m - 1.0) > 1e-3) {
    throw std::runtime_error("DensityGrid: mass " + std::to_string(m) +
                             " is not within 1e-3 of 1");
  }
  for (std::size_t i = 0; i < pdf.size(); ++i) {
    if (pdf[i] < 0.0) throw std::runtime_error("DensityGrid: negative pdf entry");
    if (i > 0 && cdf[i] < cdf[i - 1]) {
      throw std::runtime_error("DensityGrid: cdf decreases");
    }
  }
  if (cdf.back() < 1.0 - 1e-3 || cdf.back() > 1.0) {
    throw std::runtime_error("DensityGrid: final cdf " + std::to_string(cdf.back()) +
                             " outside [1-1e-3, 1]");
  }
}

GaussianApprox mub_moments(const SystemConfig& cfg) {
  cfg.validate();
  const double l = cfg.l;
  const double n_r = cfg.n_r;
  GaussianApprox a;
  a.u = std::log(n_r / l);
  a.mu = l * (1.0 + a.u);
  a.sigma_sq = l * (2.0 - l / n_r);
  a.regime = Regime::Mub;
  return a;
}

namespace {

// Integration window for the per-column normal. Below mu - 10 sigma the
// normal mass is < 1e-23; narrowing the window keeps very small sigma from
// hiding between quadrature nodes.
std::pair<double, double> normal_window(const GaussianApprox& a) {
  const double s = a.sigma();
  return {std::max(0.0, a.mu - 10.0 * s), a.mu + 10.0 * s};
}

}  // namespace

cdouble mub_characteristic(const SystemConfig& cfg, const GaussianApprox& approx,
                           double omega, const QuadratureSpec& spec) {
  const double rho = cfg.rho_bar;
  const NormalLaw law(approx);
  const auto [lo, hi] = normal_window(approx);
  return integrate_complex(
      [&](double x) {
        return std::polar(law.pdf(x), omega * std::log2(1.0 + rho * x));
      },
      lo, hi, spec);
}

cdouble mub_characteristic_substituted(const SystemConfig& cfg,
                                       const GaussianApprox& approx,
                                       double omega,
                                       const QuadratureSpec& spec) {
  const double rho = cfg.rho_bar;
  const double sigma = approx.sigma();
  if (!(sigma > 0.0)) throw std::domain_error("characteristic: sigma must be > 0");
  const cdouble zeta(0.0, omega / kLn2);
  const double a = (1.0 + rho * approx.mu) / (rho * sigma);
  const double t_lo = std::max(-approx.mu / sigma, -10.0);
  // t + a > 0 on the whole range, so (t + a)^zeta = exp(zeta ln(t + a)).
  const cdouble f = integrate_complex(
      [&](double t) { return std::exp(zeta * std::log(t + a) - 0.5 * t * t); },
      t_lo, 10.0, spec);
  return std::exp(zeta * std::log(rho * sigma)) * f /
         std::sqrt(2.0 * std::numbers::pi);
}

ErgodicMoments mub_quadrature_moments(const SystemConfig& cfg,
                                      const GaussianApprox& approx,
                                      const QuadratureSpec& spec) {
  const double rho = cfg.rho_bar;
  const NormalLaw law(approx);
  const auto [lo, hi] = normal_window(approx);
  const double m1 = integrate(
      [&](double x) { return std::log2(1.0 + rho * x) * law.pdf(x); }, lo, hi, spec);
  // Centered second moment; avoids cancellation for small sigma.
  const double var = integrate(
      [&](double x) {
        const double d = std::log2(1.0 + rho * x) - m1;
        return d * d * law.pdf(x);
      },
      lo, hi, spec);
  return {cfg.n_t * m1, cfg.n_t * var};
}

CharacteristicGrid mub_characteristic_grid(const SystemConfig& cfg,
                                           const GaussianApprox& approx,
                                           double dx,
                                           const DensitySampling& sampling,
                                           const QuadratureSpec& spec) {
  const std::size_t n = sampling.n_samples;
  if (!is_power_of_two(n) || n < 4) {
    throw std::invalid_argument("mub density: n_samples must be a power of two >= 4");
  }
  if (!(dx > 0.0)) throw std::invalid_argument("mub density: dx must be > 0");
  CharacteristicGrid cf;
  cf.n_samples = n;
  cf.omega_max = std::numbers::pi / dx;
  cf.values.assign(n, cdouble{});
  const double step = cf.step();
  const std::size_t half = n / 2;

  auto power = [&](cdouble v) {
    cdouble r = 1.0;
    for (int h = 0; h < cfg.n_t; ++h) r *= v;
    return r;
  };

  int quiet = 0;
  std::size_t k = 0;
  for (; k <= half; ++k) {
    const cdouble v = power(mub_characteristic(cfg, approx, step * k, spec));
    if (k == half) {
      if (std::abs(v) > sampling.alias_tolerance) {
        throw AliasingError(
            "mub density: |CF| = " + std::to_string(std::abs(v)) +
            " at the Nyquist edge; increase omega_max or samples");
      }
      // The -omega_max sample; its value is below tolerance and kept.
      cf.values[0] = std::conj(v);
      break;
    }
    cf.values[half + k] = v;
    if (k > 0) cf.values[half - k] = std::conj(v);
    if (std::abs(v) < sampling.cf_cutoff) {
      if (++quiet == 2) break;
    } else {
      quiet = 0;
    }
  }
  cf.omega_cutoff = step * static_cast<double>(std::min(k, half));
  return cf;
}

DensityGrid invert_characteristic(const CharacteristicGrid& cf, double x0) {
  const std::size_t n = cf.n_samples;
  const std::size_t half = n / 2;
  const double step = cf.step();
  const double dx = std::numbers::pi / cf.omega_max;

  // p(x0 + m dx) = (step / 2 pi) sum_k CF(w_k) e^{-j w_k x0} e^{-j 2 pi k m / N}
  ComplexSeries series;
  series.step = step;
  series.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double w = cf.omega(i);
    const std::size_t bin = (i + half) % n;  // k = i - N/2, taken mod N
    series.values[bin] = cf.values[i] * std::polar(1.0, -w * x0);
  }
  const ComplexSeries spectrum = fft_forward(series);
  const double scale = step / (2.0 * std::numbers::pi);

  DensityGrid g;
  g.x0 = x0;
  g.dx = dx;
  g.pdf.resize(n);
  g.cdf.resize(n);
  double lowest = 0.0;
  double peak = 0.0;
  for (std::size_t m = 0; m < n; ++m) {
    const double p = spectrum.values[m].real() * scale;
    lowest = std::min(lowest, p);
    peak = std::max(peak, p);
    g.pdf[m] = std::max(0.0, p);
  }
  // Ripple is measured against unit peak height; sharper densities get a
  // proportionally larger allowance.
  const double allowance = kRippleTolerance * std::max(1.0, peak);
  if (lowest < -allowance) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "mub density: negative ripple %.3g exceeds the -%.3g allowance",
                  lowest, allowance);
    throw std::runtime_error(buf);
  }
  double acc = 0.0;
  g.cdf[0] = 0.0;
  for (std::size_t m = 1; m < n; ++m) {
    acc += 0.5 * (g.pdf[m - 1] + g.pdf[m]) * dx;
    g.cdf[m] = std::min(acc, 1.0);
  }
  return g;
}

DensityGrid mub_density(const SystemConfig& cfg, const QuadratureSpec& spec,
                        const DensitySampling& sampling) {
  return mub_density(cfg, mub_moments(cfg), spec, sampling);
}

DensityGrid mub_density(const SystemConfig& cfg, const GaussianApprox& approx,
                        const QuadratureSpec& spec,
                        const DensitySampling& sampling) {
  cfg.validate();
  const ErgodicMoments est = mub_quadrature_moments(cfg, approx, spec);
  const double sd = std::sqrt(est.variance);
  const double x0 = sampling.x_min.value_or(0.0);
  const double x1 = sampling.x_max.value_or(est.mean + sampling.span_sigmas * sd);
  if (!(x1 > x0)) throw std::invalid_argument("mub density: empty capacity axis");
  const double dx = (x1 - x0) / static_cast<double>(sampling.n_samples);
  const CharacteristicGrid cf = mub_characteristic_grid(cfg, approx, dx, sampling, spec);
  DensityGrid g = invert_characteristic(cf, x0);
  g.validate();
  return g;
}

ErgodicMoments asymptotic_ergodic(const GaussianApprox& approx) {
  return {approx.mu, approx.sigma_sq};
}

ErgodicMoments asymptotic_ergodic(const DensityGrid& grid) {
  return {grid.mean(), grid.variance()};
}

}  // namespace rascap
