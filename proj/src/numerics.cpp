#include "rascap/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <queue>
#include <string>

namespace rascap {

namespace {

// Gauss-Kronrod 7/15 abscissae and weights (QUADPACK qk15).
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

constexpr std::size_t kMaxSegments = 20000;
constexpr int kMaxPanels = 256;

double magnitude(double v) { return std::abs(v); }
double magnitude(const cdouble& v) { return std::abs(v); }

template <class T>
struct Segment {
  double a = 0.0;
  double b = 0.0;
  T value{};
  double err = 0.0;
  double fmax = 0.0;
};

template <class T, class F>
Segment<T> gk15(const F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const T fc = f(center);
  T kronrod = fc * kWgk[7];
  T gauss = fc * kWg[3];
  double fmax = magnitude(fc);
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const T f1 = f(center - dx);
    const T f2 = f(center + dx);
    fmax = std::max({fmax, magnitude(f1), magnitude(f2)});
    const T sum = f1 + f2;
    kronrod += sum * kWgk[j];
    if (j % 2 == 1) gauss += sum * kWg[j / 2];
  }
  Segment<T> s;
  s.a = a;
  s.b = b;
  s.value = kronrod * half;
  s.err = magnitude((kronrod - gauss) * half);
  s.fmax = fmax;
  return s;
}

template <class T>
struct ByError {
  bool operator()(const Segment<T>& x, const Segment<T>& y) const {
    return x.err < y.err;
  }
};

// Global adaptive bisection: always split the segment with the largest
// error estimate until the summed estimate meets the tolerance.
template <class T, class F>
T refine(const F& f, std::vector<Segment<T>> segments,
         const QuadratureSpec& spec) {
  std::priority_queue<Segment<T>, std::vector<Segment<T>>, ByError<T>> heap(
      ByError<T>{}, std::move(segments));
  T total{};
  double err = 0.0;
  std::vector<Segment<T>> frozen;
  {
    auto copy = heap;
    while (!copy.empty()) {
      total += copy.top().value;
      err += copy.top().err;
      copy.pop();
    }
  }
  std::size_t count = heap.size();
  while (err > std::max(spec.abs_tol, spec.rel_tol * magnitude(total))) {
    if (heap.empty()) {
      throw QuadratureError("quadrature: tolerance unreachable (roundoff floor " +
                            std::to_string(err) + ")");
    }
    if (count >= kMaxSegments) {
      throw QuadratureError("quadrature: segment budget exhausted, error " +
                            std::to_string(err));
    }
    Segment<T> worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b) ||
        (worst.b - worst.a) < 1e-13 * std::max(1.0, std::abs(mid))) {
      frozen.push_back(worst);
      continue;
    }
    Segment<T> left = gk15<T>(f, worst.a, mid);
    Segment<T> right = gk15<T>(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    err += left.err + right.err - worst.err;
    heap.push(left);
    heap.push(right);
    ++count;
  }
  // Re-sum to shed accumulated cancellation from the incremental updates.
  T exact{};
  while (!heap.empty()) {
    exact += heap.top().value;
    heap.pop();
  }
  for (const auto& s : frozen) exact += s.value;
  return exact;
}

template <class T, class F>
T integrate_finite(const F& f, double lower, double upper,
                   const QuadratureSpec& spec) {
  spec.validate();
  if (!(std::isfinite(lower) && std::isfinite(upper))) {
    throw std::domain_error("integrate: limits must be finite");
  }
  if (lower == upper) return T{};
  if (lower > upper) return -integrate_finite<T>(f, upper, lower, spec);
  // A few initial panels so narrow features are not missed by one rule.
  constexpr int kInitial = 8;
  std::vector<Segment<T>> segments;
  segments.reserve(kInitial);
  const double w = (upper - lower) / kInitial;
  for (int i = 0; i < kInitial; ++i) {
    const double a = lower + w * i;
    const double b = (i + 1 == kInitial) ? upper : lower + w * (i + 1);
    segments.push_back(gk15<T>(f, a, b));
  }
  return refine<T>(f, std::move(segments), spec);
}

}  // namespace

void QuadratureSpec::validate() const {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0) || !(tail_cutoff > 0.0)) {
    throw std::invalid_argument(
        "QuadratureSpec: abs_tol, rel_tol and tail_cutoff must be positive");
  }
}

double regularized_upper_gamma(int a, double x) {
  if (a < 1) throw std::domain_error("regularized_upper_gamma: a must be >= 1");
  if (!(x >= 0.0)) {
    throw std::domain_error("regularized_upper_gamma: x must be >= 0");
  }
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  if (x < a) {
    // 1 - P(a, x) with the lower series P = e^{-x} x^a/a! sum_n x^n/((a+1)..(a+n)),
    // which keeps Q monotone and accurate where it is close to 1.
    double term = 1.0;
    double series = 1.0;
    for (int n = 1; n < 10000; ++n) {
      term *= x / (a + n);
      series += term;
      if (term < series * 1e-17) break;
    }
    const double p = std::exp(a * std::log(x) - x - std::lgamma(a + 1.0)) * series;
    return std::clamp(1.0 - p, 0.0, 1.0);
  }
  double sum = 0.0;
  if (x < 600.0) {
    double term = std::exp(-x);
    sum = term;
    for (int k = 1; k < a; ++k) {
      term *= x / k;
      sum += term;
    }
  } else {
    const double lx = std::log(x);
    for (int k = 0; k < a; ++k) {
      sum += std::exp(k * lx - x - std::lgamma(k + 1.0));
    }
  }
  return std::min(sum, 1.0);
}

double gamma_density(int a, double x) {
  if (a < 1) throw std::domain_error("gamma_density: a must be >= 1");
  if (x < 0.0) return 0.0;
  if (x == 0.0) return a == 1 ? 1.0 : 0.0;
  return std::exp((a - 1) * std::log(x) - x - std::lgamma(static_cast<double>(a)));
}

double inverse_survival_threshold(int a, double p) {
  if (a < 1) throw std::domain_error("inverse_survival_threshold: a must be >= 1");
  if (!(p > 0.0 && p <= 1.0)) {
    throw std::domain_error("inverse_survival_threshold: p must lie in (0, 1]");
  }
  if (p == 1.0) return 0.0;

  double lo = 0.0;
  double hi = a + 40.0 * std::sqrt(static_cast<double>(a));
  while (regularized_upper_gamma(a, hi) > p) {
    lo = hi;
    hi *= 2.0;
  }
  const double log_p = std::log(p);
  double u = std::clamp(static_cast<double>(a), lo, hi);
  for (int iter = 0; iter < 400; ++iter) {
    const double q = regularized_upper_gamma(a, u);
    if (q > p) {
      lo = u;
    } else {
      hi = u;
    }
    double next = 0.5 * (lo + hi);
    const double dens = gamma_density(a, u);
    if (q > 0.0 && dens > 0.0) {
      // Newton on h(u) = ln Q(a,u) - ln p, with h'(u) = -f(u) / Q(a,u).
      const double newton = u + (std::log(q) - log_p) * q / dens;
      if (newton > lo && newton < hi) next = newton;
    }
    const double step = std::abs(next - u);
    u = next;
    if (step <= 1e-15 * std::max(1.0, u) || hi - lo <= 1e-15 * std::max(1.0, hi)) {
      break;
    }
  }
  return u;
}

double integrate(const std::function<double(double)>& f, double lower,
                 double upper, const QuadratureSpec& spec) {
  return integrate_finite<double>(f, lower, upper, spec);
}

cdouble integrate_complex(const std::function<cdouble(double)>& f,
                          double lower, double upper,
                          const QuadratureSpec& spec) {
  return integrate_finite<cdouble>(f, lower, upper, spec);
}

double integrate_semi_infinite(const std::function<double(double)>& f,
                               double lower, const QuadratureSpec& spec) {
  spec.validate();
  if (!std::isfinite(lower)) {
    throw std::domain_error("integrate_semi_infinite: lower must be finite");
  }
  std::vector<Segment<double>> panels;
  double a = lower;
  double width = 1.0;
  double peak = 0.0;
  int quiet = 0;
  for (int i = 0; i < kMaxPanels; ++i) {
    Segment<double> s = gk15<double>(f, a, a + width);
    peak = std::max(peak, s.fmax);
    panels.push_back(s);
    if (peak > 0.0 && s.fmax < spec.tail_cutoff * peak) {
      if (++quiet == 2) return refine<double>(f, std::move(panels), spec);
    } else {
      quiet = 0;
    }
    a += width;
    width *= 2.0;
    if (!std::isfinite(a + width)) break;
  }
  if (peak == 0.0) return 0.0;
  throw QuadratureError(
      "integrate_semi_infinite: integrand does not decay within the panel budget");
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

namespace {

void fft_in_place(std::vector<cdouble>& x, bool inverse) {
  const std::size_t n = x.size();
  if (!is_power_of_two(n)) {
    throw std::invalid_argument("fft: length must be a power of two, got " +
                                std::to_string(n));
  }
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(x[i], x[j]);
  }
  // Twiddles taken directly from polar form, not by recurrence.
  const double sign = inverse ? 1.0 : -1.0;
  std::vector<cdouble> twiddle(n / 2);
  for (std::size_t k = 0; k < n / 2; ++k) {
    twiddle[k] = std::polar(1.0, sign * 2.0 * std::numbers::pi * k / n);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t stride = n / len;
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < len / 2; ++k) {
        const cdouble t = twiddle[k * stride] * x[i + k + len / 2];
        x[i + k + len / 2] = x[i + k] - t;
        x[i + k] += t;
      }
    }
  }
}

}  // namespace

ComplexSeries fft_forward(const ComplexSeries& series) {
  if (!(series.step > 0.0)) throw std::invalid_argument("fft: step must be > 0");
  ComplexSeries out;
  out.values = series.values;
  fft_in_place(out.values, false);
  const auto n = static_cast<double>(series.values.size());
  out.start = 0.0;
  out.step = 2.0 * std::numbers::pi / (n * series.step);
  return out;
}

ComplexSeries fft_inverse(const ComplexSeries& spectrum, double start) {
  if (!(spectrum.step > 0.0)) throw std::invalid_argument("fft: step must be > 0");
  ComplexSeries out;
  out.values = spectrum.values;
  fft_in_place(out.values, true);
  const auto n = static_cast<double>(spectrum.values.size());
  for (auto& v : out.values) v /= n;
  out.start = start;
  out.step = 2.0 * std::numbers::pi / (n * spectrum.step);
  return out;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

}  // namespace rascap
