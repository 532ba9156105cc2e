#pragma once

// Independent reference routines for tests. Nothing here calls into the
// library code paths being checked.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

/// Composite Simpson in long double with n (even) panels.
inline double simpson(const std::function<long double(long double)>& f,
                      long double a, long double b, int n = 200000) {
  const long double h = (b - a) / n;
  long double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + h * i) * ((i % 2) ? 4.0L : 2.0L);
  return static_cast<double>(s * h / 3.0L);
}

/// Gamma(a, 1) density computed in long double.
inline long double gamma_pdf(int a, long double x) {
  if (x <= 0) return (a == 1 && x == 0) ? 1.0L : 0.0L;
  return std::exp((a - 1) * std::log(x) - x - std::lgamma(static_cast<long double>(a)));
}

/// Survival of Gamma(a,1) by Simpson over [x, x + 60 + 20a].
inline double gamma_survival(int a, double x) {
  return simpson([a](long double t) { return gamma_pdf(a, t); }, x, x + 60.0 + 20.0 * a);
}

/// O(N^2) DFT with the e^{-j 2 pi k n / N} convention.
inline std::vector<std::complex<double>> naive_dft(
    const std::vector<std::complex<double>>& x) {
  const std::size_t n = x.size();
  std::vector<std::complex<double>> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<long double> s = 0;
    for (std::size_t m = 0; m < n; ++m) {
      const long double ang = -2.0L * std::numbers::pi_v<long double> *
                              static_cast<long double>((k * m) % n) / n;
      s += std::complex<long double>(x[m].real(), x[m].imag()) *
           std::complex<long double>(std::cos(ang), std::sin(ang));
    }
    out[k] = {static_cast<double>(s.real()), static_cast<double>(s.imag())};
  }
  return out;
}

/// All k-subsets of {0..n-1} in lexicographic order.
inline std::vector<std::vector<int>> all_subsets(int n, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  std::function<void(int)> rec = [&](int start) {
    if (static_cast<int>(cur.size()) == k) {
      out.push_back(cur);
      return;
    }
    for (int i = start; i < n; ++i) {
      cur.push_back(i);
      rec(i + 1);
      cur.pop_back();
    }
  };
  rec(0);
  return out;
}

}  // namespace oracle
