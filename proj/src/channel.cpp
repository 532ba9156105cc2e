#include "rascap/channel.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "rascap/numerics.hpp"

namespace rascap {

const char* to_string(Regime r) { return r == Regime::Bub ? "bub" : "mub"; }

Regime regime_from_string(const std::string& s) {
  if (s == "bub") return Regime::Bub;
  if (s == "mub") return Regime::Mub;
  throw std::invalid_argument("unknown regime '" + s + "' (expected bub|mub)");
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

SystemConfig SystemConfig::from_db(int n_t, int n_r, int l, double snr_db) {
  SystemConfig cfg{n_t, n_r, l, db_to_linear(snr_db)};
  cfg.validate();
  return cfg;
}

void SystemConfig::validate() const {
  if (n_t < 1) throw std::invalid_argument("SystemConfig: n_t must be >= 1");
  if (n_r < 1) throw std::invalid_argument("SystemConfig: n_r must be >= 1");
  if (l < 1 || l > n_r) {
    throw std::invalid_argument("SystemConfig: need 1 <= l <= n_r (l=" +
                                std::to_string(l) + ", n_r=" +
                                std::to_string(n_r) + ")");
  }
  if (!(rho_bar > 0.0) || !std::isfinite(rho_bar)) {
    throw std::invalid_argument("SystemConfig: rho_bar must be positive");
  }
}

std::vector<double> ChannelMatrix::row_gains() const {
  std::vector<double> g(static_cast<std::size_t>(n_r()));
  for (int i = 0; i < n_r(); ++i) g[i] = row_gain(i);
  return g;
}

ChannelMatrix ChannelMatrix::select_rows(std::span<const int> rows) const {
  Eigen::MatrixXcd sub(static_cast<Eigen::Index>(rows.size()), h_.cols());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const int r = rows[k];
    if (r < 0 || r >= n_r()) {
      throw std::out_of_range("select_rows: row index out of range");
    }
    sub.row(static_cast<Eigen::Index>(k)) = h_.row(r);
  }
  return ChannelMatrix(std::move(sub));
}

ChannelMatrix sample_channel(const SystemConfig& cfg, Philox4x32& rng) {
  cfg.validate();
  const double scale = std::sqrt(0.5);
  Eigen::MatrixXcd h(cfg.n_r, cfg.n_t);
  for (int i = 0; i < cfg.n_r; ++i) {
    for (int j = 0; j < cfg.n_t; ++j) {
      const double re = rng.normal() * scale;
      const double im = rng.normal() * scale;
      h(i, j) = {re, im};
    }
  }
  return ChannelMatrix(std::move(h));
}

ChannelMatrix sample_channel(const SystemConfig& cfg, std::uint64_t seed) {
  Philox4x32 rng(seed, 0);
  return sample_channel(cfg, rng);
}

namespace detail {

double log2det_hpd(std::complex<double>* a, int n) {
  // In-place lower Cholesky, column-major: a[i + j*n].
  double logdet = 0.0;
  for (int j = 0; j < n; ++j) {
    double d = a[j + j * n].real();
    for (int k = 0; k < j; ++k) d -= std::norm(a[j + k * n]);
    if (!(d > 0.0)) {
      throw NotPositiveDefinite(
          "capacity: Gram matrix is not positive definite (corrupted input?)");
    }
    const double ljj = std::sqrt(d);
    a[j + j * n] = ljj;
    logdet += std::log(d);
    for (int i = j + 1; i < n; ++i) {
      std::complex<double> s = a[i + j * n];
      for (int k = 0; k < j; ++k) s -= a[i + k * n] * std::conj(a[j + k * n]);
      a[i + j * n] = s / ljj;
    }
  }
  return logdet / kLn2;
}

}  // namespace detail

double capacity(const ChannelMatrix& h, double rho_bar, GramForm form) {
  if (!(rho_bar >= 0.0)) throw std::invalid_argument("capacity: rho_bar < 0");
  if (h.n_r() == 0) throw std::invalid_argument("capacity: empty row subset");
  if (form == GramForm::Auto) {
    form = h.n_r() <= h.n_t() ? GramForm::Rows : GramForm::Columns;
  }
  const auto& m = h.matrix();
  Eigen::MatrixXcd gram = form == GramForm::Rows
                              ? Eigen::MatrixXcd(m * m.adjoint())
                              : Eigen::MatrixXcd(m.adjoint() * m);
  gram *= rho_bar;
  gram.diagonal().array() += 1.0;
  return detail::log2det_hpd(gram.data(), static_cast<int>(gram.rows()));
}

double capacity(const ChannelMatrix& h, std::span<const int> rows,
                double rho_bar) {
  return capacity(h.select_rows(rows), rho_bar);
}

namespace {

void check_dims(const ChannelMatrix& h, const SystemConfig& cfg) {
  cfg.validate();
  if (h.n_r() != cfg.n_r || h.n_t() != cfg.n_t) {
    throw std::invalid_argument("channel dimensions do not match SystemConfig");
  }
}

}  // namespace

double bub_of_channel(const ChannelMatrix& h, const SystemConfig& cfg) {
  check_dims(h, cfg);
  std::vector<double> g = h.row_gains();
  std::partial_sort(g.begin(), g.begin() + cfg.l, g.end(), std::greater<>());
  double sum = 0.0;
  for (int i = 0; i < cfg.l; ++i) sum += std::log2(1.0 + cfg.rho_bar * g[i]);
  return sum;
}

double mub_of_channel(const ChannelMatrix& h, const SystemConfig& cfg) {
  check_dims(h, cfg);
  std::vector<double> col(static_cast<std::size_t>(cfg.n_r));
  double total = 0.0;
  for (int j = 0; j < cfg.n_t; ++j) {
    for (int i = 0; i < cfg.n_r; ++i) col[i] = h.entry_gain(i, j);
    std::partial_sort(col.begin(), col.begin() + cfg.l, col.end(),
                      std::greater<>());
    double top = 0.0;
    for (int i = 0; i < cfg.l; ++i) top += col[i];
    total += std::log2(1.0 + cfg.rho_bar * top);
  }
  return total;
}

double bound_of_channel(const ChannelMatrix& h, const SystemConfig& cfg,
                        Regime regime) {
  return regime == Regime::Bub ? bub_of_channel(h, cfg) : mub_of_channel(h, cfg);
}

}  // namespace rascap
