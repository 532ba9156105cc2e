#pragma once

// i.i.d. Rayleigh channel realizations, log-det capacity of a row subset,
// and the two per-realization artificial capacity bounds:
//   beamforming bound  sum of the L largest log2(1 + rho * ||row_i||^2)
//   MRC bound          sum over columns of log2(1 + rho * top-L |H_ih|^2 sum)

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rascap/random.hpp"

namespace rascap {

/// Which artificial bound applies: the beamforming bound when L <= N_t,
/// the MRC bound when L > N_t.
enum class Regime { Bub, Mub };

const char* to_string(Regime r);
Regime regime_from_string(const std::string& s);

double db_to_linear(double db);

struct SystemConfig {
  int n_t = 1;
  int n_r = 1;
  int l = 1;
  /// Normalized SNR (linear), the per-antenna SNR divided by L.
  double rho_bar = 1.0;

  static SystemConfig from_db(int n_t, int n_r, int l, double snr_db);

  /// Throws std::invalid_argument unless 1 <= l <= n_r, n_t >= 1 and
  /// rho_bar > 0.
  void validate() const;
  Regime regime() const { return l <= n_t ? Regime::Bub : Regime::Mub; }

  bool operator==(const SystemConfig&) const = default;
};

/// Signals a Gram matrix that failed Cholesky factorization. This cannot
/// happen for I + rho H H^dagger in exact arithmetic.
class NotPositiveDefinite : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class ChannelMatrix {
public:
  ChannelMatrix() = default;
  explicit ChannelMatrix(Eigen::MatrixXcd h) : h_(std::move(h)) {}

  int n_r() const { return static_cast<int>(h_.rows()); }
  int n_t() const { return static_cast<int>(h_.cols()); }
  const Eigen::MatrixXcd& matrix() const { return h_; }

  double row_gain(int i) const { return h_.row(i).squaredNorm(); }
  std::vector<double> row_gains() const;
  double entry_gain(int i, int j) const { return std::norm(h_(i, j)); }

  /// Submatrix made of the given rows, in the given order.
  ChannelMatrix select_rows(std::span<const int> rows) const;

private:
  Eigen::MatrixXcd h_;
};

/// Entries CN(0,1): real and imaginary parts independent N(0, 1/2).
/// Deterministic in (dimensions, stream).
ChannelMatrix sample_channel(const SystemConfig& cfg, std::uint64_t seed);
ChannelMatrix sample_channel(const SystemConfig& cfg, Philox4x32& rng);

enum class GramForm {
  Auto,     // the smaller of the two
  Rows,     // I_L + rho H H^dagger
  Columns,  // I_Nt + rho H^dagger H
};

/// log2 det(I + rho_bar H H^dagger) via Cholesky of the chosen Gram form.
double capacity(const ChannelMatrix& h, double rho_bar,
                GramForm form = GramForm::Auto);
double capacity(const ChannelMatrix& h, std::span<const int> rows,
                double rho_bar);

double bub_of_channel(const ChannelMatrix& h, const SystemConfig& cfg);
double mub_of_channel(const ChannelMatrix& h, const SystemConfig& cfg);

/// Bound matching the requested regime.
double bound_of_channel(const ChannelMatrix& h, const SystemConfig& cfg,
                        Regime regime);

namespace detail {

/// log2 det of a Hermitian positive-definite n x n matrix stored
/// column-major in `a`; `a` is overwritten by its Cholesky factor.
double log2det_hpd(std::complex<double>* a, int n);

}  // namespace detail

}  // namespace rascap
