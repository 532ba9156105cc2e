#include "rascap/selection.hpp"

#include <algorithm>
#include <complex>
#include <limits>
#include <numeric>
#include <string>

namespace rascap {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

const char* to_string(SelectionMethod m) {
  return m == SelectionMethod::Exhaustive ? "exhaustive" : "greedy";
}

std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  // result * (n - k + i) / i stays exact because C(n-k+i, i) is an integer.
  unsigned __int128 result = 1;
  for (int i = 1; i <= k; ++i) {
    result = result * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
    if (result > std::numeric_limits<std::uint64_t>::max()) {
      return std::numeric_limits<std::uint64_t>::max();
    }
  }
  return static_cast<std::uint64_t>(result);
}

SelectionResult exhaustive_select(const ChannelMatrix& h,
                                  const SystemConfig& cfg,
                                  std::uint64_t budget) {
  cfg.validate();
  if (h.n_r() != cfg.n_r || h.n_t() != cfg.n_t) {
    throw std::invalid_argument("exhaustive_select: dimension mismatch");
  }
  const std::uint64_t count = binomial(cfg.n_r, cfg.l);
  if (count > budget) {
    throw IntractableError("exhaustive_select: C(" + std::to_string(cfg.n_r) +
                           ", " + std::to_string(cfg.l) + ") = " +
                           std::to_string(count) +
                           " subsets exceeds the budget of " +
                           std::to_string(budget) + "; use greedy_select");
  }

  const int n_r = cfg.n_r;
  const int n_t = cfg.n_t;
  const int l = cfg.l;
  const double rho = cfg.rho_bar;
  const MatrixXcd& m = h.matrix();
  const bool row_form = l <= n_t;
  const int dim = row_form ? l : n_t;

  // Row form uses entries of H H^dagger; column form sums the per-row outer
  // products h_i^dagger h_i.
  MatrixXcd gram;
  std::vector<MatrixXcd> outer;
  if (row_form) {
    gram = m * m.adjoint();
  } else {
    outer.reserve(static_cast<std::size_t>(n_r));
    for (int i = 0; i < n_r; ++i) {
      outer.emplace_back(m.row(i).adjoint() * m.row(i));
    }
  }

  std::vector<int> idx(static_cast<std::size_t>(l));
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<std::complex<double>> scratch(static_cast<std::size_t>(dim * dim));
  SelectionResult best;
  best.capacity = -std::numeric_limits<double>::infinity();

  while (true) {
    if (row_form) {
      for (int c = 0; c < l; ++c) {
        for (int r = 0; r < l; ++r) {
          scratch[r + c * dim] = rho * gram(idx[r], idx[c]);
        }
        scratch[c + c * dim] += 1.0;
      }
    } else {
      std::fill(scratch.begin(), scratch.end(), std::complex<double>{});
      for (int s : idx) {
        const MatrixXcd& o = outer[s];
        for (int k = 0; k < dim * dim; ++k) scratch[k] += o.data()[k];
      }
      for (auto& v : scratch) v *= rho;
      for (int c = 0; c < dim; ++c) scratch[c + c * dim] += 1.0;
    }
    const double value = detail::log2det_hpd(scratch.data(), dim);
    if (value > best.capacity) {
      best.capacity = value;
      best.subset = idx;
    }
    // Next combination in lexicographic order.
    int pos = l - 1;
    while (pos >= 0 && idx[pos] == n_r - l + pos) --pos;
    if (pos < 0) break;
    ++idx[pos];
    for (int k = pos + 1; k < l; ++k) idx[k] = idx[k - 1] + 1;
  }
  return best;
}

namespace {

MatrixXcd inverse_gram(const MatrixXcd& m, std::span<const int> rows,
                       double rho) {
  const auto n_t = m.cols();
  MatrixXcd a = MatrixXcd::Identity(n_t, n_t);
  for (int r : rows) a.noalias() += rho * (m.row(r).adjoint() * m.row(r));
  return a.llt().solve(MatrixXcd::Identity(n_t, n_t));
}

}  // namespace

GreedyTrace greedy_select_traced(const ChannelMatrix& h,
                                 const SystemConfig& cfg,
                                 int refresh_interval) {
  cfg.validate();
  if (h.n_r() != cfg.n_r || h.n_t() != cfg.n_t) {
    throw std::invalid_argument("greedy_select: dimension mismatch");
  }
  if (refresh_interval < 1) refresh_interval = 1;
  const MatrixXcd& m = h.matrix();
  const double rho = cfg.rho_bar;
  const auto n_t = m.cols();

  MatrixXcd p = MatrixXcd::Identity(n_t, n_t);
  std::vector<bool> taken(static_cast<std::size_t>(cfg.n_r), false);
  GreedyTrace trace;
  trace.steps.reserve(static_cast<std::size_t>(cfg.l));
  std::vector<int> chosen;
  chosen.reserve(static_cast<std::size_t>(cfg.l));
  double running = 0.0;

  for (int step = 0; step < cfg.l; ++step) {
    int best_row = -1;
    double best_q = -1.0;
    for (int k = 0; k < cfg.n_r; ++k) {
      if (taken[k]) continue;
      // h_k P h_k^dagger is real for Hermitian P.
      const double q = (m.row(k) * p * m.row(k).adjoint())(0, 0).real();
      if (q > best_q) {
        best_q = q;
        best_row = k;
      }
    }
    const double increment = std::log2(1.0 + rho * best_q);
    running += increment;
    taken[best_row] = true;
    chosen.push_back(best_row);
    trace.steps.push_back({best_row, increment, running});

    if ((step + 1) % refresh_interval == 0) {
      p = inverse_gram(m, chosen, rho);
    } else {
      const VectorXcd ph = p * m.row(best_row).adjoint();
      p -= (rho / (1.0 + rho * best_q)) * (ph * ph.adjoint());
    }
  }

  trace.result.subset = chosen;
  std::sort(trace.result.subset.begin(), trace.result.subset.end());
  trace.result.capacity = running;
  return trace;
}

SelectionResult greedy_select(const ChannelMatrix& h, const SystemConfig& cfg) {
  return greedy_select_traced(h, cfg).result;
}

SelectionResult select_antennas(const ChannelMatrix& h, const SystemConfig& cfg,
                                SelectionMethod method, std::uint64_t budget) {
  return method == SelectionMethod::Exhaustive ? exhaustive_select(h, cfg, budget)
                                               : greedy_select(h, cfg);
}

}  // namespace rascap
