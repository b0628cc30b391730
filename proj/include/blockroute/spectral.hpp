#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <type_traits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "blockroute/error.hpp"
#include "blockroute/graphs.hpp"
#include "blockroute/random.hpp"

namespace blockroute {

/// Symmetric sparse matrix in CSR form with nonnegative weights.
class SymmetricCsr {
 public:
  struct Entry {
    std::uint32_t row;
    std::uint32_t col;
    double value;
  };

  SymmetricCsr() = default;

  /// Builds from (row, col, value) triplets. Both orientations of every
  /// off-diagonal entry must be supplied; duplicates are summed.
  static SymmetricCsr from_entries(std::size_t n, std::vector<Entry> entries) {
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
      return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    SymmetricCsr m;
    m.row_ptr_.assign(n + 1, 0);
    std::uint32_t last_row = UINT32_MAX;
    for (const auto& e : entries) {
      if (e.row >= n || e.col >= n) throw ContractViolation("matrix entry out of range");
      if (!m.cols_.empty() && last_row == e.row && m.cols_.back() == e.col) {
        m.vals_.back() += e.value;
        continue;
      }
      m.cols_.push_back(e.col);
      m.vals_.push_back(e.value);
      last_row = e.row;
      ++m.row_ptr_[e.row + 1];
    }
    for (std::size_t i = 0; i < n; ++i) m.row_ptr_[i + 1] += m.row_ptr_[i];
    return m;
  }

  /// Unit-weight adjacency matrix of a graph.
  static SymmetricCsr adjacency(const HostGraph& g) {
    SymmetricCsr m;
    const std::size_t n = g.vertex_count();
    m.row_ptr_.assign(n + 1, 0);
    m.cols_.reserve(2 * g.edge_count());
    for (Vertex u = 0; u < n; ++u) {
      for (Vertex v : g.neighbors(u)) m.cols_.push_back(v);
      m.row_ptr_[u + 1] = m.cols_.size();
    }
    m.vals_.assign(m.cols_.size(), 1.0);
    return m;
  }

  /// Dense row-major n x n input; zeros are dropped.
  static SymmetricCsr from_dense(std::size_t n, std::span<const double> dense) {
    std::vector<Entry> entries;
    for (std::uint32_t i = 0; i < n; ++i) {
      for (std::uint32_t j = 0; j < n; ++j) {
        if (double w = dense[i * n + j]; w != 0.0) entries.push_back({i, j, w});
      }
    }
    return from_entries(n, std::move(entries));
  }

  std::size_t size() const { return row_ptr_.empty() ? 0 : row_ptr_.size() - 1; }

  void apply(std::span<const double> x, std::span<double> y) const {
    const std::size_t n = size();
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) acc += vals_[k] * x[cols_[k]];
      y[i] = acc;
    }
  }

  double at(std::size_t i, std::size_t j) const {
    auto first = cols_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i]);
    auto last = cols_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i + 1]);
    auto it = std::lower_bound(first, last, static_cast<std::uint32_t>(j));
    return (it != last && *it == j) ? vals_[static_cast<std::size_t>(it - cols_.begin())] : 0.0;
  }

  std::vector<double> row_sums() const {
    std::vector<double> s(size(), 0.0);
    for (std::size_t i = 0; i < size(); ++i) {
      for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) s[i] += vals_[k];
    }
    return s;
  }

  bool is_symmetric(double tol = 1e-12) const {
    for (std::size_t i = 0; i < size(); ++i) {
      for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
        const double w = vals_[k];
        if (std::abs(at(cols_[k], i) - w) > tol * std::max(1.0, std::abs(w))) return false;
      }
    }
    return true;
  }

  bool has_negative_weight() const {
    return std::any_of(vals_.begin(), vals_.end(), [](double w) { return w < 0.0; });
  }

 private:
  std::vector<std::size_t> row_ptr_;
  std::vector<std::uint32_t> cols_;
  std::vector<double> vals_;
};

/// Symmetric linear operator usable by the Lanczos solver.
template <class Op>
concept SymmetricOperator = requires(const Op& op, std::span<const double> x, std::span<double> y) {
  { op.size() } -> std::convertible_to<std::size_t>;
  op.apply(x, y);
};

struct LanczosOptions {
  double tol = 1e-8;          // relative Ritz residual, scaled by max(1, |lambda|max)
  std::size_t max_iter = 0;   // 0 means 5 * n
  std::uint64_t seed = 0x5eed;
};

/// Extreme eigenvalues and derived spectral ratio.
struct SpectralSummary {
  double lambda_max = 0.0;
  double lambda_2 = 0.0;
  double lambda_min = 0.0;
  double lambda_star = 0.0;  // max(lambda_2, |lambda_min|)
  double beta = 0.0;         // lambda_star / reference_degree
  double reference_degree = 0.0;
  double residual = 0.0;
  std::size_t iterations = 0;
};

/// Eigenvalues together with the Perron and second eigenvectors.
struct ExtremeEigenpairs {
  SpectralSummary summary;
  std::vector<double> perron_vector;
  std::vector<double> second_vector;
};

namespace detail {

using Eigen::Map;
using Eigen::VectorXd;

// Solves (T - shift I) x = rhs for symmetric tridiagonal T by Gaussian
// elimination with partial pivoting (the LAPACK gttrf/gttrs scheme).
inline void tridiagonal_shifted_solve(std::span<const double> diag, std::span<const double> off,
                                      double shift, std::vector<double>& x) {
  const std::size_t m = diag.size();
  std::vector<double> d(m), du(m, 0.0), du2(m, 0.0), dl(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) d[i] = diag[i] - shift;
  for (std::size_t i = 0; i + 1 < m; ++i) du[i] = dl[i] = off[i];
  std::vector<std::size_t> ipiv(m);
  for (std::size_t i = 0; i + 1 < m; ++i) {
    if (std::abs(d[i]) >= std::abs(dl[i])) {
      ipiv[i] = i;
      if (d[i] != 0.0) {
        const double f = dl[i] / d[i];
        dl[i] = f;
        d[i + 1] -= f * du[i];
      }
    } else {
      ipiv[i] = i + 1;
      const double f = d[i] / dl[i];
      d[i] = dl[i];
      dl[i] = f;
      const double tmp = du[i];
      du[i] = d[i + 1];
      d[i + 1] = tmp - f * d[i + 1];
      if (i + 2 < m) {
        du2[i] = du[i + 1];
        du[i + 1] = -f * du[i + 1];
      }
    }
  }
  ipiv[m - 1] = m - 1;
  const double tiny = 1e-300;
  for (auto& v : d) {
    if (std::abs(v) < tiny) v = tiny;
  }
  for (std::size_t i = 0; i + 1 < m; ++i) {
    if (ipiv[i] == i) {
      x[i + 1] -= dl[i] * x[i];
    } else {
      std::swap(x[i], x[i + 1]);
      x[i + 1] -= dl[i] * x[i];
    }
  }
  x[m - 1] /= d[m - 1];
  if (m >= 2) x[m - 2] = (x[m - 2] - du[m - 2] * x[m - 1]) / d[m - 2];
  for (std::size_t k = m; k-- > 2;) {
    const std::size_t i = k - 2;
    x[i] = (x[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / d[i];
  }
}

// Eigenvector of the tridiagonal T for a (converged) eigenvalue theta.
inline std::vector<double> tridiagonal_eigenvector(std::span<const double> diag, std::span<const double> off,
                                                   double theta, double scale) {
  const std::size_t m = diag.size();
  std::vector<double> x(m, 1.0 / std::sqrt(static_cast<double>(m)));
  const double shift = theta + 1e-13 * scale;
  for (int it = 0; it < 3; ++it) {
    tridiagonal_shifted_solve(diag, off, shift, x);
    double norm = 0.0;
    for (double v : x) norm += v * v;
    norm = std::sqrt(norm);
    for (double& v : x) v /= norm;
  }
  return x;
}

struct LanczosRun {
  double largest = 0.0;
  double smallest = 0.0;
  double residual = 0.0;  // relative, max over the two Ritz pairs
  std::size_t iterations = 0;
  std::vector<double> largest_vector;
};

// Lanczos with full (twice-applied) reorthogonalization on the subspace
// orthogonal to `deflate` (orthonormal columns). Converges the largest and
// smallest Ritz pairs.
template <SymmetricOperator Op>
LanczosRun lanczos_extremes(const Op& op, std::span<const std::vector<double>> deflate,
                            const LanczosOptions& opt, bool want_vector) {
  const std::size_t n = op.size();
  const std::size_t dim_cap = n - std::min(n, deflate.size());
  const std::size_t max_iter = opt.max_iter == 0 ? 5 * n : opt.max_iter;
  const std::size_t m_cap = std::min(dim_cap, max_iter);

  auto project_out = [&](VectorXd& w) {
    for (const auto& u : deflate) {
      Map<const VectorXd> um(u.data(), static_cast<Eigen::Index>(n));
      w -= um.dot(w) * um;
    }
  };

  LanczosRun run;
  if (m_cap == 0) return run;

  Rng rng(opt.seed);
  VectorXd v(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = 2.0 * rng.uniform() - 1.0;
  project_out(v);
  project_out(v);
  if (v.norm() == 0.0) return run;
  v.normalize();

  Eigen::MatrixXd basis(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(std::min<std::size_t>(m_cap, 64)));
  std::vector<double> alpha, beta;
  VectorXd w(static_cast<Eigen::Index>(n));
  double beta_prev = 0.0;

  std::size_t next_check = std::min<std::size_t>(8, m_cap);
  for (std::size_t j = 0; j < m_cap; ++j) {
    if (static_cast<std::size_t>(basis.cols()) <= j) {
      basis.conservativeResize(Eigen::NoChange, static_cast<Eigen::Index>(std::min(m_cap, 2 * j)));
    }
    basis.col(static_cast<Eigen::Index>(j)) = v;
    op.apply(std::span<const double>(v.data(), n), std::span<double>(w.data(), n));
    project_out(w);
    const double a = v.dot(w);
    w -= a * v;
    if (j > 0) w -= beta_prev * basis.col(static_cast<Eigen::Index>(j - 1));
    for (int pass = 0; pass < 2; ++pass) {
      auto active = basis.leftCols(static_cast<Eigen::Index>(j + 1));
      VectorXd coeff = active.transpose() * w;
      w -= active * coeff;
      project_out(w);
    }
    const double b = w.norm();
    alpha.push_back(a);
    run.iterations = j + 1;

    const bool last = (j + 1 == m_cap);
    const double scale_guess = std::max(1.0, std::abs(a) + b + beta_prev);
    const bool breakdown = b <= 1e-12 * scale_guess;
    if (j + 1 >= next_check || last || breakdown) {
      next_check = j + 1 + std::max<std::size_t>(4, (j + 1) / 8);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
      VectorXd diag = Map<VectorXd>(alpha.data(), static_cast<Eigen::Index>(alpha.size()));
      VectorXd sub = beta.empty() ? VectorXd() : VectorXd(Map<VectorXd>(beta.data(), static_cast<Eigen::Index>(beta.size())));
      es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
      const auto& theta = es.eigenvalues();
      const double hi = theta[theta.size() - 1];
      const double lo = theta[0];
      const double scale = std::max({1.0, std::abs(hi), std::abs(lo)});
      const auto s_hi = tridiagonal_eigenvector(alpha, beta, hi, scale);
      const auto s_lo = tridiagonal_eigenvector(alpha, beta, lo, scale);
      const double res = std::max(std::abs(b * s_hi.back()), std::abs(b * s_lo.back())) / scale;
      run.largest = hi;
      run.smallest = lo;
      run.residual = res;
      if (res <= opt.tol || breakdown || last) {
        if (res > opt.tol && !breakdown) {
          throw ConvergenceError("Lanczos did not converge within " + std::to_string(max_iter) +
                                     " iterations (relative residual " + std::to_string(res) + ")",
                                 res);
        }
        if (want_vector) {
          VectorXd x = basis.leftCols(static_cast<Eigen::Index>(j + 1)) *
                       Map<const VectorXd>(s_hi.data(), static_cast<Eigen::Index>(s_hi.size()));
          x.normalize();
          run.largest_vector.assign(x.data(), x.data() + x.size());
        }
        return run;
      }
    }
    beta.push_back(b);
    beta_prev = b;
    v = w / b;
  }
  return run;
}

}  // namespace detail

/// Largest, second-largest and smallest eigenvalues of a symmetric
/// nonnegative operator, plus the associated Perron and second eigenvectors.
///
/// The Perron pair comes from the constant vector when every row sum is equal,
/// otherwise from a first Lanczos run; lambda_2 and lambda_min come from a
/// second run deflated against the Perron vector.
template <SymmetricOperator Op>
ExtremeEigenpairs extreme_eigenpairs(const Op& op, const LanczosOptions& opt = {}) {
  if constexpr (std::is_same_v<Op, SymmetricCsr>) {
    if (!op.is_symmetric()) throw ContractViolation("extreme_eigenvalues: matrix is not symmetric");
  }
  const std::size_t n = op.size();
  if (n == 0) throw PreconditionError("extreme_eigenvalues: empty operator");

  ExtremeEigenpairs out;
  auto& s = out.summary;

  std::vector<double> ones(n, 1.0), sums(n);
  op.apply(ones, sums);
  const double mean_sum = std::accumulate(sums.begin(), sums.end(), 0.0) / static_cast<double>(n);
  const bool constant_rows = std::all_of(sums.begin(), sums.end(), [&](double r) {
    return std::abs(r - mean_sum) <= 1e-12 * std::max(1.0, std::abs(mean_sum));
  });

  if (constant_rows) {
    s.lambda_max = mean_sum;
    out.perron_vector.assign(n, 1.0 / std::sqrt(static_cast<double>(n)));
  } else {
    auto first = detail::lanczos_extremes(op, {}, opt, true);
    s.lambda_max = first.largest;
    s.residual = first.residual;
    s.iterations += first.iterations;
    out.perron_vector = std::move(first.largest_vector);
    // Fix the sign so the Perron vector is nonnegative-dominant.
    if (std::accumulate(out.perron_vector.begin(), out.perron_vector.end(), 0.0) < 0.0) {
      for (double& x : out.perron_vector) x = -x;
    }
  }

  if (n == 1) {
    s.lambda_2 = s.lambda_min = s.lambda_max;
  } else {
    const std::vector<double> deflate[1] = {out.perron_vector};
    LanczosOptions second_opt = opt;
    second_opt.seed = opt.seed + 1;
    auto second = detail::lanczos_extremes(op, deflate, second_opt, true);
    s.lambda_2 = second.largest;
    s.lambda_min = std::min(second.smallest, s.lambda_max);
    s.residual = std::max(s.residual, second.residual);
    s.iterations += second.iterations;
    out.second_vector = std::move(second.largest_vector);
  }
  s.lambda_star = std::max(s.lambda_2, std::abs(s.lambda_min));
  return out;
}

/// Eigenvalue fields only (beta and reference_degree left at zero).
template <SymmetricOperator Op>
SpectralSummary extreme_eigenvalues(const Op& op, const LanczosOptions& opt = {}) {
  return extreme_eigenpairs(op, opt).summary;
}

/// Fills beta = lambda_star / reference_degree.
inline SpectralSummary with_ratio(SpectralSummary s, double reference_degree) {
  if (!(reference_degree > 0.0)) throw PreconditionError("spectral_ratio: reference degree must be > 0");
  s.reference_degree = reference_degree;
  s.beta = s.lambda_star / reference_degree;
  return s;
}

template <SymmetricOperator Op>
SpectralSummary spectral_ratio(const Op& op, double reference_degree, const LanczosOptions& opt = {}) {
  if (!(reference_degree > 0.0)) throw PreconditionError("spectral_ratio: reference degree must be > 0");
  return with_ratio(extreme_eigenvalues(op, opt), reference_degree);
}

/// Spectral ratio of a regular host graph against its degree.
inline SpectralSummary host_spectral_ratio(const HostGraph& g, const LanczosOptions& opt = {}) {
  if (!g.degree()) throw PreconditionError("host_spectral_ratio: graph is not regular");
  return spectral_ratio(SymmetricCsr::adjacency(g), static_cast<double>(*g.degree()), opt);
}

/// 2 sqrt(d'-1) / d', the Ramanujan / Alon-Boppana level of beta.
inline double alon_boppana_reference(std::uint32_t d_prime) {
  if (d_prime < 2) throw PreconditionError("alon_boppana_reference: d' must be >= 2");
  return 2.0 * std::sqrt(static_cast<double>(d_prime) - 1.0) / static_cast<double>(d_prime);
}

}  // namespace blockroute
