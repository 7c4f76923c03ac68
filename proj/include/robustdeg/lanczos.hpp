#pragma once

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "robustdeg/graph.hpp"
#include "robustdeg/rng.hpp"

namespace robustdeg {

/// Thrown when the iteration cap is hit before the operator norm converges.
/// [lower, upper] brackets the norm as far as the iteration got.
class EigensolverError : public std::runtime_error {
 public:
  EigensolverError(double lower, double upper, std::size_t iterations)
      : std::runtime_error("Lanczos did not converge after " + std::to_string(iterations) +
                           " iterations; norm in [" + std::to_string(lower) + ", " +
                           std::to_string(upper) + "]"),
        lower_(lower),
        upper_(upper),
        iterations_(iterations) {}

  double lower() const noexcept { return lower_; }
  double upper() const noexcept { return upper_; }
  std::size_t iterations() const noexcept { return iterations_; }

 private:
  double lower_;
  double upper_;
  std::size_t iterations_;
};

struct LanczosOptions {
  double tol = 1e-10;
  /// 0 selects the default cap 10 * sqrt(n) + 200.
  std::size_t max_iterations = 0;
  std::uint64_t seed = 0x5eed5eed5eedULL;
  /// Optional warm start; a small seeded perturbation is mixed in so the
  /// Krylov space never collapses onto a single eigenvector.
  std::span<const double> start = {};
  /// Largest basis (in doubles) kept for full reorthogonalization. Above it the
  /// plain three-term recurrence is used and no Ritz vector is returned.
  std::size_t basis_budget = std::size_t{1} << 24;
};

struct NormEstimate {
  double norm = 0.0;
  /// Extreme Ritz values. Only the one attaining the norm is converged to
  /// `tol`; the other is merely known not to exceed it in magnitude.
  double lambda_max = 0.0;
  double lambda_min = 0.0;
  /// Residual ||M y - theta y|| of the Ritz pair attaining the norm.
  double residual = 0.0;
  std::size_t iterations = 0;
  /// Unit Ritz vector of the norm-attaining eigenvalue (empty without a basis).
  std::vector<double> vector;
};

using LinearOperator = std::function<void(std::span<const double>, std::span<double>)>;

inline std::size_t default_iteration_cap(std::size_t n) {
  return static_cast<std::size_t>(10.0 * std::sqrt(static_cast<double>(n))) + 200;
}

/// Operator norm max(|lambda_min|, |lambda_max|) of a symmetric n x n operator
/// given only through matrix-vector products.
///
/// Lanczos with full reorthogonalization; both extremal eigenvalues come from
/// the same Krylov space. A Ritz value theta with residual r and Ritz gap g is
/// accepted once min(r, r^2 / g) <= tol * |theta|. Invariant-subspace breakdown
/// makes the Ritz values exact and ends the iteration.
inline NormEstimate operator_norm(std::size_t n, const LinearOperator& apply,
                                  const LanczosOptions& opts = {}) {
  NormEstimate out;
  if (n == 0) return out;
  const std::size_t cap = std::min(n, opts.max_iterations ? opts.max_iterations
                                                          : default_iteration_cap(n));
  const bool keep_basis = n * cap <= opts.basis_budget;

  Xoshiro256 rng(opts.seed);
  std::vector<double> q(n), q_prev(n, 0.0), w(n);
  for (auto& x : q) x = rng.uniform() - 0.5;
  if (opts.start.size() == n) {
    double s = 0.0;
    for (double x : opts.start) s += x * x;
    if (s > 0.0) {
      const double inv = 1.0 / std::sqrt(s);
      // Random part has norm about sqrt(n / 12); weight it to ~1e-3 of the start.
      const double mix = 1e-3 / std::sqrt(static_cast<double>(n) / 12.0);
      for (std::size_t i = 0; i < n; ++i) q[i] = opts.start[i] * inv + mix * q[i];
    }
  }
  {
    double s = 0.0;
    for (double x : q) s += x * x;
    const double inv = 1.0 / std::sqrt(s);
    for (auto& x : q) x *= inv;
  }

  std::vector<double> basis;
  if (keep_basis) basis.reserve(n * cap);
  std::vector<double> alpha, beta;  // beta[k] couples q_k and q_{k+1}
  alpha.reserve(cap);
  beta.reserve(cap);

  double scale_estimate = 0.0;
  std::size_t next_check = std::min<std::size_t>(8, cap);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;

  struct Extreme {
    double theta = 0.0;
    double residual = 0.0;
    double error = 0.0;
    Eigen::Index index = 0;
  };

  auto solve_tridiagonal = [&](std::size_t k, double beta_k, Extreme& hi, Extreme& lo) {
    Eigen::VectorXd diag(static_cast<Eigen::Index>(k));
    Eigen::VectorXd sub(static_cast<Eigen::Index>(k > 0 ? k - 1 : 0));
    for (std::size_t i = 0; i < k; ++i) diag[static_cast<Eigen::Index>(i)] = alpha[i];
    for (std::size_t i = 0; i + 1 < k; ++i) sub[static_cast<Eigen::Index>(i)] = beta[i];
    tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    const auto& vals = tri.eigenvalues();
    const auto& vecs = tri.eigenvectors();
    const auto last = static_cast<Eigen::Index>(k - 1);
    auto fill = [&](Extreme& e, Eigen::Index idx, Eigen::Index neighbor) {
      e.index = idx;
      e.theta = vals[idx];
      e.residual = std::abs(beta_k * vecs(last, idx));
      const double gap = k > 1 ? std::abs(vals[idx] - vals[neighbor]) : 0.0;
      e.error = gap > 0.0 ? std::min(e.residual, e.residual * e.residual / gap) : e.residual;
    };
    fill(hi, last, k > 1 ? last - 1 : last);
    fill(lo, 0, k > 1 ? 1 : 0);
  };

  Extreme hi, lo;
  std::size_t k = 0;
  bool done = false;
  double beta_k = 0.0;
  while (!done) {
    if (keep_basis) basis.insert(basis.end(), q.begin(), q.end());
    apply(q, w);
    double a = 0.0;
    for (std::size_t i = 0; i < n; ++i) a += q[i] * w[i];
    const double b_prev = beta.empty() ? 0.0 : beta.back();
    for (std::size_t i = 0; i < n; ++i) w[i] -= a * q[i] + b_prev * q_prev[i];
    if (keep_basis) {
      // Two passes of classical Gram-Schmidt against the whole basis.
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t j = 0; j <= k; ++j) {
          const double* v = basis.data() + j * n;
          double c = 0.0;
          for (std::size_t i = 0; i < n; ++i) c += v[i] * w[i];
          for (std::size_t i = 0; i < n; ++i) w[i] -= c * v[i];
        }
      }
    }
    alpha.push_back(a);
    double b = 0.0;
    for (double x : w) b += x * x;
    b = std::sqrt(b);
    ++k;
    scale_estimate = std::max({scale_estimate, std::abs(a), b});
    beta_k = b;

    const bool breakdown = b <= 1e-13 * std::max(scale_estimate, 1e-300);
    const bool at_cap = k >= cap;
    if (breakdown) beta_k = 0.0;
    if (k >= next_check || breakdown || at_cap) {
      solve_tridiagonal(k, beta_k, hi, lo);
      const Extreme& dom = std::abs(hi.theta) >= std::abs(lo.theta) ? hi : lo;
      const Extreme& other = &dom == &hi ? lo : hi;
      const double target = opts.tol * std::max(std::abs(dom.theta), 1e-300);
      const bool dom_ok = dom.error <= target;
      const bool other_ok = other.error <= opts.tol * std::max(std::abs(other.theta), 1e-300) ||
                            std::abs(other.theta) + other.residual < std::abs(dom.theta);
      const bool exact = breakdown || k == n;
      if (exact || (dom_ok && other_ok)) {
        done = true;
      } else if (at_cap) {
        const double lower = std::max(std::abs(hi.theta), std::abs(lo.theta));
        const double upper = std::max(std::abs(hi.theta) + hi.residual,
                                      std::abs(lo.theta) + lo.residual);
        throw EigensolverError(lower, upper, k);
      }
      next_check = std::max(k + 4, static_cast<std::size_t>(static_cast<double>(k) * 1.15));
    }
    if (done) break;
    beta.push_back(b);
    std::swap(q_prev, q);
    const double inv = 1.0 / b;
    for (std::size_t i = 0; i < n; ++i) q[i] = w[i] * inv;
  }

  const bool hi_dominates = std::abs(hi.theta) >= std::abs(lo.theta);
  const Extreme& dom = hi_dominates ? hi : lo;
  out.norm = std::abs(dom.theta);
  out.lambda_max = hi.theta;
  out.lambda_min = lo.theta;
  out.residual = dom.residual;
  out.iterations = k;
  if (keep_basis) {
    out.vector.assign(n, 0.0);
    const auto& vecs = tri.eigenvectors();
    for (std::size_t j = 0; j < k; ++j) {
      const double c = vecs(static_cast<Eigen::Index>(j), dom.index);
      const double* v = basis.data() + j * n;
      for (std::size_t i = 0; i < n; ++i) out.vector[i] += c * v[i];
    }
  }
  return out;
}

/// y = S (A - c 11^T + s I) S x with S = diag(scale): a diagonally rescaled
/// adjacency matrix with an implicit rank-one centering and diagonal shift.
/// The dense matrix is never formed; one product costs O(n + m).
class ScaledCenteredAdjacency {
 public:
  ScaledCenteredAdjacency(const Graph& g, std::vector<double> scale, double rank_one,
                          double diagonal_shift)
      : g_(&g), scale_(std::move(scale)), rank_one_(rank_one), shift_(diagonal_shift),
        tmp_(g.size()) {}

  void operator()(std::span<const double> x, std::span<double> y) {
    const std::size_t n = g_->size();
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      tmp_[i] = scale_[i] * x[i];
      total += tmp_[i];
    }
    for (Node v = 0; v < n; ++v) {
      double acc = 0.0;
      for (Node u : g_->neighbors(v)) acc += tmp_[u];
      y[v] = scale_[v] * (acc - rank_one_ * total + shift_ * tmp_[v]);
    }
  }

  LinearOperator as_function() {
    return [this](std::span<const double> x, std::span<double> y) { (*this)(x, y); };
  }

 private:
  const Graph* g_;
  std::vector<double> scale_;
  double rank_one_;
  double shift_;
  std::vector<double> tmp_;
};

/// Entries 1 / sqrt(max(1, d_v / (2 d_ref))) of the inverse square root of
/// the degree-rescaling diagonal.
inline std::vector<double> inverse_sqrt_rescaling(const Graph& g, double d_ref) {
  std::vector<double> s(g.size());
  for (Node v = 0; v < g.size(); ++v) {
    const double dvv = std::max(1.0, static_cast<double>(g.degree(v)) / (2.0 * d_ref));
    s[v] = 1.0 / std::sqrt(dvv);
  }
  return s;
}

}  // namespace robustdeg
