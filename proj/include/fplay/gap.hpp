#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "fplay/errors.hpp"
#include "fplay/matrix.hpp"

namespace fplay {

namespace detail {

template <Scalar T>
void check_length(const std::vector<T>& v, int n, const char* what) {
  if (static_cast<int>(v.size()) != n) {
    throw DimensionError(std::string(what) + ": expected length " + std::to_string(n) +
                         ", got " + std::to_string(v.size()));
  }
}

}  // namespace detail

// p = A y (the x player's per-action losses against the y history).
template <Scalar T>
std::vector<T> loss_vector(const Matrix<T>& a, const std::vector<T>& y) {
  detail::check_length(y, a.n(), "y");
  std::vector<T> p(static_cast<std::size_t>(a.n()), T{0});
  if (a.is_diagonal()) {
    for (int i = 0; i < a.n(); ++i) p[i] = a.diag_at(i) * y[i];
  } else {
    for (int i = 0; i < a.n(); ++i) {
      T acc{0};
      for (int j = 0; j < a.n(); ++j) acc += a(i, j) * y[j];
      p[i] = acc;
    }
  }
  return p;
}

// q = x^T A (the y player's per-action payoffs against the x history).
template <Scalar T>
std::vector<T> payoff_vector(const Matrix<T>& a, const std::vector<T>& x) {
  detail::check_length(x, a.n(), "x");
  std::vector<T> q(static_cast<std::size_t>(a.n()), T{0});
  if (a.is_diagonal()) {
    for (int j = 0; j < a.n(); ++j) q[j] = a.diag_at(j) * x[j];
  } else {
    for (int j = 0; j < a.n(); ++j) {
      T acc{0};
      for (int i = 0; i < a.n(); ++i) acc += x[i] * a(i, j);
      q[j] = acc;
    }
  }
  return q;
}

// Duality gap in state form: max(q) - min(p).
template <Scalar T>
T duality_gap_from_state(const std::vector<T>& p, const std::vector<T>& q) {
  if (p.empty() || q.empty()) throw DimensionError("state vectors must be nonempty");
  if (p.size() != q.size()) throw DimensionError("p and q lengths differ");
  return *std::max_element(q.begin(), q.end()) - *std::min_element(p.begin(), p.end());
}

// Duality gap psi(x, y) = max_j (x^T A)_j - min_i (A y)_i. Defined on all of
// R^n x R^n; nonnegative on the simplex product.
template <Scalar T>
T duality_gap(const std::vector<T>& x, const std::vector<T>& y, const Matrix<T>& a) {
  return duality_gap_from_state(loss_vector(a, y), payoff_vector(a, x));
}

// Gap computed through the support-function route: build the skew-symmetric
// block matrix S = [[0, -A], [A^T, 0]], form Sz for z = (x, y), and maximize
// <vertex, Sz> over the simplex-product vertices. Equals duality_gap; kept as
// an independent route for cross-checking.
template <Scalar T>
T support_form_gap(const std::vector<T>& x, const std::vector<T>& y, const Matrix<T>& a) {
  const int n = a.n();
  detail::check_length(x, n, "x");
  detail::check_length(y, n, "y");
  const int m = 2 * n;
  std::vector<T> s(static_cast<std::size_t>(m) * m, T{0});
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      s[static_cast<std::size_t>(i) * m + (n + j)] = -a(i, j);
      s[static_cast<std::size_t>(n + i) * m + j] = a(j, i);
    }
  }
  std::vector<T> z(static_cast<std::size_t>(m), T{0});
  std::copy(x.begin(), x.end(), z.begin());
  std::copy(y.begin(), y.end(), z.begin() + n);
  std::vector<T> sz(static_cast<std::size_t>(m), T{0});
  for (int i = 0; i < m; ++i) {
    T acc{0};
    for (int j = 0; j < m; ++j) acc += s[static_cast<std::size_t>(i) * m + j] * z[j];
    sz[i] = acc;
  }
  // The feasible set is a product of two simplices, so the support function
  // splits into one max per block over the n vertices of each simplex.
  const T top = *std::max_element(sz.begin(), sz.begin() + n);
  const T bottom = *std::max_element(sz.begin() + n, sz.end());
  return top + bottom;
}

// Closed-form equilibrium for diagonal A: x*_i = y*_i proportional to 1/A_ii.
template <Scalar T>
std::pair<SimplexPoint, SimplexPoint> minimax_diagonal(const Matrix<T>& a) {
  if (!a.is_diagonal()) {
    throw StructureError("minimax_diagonal requires a diagonal matrix");
  }
  double denom = 0.0;
  for (int i = 0; i < a.n(); ++i) denom += 1.0 / static_cast<double>(a.diag_at(i));
  std::vector<double> c(static_cast<std::size_t>(a.n()));
  for (int i = 0; i < a.n(); ++i) {
    c[static_cast<std::size_t>(i)] = 1.0 / (static_cast<double>(a.diag_at(i)) * denom);
  }
  SimplexPoint x(c);
  return {x, x};
}

// Per-action regrets: u = p - min(p), v = max(q) - q. Both are nonnegative
// and each has at least one zero entry.
template <Scalar T>
std::pair<std::vector<T>, std::vector<T>> gap_vectors(const std::vector<T>& p,
                                                      const std::vector<T>& q) {
  if (p.size() != q.size()) throw DimensionError("p and q lengths differ");
  const T p_star = *std::min_element(p.begin(), p.end());
  const T q_star = *std::max_element(q.begin(), q.end());
  std::vector<T> u(p.size()), v(q.size());
  for (std::size_t i = 0; i < p.size(); ++i) u[i] = p[i] - p_star;
  for (std::size_t j = 0; j < q.size(); ++j) v[j] = q_star - q[j];
  return {std::move(u), std::move(v)};
}

}  // namespace fplay
