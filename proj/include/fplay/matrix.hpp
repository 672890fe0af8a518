#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <type_traits>
#include <vector>

#include "fplay/errors.hpp"

namespace fplay {

// Scalar backends for the whole engine. Exact mode stores all values as
// int64 scaled by an integer K (the matrix scale); float mode uses doubles
// with an explicit tie tolerance.
template <typename T>
concept Scalar = std::is_same_v<T, std::int64_t> || std::is_same_v<T, double>;

enum class Structure { kGeneral, kDiagonal, kIdentity };

// Square payoff matrix. Entries are stored dense row-major; diagonal
// matrices additionally keep the diagonal as a vector. In exact mode the
// stored entries equal scale() * (real entries).
template <Scalar T>
class Matrix {
 public:
  static Matrix identity(int n) {
    Matrix m;
    m.init_general(n, std::vector<T>(static_cast<std::size_t>(n) * n, T{0}));
    for (int i = 0; i < n; ++i) m.at(i, i) = T{1};
    m.finish(Structure::kIdentity, T{1});
    return m;
  }

  static Matrix diagonal(std::vector<T> diag, T scale = T{1}) {
    const int n = static_cast<int>(diag.size());
    Matrix m;
    m.init_general(n, std::vector<T>(static_cast<std::size_t>(n) * n, T{0}));
    for (int i = 0; i < n; ++i) {
      if (!(diag[static_cast<std::size_t>(i)] > T{0})) {
        throw StructureError("diagonal entries must be strictly positive");
      }
      m.at(i, i) = diag[static_cast<std::size_t>(i)];
    }
    bool is_identity = scale == T{1};
    for (T d : diag) is_identity = is_identity && d == T{1};
    m.finish(is_identity ? Structure::kIdentity : Structure::kDiagonal, scale);
    return m;
  }

  static Matrix general(int n, std::vector<T> entries, T scale = T{1}) {
    if (n < 1) throw DimensionError("matrix side must be >= 1");
    if (entries.size() != static_cast<std::size_t>(n) * n) {
      throw DimensionError("entry count does not match n*n");
    }
    Matrix m;
    m.init_general(n, std::move(entries));
    // Recognize diagonal/identity structure so the closed-form equilibrium
    // and the diagonal-only checkers become available.
    bool diag_ok = true, ident = true;
    for (int i = 0; i < n && diag_ok; ++i) {
      for (int j = 0; j < n; ++j) {
        const T v = m.at(i, j);
        if (i == j) {
          if (!(v > T{0})) diag_ok = false;
          if (v != scale) ident = false;
        } else if (v != T{0}) {
          diag_ok = false;
        }
      }
    }
    m.finish(diag_ok ? (ident ? Structure::kIdentity : Structure::kDiagonal)
                     : Structure::kGeneral,
             scale);
    return m;
  }

  int n() const { return n_; }
  Structure structure() const { return structure_; }
  bool is_diagonal() const { return structure_ != Structure::kGeneral; }
  T scale() const { return scale_; }

  T operator()(int i, int j) const {
    return entries_[static_cast<std::size_t>(i) * n_ + j];
  }

  const std::vector<T>& entries() const { return entries_; }
  const std::vector<T>& diag() const { return diag_; }
  T diag_at(int i) const { return diag_[static_cast<std::size_t>(i)]; }

  // Min/max diagonal entry (defined for diagonal matrices); same units as
  // the stored entries.
  T a_min() const { return a_min_; }
  T a_max() const { return a_max_; }
  double kappa() const {
    if (!is_diagonal()) throw StructureError("kappa requires a diagonal matrix");
    return static_cast<double>(a_max_) / static_cast<double>(a_min_);
  }

  T max_abs_entry() const {
    T m{0};
    for (T v : entries_) m = std::max(m, v < T{0} ? static_cast<T>(-v) : v);
    return m;
  }

 private:
  Matrix() = default;

  void init_general(int n, std::vector<T> entries) {
    if (n < 1) throw DimensionError("matrix side must be >= 1");
    n_ = n;
    entries_ = std::move(entries);
  }

  T& at(int i, int j) { return entries_[static_cast<std::size_t>(i) * n_ + j]; }

  void finish(Structure s, T scale) {
    if (!(scale > T{0})) throw StructureError("matrix scale must be positive");
    structure_ = s;
    scale_ = scale;
    if (is_diagonal()) {
      diag_.resize(static_cast<std::size_t>(n_));
      for (int i = 0; i < n_; ++i) diag_[static_cast<std::size_t>(i)] = (*this)(i, i);
      a_min_ = *std::min_element(diag_.begin(), diag_.end());
      a_max_ = *std::max_element(diag_.begin(), diag_.end());
    }
  }

  int n_ = 0;
  std::vector<T> entries_;
  std::vector<T> diag_;
  Structure structure_ = Structure::kGeneral;
  T scale_ = T{1};
  T a_min_ = T{0};
  T a_max_ = T{0};
};

// A point on the probability simplex (float representation).
struct SimplexPoint {
  std::vector<double> coords;

  explicit SimplexPoint(std::vector<double> c) : coords(std::move(c)) {
    double sum = 0.0;
    for (double v : coords) {
      if (v < 0.0) throw PreconditionError("simplex coordinates must be nonnegative");
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
      throw PreconditionError("simplex coordinates must sum to 1");
    }
  }

  static SimplexPoint vertex(int n, int i) {
    std::vector<double> c(static_cast<std::size_t>(n), 0.0);
    c[static_cast<std::size_t>(i)] = 1.0;
    return SimplexPoint(std::move(c));
  }

  int n() const { return static_cast<int>(coords.size()); }
};

}  // namespace fplay
