#pragma once

#include <boost/rational.hpp>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fplay/dynamics.hpp"
#include "fplay/errors.hpp"
#include "fplay/gap.hpp"
#include "fplay/matrix.hpp"

namespace fplay {

// Checker arithmetic: exact rationals over the int64 backend (zero
// tolerance), plain doubles over the float backend.
template <Scalar T>
struct FieldOf;

template <>
struct FieldOf<std::int64_t> {
  using type = boost::rational<std::int64_t>;
};

template <>
struct FieldOf<double> {
  using type = double;
};

template <Scalar T>
using Field = typename FieldOf<T>::type;

// value / divisor as a field element.
template <Scalar T>
Field<T> field_ratio(T value, T divisor) {
  if constexpr (std::is_same_v<T, std::int64_t>) {
    return boost::rational<std::int64_t>(value, divisor);
  } else {
    return value / divisor;
  }
}

inline double field_to_double(double v) { return v; }
inline double field_to_double(const boost::rational<std::int64_t>& v) {
  return boost::rational_cast<double>(v);
}

// Real-valued quantities attached to a trace: engine values carry the matrix
// scale K in exact mode, so psi_real = psi/K, A_ii_real = A_ii/K, while x, y
// and round counts are unscaled.
template <Scalar T>
Field<T> real_psi(const Trace<T>& trace, std::int64_t t) {
  return field_ratio(trace.psi(t), trace.matrix.scale());
}

// Weight vector w_i = psi/A_ii + y_i - x_i (diagonal A). The matrix scale
// cancels inside psi/A_ii.
template <Scalar T>
std::vector<Field<T>> weight_vector(const std::vector<T>& x, const std::vector<T>& y, T psi,
                                    const Matrix<T>& a) {
  if (!a.is_diagonal()) throw StructureError("weight_vector requires a diagonal matrix");
  detail::check_length(x, a.n(), "x");
  detail::check_length(y, a.n(), "y");
  std::vector<Field<T>> w(static_cast<std::size_t>(a.n()));
  for (int i = 0; i < a.n(); ++i) {
    w[static_cast<std::size_t>(i)] =
        field_ratio(psi, a.diag_at(i)) + Field<T>(y[static_cast<std::size_t>(i)]) -
        Field<T>(x[static_cast<std::size_t>(i)]);
  }
  return w;
}

// Same weight vector through the gap-vector route: w_i = (u_i + v_i) / A_ii.
template <Scalar T>
std::vector<Field<T>> weight_vector_from_state(const std::vector<T>& p, const std::vector<T>& q,
                                               const Matrix<T>& a) {
  if (!a.is_diagonal()) throw StructureError("weight_vector requires a diagonal matrix");
  auto [u, v] = gap_vectors(p, q);
  std::vector<Field<T>> w(static_cast<std::size_t>(a.n()));
  for (int i = 0; i < a.n(); ++i) {
    w[static_cast<std::size_t>(i)] =
        field_ratio(static_cast<T>(u[static_cast<std::size_t>(i)] + v[static_cast<std::size_t>(i)]),
                    a.diag_at(i));
  }
  return w;
}

// Maximal block of consecutive rounds of the same type (i, j); 1-indexed
// actions, sync when i == j.
struct Phase {
  std::int64_t start_t = 0;
  std::int64_t len = 0;
  int i = 0;
  int j = 0;

  bool sync() const { return i == j; }
  std::int64_t end_t() const { return start_t + len; }  // first round after the phase
};

// A sync(i,i) phase immediately followed by a split(j,i) phase. psi values
// are in engine units; epsilon = psi_end - psi_start.
template <Scalar T>
struct SyncSplitPair {
  int s = 0;                // 1-based ordinal
  std::int64_t start_t = 0; // T_s
  std::int64_t end_t = 0;   // T_{s+1}
  int from = 0;             // i_s, the sync action
  int to = 0;               // i_{s+1}, the split phase's row action
  std::int64_t sync_len = 0;
  std::int64_t split_len = 0;
  T psi_start{};
  T psi_end{};

  T epsilon() const { return psi_end - psi_start; }
  std::int64_t len() const { return end_t - start_t; }
};

template <Scalar T>
struct Segmentation {
  std::vector<Phase> phases;
  std::vector<SyncSplitPair<T>> pairs;
  std::optional<Phase> prologue;  // leading split phase before T_1
  std::optional<Phase> epilogue;  // trailing sync phase with no split after it
  bool well_formed = true;        // sync/split alternation as in the diagonal case
  std::string note;
};

// Partition a trace into phases and pair every sync phase with its
// immediately following split phase. Rounds before the first sync phase are
// the prologue; a trailing unpaired sync phase is the epilogue. Malformed
// alternation (possible for general A) is reported via well_formed, not an
// error.
template <Scalar T>
Segmentation<T> segment_phases(const Trace<T>& trace) {
  if (trace.rounds.empty()) throw PreconditionError("cannot segment an empty trace");
  Segmentation<T> seg;
  for (const auto& r : trace.rounds) {
    if (!seg.phases.empty() && seg.phases.back().i == r.i && seg.phases.back().j == r.j) {
      seg.phases.back().len += 1;
    } else {
      seg.phases.push_back(Phase{r.t, 1, r.i, r.j});
    }
  }

  std::size_t k = 0;
  // Leading split phases form the prologue; in the diagonal case there is at
  // most one (Lemma-level fact), but we tolerate several for general A.
  while (k < seg.phases.size() && !seg.phases[k].sync()) {
    if (seg.prologue) {
      seg.well_formed = false;
      seg.note = "multiple leading split phases";
    }
    seg.prologue = seg.phases[k];
    ++k;
  }
  int ordinal = 0;
  while (k < seg.phases.size()) {
    const Phase& sync = seg.phases[k];
    if (!sync.sync()) {
      seg.well_formed = false;
      seg.note = "expected a sync phase at round " + std::to_string(sync.start_t);
      break;
    }
    if (k + 1 >= seg.phases.size()) {
      seg.epilogue = sync;
      break;
    }
    const Phase& split = seg.phases[k + 1];
    if (split.sync()) {
      seg.well_formed = false;
      seg.note = "sync phase followed by another sync phase at round " +
                 std::to_string(split.start_t);
      break;
    }
    if (split.j != sync.i) {
      seg.well_formed = false;
      seg.note = "split phase at round " + std::to_string(split.start_t) +
                 " does not keep the sync action on the column side";
    }
    SyncSplitPair<T> pair;
    pair.s = ++ordinal;
    pair.start_t = sync.start_t;
    pair.end_t = split.end_t();
    pair.from = sync.i;
    pair.to = split.i;
    pair.sync_len = sync.len;
    pair.split_len = split.len;
    pair.psi_start = trace.psi(pair.start_t);
    // A trailing pair may end one past a file-loaded trace; clamp to the
    // last known gap (such a pair is incomplete and skipped by pair-level
    // checkers anyway).
    const std::int64_t end_known =
        (pair.end_t <= trace.length() || trace.has_final()) ? pair.end_t : trace.length();
    pair.psi_end = trace.psi(end_known);
    seg.pairs.push_back(pair);
    k += 2;
  }
  return seg;
}

}  // namespace fplay
