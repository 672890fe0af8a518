#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "fplay/analysis.hpp"
#include "fplay/dynamics.hpp"
#include "fplay/errors.hpp"
#include "fplay/matrix.hpp"

namespace fplay {

// Outcome of one mechanical check over a trace. worst_margin is >= 0 exactly
// when every individual check held (under the check's sign convention).
struct Report {
  std::string theorem;
  bool applicable = true;
  bool holds = true;
  double worst_margin = std::numeric_limits<double>::infinity();
  std::int64_t worst_t = 0;
  std::int64_t checks = 0;
  std::vector<std::string> failures;

  void record(bool ok, double margin, std::int64_t t, const std::string& what) {
    ++checks;
    if (margin < worst_margin) {
      worst_margin = margin;
      worst_t = t;
    }
    if (!ok) {
      holds = false;
      if (failures.size() < 10) {
        failures.push_back("t=" + std::to_string(t) + ": " + what);
      }
    }
  }

  void not_applicable(const std::string& why) {
    applicable = false;
    if (failures.empty()) failures.push_back(why);
  }
};

namespace detail {

template <Scalar T>
constexpr double check_slack() {
  if constexpr (std::is_same_v<T, std::int64_t>) {
    return 0.0;
  } else {
    return 1e-9;
  }
}

// lhs <= rhs in field arithmetic, with float-mode slack. margin = rhs - lhs.
template <Scalar T>
bool field_le(const Field<T>& lhs, const Field<T>& rhs, double* margin) {
  *margin = field_to_double(rhs) - field_to_double(lhs);
  if constexpr (std::is_same_v<T, std::int64_t>) {
    return lhs <= rhs;
  } else {
    return lhs <= rhs + check_slack<T>() * (1.0 + std::abs(rhs));
  }
}

// lhs == rhs; margin = tol - |diff| (0 on success in exact mode).
template <Scalar T>
bool field_eq(const Field<T>& lhs, const Field<T>& rhs, double* margin) {
  if constexpr (std::is_same_v<T, std::int64_t>) {
    *margin = lhs == rhs ? 0.0 : -std::abs(field_to_double(lhs - rhs));
    return lhs == rhs;
  } else {
    const double tol = check_slack<T>() * (1.0 + std::abs(rhs));
    *margin = tol - std::abs(lhs - rhs);
    return *margin >= 0.0;
  }
}

// val <= coef * sqrt(t), exactly in integer arithmetic for the exact backend.
template <Scalar T>
bool le_sqrt(T val, T coef, std::int64_t t, double* margin) {
  *margin = static_cast<double>(coef) * std::sqrt(static_cast<double>(t)) -
            static_cast<double>(val);
  if constexpr (std::is_same_v<T, std::int64_t>) {
    if (val <= 0) return true;
    const __int128 lhs = static_cast<__int128>(val) * val;
    const __int128 rhs = static_cast<__int128>(coef) * coef * t;
    return lhs <= rhs;
  } else {
    return *margin >= -check_slack<T>() * (1.0 + std::abs(static_cast<double>(val)));
  }
}

template <Scalar T>
const Snapshot<T>* need_snapshot(const Trace<T>& trace, std::int64_t t, const char* who) {
  const Snapshot<T>* s = trace.snapshot(t);
  if (s == nullptr) {
    throw InsufficientDataError(std::string(who) + ": no state snapshot at round " +
                                std::to_string(t));
  }
  return s;
}

template <Scalar T>
Field<T> one_over(const Matrix<T>& a, int action_1based) {
  return field_ratio(a.scale(), a.diag_at(action_1based - 1));
}

template <Scalar T>
Field<T> kappa_field(const Matrix<T>& a) {
  return field_ratio(a.a_max(), a.a_min());
}

}  // namespace detail

// Lemma: the duality gap never decreases, increases by at most A_max per
// round, and stays constant while the round type is unchanged. For general A
// only monotonicity is checked.
template <Scalar T>
Report verify_gap_monotone(const Trace<T>& trace) {
  Report rep{"gap_monotone"};
  const Matrix<T>& a = trace.matrix;
  const double slack = detail::check_slack<T>() * (1.0 + std::abs(static_cast<double>(a.max_abs_entry())));
  const std::int64_t last = trace.has_final() ? trace.length() : trace.length() - 1;
  for (std::int64_t t = 1; t <= last; ++t) {
    const T dpsi = trace.psi(t + 1) - trace.psi(t);
    const double d = static_cast<double>(dpsi);
    rep.record(d >= -slack, d, t, "gap decreased by " + std::to_string(-d));
    if (!a.is_diagonal()) continue;
    rep.record(d <= static_cast<double>(a.a_max()) + slack,
               static_cast<double>(a.a_max()) - d, t, "gap grew by more than A_max");
    if (t < trace.length() && trace.round(t).type() == trace.round(t + 1).type()) {
      rep.record(std::abs(d) <= slack, slack - std::abs(d), t,
                 "gap changed within a phase");
    }
  }
  return rep;
}

// Lemma: sync(i,i) phases are followed by split(j,i) phases and split(j,i)
// phases by sync(j,j) phases. Vacuous on single-phase traces.
template <Scalar T>
Report verify_alternation(const Segmentation<T>& seg) {
  Report rep{"alternation"};
  for (std::size_t k = 0; k + 1 < seg.phases.size(); ++k) {
    const Phase& cur = seg.phases[k];
    const Phase& nxt = seg.phases[k + 1];
    if (cur.sync()) {
      const bool ok = !nxt.sync() && nxt.j == cur.i && nxt.i != cur.i;
      rep.record(ok, ok ? 0.0 : -1.0, nxt.start_t,
                 "sync(" + std::to_string(cur.i) + ") not followed by a split(*, " +
                     std::to_string(cur.i) + ") phase");
    } else {
      const bool ok = nxt.sync() && nxt.i == cur.i;
      rep.record(ok, ok ? 0.0 : -1.0, nxt.start_t,
                 "split(" + std::to_string(cur.i) + "," + std::to_string(cur.j) +
                     ") not followed by sync(" + std::to_string(cur.i) + ")");
    }
  }
  return rep;
}

// Lemma (sync phase): for a sync(i,i) phase of length s followed by a
// split(j,i) round, eps = s*A_ii - u_j at the phase start satisfies
// 0 <= eps <= A_ii, shifts every weight entry by eps/A_ll, and equals the
// gap increase over the phase.
template <Scalar T>
Report verify_sync_phase(const Trace<T>& trace, const Phase& phase) {
  Report rep{"sync_phase"};
  const Matrix<T>& a = trace.matrix;
  if (!phase.sync()) throw PreconditionError("verify_sync_phase: not a sync phase");
  if (phase.end_t() > trace.length()) {
    rep.not_applicable("phase runs to the end of the trace; no split round follows");
    return rep;
  }
  const int i = phase.i;
  const int j = trace.round(phase.end_t()).i;
  if (j == i) {
    rep.not_applicable("next round is not a split round");
    return rep;
  }
  const Snapshot<T>* at = detail::need_snapshot(trace, phase.start_t, "verify_sync_phase");
  const Snapshot<T>* after = detail::need_snapshot(trace, phase.end_t(), "verify_sync_phase");
  const auto [u, v] = gap_vectors(at->p, at->q);
  const T eps = static_cast<T>(phase.len) * a.diag_at(i - 1) - u[static_cast<std::size_t>(j - 1)];

  double m = 0.0;
  rep.record(detail::field_le<T>(Field<T>(0), field_ratio(eps, a.scale()), &m), m,
             phase.start_t, "eps < 0");
  rep.record(detail::field_le<T>(field_ratio(eps, a.scale()),
                                 field_ratio(a.diag_at(i - 1), a.scale()), &m),
             m, phase.start_t, "eps > A_ii");
  const auto w_at = weight_vector_from_state(at->p, at->q, a);
  const auto w_after = weight_vector_from_state(after->p, after->q, a);
  for (int l = 1; l <= a.n(); ++l) {
    const Field<T> expect = w_at[static_cast<std::size_t>(l - 1)] + field_ratio(eps, a.diag_at(l - 1));
    rep.record(detail::field_eq<T>(w_after[static_cast<std::size_t>(l - 1)], expect, &m), m,
               phase.start_t, "w shift mismatch at entry " + std::to_string(l));
  }
  rep.record(detail::field_eq<T>(field_ratio(eps, a.scale()),
                                 field_ratio(trace.psi(phase.end_t()) - trace.psi(phase.start_t),
                                             a.scale()),
                                 &m),
             m, phase.start_t, "eps != gap increase over the phase");
  return rep;
}

// Lemma (split phase): for a split(j,i) phase of length s followed by a
// sync(j,j) round, eps = s*A_jj - v_j at the phase start satisfies
// 0 <= eps <= A_jj and drives the three weight-update identities, including
// w_j = 0 at the phase end. A leading split phase (the prologue) must also
// satisfy the length bound s <= 1 + v_j / A_min.
template <Scalar T>
Report verify_split_phase(const Trace<T>& trace, const Phase& phase) {
  Report rep{"split_phase"};
  const Matrix<T>& a = trace.matrix;
  if (phase.sync()) throw PreconditionError("verify_split_phase: not a split phase");
  const int j = phase.i;  // the row player's new action
  const int i = phase.j;  // the column player's held action
  const Snapshot<T>* at = detail::need_snapshot(trace, phase.start_t, "verify_split_phase");
  const auto [u, v] = gap_vectors(at->p, at->q);
  double m = 0.0;
  if (phase.start_t == 1) {
    // Prologue split: length <= 1 + v_j / A_min.
    const Field<T> bound = Field<T>(1) + field_ratio(v[static_cast<std::size_t>(j - 1)], a.a_min());
    rep.record(detail::field_le<T>(Field<T>(phase.len), bound, &m), m, 1,
               "prologue split phase longer than 1 + v_j/A_min");
  }
  if (phase.end_t() > trace.length()) {
    rep.not_applicable("phase runs to the end of the trace; no sync round follows");
    return rep;
  }
  const Round<T>& next = trace.round(phase.end_t());
  if (!(next.i == j && next.j == j)) {
    rep.not_applicable("next round is not a sync(j,j) round");
    return rep;
  }
  const Snapshot<T>* after = detail::need_snapshot(trace, phase.end_t(), "verify_split_phase");
  const T eps = static_cast<T>(phase.len) * a.diag_at(j - 1) - v[static_cast<std::size_t>(j - 1)];

  rep.record(detail::field_le<T>(Field<T>(0), field_ratio(eps, a.scale()), &m), m,
             phase.start_t, "eps < 0");
  rep.record(detail::field_le<T>(field_ratio(eps, a.scale()),
                                 field_ratio(a.diag_at(j - 1), a.scale()), &m),
             m, phase.start_t, "eps > A_jj");
  const auto w_at = weight_vector_from_state(at->p, at->q, a);
  const auto w_after = weight_vector_from_state(after->p, after->q, a);
  for (int l = 1; l <= a.n(); ++l) {
    Field<T> expect;
    if (l == j) {
      expect = Field<T>(0);
    } else if (l == i) {
      expect = w_at[static_cast<std::size_t>(i - 1)] + w_at[static_cast<std::size_t>(j - 1)] +
               (detail::one_over(a, i) + detail::one_over(a, j)) * field_ratio(eps, a.scale());
    } else {
      expect = w_at[static_cast<std::size_t>(l - 1)] + field_ratio(eps, a.diag_at(l - 1));
    }
    rep.record(detail::field_eq<T>(w_after[static_cast<std::size_t>(l - 1)], expect, &m), m,
               phase.start_t, "w update mismatch at entry " + std::to_string(l));
  }
  rep.record(detail::field_eq<T>(field_ratio(eps, a.scale()),
                                 field_ratio(trace.psi(phase.end_t()) - trace.psi(phase.start_t),
                                             a.scale()),
                                 &m),
             m, phase.start_t, "eps != gap increase over the phase");
  return rep;
}

namespace detail {

template <Scalar T>
void merge(Report& into, Report&& part) {
  into.checks += part.checks;
  if (part.applicable && part.worst_margin < into.worst_margin) {
    into.worst_margin = part.worst_margin;
    into.worst_t = part.worst_t;
  }
  if (part.applicable && !part.holds) {
    into.holds = false;
    for (auto& f : part.failures) {
      if (into.failures.size() < 10) into.failures.push_back(std::move(f));
    }
  }
}

template <Scalar T>
bool pair_complete(const Trace<T>& trace, const SyncSplitPair<T>& pair) {
  return pair.end_t <= trace.length();
}

}  // namespace detail

// Whole-trace wrappers over the per-phase lemma checkers.
template <Scalar T>
Report verify_sync_phases(const Trace<T>& trace, const Segmentation<T>& seg) {
  Report rep{"sync_phase"};
  for (const Phase& ph : seg.phases) {
    if (ph.sync()) detail::merge<T>(rep, verify_sync_phase(trace, ph));
  }
  return rep;
}

template <Scalar T>
Report verify_split_phases(const Trace<T>& trace, const Segmentation<T>& seg) {
  Report rep{"split_phase"};
  for (const Phase& ph : seg.phases) {
    if (!ph.sync()) detail::merge<T>(rep, verify_split_phase(trace, ph));
  }
  return rep;
}

// Lemma (pair conservation): over a sync-split(i -> j) pair the gap grows by
// eps in [0, 2*A_max], the weight entries shift by eps/A_ll, the j-entry
// moves to the i-entry with a (1/A_ii + 1/A_jj) eps bonus, and both pivot
// entries are zero at pair boundaries; plus the corollary sandwich bounds.
template <Scalar T>
Report verify_pair_conservation(const Trace<T>& trace, const SyncSplitPair<T>& pair) {
  Report rep{"pair_conservation"};
  const Matrix<T>& a = trace.matrix;
  if (!detail::pair_complete(trace, pair)) {
    rep.not_applicable("pair is truncated by the end of the trace");
    return rep;
  }
  const Snapshot<T>* at = detail::need_snapshot(trace, pair.start_t, "verify_pair_conservation");
  const Snapshot<T>* after = detail::need_snapshot(trace, pair.end_t, "verify_pair_conservation");
  const auto w0 = weight_vector_from_state(at->p, at->q, a);
  const auto w1 = weight_vector_from_state(after->p, after->q, a);
  const Field<T> eps = field_ratio(pair.epsilon(), a.scale());
  const int i = pair.from, j = pair.to;
  double m = 0.0;
  rep.record(detail::field_le<T>(Field<T>(0), eps, &m), m, pair.start_t, "eps < 0");
  rep.record(detail::field_le<T>(eps, Field<T>(2) * field_ratio(a.a_max(), a.scale()), &m), m,
             pair.start_t, "eps > 2*A_max");
  for (int l = 1; l <= a.n(); ++l) {
    if (l == i || l == j) continue;
    const Field<T> diff = w1[static_cast<std::size_t>(l - 1)] - w0[static_cast<std::size_t>(l - 1)];
    rep.record(detail::field_eq<T>(diff, field_ratio(pair.epsilon(), a.diag_at(l - 1)), &m), m,
               pair.start_t, "w shift mismatch at entry " + std::to_string(l));
    rep.record(detail::field_le<T>(field_ratio(pair.epsilon(), a.a_max()), diff, &m), m,
               pair.start_t, "w shift below eps/A_max at entry " + std::to_string(l));
    rep.record(detail::field_le<T>(diff, field_ratio(pair.epsilon(), a.a_min()), &m), m,
               pair.start_t, "w shift above eps/A_min at entry " + std::to_string(l));
  }
  const Field<T> transfer = w1[static_cast<std::size_t>(i - 1)] - w0[static_cast<std::size_t>(j - 1)];
  rep.record(detail::field_eq<T>(
                 transfer, (detail::one_over(a, i) + detail::one_over(a, j)) * eps, &m),
             m, pair.start_t, "i-entry transfer mismatch");
  rep.record(detail::field_le<T>(Field<T>(2) * field_ratio(pair.epsilon(), a.a_max()), transfer, &m),
             m, pair.start_t, "transfer below 2*eps/A_max");
  rep.record(detail::field_le<T>(transfer, Field<T>(2) * field_ratio(pair.epsilon(), a.a_min()), &m),
             m, pair.start_t, "transfer above 2*eps/A_min");
  rep.record(detail::field_eq<T>(w1[static_cast<std::size_t>(j - 1)], Field<T>(0), &m), m,
             pair.start_t, "w_j not zero at pair end");
  rep.record(detail::field_eq<T>(w0[static_cast<std::size_t>(i - 1)], Field<T>(0), &m), m,
             pair.start_t, "w_i not zero at pair start");
  return rep;
}

template <Scalar T>
Report verify_pair_conservation_all(const Trace<T>& trace, const Segmentation<T>& seg) {
  Report rep{"pair_conservation"};
  for (const auto& pair : seg.pairs) detail::merge<T>(rep, verify_pair_conservation(trace, pair));
  return rep;
}

// Lemma (pair length): w_j <= len <= (kappa+1) w_j + kappa + 2, with w_j the
// weight of the incoming action at the pair start.
template <Scalar T>
Report verify_pair_length(const Trace<T>& trace, const std::vector<SyncSplitPair<T>>& pairs) {
  Report rep{"pair_length"};
  const Matrix<T>& a = trace.matrix;
  const Field<T> kappa = detail::kappa_field(a);
  for (const auto& pair : pairs) {
    if (!detail::pair_complete(trace, pair)) continue;
    const Snapshot<T>* at = detail::need_snapshot(trace, pair.start_t, "verify_pair_length");
    const auto w = weight_vector_from_state(at->p, at->q, a);
    const Field<T> wj = w[static_cast<std::size_t>(pair.to - 1)];
    const Field<T> len(pair.len());
    double m = 0.0;
    rep.record(detail::field_le<T>(wj, len, &m), m, pair.start_t, "pair shorter than w_j");
    rep.record(detail::field_le<T>(len, (kappa + 1) * wj + kappa + 2, &m), m, pair.start_t,
               "pair longer than (kappa+1) w_j + kappa + 2");
  }
  return rep;
}

// Lemma (w vs psi) plus the T_1 bounds: at every pair start T_s and every
// entry i != i_s,
//   (psi(T_s) - psi(T_1)) / A_max <= w_i <= 2 (psi(T_s) - psi(T_1)) / A_min + 3 kappa + 2,
// with 1 <= T_1 <= kappa + 2 and 0 <= w(T_1) <= 3 kappa + 2 entrywise.
template <Scalar T>
Report verify_wpsi(const Trace<T>& trace, const std::vector<SyncSplitPair<T>>& pairs) {
  Report rep{"w_psi"};
  const Matrix<T>& a = trace.matrix;
  if (pairs.empty()) return rep;
  const Field<T> kappa = detail::kappa_field(a);
  const std::int64_t t1 = pairs.front().start_t;
  double m = 0.0;
  rep.record(detail::field_le<T>(Field<T>(t1), kappa + 2, &m), m, t1, "T_1 > kappa + 2");
  {
    const Snapshot<T>* at = detail::need_snapshot(trace, t1, "verify_wpsi");
    const auto w = weight_vector_from_state(at->p, at->q, a);
    for (int i = 1; i <= a.n(); ++i) {
      rep.record(detail::field_le<T>(Field<T>(0), w[static_cast<std::size_t>(i - 1)], &m), m, t1,
                 "w(T_1) negative");
      rep.record(detail::field_le<T>(w[static_cast<std::size_t>(i - 1)], Field<T>(3) * kappa + 2, &m),
                 m, t1, "w(T_1) above 3 kappa + 2");
    }
  }
  const T psi1 = trace.psi(t1);
  for (const auto& pair : pairs) {
    const Snapshot<T>* at = detail::need_snapshot(trace, pair.start_t, "verify_wpsi");
    const auto w = weight_vector_from_state(at->p, at->q, a);
    const T dpsi = trace.psi(pair.start_t) - psi1;
    for (int i = 1; i <= a.n(); ++i) {
      if (i == pair.from) continue;
      rep.record(detail::field_le<T>(field_ratio(dpsi, a.a_max()),
                                     w[static_cast<std::size_t>(i - 1)], &m),
                 m, pair.start_t, "w below (psi - psi(T_1))/A_max at entry " + std::to_string(i));
      rep.record(detail::field_le<T>(w[static_cast<std::size_t>(i - 1)],
                                     Field<T>(2) * field_ratio(dpsi, a.a_min()) +
                                         Field<T>(3) * kappa + 2,
                                     &m),
                 m, pair.start_t, "w above 2(psi - psi(T_1))/A_min + 3 kappa + 2 at entry " +
                                      std::to_string(i));
    }
  }
  return rep;
}

// Theorem (upper bound): psi(x_t, y_t) <= 8 A_max sqrt(t) at every round;
// plus the two-sided pair-start bound
//   A_min/2 ((T_{s+1}-T_1)/(s(kappa+1)) - (7 kappa + 4))
//     <= psi(T_s) - psi(T_1) <= 3 A_max sqrt(T_{s+1}-T_1).
template <Scalar T>
Report verify_upper_bound(const Trace<T>& trace, const std::vector<SyncSplitPair<T>>& pairs) {
  Report rep{"upper_bound"};
  const Matrix<T>& a = trace.matrix;
  double m = 0.0;
  for (std::int64_t t = 1; t <= trace.length(); ++t) {
    rep.record(detail::le_sqrt<T>(trace.psi(t), T{8} * a.a_max(), t, &m),
               m / static_cast<double>(a.scale()), t, "psi above 8 A_max sqrt(t)");
  }
  if (pairs.empty()) return rep;
  const std::int64_t t1 = pairs.front().start_t;
  const T psi1 = trace.psi(t1);
  const Field<T> kappa = detail::kappa_field(a);
  for (const auto& pair : pairs) {
    if (!detail::pair_complete(trace, pair)) continue;
    const T d = trace.psi(pair.start_t) - psi1;
    const std::int64_t span = pair.end_t - t1;
    rep.record(detail::le_sqrt<T>(d, T{3} * a.a_max(), span, &m),
               m / static_cast<double>(a.scale()), pair.start_t,
               "psi(T_s) - psi(T_1) above 3 A_max sqrt(T_{s+1}-T_1)");
    const Field<T> lhs = field_ratio(a.a_min(), a.scale()) / 2 *
                         (Field<T>(span) / (Field<T>(pair.s) * (kappa + 1)) -
                          (Field<T>(7) * kappa + 4));
    rep.record(detail::field_le<T>(lhs, field_ratio(d, a.scale()), &m), m, pair.start_t,
               "psi(T_s) - psi(T_1) below the pair-count lower bound");
  }
  return rep;
}

// Theorem (identity lower bound) and its supporting lemmas, exact mode only:
//   (1) psi is integral (inherent in the integer backend, asserted >= 0);
//   (2) psi(x_t, y_t) >= sqrt(t)/(7n) - 2n at every round;
//   (3) psi gains at least 2 over every n consecutive sync-split pairs;
//   (4) T_{s+1} <= 196 s^2;
//   (5) at every phase transition the gap increment is 0 or 1 exactly as
//       dictated by the sigma comparisons.
inline Report verify_identity_lower(const Trace<std::int64_t>& trace,
                                    const Segmentation<std::int64_t>& seg) {
  using T = std::int64_t;
  Report rep{"identity_lower"};
  const Matrix<T>& a = trace.matrix;
  if (a.structure() != Structure::kIdentity || a.scale() != 1) {
    throw PreconditionError("verify_identity_lower requires the identity matrix in exact mode");
  }
  auto is_vertex = [&](const std::vector<T>& z) {
    int ones = 0;
    for (T v : z) {
      if (v == 1) {
        ++ones;
      } else if (v != 0) {
        return false;
      }
    }
    return ones == 1;
  };
  if (!is_vertex(trace.x0) || !is_vertex(trace.y0)) {
    throw PreconditionError("verify_identity_lower requires a vertex start");
  }
  const int n = a.n();
  for (std::int64_t t = 1; t <= trace.length(); ++t) {
    const T psi = trace.psi(t);
    rep.record(psi >= 0, static_cast<double>(psi), t, "psi negative");
    // psi + 2n >= sqrt(t)/(7n)  <=>  (7n (psi + 2n))^2 >= t.
    const __int128 lhs = static_cast<__int128>(7 * n) * (psi + 2 * n);
    const bool ok = lhs * lhs >= t;
    rep.record(ok,
               static_cast<double>(psi) -
                   (std::sqrt(static_cast<double>(t)) / (7.0 * n) - 2.0 * n),
               t, "psi below sqrt(t)/(7n) - 2n");
  }
  const auto& pairs = seg.pairs;
  for (std::size_t s = 0; s + n < pairs.size(); ++s) {
    const T gain = trace.psi(pairs[s + static_cast<std::size_t>(n)].start_t) -
                   trace.psi(pairs[s].start_t);
    rep.record(gain >= 2, static_cast<double>(gain - 2), pairs[s].start_t,
               "psi gained less than 2 over n pairs");
  }
  for (std::size_t s = 0; s + 1 < pairs.size(); ++s) {
    const std::int64_t t_next = pairs[s + 1].start_t;
    const std::int64_t bound = 196 * static_cast<std::int64_t>(s + 1) *
                               static_cast<std::int64_t>(s + 1);
    rep.record(t_next <= bound, static_cast<double>(bound - t_next), t_next,
               "T_{s+1} above 196 s^2");
  }
  // Phase transitions: gap increments forced by the tie-break comparisons.
  for (std::size_t k = 0; k + 1 < seg.phases.size(); ++k) {
    const Phase& cur = seg.phases[k];
    const Phase& nxt = seg.phases[k + 1];
    if (nxt.start_t > trace.length()) break;
    const T dpsi = trace.psi(nxt.start_t) - trace.psi(nxt.start_t - 1);
    T expect = 0;
    if (cur.sync() && !nxt.sync()) {
      const int i = cur.i, j = nxt.i;
      expect = trace.rule.sigma_x[static_cast<std::size_t>(i - 1)] >
                       trace.rule.sigma_x[static_cast<std::size_t>(j - 1)]
                   ? 0
                   : 1;
    } else if (!cur.sync() && nxt.sync()) {
      const int i = cur.j, j = cur.i;
      expect = trace.rule.sigma_y[static_cast<std::size_t>(i - 1)] >
                       trace.rule.sigma_y[static_cast<std::size_t>(j - 1)]
                   ? 0
                   : 1;
    } else {
      rep.record(false, -1.0, nxt.start_t, "phase alternation broken");
      continue;
    }
    rep.record(dpsi == expect, dpsi == expect ? 0.0 : -1.0, nxt.start_t,
               "transition increment " + std::to_string(dpsi) + ", expected " +
                   std::to_string(expect));
  }
  return rep;
}

// Helper-lemma oracle: for 0 <= eps_r <= eps_max and E = sum eps_r,
//   sum_r (s-r+1) eps_r <= s (E + eps_max),
// and when E >= 2 eps_max also >= E^2 / (4 eps_max).
struct SumInequality {
  double weighted_sum = 0.0;
  double upper = 0.0;
  double lower = 0.0;
  bool lower_applicable = false;
  bool ok = false;
};

inline SumInequality sum_inequality_oracle(const std::vector<double>& eps, double eps_max) {
  if (eps_max < 0) throw PreconditionError("eps_max must be nonnegative");
  SumInequality out;
  const std::size_t s = eps.size();
  double total = 0.0;
  for (std::size_t r = 0; r < s; ++r) {
    if (eps[r] < 0 || eps[r] > eps_max + 1e-12 * (1.0 + eps_max)) {
      throw PreconditionError("eps entry out of [0, eps_max]");
    }
    total += eps[r];
    out.weighted_sum += static_cast<double>(s - r) * eps[r];
  }
  out.upper = static_cast<double>(s) * (total + eps_max);
  out.lower_applicable = eps_max > 0 && total >= 2 * eps_max;
  out.lower = out.lower_applicable ? total * total / (4 * eps_max) : 0.0;
  const double slack = 1e-9 * (1.0 + out.weighted_sum);
  out.ok = out.weighted_sum <= out.upper + slack &&
           (!out.lower_applicable || out.weighted_sum >= out.lower - slack);
  return out;
}

// Every applicable checker over one trace. For non-diagonal matrices only
// segmentation and gap monotonicity apply; the structure lemmas are reported
// as not applicable rather than failing.
template <Scalar T>
std::vector<Report> verify_all(const Trace<T>& trace) {
  std::vector<Report> reports;
  const Segmentation<T> seg = segment_phases(trace);
  reports.push_back(verify_gap_monotone(trace));
  if (!trace.matrix.is_diagonal()) {
    for (const char* name :
         {"alternation", "sync_phase", "split_phase", "pair_conservation", "pair_length", "w_psi",
          "upper_bound"}) {
      Report rep{name};
      rep.not_applicable("structure lemmas require a diagonal matrix");
      reports.push_back(std::move(rep));
    }
    return reports;
  }
  reports.push_back(verify_alternation(seg));
  reports.push_back(verify_sync_phases(trace, seg));
  reports.push_back(verify_split_phases(trace, seg));
  reports.push_back(verify_pair_conservation_all(trace, seg));
  reports.push_back(verify_pair_length(trace, seg.pairs));
  reports.push_back(verify_wpsi(trace, seg.pairs));
  reports.push_back(verify_upper_bound(trace, seg.pairs));
  if constexpr (std::is_same_v<T, std::int64_t>) {
    if (trace.matrix.structure() == Structure::kIdentity && trace.matrix.scale() == 1 &&
        trace.kind == Dynamic::kFP) {
      reports.push_back(verify_identity_lower(trace, seg));
    }
  }
  return reports;
}

}  // namespace fplay
