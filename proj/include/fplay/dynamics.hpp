#pragma once

#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fplay/errors.hpp"
#include "fplay/gap.hpp"
#include "fplay/matrix.hpp"

namespace fplay {

enum class Dynamic { kFP, kAFP, kOFP };

// Fixed lexicographic tie-breaking order. sigma_x[i] / sigma_y[j] is the
// priority rank of action i (0-based); the tied action with the lowest rank
// wins. Each sigma must be a permutation of {0..n-1}.
struct TieBreak {
  std::vector<int> sigma_x;
  std::vector<int> sigma_y;

  static TieBreak identity(int n) {
    TieBreak r;
    r.sigma_x.resize(static_cast<std::size_t>(n));
    std::iota(r.sigma_x.begin(), r.sigma_x.end(), 0);
    r.sigma_y = r.sigma_x;
    return r;
  }

  void validate(int n) const {
    for (const auto* s : {&sigma_x, &sigma_y}) {
      if (static_cast<int>(s->size()) != n) {
        throw DimensionError("tie-break permutation has wrong length");
      }
      std::vector<bool> seen(static_cast<std::size_t>(n), false);
      for (int r : *s) {
        if (r < 0 || r >= n || seen[static_cast<std::size_t>(r)]) {
          throw PreconditionError("tie-break order is not a permutation");
        }
        seen[static_cast<std::size_t>(r)] = true;
      }
    }
  }
};

// Minimizer of p with ties (within tol) resolved by smallest sigma rank.
// Returns a 0-based action index; also reports whether the tie set had more
// than one member.
template <Scalar T>
std::pair<int, bool> best_response_min(const std::vector<T>& p, const std::vector<int>& sigma,
                                       T tol = T{0}) {
  if (p.empty()) throw DimensionError("best_response_min: empty vector");
  const T lo = *std::min_element(p.begin(), p.end());
  int best = -1;
  int members = 0;
  for (int i = 0; i < static_cast<int>(p.size()); ++i) {
    if (p[static_cast<std::size_t>(i)] <= lo + tol) {
      ++members;
      if (best < 0 || sigma[static_cast<std::size_t>(i)] < sigma[static_cast<std::size_t>(best)]) {
        best = i;
      }
    }
  }
  return {best, members > 1};
}

// Maximizer mirror of best_response_min.
template <Scalar T>
std::pair<int, bool> best_response_max(const std::vector<T>& q, const std::vector<int>& sigma,
                                       T tol = T{0}) {
  if (q.empty()) throw DimensionError("best_response_max: empty vector");
  const T hi = *std::max_element(q.begin(), q.end());
  int best = -1;
  int members = 0;
  for (int j = 0; j < static_cast<int>(q.size()); ++j) {
    if (q[static_cast<std::size_t>(j)] >= hi - tol) {
      ++members;
      if (best < 0 || sigma[static_cast<std::size_t>(j)] < sigma[static_cast<std::size_t>(best)]) {
        best = j;
      }
    }
  }
  return {best, members > 1};
}

// One simulated round. Actions are 1-indexed to match the usual game-theory
// convention (and the JSONL trace schema); psi is the duality gap of the
// state at the start of the round, in engine units (scaled by the matrix
// scale in exact mode).
template <Scalar T>
struct Round {
  std::int64_t t = 0;
  int i = 0;
  int j = 0;
  T psi{};
  bool tie_x = false;
  bool tie_y = false;

  std::pair<int, int> type() const { return {i, j}; }
  bool sync() const { return i == j; }
};

// Live engine state. p and q are maintained incrementally and must equal
// A*y and x^T A at all times; audits recompute them from scratch.
template <Scalar T>
struct State {
  Dynamic kind = Dynamic::kFP;
  std::int64_t t = 1;
  std::vector<T> x, y;
  std::vector<T> p, q;
  int prev_i = -1;  // last played actions, 0-based (OFP history)
  int prev_j = -1;
  T tol{};

  static State make(Dynamic kind, const Matrix<T>& a, std::vector<T> x0, std::vector<T> y0,
                    T tol = T{0}) {
    detail::check_length(x0, a.n(), "x0");
    detail::check_length(y0, a.n(), "y0");
    State s;
    s.kind = kind;
    s.x = std::move(x0);
    s.y = std::move(y0);
    s.p = loss_vector(a, s.y);
    s.q = payoff_vector(a, s.x);
    s.tol = tol;
    return s;
  }
};

namespace detail {

// In exact mode, verify that one more step cannot overflow before mutating
// anything; an OverflowError must leave the state untouched.
template <Scalar T>
void precheck_overflow(const State<T>& s, const Matrix<T>& a) {
  if constexpr (std::is_same_v<T, std::int64_t>) {
    constexpr std::int64_t kGuard = std::int64_t{1} << 60;
    const std::int64_t margin = 4 * std::max<std::int64_t>(a.max_abs_entry(), 1);
    for (const auto* v : {&s.p, &s.q, &s.x, &s.y}) {
      for (std::int64_t e : *v) {
        if (e > kGuard - margin || e < -kGuard + margin) {
          throw OverflowError("exact-mode state exceeds the integer overflow guard");
        }
      }
    }
  }
}

// v += c * (column j of A).
template <Scalar T>
void add_col(std::vector<T>& v, const Matrix<T>& a, int j, T c) {
  if (a.is_diagonal()) {
    v[static_cast<std::size_t>(j)] += c * a.diag_at(j);
    return;
  }
  for (int i = 0; i < a.n(); ++i) v[static_cast<std::size_t>(i)] += c * a(i, j);
}

// v += c * (row i of A).
template <Scalar T>
void add_row(std::vector<T>& v, const Matrix<T>& a, int i, T c) {
  if (a.is_diagonal()) {
    v[static_cast<std::size_t>(i)] += c * a.diag_at(i);
    return;
  }
  for (int j = 0; j < a.n(); ++j) v[static_cast<std::size_t>(j)] += c * a(i, j);
}

}  // namespace detail

// Standard FP step: both best responses are computed from the round-t state
// before either side updates.
template <Scalar T>
Round<T> step_fp(State<T>& s, const Matrix<T>& a, const TieBreak& rule) {
  detail::precheck_overflow(s, a);
  const auto [i, tie_x] = best_response_min(s.p, rule.sigma_x, s.tol);
  const auto [j, tie_y] = best_response_max(s.q, rule.sigma_y, s.tol);
  Round<T> rec{s.t, i + 1, j + 1, duality_gap_from_state(s.p, s.q), tie_x, tie_y};
  detail::add_row(s.q, a, i, T{1});
  detail::add_col(s.p, a, j, T{1});
  s.x[static_cast<std::size_t>(i)] += T{1};
  s.y[static_cast<std::size_t>(j)] += T{1};
  s.prev_i = i;
  s.prev_j = j;
  s.t += 1;
  return rec;
}

// Alternating FP: the row player moves first; the column player responds to
// the already-updated row history.
template <Scalar T>
Round<T> step_afp(State<T>& s, const Matrix<T>& a, const TieBreak& rule) {
  detail::precheck_overflow(s, a);
  const T psi = duality_gap_from_state(s.p, s.q);
  const auto [i, tie_x] = best_response_min(s.p, rule.sigma_x, s.tol);
  detail::add_row(s.q, a, i, T{1});
  s.x[static_cast<std::size_t>(i)] += T{1};
  const auto [j, tie_y] = best_response_max(s.q, rule.sigma_y, s.tol);
  detail::add_col(s.p, a, j, T{1});
  s.y[static_cast<std::size_t>(j)] += T{1};
  Round<T> rec{s.t, i + 1, j + 1, psi, tie_x, tie_y};
  s.prev_i = i;
  s.prev_j = j;
  s.t += 1;
  return rec;
}

// Optimistic FP: best-respond to the optimistic state, then double-count the
// fresh action and remove the previous one. Round 1 has no history, so it is
// a plain FP step that seeds prev_i/prev_j. Entries of x and y may go
// transiently negative; the gap is defined on all of R^n.
template <Scalar T>
Round<T> step_ofp(State<T>& s, const Matrix<T>& a, const TieBreak& rule) {
  if (s.prev_i < 0) return step_fp(s, a, rule);
  detail::precheck_overflow(s, a);
  const auto [i, tie_x] = best_response_min(s.p, rule.sigma_x, s.tol);
  const auto [j, tie_y] = best_response_max(s.q, rule.sigma_y, s.tol);
  Round<T> rec{s.t, i + 1, j + 1, duality_gap_from_state(s.p, s.q), tie_x, tie_y};
  detail::add_row(s.q, a, i, T{2});
  detail::add_row(s.q, a, s.prev_i, T{-1});
  detail::add_col(s.p, a, j, T{2});
  detail::add_col(s.p, a, s.prev_j, T{-1});
  s.x[static_cast<std::size_t>(i)] += T{2};
  s.x[static_cast<std::size_t>(s.prev_i)] -= T{1};
  s.y[static_cast<std::size_t>(j)] += T{2};
  s.y[static_cast<std::size_t>(s.prev_j)] -= T{1};
  s.prev_i = i;
  s.prev_j = j;
  s.t += 1;
  return rec;
}

template <Scalar T>
Round<T> step(State<T>& s, const Matrix<T>& a, const TieBreak& rule) {
  switch (s.kind) {
    case Dynamic::kFP:
      return step_fp(s, a, rule);
    case Dynamic::kAFP:
      return step_afp(s, a, rule);
    case Dynamic::kOFP:
      return step_ofp(s, a, rule);
  }
  throw PreconditionError("unknown dynamic kind");
}

struct SnapshotPolicy {
  enum class Kind { kNone, kFull, kStrided, kBoundaries } kind = Kind::kNone;
  std::int64_t stride = 1;

  static SnapshotPolicy none() { return {Kind::kNone, 1}; }
  static SnapshotPolicy full() { return {Kind::kFull, 1}; }
  static SnapshotPolicy strided(std::int64_t k) { return {Kind::kStrided, k}; }
  // Snapshot at every phase start (round where the type changes): exactly
  // what the lemma checkers need, at O(#phases * n) memory.
  static SnapshotPolicy boundaries() { return {Kind::kBoundaries, 1}; }
};

// State snapshot at the start of round t (before the round-t actions).
template <Scalar T>
struct Snapshot {
  std::int64_t t = 0;
  std::vector<T> x, y, p, q;
};

template <Scalar T>
struct Trace {
  Dynamic kind = Dynamic::kFP;
  Matrix<T> matrix;
  TieBreak rule;
  std::vector<T> x0, y0;
  std::vector<Round<T>> rounds;
  std::vector<Snapshot<T>> snapshots;  // sorted by t; always includes t = last+1
  Snapshot<T> final_state;             // state after the last round
  std::optional<std::string> error;    // set when the run stopped early

  std::int64_t length() const { return static_cast<std::int64_t>(rounds.size()); }

  const Round<T>& round(std::int64_t t) const { return rounds[static_cast<std::size_t>(t - 1)]; }

  // Traces loaded from a JSONL file carry no final state.
  bool has_final() const { return final_state.t == length() + 1 && !final_state.p.empty(); }

  // Gap at the start of round t; t = length()+1 queries the final state.
  T psi(std::int64_t t) const {
    if (t == length() + 1) {
      if (!has_final()) {
        throw InsufficientDataError("trace has no state beyond its last round");
      }
      return duality_gap_from_state(final_state.p, final_state.q);
    }
    return round(t).psi;
  }

  const Snapshot<T>* snapshot(std::int64_t t) const {
    if (t == final_state.t) return &final_state;
    auto it = std::lower_bound(snapshots.begin(), snapshots.end(), t,
                               [](const Snapshot<T>& s, std::int64_t v) { return s.t < v; });
    if (it == snapshots.end() || it->t != t) return nullptr;
    return &*it;
  }
};

// Run `rounds` steps of the chosen dynamic, collecting round records and
// snapshots per policy. Stepper errors are annotated on the partial trace
// rather than thrown.
template <Scalar T>
Trace<T> run(Dynamic kind, const Matrix<T>& a, const TieBreak& rule, std::vector<T> x0,
             std::vector<T> y0, std::int64_t rounds,
             SnapshotPolicy policy = SnapshotPolicy::none(), T tol = T{0}) {
  if (rounds < 1) throw PreconditionError("round count must be >= 1");
  rule.validate(a.n());
  Trace<T> trace{kind, a, rule, x0, y0, {}, {}, {}, std::nullopt};
  trace.rounds.reserve(static_cast<std::size_t>(rounds));
  State<T> s = State<T>::make(kind, a, std::move(x0), std::move(y0), tol);
  int last_i = -1, last_j = -1;
  Snapshot<T> pre;
  for (std::int64_t t = 1; t <= rounds; ++t) {
    pre = Snapshot<T>{t, s.x, s.y, s.p, s.q};
    Round<T> rec;
    try {
      rec = step(s, a, rule);
    } catch (const Error& e) {
      trace.error = e.what();
      break;
    }
    bool want = false;
    switch (policy.kind) {
      case SnapshotPolicy::Kind::kNone:
        break;
      case SnapshotPolicy::Kind::kFull:
        want = true;
        break;
      case SnapshotPolicy::Kind::kStrided:
        want = (t - 1) % policy.stride == 0;
        break;
      case SnapshotPolicy::Kind::kBoundaries:
        want = t == 1 || rec.i != last_i || rec.j != last_j;
        break;
    }
    if (want) trace.snapshots.push_back(std::move(pre));
    last_i = rec.i;
    last_j = rec.j;
    trace.rounds.push_back(rec);
  }
  trace.final_state = Snapshot<T>{s.t, s.x, s.y, s.p, s.q};
  return trace;
}

}  // namespace fplay
