#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fplay/analysis.hpp"
#include "fplay/dynamics.hpp"
#include "fplay/errors.hpp"
#include "fplay/experiments.hpp"
#include "fplay/matrix.hpp"
#include "fplay/verify.hpp"

namespace fplay {

// Matrix input: {"n": int, "entries": [[row-major reals]]}, {"diag": [reals]},
// or the identity shorthand {"identity": n}.
inline Matrix<double> matrix_from_json(const nlohmann::json& j) {
  if (j.contains("identity")) return Matrix<double>::identity(j.at("identity").get<int>());
  if (j.contains("diag")) {
    return Matrix<double>::diagonal(j.at("diag").get<std::vector<double>>());
  }
  if (j.contains("n") && j.contains("entries")) {
    const int n = j.at("n").get<int>();
    std::vector<double> flat;
    flat.reserve(static_cast<std::size_t>(n) * n);
    for (const auto& row : j.at("entries")) {
      for (const auto& v : row) flat.push_back(v.get<double>());
    }
    return Matrix<double>::general(n, std::move(flat));
  }
  throw ConfigError("matrix JSON needs \"identity\", \"diag\", or \"n\"+\"entries\"");
}

// Smallest K <= limit scaling every entry to an integer, or 0 if none.
inline std::int64_t integer_scale(const std::vector<double>& entries, std::int64_t limit = 16384) {
  for (std::int64_t k = 1; k <= limit; ++k) {
    bool ok = true;
    for (double e : entries) {
      const double scaled = e * static_cast<double>(k);
      if (std::abs(scaled - std::llround(scaled)) > 1e-9) {
        ok = false;
        break;
      }
    }
    if (ok) return k;
  }
  return 0;
}

// Lift a float matrix into the exact integer backend. Fails when the entries
// are not scalable by a modest integer.
inline Matrix<std::int64_t> to_exact(const Matrix<double>& a) {
  const std::int64_t k = integer_scale(a.entries());
  if (k == 0) throw ConfigError("matrix entries are not integer-scalable; use float mode");
  std::vector<std::int64_t> flat;
  flat.reserve(a.entries().size());
  for (double e : a.entries()) flat.push_back(std::llround(e * static_cast<double>(k)));
  return Matrix<std::int64_t>::general(a.n(), std::move(flat), k);
}

namespace detail {

inline double real_units(std::int64_t v, std::int64_t scale) {
  return static_cast<double>(v) / static_cast<double>(scale);
}
inline double real_units(double v, double) { return v; }

template <Scalar T>
nlohmann::json vector_real(const std::vector<T>& v, T scale) {
  nlohmann::json arr = nlohmann::json::array();
  for (T e : v) arr.push_back(real_units(e, scale));
  return arr;
}

}  // namespace detail

// One RoundRecord per line; snapshot rounds additionally carry the state and
// derived vectors. psi and the arrays are in real (unscaled) units.
template <Scalar T>
void write_trace_jsonl(std::ostream& os, const Trace<T>& trace) {
  const T scale = trace.matrix.scale();
  for (const auto& r : trace.rounds) {
    nlohmann::json line{{"t", r.t},       {"i", r.i},
                        {"j", r.j},       {"psi", detail::real_units(r.psi, scale)},
                        {"tie_x", r.tie_x}, {"tie_y", r.tie_y}};
    if (const Snapshot<T>* snap = trace.snapshot(r.t); snap != nullptr) {
      line["p"] = detail::vector_real(snap->p, scale);
      line["q"] = detail::vector_real(snap->q, scale);
      const auto [u, v] = gap_vectors(snap->p, snap->q);
      line["u"] = detail::vector_real(u, scale);
      line["v"] = detail::vector_real(v, scale);
      if (trace.matrix.is_diagonal()) {
        const auto w = weight_vector_from_state(snap->p, snap->q, trace.matrix);
        nlohmann::json warr = nlohmann::json::array();
        for (const auto& e : w) warr.push_back(field_to_double(e));
        line["w"] = warr;
      }
    }
    os << line.dump() << "\n";
  }
}

// Read a JSONL trace back, attaching the payoff matrix it was produced with.
// Only rounds and p/q snapshots survive the round trip; the final state does
// not, so trailing-pair checks are skipped on loaded traces.
inline Trace<double> read_trace_jsonl(std::istream& is, const Matrix<double>& a) {
  Trace<double> trace{Dynamic::kFP, a, TieBreak::identity(a.n())};
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const nlohmann::json j = nlohmann::json::parse(line);
    Round<double> r{j.at("t").get<std::int64_t>(), j.at("i").get<int>(), j.at("j").get<int>(),
                    j.at("psi").get<double>(), j.value("tie_x", false), j.value("tie_y", false)};
    trace.rounds.push_back(r);
    if (j.contains("p") && j.contains("q")) {
      Snapshot<double> snap;
      snap.t = r.t;
      snap.p = j.at("p").get<std::vector<double>>();
      snap.q = j.at("q").get<std::vector<double>>();
      trace.snapshots.push_back(std::move(snap));
    }
  }
  if (trace.rounds.empty()) throw ConfigError("trace file contains no rounds");
  return trace;
}

inline nlohmann::json report_to_json(const Report& rep) {
  return nlohmann::json{{"theorem", rep.theorem},
                        {"applicable", rep.applicable},
                        {"holds", rep.holds},
                        {"worst_margin", std::isfinite(rep.worst_margin) ? rep.worst_margin : 0.0},
                        {"worst_t", rep.worst_t},
                        {"checks", rep.checks},
                        {"failures", rep.failures}};
}

// Curve CSV: header t,max_gap,max_gap_sq_over_t, one row per recorded round.
inline void write_curve_csv(std::ostream& os, const std::vector<CurvePoint>& curve) {
  os << "t,max_gap,max_gap_sq_over_t\n";
  char buf[128];
  for (const auto& pt : curve) {
    std::snprintf(buf, sizeof(buf), "%lld,%.17g,%.17g\n", static_cast<long long>(pt.t),
                  pt.max_gap, pt.max_gap_sq_over_t);
    os << buf;
  }
}

// Experiment config JSON mirrors ExperimentConfig.
inline ExperimentConfig experiment_config_from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  cfg.n = j.value("n", 10);
  cfg.runs = j.value("runs", 100);
  cfg.rounds = j.value("rounds", std::int64_t{10000});
  cfg.seed = j.value("seed", std::uint64_t{0});
  cfg.output_path = j.value("output_path", std::string{});
  const std::string dyn = j.value("dynamic", std::string{"fp"});
  if (dyn == "fp") {
    cfg.dynamic = Dynamic::kFP;
  } else if (dyn == "afp") {
    cfg.dynamic = Dynamic::kAFP;
  } else if (dyn == "ofp") {
    cfg.dynamic = Dynamic::kOFP;
  } else {
    throw ConfigError("dynamic must be fp, afp, or ofp");
  }
  if (j.contains("matrix_family")) {
    const auto& f = j.at("matrix_family");
    if (f.is_string() && f.get<std::string>() == "identity") {
      cfg.family = MatrixFamily::identity();
    } else if (f.contains("gaussian")) {
      cfg.family = MatrixFamily::gaussian(f.at("gaussian").value("mean", 0.0),
                                          f.at("gaussian").value("std", 1.0));
    } else if (f.contains("diagonal_uniform")) {
      cfg.family = MatrixFamily::diagonal_uniform(f.at("diagonal_uniform").value("lo", 0.5),
                                                  f.at("diagonal_uniform").value("hi", 2.0));
    } else {
      throw ConfigError("matrix_family must be \"identity\", {gaussian}, or {diagonal_uniform}");
    }
  }
  if (j.contains("tiebreak") && j.at("tiebreak") != "identity") {
    TieBreak rule;
    rule.sigma_x = j.at("tiebreak").at("sigma_x").get<std::vector<int>>();
    rule.sigma_y = j.at("tiebreak").at("sigma_y").get<std::vector<int>>();
    // Accept 1-based ranks.
    for (auto* s : {&rule.sigma_x, &rule.sigma_y}) {
      const bool one_based =
          std::find(s->begin(), s->end(), 0) == s->end() &&
          std::find(s->begin(), s->end(), cfg.n) != s->end();
      if (one_based) {
        for (int& v : *s) --v;
      }
    }
    cfg.tiebreak = rule;
  }
  if (j.contains("start") && j.at("start") != "e1e1" && j.at("start") != "e1,e1") {
    const auto arr = j.at("start").get<std::vector<int>>();
    if (arr.size() != 2) throw ConfigError("start must be two vertex indices");
    cfg.start = std::make_pair(arr[0], arr[1]);
  }
  return cfg;
}

}  // namespace fplay
