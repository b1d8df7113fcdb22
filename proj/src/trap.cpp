#include "blowup/trap.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "json.hpp"

namespace blowup {
namespace {

TrapRecord lerp(const TrapRecord& a, const TrapRecord& b, double s) {
  const double w = (s - a.s) / (b.s - a.s);
  auto mix = [w](double x, double y) { return x + w * (y - x); };
  return {s,
          mix(a.q0, b.q0),
          mix(a.q1, b.q1),
          mix(a.q2, b.q2),
          mix(a.q_minus_weighted, b.q_minus_weighted),
          mix(a.q_e_sup, b.q_e_sup),
          mix(a.outer_sup, b.outer_sup)};
}

int sign(double v) { return v > 0 ? 1 : (v < 0 ? -1 : 0); }

}  // namespace

std::string to_string(Component c) {
  switch (c) {
    case Component::none: return "none";
    case Component::q0: return "q0";
    case Component::q1: return "q1";
    case Component::q2: return "q2";
    case Component::q_minus: return "q_minus";
    case Component::q_e: return "q_e";
    case Component::outer: return "outer";
  }
  return "unknown";
}

TrapRecord make_record(const ModeDecomposition& dec, double outer, const ProblemParams& params) {
  TrapRecord r;
  r.s = dec.s;
  r.q0 = dec.q0;
  r.q1 = dec.q1;
  r.q2 = dec.q2;
  const double window = 2.0 * params.K0 * std::sqrt(dec.s);
  for (std::size_t i = 0; i < dec.y.size(); ++i) {
    const double ay = std::abs(dec.y[i]);
    if (ay <= window) r.q_minus_weighted = std::max(r.q_minus_weighted, std::abs(dec.q_minus[i]) / (1.0 + ay * ay * ay));
    r.q_e_sup = std::max(r.q_e_sup, std::abs(dec.q_e[i]));
  }
  r.outer_sup = outer;
  return r;
}

TrapBounds trap_bounds(double s, const ProblemParams& params) {
  if (!(s > 1.0)) throw std::invalid_argument("trap bounds require s > 1");
  const double A = params.A;
  return {A / (s * s), A * A * std::log(s) / (s * s), A / (s * s), A / std::sqrt(s), params.eta0};
}

TrapStatus evaluate(const TrapRecord& r, const ProblemParams& params) {
  const auto b = trap_bounds(r.s, params);
  TrapStatus st;
  st.s = r.s;
  st.margins = {b.q01 - std::abs(r.q0), b.q01 - std::abs(r.q1), b.q2 - std::abs(r.q2),
                b.q_minus - r.q_minus_weighted, b.q_e - r.q_e_sup};
  st.outer_margin = b.outer - r.outer_sup;
  static constexpr Component order[] = {Component::q0, Component::q1, Component::q2, Component::q_minus,
                                        Component::q_e};
  for (std::size_t i = 0; i < 5; ++i) {
    if (st.margins[i] < 0.0) {
      st.violated = order[i];
      break;
    }
  }
  if (st.violated == Component::none && st.outer_margin < 0.0) st.violated = Component::outer;
  st.inside = st.violated == Component::none;
  if (st.violated == Component::q0) st.omega = sign(r.q0);
  if (st.violated == Component::q1) st.omega = sign(r.q1);
  if (st.violated == Component::q2) st.omega = sign(r.q2);
  return st;
}

TrapStatus check_VKA(const ModeDecomposition& dec, const ProblemParams& params) {
  return evaluate(make_record(dec, 0.0, params), params);
}

double outer_sup(const PeriodicField& field, double eps0) {
  double m = 0.0;
  for (std::size_t j = 0; j < field.n(); ++j)
    if (std::abs(field.theta(j)) >= eps0 / 2.0) m = std::max(m, std::abs(field.values[j]));
  return m;
}

double check_outer(const PeriodicField& field, const ProblemParams& params) {
  return params.eta0 - outer_sup(field, params.eps0);
}

ExitResult first_exit(std::span<const TrapRecord> records, const ProblemParams& params, double ds_tol) {
  if (records.empty()) throw std::invalid_argument("first_exit needs at least one record");
  ExitResult res;
  for (std::size_t k = 0; k < records.size(); ++k) {
    const auto st = evaluate(records[k], params);
    if (st.inside) continue;
    res.exited = true;
    res.frame = k;
    if (k == 0) {
      res.s_star = records[0].s;
      res.status = st;
      return res;
    }
    const auto& a = records[k - 1];
    const auto& b = records[k];
    double lo = a.s, hi = b.s;
    while (hi - lo > ds_tol) {
      const double mid = 0.5 * (lo + hi);
      if (evaluate(lerp(a, b, mid), params).inside) lo = mid;
      else hi = mid;
    }
    res.s_star = hi;
    res.status = evaluate(lerp(a, b, hi), params);
    return res;
  }
  res.frame = records.size() - 1;
  res.s_star = records.back().s;
  res.status = evaluate(records.back(), params);
  return res;
}

TransverseResult transverse_check(std::span<const TrapRecord> records, double s_star, Component m, int omega) {
  if (m != Component::q0 && m != Component::q1)
    throw std::invalid_argument("transverse_check applies to q0 and q1 exits");
  if (records.size() < 5) throw std::invalid_argument("transverse_check needs at least five records");
  std::vector<std::size_t> idx(records.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(records[a].s - s_star) < std::abs(records[b].s - s_star);
  });
  idx.resize(5);
  // Normal equations of q = c0 + c1 x + c2 x^2, x = s - s_star.
  double S[5] = {0, 0, 0, 0, 0}, Q[3] = {0, 0, 0};
  for (std::size_t i : idx) {
    const double x = records[i].s - s_star;
    const double q = m == Component::q0 ? records[i].q0 : records[i].q1;
    double xp = 1.0;
    for (int k = 0; k < 5; ++k) {
      S[k] += xp;
      if (k < 3) Q[k] += xp * q;
      xp *= x;
    }
  }
  double M[3][4] = {{S[0], S[1], S[2], Q[0]}, {S[1], S[2], S[3], Q[1]}, {S[2], S[3], S[4], Q[2]}};
  for (int c = 0; c < 3; ++c) {
    int piv = c;
    for (int r = c + 1; r < 3; ++r)
      if (std::abs(M[r][c]) > std::abs(M[piv][c])) piv = r;
    std::swap(M[c], M[piv]);
    if (M[c][c] == 0.0) throw std::invalid_argument("transverse_check: degenerate frame times");
    for (int r = 0; r < 3; ++r) {
      if (r == c) continue;
      const double f = M[r][c] / M[c][c];
      for (int k = c; k < 4; ++k) M[r][k] -= f * M[c][k];
    }
  }
  const double c0 = M[0][3] / M[0][0];
  const double c1 = M[1][3] / M[1][1];
  const double lambda = m == Component::q0 ? 1.0 : 0.5;
  TransverseResult r;
  r.derivative = c1;
  r.satisfied = omega * c1 > 0.0;
  r.inetrans = std::abs(c1 - lambda * c0) * s_star * s_star;
  return r;
}

ImprovedMargins improved_bounds(const TrapRecord& r, const ProblemParams& params) {
  const double s = r.s, A = params.A;
  return {A * A * std::log(s) / (s * s) - std::pow(s, -3.0) - std::abs(r.q2), 0.5 * A / std::sqrt(s) - r.q_e_sup};
}

void write_exit_record(std::ostream& os, double d0, double d1, const ExitResult& exit) {
  nlohmann::ordered_json j;
  j["d0"] = d0;
  j["d1"] = d1;
  j["s_star"] = exit.s_star;
  j["violated"] = exit.exited ? to_string(exit.status.violated) : std::string("still_trapped");
  j["omega"] = exit.status.omega;
  nlohmann::ordered_json m;
  m["q0"] = exit.status.margins[0];
  m["q1"] = exit.status.margins[1];
  m["q2"] = exit.status.margins[2];
  m["q_minus"] = exit.status.margins[3];
  m["q_e"] = exit.status.margins[4];
  m["outer"] = exit.status.outer_margin;
  j["margins_at_exit"] = m;
  os << j.dump() << '\n';
}

}  // namespace blowup
