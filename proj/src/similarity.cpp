#include "blowup/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "blowup/io.hpp"

namespace blowup {
namespace {

double lagrange4(const double* x, const double* f, double at) {
  double out = 0.0;
  for (int i = 0; i < 4; ++i) {
    double w = 1.0;
    for (int j = 0; j < 4; ++j)
      if (j != i) w *= (at - x[j]) / (x[i] - x[j]);
    out += w * f[i];
  }
  return out;
}

double grid_spacing(const SimilarityFrame& frame) {
  if (frame.size() < 6) throw std::invalid_argument("similarity frame needs at least 6 nodes");
  const double dy = frame.y[1] - frame.y[0];
  const double span = frame.y.back() - frame.y.front();
  if (std::abs(span - dy * static_cast<double>(frame.size() - 1)) > 1e-9 * span)
    throw std::invalid_argument("similarity frame grid is not uniform");
  return dy;
}

void fill_w_q(SimilarityFrame& fr) {
  const std::size_t n = fr.y.size();
  fr.w.resize(n);
  fr.q.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    fr.w[i] = fr.W[i] * chi(fr.y[i], fr.s, fr.eps0);
    fr.q[i] = fr.w[i] - profile_phi(fr.y[i], fr.s, fr.p);
  }
}

SimilarityFrame frame_header(const PeriodicField& field, double t, double T, const ProblemParams& params) {
  if (!(T > 0.0) || !(t >= 0.0) || !(t < T)) throw std::invalid_argument("to_similarity requires 0 <= t < T");
  SimilarityFrame fr;
  fr.tau = T - t;
  fr.s = -std::log(fr.tau);
  fr.p = params.p;
  fr.eps0 = params.eps0;
  fr.source = std::make_shared<const PeriodicField>(field);
  return fr;
}

}  // namespace

double frame_halfwidth(double s, const ProblemParams& params) {
  const double want = std::max(20.0, params.y_halfwidth_mult * 2.0 * params.K0 * std::sqrt(s));
  return std::min(want, std::numbers::pi * std::exp(s / 2.0));
}

double SimilarityFrame::W_at(double yy) const {
  const std::size_t n = y.size();
  if (n >= 4 && yy >= y[1] && yy <= y[n - 2]) {
    auto it = std::upper_bound(y.begin(), y.end(), yy);
    std::size_t i = static_cast<std::size_t>(it - y.begin());
    i = std::clamp<std::size_t>(i, 2, n - 2);
    return lagrange4(&y[i - 2], &W[i - 2], yy);
  }
  if (!source) throw std::out_of_range("y outside the stored frame and no source field");
  return std::pow(tau, 1.0 / (p - 1.0)) * source->interpolate(yy * std::sqrt(tau));
}

double SimilarityFrame::q_at(double yy) const {
  return W_at(yy) * chi(yy, s, eps0) - profile_phi(yy, s, p);
}

SimilarityFrame to_similarity(const PeriodicField& field, double t, double T, const ProblemParams& params) {
  auto fr = frame_header(field, t, T, params);
  const double Y = frame_halfwidth(fr.s, params);
  const double rt = std::sqrt(fr.tau);
  const double scale = std::pow(fr.tau, 1.0 / (params.p - 1.0));
  for (std::size_t j = 0; j < field.n(); ++j) {
    const double yy = field.theta(j) / rt;
    if (std::abs(yy) > Y) continue;
    fr.y.push_back(yy);
    fr.W.push_back(scale * field.values[j]);
  }
  fill_w_q(fr);
  return fr;
}

SimilarityFrame to_similarity(const PeriodicField& field, double t, double T, const ProblemParams& params,
                              std::span<const double> y_grid) {
  auto fr = frame_header(field, t, T, params);
  if (!std::is_sorted(y_grid.begin(), y_grid.end())) throw std::invalid_argument("y grid must be increasing");
  const double rt = std::sqrt(fr.tau);
  const double scale = std::pow(fr.tau, 1.0 / (params.p - 1.0));
  fr.y.assign(y_grid.begin(), y_grid.end());
  for (double yy : fr.y) {
    if (std::abs(yy * rt) > std::numbers::pi) throw std::invalid_argument("y grid leaves |y| <= pi e^{s/2}");
    fr.W.push_back(scale * field.interpolate(yy * rt));
  }
  fill_w_q(fr);
  return fr;
}

PeriodicField from_similarity(const SimilarityFrame& frame, std::size_t n) {
  const double rt = std::sqrt(frame.tau);
  const double scale = std::pow(frame.tau, -1.0 / (frame.p - 1.0));
  return PeriodicField::sample(n, [&](double th) { return scale * frame.W_at(th / rt); });
}

double potential_V(double y, double s, double p) {
  const double phi = profile_phi(y, s, p);
  return p * std::pow(phi, p - 1.0) - p / (p - 1.0);
}

double nonlinear_B(double q, double phi, double p) {
  const double v = phi + q;
  return std::pow(std::abs(v), p - 1.0) * v - std::pow(phi, p) - p * std::pow(phi, p - 1.0) * q;
}

double residual_R(double y, double s, double p, RReading reading) {
  if (!(s > 0.0)) throw std::invalid_argument("residual_R requires s > 0");
  const auto j = profile_phi_jet(y, s, p);
  const double source = reading == RReading::PhiPower ? std::pow(j.phi, p) : std::pow(j.phi, p - 1.0);
  return j.dyy - 0.5 * y * j.dy - j.phi / (p - 1.0) + source - j.ds;
}

double residual_R_sup(double s, double p, RReading reading, double ymax, int samples) {
  if (samples < 2) throw std::invalid_argument("residual_R_sup needs at least two samples");
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double y = -ymax + 2.0 * ymax * i / (samples - 1);
    worst = std::max(worst, std::abs(residual_R(y, s, p, reading)));
  }
  return worst;
}

void uniform_derivatives(std::span<const double> f, double h, std::span<double> d1, std::span<double> d2) {
  const std::size_t n = f.size();
  if (n < 6) throw std::invalid_argument("uniform_derivatives needs at least 6 points");
  const double a = 1.0 / (12.0 * h), b = 1.0 / (12.0 * h * h);
  for (std::size_t i = 2; i + 2 < n; ++i) {
    d1[i] = a * (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]);
    d2[i] = b * (-f[i - 2] + 16.0 * f[i - 1] - 30.0 * f[i] + 16.0 * f[i + 1] - f[i + 2]);
  }
  auto edge = [&](auto at, double sign, std::size_t i0, std::size_t i1) {
    d1[i0] = sign * a * (-25.0 * at(0) + 48.0 * at(1) - 36.0 * at(2) + 16.0 * at(3) - 3.0 * at(4));
    d1[i1] = sign * a * (-3.0 * at(0) - 10.0 * at(1) + 18.0 * at(2) - 6.0 * at(3) + at(4));
    d2[i0] = b * (45.0 * at(0) - 154.0 * at(1) + 214.0 * at(2) - 156.0 * at(3) + 61.0 * at(4) - 10.0 * at(5));
    d2[i1] = b * (10.0 * at(0) - 15.0 * at(1) - 4.0 * at(2) + 14.0 * at(3) - 6.0 * at(4) + at(5));
  };
  edge([&](std::size_t k) { return f[k]; }, 1.0, 0, 1);
  edge([&](std::size_t k) { return f[n - 1 - k]; }, -1.0, n - 1, n - 2);
}

QEquationTerms boundary_terms(const SimilarityFrame& frame, const ProblemParams& params) {
  const std::size_t n = frame.size();
  const double dy = grid_spacing(frame);
  const double p = params.p;
  std::vector<double> Wy(n), Wyy(n);
  uniform_derivatives(frame.W, dy, Wy, Wyy);

  QEquationTerms t;
  for (auto* v : {&t.V, &t.B, &t.R, &t.H, &t.G, &t.F, &t.F_direct}) v->assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double y = frame.y[i];
    const double phi = profile_phi(y, frame.s, p);
    t.V[i] = potential_V(y, frame.s, p);
    t.B[i] = nonlinear_B(frame.q[i], phi, p);
    t.R[i] = residual_R(y, frame.s, p);
    const auto c = chi_jet(y, frame.s, params.eps0);
    const double W = frame.W[i];
    const double nl = std::pow(std::abs(W), p - 1.0) * W * (c.value - std::pow(c.value, p));
    t.H[i] = W * (c.ds + c.dyy + 0.5 * y * c.dy) + nl;
    t.G[i] = -2.0 * c.dy * W;
    t.F[i] = t.H[i] - 2.0 * (c.dyy * W + c.dy * Wy[i]);
    t.F_direct[i] = W * (c.ds - c.dyy + 0.5 * y * c.dy) - 2.0 * c.dy * Wy[i] + nl;
  }
  return t;
}

std::vector<double> q_equation_rhs(const SimilarityFrame& frame, const ProblemParams& params) {
  const std::size_t n = frame.size();
  const double dy = grid_spacing(frame);
  std::vector<double> qy(n), qyy(n);
  uniform_derivatives(frame.q, dy, qy, qyy);
  const auto terms = boundary_terms(frame, params);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double Lq = qyy[i] - 0.5 * frame.y[i] * qy[i] + frame.q[i];
    out[i] = Lq + terms.V[i] * frame.q[i] + terms.B[i] + terms.R[i] + terms.F[i];
  }
  return out;
}

QResidual q_equation_residual(std::span<const SimilarityFrame> frames, const ProblemParams& params) {
  if (frames.size() < 3) throw std::invalid_argument("q_equation_residual needs at least three frames");
  QResidual res;
  for (std::size_t k = 1; k + 1 < frames.size(); ++k) {
    const auto& fm = frames[k - 1];
    const auto& f0 = frames[k];
    const auto& fp = frames[k + 1];
    const double h1 = f0.s - fm.s, h2 = fp.s - f0.s;
    if (!(h1 > 0.0 && h2 > 0.0)) throw std::invalid_argument("frames must have increasing s");
    const double cm = -h2 / (h1 * (h1 + h2)), c0 = (h2 - h1) / (h1 * h2), cp = h1 / (h2 * (h1 + h2));
    const auto rhs_q = q_equation_rhs(f0, params);
    const double window = 2.0 * params.K0 * std::sqrt(f0.s);
    double sup_dq = 0.0, sup_rhs = 0.0;
    for (std::size_t i = 2; i + 2 < f0.size(); ++i) {
      const double y = f0.y[i];
      if (std::abs(y) > window) continue;
      const double dq = cm * fm.q_at(y) + c0 * f0.q[i] + cp * fp.q_at(y);
      res.residual = std::max(res.residual, std::abs(dq - rhs_q[i]));
      sup_dq = std::max(sup_dq, std::abs(dq));
      sup_rhs = std::max(sup_rhs, std::abs(rhs_q[i]));
    }
    res.scale = std::max(res.scale, sup_dq + sup_rhs);
  }
  return res;
}

void write_frame_csv(std::ostream& os, const SimilarityFrame& frame, const ProblemParams& params) {
  const auto t = boundary_terms(frame, params);
  CsvWriter csv(os);
  csv.header({"y [1]", "W [1]", "w [1]", "q [1]", "V [1]", "B [1]", "R [1]", "F [1]"});
  for (std::size_t i = 0; i < frame.size(); ++i)
    csv.row({frame.y[i], frame.W[i], frame.w[i], frame.q[i], t.V[i], t.B[i], t.R[i], t.F[i]});
}

}  // namespace blowup
