#pragma once

#include <chrono>
#include <cmath>
#include <deque>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>

#include <Eigen/Core>

#include "rescal/error.hpp"
#include "rescal/model.hpp"
#include "rescal/trace.hpp"

namespace rescal {

struct LbfgsOptions {
  /// Number of (s, y) correction pairs kept.
  Index memory = 10;
  Index max_iter = 500;
  /// Stop when max_i |g_i| < grad_tol.
  double grad_tol = 1e-5;
  /// Stop when |f_t - f_{t-1}| / max(1, |f_{t-1}|) < rel_tol.
  double rel_tol = 1e-5;
  /// Sufficient-decrease constant.
  double c1 = 1e-4;
  /// Curvature constant.
  double c2 = 0.9;
  /// Function evaluations allowed per line search.
  Index max_line_search = 40;
};

void validate(const LbfgsOptions& opts);

template <typename Scalar>
struct LbfgsResult {
  VectorX<Scalar> x;
  Scalar f;
  FitTrace trace;
};

namespace detail {

template <typename Scalar>
struct LinePoint {
  Scalar alpha;
  Scalar f;
  Scalar slope;  // directional derivative g(x + alpha d) . d
  VectorX<Scalar> x;
  VectorX<Scalar> g;
};

/// Minimizer of the cubic interpolating (a, fa, da) and (b, fb, db),
/// safeguarded to the interior of [a, b]; falls back to bisection.
template <typename Scalar>
Scalar cubic_step(Scalar a, Scalar fa, Scalar da, Scalar b, Scalar fb, Scalar db) {
  using std::abs;
  using std::sqrt;
  const Scalar lo = a < b ? a : b;
  const Scalar hi = a < b ? b : a;
  const Scalar width = hi - lo;
  const Scalar mid = (a + b) / Scalar(2);
  const Scalar d1 = da + db - Scalar(3) * (fa - fb) / (a - b);
  const Scalar disc = d1 * d1 - da * db;
  if (!(disc >= Scalar(0))) return mid;
  Scalar d2 = sqrt(disc);
  if (b < a) d2 = -d2;
  const Scalar denom = db - da + Scalar(2) * d2;
  if (denom == Scalar(0)) return mid;
  const Scalar t = b - (b - a) * (db + d2 - d1) / denom;
  if (!std::isfinite(static_cast<double>(t))) return mid;
  const Scalar guard = Scalar(0.1) * width;
  if (t < lo + guard || t > hi - guard) return mid;
  return t;
}

}  // namespace detail

/// Limited-memory BFGS with two-loop recursion and a strong-Wolfe line
/// search. `objective(x, grad)` returns f(x) and writes the gradient into
/// `grad`. A failed line search returns the best iterate with
/// trace.converged = false; a non-finite objective throws NumericalError.
template <typename Scalar, typename Objective>
LbfgsResult<Scalar> lbfgs_minimize(Objective&& objective, VectorX<Scalar> x0,
                                   const LbfgsOptions& opts) {
  validate(opts);
  using std::abs;
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  const Scalar c1(opts.c1);
  const Scalar c2(opts.c2);

  Index evaluations = 0;
  Index iteration = 0;
  auto evaluate = [&](const VectorX<Scalar>& x, VectorX<Scalar>& g, Scalar alpha) {
    g.resize(x.size());
    const Scalar f = objective(x, g);
    ++evaluations;
    if (!std::isfinite(static_cast<double>(f)) || !g.allFinite()) {
      std::ostringstream dump;
      dump << "non-finite objective or gradient: iteration " << iteration << ", evaluation "
           << evaluations << ", step " << alpha << ", f = " << f << ", |x|_2 = " << x.norm()
           << ", |x|_inf = " << x.cwiseAbs().maxCoeff() << ", |g|_2 = " << g.norm();
      throw NumericalError(dump.str());
    }
    return f;
  };

  LbfgsResult<Scalar> result;
  result.x = std::move(x0);
  VectorX<Scalar> g;
  result.f = evaluate(result.x, g, Scalar(0));
  FitTrace& trace = result.trace;
  trace.initial_objective = static_cast<double>(result.f);

  auto finish = [&](bool converged, std::string diagnostic) {
    trace.converged = converged;
    trace.diagnostic = std::move(diagnostic);
    trace.wall_time = std::chrono::duration<double>(clock::now() - start).count();
    return std::move(result);
  };

  if (result.x.size() == 0 || g.cwiseAbs().maxCoeff() < Scalar(opts.grad_tol))
    return finish(true, "gradient below grad_tol");

  struct Pair {
    VectorX<Scalar> s;
    VectorX<Scalar> y;
    Scalar rho;
  };
  std::deque<Pair> history;
  std::vector<Scalar> coeff(static_cast<std::size_t>(opts.memory));

  for (iteration = 1; iteration <= opts.max_iter; ++iteration) {
    // Two-loop recursion: d = -H g.
    VectorX<Scalar> d = -g;
    for (std::size_t h = history.size(); h-- > 0;) {
      coeff[h] = history[h].rho * history[h].s.dot(d);
      d -= coeff[h] * history[h].y;
    }
    Scalar alpha0(1);
    if (history.empty()) {
      alpha0 = std::min(Scalar(1), Scalar(1) / g.norm());
    } else {
      const auto& last = history.back();
      d *= last.s.dot(last.y) / last.y.squaredNorm();
    }
    for (std::size_t h = 0; h < history.size(); ++h) {
      const Scalar beta = history[h].rho * history[h].y.dot(d);
      d += (coeff[h] - beta) * history[h].s;
    }
    Scalar slope0 = g.dot(d);
    if (!(slope0 < Scalar(0))) {
      history.clear();
      d = -g;
      slope0 = -g.squaredNorm();
      alpha0 = std::min(Scalar(1), Scalar(1) / g.norm());
    }

    const Scalar f0 = result.f;
    auto probe = [&](Scalar alpha) {
      detail::LinePoint<Scalar> p;
      p.alpha = alpha;
      p.x = result.x + alpha * d;
      p.f = evaluate(p.x, p.g, alpha);
      p.slope = p.g.dot(d);
      return p;
    };
    auto armijo = [&](const detail::LinePoint<Scalar>& p) {
      return p.f <= f0 + c1 * p.alpha * slope0 && p.f < f0;
    };
    auto curvature = [&](const detail::LinePoint<Scalar>& p) {
      return abs(p.slope) <= -c2 * slope0;
    };

    std::optional<detail::LinePoint<Scalar>> accepted;
    std::optional<detail::LinePoint<Scalar>> best;  // sufficient decrease only
    auto note_best = [&](const detail::LinePoint<Scalar>& p) {
      if (armijo(p) && (!best || p.f < best->f)) best = p;
    };

    const Index budget_end = evaluations + opts.max_line_search;
    auto zoom = [&](detail::LinePoint<Scalar> lo, detail::LinePoint<Scalar> hi) {
      while (evaluations < budget_end) {
        const Scalar alpha = detail::cubic_step(lo.alpha, lo.f, lo.slope, hi.alpha, hi.f, hi.slope);
        if (alpha == lo.alpha || alpha == hi.alpha) break;
        auto p = probe(alpha);
        note_best(p);
        if (!armijo(p) || p.f >= lo.f) {
          hi = std::move(p);
        } else {
          if (curvature(p)) {
            accepted = std::move(p);
            return;
          }
          if (p.slope * (hi.alpha - lo.alpha) >= Scalar(0)) hi = lo;
          lo = std::move(p);
        }
      }
    };

    detail::LinePoint<Scalar> prev{Scalar(0), f0, slope0, result.x, g};
    Scalar alpha = alpha0;
    bool first = true;
    while (!accepted && evaluations < budget_end) {
      auto p = probe(alpha);
      note_best(p);
      if (!armijo(p) || (!first && p.f >= prev.f)) {
        zoom(prev, std::move(p));
        break;
      }
      if (curvature(p)) {
        accepted = std::move(p);
        break;
      }
      if (p.slope >= Scalar(0)) {
        zoom(std::move(p), prev);
        break;
      }
      prev = std::move(p);
      alpha *= Scalar(2);
      first = false;
    }

    if (!accepted) {
      if (best) {
        result.x = best->x;
        result.f = best->f;
        trace.objective.push_back(static_cast<double>(result.f));
        trace.seconds.push_back(std::chrono::duration<double>(clock::now() - start).count());
        trace.iterations_run = iteration;
      }
      return finish(false, "line search failed to satisfy the strong Wolfe conditions at iteration " +
                               std::to_string(iteration));
    }

    VectorX<Scalar> s = accepted->x - result.x;
    VectorX<Scalar> y = accepted->g - g;
    const Scalar sy = s.dot(y);
    const Scalar previous_f = result.f;
    result.x = std::move(accepted->x);
    result.f = accepted->f;
    g = std::move(accepted->g);
    trace.objective.push_back(static_cast<double>(result.f));
    trace.seconds.push_back(std::chrono::duration<double>(clock::now() - start).count());
    trace.iterations_run = iteration;

    if (sy > std::numeric_limits<Scalar>::epsilon() * y.squaredNorm()) {
      if (static_cast<Index>(history.size()) == opts.memory) history.pop_front();
      history.push_back({std::move(s), std::move(y), Scalar(1) / sy});
    }

    if (g.cwiseAbs().maxCoeff() < Scalar(opts.grad_tol))
      return finish(true, "gradient below grad_tol");
    if (relative_change_below(static_cast<double>(previous_f), static_cast<double>(result.f),
                              opts.rel_tol))
      return finish(true, "relative objective change below rel_tol");
  }
  return finish(false, "max_iter reached");
}

}  // namespace rescal
