#pragma once

#include <cmath>
#include <string>

#include "pfcsim/errors.hpp"

namespace pfc {

namespace detail {

inline bool all_finite(double x) { return std::isfinite(x); }

template <typename Vector>
bool all_finite(const Vector& x) {
  return x.allFinite();
}

}  // namespace detail

/// Classical fourth-order Runge-Kutta step for x' = f(x, t).
///
/// State is a double or an Eigen vector. Throws NumericalAbort(non_finite)
/// if any stage derivative is NaN or infinite.
template <typename State, typename Derivative>
State rk4_step(Derivative&& f, const State& x, double t, double dt) {
  auto checked = [&](const State& s, double tau) -> State {
    State k = f(s, tau);
    if (!detail::all_finite(k)) {
      throw NumericalAbort(AbortKind::non_finite,
                           "non-finite derivative at t = " + std::to_string(tau), tau);
    }
    return k;
  };
  const double half = 0.5 * dt;
  const State k1 = checked(x, t);
  const State k2 = checked(x + half * k1, t + half);
  const State k3 = checked(x + half * k2, t + half);
  const State k4 = checked(x + dt * k3, t + dt);
  return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace pfc
