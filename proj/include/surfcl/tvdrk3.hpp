#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

namespace surfcl {

struct Tvdrk3Workspace {
  std::vector<double> base, stage, rhs;

  void resize(std::size_t n) {
    base.resize(n);
    stage.resize(n);
    rhs.resize(n);
  }
};

// One strong-stability-preserving RK3 step on the first `active` entries of u:
//   u1 = u + dt L(u)
//   u2 = 3/4 u + 1/4 (u1 + dt L(u1))
//   u  = 1/3 u + 2/3 (u2 + dt L(u2))
// `op(v, out)` writes L(v) into out[0, active); `refresh(v, t)` updates the
// remaining entries of a stage at its time level (t + dt, t + dt/2, t + dt).
template <class Operator, class Refresh>
void tvdrk3_update(std::vector<double>& u, std::size_t active, double t, double dt, Operator&& op,
                   Refresh&& refresh, Tvdrk3Workspace& ws) {
  ws.resize(u.size());
  std::vector<double>& un = ws.base;
  std::vector<double>& w = ws.stage;
  std::vector<double>& r = ws.rhs;
  std::copy(u.begin(), u.end(), un.begin());

  op(un, r);
  std::copy(un.begin(), un.end(), w.begin());
  for (std::size_t i = 0; i < active; ++i) w[i] = un[i] + dt * r[i];
  refresh(w, t + dt);

  op(w, r);
  for (std::size_t i = 0; i < active; ++i) w[i] = 0.75 * un[i] + 0.25 * (w[i] + dt * r[i]);
  refresh(w, t + 0.5 * dt);

  op(w, r);
  for (std::size_t i = 0; i < active; ++i) u[i] = un[i] / 3.0 + 2.0 / 3.0 * (w[i] + dt * r[i]);
  std::copy(w.begin() + std::ptrdiff_t(active), w.end(), u.begin() + std::ptrdiff_t(active));
  refresh(u, t + dt);
}

}  // namespace surfcl
