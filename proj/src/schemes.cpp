#include "surfcl/schemes.hpp"

#include "surfcl/tvdrk3.hpp"
#include "surfcl/weno_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace surfcl {

namespace {

[[noreturn]] void fail(const std::string& message) { throw Error("schemes", message); }

constexpr std::size_t kMaxStoredWarnings = 20;

}  // namespace

ExtensionMode parse_extension_mode(const std::string& text) {
  if (text == "neumann" || text == "neumann_sweep") return ExtensionMode::neumann_sweep;
  if (text == "exact" || text == "exact_outer") return ExtensionMode::exact_outer;
  fail("unknown extension mode '" + text + "' (neumann|exact)");
}

std::string to_string(ExtensionMode mode) {
  return mode == ExtensionMode::neumann_sweep ? "neumann" : "exact";
}

SweepMethod parse_sweep_method(const std::string& text) {
  if (text == "ordered") return SweepMethod::ordered;
  if (text == "pseudo_time") return SweepMethod::pseudo_time;
  fail("unknown sweep method '" + text + "' (ordered|pseudo_time)");
}

std::string to_string(SweepMethod method) {
  return method == SweepMethod::ordered ? "ordered" : "pseudo_time";
}

void SchemeConfig::validate() const {
  if (order != 1 && order != 3) fail("order must be 1 or 3");
  if (!(cfl > 0.0 && cfl <= 1.0)) fail("cfl must lie in (0, 1]");
  if (!(weno_eps > 0.0)) fail("weno_eps must be positive");
  if (!(sweep_dtau > 0.0 && sweep_dtau <= 1.0)) fail("sweep_dtau must lie in (0, 1]");
  if (sweep_max_iterations < 1) fail("sweep_max_iterations must be positive");
  if (!(sweep_tol > 0.0)) fail("sweep_tol must be positive");
  if (sweep_order != 1 && sweep_order != 2) fail("sweep_order must be 1 or 2");
}

EmbeddedSolver::EmbeddedSolver(const LevelSetField& field, const TubeGrid& tube, EmbeddedEquation equation,
                               SchemeConfig config, OuterOracle oracle)
    : field_(field), tube_(tube), equation_(std::move(equation)), config_(config), oracle_(std::move(oracle)) {
  config_.validate();
  const std::size_t n = std::size_t(tube_.size());
  std::visit([&](const auto& eq) {
    using T = std::decay_t<decltype(eq)>;
    if constexpr (std::is_same_v<T, EmbeddedAdvection>) {
      if (eq.velocity.size() != n) fail("embedded velocity table does not match the tube");
    } else {
      if (eq.direction.size() != n) fail("embedded flux table does not match the tube");
      if (!eq.magnitude || !eq.magnitude_derivative) fail("flux magnitude functions are missing");
    }
  }, equation_);
  if (config_.extension == ExtensionMode::exact_outer && !oracle_)
    fail("exact outer extension requires an oracle for the problem");

  // Upwind direction of u_tau + sign(phi) n . grad u = 0 points towards the
  // interface, so each outer value depends on neighbours closer to it.
  // Entries are built in half-cell |phi| layers (slot order inside a layer
  // for locality) and then reordered so that every entry follows its
  // dependencies; one Gauss-Seidel pass is then the exact steady state.
  std::vector<Slot> order;
  order.reserve(std::size_t(tube_.outer_count()));
  for (Slot s = tube_.inner_count(); s < tube_.size(); ++s) order.push_back(s);
  const double layer = 2.0 / tube_.grid().dx;
  std::stable_sort(order.begin(), order.end(), [&](Slot a, Slot b) {
    return std::floor(tube_.abs_phi(a) * layer) < std::floor(tube_.abs_phi(b) * layer);
  });
  std::vector<SweepEntry> entries;
  entries.reserve(order.size());
  const int dim = tube_.dim();
  for (Slot s : order) {
    const NodeIndex node = tube_.node(s);
    Vec3 g = field_.gradient(node);
    const double norm = g.norm();
    if (norm > 0.0) g /= norm;
    const double sgn = field_.phi(node) < 0.0 ? -1.0 : 1.0;
    SweepEntry e{s, {kNoSlot, kNoSlot, kNoSlot}, {kNoSlot, kNoSlot, kNoSlot}, {0.0, 0.0, 0.0}};
    for (int a = 0; a < dim; ++a) {
      const double c = sgn * g[a];
      if (c == 0.0) continue;
      const int dir = c > 0.0 ? -1 : 1;
      const Slot nb = tube_.neighbor(s, a, dir);
      if (nb == kNoSlot) continue;
      e.upwind[a] = nb;
      if (config_.sweep_order == 2) e.upwind2[a] = tube_.neighbor(s, a, 2 * dir);
      e.weight[a] = std::abs(c);
    }
    entries.push_back(e);
  }

  // Strongly connected components of the dependency graph (iterative
  // Tarjan). Components come out dependencies first; cycles only appear
  // where a normal component changes sign between neighbours and stay tiny.
  const Slot first_outer = tube_.inner_count();
  const std::size_t m = entries.size();
  std::vector<std::size_t> where(m);  // slot - first_outer -> entry index
  for (std::size_t k = 0; k < m; ++k) where[std::size_t(entries[k].slot - first_outer)] = k;
  const auto deps = [&](std::size_t k, int j) -> std::ptrdiff_t {
    const SweepEntry& e = entries[k];
    const Slot d = j < 3 ? e.upwind[j] : e.upwind2[j - 3];
    if (d == kNoSlot || d < first_outer) return -1;
    return std::ptrdiff_t(where[std::size_t(d - first_outer)]);
  };
  constexpr std::size_t kUnvisited = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> index(m, kUnvisited), low(m);
  std::vector<char> on_stack(m, 0);
  std::vector<std::size_t> stack;
  std::vector<std::pair<std::size_t, int>> dfs;
  std::size_t counter = 0;
  plan_.reserve(m);
  for (std::size_t root = 0; root < m; ++root) {
    if (index[root] != kUnvisited) continue;
    dfs.emplace_back(root, 0);
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!dfs.empty()) {
      auto& [k, j] = dfs.back();
      if (j < 6) {
        const std::ptrdiff_t d = deps(k, j++);
        if (d < 0) continue;
        const std::size_t w = std::size_t(d);
        if (index[w] == kUnvisited) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = 1;
          dfs.emplace_back(w, 0);
        } else if (on_stack[w]) {
          low[k] = std::min(low[k], index[w]);
        }
        continue;
      }
      const std::size_t v = k;
      dfs.pop_back();
      if (!dfs.empty()) low[dfs.back().first] = std::min(low[dfs.back().first], low[v]);
      if (low[v] != index[v]) continue;
      const std::size_t begin = plan_.size();
      std::size_t w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = 0;
        plan_.push_back(entries[w]);
      } while (w != v);
      if (plan_.size() - begin > 1) cycles_.push_back({begin, plan_.size()});
    }
  }
  scratch_a_.resize(n);
  scratch_b_.resize(n);
  rhs_.resize(n);
}

double EmbeddedSolver::max_speed_sum(std::span<const double> u) const {
  const int dim = tube_.dim();
  double best = 0.0;
  std::visit([&](const auto& eq) {
    using T = std::decay_t<decltype(eq)>;
    for (Slot s = 0; s < tube_.inner_count(); ++s) {
      double sum = 0.0;
      if constexpr (std::is_same_v<T, EmbeddedAdvection>) {
        const Vec3& v = eq.velocity[std::size_t(s)];
        for (int a = 0; a < dim; ++a) sum += std::abs(v[a]);
      } else {
        const Vec3& d = eq.direction[std::size_t(s)];
        const double dq = std::abs(eq.magnitude_derivative(u[std::size_t(s)]));
        for (int a = 0; a < dim; ++a) sum += dq * std::abs(d[a]);
      }
      best = std::max(best, sum);
    }
  }, equation_);
  return best;
}

double EmbeddedSolver::cfl_dt(const GridField& u) const {
  const double dx = tube_.grid().dx;
  const double speed = max_speed_sum(u.values);
  if (!(speed > 0.0)) return dx;
  return std::min(dx, config_.cfl * dx / speed);
}

void EmbeddedSolver::lxf_euler_step(GridField& u, double dt) {
  const auto* eq = std::get_if<EmbeddedConservation>(&equation_);
  if (!eq) fail("Lax-Friedrichs step needs a conservation law");
  const int dim = tube_.dim();
  const double dx = tube_.grid().dx;
  const double diss = dx / (dim * dt);
  const std::vector<double>& un = u.values;
  std::vector<double>& next = scratch_a_;
  std::vector<double>& f = scratch_b_;
  std::copy(un.begin(), un.end(), next.begin());
  std::vector<double> q(un.size());
  for (std::size_t s = 0; s < un.size(); ++s) q[s] = eq->magnitude(un[s]);
  for (int a = 0; a < dim; ++a) {
    for (std::size_t s = 0; s < un.size(); ++s) f[s] = q[s] * eq->direction[s][a];
    for (Slot s = 0; s < tube_.inner_count(); ++s) {
      const Slot l = tube_.inner_neighbor(s, a, -1);
      const Slot r = tube_.inner_neighbor(s, a, 1);
      const double fl = 0.5 * (f[l] + f[s] - diss * (un[s] - un[l]));
      const double fr = 0.5 * (f[s] + f[r] - diss * (un[r] - un[s]));
      next[s] -= dt / dx * (fr - fl);
    }
  }
  std::swap(u.values, next);
  u.time += dt;
  apply_extension(u.values, u.time);
}

void EmbeddedSolver::upwind_euler_step(GridField& u, double dt) {
  if (!std::holds_alternative<EmbeddedAdvection>(equation_)) fail("upwind step needs an advection equation");
  advection_rhs(u.values, rhs_, 1);
  for (Slot s = 0; s < tube_.inner_count(); ++s) u.values[s] += dt * rhs_[s];
  u.time += dt;
  apply_extension(u.values, u.time);
}

void EmbeddedSolver::weno3_rhs(std::span<const double> u, std::span<double> rhs) const {
  const auto* eq = std::get_if<EmbeddedConservation>(&equation_);
  if (!eq) fail("WENO3 flux operator needs a conservation law");
  const int dim = tube_.dim();
  const double dx = tube_.grid().dx;
  const double eps = config_.weno_eps;
  const std::size_t n = u.size();
  std::vector<double> q(n), dq(n), fp(n), fm(n);
  for (std::size_t s = 0; s < n; ++s) {
    q[s] = eq->magnitude(u[s]);
    dq[s] = std::abs(eq->magnitude_derivative(u[s]));
  }
  std::fill(rhs.begin(), rhs.end(), 0.0);
  for (int a = 0; a < dim; ++a) {
    // Global Lax-Friedrichs splitting: alpha is the largest speed on the tube.
    double alpha = 0.0;
    for (std::size_t s = 0; s < n; ++s) alpha = std::max(alpha, dq[s] * std::abs(eq->direction[s][a]));
    for (std::size_t s = 0; s < n; ++s) {
      const double f = q[s] * eq->direction[s][a];
      fp[s] = 0.5 * (f + alpha * u[s]);
      fm[s] = 0.5 * (f - alpha * u[s]);
    }
    for (Slot s = 0; s < tube_.inner_count(); ++s) {
      const Slot m2 = tube_.inner_neighbor(s, a, -2);
      const Slot m1 = tube_.inner_neighbor(s, a, -1);
      const Slot p1 = tube_.inner_neighbor(s, a, 1);
      const Slot p2 = tube_.inner_neighbor(s, a, 2);
      const double right = weno::reconstruct3(fp[m1], fp[s], fp[p1], eps) + weno::reconstruct3(fm[p2], fm[p1], fm[s], eps);
      const double left = weno::reconstruct3(fp[m2], fp[m1], fp[s], eps) + weno::reconstruct3(fm[p1], fm[s], fm[m1], eps);
      rhs[s] -= (right - left) / dx;
    }
  }
}

void EmbeddedSolver::advection_rhs(std::span<const double> u, std::span<double> rhs, int order) const {
  const auto* eq = std::get_if<EmbeddedAdvection>(&equation_);
  if (!eq) fail("advection operator needs an advection equation");
  const int dim = tube_.dim();
  const double inv_dx = 1.0 / tube_.grid().dx;
  const double eps = config_.weno_eps;
  std::fill(rhs.begin(), rhs.end(), 0.0);
  for (Slot s = 0; s < tube_.inner_count(); ++s) {
    const Vec3& v = eq->velocity[std::size_t(s)];
    double acc = 0.0;
    for (int a = 0; a < dim; ++a) {
      const double va = v[a];
      if (va == 0.0) continue;
      const double u0 = u[s];
      double d;
      if (va > 0.0) {
        const double um1 = u[tube_.inner_neighbor(s, a, -1)];
        if (order == 1) {
          d = (u0 - um1) * inv_dx;
        } else {
          const double um2 = u[tube_.inner_neighbor(s, a, -2)];
          const double up1 = u[tube_.inner_neighbor(s, a, 1)];
          d = weno::hj_derivative3((um1 - um2) * inv_dx, (u0 - um1) * inv_dx, (up1 - u0) * inv_dx, eps);
        }
      } else {
        const double up1 = u[tube_.inner_neighbor(s, a, 1)];
        if (order == 1) {
          d = (up1 - u0) * inv_dx;
        } else {
          const double up2 = u[tube_.inner_neighbor(s, a, 2)];
          const double um1 = u[tube_.inner_neighbor(s, a, -1)];
          d = weno::hj_derivative3((up2 - up1) * inv_dx, (up1 - u0) * inv_dx, (u0 - um1) * inv_dx, eps);
        }
      }
      acc += va * d;
    }
    rhs[s] = -acc;
  }
}

void EmbeddedSolver::rhs(std::span<const double> u, std::span<double> out) const {
  if (std::holds_alternative<EmbeddedAdvection>(equation_)) advection_rhs(u, out, 3);
  else weno3_rhs(u, out);
}

void EmbeddedSolver::tvdrk3_step(GridField& u, double dt) {
  tvdrk3_update(
      u.values, std::size_t(tube_.inner_count()), u.time, dt,
      [this](const std::vector<double>& v, std::vector<double>& out) { rhs(v, out); },
      [this](std::vector<double>& v, double t) { apply_extension(v, t); }, rk_);
  u.time += dt;
}

void EmbeddedSolver::step(GridField& u, double dt) {
  if (config_.order == 3) tvdrk3_step(u, dt);
  else if (std::holds_alternative<EmbeddedAdvection>(equation_)) upwind_euler_step(u, dt);
  else lxf_euler_step(u, dt);
}

SweepStats EmbeddedSolver::extension_sweep(std::vector<double>& u, double t) {
  SweepStats st;
  if (config_.extension == ExtensionMode::exact_outer) {
    for (Slot s = tube_.inner_count(); s < tube_.size(); ++s) u[s] = oracle_(s, t);
    return st;
  }
  const double dx = tube_.grid().dx;
  const double tol = config_.sweep_tol * dx;
  st.converged = false;
  if (config_.sweep == SweepMethod::ordered) {
    // Steady state of sum_a w_a D_a u = 0, D_a the one-sided difference
    // (u - u1) or (3u - 4u1 + u2) / 2, solved for u.
    const auto update = [&](const SweepEntry& e) {
      double num = 0.0, den = 0.0;
      for (int a = 0; a < 3; ++a) {
        if (e.upwind[a] == kNoSlot) continue;
        if (e.upwind2[a] != kNoSlot) {
          num += e.weight[a] * (2.0 * u[e.upwind[a]] - 0.5 * u[e.upwind2[a]]);
          den += 1.5 * e.weight[a];
        } else {
          num += e.weight[a] * u[e.upwind[a]];
          den += e.weight[a];
        }
      }
      if (den == 0.0) return 0.0;
      const double v = num / den;
      const double change = std::abs(v - u[e.slot]);
      u[e.slot] = v;
      return change;
    };
    // Acyclic entries are final after one visit; each cyclic block is
    // iterated to the tolerance before moving on.
    st.iterations = 1;
    st.residual = 0.0;
    st.converged = true;
    std::size_t pos = 0;
    for (const auto& [begin, end] : cycles_) {
      for (; pos < begin; ++pos) update(plan_[pos]);
      double change = 0.0;
      int it = 0;
      do {
        change = 0.0;
        for (std::size_t k = begin; k < end; ++k) change = std::max(change, update(plan_[k]));
        ++it;
      } while (change >= tol && it < config_.sweep_max_iterations);
      st.iterations = std::max(st.iterations, it);
      if (change >= tol) {
        st.converged = false;
        st.residual = std::max(st.residual, change);
      }
      pos = end;
    }
    for (; pos < plan_.size(); ++pos) update(plan_[pos]);
  } else {
    const double lambda = config_.sweep_dtau;  // dtau / dx
    std::vector<double> next(plan_.size());
    for (int it = 1; it <= config_.sweep_max_iterations; ++it) {
      double change = 0.0;
      for (std::size_t k = 0; k < plan_.size(); ++k) {
        const SweepEntry& e = plan_[k];
        double res = 0.0;
        for (int a = 0; a < 3; ++a) {
          if (e.upwind[a] == kNoSlot) continue;
          if (e.upwind2[a] != kNoSlot)
            res += e.weight[a] * (1.5 * u[e.slot] - 2.0 * u[e.upwind[a]] + 0.5 * u[e.upwind2[a]]);
          else
            res += e.weight[a] * (u[e.slot] - u[e.upwind[a]]);
        }
        next[k] = u[e.slot] - lambda * res;
        change = std::max(change, std::abs(lambda * res));
      }
      for (std::size_t k = 0; k < plan_.size(); ++k) u[plan_[k].slot] = next[k];
      st.iterations = it;
      st.residual = change;
      if (change < tol) {
        st.converged = true;
        break;
      }
    }
  }
  return st;
}

void EmbeddedSolver::apply_extension(std::vector<double>& u, double t) {
  const SweepStats st = extension_sweep(u, t);
  if (!stats_) return;
  ++stats_->sweeps;
  stats_->sweep_iterations_max = std::max(stats_->sweep_iterations_max, st.iterations);
  if (!st.converged) {
    ++stats_->sweep_stalls;
    if (stats_->warnings.size() < kMaxStoredWarnings) {
      std::ostringstream os;
      os << "extension sweep stalled at t = " << t << " with residual " << st.residual << " after "
         << st.iterations << " iterations";
      stats_->warnings.push_back(os.str());
    }
  }
}

void EmbeddedSolver::check_finite(const GridField& u) const {
  for (Slot s = 0; s < tube_.size(); ++s) {
    if (!std::isfinite(u.values[s])) {
      std::ostringstream os;
      os << "non-finite value at " << format_point(tube_.grid().position(tube_.node(s)), tube_.dim())
         << " at t = " << u.time;
      fail(os.str());
    }
  }
}

RunStats EmbeddedSolver::run(GridField& u, double t_final, std::span<const double> output_times,
                             const OutputHook& hook) {
  if (u.values.size() != std::size_t(tube_.size())) fail("field does not match the tube");
  if (t_final < u.time) fail("final time lies before the current time");
  RunStats stats;
  stats_ = &stats;

  std::vector<double> targets;
  for (double t : output_times)
    if (t > u.time && t < t_final) targets.push_back(t);
  if (t_final > u.time) targets.push_back(t_final);
  std::sort(targets.begin(), targets.end());
  targets.erase(std::unique(targets.begin(), targets.end()), targets.end());

  auto wants_output = [&](double t) {
    return std::any_of(output_times.begin(), output_times.end(), [&](double o) { return o == t; });
  };
  if (hook && wants_output(u.time)) hook(u);

  double dt_sum = 0.0;
  stats.dt_min = std::numeric_limits<double>::infinity();
  try {
    for (double target : targets) {
      while (u.time < target) {
        // Split what remains before the target into equal CFL-admissible
        // steps, so the landing step is never a sliver.
        const double remaining = target - u.time;
        const double dt_cfl = cfl_dt(u);
        const double pieces = std::ceil(remaining / dt_cfl * (1.0 - 1e-12));
        const bool land = pieces <= 1.0;
        const double dt = land ? remaining : remaining / pieces;
        step(u, dt);
        if (land) u.time = target;
        check_finite(u);
        ++stats.steps;
        dt_sum += dt;
        stats.dt_min = std::min(stats.dt_min, dt);
        stats.dt_max = std::max(stats.dt_max, dt);
      }
      if (hook && wants_output(target)) hook(u);
    }
  } catch (...) {
    stats_ = nullptr;
    throw;
  }
  stats_ = nullptr;
  if (stats.steps == 0) stats.dt_min = 0.0;
  stats.dt_mean = stats.steps ? dt_sum / double(stats.steps) : 0.0;
  return stats;
}

}  // namespace surfcl
