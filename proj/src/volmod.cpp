#include "ambit/volmod.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ambit/basis_sim.hpp"

namespace ambit::volmod {

namespace {

constexpr std::uint64_t kJumpStream = 1;
constexpr std::uint64_t kMarkStream = 2;

// Exact inter-jump relaxation toward beta/eta.
inline double ou_step(double v, double beta, double eta, double dt) {
  const double mean = beta / eta;
  return mean + (v - mean) * std::exp(-eta * dt);
}

struct CpStream {
  std::vector<double> times;
  std::vector<double> sizes;
};

// Compound-Poisson driver: exponential inter-arrivals at the total mass
// rate, sizes by mass-weighted atom choice or the density inverse CDF.
CpStream sample_cp_stream(const measure::JumpMeasureSpec& driver, double horizon,
                          rng::CounterStream& stream,
                          const quad::QuadConfig& cfg) {
  CpStream out;
  double atom_mass = driver.atom_mass();
  sim::DensitySamplerHandle density;
  if (driver.density) {
    density = sim::build_density_sampler(*driver.density, 0.0, cfg);
  }
  const double rate = atom_mass + density.total_mass;
  if (rate <= 0.0) return out;
  double t = stream.exponential(rate);
  while (t < horizon) {
    double pick = stream.uniform() * rate;
    double size = 0.0;
    bool chosen = false;
    for (const auto& a : driver.atoms) {
      if (pick < a.mass) {
        size = a.size;
        chosen = true;
        break;
      }
      pick -= a.mass;
    }
    if (!chosen) {
      size = density.inv_cdf ? density.inv_cdf(stream.uniform())
                             : driver.atoms.back().size;
    }
    out.times.push_back(t);
    out.sizes.push_back(size);
    t += stream.exponential(rate);
  }
  return out;
}

std::vector<double> merged_times(const CpStream& cp, double horizon,
                                 double grid_dt) {
  std::vector<double> times;
  const int n = std::max(1, static_cast<int>(std::ceil(horizon / grid_dt)));
  for (int i = 1; i <= n; ++i) times.push_back(std::min(horizon, i * grid_dt));
  times.insert(times.end(), cp.times.begin(), cp.times.end());
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  return times;
}

}  // namespace

PhiMaxResult phi_max(const measure::JumpMeasureSpec& nu, double eta, double tol,
                     const quad::QuadConfig& cfg) {
  PhiMaxResult out;
  const auto integral = [&](double phi) {
    const auto g = [phi](double y) { return std::log1p(phi * y * y); };
    const auto v = integrate_jump(g, nu, cfg);
    if (!v.finite()) {
      throw quad::EvaluationError("log-moment integral did not converge", {phi});
    }
    return v.value;
  };
  if (nu.is_zero()) {
    out.finite = false;
    out.value = std::numeric_limits<double>::infinity();
    out.diagnostic = "jump measure is zero: every phi is admissible";
    return out;
  }
  double hi = 1.0;
  while (integral(hi) < eta) {
    hi *= 2.0;
    if (hi > 1e12) {
      out.finite = false;
      out.value = std::numeric_limits<double>::infinity();
      out.residual = std::abs(integral(1e12) - eta);
      out.diagnostic = "log-moment integral stays below eta up to phi = 1e12";
      return out;
    }
  }
  double lo = hi > 1.0 ? hi / 2.0 : 0.0;
  while (hi - lo > tol * std::max(1.0, hi)) {
    const double mid = 0.5 * (lo + hi);
    if (integral(mid) < eta) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  out.value = 0.5 * (lo + hi);
  out.residual = std::abs(integral(out.value) - eta);
  return out;
}

CogarchPath simulate_cogarch(const CogarchParams& params, double horizon,
                             std::uint64_t seed, double grid_dt, double v0) {
  rng::CounterStream jump_stream(seed, kJumpStream);
  const auto cp = sample_cp_stream(params.driver, horizon, jump_stream, {});

  CogarchPath path;
  double v = v0 >= 0.0 ? v0 : params.beta / params.eta;
  double g = 0.0;
  double now = 0.0;
  path.t.push_back(0.0);
  path.V.push_back(v);
  path.G.push_back(0.0);

  const auto times = merged_times(cp, horizon, grid_dt);
  size_t jump_idx = 0;
  for (const double t : times) {
    v = ou_step(v, params.beta, params.eta, t - now);
    now = t;
    while (jump_idx < cp.times.size() && cp.times[jump_idx] == t) {
      const double y = cp.sizes[jump_idx];
      const double v_pre = v;
      const double dv = params.phi * v_pre * y * y;
      const double dg = std::sqrt(v_pre) * y;
      v += dv;
      g += dg;
      path.jump_log.push_back({t, y, v_pre, dv, dg, params.phi});
      ++jump_idx;
    }
    path.t.push_back(t);
    path.V.push_back(v);
    path.G.push_back(g);
  }
  return path;
}

double time_average_v(const CogarchPath& path, double beta, double eta,
                      double from, double to) {
  const double mean = beta / eta;
  double integral = 0.0;
  for (size_t i = 0; i + 1 < path.t.size(); ++i) {
    const double a = std::max(path.t[i], from);
    const double b = std::min(path.t[i + 1], to);
    if (b <= a) continue;
    const double va = mean + (path.V[i] - mean) * std::exp(-eta * (a - path.t[i]));
    const double dt = b - a;
    integral += dt * mean + (va - mean) * (1.0 - std::exp(-eta * dt)) / eta;
  }
  return integral / (to - from);
}

SupCogarchPath simulate_supcogarch(const SupCogarchParams& params, double horizon,
                                   std::uint64_t seed, double grid_dt) {
  double total_p = 0.0;
  for (const auto& [phi, p] : params.pi) total_p += p;
  if (std::abs(total_p - 1.0) > 1e-9) {
    throw std::invalid_argument("pi probabilities must sum to 1");
  }
  const auto pm = phi_max(params.driver, params.eta);
  for (const auto& [phi, p] : params.pi) {
    (void)p;
    if (pm.finite && phi >= pm.value) {
      std::ostringstream os;
      os << "phi = " << phi << " is outside the stationarity interval [0, "
         << pm.value << ")";
      throw InadmissiblePhi(os.str());
    }
  }

  rng::CounterStream jump_stream(seed, kJumpStream);
  const auto cp = sample_cp_stream(params.driver, horizon, jump_stream, {});
  rng::CounterStream mark_stream(seed, kMarkStream);
  std::vector<size_t> marks(cp.times.size());
  for (size_t j = 0; j < cp.times.size(); ++j) {
    double pick = mark_stream.uniform();
    size_t m = params.pi.size() - 1;
    for (size_t i = 0; i < params.pi.size(); ++i) {
      if (pick < params.pi[i].second) {
        m = i;
        break;
      }
      pick -= params.pi[i].second;
    }
    marks[j] = m;
  }

  SupCogarchPath path;
  const size_t n_phi = params.pi.size();
  for (const auto& [phi, p] : params.pi) {
    (void)p;
    path.phis.push_back(phi);
  }
  path.components.assign(n_phi, {});

  const double mean = params.beta / params.eta;
  std::vector<double> v(n_phi, mean);
  double vbar = mean;
  double now = 0.0;
  path.t.push_back(0.0);
  path.vbar_sde.push_back(vbar);
  path.vbar_closed.push_back(mean);
  for (size_t i = 0; i < n_phi; ++i) path.components[i].push_back(v[i]);

  struct Shot {
    double t;
    double weight;  // phi_j V^{phi_j}_{t-} y^2
  };
  std::vector<Shot> shots;

  const auto times = merged_times(cp, horizon, grid_dt);
  size_t jump_idx = 0;
  for (const double t : times) {
    const double dt = t - now;
    for (size_t i = 0; i < n_phi; ++i) {
      v[i] = ou_step(v[i], params.beta, params.eta, dt);
    }
    vbar = ou_step(vbar, params.beta, params.eta, dt);
    now = t;
    while (jump_idx < cp.times.size() && cp.times[jump_idx] == t) {
      const double y = cp.sizes[jump_idx];
      const size_t m = marks[jump_idx];
      const double phi_m = path.phis[m];
      const double v_pre = v[m];
      const double dvbar = phi_m * v_pre * y * y;
      vbar += dvbar;
      shots.push_back({t, dvbar});
      path.jump_log.push_back({t, y, v_pre, dvbar, std::sqrt(v_pre) * y, phi_m});
      for (size_t i = 0; i < n_phi; ++i) {
        const double vp = v[i];
        v[i] = vp + path.phis[i] * vp * y * y;
      }
      ++jump_idx;
    }
    double closed = mean;
    for (const auto& s : shots) {
      closed += std::exp(-params.eta * (t - s.t)) * s.weight;
    }
    path.t.push_back(t);
    path.vbar_sde.push_back(vbar);
    path.vbar_closed.push_back(closed);
    for (size_t i = 0; i < n_phi; ++i) path.components[i].push_back(v[i]);
  }
  return path;
}

quad::Verdict check_supcog_existence(const SupCogarchParams& params,
                                     std::span<const double> horizon_ladder,
                                     int n_paths, std::uint64_t seed,
                                     const quad::QuadConfig& cfg) {
  if (horizon_ladder.empty() || n_paths <= 0) {
    return quad::Verdict::undecided("empty ladder or no paths");
  }
  std::vector<double> ladder(horizon_ladder.begin(), horizon_ladder.end());
  std::sort(ladder.begin(), ladder.end());
  const double t_max = ladder.back();

  int converged = 0;
  int growing = 0;
  double sum_final = 0.0;
  double sumsq_final = 0.0;
  std::vector<double> mean_f(ladder.size(), 0.0);

  for (int p = 0; p < n_paths; ++p) {
    const auto path = simulate_supcogarch(params, t_max,
                                          rng::derive_seed(seed, p), t_max);
    // Integrand of the existence check along this path, smooth between
    // jumps; integrate with a fixed 8-point panel per inter-event segment.
    const auto inner = [&](double s) {
      double acc = 0.0;
      // Reconstruct V^{phi}_s from the sampled path (piecewise ODE).
      size_t idx = 0;
      while (idx + 1 < path.t.size() && path.t[idx + 1] <= s) ++idx;
      const double dt = s - path.t[idx];
      for (size_t i = 0; i < path.phis.size(); ++i) {
        const double vs =
            ou_step(path.components[i][idx], params.beta, params.eta, dt);
        const double phi = path.phis[i];
        const double pr = params.pi[i].second;
        const auto g = [&](double y) {
          return std::min(1.0, y * y * phi * std::exp(-params.eta * s) * vs);
        };
        const auto v = integrate_jump(g, params.driver, cfg);
        if (!v.finite()) {
          throw quad::EvaluationError("existence inner integral did not converge",
                                      {s});
        }
        acc += pr * v.value;
      }
      return acc;
    };

    std::vector<double> f_at(ladder.size(), 0.0);
    double acc = 0.0;
    double prev_edge = 0.0;
    size_t rung = 0;
    std::vector<double> edges = path.t;
    for (double T : ladder) edges.push_back(T);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    for (const double edge : edges) {
      if (edge <= prev_edge) continue;
      if (edge > t_max) break;
      // 4-point Gauss-Legendre per segment.
      static const double gx[2] = {0.3399810435848563, 0.8611363115940526};
      static const double gw[2] = {0.6521451548625461, 0.3478548451374538};
      const double mid = 0.5 * (prev_edge + edge);
      const double half = 0.5 * (edge - prev_edge);
      double seg = 0.0;
      for (int i = 0; i < 2; ++i) {
        seg += gw[i] * (inner(mid + half * gx[i]) + inner(mid - half * gx[i]));
      }
      acc += seg * half;
      prev_edge = edge;
      while (rung < ladder.size() && edge >= ladder[rung]) {
        f_at[rung] = acc;
        ++rung;
      }
    }
    while (rung < ladder.size()) f_at[rung++] = acc;

    for (size_t i = 0; i < ladder.size(); ++i) mean_f[i] += f_at[i] / n_paths;
    const size_t n = ladder.size();
    if (n >= 2) {
      const double last_inc = f_at[n - 1] - f_at[n - 2];
      const double prev_inc = n >= 3 ? f_at[n - 2] - f_at[n - 3] : last_inc;
      if (last_inc <= 1e-3 * std::max(1.0, f_at[n - 1])) {
        ++converged;
      } else if (last_inc > prev_inc) {
        ++growing;
      }
    } else {
      ++converged;
    }
    sum_final += f_at[n - 1];
    sumsq_final += f_at[n - 1] * f_at[n - 1];
  }

  const double frac = static_cast<double>(converged) / n_paths;
  std::ostringstream note;
  note << "Monte Carlo ladder surrogate: " << converged << "/" << n_paths
       << " paths converged (statistical evidence, not a proof)";
  if (frac >= 0.99) {
    const double mean = sum_final / n_paths;
    const double var =
        std::max(0.0, (sumsq_final - sum_final * sum_final / n_paths) /
                          std::max(1, n_paths - 1));
    auto v = quad::Verdict::finite_value(mean, std::sqrt(var / n_paths));
    v.reason = note.str();
    return v;
  }
  if (growing > n_paths / 2) {
    double slope = 0.0;
    if (ladder.size() >= 2 && mean_f[ladder.size() - 2] > 0.0) {
      slope = std::log(mean_f.back() / mean_f[ladder.size() - 2]) /
              std::log(ladder.back() / ladder[ladder.size() - 2]);
    }
    return quad::Verdict::infinite_growth(slope, note.str());
  }
  return quad::Verdict::undecided(note.str());
}

}  // namespace ambit::volmod
