#include "clin/numverify.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>

#include "clin/error.hpp"
#include "clin/lincheck.hpp"

namespace clin {

namespace {

Bindings merged(std::initializer_list<Bindings> layers) {
  Bindings out;
  for (const Bindings& b : layers)
    for (const auto& [k, v] : b) out.insert_or_assign(k, v);
  return out;
}

Expr bind_params(const Expr& e, const Bindings& b) {
  // Param values may mention other params.
  Expr out = e;
  for (int pass = 0; pass < 4; ++pass) {
    Expr next = substitute(out, b);
    if (next == out) break;
    out = next;
  }
  return out;
}

void require_bound(const Expr& e, const std::vector<std::string>& allowed, const std::string& what) {
  for (const auto& s : free_symbols(e)) {
    if (s == "%i") continue;
    if (std::find(allowed.begin(), allowed.end(), s) == allowed.end())
      throw Error(ErrorCode::InvalidArgument, what + " has no value for " + s);
  }
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

// ---------------------------------------------------------------------------
// Derivative jets of a closed-form solution.

// Symbol -> derivative of the solution components, for every derivative
// symbol the system kind admits.
Bindings solution_jets(const SystemSpec& sys, const std::array<Expr, 2>& values) {
  Bindings b;
  const bool ode = is_ode(sys.kind);
  const auto& iv = sys.independents;
  for (int k = 0; k < 2; ++k) {
    const std::string& dep = sys.dependents[k];
    b.emplace(dep, values[k]);
    for (std::size_t i = 0; i < iv.size(); ++i) {
      const Expr d1 = differentiate(values[k], iv[i]);
      b.emplace(derivative_symbol(dep, {iv[i]}, iv, ode), d1);
      for (std::size_t j = i; j < iv.size(); ++j)
        b.emplace(derivative_symbol(dep, {iv[i], iv[j]}, iv, ode), differentiate(d1, iv[j]));
    }
  }
  return b;
}

std::vector<std::pair<std::string, Expr>> residual_lines(const SystemSpec& sys) {
  std::vector<std::pair<std::string, Expr>> lines;
  const Bindings aux = sys.aux_definitions();
  int n = 0;
  for (const auto& eq : sys.equations)
    lines.emplace_back("equation." + std::to_string(++n), substitute(eq.lhs - eq.rhs, aux));
  n = 0;
  for (const auto& eq : sys.constraints)
    lines.emplace_back("constraint." + std::to_string(++n), substitute(eq.lhs - eq.rhs, aux));
  return lines;
}

std::pair<Expr, Expr> cr_residual_exprs(const std::array<Expr, 2>& values, const std::vector<std::string>& iv) {
  return cr_residual(values[0], values[1], iv.at(0), iv.at(1));
}

struct Probe {
  bool ok = false;
  double magnitude = 0.0;
  std::string reason;
};

Probe probe(const Evaluator& ev, std::span<const Complex> at) {
  Probe p;
  try {
    const EvalTrace t = ev.trace(at);
    if (t.min_denominator < kSingularityFloor) {
      p.reason = "near singularity (|denominator| " + fmt(t.min_denominator) + ")";
      return p;
    }
    p.ok = true;
    p.magnitude = std::abs(t.value);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DomainError) throw;
    p.reason = e.what();
  }
  return p;
}

ResidualReport residual_on_points(const SystemSpec& sys, const Solution& sol, const std::vector<std::vector<double>>& pts,
                                  double tol, const Bindings& extra, bool with_cr) {
  const Bindings params = merged({sys.bindings(), sol.bindings(), extra});
  std::array<Expr, 2> values{bind_params(sol.values[0], params), bind_params(sol.values[1], params)};
  for (auto& v : values) require_bound(v, sys.independents, "solution " + sol.name);
  const Bindings jets = solution_jets(sys, values);

  auto lines = residual_lines(sys);
  if (with_cr) {
    auto [c1, c2] = cr_residual_exprs(values, sys.independents);
    lines.emplace_back("cauchy-riemann.1", c1);
    lines.emplace_back("cauchy-riemann.2", c2);
  }
  std::vector<Evaluator> evs;
  ResidualReport r;
  r.tolerance = tol;
  for (auto& [label, e] : lines) {
    Expr x = bind_params(substitute(bind_params(e, params), jets), params);
    require_bound(x, sys.independents, label + " of " + sys.name);
    evs.emplace_back(x, sys.independents);
    r.labels.push_back(label);
  }
  r.max_residual.assign(lines.size(), 0.0);
  for (const auto& p : pts) {
    std::vector<Complex> at(p.begin(), p.end());
    std::vector<double> m(evs.size());
    bool ok = true;
    for (std::size_t k = 0; k < evs.size() && ok; ++k) {
      Probe pr = probe(evs[k], at);
      if (!pr.ok) {
        r.excluded.push_back({p, pr.reason});
        ok = false;
      }
      m[k] = pr.magnitude;
    }
    if (!ok) continue;
    ++r.points;
    for (std::size_t k = 0; k < evs.size(); ++k) r.max_residual[k] = std::max(r.max_residual[k], m[k]);
  }
  if (r.points == 0) throw Error(ErrorCode::AllPointsExcluded, "every grid point of " + sys.name + " is singular");
  r.pass = r.max() <= tol;
  return r;
}

}  // namespace

double ResidualReport::max() const {
  double m = 0.0;
  for (double v : max_residual) m = std::max(m, v);
  return m;
}

// ---------------------------------------------------------------------------
// RK4

Trajectory rk4_integrate(const SystemSpec& sys, const std::array<double, 4>& init, double a, double b, double step,
                         const Bindings& extra) {
  if (!is_ode(sys.kind)) throw Error(ErrorCode::InvalidArgument, "rk4 needs an ode system");
  if (!(step > 0.0) || !(b > a)) throw Error(ErrorCode::InvalidArgument, "rk4 needs step > 0 and b > a");
  const bool second = sys.kind == SystemKind::ODE2;
  const Bindings params = merged({sys.bindings(), extra});
  auto rhs = solve_principal(sys);
  const std::string& x = sys.independents.at(0);
  std::vector<std::string> syms{x, sys.dependents[0], sys.dependents[1]};
  if (second) {
    syms.push_back(sys.dependents[0] + "'");
    syms.push_back(sys.dependents[1] + "'");
  }
  std::vector<Evaluator> ev;
  for (auto& r : rhs) {
    r = bind_params(r, params);
    require_bound(r, syms, "right side of " + sys.name);
    ev.emplace_back(r, syms);
  }
  using State = std::array<double, 4>;
  auto deriv = [&](double t, const State& s) -> std::optional<State> {
    std::vector<Complex> at{t, s[0], s[1]};
    if (second) {
      at.push_back(s[2]);
      at.push_back(s[3]);
    }
    try {
      const Complex r0 = ev[0](at);
      const Complex r1 = ev[1](at);
      if (!finite(r0) || !finite(r1)) return std::nullopt;
      if (second) return State{s[2], s[3], r0.real(), r1.real()};
      return State{r0.real(), r1.real(), 0.0, 0.0};
    } catch (const Error& e) {
      if (e.code() == ErrorCode::DomainError) return std::nullopt;
      throw;
    }
  };

  const long n = std::max(1L, std::lround((b - a) / step));
  const double h = (b - a) / static_cast<double>(n);
  Trajectory tr;
  tr.step = h;
  State s = init;
  auto k0 = deriv(a, s);
  if (!k0) throw Error(ErrorCode::ImmediateBlowup, "right side is singular at the initial point");
  auto record = [&](double t, const State& st, const State& d) {
    tr.x.push_back(t);
    tr.states.push_back(second ? st : State{st[0], st[1], d[0], d[1]});
  };
  record(a, s, *k0);
  auto add = [](const State& u, const State& v, double c) {
    return State{u[0] + c * v[0], u[1] + c * v[1], u[2] + c * v[2], u[3] + c * v[3]};
  };
  std::optional<State> k1 = k0;
  for (long i = 0; i < n; ++i) {
    const double t = a + static_cast<double>(i) * h;
    auto k2 = deriv(t + h / 2, add(s, *k1, h / 2));
    if (!k2) break;
    auto k3 = deriv(t + h / 2, add(s, *k2, h / 2));
    if (!k3) break;
    auto k4 = deriv(t + h, add(s, *k3, h));
    if (!k4) break;
    State next;
    for (int j = 0; j < 4; ++j) next[j] = s[j] + h / 6 * ((*k1)[j] + 2 * (*k2)[j] + 2 * (*k3)[j] + (*k4)[j]);
    if (!std::all_of(next.begin(), next.end(), [](double v) { return std::isfinite(v); })) break;
    const double tn = i + 1 == n ? b : a + static_cast<double>(i + 1) * h;
    auto kn = deriv(tn, next);
    if (!kn) {
      record(tn, next, State{0, 0, 0, 0});
      s = next;
      break;
    }
    s = next;
    record(tn, s, *kn);
    k1 = kn;
  }
  tr.truncated = tr.x.size() < static_cast<std::size_t>(n + 1);
  return tr;
}

// ---------------------------------------------------------------------------
// Residuals

ResidualReport residual_ode(const SystemSpec& sys, const Solution& sol, const Grid1D& grid, double tol,
                            const Bindings& extra) {
  if (!is_ode(sys.kind)) throw Error(ErrorCode::InvalidArgument, "residual_ode needs an ode system");
  if (grid.n < 1) throw Error(ErrorCode::InvalidArgument, "grid needs at least one point");
  std::vector<std::vector<double>> pts;
  for (int i = 0; i < grid.n; ++i)
    pts.push_back({grid.n == 1 ? grid.a : grid.a + (grid.b - grid.a) * i / (grid.n - 1)});
  auto r = residual_on_points(sys, sol, pts, tol, extra, false);
  r.grid = std::to_string(grid.n) + " points on [" + fmt(grid.a) + ", " + fmt(grid.b) + "]";
  return r;
}

ResidualReport residual_pde(const SystemSpec& sys, const Solution& sol, const Box& box, double tol,
                            const Bindings& extra) {
  if (is_ode(sys.kind)) throw Error(ErrorCode::InvalidArgument, "residual_pde needs a pde system");
  if (box.n < 1) throw Error(ErrorCode::InvalidArgument, "box needs at least one node per side");
  std::vector<std::vector<double>> pts;
  auto node = [](double lo, double hi, int i, int n) { return n == 1 ? lo : lo + (hi - lo) * i / (n - 1); };
  for (int i = 0; i < box.n; ++i)
    for (int j = 0; j < box.n; ++j) pts.push_back({node(box.x0, box.x1, i, box.n), node(box.y0, box.y1, j, box.n)});
  auto r = residual_on_points(sys, sol, pts, tol, extra, true);
  std::ostringstream g;
  g << box.n << "x" << box.n << " nodes on [" << fmt(box.x0) << ", " << fmt(box.x1) << "] x [" << fmt(box.y0) << ", "
    << fmt(box.y1) << "]";
  r.grid = g.str();
  return r;
}

// ---------------------------------------------------------------------------
// Finite differences

std::vector<std::vector<Complex>> fornberg_weights(Complex z0, const std::vector<Complex>& nodes, int m) {
  const int n = static_cast<int>(nodes.size()) - 1;
  if (n < m) throw Error(ErrorCode::InvalidArgument, "not enough nodes for the derivative order");
  std::vector<std::vector<Complex>> c(m + 1, std::vector<Complex>(n + 1, 0.0));
  Complex c1 = 1.0;
  Complex c4 = nodes[0] - z0;
  c[0][0] = 1.0;
  for (int i = 1; i <= n; ++i) {
    const int mn = std::min(i, m);
    Complex c2 = 1.0;
    const Complex c5 = c4;
    c4 = nodes[i] - z0;
    for (int j = 0; j < i; ++j) {
      const Complex c3 = nodes[i] - nodes[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c[k][i] = c1 * (double(k) * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
        c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
      }
      for (int k = mn; k >= 1; --k) c[k][j] = (c4 * c[k][j] - double(k) * c[k - 1][j]) / c3;
      c[0][j] = c4 * c[0][j] / c3;
    }
    c1 = c2;
  }
  return c;
}

namespace {

struct MappedNode {
  Complex chi;
  std::vector<Complex> values;  // dependent components of the image
};

struct MapEvaluator {
  std::vector<Evaluator> comps;
  bool complex_independent = false;

  MapEvaluator(const PointTransformation& map, const std::vector<std::string>& source_vars, const Bindings& params) {
    if (map.source.size() != 3) throw Error(ErrorCode::InvalidArgument, "ode maps need a three-variable source");
    complex_independent = map.target.size() == 4;
    for (const auto& c : map.components) {
      Expr e = bind_params(c, params);
      Bindings rename;
      for (std::size_t k = 0; k < 3; ++k)
        if (map.source[k] != source_vars[k]) rename.emplace(map.source[k], Expr::symbol(source_vars[k]));
      e = substitute(e, rename);
      require_bound(e, source_vars, "map " + map.name);
      comps.emplace_back(e, source_vars);
    }
  }

  std::optional<MappedNode> operator()(double x, double f, double g, std::string& reason) const {
    const std::vector<Complex> at{x, f, g};
    std::vector<Complex> v;
    for (const auto& ev : comps) {
      try {
        const EvalTrace t = ev.trace(at);
        if (t.min_denominator < kSingularityFloor) {
          reason = "map singular";
          return std::nullopt;
        }
        v.push_back(t.value);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::DomainError) throw;
        reason = e.what();
        return std::nullopt;
      }
    }
    MappedNode n;
    if (complex_independent) {
      n.chi = v[0] + Complex(0, 1) * v[1];
      n.values = {v[2] + Complex(0, 1) * v[3]};
    } else {
      n.chi = v[0];
      n.values = {v[1], v[2]};
    }
    return n;
  }
};

// Maximal runs with strictly monotone Re(chi) (complex chi: any run of
// distinct consecutive points).
std::vector<std::vector<MappedNode>> monotone_segments(const std::vector<MappedNode>& pts, bool complex_chi) {
  std::vector<std::vector<MappedNode>> segs;
  std::vector<MappedNode> cur;
  int dir = 0;
  for (const auto& p : pts) {
    if (cur.empty()) {
      cur.push_back(p);
      continue;
    }
    const Complex d = p.chi - cur.back().chi;
    const double scale = 1e-12 * std::max(1.0, std::abs(p.chi));
    if (std::abs(d) <= scale) continue;  // coincident image point
    int s = complex_chi ? 1 : (d.real() > 0 ? 1 : (d.real() < 0 ? -1 : 0));
    if (!complex_chi && s == 0) continue;
    if (dir == 0 || s == dir) {
      dir = s;
      cur.push_back(p);
    } else {
      segs.push_back(std::move(cur));
      cur = {segs.back().back(), p};
      dir = s;
    }
  }
  if (!cur.empty()) segs.push_back(std::move(cur));
  return segs;
}

}  // namespace

ResidualReport verify_transformation_ode(const SystemSpec& source, const PointTransformation& map,
                                         const OdeTarget& target, const Trajectory& traj, double tol,
                                         const Bindings& extra) {
  if (!is_ode(source.kind)) throw Error(ErrorCode::InvalidArgument, "source must be an ode system");
  const std::vector<std::string> vars{source.independents.at(0), source.dependents[0], source.dependents[1]};
  const Bindings params = merged({source.bindings(), map.bindings(), extra});
  const MapEvaluator mev(map, vars, params);
  if (target.kind == TargetKind::Linear && mev.complex_independent)
    throw Error(ErrorCode::InvalidArgument, "a linear target needs a real independent variable (three targets)");

  ResidualReport r;
  r.tolerance = tol;
  r.grid = std::to_string(traj.x.size()) + " trajectory nodes on [" + fmt(traj.x.empty() ? 0 : traj.x.front()) + ", " +
           fmt(traj.x.empty() ? 0 : traj.x.back()) + "], step " + fmt(traj.step);
  if (traj.truncated) r.notes.push_back("trajectory truncated at x = " + fmt(traj.x.back()));

  // Keep image spacing near 1e-2 so difference quotients stay above round-off.
  const std::size_t stride =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(0.01 / std::max(traj.step, 1e-12))));
  std::vector<MappedNode> mapped;
  for (std::size_t i = 0; i < traj.x.size(); i += stride) {
    std::string why;
    auto n = mev(traj.x[i], traj.states[i][0], traj.states[i][1], why);
    if (!n) {
      r.excluded.push_back({{traj.x[i]}, why});
      continue;
    }
    mapped.push_back(*n);
  }
  if (mapped.size() < 2) throw Error(ErrorCode::TooFewPoints, "fewer than two mappable trajectory nodes");

  if (target.kind == TargetKind::Constant) {
    const std::size_t m = mapped.front().values.size();
    r.max_residual.assign(m, 0.0);
    for (std::size_t k = 0; k < m; ++k) {
      r.labels.push_back(map.target[mev.complex_independent ? 2 : k + 1] + (mev.complex_independent ? "+i*" + map.target[3] : std::string()) +
                         ".variation");
      for (const auto& p : mapped)
        r.max_residual[k] = std::max(r.max_residual[k], std::abs(p.values[k] - mapped.front().values[k]));
    }
    r.points = static_cast<int>(mapped.size());
    r.pass = r.max() <= tol;
    return r;
  }

  double spread = 0.0;
  for (const auto& p : mapped) spread = std::max(spread, std::abs(p.chi - mapped.front().chi));
  if (spread < 1e-12) throw Error(ErrorCode::DegenerateImage, "all trajectory nodes map to one independent value");

  auto segs = monotone_segments(mapped, mev.complex_independent);
  if (segs.size() > 1) r.notes.push_back("image split into " + std::to_string(segs.size()) + " monotone segments");
  std::vector<std::vector<MappedNode>> usable;
  for (auto& s : segs) {
    if (s.size() >= 5)
      usable.push_back(std::move(s));
    else
      r.notes.push_back("skipped a segment of " + std::to_string(s.size()) + " points");
  }
  if (usable.empty()) throw Error(ErrorCode::TooFewPoints, "no monotone segment has five points");

  if (target.kind == TargetKind::FreeParticle) {
    const std::size_t m = usable.front().front().values.size();
    r.max_residual.assign(m, 0.0);
    for (std::size_t k = 0; k < m; ++k) r.labels.push_back("second-divided-difference." + std::to_string(k + 1));
    for (const auto& s : usable) {
      for (std::size_t i = 0; i + 2 < s.size(); ++i) {
        for (std::size_t k = 0; k < m; ++k) {
          const Complex d01 = (s[i + 1].values[k] - s[i].values[k]) / (s[i + 1].chi - s[i].chi);
          const Complex d12 = (s[i + 2].values[k] - s[i + 1].values[k]) / (s[i + 2].chi - s[i + 1].chi);
          const double dd = std::abs((d12 - d01) / (s[i + 2].chi - s[i].chi));
          r.max_residual[k] = std::max(r.max_residual[k], dd);
        }
        ++r.points;
      }
    }
    r.pass = r.max() <= tol;
    return r;
  }

  // Linear target: seven-point Fornberg stencils along each segment.
  if (!target.system || target.system->kind != SystemKind::ODE2)
    throw Error(ErrorCode::InvalidArgument, "linear target needs an ode2 system");
  const SystemSpec& ts = *target.system;
  const Bindings tparams = merged({ts.bindings(), extra});
  const std::vector<std::string> tsyms{ts.independents.at(0), ts.dependents[0], ts.dependents[1],
                                       ts.dependents[0] + "'", ts.dependents[1] + "'", ts.dependents[0] + "''",
                                       ts.dependents[1] + "''"};
  std::vector<Evaluator> tev;
  for (const auto& eq : ts.equations) {
    Expr e = bind_params(eq.lhs - eq.rhs, tparams);
    require_bound(e, tsyms, "target " + ts.name);
    tev.emplace_back(e, tsyms);
    r.labels.push_back("target.equation." + std::to_string(tev.size()));
  }
  r.max_residual.assign(tev.size(), 0.0);
  constexpr int kHalf = 3;
  for (const auto& s : usable) {
    if (s.size() < 2 * kHalf + 1) {
      r.notes.push_back("segment too short for a seven-point stencil");
      continue;
    }
    for (std::size_t i = kHalf; i + kHalf < s.size(); ++i) {
      std::vector<Complex> nodes;
      for (std::size_t j = i - kHalf; j <= i + kHalf; ++j) nodes.push_back(s[j].chi);
      const auto w = fornberg_weights(s[i].chi, nodes, 2);
      std::array<Complex, 2> d1{}, d2{};
      for (int k = 0; k < 2; ++k)
        for (std::size_t j = 0; j < nodes.size(); ++j) {
          d1[k] += w[1][j] * s[i - kHalf + j].values[k];
          d2[k] += w[2][j] * s[i - kHalf + j].values[k];
        }
      const std::vector<Complex> at{s[i].chi, s[i].values[0], s[i].values[1], d1[0], d1[1], d2[0], d2[1]};
      bool ok = true;
      std::vector<double> m(tev.size());
      for (std::size_t k = 0; k < tev.size() && ok; ++k) {
        Probe p = probe(tev[k], at);
        if (!p.ok) {
          r.excluded.push_back({{s[i].chi.real()}, "target " + p.reason});
          ok = false;
        }
        m[k] = p.magnitude;
      }
      if (!ok) continue;
      ++r.points;
      for (std::size_t k = 0; k < tev.size(); ++k) r.max_residual[k] = std::max(r.max_residual[k], m[k]);
    }
  }
  if (r.points == 0) throw Error(ErrorCode::TooFewPoints, "no stencil could be evaluated");
  r.pass = r.max() <= tol;
  return r;
}

// ---------------------------------------------------------------------------
// Newton inversion

std::vector<std::array<double, 2>> newton_invert(const PlanarMap& map, const std::vector<std::array<double, 2>>& targets,
                                                 std::array<double, 2> seed, double tol, int max_iter) {
  const std::vector<std::string> vars{map.x, map.y};
  require_bound(map.X, vars, "planar map");
  require_bound(map.Y, vars, "planar map");
  const Evaluator fx(map.X, vars), fy(map.Y, vars);
  const Evaluator jxx(differentiate(map.X, map.x), vars), jxy(differentiate(map.X, map.y), vars);
  const Evaluator jyx(differentiate(map.Y, map.x), vars), jyy(differentiate(map.Y, map.y), vars);
  auto F = [&](const std::array<double, 2>& p, const std::array<double, 2>& t) {
    const std::vector<Complex> at{p[0], p[1]};
    return std::array<double, 2>{fx(at).real() - t[0], fy(at).real() - t[1]};
  };
  std::vector<std::array<double, 2>> out;
  std::array<double, 2> p = seed;
  for (const auto& t : targets) {
    bool done = false;
    for (int it = 0; it < max_iter && !done; ++it) {
      std::array<double, 2> r;
      try {
        r = F(p, t);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::DomainError) throw Error(ErrorCode::SingularJacobian, "map is singular on the iteration path");
        throw;
      }
      const std::vector<Complex> at{p[0], p[1]};
      const double a = jxx(at).real(), b = jxy(at).real(), c = jyx(at).real(), d = jyy(at).real();
      const double det = a * d - b * c;
      const double scale = std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d), 1e-300});
      if (!std::isfinite(det) || std::abs(det) < 1e-14 * scale * scale)
        throw Error(ErrorCode::SingularJacobian, "jacobian is singular at (" + fmt(p[0]) + ", " + fmt(p[1]) + ")");
      const std::array<double, 2> dp{(d * r[0] - b * r[1]) / det, (a * r[1] - c * r[0]) / det};
      const double norm0 = std::hypot(r[0], r[1]);
      double lambda = 1.0;
      std::array<double, 2> next{};
      for (int halving = 0; halving < 30; ++halving) {
        next = {p[0] - lambda * dp[0], p[1] - lambda * dp[1]};
        try {
          const auto rn = F(next, t);
          if (std::hypot(rn[0], rn[1]) < norm0 || norm0 == 0.0) break;
        } catch (const Error& e) {
          if (e.code() != ErrorCode::DomainError) throw;
        }
        lambda /= 2;
      }
      const double step = lambda * std::hypot(dp[0], dp[1]);
      p = next;
      if (step < tol * std::max(1.0, std::hypot(p[0], p[1]))) done = true;
    }
    if (!done) {
      throw Error(ErrorCode::NoConvergence,
                  "newton did not converge for target (" + fmt(t[0]) + ", " + fmt(t[1]) + ")");
    }
    out.push_back(p);
  }
  return out;
}

// ---------------------------------------------------------------------------
// PDE transformations

namespace {

struct ImageSampler {
  Evaluator X, Y, F, G;
};

constexpr std::array<double, 5> kD1{1.0 / 12, -8.0 / 12, 0.0, 8.0 / 12, -1.0 / 12};
constexpr std::array<double, 5> kD2{-1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12, -1.0 / 12};

}  // namespace

ResidualReport verify_transformation_pde(const SystemSpec& source, const PointTransformation& map,
                                         const SystemSpec& target, const Solution& sol, const Box& box, double tol,
                                         const Bindings& extra) {
  if (is_ode(source.kind) || is_ode(target.kind))
    throw Error(ErrorCode::InvalidArgument, "pde transformation checks need pde source and target systems");
  if (map.source.size() != 4 || map.target.size() != 4)
    throw Error(ErrorCode::InvalidArgument, "pde maps go from four variables to four variables");

  ResidualReport r;
  r.tolerance = tol;
  {
    const ResidualReport src = residual_pde(source, sol, box, 1e-6, extra);
    if (!src.pass) {
      r.notes.push_back("solution does not satisfy the source system (max residual " + fmt(src.max()) + ")");
      r.labels = {"source"};
      r.max_residual = {src.max()};
      r.points = src.points;
      r.pass = false;
      r.grid = src.grid;
      return r;
    }
  }

  const Bindings params = merged({source.bindings(), sol.bindings(), map.bindings(), extra});
  const auto& iv = source.independents;
  Bindings on_solution;
  on_solution.emplace(map.source[0], Expr::symbol(iv[0]));
  on_solution.emplace(map.source[1], Expr::symbol(iv[1]));
  on_solution.emplace(map.source[2], bind_params(sol.values[0], params));
  on_solution.emplace(map.source[3], bind_params(sol.values[1], params));
  std::array<Expr, 4> image;
  for (int k = 0; k < 4; ++k) {
    image[k] = bind_params(substitute(bind_params(map.components[k], params), on_solution), params);
    require_bound(image[k], iv, "map " + map.name + " on solution " + sol.name);
  }
  const PlanarMap planar{image[0], image[1], iv[0], iv[1]};
  const Evaluator evF(image[2], iv), evG(image[3], iv), evX(image[0], iv), evY(image[1], iv);

  // A square inside the image: centred on the image of the box centre, half
  // the distance to the image of the boundary.
  const double xc = (box.x0 + box.x1) / 2, yc = (box.y0 + box.y1) / 2;
  auto img = [&](double x, double y) {
    const std::vector<Complex> at{x, y};
    return std::array<double, 2>{evX(at).real(), evY(at).real()};
  };
  const auto c = img(xc, yc);
  double dist = std::numeric_limits<double>::infinity();
  constexpr int kEdge = 64;
  for (int i = 0; i <= kEdge; ++i) {
    const double s = static_cast<double>(i) / kEdge;
    for (const auto& p : {img(box.x0 + s * (box.x1 - box.x0), box.y0), img(box.x0 + s * (box.x1 - box.x0), box.y1),
                          img(box.x0, box.y0 + s * (box.y1 - box.y0)), img(box.x1, box.y0 + s * (box.y1 - box.y0))})
      dist = std::min(dist, std::hypot(p[0] - c[0], p[1] - c[1]));
  }
  if (!(dist > 1e-9) || !std::isfinite(dist))
    throw Error(ErrorCode::ImageDegenerate, "image of the box has no interior around its centre");
  const double half = dist / 2 / std::sqrt(2.0);

  // Target residual evaluators over the target's jet symbols.
  const Bindings tparams = merged({target.bindings(), extra});
  std::vector<std::string> tsyms{target.independents[0], target.independents[1], target.dependents[0],
                                 target.dependents[1]};
  for (const auto& s : target.derivative_symbols()) tsyms.push_back(s);
  std::vector<Evaluator> tev;
  for (auto& [label, e] : residual_lines(target)) {
    Expr x = bind_params(e, tparams);
    require_bound(x, tsyms, label + " of target " + target.name);
    tev.emplace_back(x, tsyms);
    r.labels.push_back("target." + label);
  }
  r.max_residual.assign(tev.size(), 0.0);

  const auto& tiv = target.independents;
  const bool tode = false;
  auto sym_index = [&](const std::string& dep, std::vector<std::string> wrt) {
    const std::string s = derivative_symbol(dep, std::move(wrt), tiv, tode);
    return static_cast<std::size_t>(std::find(tsyms.begin(), tsyms.end(), s) - tsyms.begin());
  };

  constexpr int kSamples = 5;
  std::array<double, 2> warm{xc, yc};
  auto residual_at = [&](double X0, double Y0, double d) -> std::vector<double> {
    std::vector<std::array<double, 2>> targets;
    for (int i = -2; i <= 2; ++i)
      for (int j = -2; j <= 2; ++j) targets.push_back({X0 + i * d, Y0 + j * d});
    const auto pre = newton_invert(planar, {std::array<double, 2>{X0, Y0}}, warm);
    warm = pre[0];
    std::vector<std::array<double, 2>> sols;
    for (const auto& t : targets) sols.push_back(newton_invert(planar, {t}, warm)[0]);
    std::array<std::array<std::array<double, 2>, 5>, 5> v{};
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) {
        const auto& p = sols[i * 5 + j];
        const std::vector<Complex> at{p[0], p[1]};
        v[i][j] = {evF(at).real(), evG(at).real()};
      }
    std::vector<Complex> jet(tsyms.size(), 0.0);
    jet[0] = X0;
    jet[1] = Y0;
    for (int k = 0; k < 2; ++k) {
      const std::string& dep = target.dependents[k];
      jet[2 + k] = v[2][2][k];
      double dx = 0, dy = 0, dxx = 0, dyy = 0, dxy = 0;
      for (int i = 0; i < 5; ++i) {
        dx += kD1[i] * v[i][2][k];
        dy += kD1[i] * v[2][i][k];
        dxx += kD2[i] * v[i][2][k];
        dyy += kD2[i] * v[2][i][k];
        for (int j = 0; j < 5; ++j) dxy += kD1[i] * kD1[j] * v[i][j][k];
      }
      auto put = [&](std::vector<std::string> wrt, double val) {
        const auto idx = sym_index(dep, std::move(wrt));
        if (idx < jet.size()) jet[idx] = val;
      };
      put({tiv[0]}, dx / d);
      put({tiv[1]}, dy / d);
      put({tiv[0], tiv[0]}, dxx / (d * d));
      put({tiv[1], tiv[1]}, dyy / (d * d));
      put({tiv[0], tiv[1]}, dxy / (d * d));
    }
    std::vector<double> out;
    for (const auto& ev : tev) out.push_back(std::abs(ev(jet)));
    return out;
  };

  double d = std::min(half / 4, 0.05);
  double truncation = 0.0;
  for (int si = 0; si < kSamples; ++si) {
    for (int sj0 = 0; sj0 < kSamples; ++sj0) {
      const int sj = si % 2 == 0 ? sj0 : kSamples - 1 - sj0;  // serpentine keeps warm starts close
      const double X0 = c[0] - half + 2 * half * (si + 0.5) / kSamples;
      const double Y0 = c[1] - half + 2 * half * (sj + 0.5) / kSamples;
      try {
        const auto coarse = residual_at(X0, Y0, d);
        const auto fine = residual_at(X0, Y0, d / 2);
        for (std::size_t k = 0; k < fine.size(); ++k) {
          r.max_residual[k] = std::max(r.max_residual[k], fine[k]);
          truncation = std::max(truncation, std::abs(coarse[k] - fine[k]));
        }
        ++r.points;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::DomainError) throw;
        r.excluded.push_back({{X0, Y0}, e.what()});
      }
    }
  }
  if (r.points == 0) throw Error(ErrorCode::AllPointsExcluded, "no sample inside the image could be evaluated");
  std::ostringstream g;
  g << kSamples << "x" << kSamples << " samples in [" << fmt(c[0] - half) << ", " << fmt(c[0] + half) << "] x ["
    << fmt(c[1] - half) << ", " << fmt(c[1] + half) << "], spacing " << fmt(d / 2);
  r.grid = g.str();
  r.notes.push_back("richardson estimate of truncation " + fmt(truncation));
  r.pass = r.max() <= tol;
  return r;
}

}  // namespace clin
