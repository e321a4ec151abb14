#include "clin/symmetry.hpp"

#include <algorithm>

#include "clin/error.hpp"

namespace clin {

namespace {

void require_same(const VectorField& a, const VectorField& b) {
  if (a.variables != b.variables) throw Error(ErrorCode::VariableMismatch, "vector fields act on different variables");
}

}  // namespace

VectorField::VectorField(std::vector<std::string> vars, std::vector<Expr> comps)
    : variables(std::move(vars)), components(std::move(comps)) {
  if (variables.size() != components.size())
    throw Error(ErrorCode::InvalidArgument, "vector field needs one component per variable");
  for (auto& c : components) c = normalize(c);
}

Expr VectorField::apply(const Expr& e) const {
  std::vector<Expr> terms;
  for (std::size_t k = 0; k < variables.size(); ++k)
    if (!components[k].is_zero()) terms.push_back(components[k] * differentiate(e, variables[k]));
  return normalize(add(std::move(terms)));
}

bool VectorField::is_zero() const {
  return std::all_of(components.begin(), components.end(), [](const Expr& e) { return e.is_zero(); });
}

VectorField operator+(const VectorField& a, const VectorField& b) {
  require_same(a, b);
  std::vector<Expr> c;
  for (std::size_t k = 0; k < a.components.size(); ++k) c.push_back(a.components[k] + b.components[k]);
  return {a.variables, std::move(c)};
}

VectorField operator-(const VectorField& a, const VectorField& b) {
  require_same(a, b);
  std::vector<Expr> c;
  for (std::size_t k = 0; k < a.components.size(); ++k) c.push_back(a.components[k] - b.components[k]);
  return {a.variables, std::move(c)};
}

VectorField operator*(const Expr& s, const VectorField& v) {
  std::vector<Expr> c;
  for (const auto& x : v.components) c.push_back(s * x);
  return {v.variables, std::move(c)};
}

VectorField lie_bracket(const VectorField& v, const VectorField& w) {
  require_same(v, w);
  std::vector<Expr> c;
  for (std::size_t k = 0; k < v.variables.size(); ++k) c.push_back(v.apply(w.components[k]) - w.apply(v.components[k]));
  VectorField out(v.variables, std::move(c));
  for (auto& e : out.components) {
    try {
      e = expand(e, 4000);
    } catch (const Error&) {
    }
  }
  return out;
}

std::string to_string(const VectorField& v) {
  std::string s;
  for (std::size_t k = 0; k < v.variables.size(); ++k) {
    if (v.components[k].is_zero()) continue;
    if (!s.empty()) s += " + ";
    const bool sum = v.components[k].kind() == NodeKind::Sum;
    s += (sum ? "(" : "") + to_string(v.components[k]) + (sum ? ")" : "") + "*d/d" + v.variables[k];
  }
  return s.empty() ? "0" : s;
}

std::vector<VectorField> fields_of(const FieldSet& set) {
  const Bindings b = set.bindings();
  std::vector<VectorField> out;
  for (const auto& comps : set.components) {
    std::vector<Expr> c;
    for (const auto& e : comps) c.push_back(substitute(e, b));
    out.emplace_back(set.variables, std::move(c));
  }
  return out;
}

VectorField field_named(const FieldSet& set, const std::string& name) {
  auto it = std::find(set.names.begin(), set.names.end(), name);
  if (it == set.names.end()) throw Error(ErrorCode::InvalidArgument, "no field named " + name + " in " + set.name);
  return fields_of(set)[static_cast<std::size_t>(it - set.names.begin())];
}

ZeroVerdict is_zero_field(const VectorField& v, const ZeroTestOptions& options) {
  ZeroVerdict out;
  out.kind = ZeroVerdict::Kind::Zero;
  out.exact = true;
  for (const auto& c : v.components) {
    ZeroVerdict z = is_identically_zero(c, v.variables, options);
    out.max_magnitude = std::max(out.max_magnitude, z.max_magnitude);
    out.exact = out.exact && z.exact;
    if (z.is_nonzero()) return z;
    if (!z.is_zero()) out.kind = ZeroVerdict::Kind::Unknown;
    out.valid_samples = std::max(out.valid_samples, z.valid_samples);
  }
  return out;
}

std::string_view to_string(Proportionality p) {
  switch (p) {
    case Proportionality::Found: return "found";
    case Proportionality::Inconsistent: return "inconsistent";
    case Proportionality::Degenerate: return "degenerate";
  }
  return "?";
}

Theorem2Report check_theorem2(const VectorField& x1, const VectorField& y1, const VectorField& x2,
                              const VectorField& y2, const ZeroTestOptions& options) {
  require_same(x1, y1);
  require_same(x1, x2);
  require_same(x1, y2);
  const auto& vars = x1.variables;
  Theorem2Report r;

  for (std::size_t k = 0; k < vars.size(); ++k) {
    const Expr& a = x2.components[k];
    const Expr& b = y2.components[k];
    const Expr det = normalize(a * a + b * b);
    if (det.is_zero() || is_identically_zero(det, vars, options).is_zero()) continue;
    r.rho1 = normalize((x1.components[k] * a + y1.components[k] * b) / det);
    r.rho2 = normalize((y1.components[k] * a - x1.components[k] * b) / det);
    r.solved_from = vars[k];
    break;
  }
  if (r.solved_from.empty()) {
    r.proportionality = Proportionality::Degenerate;
  } else {
    for (std::size_t k = 0; k < vars.size(); ++k) {
      const Expr ex = x1.components[k] - (r.rho1 * x2.components[k] - r.rho2 * y2.components[k]);
      const Expr ey = y1.components[k] - (r.rho1 * y2.components[k] + r.rho2 * x2.components[k]);
      if (!is_identically_zero(ex, vars, options).is_zero()) r.inconsistent.push_back("X1." + vars[k]);
      if (!is_identically_zero(ey, vars, options).is_zero()) r.inconsistent.push_back("Y1." + vars[k]);
    }
    r.proportionality = r.inconsistent.empty() ? Proportionality::Found : Proportionality::Inconsistent;
    for (const auto& v : vars) {
      if (!is_identically_zero(differentiate(r.rho1, v), vars, options).is_zero() ||
          !is_identically_zero(differentiate(r.rho2, v), vars, options).is_zero()) {
        r.nonconstant = true;
        break;
      }
    }
  }

  r.commutators[0] = lie_bracket(x1, x2) - lie_bracket(y1, y2);
  r.commutators[1] = lie_bracket(x1, y2) + lie_bracket(y1, x2);
  for (int i = 0; i < 2; ++i) r.commutator_verdicts[i] = is_zero_field(r.commutators[i], options);
  r.overall = r.proportionality == Proportionality::Found && r.nonconstant && r.commutator_verdicts[0].is_zero() &&
              r.commutator_verdicts[1].is_zero();
  return r;
}

}  // namespace clin
