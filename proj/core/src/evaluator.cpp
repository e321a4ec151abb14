#include <cmath>
#include <limits>
#include <unordered_map>

#include "clin/error.hpp"
#include "clin/symexpr.hpp"

namespace clin {

namespace {

const Complex kI(0.0, 1.0);

[[noreturn]] void domain_error(const std::string& what) { throw Error(ErrorCode::DomainError, what); }

void check_finite(const Complex& z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) domain_error("non-finite intermediate");
}

bool is_real(const Complex& z) { return z.imag() == 0.0; }

Complex int_power(Complex b, long n) {
  if (n < 0) {
    if (b == Complex(0.0)) domain_error("division by zero");
    b = 1.0 / b;
    n = -n;
  }
  Complex r(1.0);
  while (n) {
    if (n & 1) r *= b;
    b *= b;
    n >>= 1;
  }
  return r;
}

struct Track {
  bool on;
  double min_den = std::numeric_limits<double>::infinity();
  void den(const Complex& z) {
    if (on) min_den = std::min(min_den, std::abs(z));
  }
};

Complex apply_fn(Function fn, const Complex* a, Track& t) {
  switch (fn) {
    case Function::Exp:
      return std::exp(a[0]);
    case Function::Ln:
      t.den(a[0]);
      if (a[0] == Complex(0.0)) domain_error("ln(0)");
      return std::log(a[0]);
    case Function::Sin:
      return std::sin(a[0]);
    case Function::Cos:
      return std::cos(a[0]);
    case Function::Sqrt:
      return std::sqrt(a[0]);
    case Function::Arctan: {
      const Complex w = a[0];
      if (is_real(w)) return std::atan(w.real());
      const Complex num = 1.0 + kI * w;
      const Complex den = 1.0 - kI * w;
      t.den(num);
      t.den(den);
      if (num == Complex(0.0) || den == Complex(0.0)) domain_error("arctan at a logarithmic singularity");
      return std::log(num / den) / (2.0 * kI);
    }
    case Function::Arctan2: {
      const Complex y = a[0];
      const Complex x = a[1];
      if (is_real(y) && is_real(x)) {
        t.den(std::hypot(x.real(), y.real()));
        if (x.real() == 0.0 && y.real() == 0.0) domain_error("arctan2(0, 0)");
        return std::atan2(y.real(), x.real());
      }
      const Complex r = std::sqrt(x * x + y * y);
      t.den(r);
      if (r == Complex(0.0)) domain_error("arctan2 with zero modulus");
      const Complex q = (x + kI * y) / r;
      if (q == Complex(0.0)) domain_error("arctan2 at a logarithmic singularity");
      return -kI * std::log(q);
    }
  }
  throw Error(ErrorCode::UnsupportedFunction, "unknown function");
}

}  // namespace

Evaluator::Evaluator(const Expr& e, std::vector<std::string> symbols) : symbols_(std::move(symbols)) {
  std::unordered_map<const detail::Node*, int> index;
  auto emit = [&](auto& self, const Expr& node) -> int {
    if (auto it = index.find(node.node()); it != index.end()) return it->second;
    Instr in;
    in.kind = node.kind();
    switch (node.kind()) {
      case NodeKind::Constant:
        in.constant = Complex(node.value().get_d(), 0.0);
        break;
      case NodeKind::Symbol:
        if (node.is_imaginary_unit()) {
          in.kind = NodeKind::Constant;
          in.constant = kI;
          break;
        }
        for (std::size_t i = 0; i < symbols_.size(); ++i) {
          if (symbols_[i] == node.name()) in.slot = static_cast<int>(i);
        }
        if (in.slot < 0) throw Error(ErrorCode::InvalidArgument, "unbound symbol " + node.name());
        break;
      case NodeKind::Power:
        in.args.push_back(self(self, node.base()));
        if (node.exponent().is_integer() && abs(node.exponent().value()) < 1 << 20) {
          in.integer_exponent = true;
          in.int_exponent = node.exponent().value().get_num().get_si();
        } else {
          in.args.push_back(self(self, node.exponent()));
        }
        break;
      case NodeKind::Apply:
        in.fn = node.function();
        [[fallthrough]];
      default:
        for (const auto& op : node.operands()) in.args.push_back(self(self, op));
        break;
    }
    program_.push_back(std::move(in));
    const int id = static_cast<int>(program_.size()) - 1;
    index.emplace(node.node(), id);
    return id;
  };
  emit(emit, e);
}

EvalTrace Evaluator::run(std::span<const Complex> values, bool tracking) const {
  if (values.size() != symbols_.size()) throw Error(ErrorCode::InvalidArgument, "wrong number of values");
  std::vector<Complex> reg(program_.size());
  Track t{tracking};
  double max_mag = 0.0;
  Complex args[2];
  for (std::size_t k = 0; k < program_.size(); ++k) {
    const Instr& in = program_[k];
    Complex v;
    switch (in.kind) {
      case NodeKind::Constant:
        v = in.constant;
        break;
      case NodeKind::Symbol:
        v = values[in.slot];
        break;
      case NodeKind::Sum:
        v = 0.0;
        for (int a : in.args) v += reg[a];
        break;
      case NodeKind::Product:
        v = 1.0;
        for (int a : in.args) v *= reg[a];
        break;
      case NodeKind::Power: {
        const Complex b = reg[in.args[0]];
        if (in.integer_exponent) {
          if (in.int_exponent < 0) t.den(b);
          v = int_power(b, in.int_exponent);
          break;
        }
        const Complex x = reg[in.args[1]];
        if (b == Complex(0.0)) {
          if (x.real() > 0.0) {
            v = 0.0;
            break;
          }
          domain_error("zero to a non-positive power");
        }
        if (x.real() < 0.0) t.den(b);
        v = std::exp(x * std::log(b));
        break;
      }
      case NodeKind::Apply:
        for (std::size_t i = 0; i < in.args.size(); ++i) args[i] = reg[in.args[i]];
        v = apply_fn(in.fn, args, t);
        break;
    }
    check_finite(v);
    if (tracking) max_mag = std::max(max_mag, std::abs(v));
    reg[k] = v;
  }
  return EvalTrace{reg.back(), max_mag, t.min_den};
}

Complex Evaluator::operator()(std::span<const Complex> values) const { return run(values, false).value; }

EvalTrace Evaluator::trace(std::span<const Complex> values) const { return run(values, true); }

double Evaluator::real(std::span<const double> values) const {
  std::vector<Complex> z(values.begin(), values.end());
  return run(z, false).value.real();
}

namespace {

std::pair<std::vector<std::string>, std::vector<Complex>> unpack(const Expr& e, const ComplexEnv& env) {
  std::vector<std::string> names;
  std::vector<Complex> values;
  for (const auto& s : free_symbols(e)) {
    auto it = env.find(s);
    if (it == env.end()) throw Error(ErrorCode::InvalidArgument, "unbound symbol " + s);
    names.push_back(s);
    values.push_back(it->second);
  }
  return {names, values};
}

}  // namespace

Complex eval_complex(const Expr& e, const ComplexEnv& env) {
  auto [names, values] = unpack(e, env);
  return Evaluator(e, names)(values);
}

EvalTrace eval_traced(const Expr& e, const ComplexEnv& env) {
  auto [names, values] = unpack(e, env);
  return Evaluator(e, names).trace(values);
}

}  // namespace clin
