#include "genlie/expr.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include "genlie/error.hpp"

namespace genlie {

struct Node {
  Kind kind = Kind::Number;
  Number number;
  std::string name;
  Fn fn = Fn::Exp;
  int dependent = -1;
  std::vector<int> ints;
  std::vector<Expr> args;
  std::vector<std::string> params;
  std::string inverse;
  std::size_t hash = 0;
};

namespace {

struct FnInfo {
  Fn fn;
  const char* name;
  bool smooth;
};

constexpr FnInfo kFunctions[] = {
    {Fn::Exp, "exp", true},       {Fn::Log, "log", true},     {Fn::Sin, "sin", true},
    {Fn::Cos, "cos", true},       {Fn::Tanh, "tanh", true},   {Fn::Artanh, "artanh", true},
    {Fn::Sinh, "sinh", true},     {Fn::Cosh, "cosh", true},   {Fn::Arsinh, "arsinh", true},
    {Fn::Sqrt, "sqrt", true},     {Fn::Abs, "abs", false},    {Fn::Sign, "sign", false},
};

std::size_t mix(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

std::size_t compute_hash(const Node& n) {
  std::size_t h = std::hash<int>{}(static_cast<int>(n.kind));
  switch (n.kind) {
    case Kind::Number:
      h = mix(h, std::hash<double>{}(n.number.value()));
      break;
    case Kind::Symbol:
    case Kind::Apply:
      h = mix(h, std::hash<std::string>{}(n.name));
      break;
    case Kind::Func:
      h = mix(h, static_cast<std::size_t>(n.fn));
      break;
    default:
      break;
  }
  for (int i : n.ints) h = mix(h, static_cast<std::size_t>(i));
  for (const Expr& a : n.args) h = mix(h, a.hash());
  return h;
}

const Node& zero_node() {
  static const Node n = [] {
    Node z;
    z.hash = compute_hash(z);
    return z;
  }();
  return n;
}

}  // namespace

const char* fn_name(Fn fn) {
  for (const auto& info : kFunctions)
    if (info.fn == fn) return info.name;
  return "?";
}

bool fn_from_name(const std::string& name, Fn& out) {
  for (const auto& info : kFunctions) {
    if (name == info.name) {
      out = info.fn;
      return true;
    }
  }
  return false;
}

bool fn_is_smooth(Fn fn) {
  for (const auto& info : kFunctions)
    if (info.fn == fn) return info.smooth;
  return false;
}

Expr make_node(Node&& node) {
  node.hash = compute_hash(node);
  return Expr(std::make_shared<const Node>(std::move(node)));
}

Expr::Expr() : node_(std::shared_ptr<const Node>(std::shared_ptr<const Node>{}, &zero_node())) {}

Expr::Expr(Number value) {
  Node n;
  n.kind = Kind::Number;
  n.number = value;
  *this = make_node(std::move(n));
}

Kind Expr::kind() const { return node_->kind; }
const Number& Expr::number() const { return node_->number; }
const std::string& Expr::name() const { return node_->name; }
Fn Expr::fn() const { return node_->fn; }
int Expr::dependent() const { return node_->dependent; }
std::span<const int> Expr::orders() const { return node_->ints; }
std::span<const Expr> Expr::args() const { return node_->args; }
std::span<const std::string> Expr::params() const { return node_->params; }
const std::string& Expr::inverse() const { return node_->inverse; }
std::size_t Expr::hash() const { return node_->hash; }

int Expr::jet_order() const {
  if (!is_jet()) return 0;
  int s = 0;
  for (int c : node_->ints) s += c;
  return s;
}

int compare(const Expr& a, const Expr& b) {
  if (a.node() == b.node()) return 0;
  if (a.kind() != b.kind()) return static_cast<int>(a.kind()) < static_cast<int>(b.kind()) ? -1 : 1;
  switch (a.kind()) {
    case Kind::Number:
      return a.number().compare(b.number()) != 0
                 ? a.number().compare(b.number())
                 : (a.number().identical(b.number()) ? 0 : (a.number().exact() ? -1 : 1));
    case Kind::Symbol: {
      // Jet variables order by dependent index, then by name length (order),
      // then by name; plain symbols sort before jets.
      if (a.dependent() != b.dependent()) return a.dependent() < b.dependent() ? -1 : 1;
      if (a.jet_order() != b.jet_order()) return a.jet_order() < b.jet_order() ? -1 : 1;
      int c = a.name().compare(b.name());
      return c < 0 ? -1 : (c > 0 ? 1 : 0);
    }
    case Kind::Func:
      if (a.fn() != b.fn()) return static_cast<int>(a.fn()) < static_cast<int>(b.fn()) ? -1 : 1;
      break;
    case Kind::Apply: {
      int c = a.name().compare(b.name());
      if (c != 0) return c < 0 ? -1 : 1;
      auto oa = a.orders();
      auto ob = b.orders();
      if (!std::equal(oa.begin(), oa.end(), ob.begin(), ob.end())) {
        return std::lexicographical_compare(oa.begin(), oa.end(), ob.begin(), ob.end()) ? -1 : 1;
      }
      break;
    }
    default:
      break;
  }
  auto xa = a.args();
  auto xb = b.args();
  std::size_t n = std::min(xa.size(), xb.size());
  for (std::size_t i = 0; i < n; ++i) {
    int c = compare(xa[i], xb[i]);
    if (c != 0) return c;
  }
  if (xa.size() != xb.size()) return xa.size() < xb.size() ? -1 : 1;
  return 0;
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.node() == b.node()) return true;
  if (a.hash() != b.hash()) return false;
  return compare(a, b) == 0;
}

bool operator<(const Expr& a, const Expr& b) { return compare(a, b) < 0; }

Expr symbol(const std::string& name) {
  Node n;
  n.kind = Kind::Symbol;
  n.name = name;
  return make_node(std::move(n));
}

Expr jet_symbol(const std::string& name, int dependent, std::vector<int> orders) {
  Node n;
  n.kind = Kind::Symbol;
  n.name = name;
  n.dependent = dependent;
  n.ints = std::move(orders);
  return make_node(std::move(n));
}

Expr add(std::vector<Expr> terms) {
  if (terms.empty()) return Expr(0);
  if (terms.size() == 1) return terms.front();
  Node n;
  n.kind = Kind::Add;
  n.args = std::move(terms);
  return make_node(std::move(n));
}

Expr mul(std::vector<Expr> factors) {
  if (factors.empty()) return Expr(1);
  if (factors.size() == 1) return factors.front();
  Node n;
  n.kind = Kind::Mul;
  n.args = std::move(factors);
  return make_node(std::move(n));
}

Expr power(const Expr& base, const Expr& exponent) {
  Node n;
  n.kind = Kind::Pow;
  n.args = {base, exponent};
  return make_node(std::move(n));
}

Expr func(Fn fn, const Expr& arg) {
  Node n;
  n.kind = Kind::Func;
  n.fn = fn;
  n.args = {arg};
  return make_node(std::move(n));
}

Expr apply(const std::string& name, std::vector<std::string> params, std::vector<int> orders,
           std::vector<Expr> args, std::string inverse) {
  if (orders.size() != args.size() || params.size() != args.size()) {
    throw InputError("function '" + name + "' applied with inconsistent arity");
  }
  Node n;
  n.kind = Kind::Apply;
  n.name = name;
  n.params = std::move(params);
  n.ints = std::move(orders);
  n.args = std::move(args);
  n.inverse = std::move(inverse);
  return make_node(std::move(n));
}

Expr operator+(const Expr& a, const Expr& b) { return add({a, b}); }
Expr operator-(const Expr& a, const Expr& b) { return add({a, mul({Expr(-1), b})}); }
Expr operator*(const Expr& a, const Expr& b) { return mul({a, b}); }
Expr operator/(const Expr& a, const Expr& b) { return mul({a, power(b, Expr(-1))}); }
Expr operator-(const Expr& a) { return mul({Expr(-1), a}); }

namespace {

void collect_symbols(const Expr& e, ExprSet& out) {
  if (e.is_symbol()) {
    out.insert(e);
    return;
  }
  for (const Expr& a : e.args()) collect_symbols(a, out);
}

}  // namespace

ExprSet free_symbols(const Expr& e) {
  ExprSet out;
  collect_symbols(e, out);
  return out;
}

bool depends_on(const Expr& e, const std::string& symbol_name) {
  if (e.is_symbol()) return e.name() == symbol_name;
  for (const Expr& a : e.args())
    if (depends_on(a, symbol_name)) return true;
  return false;
}

bool contains_apply(const Expr& e) {
  if (e.kind() == Kind::Apply) return true;
  for (const Expr& a : e.args())
    if (contains_apply(a)) return true;
  return false;
}

bool contains_nonsmooth(const Expr& e) {
  if (e.kind() == Kind::Func && !fn_is_smooth(e.fn())) return true;
  for (const Expr& a : e.args())
    if (contains_nonsmooth(a)) return true;
  return false;
}

// ---------------------------------------------------------------------------
// Printing

namespace {

enum Prec { kSum = 1, kProduct = 2, kUnary = 3, kPower = 4, kAtom = 5 };

int precedence(const Expr& e) {
  switch (e.kind()) {
    case Kind::Number: {
      const Number& n = e.number();
      if (n.is_negative()) return kUnary;
      if (n.exact() && n.denominator() != 1) return kProduct;
      return kAtom;
    }
    case Kind::Add:
      return kSum;
    case Kind::Mul:
      return kProduct;
    case Kind::Pow:
      return kPower;
    default:
      return kAtom;
  }
}

void print(std::ostream& os, const Expr& e);

void print_wrapped(std::ostream& os, const Expr& e, int min_prec) {
  if (precedence(e) < min_prec) {
    os << '(';
    print(os, e);
    os << ')';
  } else {
    print(os, e);
  }
}

bool single_letter_params(std::span<const std::string> params) {
  for (const auto& p : params)
    if (p.size() != 1) return false;
  return true;
}

bool default_arguments(const Expr& e) {
  auto params = e.params();
  auto args = e.args();
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (!args[i].is_symbol() || args[i].name() != params[i]) return false;
  }
  return true;
}

void print_apply(std::ostream& os, const Expr& e) {
  auto orders = e.orders();
  bool any = std::any_of(orders.begin(), orders.end(), [](int o) { return o != 0; });
  bool defaults = default_arguments(e);
  if (defaults && !any) {
    os << e.name();
    return;
  }
  if (defaults && single_letter_params(e.params())) {
    os << e.name() << '_';
    for (std::size_t i = 0; i < orders.size(); ++i)
      for (int k = 0; k < orders[i]; ++k) os << e.params()[i];
    return;
  }
  os << e.name();
  if (any) {
    if (orders.size() == 1) {
      for (int k = 0; k < orders[0]; ++k) os << '\'';
    } else {
      os << "'[";
      for (std::size_t i = 0; i < orders.size(); ++i) os << (i ? "," : "") << orders[i];
      os << ']';
    }
  }
  os << '(';
  auto args = e.args();
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) os << ", ";
    print(os, args[i]);
  }
  os << ')';
}

// Splits a product into numeric coefficient, numerator and denominator factors.
void split_product(const Expr& e, Number& coeff, std::vector<Expr>& num, std::vector<Expr>& den) {
  coeff = Number(1);
  for (const Expr& f : e.args()) {
    if (f.is_number()) {
      coeff = coeff * f.number();
    } else if (f.kind() == Kind::Pow && f.arg(1).is_number() && f.arg(1).number().is_negative()) {
      Number ex = -f.arg(1).number();
      den.push_back(ex.is_one() ? f.arg(0) : power(f.arg(0), Expr(ex)));
    } else {
      num.push_back(f);
    }
  }
}

void print_factors(std::ostream& os, const std::vector<Expr>& factors) {
  for (std::size_t i = 0; i < factors.size(); ++i) {
    if (i) os << '*';
    print_wrapped(os, factors[i], kPower);
  }
}

void print_product(std::ostream& os, const Expr& e, bool absolute) {
  Number coeff;
  std::vector<Expr> num, den;
  split_product(e, coeff, num, den);
  if (absolute && coeff.is_negative()) coeff = -coeff;
  bool neg = coeff.is_negative();
  Number mag = neg ? -coeff : coeff;
  if (neg) os << '-';
  Number numer_part = mag;
  Number denom_part(1);
  if (mag.exact() && mag.denominator() != 1) {
    numer_part = Number(mag.numerator());
    denom_part = Number(mag.denominator());
  }
  bool wrote = false;
  if (!numer_part.is_one() || num.empty()) {
    os << numer_part.to_string();
    wrote = true;
  }
  if (!num.empty()) {
    if (wrote) os << '*';
    print_factors(os, num);
  }
  std::vector<Expr> denominator = den;
  if (!denom_part.is_one()) denominator.insert(denominator.begin(), Expr(denom_part));
  if (!denominator.empty()) {
    os << '/';
    if (denominator.size() == 1 && precedence(denominator[0]) >= kPower) {
      print(os, denominator[0]);
    } else {
      os << '(';
      print_factors(os, denominator);
      os << ')';
    }
  }
}

bool negative_term(const Expr& t) {
  if (t.is_number()) return t.number().is_negative();
  if (t.kind() == Kind::Mul) {
    for (const Expr& f : t.args())
      if (f.is_number()) return f.number().is_negative();
  }
  return false;
}

void print(std::ostream& os, const Expr& e) {
  switch (e.kind()) {
    case Kind::Number:
      os << e.number().to_string();
      return;
    case Kind::Symbol:
      os << e.name();
      return;
    case Kind::Add: {
      auto terms = e.args();
      for (std::size_t i = 0; i < terms.size(); ++i) {
        const Expr& t = terms[i];
        if (i == 0) {
          print_wrapped(os, t, kSum + 1);
          continue;
        }
        if (negative_term(t)) {
          os << " - ";
          if (t.is_number()) {
            os << (-t.number()).to_string();
          } else {
            print_product(os, t, true);
          }
        } else {
          os << " + ";
          print_wrapped(os, t, kSum + 1);
        }
      }
      return;
    }
    case Kind::Mul:
      print_product(os, e, false);
      return;
    case Kind::Pow:
      print_wrapped(os, e.arg(0), kAtom);
      os << '^';
      print_wrapped(os, e.arg(1), kAtom);
      return;
    case Kind::Func:
      os << fn_name(e.fn()) << '(';
      print(os, e.arg(0));
      os << ')';
      return;
    case Kind::Apply:
      print_apply(os, e);
      return;
  }
}

}  // namespace

std::string Expr::str() const {
  std::ostringstream os;
  print(os, *this);
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const Expr& e) { return os << e.str(); }

}  // namespace genlie
