#include "genlie/parse.hpp"

#include <cctype>
#include <cerrno>
#include <cstdlib>
#include <string>

#include "genlie/error.hpp"
#include "genlie/simplify.hpp"

namespace genlie {
namespace {

class Parser {
 public:
  Parser(std::string_view text, const Context& ctx) : text_(text), ctx_(ctx) {}

  Expr run() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError("empty expression", pos_);
    Expr e = parse_sum();
    skip_ws();
    if (pos_ < text_.size()) throw ParseError(std::string("unexpected '") + text_[pos_] + "'", pos_);
    return e;
  }

 private:
  std::string_view text_;
  const Context& ctx_;
  std::size_t pos_ = 0;

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      throw ParseError(std::string("expected '") + c + "'", pos_);
    }
  }

  bool peek(char c) {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  Expr parse_sum() {
    std::vector<Expr> terms{parse_product()};
    for (;;) {
      if (accept('+')) {
        terms.push_back(parse_product());
      } else if (accept('-')) {
        terms.push_back(-parse_product());
      } else {
        break;
      }
    }
    return add(std::move(terms));
  }

  Expr parse_product() {
    std::vector<Expr> factors{parse_unary()};
    for (;;) {
      if (accept('*')) {
        factors.push_back(parse_unary());
      } else if (peek('/')) {
        ++pos_;
        factors.push_back(power(parse_unary(), Expr(-1)));
      } else {
        break;
      }
    }
    return mul(std::move(factors));
  }

  Expr parse_unary() {
    if (accept('-')) return -parse_unary();
    if (accept('+')) return parse_unary();
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_primary();
    if (accept('^')) return power(base, parse_unary());
    return base;
  }

  Expr parse_number() {
    std::size_t start = pos_;
    bool real = false;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      real = true;
      ++pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t save = pos_;
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        real = true;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      } else {
        pos_ = save;
      }
    }
    std::string lit(text_.substr(start, pos_ - start));
    if (lit == ".") throw ParseError("malformed number", start);
    if (!real) {
      errno = 0;
      char* end = nullptr;
      long long v = std::strtoll(lit.c_str(), &end, 10);
      if (errno == 0) return Expr(Number(static_cast<std::int64_t>(v)));
    }
    return Expr(Number::real(std::strtod(lit.c_str(), nullptr)));
  }

  std::vector<Expr> parse_call_args() {
    std::vector<Expr> args;
    if (accept(')')) return args;
    args.push_back(parse_sum());
    while (accept(',')) args.push_back(parse_sum());
    expect(')');
    return args;
  }

  std::vector<int> parse_order_list() {
    std::vector<int> out;
    do {
      skip_ws();
      std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (start == pos_) throw ParseError("expected derivative order", pos_);
      out.push_back(std::atoi(std::string(text_.substr(start, pos_ - start)).c_str()));
    } while (accept(','));
    expect(']');
    return out;
  }

  Expr parse_function(const FunctionDecl& decl, const std::string& suffix, std::size_t at) {
    std::size_t arity = decl.params.size();
    std::vector<int> orders(arity, 0);
    for (char c : suffix) {
      bool found = false;
      for (std::size_t i = 0; i < arity; ++i) {
        if (decl.params[i].size() == 1 && decl.params[i][0] == c) {
          orders[i]++;
          found = true;
          break;
        }
      }
      if (!found) {
        throw ParseError("'" + std::string(1, c) + "' is not a parameter of " + decl.name, at);
      }
    }
    // Primes or an explicit order list.
    int primes = 0;
    while (pos_ < text_.size() && text_[pos_] == '\'') {
      ++pos_;
      ++primes;
    }
    if (primes > 0) {
      if (pos_ < text_.size() && text_[pos_] == '[') {
        if (primes != 1) throw ParseError("use either primes or an order list", pos_);
        ++pos_;
        auto list = parse_order_list();
        if (list.size() != arity) throw ParseError("order list length differs from arity", pos_);
        for (std::size_t i = 0; i < arity; ++i) orders[i] += list[i];
      } else {
        if (arity != 1) throw ParseError("primes need a one-argument function; use F'[..]", at);
        orders[0] += primes;
      }
    }
    std::vector<Expr> args;
    if (accept('(')) {
      args = parse_call_args();
      if (args.size() != arity) {
        throw ParseError(decl.name + " expects " + std::to_string(arity) + " argument(s)", at);
      }
    } else {
      for (const auto& p : decl.params) args.push_back(resolve_symbol(p));
    }
    bool plain = true;
    for (int o : orders) plain = plain && o == 0;
    return apply(decl.name, decl.params, orders, std::move(args), plain ? decl.inverse : std::string{});
  }

  Expr resolve_symbol(const std::string& name) {
    if (ctx_.jets) {
      if (auto j = ctx_.jets->parse_jet(name)) {
        return jet_symbol(ctx_.jets->jet_name(j->first, j->second), j->first, j->second);
      }
    }
    return symbol(name);
  }

  Expr parse_primary() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of input", pos_);
    char c = text_[pos_];
    if (accept('(')) {
      Expr e = parse_sum();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (!std::isalpha(static_cast<unsigned char>(c))) {
      throw ParseError(std::string("unexpected '") + c + "'", pos_);
    }
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    std::string ident(text_.substr(start, pos_ - start));

    Fn fn;
    if (fn_from_name(ident, fn)) {
      if (!accept('(')) throw ParseError("function '" + ident + "' needs an argument", pos_);
      auto args = parse_call_args();
      if (args.size() != 1) throw ParseError("'" + ident + "' takes one argument", start);
      return func(fn, args[0]);
    }

    auto us = ident.find('_');
    std::string base = ident.substr(0, us);
    std::string suffix = us == std::string::npos ? std::string{} : ident.substr(us + 1);
    if (const FunctionDecl* decl = ctx_.find_function(ident)) return parse_function(*decl, {}, start);
    if (const FunctionDecl* decl = ctx_.find_function(base)) {
      if (!suffix.empty()) return parse_function(*decl, suffix, start);
    }
    if (peek('(') || (pos_ < text_.size() && text_[pos_] == '\'')) {
      throw ParseError("unknown function '" + ident + "'", start);
    }
    return resolve_symbol(ident);
  }
};

}  // namespace

Expr parse_raw(std::string_view text, const Context& context) { return Parser(text, context).run(); }

Expr parse(std::string_view text, const Context& context) { return simplify(parse_raw(text, context)); }

}  // namespace genlie
