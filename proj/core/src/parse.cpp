#include "einmob/parse.hpp"

#include <algorithm>
#include <cctype>
#include <optional>

namespace einmob {

namespace {

std::string join_names(const std::vector<std::string>& names) {
  std::string s;
  for (const auto& n : names) {
    if (!s.empty()) s += ", ";
    s += n;
  }
  return s;
}

std::optional<Func> lookup_function(std::string_view name) {
  static constexpr std::pair<std::string_view, Func> table[] = {
      {"exp", Func::exp},   {"sin", Func::sin},   {"cos", Func::cos}, {"sinh", Func::sinh},
      {"cosh", Func::cosh}, {"sqrt", Func::sqrt}, {"abs", Func::abs},
  };
  for (const auto& [n, f] : table) {
    if (n == name) return f;
  }
  return std::nullopt;
}

class Parser {
 public:
  Parser(std::string_view text, const std::vector<std::string>& coordinates, const std::vector<std::string>& constants)
      : text_(text), coordinates_(coordinates), constants_(constants) {}

  Expr run() {
    skip_space();
    if (at_end()) throw ParseError("empty expression", pos_);
    Expr e = parse_sum();
    skip_space();
    if (!at_end()) throw ParseError(std::string("unexpected character '") + text_[pos_] + "'", pos_);
    return e;
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }

  void skip_space() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (!at_end() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr parse_sum() {
    std::vector<Expr> terms{parse_term()};
    while (true) {
      skip_space();
      if (accept('+')) {
        terms.push_back(parse_term());
      } else if (accept('-')) {
        terms.push_back(Expr::make_negate(parse_term()));
      } else {
        break;
      }
    }
    return terms.size() == 1 ? terms[0] : Expr::make_sum(std::move(terms));
  }

  Expr parse_term() {
    Expr acc = parse_unary();
    while (true) {
      if (accept('*')) {
        acc = Expr::make_product({acc, parse_unary()});
      } else if (accept('/')) {
        acc = Expr::make_quotient(acc, parse_unary());
      } else {
        break;
      }
    }
    return acc;
  }

  Expr parse_unary() {
    if (accept('-')) return Expr::make_negate(parse_unary());
    if (accept('+')) return parse_unary();
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_atom();
    skip_space();
    if (!accept('^')) return base;
    std::size_t where = pos_;
    Expr exponent = normalize(parse_unary());
    if (!exponent.is_constant()) throw ParseError("exponent must be a rational constant", where);
    return Expr::make_power(base, exponent.value());
  }

  Expr parse_atom() {
    skip_space();
    if (at_end()) throw ParseError("unexpected end of expression", pos_);
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = parse_sum();
      if (!accept(')')) throw ParseError("expected ')'", pos_);
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
    throw ParseError(std::string("unexpected character '") + c + "'", pos_);
  }

  Expr parse_number() {
    std::size_t start = pos_;
    while (!at_end() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) ++pos_;
    if (!at_end() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t save = pos_;
      ++pos_;
      if (!at_end() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (at_end() || !std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        pos_ = save;
      } else {
        while (!at_end() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      }
    }
    try {
      return Expr(Rational::parse_decimal(text_.substr(start, pos_ - start)));
    } catch (const std::exception& e) {
      throw ParseError(e.what(), start);
    }
  }

  Expr parse_identifier() {
    std::size_t start = pos_;
    while (!at_end() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) ++pos_;
    std::string name(text_.substr(start, pos_ - start));
    if (auto f = lookup_function(name)) {
      if (!accept('(')) throw ParseError("expected '(' after " + name, pos_);
      Expr arg = parse_sum();
      if (!accept(')')) throw ParseError("expected ')'", pos_);
      return Expr::make_function(*f, arg);
    }
    if (std::find(coordinates_.begin(), coordinates_.end(), name) != coordinates_.end()) return Expr::coordinate(name);
    if (std::find(constants_.begin(), constants_.end(), name) != constants_.end()) return Expr::symbol(name);
    std::vector<std::string> admissible = coordinates_;
    admissible.insert(admissible.end(), constants_.begin(), constants_.end());
    throw UnknownIdentifierError(name, start, std::move(admissible));
  }

  std::string_view text_;
  const std::vector<std::string>& coordinates_;
  const std::vector<std::string>& constants_;
  std::size_t pos_ = 0;
};

}  // namespace

UnknownIdentifierError::UnknownIdentifierError(const std::string& name, std::size_t offset,
                                               std::vector<std::string> admissible)
    : ParseError("unknown identifier '" + name + "' (admissible: " + join_names(admissible) + ")", offset),
      name_(name),
      admissible_(std::move(admissible)) {}

Expr parse_raw(std::string_view text, const std::vector<std::string>& coordinates,
               const std::vector<std::string>& constants) {
  return Parser(text, coordinates, constants).run();
}

Expr parse(std::string_view text, const std::vector<std::string>& coordinates,
           const std::vector<std::string>& constants) {
  Expr raw = parse_raw(text, coordinates, constants);
  try {
    return normalize(raw);
  } catch (const DomainError& e) {
    throw ParseError(e.what(), 0);
  }
}

}  // namespace einmob
