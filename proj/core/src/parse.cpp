// Recursive-descent parser for polynomial expressions.

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <string>

#include "dstab/poly.hpp"

namespace dstab {
namespace {

class ExpressionParser {
 public:
  ExpressionParser(const std::string& text, const std::vector<std::string>& vars)
      : text_(text), vars_(vars) {}

  Polynomial parse() {
    Polynomial p = expr();
    skip_space();
    if (pos_ != text_.size()) {
      fail(std::string("unexpected character '") + text_[pos_] + "'");
    }
    return p;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(what, 0, pos_ + 1);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Polynomial expr() {
    const bool negate = accept('-');
    Polynomial acc = term();
    if (negate) acc = -acc;
    while (true) {
      if (accept('+')) {
        acc = acc + term();
      } else if (accept('-')) {
        acc = acc - term();
      } else {
        return acc;
      }
    }
  }

  Polynomial term() {
    Polynomial acc = factor();
    while (accept('*')) acc = acc * factor();
    return acc;
  }

  Polynomial factor() {
    Polynomial b = base();
    if (accept('^')) {
      skip_space();
      const std::size_t start = pos_;
      if (pos_ < text_.size() && text_[pos_] == '-') fail("negative exponent");
      double value = 0.0;
      if (!read_number(value)) fail("expected exponent after '^'");
      if (value != std::floor(value)) {
        pos_ = start;
        fail("non-integer exponent");
      }
      if (value > 1000) {
        pos_ = start;
        fail("exponent too large");
      }
      b = b.pow(static_cast<int>(value));
    }
    return b;
  }

  Polynomial base() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Polynomial inner = expr();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      double value = 0.0;
      if (!read_number(value)) fail("malformed number");
      return Polynomial::constant(vars_.size(), value);
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
        ++pos_;
      }
      const std::string name = text_.substr(start, pos_ - start);
      for (std::size_t i = 0; i < vars_.size(); ++i) {
        if (vars_[i] == name) return Polynomial::variable(vars_.size(), i);
      }
      pos_ = start;
      fail("unknown identifier '" + name + "'");
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  // digits ['.' digits] [('e'|'E') ['+'|'-'] digits]
  bool read_number(double& out) {
    const std::size_t start = pos_;
    bool digits = false;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
      digits = true;
    }
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        ++pos_;
        digits = true;
      }
    }
    if (!digits) {
      pos_ = start;
      return false;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < text_.size() && (text_[p] == '+' || text_[p] == '-')) ++p;
      if (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]))) {
        while (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]))) ++p;
        pos_ = p;
      }
    }
    out = std::strtod(text_.substr(start, pos_ - start).c_str(), nullptr);
    return true;
  }

  const std::string& text_;
  const std::vector<std::string>& vars_;
  std::size_t pos_ = 0;
};

}  // namespace

Polynomial parse_polynomial(const std::string& text,
                            const std::vector<std::string>& variables) {
  return ExpressionParser(text, variables).parse();
}

}  // namespace dstab
