#include "motivic/cylinder.hpp"
#include "motivic/errors.hpp"

#include <cctype>

namespace motivic {

namespace {

struct Token {
  enum Type { Ident, Number, Op, End } type;
  std::string text;
  std::size_t pos;
};

std::vector<Token> tokenize(const std::string& s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) ++i;
      out.push_back({Token::Ident, s.substr(start, i - start), start});
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
      out.push_back({Token::Number, s.substr(start, i - start), start});
    } else {
      static const char* two[] = {"==", "!=", ">=", "<=", "&&", "||"};
      bool matched = false;
      for (const char* op : two) {
        if (s.compare(i, 2, op) == 0) {
          std::string t = op;
          if (t == "&&") t = "&";
          if (t == "||") t = "|";
          out.push_back({Token::Op, t, start});
          i += 2;
          matched = true;
          break;
        }
      }
      if (matched) continue;
      if (std::string("()<>=!&|+-*/^,").find(c) == std::string::npos) {
        throw ParseError("unexpected character '" + std::string(1, c) + "' at " + std::to_string(i));
      }
      out.push_back({Token::Op, std::string(1, c == '=' ? '=' : c), start});
      ++i;
    }
  }
  out.push_back({Token::End, "", s.size()});
  return out;
}

class ConditionParser {
 public:
  explicit ConditionParser(const std::string& text) : text_(text), toks_(tokenize(text)) {}

  Condition run() {
    Condition c = disjunction();
    if (peek().type != Token::End) fail("unexpected '" + peek().text + "'");
    return c;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("set condition: " + what + " at " + std::to_string(peek().pos) + " in '" + text_ + "'");
  }
  const Token& peek(std::size_t ahead = 0) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }
  bool accept(const std::string& op) {
    if (peek().type == Token::Op && peek().text == op) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(const std::string& op) {
    if (!accept(op)) fail("expected '" + op + "'");
  }
  int integer() {
    int sign = 1;
    if (accept("-")) sign = -1;
    if (peek().type != Token::Number) fail("expected integer");
    return sign * std::stoi(toks_[pos_++].text);
  }
  int coordinate() {
    if (peek().type != Token::Ident) fail("expected coordinate");
    const std::string name = toks_[pos_++].text;
    if (name == "x") return 0;
    if (name == "y") return 1;
    if (name == "s") return 2;
    if (name.size() > 1 && name[0] == 'x' &&
        std::all_of(name.begin() + 1, name.end(), [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); })) {
      return std::stoi(name.substr(1));
    }
    fail("unknown coordinate '" + name + "'");
  }

  Condition disjunction() {
    std::vector<Condition> parts{conjunction()};
    while (accept("|")) parts.push_back(conjunction());
    return Condition::any(std::move(parts));
  }
  Condition conjunction() {
    std::vector<Condition> parts{unary()};
    while (accept("&")) parts.push_back(unary());
    return Condition::all(std::move(parts));
  }
  Condition unary() {
    if (accept("!")) return !unary();
    if (peek().type == Token::Ident && peek().text == "true") {
      ++pos_;
      return Condition::truth();
    }
    if (peek().type == Token::Ident && peek().text == "false") {
      ++pos_;
      return Condition::falsity();
    }
    if (peek().type == Token::Op && peek().text == "(") {
      const std::size_t save = pos_;
      try {
        ++pos_;
        Condition inner = disjunction();
        expect(")");
        static const std::vector<std::string> arith{"==", "!=", "+", "-", "*", "^", "/"};
        if (!(peek().type == Token::Op &&
              std::find(arith.begin(), arith.end(), peek().text) != arith.end())) {
          return inner;
        }
      } catch (const ParseError&) {
      }
      pos_ = save;
    }
    return comparison();
  }

  Condition comparison() {
    if (peek().type == Token::Ident && peek().text == "ord" && peek(1).type == Token::Op && peek(1).text == "(") {
      pos_ += 2;
      const int i = coordinate();
      expect(")");
      const std::string op = relop();
      const int e = integer();
      if (op == ">=") return OrdAtLeast{i, e};
      if (op == ">") return OrdAtLeast{i, e + 1};
      if (op == "==") return OrdExact{i, e};
      if (op == "!=") return !Condition(OrdExact{i, e});
      if (op == "<") return !Condition(OrdAtLeast{i, e});
      return !Condition(OrdAtLeast{i, e + 1});
    }
    const Poly lhs = expr();
    const std::string op = relop();
    if (op != "==" && op != "!=") fail("coefficient expressions compare only with == or !=");
    const Poly rhs = expr();
    Condition c = classify(lhs - rhs);
    return op == "==" ? c : !c;
  }

  std::string relop() {
    static const std::vector<std::string> ops{"==", "!=", ">=", "<=", ">", "<"};
    for (const auto& op : ops) {
      if (accept(op)) return op;
    }
    fail("expected comparison");
  }

  static Condition classify(const Poly& f) {
    if (f.is_constant()) return f.is_zero() ? Condition::truth() : Condition::falsity();
    int degree = 0;
    for (const auto& [m, c] : f.terms()) {
      int d = 0;
      for (const auto& [v, e] : m) d += e;
      degree = std::max(degree, d);
    }
    if (degree > 1) return PolyEq{f};
    const Rational k = -f.constant_term();
    std::vector<std::pair<std::pair<int, int>, Rational>> terms;
    for (const auto& [m, c] : f.terms()) {
      if (m.empty()) continue;
      terms.push_back({{slot_coord(m.front().first), slot_index(m.front().first)}, c});
    }
    if (terms.size() == 1) {
      const auto& [slot, c] = terms.front();
      const Rational value = k / c;
      if (value == 0) return !Condition(CoeffNonzero{slot.first, slot.second});
      return CoeffEq{slot.first, slot.second, value};
    }
    return LinearRelation{terms, k};
  }

  Poly expr() {
    Poly v = term();
    for (;;) {
      if (accept("+")) {
        v += term();
      } else if (accept("-")) {
        v -= term();
      } else {
        return v;
      }
    }
  }
  Poly term() {
    Poly v = factor();
    while (accept("*")) v *= factor();
    return v;
  }
  Poly factor() {
    if (accept("-")) return -factor();
    Poly base = primary();
    if (accept("^")) {
      const int e = integer();
      if (e < 0) fail("negative exponent");
      base = base.pow(static_cast<unsigned>(e));
    }
    return base;
  }
  Poly primary() {
    if (accept("(")) {
      Poly v = expr();
      expect(")");
      return v;
    }
    if (peek().type == Token::Number) {
      Rational r(Integer(toks_[pos_++].text));
      if (peek().type == Token::Op && peek().text == "/" && peek(1).type == Token::Number) {
        ++pos_;
        r /= Rational(Integer(toks_[pos_++].text));
      }
      return Poly(r);
    }
    if (peek().type == Token::Ident && peek().text == "coeff") {
      ++pos_;
      expect("(");
      const int i = coordinate();
      expect(",");
      const int j = integer();
      expect(")");
      return Poly::var(slot_var(i, j));
    }
    fail("expected coefficient expression");
  }

  std::string text_;
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

Condition parse_condition(const std::string& text) { return ConditionParser(text).run(); }

CylinderSet parse_set(const std::string& text) {
  CylinderSet out;
  std::string rest;
  // Headers are `dim d` and `polebound N`, separated by newlines or ';'.
  std::string chunk;
  auto flush = [&](std::string piece) {
    const auto b = piece.find_first_not_of(" \t\r");
    if (b == std::string::npos) return;
    piece = piece.substr(b);
    auto header = [&](const std::string& key, int& target) {
      if (piece.compare(0, key.size(), key) == 0 && piece.size() > key.size() &&
          std::isspace(static_cast<unsigned char>(piece[key.size()]))) {
        try {
          target = std::stoi(piece.substr(key.size()));
        } catch (const std::exception&) {
          throw ParseError("bad header '" + piece + "'");
        }
        return true;
      }
      return false;
    };
    if (header("dim", out.dim) || header("polebound", out.pole_bound)) return;
    rest += (rest.empty() ? "" : " ") + piece;
  };
  for (char c : text) {
    if (c == '\n' || c == ';') {
      flush(chunk);
      chunk.clear();
    } else {
      chunk += c;
    }
  }
  flush(chunk);
  if (out.dim < 1) throw ParseError("dim must be positive");
  if (out.pole_bound < 0) throw ParseError("polebound must be nonnegative");
  out.condition = rest.empty() ? Condition::truth() : parse_condition(rest);
  if (out.condition.max_coord() >= out.dim) throw ParseError("condition mentions a coordinate beyond dim");
  return out;
}

}  // namespace motivic
