#include "cpv/parser.hpp"

#include <cctype>
#include <optional>
#include <variant>

namespace cpv {

namespace {

enum class Tok {
  Number, Ident, Keyword,
  LParen, RParen, Comma,
  Plus, Minus, Star, Slash,
  Le, Lt, Ge, Gt, EqEq, Ne,
  End,
};

struct Token {
  Tok kind;
  std::string text;  // identifier path, keyword, or number literal
  Rat number;
  int line = 1;
  int column = 1;
};

bool is_keyword(const std::string& s) {
  static const char* kw[] = {"true", "false", "not", "and", "or", "implies", "iff",
                             "always", "eventually", "next", "until",
                             "min", "max", "floor", "ceil", "abs"};
  for (const char* k : kw) {
    if (s == k) return true;
  }
  return false;
}

class Lexer {
 public:
  explicit Lexer(const std::string& text) : text_(text) { advance(); }

  const Token& peek() const { return current_; }

  Token take() {
    Token t = current_;
    advance();
    return t;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) {
    throw ParseError(msg + " at line " + std::to_string(line_) + ", column " +
                         std::to_string(col_),
                     line_, col_, {});
  }

  void advance() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      bump();
    }
    current_.line = line_;
    current_.column = col_;
    if (pos_ >= text_.size()) {
      current_.kind = Tok::End;
      current_.text = "<end>";
      return;
    }
    char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      lex_number();
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      lex_ident_or_keyword();
      return;
    }
    switch (c) {
      case '(': bump(); set(Tok::LParen, "("); return;
      case ')': bump(); set(Tok::RParen, ")"); return;
      case ',': bump(); set(Tok::Comma, ","); return;
      case '+': bump(); set(Tok::Plus, "+"); return;
      case '-': bump(); set(Tok::Minus, "-"); return;
      case '*': bump(); set(Tok::Star, "*"); return;
      case '/': bump(); set(Tok::Slash, "/"); return;
      case '<':
        bump();
        if (peek_char() == '=') { bump(); set(Tok::Le, "<="); } else { set(Tok::Lt, "<"); }
        return;
      case '>':
        bump();
        if (peek_char() == '=') { bump(); set(Tok::Ge, ">="); } else { set(Tok::Gt, ">"); }
        return;
      case '=':
        bump();
        if (peek_char() == '=') { bump(); set(Tok::EqEq, "=="); return; }
        fail("expected '==' (single '=' is not an operator)");
      case '!':
        bump();
        if (peek_char() == '=') { bump(); set(Tok::Ne, "!="); return; }
        fail("expected '!='");
      default:
        fail(std::string("unexpected character '") + c + "'");
    }
  }

  void lex_number() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) bump();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      bump();
      if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        fail("expected digits after decimal point");
      }
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) bump();
    } else if (pos_ + 1 < text_.size() && text_[pos_] == '/' &&
               std::isdigit(static_cast<unsigned char>(text_[pos_ + 1]))) {
      // "n/d" with no whitespace is a rational literal; a spaced '/' is division.
      bump();
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) bump();
    }
    current_.kind = Tok::Number;
    current_.text = text_.substr(start, pos_ - start);
    auto r = rat_from_string(current_.text);
    if (!r) fail("bad numeric literal '" + current_.text + "'");
    current_.number = *r;
  }

  void lex_ident_or_keyword() {
    std::size_t start = pos_;
    auto ident_char = [&](char c) {
      return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
    };
    while (pos_ < text_.size() && ident_char(text_[pos_])) bump();
    std::string word = text_.substr(start, pos_ - start);
    if (is_keyword(word)) {
      current_.kind = Tok::Keyword;
      current_.text = word;
      return;
    }
    // Variable path: ident ('.' ident | "['" chars "']")*
    std::string path = word;
    while (pos_ < text_.size()) {
      if (text_[pos_] == '.' && pos_ + 1 < text_.size() &&
          (std::isalpha(static_cast<unsigned char>(text_[pos_ + 1])) || text_[pos_ + 1] == '_')) {
        bump();
        std::size_t seg = pos_;
        while (pos_ < text_.size() && ident_char(text_[pos_])) bump();
        path += "." + text_.substr(seg, pos_ - seg);
      } else if (text_[pos_] == '[') {
        bump();
        if (pos_ >= text_.size() || text_[pos_] != '\'') fail("expected ' after '['");
        bump();
        std::size_t seg = pos_;
        while (pos_ < text_.size() && text_[pos_] != '\'') bump();
        if (pos_ >= text_.size()) fail("unterminated subscript string");
        std::string key = text_.substr(seg, pos_ - seg);
        bump();
        if (pos_ >= text_.size() || text_[pos_] != ']') fail("expected ']' after subscript");
        bump();
        path += "['" + key + "']";
      } else {
        break;
      }
    }
    current_.kind = Tok::Ident;
    current_.text = path;
  }

  char peek_char() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  void bump() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void set(Tok kind, const char* text) {
    current_.kind = kind;
    current_.text = text;
  }

  const std::string& text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
  Token current_;
};

// The grammar is parsed with a dual-typed result: a parenthesized item can
// turn out to be either an expression or a formula, and `next` adapts to
// whichever operand it received.
using Item = std::variant<ExprPtr, FormulaPtr>;

class Parser {
 public:
  explicit Parser(const std::string& text) : lex_(text) {}

  FormulaPtr parse_formula_all() {
    Item it = parse_iff();
    expect_end();
    return require_formula(it, "top level");
  }

  ExprPtr parse_expr_all() {
    Item it = parse_additive();
    expect_end();
    return require_expr(it, "top level");
  }

 private:
  [[noreturn]] void fail(const std::string& msg, std::vector<std::string> expected = {}) {
    const Token& t = lex_.peek();
    throw ParseError(msg + " near '" + t.text + "' at line " + std::to_string(t.line) +
                         ", column " + std::to_string(t.column),
                     t.line, t.column, std::move(expected));
  }

  void expect_end() {
    if (lex_.peek().kind != Tok::End) fail("unexpected trailing input", {"<end>"});
  }

  bool at_keyword(const char* kw) {
    return lex_.peek().kind == Tok::Keyword && lex_.peek().text == kw;
  }

  bool eat_keyword(const char* kw) {
    if (at_keyword(kw)) {
      lex_.take();
      return true;
    }
    return false;
  }

  void expect(Tok kind, const char* what) {
    if (lex_.peek().kind != kind) fail(std::string("expected ") + what, {what});
    lex_.take();
  }

  FormulaPtr require_formula(Item& it, const char* where) {
    if (auto* f = std::get_if<FormulaPtr>(&it)) return *f;
    fail(std::string("expected a formula at ") + where +
         " (found an arithmetic expression; add a comparison)");
  }

  ExprPtr require_expr(Item& it, const char* where) {
    if (auto* e = std::get_if<ExprPtr>(&it)) return *e;
    fail(std::string("expected an expression at ") + where + " (found a formula)");
  }

  Item parse_iff() {
    Item lhs = parse_implies();
    while (at_keyword("iff")) {
      lex_.take();
      FormulaPtr l = require_formula(lhs, "'iff' left operand");
      Item rhs = parse_implies();
      lhs = f_iff(l, require_formula(rhs, "'iff' right operand"));
    }
    return lhs;
  }

  Item parse_implies() {
    Item lhs = parse_or();
    if (at_keyword("implies")) {
      lex_.take();
      FormulaPtr l = require_formula(lhs, "'implies' left operand");
      Item rhs = parse_implies();  // right associative
      return Item{f_implies(l, require_formula(rhs, "'implies' right operand"))};
    }
    return lhs;
  }

  Item parse_or() {
    Item lhs = parse_and();
    while (at_keyword("or")) {
      lex_.take();
      FormulaPtr l = require_formula(lhs, "'or' left operand");
      Item rhs = parse_and();
      lhs = f_or(l, require_formula(rhs, "'or' right operand"));
    }
    return lhs;
  }

  Item parse_and() {
    Item lhs = parse_until();
    while (at_keyword("and")) {
      lex_.take();
      FormulaPtr l = require_formula(lhs, "'and' left operand");
      Item rhs = parse_until();
      lhs = f_and(l, require_formula(rhs, "'and' right operand"));
    }
    return lhs;
  }

  Item parse_until() {
    Item lhs = parse_comparand();
    if (at_keyword("until")) {
      lex_.take();
      FormulaPtr l = require_formula(lhs, "'until' left operand");
      Item rhs = parse_until();  // right associative
      return Item{f_until(l, require_formula(rhs, "'until' right operand"))};
    }
    return lhs;
  }

  std::optional<CmpOp> peek_cmp() {
    switch (lex_.peek().kind) {
      case Tok::Le: return CmpOp::Le;
      case Tok::Lt: return CmpOp::Lt;
      case Tok::Ge: return CmpOp::Ge;
      case Tok::Gt: return CmpOp::Gt;
      case Tok::EqEq: return CmpOp::Eq;
      case Tok::Ne: return CmpOp::Ne;
      default: return std::nullopt;
    }
  }

  Item parse_comparand() {
    Item lhs = parse_additive();
    if (auto op = peek_cmp()) {
      lex_.take();
      ExprPtr l = require_expr(lhs, "comparison left operand");
      Item rhs = parse_additive();
      return Item{f_atom(*op, l, require_expr(rhs, "comparison right operand"))};
    }
    return lhs;
  }

  Item parse_additive() {
    Item lhs = parse_multiplicative();
    while (lex_.peek().kind == Tok::Plus || lex_.peek().kind == Tok::Minus) {
      BinOp op = lex_.take().kind == Tok::Plus ? BinOp::Add : BinOp::Sub;
      ExprPtr l = require_expr(lhs, "arithmetic left operand");
      Item rhs = parse_multiplicative();
      lhs = e_bin(op, l, require_expr(rhs, "arithmetic right operand"));
    }
    return lhs;
  }

  Item parse_multiplicative() {
    Item lhs = parse_unary();
    while (lex_.peek().kind == Tok::Star || lex_.peek().kind == Tok::Slash) {
      BinOp op = lex_.take().kind == Tok::Star ? BinOp::Mul : BinOp::Div;
      ExprPtr l = require_expr(lhs, "arithmetic left operand");
      Item rhs = parse_unary();
      lhs = e_bin(op, l, require_expr(rhs, "arithmetic right operand"));
    }
    return lhs;
  }

  Item parse_unary() {
    if (lex_.peek().kind == Tok::Minus) {
      lex_.take();
      Item arg = parse_unary();
      return Item{e_neg(require_expr(arg, "unary minus operand"))};
    }
    if (eat_keyword("not")) {
      Item arg = parse_unary();
      return Item{f_not(require_formula(arg, "'not' operand"))};
    }
    if (eat_keyword("always")) {
      Item arg = parse_unary();
      return Item{f_always(require_formula(arg, "'always' operand"))};
    }
    if (eat_keyword("eventually")) {
      Item arg = parse_unary();
      return Item{f_eventually(require_formula(arg, "'eventually' operand"))};
    }
    if (eat_keyword("next")) {
      // Value-level when applied to an expression, temporal otherwise.
      Item arg = parse_unary();
      if (auto* e = std::get_if<ExprPtr>(&arg)) return Item{e_next(*e)};
      return Item{f_next(std::get<FormulaPtr>(arg))};
    }
    return parse_primary();
  }

  Item parse_primary() {
    const Token& t = lex_.peek();
    switch (t.kind) {
      case Tok::Number: {
        Token tok = lex_.take();
        return Item{e_const(tok.number)};
      }
      case Tok::Ident: {
        Token tok = lex_.take();
        return Item{e_var(tok.text)};
      }
      case Tok::Keyword: {
        if (t.text == "true") { lex_.take(); return Item{f_bool(true)}; }
        if (t.text == "false") { lex_.take(); return Item{f_bool(false)}; }
        if (t.text == "min" || t.text == "max") {
          FuncOp fn = t.text == "min" ? FuncOp::Min : FuncOp::Max;
          lex_.take();
          expect(Tok::LParen, "(");
          Item a = parse_additive_item();
          expect(Tok::Comma, ",");
          Item b = parse_additive_item();
          expect(Tok::RParen, ")");
          return Item{e_call(fn, {require_expr(a, "function argument"),
                                  require_expr(b, "function argument")})};
        }
        if (t.text == "floor" || t.text == "ceil" || t.text == "abs") {
          FuncOp fn = t.text == "floor" ? FuncOp::Floor
                      : t.text == "ceil" ? FuncOp::Ceil
                                         : FuncOp::Abs;
          lex_.take();
          expect(Tok::LParen, "(");
          Item a = parse_additive_item();
          expect(Tok::RParen, ")");
          return Item{e_call(fn, {require_expr(a, "function argument")})};
        }
        fail("unexpected keyword '" + t.text + "'",
             {"true", "false", "min", "max", "floor", "ceil", "abs"});
      }
      case Tok::LParen: {
        lex_.take();
        Item inner = parse_iff();
        expect(Tok::RParen, ")");
        return inner;
      }
      default:
        fail("expected a formula or expression",
             {"number", "identifier", "(", "true", "false", "not", "always",
              "eventually", "next", "min", "max", "floor", "ceil", "abs"});
    }
  }

  Item parse_additive_item() { return parse_additive(); }

  Lexer lex_;
};

}  // namespace

FormulaPtr parse_formula(const std::string& text) {
  return Parser(text).parse_formula_all();
}

ExprPtr parse_expr(const std::string& text) {
  return Parser(text).parse_expr_all();
}

}  // namespace cpv
