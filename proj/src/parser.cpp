#include "drlref/parser.hpp"

#include <cctype>
#include <optional>
#include <vector>

namespace drlref {

namespace {

enum class Tok {
  Ident, Int, Prime, Plus, Minus, Star, LParen, RParen, LBrace, RBrace,
  LBracket, RBracket, Lt, Gt, Le, Ge, Eq, EqEq, Assign, Not, And, Or,
  Imply, Equiv, Semi, Choice, Test, Comma, Forall, Exists, True, False,
  Turnstile, End
};

struct Token {
  Tok kind;
  std::string text;
  long long value = 0;
  int line = 1;
  int col = 1;
};

class Lexer {
 public:
  explicit Lexer(const std::string& s) : s_(s) { tokenize(); }
  const std::vector<Token>& tokens() const { return toks_; }

 private:
  void fail(const std::string& msg) { throw SyntaxError(msg, line_, col_); }

  char peek(size_t ahead = 0) const {
    return pos_ + ahead < s_.size() ? s_[pos_ + ahead] : '\0';
  }
  char advance() {
    char c = s_[pos_++];
    if (c == '\n') { ++line_; col_ = 1; } else { ++col_; }
    return c;
  }

  void push(Tok k, std::string text, int line, int col, long long v = 0) {
    toks_.push_back(Token{k, std::move(text), v, line, col});
  }

  void tokenize() {
    while (pos_ < s_.size()) {
      char c = peek();
      int line = line_, col = col_;
      if (std::isspace(static_cast<unsigned char>(c))) { advance(); continue; }
      if (c == '#') {  // comment to end of line
        while (pos_ < s_.size() && peek() != '\n') advance();
        continue;
      }
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::string id;
        while (pos_ < s_.size() &&
               (std::isalnum(static_cast<unsigned char>(peek())) ||
                peek() == '_'))
          id += advance();
        if (id == "true") push(Tok::True, id, line, col);
        else if (id == "false") push(Tok::False, id, line, col);
        else push(Tok::Ident, id, line, col);
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c))) {
        std::string num;
        while (pos_ < s_.size() &&
               std::isdigit(static_cast<unsigned char>(peek())))
          num += advance();
        push(Tok::Int, num, line, col, std::stoll(num));
        continue;
      }
      switch (c) {
        case '\'': advance(); push(Tok::Prime, "'", line, col); break;
        case '(': advance(); push(Tok::LParen, "(", line, col); break;
        case ')': advance(); push(Tok::RParen, ")", line, col); break;
        case '{': advance(); push(Tok::LBrace, "{", line, col); break;
        case '}': advance(); push(Tok::RBrace, "}", line, col); break;
        case '[': advance(); push(Tok::LBracket, "[", line, col); break;
        case ']': advance(); push(Tok::RBracket, "]", line, col); break;
        case '*': advance(); push(Tok::Star, "*", line, col); break;
        case ';': advance(); push(Tok::Semi, ";", line, col); break;
        case ',': advance(); push(Tok::Comma, ",", line, col); break;
        case '?': advance(); push(Tok::Test, "?", line, col); break;
        case '!': advance(); push(Tok::Not, "!", line, col); break;
        case '&': advance(); push(Tok::And, "&", line, col); break;
        case '=':
          advance();
          if (peek() == '=') { advance(); push(Tok::EqEq, "==", line, col); }
          else push(Tok::Eq, "=", line, col);
          break;
        case '|':
          advance();
          if (peek() == '-') { advance(); push(Tok::Turnstile, "|-", line, col); }
          else push(Tok::Or, "|", line, col);
          break;
        case '+':
          advance();
          if (peek() == '+') { advance(); push(Tok::Choice, "++", line, col); }
          else push(Tok::Plus, "+", line, col);
          break;
        case '-':
          advance();
          if (peek() == '>') { advance(); push(Tok::Imply, "->", line, col); }
          else push(Tok::Minus, "-", line, col);
          break;
        case ':':
          advance();
          if (peek() == '=') { advance(); push(Tok::Assign, ":=", line, col); }
          else fail("expected ':='");
          break;
        case '<':
          advance();
          if (peek() == '=') { advance(); push(Tok::Le, "<=", line, col); }
          else if (peek() == '-' && peek(1) == '>') {
            advance(); advance();
            push(Tok::Equiv, "<->", line, col);
          } else push(Tok::Lt, "<", line, col);
          break;
        case '>':
          advance();
          if (peek() == '=') { advance(); push(Tok::Ge, ">=", line, col); }
          else push(Tok::Gt, ">", line, col);
          break;
        case '\\': {
          advance();
          std::string word;
          while (pos_ < s_.size() &&
                 std::isalpha(static_cast<unsigned char>(peek())))
            word += advance();
          if (word == "forall") push(Tok::Forall, word, line, col);
          else if (word == "exists") push(Tok::Exists, word, line, col);
          else fail("unknown escape '\\" + word + "'");
          break;
        }
        default:
          fail(std::string("unexpected character '") + c + "'");
      }
    }
    push(Tok::End, "", line_, col_);
  }

  const std::string& s_;
  size_t pos_ = 0;
  int line_ = 1, col_ = 1;
  std::vector<Token> toks_;
};

class Parser {
 public:
  explicit Parser(const std::string& text) : lex_(text) {}

  TermPtr term_toplevel() {
    auto t = term(0);
    expect_end();
    return t;
  }
  FormulaPtr formula_toplevel() {
    auto f = formula(0);
    expect_end();
    return f;
  }
  ProgramPtr program_toplevel() {
    auto p = program(0);
    expect_end();
    return p;
  }

 private:
  const Token& cur() const { return lex_.tokens()[idx_]; }
  const Token& look(size_t n) const {
    size_t i = idx_ + n;
    const auto& ts = lex_.tokens();
    return i < ts.size() ? ts[i] : ts.back();
  }
  Token take() { return lex_.tokens()[idx_++]; }
  bool at(Tok k) const { return cur().kind == k; }
  bool eat(Tok k) {
    if (at(k)) { ++idx_; return true; }
    return false;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw SyntaxError(msg + " (got '" + cur().text + "')", cur().line,
                      cur().col);
  }
  void expect(Tok k, const char* what) {
    if (!eat(k)) fail(std::string("expected ") + what);
  }
  void expect_end() {
    if (!at(Tok::End)) fail("trailing input");
  }

  Variable variable() {
    if (!at(Tok::Ident)) fail("expected variable");
    Token t = take();
    if (!valid_variable_name(t.text))
      throw SyntaxError("invalid variable name '" + t.text + "'", t.line,
                        t.col);
    bool primed = eat(Tok::Prime);
    return Variable(t.text, primed);
  }

  // ---- terms -------------------------------------------------------------
  TermPtr term(int prec) {
    TermPtr t = term_atom();
    for (;;) {
      if (prec <= 1 && (at(Tok::Plus) || at(Tok::Minus))) {
        bool plus = take().kind == Tok::Plus;
        TermPtr r = term(2);
        t = plus ? Term::mk_plus(t, r) : Term::mk_minus(t, r);
      } else if (prec <= 2 && at(Tok::Star)) {
        take();
        TermPtr r = term(3);
        t = Term::mk_times(t, r);
      } else {
        break;
      }
    }
    return t;
  }

  TermPtr term(int prec, bool) = delete;

  TermPtr term_atom() {
    if (at(Tok::Int)) return Term::mk_int(take().value);
    if (at(Tok::Minus) && look(1).kind == Tok::Int) {
      take();
      return Term::mk_int(-take().value);
    }
    if (at(Tok::Ident)) return Term::mk_var(variable());
    if (at(Tok::LParen)) {
      take();
      TermPtr t = term(0);
      expect(Tok::RParen, "')'");
      if (eat(Tok::Prime)) return Term::mk_differential(t);
      return t;
    }
    fail("expected term");
  }

  // ---- formulas ----------------------------------------------------------
  FormulaPtr formula(int prec) {
    FormulaPtr f = formula_unary();
    for (;;) {
      if (prec <= 4 && at(Tok::And)) {
        take();
        f = Formula::mk_and(f, formula(5));
      } else if (prec <= 3 && at(Tok::Or)) {
        take();
        f = Formula::mk_or(f, formula(4));
      } else if (prec <= 2 && at(Tok::Imply)) {
        take();
        f = Formula::mk_imply(f, formula(2));
      } else if (prec <= 1 && at(Tok::Equiv)) {
        take();
        f = Formula::mk_equiv(f, formula(1));
      } else {
        break;
      }
    }
    return f;
  }

  FormulaPtr formula_unary() {
    if (eat(Tok::Not)) return Formula::mk_not(formula_unary());
    if (at(Tok::Forall) || at(Tok::Exists)) {
      bool forall = take().kind == Tok::Forall;
      Variable v = variable();
      FormulaPtr body = formula_unary();
      return forall ? Formula::mk_forall(v, body)
                    : Formula::mk_exists(v, body);
    }
    if (at(Tok::LBracket)) {
      take();
      ProgramPtr p = program(0);
      expect(Tok::RBracket, "']'");
      return Formula::mk_box(p, formula_unary());
    }
    if (at(Tok::Lt)) {
      take();
      ProgramPtr p = program(0);
      expect(Tok::Gt, "'>'");
      return Formula::mk_diamond(p, formula_unary());
    }
    return formula_atom();
  }

  FormulaPtr formula_atom() {
    if (eat(Tok::True)) return Formula::mk_true();
    if (eat(Tok::False)) return Formula::mk_false();
    if (at(Tok::LBrace)) {
      // {a} <= {b}  or  {a} == {b}
      take();
      ProgramPtr a = program(0);
      expect(Tok::RBrace, "'}'");
      bool refines;
      if (eat(Tok::Le)) refines = true;
      else if (eat(Tok::EqEq)) refines = false;
      else fail("expected '<=' or '==' after '{a}'");
      expect(Tok::LBrace, "'{'");
      ProgramPtr b = program(0);
      expect(Tok::RBrace, "'}'");
      return refines ? Formula::mk_refines(a, b) : Formula::mk_progeq(a, b);
    }
    // Either a comparison or a parenthesized formula: try the comparison
    // first and backtrack on failure.
    size_t save = idx_;
    try {
      TermPtr lhs = term(0);
      CmpOp op;
      if (eat(Tok::Le)) op = CmpOp::Le;
      else if (eat(Tok::Lt)) op = CmpOp::Lt;
      else if (eat(Tok::Eq)) op = CmpOp::Eq;
      else if (eat(Tok::Ge)) op = CmpOp::Ge;
      else if (eat(Tok::Gt)) op = CmpOp::Gt;
      else fail("expected comparison operator");
      TermPtr rhs = term(0);
      return Formula::mk_cmp(op, lhs, rhs);
    } catch (const SyntaxError&) {
      idx_ = save;
    }
    if (at(Tok::LParen)) {
      take();
      FormulaPtr f = formula(0);
      expect(Tok::RParen, "')'");
      return f;
    }
    fail("expected formula");
  }

  // ---- programs ----------------------------------------------------------
  ProgramPtr program(int prec) {
    ProgramPtr p = program_atom();
    for (;;) {
      if (prec <= 2 && at(Tok::Semi)) {
        take();
        p = Program::mk_seq(p, program(2));
      } else if (prec <= 1 && at(Tok::Choice)) {
        take();
        p = Program::mk_choice(p, program(1));
      } else {
        break;
      }
    }
    return p;
  }

  ProgramPtr program_atom() {
    if (eat(Tok::Test)) return Program::mk_test(formula_unary());
    if (at(Tok::Ident)) {
      Variable v = variable();
      expect(Tok::Assign, "':='");
      if (eat(Tok::Star)) return Program::mk_random(v);
      return Program::mk_assign(v, term(0));
    }
    if (at(Tok::LParen)) {
      take();
      ProgramPtr p = program(0);
      expect(Tok::RParen, "')'");
      return p;
    }
    if (at(Tok::LBrace)) {
      take();
      // ODE when the group starts with  ident' =  ; otherwise a braced
      // program group which must be followed by '*'.
      if (at(Tok::Ident) && look(1).kind == Tok::Prime &&
          look(2).kind == Tok::Eq) {
        std::vector<OdeEquation> eqs;
        for (;;) {
          Token name = take();
          if (!valid_variable_name(name.text))
            throw SyntaxError("invalid variable name '" + name.text + "'",
                              name.line, name.col);
          expect(Tok::Prime, "'''");
          expect(Tok::Eq, "'='");
          TermPtr rhs = term(0);
          eqs.push_back(OdeEquation{Variable(name.text, false), rhs});
          if (!eat(Tok::Comma)) break;
        }
        FormulaPtr domain = Formula::mk_true();
        if (eat(Tok::And)) domain = formula(0);
        Token brace = cur();
        expect(Tok::RBrace, "'}'");
        for (size_t i = 0; i < eqs.size(); ++i)
          for (size_t j = i + 1; j < eqs.size(); ++j)
            if (eqs[i].var == eqs[j].var)
              throw SyntaxError(
                  "duplicate differential equation for " + eqs[i].var.str(),
                  brace.line, brace.col);
        return Program::mk_ode(std::move(eqs), domain);
      }
      ProgramPtr p = program(0);
      expect(Tok::RBrace, "'}'");
      expect(Tok::Star, "'*' after braced program");
      return Program::mk_star(p);
    }
    fail("expected program");
  }

  Lexer lex_;
  size_t idx_ = 0;
};

}  // namespace

TermPtr parse_term(const std::string& text) {
  return Parser(text).term_toplevel();
}

FormulaPtr parse_formula(const std::string& text) {
  return Parser(text).formula_toplevel();
}

ProgramPtr parse_program(const std::string& text) {
  return Parser(text).program_toplevel();
}

Expression parse(const std::string& text, ExprKind category) {
  try {
    switch (category) {
      case ExprKind::Term: return Expression(parse_term(text));
      case ExprKind::Formula: return Expression(parse_formula(text));
      case ExprKind::Program: return Expression(parse_program(text));
    }
  } catch (const SyntaxError& e) {
    // Distinguish a plain syntax error from a category mismatch.
    for (ExprKind other : {ExprKind::Term, ExprKind::Formula,
                           ExprKind::Program}) {
      if (other == category) continue;
      try {
        switch (other) {
          case ExprKind::Term: parse_term(text); break;
          case ExprKind::Formula: parse_formula(text); break;
          case ExprKind::Program: parse_program(text); break;
        }
        throw KindError("input parses as a different syntax category");
      } catch (const SyntaxError&) {
      }
    }
    throw;
  }
  throw Error("unreachable");
}

}  // namespace drlref
