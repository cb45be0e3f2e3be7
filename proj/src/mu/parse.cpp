#include "mu/parse.hpp"

#include <cctype>
#include <optional>
#include <sstream>
#include <vector>

namespace mu {

namespace {

bool is_keyword(const std::string &s) {
  return s == "skip" || s == "spbarr" || s == "load" || s == "store" ||
         s == "jmp" || s == "beqz" || s == "end" || s == "pc" || s == "low" ||
         s == "reg" || s == "mem";
}

struct Token {
  enum class Kind { Ident, Number, Op, End };
  Kind kind = Kind::End;
  std::string text;
  uint64_t num = 0;
};

class Lexer {
public:
  Lexer(const std::string &s, size_t line) : s_(s), line_(line) { advance(); }

  const Token &peek() const { return tok_; }

  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

  bool take_op(const char *op) {
    if (tok_.kind == Token::Kind::Op && tok_.text == op) {
      advance();
      return true;
    }
    return false;
  }

  void expect_op(const char *op) {
    if (!take_op(op))
      fail(std::string("expected '") + op + "'");
  }

  [[noreturn]] void fail(const std::string &msg) const {
    throw ParseError(line_, msg + " (at '" +
                                (tok_.kind == Token::Kind::End ? "end of line"
                                                               : tok_.text) +
                                "')");
  }

  bool done() const { return tok_.kind == Token::Kind::End; }

private:
  void advance() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t'))
      ++pos_;
    if (pos_ >= s_.size() || s_[pos_] == '#') {
      tok_ = Token{};
      return;
    }
    char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t start = pos_;
      int base = 10;
      if (c == '0' && pos_ + 1 < s_.size() &&
          (s_[pos_ + 1] == 'x' || s_[pos_ + 1] == 'X')) {
        base = 16;
        pos_ += 2;
        start = pos_;
        if (pos_ >= s_.size() || !std::isxdigit(static_cast<unsigned char>(s_[pos_])))
          throw ParseError(line_, "bad hex literal");
      }
      while (pos_ < s_.size() &&
             (base == 16 ? std::isxdigit(static_cast<unsigned char>(s_[pos_]))
                         : std::isdigit(static_cast<unsigned char>(s_[pos_]))))
        ++pos_;
      tok_.kind = Token::Kind::Number;
      tok_.text = s_.substr(start, pos_ - start);
      tok_.num = std::stoull(tok_.text, nullptr, base);
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) ||
                                  s_[pos_] == '_'))
        ++pos_;
      tok_.kind = Token::Kind::Ident;
      tok_.text = s_.substr(start, pos_ - start);
      return;
    }
    auto two = [&](const char *op) {
      tok_.kind = Token::Kind::Op;
      tok_.text = op;
      pos_ += 2;
    };
    auto one = [&](char op) {
      tok_.kind = Token::Kind::Op;
      tok_.text = std::string(1, op);
      pos_ += 1;
    };
    switch (c) {
    case '<':
      if (pos_ + 1 < s_.size() && s_[pos_ + 1] == '-')
        two("<-");
      else if (pos_ + 1 < s_.size() && s_[pos_ + 1] == '<')
        two("<<");
      else if (pos_ + 1 < s_.size() && s_[pos_ + 1] == '=')
        two("<=");
      else
        one('<');
      return;
    case '>':
      if (pos_ + 1 < s_.size() && s_[pos_ + 1] == '>') {
        two(">>");
        return;
      }
      throw ParseError(line_, "unexpected '>'");
    case '!':
      if (pos_ + 1 < s_.size() && s_[pos_ + 1] == '=') {
        two("!=");
        return;
      }
      throw ParseError(line_, "unexpected '!'");
    case '+':
    case '-':
    case '*':
    case '&':
    case '|':
    case '^':
    case '~':
    case '=':
    case '?':
    case ',':
    case ':':
    case '(':
    case ')':
      one(c);
      return;
    default:
      throw ParseError(line_, std::string("unexpected character '") + c + "'");
    }
  }

  const std::string &s_;
  size_t line_;
  size_t pos_ = 0;
  Token tok_;
};

// Precedence, loosest first: comparisons; | ^; &; << >>; + -; *; unary.
ExprPtr parse_cmp(Lexer &lx);

ExprPtr parse_atom(Lexer &lx) {
  if (lx.peek().kind == Token::Kind::Number)
    return Expr::make_num(lx.take().num);
  if (lx.peek().kind == Token::Kind::Ident) {
    if (is_keyword(lx.peek().text))
      lx.fail("'" + lx.peek().text + "' cannot be used as a register");
    return Expr::make_reg(lx.take().text);
  }
  if (lx.take_op("(")) {
    ExprPtr e = parse_cmp(lx);
    lx.expect_op(")");
    return e;
  }
  lx.fail("expected expression");
}

ExprPtr parse_unary(Lexer &lx) {
  if (lx.take_op("-"))
    return Expr::make_un(UnOp::Neg, parse_unary(lx));
  if (lx.take_op("~"))
    return Expr::make_un(UnOp::Not, parse_unary(lx));
  return parse_atom(lx);
}

ExprPtr parse_mul(Lexer &lx) {
  ExprPtr e = parse_unary(lx);
  while (lx.take_op("*"))
    e = Expr::make_bin(BinOp::Mul, e, parse_unary(lx));
  return e;
}

ExprPtr parse_add(Lexer &lx) {
  ExprPtr e = parse_mul(lx);
  for (;;) {
    if (lx.take_op("+"))
      e = Expr::make_bin(BinOp::Add, e, parse_mul(lx));
    else if (lx.take_op("-"))
      e = Expr::make_bin(BinOp::Sub, e, parse_mul(lx));
    else
      return e;
  }
}

ExprPtr parse_shift(Lexer &lx) {
  ExprPtr e = parse_add(lx);
  for (;;) {
    if (lx.take_op("<<"))
      e = Expr::make_bin(BinOp::Shl, e, parse_add(lx));
    else if (lx.take_op(">>"))
      e = Expr::make_bin(BinOp::Shr, e, parse_add(lx));
    else
      return e;
  }
}

ExprPtr parse_and(Lexer &lx) {
  ExprPtr e = parse_shift(lx);
  while (lx.take_op("&"))
    e = Expr::make_bin(BinOp::And, e, parse_shift(lx));
  return e;
}

ExprPtr parse_or(Lexer &lx) {
  ExprPtr e = parse_and(lx);
  for (;;) {
    if (lx.take_op("|"))
      e = Expr::make_bin(BinOp::Or, e, parse_and(lx));
    else if (lx.take_op("^"))
      e = Expr::make_bin(BinOp::Xor, e, parse_and(lx));
    else
      return e;
  }
}

ExprPtr parse_cmp(Lexer &lx) {
  ExprPtr e = parse_or(lx);
  for (;;) {
    if (lx.take_op("<"))
      e = Expr::make_bin(BinOp::Lt, e, parse_or(lx));
    else if (lx.take_op("<="))
      e = Expr::make_bin(BinOp::Le, e, parse_or(lx));
    else if (lx.take_op("="))
      e = Expr::make_bin(BinOp::Eq, e, parse_or(lx));
    else if (lx.take_op("!="))
      e = Expr::make_bin(BinOp::Ne, e, parse_or(lx));
    else
      return e;
  }
}

std::string take_reg(Lexer &lx) {
  if (lx.peek().kind != Token::Kind::Ident)
    lx.fail("expected register name");
  if (is_keyword(lx.peek().text))
    lx.fail("'" + lx.peek().text + "' cannot be used as a register");
  return lx.take().text;
}

Value take_target(Lexer &lx) {
  if (lx.peek().kind == Token::Kind::Ident && lx.peek().text == "end") {
    lx.take();
    return Value::end();
  }
  if (lx.peek().kind != Token::Kind::Number)
    lx.fail("expected a decimal label or 'end'");
  return Value::of(lx.take().num, Width{64});
}

Instr parse_instr(Lexer &lx) {
  if (lx.peek().kind == Token::Kind::Ident) {
    const std::string &kw = lx.peek().text;
    if (kw == "skip") {
      lx.take();
      return Instr::skip();
    }
    if (kw == "spbarr") {
      lx.take();
      return Instr::spbarr();
    }
    if (kw == "load" || kw == "store") {
      bool is_load = kw == "load";
      lx.take();
      std::string r = take_reg(lx);
      lx.expect_op(",");
      ExprPtr addr = parse_cmp(lx);
      return is_load ? Instr::load(r, addr) : Instr::store(r, addr);
    }
    if (kw == "jmp") {
      lx.take();
      return Instr::jmp(parse_cmp(lx));
    }
    if (kw == "beqz") {
      lx.take();
      std::string r = take_reg(lx);
      lx.expect_op(",");
      return Instr::beqz(r, take_target(lx));
    }
  }
  std::string r = take_reg(lx);
  lx.expect_op("<-");
  ExprPtr first = parse_cmp(lx);
  if (lx.take_op("?")) {
    ExprPtr value = parse_cmp(lx);
    return Instr::cond_assign(r, first, value);
  }
  return Instr::assign(r, first);
}

bool blank_line(const std::string &s) {
  for (char c : s) {
    if (c == '#')
      return true;
    if (c != ' ' && c != '\t' && c != '\r')
      return false;
  }
  return true;
}

} // namespace

Program parse_program(const std::string &text) {
  Program prog;
  std::istringstream in(text);
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank_line(line))
      continue;
    Lexer lx(line, lineno);
    if (lx.peek().kind != Token::Kind::Number)
      lx.fail("expected instruction label");
    uint64_t label = lx.take().num;
    if (label != prog.size())
      throw ParseError(lineno, "expected label " + std::to_string(prog.size()) +
                                   ", got " + std::to_string(label));
    lx.expect_op(":");
    prog.push_back(parse_instr(lx));
    if (!lx.done())
      lx.fail("trailing input after instruction");
  }
  if (prog.empty())
    throw ParseError(lineno, "program has no instructions");
  return prog;
}

namespace {

int prec_of(const Expr &e) {
  if (e.kind == Expr::Kind::Num || e.kind == Expr::Kind::Reg)
    return 8;
  if (e.kind == Expr::Kind::Un)
    return 7;
  switch (e.bin) {
  case BinOp::Mul:
    return 6;
  case BinOp::Add:
  case BinOp::Sub:
    return 5;
  case BinOp::Shl:
  case BinOp::Shr:
    return 4;
  case BinOp::And:
    return 3;
  case BinOp::Or:
  case BinOp::Xor:
    return 2;
  default:
    return 1;
  }
}

void print_rec(const Expr &e, std::string &out, int min_prec) {
  int p = prec_of(e);
  bool parens = p < min_prec;
  if (parens)
    out += '(';
  switch (e.kind) {
  case Expr::Kind::Num:
    out += std::to_string(e.num);
    break;
  case Expr::Kind::Reg:
    out += e.reg;
    break;
  case Expr::Kind::Un:
    out += un_op_str(e.un);
    print_rec(*e.a, out, 7);
    break;
  case Expr::Kind::Bin:
    print_rec(*e.a, out, p);
    out += ' ';
    out += bin_op_str(e.bin);
    out += ' ';
    print_rec(*e.b, out, p + 1);
    break;
  }
  if (parens)
    out += ')';
}

} // namespace

std::string print_expr(const Expr &e) {
  std::string out;
  print_rec(e, out, 0);
  return out;
}

std::string print_program(const Program &p) {
  std::string out;
  for (size_t i = 0; i < p.size(); ++i) {
    out += std::to_string(i);
    out += ": ";
    const Instr &ins = p[i];
    switch (ins.kind) {
    case Instr::Kind::Skip:
      out += "skip";
      break;
    case Instr::Kind::Assign:
      out += ins.reg + " <- " + print_expr(*ins.e);
      break;
    case Instr::Kind::CondAssign:
      out += ins.reg + " <-" + print_expr(*ins.cond) + "? " + print_expr(*ins.e);
      break;
    case Instr::Kind::Load:
      out += "load " + ins.reg + ", " + print_expr(*ins.e);
      break;
    case Instr::Kind::Store:
      out += "store " + ins.reg + ", " + print_expr(*ins.e);
      break;
    case Instr::Kind::Jmp:
      out += "jmp " + print_expr(*ins.e);
      break;
    case Instr::Kind::Beqz:
      out += "beqz " + ins.reg + ", " + ins.target.str();
      break;
    case Instr::Kind::Spbarr:
      out += "spbarr";
      break;
    }
    out += '\n';
  }
  return out;
}

Policy parse_policy(const std::string &text) {
  Policy pol;
  std::istringstream in(text);
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank_line(line))
      continue;
    Lexer lx(line, lineno);
    if (lx.peek().kind != Token::Kind::Ident || lx.peek().text != "low")
      lx.fail("expected 'low'");
    lx.take();
    if (lx.peek().kind != Token::Kind::Ident)
      lx.fail("expected 'reg' or 'mem'");
    std::string what = lx.take().text;
    if (what == "reg") {
      pol.regs.insert(take_reg(lx));
    } else if (what == "mem") {
      if (lx.peek().kind != Token::Kind::Number)
        lx.fail("expected address");
      pol.mems.insert(lx.take().num);
    } else {
      lx.fail("expected 'reg' or 'mem'");
    }
    if (!lx.done())
      lx.fail("trailing input");
  }
  return pol;
}

} // namespace mu
