#include "x86/frontend.hpp"

#include <cctype>
#include <optional>
#include <sstream>
#include <vector>

namespace x86 {

namespace {

using mu::ExprPtr;

struct Operand {
  enum class Kind { Imm, Reg, Mem, Label };

  Kind kind = Kind::Label;
  int64_t imm = 0;    // Imm, or Mem displacement
  std::string reg;    // Reg, or Mem base when has_base
  std::string index;  // Mem index register
  int64_t scale = 1;  // Mem scale
  std::string symbol; // Mem symbol part, or Label name
  bool has_base = false;
};

struct AsmLine {
  size_t line = 0;
  std::string mnemonic;
  std::vector<Operand> ops;
  bool indirect_jump = false; // jmp *%reg
};

bool label_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' ||
         c == '$';
}

std::string trim(const std::string &s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos)
    return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

int64_t parse_int(const std::string &s, size_t line) {
  try {
    size_t pos = 0;
    int64_t v;
    bool neg = !s.empty() && s[0] == '-';
    std::string digits = neg ? s.substr(1) : s;
    if (digits.rfind("0x", 0) == 0) {
      v = static_cast<int64_t>(std::stoull(digits.substr(2), &pos, 16));
      pos += 2;
    } else {
      v = static_cast<int64_t>(std::stoull(digits, &pos, 10));
    }
    if (pos != digits.size())
      throw TranslateError(line, "bad number '" + s + "'");
    return neg ? -v : v;
  } catch (const TranslateError &) {
    throw;
  } catch (...) {
    throw TranslateError(line, "bad number '" + s + "'");
  }
}

// displacement/symbol, optionally followed by (%base[,%index[,scale]])
Operand parse_mem(const std::string &text, size_t line) {
  Operand op;
  op.kind = Operand::Kind::Mem;
  std::string head = text;
  std::string inner;
  size_t paren = text.find('(');
  if (paren != std::string::npos) {
    if (text.back() != ')')
      throw TranslateError(line, "unbalanced memory operand '" + text + "'");
    head = trim(text.substr(0, paren));
    inner = text.substr(paren + 1, text.size() - paren - 2);
  }
  if (!head.empty()) {
    if (std::isdigit(static_cast<unsigned char>(head[0])) || head[0] == '-') {
      op.imm = parse_int(head, line);
    } else {
      size_t plus = head.find('+');
      if (plus != std::string::npos) {
        op.symbol = trim(head.substr(0, plus));
        op.imm = parse_int(trim(head.substr(plus + 1)), line);
      } else {
        op.symbol = head;
      }
    }
  }
  if (paren != std::string::npos) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : inner) {
      if (c == ',') {
        parts.push_back(trim(cur));
        cur.clear();
      } else {
        cur += c;
      }
    }
    parts.push_back(trim(cur));
    if (parts.size() > 3)
      throw TranslateError(line, "bad memory operand '" + text + "'");
    if (!parts[0].empty()) {
      if (parts[0][0] != '%')
        throw TranslateError(line, "expected base register in '" + text + "'");
      op.reg = parts[0].substr(1);
      op.has_base = true;
    }
    if (parts.size() >= 2 && !parts[1].empty()) {
      if (parts[1][0] != '%')
        throw TranslateError(line,
                             "expected index register in '" + text + "'");
      op.index = parts[1].substr(1);
    }
    if (parts.size() == 3 && !parts[2].empty()) {
      op.scale = parse_int(parts[2], line);
      if (op.scale != 1 && op.scale != 2 && op.scale != 4 && op.scale != 8)
        throw TranslateError(line, "bad scale in '" + text + "'");
    }
  }
  return op;
}

Operand parse_operand(const std::string &text, size_t line) {
  if (text.empty())
    throw TranslateError(line, "empty operand");
  if (text[0] == '$') {
    Operand op;
    op.kind = Operand::Kind::Imm;
    std::string v = text.substr(1);
    if (!v.empty() &&
        (std::isdigit(static_cast<unsigned char>(v[0])) || v[0] == '-')) {
      op.imm = parse_int(v, line);
    } else {
      op.symbol = v; // $sym: the symbol's address as an immediate
    }
    return op;
  }
  if (text[0] == '%') {
    Operand op;
    op.kind = Operand::Kind::Reg;
    op.reg = text.substr(1);
    return op;
  }
  if (text.find('(') != std::string::npos ||
      std::isdigit(static_cast<unsigned char>(text[0])) || text[0] == '-')
    return parse_mem(text, line);
  // Bare name: a code label for jumps, a direct memory reference for data
  // instructions; the consumer decides.
  Operand op;
  op.kind = Operand::Kind::Label;
  op.symbol = text;
  return op;
}

std::vector<std::string> split_operands(const std::string &s) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (char c : s) {
    if (c == '(')
      depth++;
    if (c == ')')
      depth--;
    if (c == ',' && depth == 0) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  std::string last = trim(cur);
  if (!last.empty())
    out.push_back(last);
  return out;
}

Operand as_mem(const Operand &op) {
  if (op.kind != Operand::Kind::Label)
    return op;
  Operand m;
  m.kind = Operand::Kind::Mem;
  m.symbol = op.symbol;
  return m;
}

struct Lowerer {
  const Options &opts;
  mu::Program prog;
  std::vector<std::pair<size_t, std::string>> patches; // position -> label
  std::vector<size_t> ret_sites; // positions of ret, patched to one past end
  bool has_indirect_jump = false;
  std::optional<std::pair<ExprPtr, ExprPtr>> last_cmp; // (src, dst)
  unsigned next_tmp = 0;
  unsigned next_cc = 0;
  size_t line = 0;

  explicit Lowerer(const Options &o) : opts(o) {}

  [[noreturn]] void fail(const std::string &msg) const {
    throw TranslateError(line, msg);
  }

  uint64_t symbol_addr(const std::string &name) const {
    auto it = opts.symbols.find(name);
    if (it == opts.symbols.end())
      throw TranslateError(line, "unplaced symbol '" + name + "'");
    return it->second;
  }

  ExprPtr address_of(const Operand &op) const {
    ExprPtr e;
    auto add = [&](ExprPtr t) {
      e = e ? mu::Expr::make_bin(mu::BinOp::Add, e, std::move(t))
            : std::move(t);
    };
    if (!op.symbol.empty())
      add(mu::Expr::make_num(symbol_addr(op.symbol) +
                             static_cast<uint64_t>(op.imm)));
    else if (op.imm != 0 || (!op.has_base && op.index.empty()))
      add(mu::Expr::make_num(static_cast<uint64_t>(op.imm)));
    if (op.has_base)
      add(mu::Expr::make_reg(op.reg));
    if (!op.index.empty()) {
      ExprPtr idx = mu::Expr::make_reg(op.index);
      if (op.scale != 1)
        idx = mu::Expr::make_bin(
            mu::BinOp::Mul, std::move(idx),
            mu::Expr::make_num(static_cast<uint64_t>(op.scale)));
      add(std::move(idx));
    }
    return e;
  }

  std::string fresh_tmp() { return "tmp" + std::to_string(next_tmp++); }
  std::string fresh_cc() { return "cc" + std::to_string(next_cc++); }

  // The operand as an expression, emitting a load first when it lives in
  // memory.
  ExprPtr value_of(const Operand &op) {
    switch (op.kind) {
    case Operand::Kind::Imm:
      if (!op.symbol.empty())
        return mu::Expr::make_num(symbol_addr(op.symbol));
      return mu::Expr::make_num(static_cast<uint64_t>(op.imm));
    case Operand::Kind::Reg:
      return mu::Expr::make_reg(op.reg);
    case Operand::Kind::Mem:
    case Operand::Kind::Label: {
      std::string t = fresh_tmp();
      prog.push_back(mu::Instr::load(t, address_of(as_mem(op))));
      return mu::Expr::make_reg(t);
    }
    }
    fail("bad operand");
  }

  void store_to(const Operand &dst, ExprPtr value) {
    if (dst.kind == Operand::Kind::Reg) {
      prog.push_back(mu::Instr::assign(dst.reg, std::move(value)));
      return;
    }
    if (dst.kind == Operand::Kind::Mem || dst.kind == Operand::Kind::Label) {
      std::string r;
      if (value->kind == mu::Expr::Kind::Reg) {
        r = value->reg;
      } else {
        r = fresh_tmp();
        prog.push_back(mu::Instr::assign(r, std::move(value)));
      }
      prog.push_back(mu::Instr::store(r, address_of(as_mem(dst))));
      return;
    }
    fail("bad destination operand");
  }

  // Fresh register holding the NEGATED condition, so that value 0 means the
  // condition holds (the shape beqz and conditional assignment consume).
  std::string materialize_cc(const std::string &cc) {
    if (!last_cmp)
      fail("condition '" + cc + "' with no preceding cmp");
    auto [src, dst] = *last_cmp;
    ExprPtr neg;
    if (cc == "be") // taken iff dst <= src
      neg = mu::Expr::make_bin(mu::BinOp::Lt, src, dst);
    else if (cc == "ae") // dst >= src
      neg = mu::Expr::make_bin(mu::BinOp::Lt, dst, src);
    else if (cc == "b") // dst < src
      neg = mu::Expr::make_bin(mu::BinOp::Le, src, dst);
    else if (cc == "a") // dst > src
      neg = mu::Expr::make_bin(mu::BinOp::Le, dst, src);
    else if (cc == "e") // dst == src
      neg = mu::Expr::make_bin(mu::BinOp::Ne, dst, src);
    else if (cc == "ne") // dst != src
      neg = mu::Expr::make_bin(mu::BinOp::Eq, dst, src);
    else
      fail("unsupported condition '" + cc + "'");
    std::string r = fresh_cc();
    prog.push_back(mu::Instr::assign(r, std::move(neg)));
    return r;
  }

  void lower(const AsmLine &l) {
    line = l.line;
    const std::string &m = l.mnemonic;
    auto binop = [&](mu::BinOp op) {
      if (l.ops.size() != 2)
        fail(m + " needs two operands");
      ExprPtr src = value_of(l.ops[0]);
      const Operand &dst = l.ops[1];
      if (dst.kind == Operand::Kind::Reg) {
        prog.push_back(mu::Instr::assign(
            dst.reg,
            mu::Expr::make_bin(op, mu::Expr::make_reg(dst.reg), src)));
        return;
      }
      ExprPtr old = value_of(dst); // read-modify-write on memory
      store_to(dst, mu::Expr::make_bin(op, old, src));
    };

    if (m == "mov" || m == "movq" || m == "movl") {
      if (l.ops.size() != 2)
        fail("mov needs two operands");
      bool src_mem = l.ops[0].kind == Operand::Kind::Mem ||
                     l.ops[0].kind == Operand::Kind::Label;
      bool dst_mem = l.ops[1].kind == Operand::Kind::Mem ||
                     l.ops[1].kind == Operand::Kind::Label;
      if (src_mem && dst_mem)
        fail("mov cannot have two memory operands");
      if (src_mem && l.ops[1].kind == Operand::Kind::Reg) {
        prog.push_back(
            mu::Instr::load(l.ops[1].reg, address_of(as_mem(l.ops[0]))));
        return;
      }
      store_to(l.ops[1], value_of(l.ops[0]));
      return;
    }
    if (m == "add" || m == "addq" || m == "addl")
      return binop(mu::BinOp::Add);
    if (m == "sub" || m == "subq" || m == "subl")
      return binop(mu::BinOp::Sub);
    if (m == "and" || m == "andq" || m == "andl")
      return binop(mu::BinOp::And);
    if (m == "or" || m == "orq" || m == "orl")
      return binop(mu::BinOp::Or);
    if (m == "xor" || m == "xorq" || m == "xorl")
      return binop(mu::BinOp::Xor);
    if (m == "shl" || m == "shlq" || m == "shll")
      return binop(mu::BinOp::Shl);
    if (m == "shr" || m == "shrq" || m == "shrl")
      return binop(mu::BinOp::Shr);
    if (m == "lea" || m == "leaq") {
      if (l.ops.size() != 2 || l.ops[1].kind != Operand::Kind::Reg)
        fail("lea needs a memory source and register destination");
      prog.push_back(
          mu::Instr::assign(l.ops[1].reg, address_of(as_mem(l.ops[0]))));
      return;
    }
    if (m == "cmp" || m == "cmpq" || m == "cmpl") {
      if (l.ops.size() != 2)
        fail("cmp needs two operands");
      ExprPtr src = value_of(l.ops[0]);
      ExprPtr dst = value_of(l.ops[1]);
      last_cmp = {src, dst};
      return;
    }
    if (m == "jmp") {
      if (l.indirect_jump) {
        if (l.ops.size() != 1 || l.ops[0].kind != Operand::Kind::Reg)
          fail("indirect jmp needs a register");
        has_indirect_jump = true;
        prog.push_back(mu::Instr::jmp(mu::Expr::make_reg(l.ops[0].reg)));
        return;
      }
      if (l.ops.size() != 1 || l.ops[0].kind != Operand::Kind::Label)
        fail("jmp needs a label");
      patches.emplace_back(prog.size(), l.ops[0].symbol);
      prog.push_back(mu::Instr::jmp(mu::Expr::make_num(0)));
      return;
    }
    if (m.rfind("cmov", 0) == 0) {
      if (l.ops.size() != 2 || l.ops[1].kind != Operand::Kind::Reg)
        fail("cmov needs a source and a register destination");
      ExprPtr src = value_of(l.ops[0]);
      std::string cc = materialize_cc(m.substr(4));
      prog.push_back(mu::Instr::cond_assign(
          l.ops[1].reg, mu::Expr::make_reg(cc), std::move(src)));
      return;
    }
    if (m.size() > 1 && m[0] == 'j') {
      if (l.ops.size() != 1 || l.ops[0].kind != Operand::Kind::Label)
        fail(m + " needs a label");
      std::string cc = materialize_cc(m.substr(1));
      patches.emplace_back(prog.size(), l.ops[0].symbol);
      prog.push_back(mu::Instr::beqz(cc, mu::Value::of(0, mu::Width{})));
      return;
    }
    if (m == "lfence") {
      prog.push_back(mu::Instr::spbarr());
      return;
    }
    if (m == "ret" || m == "retq") {
      // Leaving the function means leaving the program.
      if (!l.ops.empty())
        fail("ret takes no operands");
      ret_sites.push_back(prog.size());
      prog.push_back(mu::Instr::jmp(mu::Expr::make_num(0)));
      return;
    }
    if (m == "nop") {
      prog.push_back(mu::Instr::skip());
      return;
    }
    if (opts.permissive) {
      prog.push_back(mu::Instr::skip());
      return;
    }
    fail("unsupported mnemonic '" + m + "'");
  }
};

} // namespace

LowerOut translate(const std::string &att_source, const Options &opts) {
  // Pass 1: split lines into labels and instructions. labels_at[i] holds the
  // labels that precede instruction i; the final slot holds trailing labels.
  std::vector<AsmLine> instrs;
  std::vector<std::vector<std::string>> labels_at(1);

  std::istringstream in(att_source);
  std::string raw;
  size_t lineno = 0;
  while (std::getline(in, raw)) {
    lineno++;
    size_t hash = raw.find('#');
    if (hash != std::string::npos)
      raw = raw.substr(0, hash);
    std::string s = trim(raw);
    while (true) {
      size_t i = 0;
      while (i < s.size() && label_char(s[i]))
        i++;
      if (i > 0 && i < s.size() && s[i] == ':') {
        labels_at.back().push_back(s.substr(0, i));
        s = trim(s.substr(i + 1));
        continue;
      }
      break;
    }
    if (s.empty())
      continue;
    if (s[0] == '.')
      continue; // assembler directive
    AsmLine al;
    al.line = lineno;
    size_t sp = s.find_first_of(" \t");
    al.mnemonic = s.substr(0, sp);
    std::string rest = sp == std::string::npos ? "" : trim(s.substr(sp + 1));
    if (al.mnemonic == "jmp" && !rest.empty() && rest[0] == '*') {
      al.indirect_jump = true;
      rest = trim(rest.substr(1));
    }
    for (const auto &o : split_operands(rest))
      al.ops.push_back(parse_operand(o, lineno));
    instrs.push_back(std::move(al));
    labels_at.emplace_back();
  }

  // Pass 2: lower, remembering where each source instruction begins so code
  // labels resolve to core positions. Trailing labels point one past the end.
  Lowerer lw(opts);
  std::map<std::string, uint64_t> label_pos;
  for (size_t i = 0; i < instrs.size(); ++i) {
    for (const auto &name : labels_at[i])
      if (!label_pos.emplace(name, lw.prog.size()).second)
        throw TranslateError(instrs[i].line, "duplicate label '" + name + "'");
    lw.lower(instrs[i]);
  }
  for (const auto &name : labels_at[instrs.size()])
    if (!label_pos.emplace(name, lw.prog.size()).second)
      throw TranslateError(lineno, "duplicate label '" + name + "'");

  mu::Width w64{64};
  for (const auto &[idx, name] : lw.patches) {
    auto it = label_pos.find(name);
    if (it == label_pos.end())
      throw TranslateError(0, "undefined label '" + name + "'");
    if (lw.prog[idx].kind == mu::Instr::Kind::Jmp) {
      lw.prog[idx] = mu::Instr::jmp(mu::Expr::make_num(it->second));
    } else {
      // A trailing label names the program end, which branches express with
      // the end marker rather than a one-past-the-end position.
      mu::Value tgt = it->second >= lw.prog.size()
                          ? mu::Value::end()
                          : mu::Value::of(it->second, w64);
      lw.prog[idx] = mu::Instr::beqz(lw.prog[idx].reg, tgt);
    }
  }
  for (size_t idx : lw.ret_sites)
    lw.prog[idx] = mu::Instr::jmp(mu::Expr::make_num(lw.prog.size()));

  // A conditional branch to its own fall-through is not expressible in the
  // core language; give such a branch a skip to fall through to instead.
  // Inserting at q shifts every position >= q, including the offending
  // branch's own target, which separates target and fall-through for good.
  while (true) {
    size_t violating = lw.prog.size();
    for (size_t i = 0; i < lw.prog.size(); ++i)
      if (lw.prog[i].kind == mu::Instr::Kind::Beqz &&
          !lw.prog[i].target.is_end() && lw.prog[i].target.bits() == i + 1) {
        violating = i;
        break;
      }
    if (violating == lw.prog.size())
      break;
    if (lw.has_indirect_jump)
      throw TranslateError(
          0, "cannot pad a branch-to-next in code with indirect jumps");
    uint64_t q = violating + 1;
    lw.prog.insert(lw.prog.begin() + static_cast<std::ptrdiff_t>(q),
                   mu::Instr::skip());
    for (auto &ins : lw.prog) {
      if (ins.kind == mu::Instr::Kind::Beqz && !ins.target.is_end() &&
          ins.target.bits() >= q)
        ins = mu::Instr::beqz(ins.reg,
                              mu::Value::of(ins.target.bits() + 1, w64));
      if (ins.kind == mu::Instr::Kind::Jmp &&
          ins.e->kind == mu::Expr::Kind::Num && ins.e->num >= q)
        ins = mu::Instr::jmp(mu::Expr::make_num(ins.e->num + 1));
    }
    for (auto &[name, pos] : label_pos)
      if (pos >= q)
        pos++;
  }

  LowerOut out;
  out.prog = std::move(lw.prog);
  out.label_pos = std::move(label_pos);
  return out;
}

std::map<std::string, uint64_t> parse_symbols(const std::string &text) {
  std::map<std::string, uint64_t> out;
  std::istringstream in(text);
  std::string raw;
  size_t lineno = 0;
  while (std::getline(in, raw)) {
    lineno++;
    size_t hash = raw.find('#');
    if (hash != std::string::npos)
      raw = raw.substr(0, hash);
    std::string s = trim(raw);
    if (s.empty())
      continue;
    size_t eq = s.find('=');
    if (eq == std::string::npos)
      throw TranslateError(lineno, "expected 'name = address'");
    std::string name = trim(s.substr(0, eq));
    std::string val = trim(s.substr(eq + 1));
    if (name.empty())
      throw TranslateError(lineno, "expected 'name = address'");
    out[name] = static_cast<uint64_t>(parse_int(val, lineno));
  }
  return out;
}

} // namespace x86
