#include <cctype>
#include <charconv>
#include <sstream>

#include "fstaint/frontend/parser.hpp"

namespace fstaint::frontend {

namespace {

// ---------------------------------------------------------------------------
// Lexer (per line)

struct Tok {
  enum Kind { Word, Int, Str, Punct, End } kind = End;
  std::string text;
  int64_t ival = 0;
  uint32_t col = 0;
};

struct Cursor {
  std::string_view file;
  uint32_t line = 0;

  [[noreturn]] void fail(uint32_t col, const std::string& msg) const {
    std::ostringstream os;
    os << file << ":" << line << ":" << col << ": " << msg;
    throw ParseError(os.str());
  }
};

bool word_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_' ||
         c == '$' || c == '<';
}
bool word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
         c == '$' || c == '<' || c == '>';
}

std::vector<Tok> lex_line(const Cursor& cur, std::string_view s) {
  std::vector<Tok> out;
  size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    uint32_t col = static_cast<uint32_t>(i + 1);
    if (c == ' ' || c == '\t' || c == '\r') {
      ++i;
    } else if (c == ';' || c == '#') {
      break;  // comment to end of line
    } else if (c == '"') {
      std::string val;
      ++i;
      while (i < s.size() && s[i] != '"') {
        if (s[i] == '\\') {
          if (i + 1 >= s.size()) cur.fail(col, "unterminated escape");
          char e = s[++i];
          val += e == 'n' ? '\n' : e == 't' ? '\t' : e;
        } else {
          val += s[i];
        }
        ++i;
      }
      if (i >= s.size()) cur.fail(col, "unterminated string literal");
      ++i;
      out.push_back({Tok::Str, std::move(val), 0, col});
    } else if (std::isdigit(static_cast<unsigned char>(c)) ||
               (c == '-' && i + 1 < s.size() &&
                std::isdigit(static_cast<unsigned char>(s[i + 1])))) {
      size_t j = i + 1;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j])))
        ++j;
      int64_t v = 0;
      auto res = std::from_chars(s.data() + i, s.data() + j, v);
      if (res.ec != std::errc())
        cur.fail(col, "integer literal out of range");
      out.push_back({Tok::Int, std::string(s.substr(i, j - i)), v, col});
      i = j;
    } else if (word_start(c)) {
      size_t j = i + 1;
      while (j < s.size() && word_char(s[j])) ++j;
      out.push_back(
          {Tok::Word, std::string(s.substr(i, j - i)), 0, col});
      i = j;
    } else if (c == '.' || c == '[' || c == ']' || c == '(' || c == ')') {
      out.push_back({Tok::Punct, std::string(1, c), 0, col});
      ++i;
    } else {
      cur.fail(col, std::string("unexpected character '") + c + "'");
    }
  }
  out.push_back({Tok::End, "", 0, static_cast<uint32_t>(s.size() + 1)});
  return out;
}

// ---------------------------------------------------------------------------
// Parser

struct Parser {
  Program prog;
  Cursor cur;
  std::vector<Tok> toks;
  size_t pos = 0;

  const Tok& peek() const { return toks[pos]; }
  Tok next() { return toks[pos == toks.size() - 1 ? pos : pos++]; }
  [[noreturn]] void fail(const std::string& msg) {
    cur.fail(peek().col, msg + " (got '" +
                             (peek().kind == Tok::End ? "end of line"
                                                      : peek().text) +
                             "')");
  }
  void expect_end() {
    if (peek().kind != Tok::End) fail("trailing tokens");
  }
  std::string expect_word() {
    if (peek().kind != Tok::Word) fail("expected identifier");
    return next().text;
  }
  int64_t expect_int() {
    if (peek().kind != Tok::Int) fail("expected integer");
    return next().ival;
  }
  uint32_t expect_pc() {
    int64_t v = expect_int();
    if (v < 0 || v > 0xffffff) fail("program counter out of range");
    return static_cast<uint32_t>(v);
  }
  bool eat_punct(char c) {
    if (peek().kind == Tok::Punct && peek().text[0] == c) {
      next();
      return true;
    }
    return false;
  }
  void expect_punct(char c) {
    if (!eat_punct(c)) fail(std::string("expected '") + c + "'");
  }
  void expect_keyword(const char* w) {
    if (peek().kind != Tok::Word || peek().text != w)
      fail(std::string("expected '") + w + "'");
    next();
  }

  Reg parse_reg() {
    if (peek().kind != Tok::Word) fail("expected register");
    const std::string w = next().text;
    if (w == "ret") return reg_res();
    if (w == "excpt") return reg_excpt();
    if (w.size() >= 2 && w[0] == 'r') {
      uint32_t v = 0;
      auto res = std::from_chars(w.data() + 1, w.data() + w.size(), v);
      if (res.ec == std::errc() && res.ptr == w.data() + w.size() &&
          v <= 0xffff)
        return reg(static_cast<uint16_t>(v));
    }
    cur.fail(toks[pos - 1].col, "expected register, got '" + w + "'");
  }

  bool is_reg_word(const std::string& w) const {
    if (w == "ret" || w == "excpt") return true;
    if (w.size() < 2 || w[0] != 'r') return false;
    for (size_t i = 1; i < w.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(w[i]))) return false;
    return true;
  }

  TypeId parse_type() {
    const std::string w = expect_word();
    TypeId t;
    if (w == "int")
      t = kTypeInt;
    else if (w == "bool")
      t = kTypeBool;
    else if (w == "String")
      t = kTypeString;
    else if (w == "void")
      t = kTypeVoid;
    else if (w == "Intent")
      t = kTypeIntent;
    else
      t = prog.class_type(prog.intern(w));
    while (peek().kind == Tok::Punct && peek().text[0] == '[') {
      next();
      expect_punct(']');
      t = prog.array_type(t);
    }
    return t;
  }

  Lhs parse_lhs() {
    if (peek().kind != Tok::Word) fail("expected operand");
    const Tok word = peek();
    if (is_reg_word(word.text)) {
      Reg r = parse_reg();
      if (eat_punct('.')) return LhsField{r, prog.intern(expect_word())};
      if (eat_punct('[')) {
        Reg idx = parse_reg();
        expect_punct(']');
        return LhsArray{r, idx};
      }
      return LhsReg{r};
    }
    // Class.field static access.
    next();
    if (!eat_punct('.'))
      cur.fail(word.col,
               "expected register or Class.field, got '" + word.text + "'");
    return LhsStatic{prog.intern(word.text), prog.intern(expect_word())};
  }

  Rhs parse_rhs() {
    switch (peek().kind) {
      case Tok::Int:
        return Const{next().ival};
      case Tok::Str:
        return Const{next().text};
      case Tok::Word:
        if (peek().text == "true") return next(), Const{true};
        if (peek().text == "false") return next(), Const{false};
        if (peek().text == "null") return next(), Const{ConstNull{}};
        return parse_lhs();
      default:
        fail("expected operand or literal");
    }
  }

  std::vector<Reg> parse_reg_list() {
    std::vector<Reg> out;
    while (peek().kind == Tok::Word) out.push_back(parse_reg());
    return out;
  }

  Statement parse_statement(const std::string& kw) {
    if (kw == "goto") return StGoto{expect_pc()};
    if (kw == "if") {
      Reg a = parse_reg();
      const std::string op = expect_word();
      CmpOp c;
      if (op == "lt")
        c = CmpOp::Lt;
      else if (op == "le")
        c = CmpOp::Le;
      else if (op == "gt")
        c = CmpOp::Gt;
      else if (op == "ge")
        c = CmpOp::Ge;
      else if (op == "eq")
        c = CmpOp::Eq;
      else if (op == "ne")
        c = CmpOp::Ne;
      else
        cur.fail(toks[pos - 1].col, "unknown comparison '" + op + "'");
      Reg b = parse_reg();
      expect_keyword("goto");
      return StIf{c, a, b, expect_pc()};
    }
    if (kw == "move") {
      Lhs l = parse_lhs();
      return StMove{std::move(l), parse_rhs()};
    }
    if (kw == "neg" || kw == "not") {
      Reg d = parse_reg();
      return StUnOp{kw == "neg" ? UnOp::Neg : UnOp::Not, d, parse_reg()};
    }
    static const std::pair<const char*, BinOp> kBin[] = {
        {"add", BinOp::Add}, {"sub", BinOp::Sub}, {"mul", BinOp::Mul},
        {"div", BinOp::Div}, {"rem", BinOp::Rem}, {"and", BinOp::And},
        {"or", BinOp::Or},   {"xor", BinOp::Xor}};
    for (auto& [name, op] : kBin)
      if (kw == name) {
        Reg d = parse_reg(), a = parse_reg();
        return StBinOp{op, d, a, parse_reg()};
      }
    if (kw == "new") {
      Reg d = parse_reg();
      return StNew{d, prog.intern(expect_word())};
    }
    if (kw == "newarray") {
      Reg d = parse_reg(), l = parse_reg();
      return StNewArray{d, l, parse_type()};
    }
    if (kw == "newintent") {
      Reg d = parse_reg();
      return StNewIntent{d, prog.intern(expect_word())};
    }
    if (kw == "putextra") {
      Reg i = parse_reg(), k = parse_reg();
      return StPutExtra{i, k, parse_reg()};
    }
    if (kw == "getextra") {
      Reg i = parse_reg(), k = parse_reg();
      return StGetExtra{i, k, parse_type()};
    }
    if (kw == "invoke") {
      Reg o = parse_reg();
      Sym m = prog.intern(expect_word());
      return StInvoke{o, m, parse_reg_list()};
    }
    if (kw == "sinvoke") {
      Sym c = prog.intern(expect_word());
      Sym m = prog.intern(expect_word());
      return StSInvoke{c, m, parse_reg_list()};
    }
    if (kw == "return") return StReturn{};
    if (kw == "throw") return StThrow{parse_reg()};
    if (kw == "moveexception") return StMoveException{parse_reg()};
    if (kw == "checkcast") {
      Reg r = parse_reg();
      return StCheckCast{r, parse_type()};
    }
    if (kw == "instanceof") {
      Reg d = parse_reg(), s = parse_reg();
      return StInstanceOf{d, s, parse_type()};
    }
    if (kw == "monitorenter") return StMonitorEnter{parse_reg()};
    if (kw == "monitorexit") return StMonitorExit{parse_reg()};
    if (kw == "startthread") return StStartThread{parse_reg()};
    if (kw == "interrupt") return StInterrupt{parse_reg()};
    if (kw == "interrupted") return StInterrupted{parse_reg()};
    if (kw == "isinterrupted") return StIsInterrupted{parse_reg()};
    if (kw == "join") return StJoin{parse_reg()};
    if (kw == "wait") return StWait{parse_reg()};
    if (kw == "startactivity") return StStartActivity{parse_reg()};
    cur.fail(toks[pos - 1].col, "unknown statement '" + kw + "'");
  }

  void run(std::string_view text) {
    ClassDef* cls = nullptr;
    MethodDef* mth = nullptr;
    size_t start = 0;
    while (start <= text.size()) {
      size_t end = text.find('\n', start);
      if (end == std::string_view::npos) end = text.size();
      ++cur.line;
      toks = lex_line(cur, text.substr(start, end - start));
      pos = 0;
      start = end + 1;
      if (peek().kind == Tok::End) continue;

      if (eat_punct('.')) {
        const std::string dir = expect_word();
        if (dir == "class" || dir == "interface") {
          if (cls) fail("class directive inside class body");
          ClassDef c;
          c.name = prog.intern(expect_word());
          c.is_interface = dir == "interface";
          c.super = prog.intern("Object");
          if (peek().kind == Tok::Word && peek().text == "extends") {
            next();
            if (c.is_interface) {
              while (peek().kind == Tok::Word)
                c.interfaces.push_back(prog.intern(expect_word()));
            } else {
              c.super = prog.intern(expect_word());
            }
          }
          if (peek().kind == Tok::Word && peek().text == "implements") {
            next();
            while (peek().kind == Tok::Word)
              c.interfaces.push_back(prog.intern(expect_word()));
          }
          expect_end();
          if (prog.class_ids.count(c.name))
            fail("duplicate class " + prog.name(c.name));
          prog.class_ids.emplace(c.name,
                                 static_cast<uint32_t>(prog.classes.size()));
          prog.classes.push_back(std::move(c));
          if (!prog.classes.back().is_interface)
            cls = &prog.classes.back();
        } else if (dir == "field") {
          if (!cls || mth) fail("field outside class body");
          FieldDef f;
          if (peek().kind == Tok::Word && peek().text == "static") {
            next();
            f.is_static = true;
          }
          f.name = prog.intern(expect_word());
          f.ty = parse_type();
          expect_end();
          cls->fields.push_back(f);
        } else if (dir == "method") {
          if (!cls || mth) fail("method outside class body");
          MethodDef m;
          if (peek().kind == Tok::Word && peek().text == "static") {
            next();
            m.is_static = true;
          }
          m.name = prog.intern(expect_word());
          expect_punct('(');
          while (!eat_punct(')')) m.params.push_back(parse_type());
          m.ret = parse_type();
          expect_keyword("locals");
          int64_t loc = expect_int();
          if (loc < 0 || loc > 4096) fail("locals out of range");
          m.loc = static_cast<uint32_t>(loc);
          expect_end();
          cls->methods.push_back(std::move(m));
          mth = &cls->methods.back();
        } else if (dir == "catch") {
          if (!mth) fail("catch outside method body");
          Handler h;
          h.cls = prog.intern(expect_word());
          expect_keyword("from");
          h.pc_lo = expect_pc();
          expect_keyword("to");
          h.pc_hi = expect_pc();
          expect_keyword("using");
          h.target = expect_pc();
          expect_end();
          mth->handlers.push_back(h);
        } else if (dir == "end") {
          const std::string what = expect_word();
          expect_end();
          if (what == "method") {
            if (!mth) fail(".end method outside method");
            mth = nullptr;
          } else if (what == "class") {
            if (!cls || mth) fail(".end class outside class");
            cls = nullptr;
          } else {
            fail("unknown .end " + what);
          }
        } else {
          fail("unknown directive ." + dir);
        }
        continue;
      }

      if (!mth) fail("statement outside method body");
      const std::string kw = expect_word();
      Statement st = parse_statement(kw);
      expect_end();
      mth->body.push_back(std::move(st));
    }
    if (mth) throw ParseError(std::string(cur.file) + ": missing .end method");
    if (cls) throw ParseError(std::string(cur.file) + ": missing .end class");
  }
};

}  // namespace

Program parse_program_raw(std::string_view text, std::string_view filename) {
  Parser ps;
  ps.cur.file = filename;
  ps.run(text);
  return std::move(ps.prog);
}

Program parse_program(std::string_view text, std::string_view filename) {
  Program p = parse_program_raw(text, filename);
  inject_builtins(p);
  validate(p);
  return p;
}

// ---------------------------------------------------------------------------
// Printer

namespace {

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    if (c == '\t') {
      out += "\\t";
      continue;
    }
    out += c;
  }
  return out + "\"";
}

std::string print_reg(Reg r) {
  switch (r.kind) {
    case RegKind::Res: return "ret";
    case RegKind::Excpt: return "excpt";
    default: return "r" + std::to_string(r.idx);
  }
}

std::string print_lhs(const Program& p, const Lhs& l) {
  if (auto* r = std::get_if<LhsReg>(&l)) return print_reg(r->r);
  if (auto* f = std::get_if<LhsField>(&l))
    return print_reg(f->obj) + "." + p.name(f->field);
  if (auto* a = std::get_if<LhsArray>(&l))
    return print_reg(a->arr) + "[" + print_reg(a->idx) + "]";
  auto& s = std::get<LhsStatic>(l);
  return p.name(s.cls) + "." + p.name(s.field);
}

std::string print_rhs(const Program& p, const Rhs& r) {
  if (auto* l = std::get_if<Lhs>(&r)) return print_lhs(p, *l);
  auto& c = std::get<Const>(r);
  if (auto* i = std::get_if<int64_t>(&c)) return std::to_string(*i);
  if (auto* b = std::get_if<bool>(&c)) return *b ? "true" : "false";
  if (auto* s = std::get_if<std::string>(&c)) return quote(*s);
  return "null";
}

const char* cmp_word(CmpOp c) {
  switch (c) {
    case CmpOp::Lt: return "lt";
    case CmpOp::Le: return "le";
    case CmpOp::Gt: return "gt";
    case CmpOp::Ge: return "ge";
    case CmpOp::Eq: return "eq";
    default: return "ne";
  }
}

const char* bin_word(BinOp b) {
  switch (b) {
    case BinOp::Add: return "add";
    case BinOp::Sub: return "sub";
    case BinOp::Mul: return "mul";
    case BinOp::Div: return "div";
    case BinOp::Rem: return "rem";
    case BinOp::And: return "and";
    case BinOp::Or: return "or";
    default: return "xor";
  }
}

}  // namespace

std::string print_type(const Program& p, TypeId t) {
  const TypeNode& n = p.type(t);
  switch (n.kind) {
    case TypeKind::Bool: return "bool";
    case TypeKind::Int: return "int";
    case TypeKind::String: return "String";
    case TypeKind::Void: return "void";
    case TypeKind::Intent: return "Intent";
    case TypeKind::Class: return p.name(n.cls);
    default: return print_type(p, n.elem) + "[]";
  }
}

std::string print_statement(const Program& p, const Statement& st) {
  std::ostringstream os;
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, StGoto>) {
          os << "goto " << s.target;
        } else if constexpr (std::is_same_v<T, StIf>) {
          os << "if " << print_reg(s.a) << " " << cmp_word(s.op) << " "
             << print_reg(s.b) << " goto " << s.target;
        } else if constexpr (std::is_same_v<T, StMove>) {
          os << "move " << print_lhs(p, s.lhs) << " " << print_rhs(p, s.rhs);
        } else if constexpr (std::is_same_v<T, StUnOp>) {
          os << (s.op == UnOp::Neg ? "neg " : "not ") << print_reg(s.dst)
             << " " << print_reg(s.src);
        } else if constexpr (std::is_same_v<T, StBinOp>) {
          os << bin_word(s.op) << " " << print_reg(s.dst) << " "
             << print_reg(s.a) << " " << print_reg(s.b);
        } else if constexpr (std::is_same_v<T, StNew>) {
          os << "new " << print_reg(s.dst) << " " << p.name(s.cls);
        } else if constexpr (std::is_same_v<T, StNewArray>) {
          os << "newarray " << print_reg(s.dst) << " " << print_reg(s.len)
             << " " << print_type(p, s.elem);
        } else if constexpr (std::is_same_v<T, StNewIntent>) {
          os << "newintent " << print_reg(s.dst) << " " << p.name(s.cls);
        } else if constexpr (std::is_same_v<T, StPutExtra>) {
          os << "putextra " << print_reg(s.intent) << " " << print_reg(s.key)
             << " " << print_reg(s.value);
        } else if constexpr (std::is_same_v<T, StGetExtra>) {
          os << "getextra " << print_reg(s.intent) << " " << print_reg(s.key)
             << " " << print_type(p, s.ty);
        } else if constexpr (std::is_same_v<T, StInvoke>) {
          os << "invoke " << print_reg(s.obj) << " " << p.name(s.mth);
          for (Reg r : s.args) os << " " << print_reg(r);
        } else if constexpr (std::is_same_v<T, StSInvoke>) {
          os << "sinvoke " << p.name(s.cls) << " " << p.name(s.mth);
          for (Reg r : s.args) os << " " << print_reg(r);
        } else if constexpr (std::is_same_v<T, StReturn>) {
          os << "return";
        } else if constexpr (std::is_same_v<T, StThrow>) {
          os << "throw " << print_reg(s.src);
        } else if constexpr (std::is_same_v<T, StMoveException>) {
          os << "moveexception " << print_reg(s.dst);
        } else if constexpr (std::is_same_v<T, StCheckCast>) {
          os << "checkcast " << print_reg(s.src) << " " << print_type(p, s.ty);
        } else if constexpr (std::is_same_v<T, StInstanceOf>) {
          os << "instanceof " << print_reg(s.dst) << " " << print_reg(s.src)
             << " " << print_type(p, s.ty);
        } else if constexpr (std::is_same_v<T, StMonitorEnter>) {
          os << "monitorenter " << print_reg(s.obj);
        } else if constexpr (std::is_same_v<T, StMonitorExit>) {
          os << "monitorexit " << print_reg(s.obj);
        } else if constexpr (std::is_same_v<T, StStartThread>) {
          os << "startthread " << print_reg(s.obj);
        } else if constexpr (std::is_same_v<T, StInterrupt>) {
          os << "interrupt " << print_reg(s.obj);
        } else if constexpr (std::is_same_v<T, StInterrupted>) {
          os << "interrupted " << print_reg(s.obj);
        } else if constexpr (std::is_same_v<T, StIsInterrupted>) {
          os << "isinterrupted " << print_reg(s.obj);
        } else if constexpr (std::is_same_v<T, StJoin>) {
          os << "join " << print_reg(s.obj);
        } else if constexpr (std::is_same_v<T, StWait>) {
          os << "wait " << print_reg(s.obj);
        } else if constexpr (std::is_same_v<T, StStartActivity>) {
          os << "startactivity " << print_reg(s.intent);
        }
      },
      st);
  return os.str();
}

std::string print_program(const Program& p, bool include_builtins) {
  std::ostringstream os;
  for (const ClassDef& c : p.classes) {
    if (c.is_builtin && !include_builtins) continue;
    if (c.is_interface) {
      os << ".interface " << p.name(c.name);
      if (!c.interfaces.empty()) {
        os << " extends";
        for (Sym i : c.interfaces) os << " " << p.name(i);
      }
      os << "\n\n";
      continue;
    }
    os << ".class " << p.name(c.name) << " extends " << p.name(c.super);
    if (!c.interfaces.empty()) {
      os << " implements";
      for (Sym i : c.interfaces) os << " " << p.name(i);
    }
    os << "\n";
    for (const FieldDef& f : c.fields)
      os << ".field " << (f.is_static ? "static " : "") << p.name(f.name)
         << " " << print_type(p, f.ty) << "\n";
    for (const MethodDef& m : c.methods) {
      os << ".method " << (m.is_static ? "static " : "") << p.name(m.name)
         << " (";
      for (size_t i = 0; i < m.params.size(); ++i)
        os << (i ? " " : "") << print_type(p, m.params[i]);
      os << ") " << print_type(p, m.ret) << " locals " << m.loc << "\n";
      for (const Statement& st : m.body)
        os << "  " << print_statement(p, st) << "\n";
      for (const Handler& h : m.handlers)
        os << ".catch " << p.name(h.cls) << " from " << h.pc_lo << " to "
           << h.pc_hi << " using " << h.target << "\n";
      os << ".end method\n";
    }
    os << ".end class\n\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Sources/sinks configuration

AnalysisConfig parse_config(const Program& p, std::string_view text,
                            std::string_view filename) {
  AnalysisConfig cfg;
  Cursor cur{filename, 0};
  size_t start = 0;
  while (start <= text.size()) {
    size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++cur.line;
    auto toks = lex_line(cur, text.substr(start, end - start));
    start = end + 1;
    if (toks[0].kind == Tok::End) continue;
    auto word = [&](size_t i) -> const std::string& {
      if (i >= toks.size() - 1 || toks[i].kind != Tok::Word)
        cur.fail(toks[std::min(i, toks.size() - 1)].col,
                 "expected 'Class method source|sink' or 'Class entry'");
      return toks[i].text;
    };
    auto cls_of = [&](const std::string& w) {
      auto c = p.find_sym(w);
      if (!c || !p.find_class(*c)) cur.fail(toks[0].col, "unknown class " + w);
      return *c;
    };
    if (toks.size() - 1 == 2 && word(1) == "entry") {
      cfg.entries.push_back(cls_of(word(0)));
      continue;
    }
    if (toks.size() - 1 != 3)
      cur.fail(toks[0].col,
               "expected 'Class method source|sink' or 'Class entry'");
    Sym c = cls_of(word(0));
    auto m = p.find_sym(word(1));
    const ClassDef* d = p.find_class(c);
    bool defines = false;
    if (m)
      for (const MethodDef& md : d->methods) defines |= md.name == *m;
    if (!defines)
      cur.fail(toks[1].col,
               "class " + word(0) + " does not define method " + word(1));
    const std::string& kind = word(2);
    if (kind == "source")
      cfg.sources.emplace_back(c, *m);
    else if (kind == "sink")
      cfg.sinks.emplace_back(c, *m);
    else
      cur.fail(toks[2].col, "expected 'source' or 'sink', got '" + kind + "'");
  }
  return cfg;
}

}  // namespace fstaint::frontend
