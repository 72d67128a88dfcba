#include <algorithm>
#include <sstream>
#include <unordered_set>

#include "fstaint/frontend/ast.hpp"
#include "fstaint/frontend/parser.hpp"

namespace fstaint::frontend {

Program::Program() {
  // Fixed type slots; see kTypeBool etc.
  types.push_back({TypeKind::Bool, 0, 0});
  types.push_back({TypeKind::Int, 0, 0});
  types.push_back({TypeKind::String, 0, 0});
  types.push_back({TypeKind::Void, 0, 0});
  types.push_back({TypeKind::Intent, 0, 0});
}

Sym Program::intern(std::string_view s) {
  auto it = sym_ids.find(std::string(s));
  if (it != sym_ids.end()) return it->second;
  Sym id = static_cast<Sym>(syms.size());
  syms.emplace_back(s);
  sym_ids.emplace(syms.back(), id);
  return id;
}

std::optional<Sym> Program::find_sym(std::string_view s) const {
  auto it = sym_ids.find(std::string(s));
  if (it == sym_ids.end()) return std::nullopt;
  return it->second;
}

TypeId Program::intern_type(const TypeNode& t) {
  for (TypeId i = 0; i < types.size(); ++i)
    if (types[i] == t) return i;
  types.push_back(t);
  return static_cast<TypeId>(types.size() - 1);
}

const ClassDef* Program::find_class(Sym name) const {
  auto it = class_ids.find(name);
  return it == class_ids.end() ? nullptr : &classes[it->second];
}

// ---------------------------------------------------------------------------
// Built-in classes

namespace {

MethodDef noop_method(Program& p, const char* name) {
  MethodDef m;
  m.name = p.intern(name);
  m.ret = kTypeVoid;
  m.loc = 0;
  m.body.push_back(StReturn{});
  return m;
}

FieldDef field(Program& p, const char* name, TypeId ty) {
  return FieldDef{p.intern(name), ty, false};
}

void add_class(Program& p, ClassDef c) {
  c.is_builtin = true;
  p.class_ids.emplace(c.name, static_cast<uint32_t>(p.classes.size()));
  p.classes.push_back(std::move(c));
}

}  // namespace

void inject_builtins(Program& p) {
  const Sym object = p.intern("Object");
  const Sym throwable = p.intern("Throwable");
  const Sym activity = p.intern("Activity");
  const Sym thread = p.intern("Thread");

  if (!p.find_class(object)) {
    ClassDef c;
    c.name = object;
    c.super = object;  // root
    add_class(p, std::move(c));
  }
  if (!p.find_class(throwable)) {
    ClassDef c;
    c.name = throwable;
    c.super = object;
    add_class(p, std::move(c));
  }
  if (!p.find_class(p.intern("IntExcpt"))) {
    ClassDef c;
    c.name = p.intern("IntExcpt");
    c.super = throwable;
    add_class(p, std::move(c));
  }
  if (!p.find_class(activity)) {
    ClassDef c;
    c.name = activity;
    c.super = object;
    c.fields = {field(p, "finished", kTypeBool),
                field(p, "intent", kTypeIntent),
                field(p, "result", p.class_type(object)),
                field(p, "parent", p.class_type(activity)),
                field(p, "inte", kTypeBool)};
    for (const char* m :
         {"<init>", "onStart", "onResume", "onPause", "onStop", "onRestart",
          "onDestroy", "onActivityResult"})
      c.methods.push_back(noop_method(p, m));
    add_class(p, std::move(c));
  }
  if (!p.find_class(thread)) {
    ClassDef c;
    c.name = thread;
    c.super = object;
    c.fields = {field(p, "inte", kTypeBool), field(p, "finished", kTypeBool)};
    c.methods.push_back(noop_method(p, "<init>"));
    c.methods.push_back(noop_method(p, "run"));
    add_class(p, std::move(c));
  }
}

// ---------------------------------------------------------------------------
// Validation

namespace {

[[noreturn]] void fail(const std::string& what) { throw ValidateError(what); }

bool reserved_name(const std::string& s) {
  static const char* kWords[] = {"ret",  "excpt", "true",   "false", "null",
                                 "int",  "bool",  "String", "void",  "Intent",
                                 "goto", "if"};
  for (auto* w : kWords)
    if (s == w) return true;
  if (s.size() >= 2 && s[0] == 'r' &&
      std::all_of(s.begin() + 1, s.end(), [](char c) { return isdigit(c); }))
    return true;
  return false;
}

struct Checker {
  const Program& p;
  // Transitive supertype closure (classes and interfaces), including self.
  std::vector<std::unordered_set<Sym>> supers;
  // name -> (arity, is_static, declared anywhere as instance field)
  std::unordered_map<Sym, std::pair<size_t, bool>> method_shape;
  std::unordered_set<Sym> instance_fields;

  const std::string& n(Sym s) const { return p.syms[s]; }

  bool subclass(Sym c, Sym d) const {
    auto it = p.class_ids.find(c);
    return it != p.class_ids.end() && supers[it->second].count(d) > 0;
  }

  void build_closure() {
    supers.resize(p.classes.size());
    for (uint32_t i = 0; i < p.classes.size(); ++i) close(i);
    // A proper supertype edge leading back to its origin is a cycle.
    for (const ClassDef& c : p.classes) {
      auto back_edge = [&](Sym s) {
        return s != c.name && supers[p.class_ids.at(s)].count(c.name) > 0;
      };
      if (back_edge(c.super)) fail("cyclic class hierarchy at " + n(c.name));
      for (Sym i : c.interfaces)
        if (back_edge(i)) fail("cyclic class hierarchy at " + n(c.name));
    }
  }

  void close(uint32_t cid) {
    if (!supers[cid].empty()) return;
    std::vector<Sym> stack{p.classes[cid].name};
    std::unordered_set<Sym> seen;
    while (!stack.empty()) {
      Sym c = stack.back();
      stack.pop_back();
      if (!seen.insert(c).second) continue;
      auto it = p.class_ids.find(c);
      if (it == p.class_ids.end())
        fail("unknown supertype " + n(c));
      const ClassDef& d = p.classes[it->second];
      if (d.super != c) stack.push_back(d.super);
      for (Sym i : d.interfaces) stack.push_back(i);
    }
    supers[cid] = std::move(seen);
  }
};

void check_statement(Checker& ck, const ClassDef& cls, const MethodDef& m,
                     uint32_t pc, const Statement& st) {
  const Program& p = ck.p;
  const uint32_t nregs = m.reg_count();
  const uint32_t npc = static_cast<uint32_t>(m.body.size());
  std::ostringstream at;
  at << p.syms[cls.name] << "." << p.syms[m.name] << " pc " << pc << ": ";
  auto err = [&](const std::string& msg) { fail(at.str() + msg); };

  auto reg_ok = [&](Reg r) {
    if (r.kind == RegKind::Plain && r.idx >= nregs - 2)
      err("register r" + std::to_string(r.idx) + " out of range (file has " +
          std::to_string(nregs) + " registers incl. ret/excpt)");
  };
  auto pc_ok = [&](uint32_t t) {
    if (t >= npc) err("jump target " + std::to_string(t) + " out of range");
  };
  auto class_ok = [&](Sym c, bool want_instantiable) {
    const ClassDef* d = p.find_class(c);
    if (!d) err("unknown class " + ck.n(c));
    if (want_instantiable && d->is_interface)
      err("cannot instantiate interface " + ck.n(c));
  };
  auto ifield_ok = [&](Sym f) {
    if (!ck.instance_fields.count(f)) err("unknown field " + ck.n(f));
  };
  // Strips array layers and checks the base class exists (if any).
  auto type_ok = [&](TypeId t) {
    while (p.type(t).kind == TypeKind::Array) t = p.type(t).elem;
    if (p.type(t).kind == TypeKind::Class) class_ok(p.type(t).cls, false);
  };
  auto sfield_ok = [&](Sym c, Sym f) {
    const ClassDef* d = p.find_class(c);
    if (!d) err("unknown class " + ck.n(c));
    for (const FieldDef& fd : d->fields)
      if (fd.name == f && fd.is_static) return;
    err("class " + ck.n(c) + " has no static field " + ck.n(f));
  };
  auto lhs_ok = [&](const Lhs& l) {
    if (auto* r = std::get_if<LhsReg>(&l)) {
      reg_ok(r->r);
    } else if (auto* fl = std::get_if<LhsField>(&l)) {
      reg_ok(fl->obj);
      ifield_ok(fl->field);
    } else if (auto* ar = std::get_if<LhsArray>(&l)) {
      reg_ok(ar->arr);
      reg_ok(ar->idx);
    } else {
      auto& s = std::get<LhsStatic>(l);
      sfield_ok(s.cls, s.field);
    }
  };
  auto method_ok = [&](Sym mth, size_t nargs, bool is_static) {
    auto it = ck.method_shape.find(mth);
    if (it == ck.method_shape.end()) err("unknown method " + ck.n(mth));
    if (it->second.first != nargs)
      err("method " + ck.n(mth) + " expects " +
          std::to_string(it->second.first) + " arguments, got " +
          std::to_string(nargs));
    if (it->second.second != is_static)
      err(std::string("method ") + ck.n(mth) + " is " +
          (it->second.second ? "static" : "virtual"));
  };

  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, StGoto>) {
          pc_ok(s.target);
        } else if constexpr (std::is_same_v<T, StIf>) {
          reg_ok(s.a);
          reg_ok(s.b);
          pc_ok(s.target);
        } else if constexpr (std::is_same_v<T, StMove>) {
          lhs_ok(s.lhs);
          if (auto* l = std::get_if<Lhs>(&s.rhs)) lhs_ok(*l);
        } else if constexpr (std::is_same_v<T, StUnOp>) {
          reg_ok(s.dst);
          reg_ok(s.src);
        } else if constexpr (std::is_same_v<T, StBinOp>) {
          reg_ok(s.dst);
          reg_ok(s.a);
          reg_ok(s.b);
        } else if constexpr (std::is_same_v<T, StNew>) {
          reg_ok(s.dst);
          class_ok(s.cls, true);
        } else if constexpr (std::is_same_v<T, StNewArray>) {
          reg_ok(s.dst);
          reg_ok(s.len);
          if (p.type(s.elem).kind == TypeKind::Void)
            err("array of void");
          type_ok(s.elem);
        } else if constexpr (std::is_same_v<T, StNewIntent>) {
          reg_ok(s.dst);
          class_ok(s.cls, true);
          if (!ck.subclass(s.cls, p.find_sym("Activity").value()))
            err("intent target " + ck.n(s.cls) + " is not an activity");
        } else if constexpr (std::is_same_v<T, StPutExtra>) {
          reg_ok(s.intent);
          reg_ok(s.key);
          reg_ok(s.value);
        } else if constexpr (std::is_same_v<T, StGetExtra>) {
          reg_ok(s.intent);
          reg_ok(s.key);
          if (p.type(s.ty).kind == TypeKind::Void) err("get-extra of void");
        } else if constexpr (std::is_same_v<T, StInvoke>) {
          reg_ok(s.obj);
          for (Reg r : s.args) reg_ok(r);
          method_ok(s.mth, s.args.size(), false);
        } else if constexpr (std::is_same_v<T, StSInvoke>) {
          for (Reg r : s.args) reg_ok(r);
          class_ok(s.cls, false);
          const ClassDef* d = p.find_class(s.cls);
          bool found = false;
          for (const MethodDef& md : d->methods)
            if (md.name == s.mth) found = md.is_static;
          if (!found)
            err("class " + ck.n(s.cls) + " has no static method " +
                ck.n(s.mth));
          method_ok(s.mth, s.args.size(), true);
        } else if constexpr (std::is_same_v<T, StThrow>) {
          reg_ok(s.src);
        } else if constexpr (std::is_same_v<T, StMoveException>) {
          reg_ok(s.dst);
        } else if constexpr (std::is_same_v<T, StCheckCast>) {
          reg_ok(s.src);
          if (p.type(s.ty).kind == TypeKind::Void) err("cast to void");
          type_ok(s.ty);
        } else if constexpr (std::is_same_v<T, StInstanceOf>) {
          reg_ok(s.dst);
          reg_ok(s.src);
          if (p.type(s.ty).kind == TypeKind::Void) err("instanceof void");
          type_ok(s.ty);
        } else if constexpr (std::is_same_v<T, StMonitorEnter> ||
                             std::is_same_v<T, StMonitorExit> ||
                             std::is_same_v<T, StStartThread> ||
                             std::is_same_v<T, StInterrupt> ||
                             std::is_same_v<T, StInterrupted> ||
                             std::is_same_v<T, StIsInterrupted> ||
                             std::is_same_v<T, StJoin> ||
                             std::is_same_v<T, StWait>) {
          reg_ok(s.obj);
        } else if constexpr (std::is_same_v<T, StStartActivity>) {
          reg_ok(s.intent);
        }
      },
      st);
}

}  // namespace

void validate(const Program& p) {
  Checker ck{p, {}, {}, {}};
  if (p.classes.size() != p.class_ids.size())
    fail("duplicate class definitions");
  ck.build_closure();

  const Sym throwable = p.find_sym("Throwable").value_or(0);

  // Collect global method shapes and field names; reject inconsistencies.
  for (const ClassDef& c : p.classes) {
    if (reserved_name(p.syms[c.name]))
      fail("reserved class name " + p.syms[c.name]);
    if (!c.is_builtin)
      for (const char* b :
           {"Object", "Throwable", "IntExcpt", "Activity", "Thread"})
        if (p.syms[c.name] == b)
          fail("cannot redefine built-in class " + p.syms[c.name]);
    if (c.is_interface && (!c.fields.empty() || !c.methods.empty()))
      fail("interface " + p.syms[c.name] + " must not declare members");
    if (!c.is_interface) {
      const ClassDef* s = p.find_class(c.super);
      if (!s) fail("unknown superclass of " + p.syms[c.name]);
      if (s->is_interface)
        fail("class " + p.syms[c.name] + " extends an interface");
    }
    for (Sym i : c.interfaces) {
      const ClassDef* d = p.find_class(i);
      if (!d) fail("unknown interface on " + p.syms[c.name]);
      if (!d->is_interface)
        fail(p.syms[c.name] + " implements non-interface " + p.syms[i]);
    }
    std::unordered_set<Sym> seen_f, seen_m;
    for (const FieldDef& f : c.fields) {
      if (reserved_name(p.syms[f.name]))
        fail("reserved field name " + p.syms[f.name]);
      if (!seen_f.insert(f.name).second)
        fail("duplicate field " + p.syms[f.name] + " in " + p.syms[c.name]);
      if (!f.is_static) ck.instance_fields.insert(f.name);
    }
    for (const MethodDef& m : c.methods) {
      if (!seen_m.insert(m.name).second)
        fail("duplicate method " + p.syms[m.name] + " in " + p.syms[c.name]);
      auto shape = std::make_pair(m.params.size(), m.is_static);
      auto [it, fresh] = ck.method_shape.emplace(m.name, shape);
      if (!fresh && it->second != shape)
        fail("method " + p.syms[m.name] +
             " declared with conflicting shapes across classes");
    }
  }

  // Field shadowing across the hierarchy.
  for (const ClassDef& c : p.classes) {
    for (const FieldDef& f : c.fields) {
      Sym s = c.super;
      while (true) {
        const ClassDef& sc = *p.find_class(s);
        if (&sc != &c)
          for (const FieldDef& g : sc.fields)
            if (g.name == f.name)
              fail("field " + p.syms[f.name] + " in " + p.syms[c.name] +
                   " shadows " + p.syms[sc.name]);
        if (sc.super == s) break;
        s = sc.super;
      }
    }
  }

  for (const ClassDef& c : p.classes) {
    for (const MethodDef& m : c.methods) {
      if (m.loc > 4096)
        fail("method " + p.syms[m.name] + " declares too many locals");
      if (m.body.empty())
        fail("method " + p.syms[c.name] + "." + p.syms[m.name] +
             " has an empty body");
      for (uint32_t pc = 0; pc < m.body.size(); ++pc)
        check_statement(ck, c, m, pc, m.body[pc]);
      for (const Handler& h : m.handlers) {
        if (h.pc_lo > h.pc_hi || h.pc_hi >= m.body.size() ||
            h.target >= m.body.size())
          fail("handler range out of bounds in " + p.syms[c.name] + "." +
               p.syms[m.name]);
        if (!ck.subclass(h.cls, throwable))
          fail("handler class " + p.syms[h.cls] + " is not throwable");
      }
    }
  }
}

}  // namespace fstaint::frontend
