#include <cstdint>
#include <limits>
#include <unordered_map>
#include <unordered_set>

#include "fstaint/concrete/machine.hpp"

namespace fstaint::concrete {

using namespace frontend;

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

int64_t sat(__int128 v) {
  if (v > std::numeric_limits<int64_t>::max())
    return std::numeric_limits<int64_t>::max();
  if (v < std::numeric_limits<int64_t>::min())
    return std::numeric_limits<int64_t>::min();
  return static_cast<int64_t>(v);
}

// Saturating arithmetic; nullopt on division/remainder by zero.
std::optional<int64_t> arith(BinOp op, int64_t a, int64_t b) {
  const int64_t kMin = std::numeric_limits<int64_t>::min();
  switch (op) {
    case BinOp::Add: return sat(static_cast<__int128>(a) + b);
    case BinOp::Sub: return sat(static_cast<__int128>(a) - b);
    case BinOp::Mul: return sat(static_cast<__int128>(a) * b);
    case BinOp::Div:
      if (b == 0) return std::nullopt;
      if (a == kMin && b == -1) return std::numeric_limits<int64_t>::max();
      return a / b;
    case BinOp::Rem:
      if (b == 0) return std::nullopt;
      if (a == kMin && b == -1) return 0;
      return a % b;
    default: return std::nullopt;  // boolean ops handled separately
  }
}

// Comparison is defined on primitives of the same kind (ordering on ints
// only) and on location/null tests; everything else is stuck.
std::optional<bool> compare(CmpOp op, const Value& va, const Value& vb) {
  const bool eq_like = op == CmpOp::Eq || op == CmpOp::Ne;
  const Prim* a = as_prim(va);
  const Prim* b = as_prim(vb);
  if (a && b) {
    if (const int64_t* x = std::get_if<int64_t>(&a->v)) {
      const int64_t* y = std::get_if<int64_t>(&b->v);
      if (!y) return std::nullopt;
      switch (op) {
        case CmpOp::Lt: return *x < *y;
        case CmpOp::Le: return *x <= *y;
        case CmpOp::Gt: return *x > *y;
        case CmpOp::Ge: return *x >= *y;
        case CmpOp::Eq: return *x == *y;
        case CmpOp::Ne: return *x != *y;
      }
    }
    if (!eq_like) return std::nullopt;
    if (a->v.index() != b->v.index()) return std::nullopt;
    bool same = a->v == b->v;
    return op == CmpOp::Eq ? same : !same;
  }
  if (!eq_like) return std::nullopt;
  const Location* la = as_loc(va);
  const Location* lb = as_loc(vb);
  if (la && lb) {
    bool same = la->ptr == lb->ptr;
    return op == CmpOp::Eq ? same : !same;
  }
  // One side is a location, the other a primitive: only null compares.
  if ((la && is_null(vb)) || (lb && is_null(va)))
    return op == CmpOp::Eq ? false : true;
  return std::nullopt;
}

}  // namespace

Machine::Machine(const Hierarchy& hier, const AnalysisConfig& cfg,
                 LifecycleModel model)
    : hier_(&hier), cfg_(&cfg), model_(std::move(model)) {
  const Program& p = hier.program();
  f_finished_ = *p.find_sym("finished");
  f_intent_ = *p.find_sym("intent");
  f_parent_ = *p.find_sym("parent");
  f_result_ = *p.find_sym("result");
  f_inte_ = *p.find_sym("inte");
}

Object Machine::new_object(uint32_t cid) const {
  Object o{cid, {}, std::nullopt, 0};
  for (const FieldDef& fd : hier_->fields_of(cid))
    o.fields.push_back(default_value(program(), fd.ty));
  return o;
}

bool Machine::successful(const CallStack& st) const {
  if (st.status != StackStatus::Normal || st.frames.size() != 1) return false;
  const Frame& f = st.frames[0];
  const MethodDef& m = program().method(f.pp);
  return f.pp.pc < m.body.size() &&
         std::holds_alternative<StReturn>(m.body[f.pp.pc]);
}

bool Machine::value_type_leq(const Heap& heap, const Value& v,
                             TypeId ty) const {
  const Program& p = program();
  if (const Prim* pr = as_prim(v)) {
    if (std::holds_alternative<Null>(pr->v)) return false;  // no dynamic type
    TypeId t = std::holds_alternative<int64_t>(pr->v)  ? kTypeInt
               : std::holds_alternative<bool>(pr->v)   ? kTypeBool
                                                       : kTypeString;
    return hier_->subtype(t, ty);
  }
  const MemoryBlock* b = heap.get(std::get<Location>(v));
  if (!b) return false;
  const TypeNode& want = p.type(ty);
  if (const Object* o = std::get_if<Object>(b))
    return want.kind == TypeKind::Class &&
           hier_->subclass(p.cls(o->cls).name, want.cls);
  if (const ArrayBlk* a = std::get_if<ArrayBlk>(b))
    return want.kind == TypeKind::Array && hier_->subtype(a->elem, want.elem);
  return want.kind == TypeKind::Intent;
}

std::optional<Value> Machine::eval_rhs(const LocalConfig& lc,
                                       const Rhs& rhs) const {
  const Program& p = program();
  if (lc.stack.frames.empty()) return std::nullopt;
  const Frame& f = lc.stack.top();
  const MethodDef& m = p.method(f.pp);

  if (const Const* c = std::get_if<Const>(&rhs)) {
    if (const int64_t* i = std::get_if<int64_t>(c)) return make_int(*i);
    if (const bool* b = std::get_if<bool>(c)) return make_bool(*b);
    if (const std::string* s = std::get_if<std::string>(c)) return make_str(*s);
    return make_null();
  }

  return std::visit(
      overloaded{
          [&](const LhsReg& r) -> std::optional<Value> {
            return f.regs[m.resolve(r.r)];
          },
          [&](const LhsField& x) -> std::optional<Value> {
            const Location* l = as_loc(f.regs[m.resolve(x.obj)]);
            if (!l) return std::nullopt;
            const Object* o = lc.heap.object(*l);
            if (!o) return std::nullopt;
            auto slot = hier_->field_slot(o->cls, x.field);
            if (!slot) return std::nullopt;
            return o->fields[*slot];
          },
          [&](const LhsArray& x) -> std::optional<Value> {
            const Location* l = as_loc(f.regs[m.resolve(x.arr)]);
            if (!l) return std::nullopt;
            const MemoryBlock* b = lc.heap.get(*l);
            const ArrayBlk* a = b ? std::get_if<ArrayBlk>(b) : nullptr;
            if (!a) return std::nullopt;
            const int64_t* j = as_int(f.regs[m.resolve(x.idx)]);
            if (!j || *j < 0 || *j >= static_cast<int64_t>(a->elems.size()))
              return std::nullopt;
            return a->elems[static_cast<size_t>(*j)];
          },
          [&](const LhsStatic& x) -> std::optional<Value> {
            auto it = p.class_ids.find(x.cls);
            if (it == p.class_ids.end()) return std::nullopt;
            auto sv = lc.statics.vals.find(StaticHeap::key(it->second, x.field));
            if (sv != lc.statics.vals.end()) return sv->second;
            // Unseeded stores still see the declared default.
            for (const FieldDef& fd : p.cls(it->second).fields)
              if (fd.is_static && fd.name == x.field)
                return default_value(p, fd.ty);
            return std::nullopt;
          },
      },
      std::get<Lhs>(rhs));
}

std::optional<Value> Machine::ser_value(
    const Heap& heap, const Value& v, uint64_t& next_ptr, Heap& ext,
    std::unordered_map<uint64_t, Location>& memo) const {
  const Location* l = as_loc(v);
  if (!l) return v;
  if (auto it = memo.find(l->ptr); it != memo.end()) return Value{it->second};
  const MemoryBlock* b = heap.get(*l);
  if (!b) return std::nullopt;
  Location fresh{next_ptr++, l->ann};
  memo.emplace(l->ptr, fresh);  // before recursing, so cycles close
  MemoryBlock copy = *b;
  if (Object* o = std::get_if<Object>(&copy)) {
    o->acquired.reset();
    o->m_cnt = 0;
    for (Value& fv : o->fields) {
      auto r = ser_value(heap, fv, next_ptr, ext, memo);
      if (!r) return std::nullopt;
      fv = *r;
    }
  } else if (ArrayBlk* a = std::get_if<ArrayBlk>(&copy)) {
    for (Value& ev : a->elems) {
      auto r = ser_value(heap, ev, next_ptr, ext, memo);
      if (!r) return std::nullopt;
      ev = *r;
    }
  } else {
    for (auto& [k, xv] : std::get<IntentBlk>(copy).extras) {
      auto r = ser_value(heap, xv, next_ptr, ext, memo);
      if (!r) return std::nullopt;
      xv = *r;
    }
  }
  ext.put(fresh, std::move(copy));
  return Value{fresh};
}

std::optional<Value> Machine::serialize(const Heap& heap, const Value& v,
                                        uint64_t& next_ptr, Heap& ext) const {
  std::unordered_map<uint64_t, Location> memo;
  return ser_value(heap, v, next_ptr, ext, memo);
}

Taint Machine::taint_of(const Heap& heap, const Value& v) const {
  Taint acc = Taint::Public;
  std::vector<const Value*> work{&v};
  std::unordered_set<uint64_t> seen;
  while (!work.empty()) {
    const Value* cur = work.back();
    work.pop_back();
    if (const Prim* p = as_prim(*cur)) {
      acc = join(acc, p->taint);
      continue;
    }
    const Location& l = std::get<Location>(*cur);
    if (!seen.insert(l.ptr).second) continue;
    const MemoryBlock* b = heap.get(l);
    if (!b) continue;
    if (const Object* o = std::get_if<Object>(b))
      for (const Value& fv : o->fields) work.push_back(&fv);
    else if (const ArrayBlk* a = std::get_if<ArrayBlk>(b))
      for (const Value& ev : a->elems) work.push_back(&ev);
    else
      for (const auto& [k, xv] : std::get<IntentBlk>(*b).extras)
        work.push_back(&xv);
  }
  return acc;
}

std::vector<LocalStep> Machine::step_local(const LocalConfig& lc) const {
  std::vector<LocalStep> out;
  if (lc.stack.frames.empty()) return out;
  const Program& p = program();
  const Frame& f = lc.stack.top();
  const MethodDef& m = p.method(f.pp);

  auto push = [&](const char* rule, LocalConfig&& n) {
    out.push_back({rule, std::move(n)});
  };
  auto checked = [&]() -> std::vector<LocalStep> {
#ifndef NDEBUG
    for (const LocalStep& s : out)
      if (auto err = wf_violation(s.next)) {
        fprintf(stderr, "step_local(%s) broke well-formedness: %s\n", s.rule,
                err->c_str());
        abort();
      }
#endif
    return std::move(out);
  };

  // Pending exception: resume at a handler or unwind one frame.
  if (lc.stack.status == StackStatus::Abnormal) {
    const Location* exc = as_loc(f.regs[m.excpt_reg()]);
    const Object* o = exc ? lc.heap.object(*exc) : nullptr;
    if (!o) return checked();
    if (auto pc = hier_->excpt_handler(f.pp, p.cls(o->cls).name)) {
      LocalConfig n = lc;
      n.stack.status = StackStatus::Normal;
      n.stack.top().pp.pc = *pc;
      push("R-Caught", std::move(n));
    } else if (lc.stack.frames.size() > 1) {
      LocalConfig n = lc;
      Location l = *exc;
      n.stack.frames.pop_back();
      Frame& t = n.stack.top();
      t.regs[p.method(t.pp).excpt_reg()] = l;
      push("R-UnCaught", std::move(n));
    }
    return checked();
  }

  // Parked on a wait: resume once the monitor is free, unless interrupted.
  if (lc.stack.status == StackStatus::Waiting) {
    const Object* owner = lc.heap.object(lc.owner);
    auto islot = owner ? hier_->field_slot(owner->cls, f_inte_) : std::nullopt;
    const bool* inte = islot ? as_bool(owner->fields[*islot]) : nullptr;
    if (!inte) return checked();
    if (*inte) {
      LocalConfig n = lc;
      Location exc{n.next_ptr++, ann_pp(f.pp)};
      n.heap.put(exc, new_object(hier_->class_id(hier_->sym_intexcpt())));
      n.heap.object(n.owner)->fields[*islot] = make_bool(false);
      n.stack.status = StackStatus::Abnormal;
      n.stack.wait_count = 0;
      n.stack.top().regs[m.excpt_reg()] = exc;
      push("R-InterruptWait", std::move(n));
    } else if (const Object* mon = lc.heap.object(lc.stack.wait_lock);
               mon && mon->m_cnt == 0) {
      LocalConfig n = lc;
      Object* mo = n.heap.object(n.stack.wait_lock);
      mo->acquired = n.owner;
      mo->m_cnt = n.stack.wait_count;
      n.stack.status = StackStatus::Normal;
      n.stack.wait_count = 0;
      n.stack.top().pp.pc += 1;
      push("R-StopWait", std::move(n));
    }
    return checked();
  }

  if (f.pp.pc >= m.body.size()) return checked();

  auto next_at = [&](uint32_t pc) {
    LocalConfig n = lc;
    n.stack.top().pp.pc = pc;
    return n;
  };
  auto advance = [&] { return next_at(f.pp.pc + 1); };
  auto R = [&](Reg r) -> const Value& { return f.regs[m.resolve(r)]; };
  auto set_reg = [&](LocalConfig& n, Reg r, Value v) {
    n.stack.top().regs[m.resolve(r)] = std::move(v);
  };
  // The running activity/thread object, for the interrupt-sensitive rules.
  auto owner_inte = [&]() -> const bool* {
    const Object* o = lc.heap.object(lc.owner);
    auto slot = o ? hier_->field_slot(o->cls, f_inte_) : std::nullopt;
    return slot ? as_bool(o->fields[*slot]) : nullptr;
  };
  auto clear_owner_inte = [&](LocalConfig& n) {
    Object* o = n.heap.object(n.owner);
    o->fields[*hier_->field_slot(o->cls, f_inte_)] = make_bool(false);
  };

  std::visit(
      overloaded{
          [&](const StGoto& s) { push("R-Goto", next_at(s.target)); },
          [&](const StIf& s) {
            auto r = compare(s.op, R(s.a), R(s.b));
            if (!r) return;
            if (*r)
              push("R-True", next_at(s.target));
            else
              push("R-False", advance());
          },
          [&](const StMove& s) {
            std::optional<Value> w = eval_rhs(lc, s.rhs);
            if (!w) return;
            std::visit(
                overloaded{
                    [&](const LhsReg& d) {
                      LocalConfig n = advance();
                      set_reg(n, d.r, std::move(*w));
                      push("R-MoveReg", std::move(n));
                    },
                    [&](const LhsField& d) {
                      const Location* l = as_loc(R(d.obj));
                      const Object* o = l ? lc.heap.object(*l) : nullptr;
                      auto slot =
                          o ? hier_->field_slot(o->cls, d.field) : std::nullopt;
                      if (!slot) return;
                      LocalConfig n = advance();
                      n.heap.object(*l)->fields[*slot] = std::move(*w);
                      push("R-MoveFld", std::move(n));
                    },
                    [&](const LhsArray& d) {
                      const Location* l = as_loc(R(d.arr));
                      const MemoryBlock* b = l ? lc.heap.get(*l) : nullptr;
                      const ArrayBlk* a = b ? std::get_if<ArrayBlk>(b) : nullptr;
                      if (!a) return;
                      const int64_t* j = as_int(R(d.idx));
                      if (!j || *j < 0 ||
                          *j >= static_cast<int64_t>(a->elems.size()))
                        return;
                      // Covariant store check against the element type.
                      if (!value_type_leq(lc.heap, *w, a->elem)) return;
                      LocalConfig n = advance();
                      std::get<ArrayBlk>(*n.heap.get(*l))
                          .elems[static_cast<size_t>(*j)] = std::move(*w);
                      push("R-MoveArr", std::move(n));
                    },
                    [&](const LhsStatic& d) {
                      auto it = p.class_ids.find(d.cls);
                      if (it == p.class_ids.end()) return;
                      LocalConfig n = advance();
                      n.statics.vals.insert_or_assign(
                          StaticHeap::key(it->second, d.field), std::move(*w));
                      push("R-MoveSFld", std::move(n));
                    },
                },
                s.lhs);
          },
          [&](const StUnOp& s) {
            const Prim* v = as_prim(R(s.src));
            if (!v) return;
            LocalConfig n = advance();
            if (s.op == UnOp::Neg) {
              const int64_t* i = std::get_if<int64_t>(&v->v);
              if (!i) return;
              set_reg(n, s.dst, make_int(sat(-static_cast<__int128>(*i)),
                                         v->taint));
            } else {
              const bool* b = std::get_if<bool>(&v->v);
              if (!b) return;
              set_reg(n, s.dst, make_bool(!*b, v->taint));
            }
            push("R-UnOp", std::move(n));
          },
          [&](const StBinOp& s) {
            const Prim* a = as_prim(R(s.a));
            const Prim* b = as_prim(R(s.b));
            if (!a || !b) return;
            Taint t = join(a->taint, b->taint);
            Value res;
            if (s.op == BinOp::And || s.op == BinOp::Or ||
                s.op == BinOp::Xor) {
              const bool* x = std::get_if<bool>(&a->v);
              const bool* y = std::get_if<bool>(&b->v);
              if (!x || !y) return;
              bool r = s.op == BinOp::And   ? (*x && *y)
                       : s.op == BinOp::Or  ? (*x || *y)
                                            : (*x != *y);
              res = make_bool(r, t);
            } else {
              const int64_t* x = std::get_if<int64_t>(&a->v);
              const int64_t* y = std::get_if<int64_t>(&b->v);
              if (!x || !y) return;
              auto r = arith(s.op, *x, *y);
              if (!r) return;  // division by zero is stuck
              res = make_int(*r, t);
            }
            LocalConfig n = advance();
            set_reg(n, s.dst, std::move(res));
            push("R-BinOp", std::move(n));
          },
          [&](const StNew& s) {
            LocalConfig n = advance();
            Location l{n.next_ptr++, ann_pp(f.pp)};
            n.heap.put(l, new_object(hier_->class_id(s.cls)));
            set_reg(n, s.dst, l);
            push("R-NewObj", std::move(n));
          },
          [&](const StNewArray& s) {
            const int64_t* len = as_int(R(s.len));
            if (!len || *len < 0 || *len > 65535) return;
            LocalConfig n = advance();
            Location l{n.next_ptr++, ann_pp(f.pp)};
            std::vector<Value> elems(static_cast<size_t>(*len),
                                     default_value(p, s.elem));
            n.heap.put(l, ArrayBlk{s.elem, std::move(elems)});
            set_reg(n, s.dst, l);
            push("R-NewArr", std::move(n));
          },
          [&](const StNewIntent& s) {
            LocalConfig n = advance();
            Location l{n.next_ptr++, ann_pp(f.pp)};
            n.heap.put(l, IntentBlk{s.cls, {}});
            set_reg(n, s.dst, l);
            push("R-NewIntent", std::move(n));
          },
          [&](const StPutExtra& s) {
            const Location* l = as_loc(R(s.intent));
            const MemoryBlock* b = l ? lc.heap.get(*l) : nullptr;
            if (!b || !std::holds_alternative<IntentBlk>(*b)) return;
            const std::string* k = as_str(R(s.key));
            if (!k) return;
            LocalConfig n = advance();
            std::get<IntentBlk>(*n.heap.get(*l))
                .extras.insert_or_assign(*k, R(s.value));
            push("R-PutExtra", std::move(n));
          },
          [&](const StGetExtra& s) {
            const Location* l = as_loc(R(s.intent));
            const MemoryBlock* b = l ? lc.heap.get(*l) : nullptr;
            const IntentBlk* i = b ? std::get_if<IntentBlk>(b) : nullptr;
            if (!i) return;
            const std::string* k = as_str(R(s.key));
            if (!k) return;
            auto it = i->extras.find(*k);
            if (it == i->extras.end()) return;
            if (!value_type_leq(lc.heap, it->second, s.ty)) return;
            LocalConfig n = advance();
            n.stack.top().regs[m.res_reg()] = it->second;
            push("R-GetExtra", std::move(n));
          },
          [&](const StInvoke& s) {
            const Location* l = as_loc(R(s.obj));
            const Object* o = l ? lc.heap.object(*l) : nullptr;
            auto ref = o ? hier_->lookup(p.cls(o->cls).name, s.mth)
                         : std::nullopt;
            if (!ref) return;
            const MethodDef& callee = p.cls(ref->cls).methods[ref->mth];
            if (callee.is_static || callee.params.size() != s.args.size())
              return;
            Frame nf;
            nf.pp = {ref->cls, ref->mth, 0};
            nf.regs.assign(callee.reg_count(), make_int(0));
            nf.regs[callee.this_reg()] = *l;
            nf.ctx.push_back(*l);
            for (size_t j = 0; j < s.args.size(); ++j) {
              nf.regs[callee.param_reg(static_cast<uint32_t>(j))] =
                  R(s.args[j]);
              nf.ctx.push_back(R(s.args[j]));
            }
            LocalConfig n = lc;
            n.stack.frames.push_back(std::move(nf));
            push("R-Call", std::move(n));
          },
          [&](const StSInvoke& s) {
            auto ref = hier_->lookup(s.cls, s.mth);
            if (!ref) return;
            const MethodDef& callee = p.cls(ref->cls).methods[ref->mth];
            if (!callee.is_static || callee.params.size() != s.args.size())
              return;
            Frame nf;
            nf.pp = {ref->cls, ref->mth, 0};
            nf.regs.assign(callee.reg_count(), make_int(0));
            for (size_t j = 0; j < s.args.size(); ++j) {
              nf.regs[callee.param_reg(static_cast<uint32_t>(j))] =
                  R(s.args[j]);
              nf.ctx.push_back(R(s.args[j]));
            }
            LocalConfig n = lc;
            n.stack.frames.push_back(std::move(nf));
            push("R-SCall", std::move(n));
          },
          [&](const StReturn&) {
            if (lc.stack.frames.size() < 2) return;  // handled globally
            Value v = f.regs[m.res_reg()];
            // Values produced by a source method are secret at the boundary.
            if (cfg_->is_source(p.cls(f.pp.cls).name, m.name))
              if (Prim* pv = std::get_if<Prim>(&v)) pv->taint = Taint::Secret;
            LocalConfig n = lc;
            n.stack.frames.pop_back();
            Frame& t = n.stack.top();
            t.regs[p.method(t.pp).res_reg()] = std::move(v);
            t.pp.pc += 1;
            push("R-Return", std::move(n));
          },
          [&](const StThrow& s) {
            const Location* l = as_loc(R(s.src));
            const Object* o = l ? lc.heap.object(*l) : nullptr;
            if (!o || !hier_->is_throwable(p.cls(o->cls).name)) return;
            LocalConfig n = lc;
            n.stack.status = StackStatus::Abnormal;
            n.stack.top().regs[m.excpt_reg()] = *l;
            push("R-Throw", std::move(n));
          },
          [&](const StMoveException& s) {
            LocalConfig n = advance();
            set_reg(n, s.dst, f.regs[m.excpt_reg()]);
            push("R-MoveException", std::move(n));
          },
          [&](const StCheckCast& s) {
            if (!as_loc(R(s.src)) || !value_type_leq(lc.heap, R(s.src), s.ty))
              return;
            push("R-Cast", advance());
          },
          [&](const StInstanceOf& s) {
            if (!as_loc(R(s.src))) return;
            bool ok = value_type_leq(lc.heap, R(s.src), s.ty);
            LocalConfig n = advance();
            set_reg(n, s.dst, make_bool(ok));
            push(ok ? "R-InstOfTrue" : "R-InstOfFalse", std::move(n));
          },
          [&](const StMonitorEnter& s) {
            const Location* l = as_loc(R(s.obj));
            const Object* o = l ? lc.heap.object(*l) : nullptr;
            if (!o) return;
            if (o->m_cnt == 0) {
              LocalConfig n = advance();
              Object* no = n.heap.object(*l);
              no->acquired = lc.owner;
              no->m_cnt = 1;
              push("R-MonitorEnter1", std::move(n));
            } else if (o->acquired && *o->acquired == lc.owner) {
              LocalConfig n = advance();
              n.heap.object(*l)->m_cnt += 1;
              push("R-MonitorEnter2", std::move(n));
            }
          },
          [&](const StMonitorExit& s) {
            const Location* l = as_loc(R(s.obj));
            const Object* o = l ? lc.heap.object(*l) : nullptr;
            if (!o || !o->acquired || !(*o->acquired == lc.owner) ||
                o->m_cnt <= 0)
              return;
            LocalConfig n = advance();
            n.heap.object(*l)->m_cnt -= 1;
            push("R-MonitorExit", std::move(n));
          },
          [&](const StStartThread& s) {
            const Location* l = as_loc(R(s.obj));
            const Object* o = l ? lc.heap.object(*l) : nullptr;
            if (!o || !hier_->is_thread_class(p.cls(o->cls).name)) return;
            LocalConfig n = advance();
            n.pending_threads.insert(n.pending_threads.begin(), *l);
            push("R-StartThread", std::move(n));
          },
          [&](const StInterrupt& s) {
            const Location* l = as_loc(R(s.obj));
            const Object* o = l ? lc.heap.object(*l) : nullptr;
            auto slot = o ? hier_->field_slot(o->cls, f_inte_) : std::nullopt;
            if (!slot) return;
            LocalConfig n = advance();
            n.heap.object(*l)->fields[*slot] = make_bool(true);
            push("R-InterruptThread", std::move(n));
          },
          [&](const StInterrupted& s) {
            const Location* l = as_loc(R(s.obj));
            const Object* o = l ? lc.heap.object(*l) : nullptr;
            auto slot = o ? hier_->field_slot(o->cls, f_inte_) : std::nullopt;
            if (!slot || !as_bool(o->fields[*slot])) return;
            LocalConfig n = advance();
            Object* no = n.heap.object(*l);
            n.stack.top().regs[m.res_reg()] = no->fields[*slot];
            no->fields[*slot] = make_bool(false);
            push("R-InterruptedThread", std::move(n));
          },
          [&](const StIsInterrupted& s) {
            const Location* l = as_loc(R(s.obj));
            const Object* o = l ? lc.heap.object(*l) : nullptr;
            auto slot = o ? hier_->field_slot(o->cls, f_inte_) : std::nullopt;
            if (!slot || !as_bool(o->fields[*slot])) return;
            LocalConfig n = advance();
            n.stack.top().regs[m.res_reg()] = o->fields[*slot];
            push("R-IsInterruptedThread", std::move(n));
          },
          [&](const StJoin& s) {
            const Location* l = as_loc(R(s.obj));
            const Object* o = l ? lc.heap.object(*l) : nullptr;
            if (!o || !hier_->is_thread_class(p.cls(o->cls).name)) return;
            const bool* inte = owner_inte();
            if (!inte) return;
            if (*inte) {
              LocalConfig n = lc;
              Location exc{n.next_ptr++, ann_pp(f.pp)};
              n.heap.put(exc,
                         new_object(hier_->class_id(hier_->sym_intexcpt())));
              clear_owner_inte(n);
              n.stack.status = StackStatus::Abnormal;
              n.stack.top().regs[m.excpt_reg()] = exc;
              push("R-InterruptJoin", std::move(n));
            } else {
              auto fslot = hier_->field_slot(o->cls, f_finished_);
              const bool* fin = fslot ? as_bool(o->fields[*fslot]) : nullptr;
              if (fin && *fin) push("R-JoinThread", advance());
            }
          },
          [&](const StWait& s) {
            const Location* l = as_loc(R(s.obj));
            const Object* o = l ? lc.heap.object(*l) : nullptr;
            if (!o || !o->acquired || !(*o->acquired == lc.owner) ||
                o->m_cnt <= 0)
              return;
            LocalConfig n = lc;
            Object* no = n.heap.object(*l);
            n.stack.wait_count = no->m_cnt;
            no->m_cnt = 0;
            n.stack.status = StackStatus::Waiting;
            n.stack.wait_lock = *l;
            push("R-StartWait", std::move(n));
          },
          [&](const StStartActivity& s) {
            const Location* l = as_loc(R(s.intent));
            const MemoryBlock* b = l ? lc.heap.get(*l) : nullptr;
            const IntentBlk* i = b ? std::get_if<IntentBlk>(b) : nullptr;
            if (!i) return;
            LocalConfig n = advance();
            n.pending_acts.insert(n.pending_acts.begin(), *i);
            push("R-StartAct", std::move(n));
          },
      },
      m.body[f.pp.pc]);
  return checked();
}

}  // namespace fstaint::concrete
