#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "doctest.h"
#include "fstaint/concrete/machine.hpp"

using namespace fstaint::frontend;
using namespace fstaint::concrete;

namespace {

std::string read_corpus(const std::string& name) {
  const char* dir = std::getenv("FSTAINT_CORPUS");
  REQUIRE(dir != nullptr);
  std::ifstream in(std::string(dir) + "/" + name);
  REQUIRE(in.good());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// A parsed program plus everything the machine needs, with stable addresses.
struct Rig {
  Program p;
  Hierarchy h;
  AnalysisConfig cfg;
  Machine m;

  explicit Rig(std::string_view text, std::string_view ss = "")
      : p(parse_program(text)),
        h(p),
        cfg(ss.empty() ? AnalysisConfig{} : parse_config(p, ss, "ss")),
        m(h, cfg) {}

  Sym sym(const std::string& s) const {
    auto v = p.find_sym(s);
    REQUIRE(v.has_value());
    return *v;
  }
  uint32_t cid(const std::string& s) const { return h.class_id(sym(s)); }
  const MethodDef& method(const std::string& c, const std::string& mth) const {
    auto ref = h.lookup(sym(c), sym(mth));
    REQUIRE(ref.has_value());
    return p.cls(ref->cls).methods[ref->mth];
  }
};

Object blank_object(const Rig& r, uint32_t cid) {
  Object o;
  o.cls = cid;
  for (const FieldDef& fd : r.h.fields_of(cid))
    o.fields.push_back(default_value(r.p, fd.ty));
  return o;
}

// Owner object of class `cls` running `mth` from pc 0; locals and argument
// registers hold their defaults, callers overwrite what they need.
LocalConfig make_lc(const Rig& r, const std::string& cls,
                    const std::string& mth) {
  Sym cs = r.sym(cls);
  auto ref = r.h.lookup(cs, r.sym(mth));
  REQUIRE(ref.has_value());
  const MethodDef& m = r.p.cls(ref->cls).methods[ref->mth];

  LocalConfig lc;
  Location own{lc.next_ptr++, ann_cls(cs)};
  lc.heap.put(own, blank_object(r, r.cid(cls)));
  lc.owner = own;

  Frame f;
  f.pp = {ref->cls, ref->mth, 0};
  f.regs.assign(m.reg_count(), make_int(0));
  if (!m.is_static) {
    f.regs[m.this_reg()] = own;
    f.ctx.push_back(own);
  }
  for (uint32_t j = 0; j < m.params.size(); ++j) {
    f.regs[m.param_reg(j)] = default_value(r.p, m.params[j]);
    f.ctx.push_back(f.regs[m.param_reg(j)]);
  }
  lc.stack.frames.push_back(std::move(f));
  return lc;
}

// The unique applicable local step, which must carry the given rule name.
LocalConfig step1(const Rig& r, const LocalConfig& lc,
                  const std::string& rule) {
  auto steps = r.m.step_local(lc);
  {
    INFO("expected exactly one step for " << rule);
    REQUIRE(steps.size() == 1);
  }
  CHECK(steps[0].rule == rule);
  return std::move(steps[0].next);
}

// Follows `rules` through step_global, taking the first step matching each
// name in turn.
Configuration drive(const Rig& r, Configuration c,
                    const std::vector<std::string>& rules) {
  for (const std::string& want : rules) {
    auto steps = r.m.step_global(c);
    bool found = false;
    for (GlobalStep& gs : steps) {
      if (want == gs.rule) {
        c = std::move(gs.next);
        found = true;
        break;
      }
    }
    INFO("no step named " << want);
    REQUIRE(found);
  }
  return c;
}

std::optional<GlobalStep> find_step(const Rig& r, const Configuration& c,
                                    const std::string& rule) {
  for (GlobalStep& gs : r.m.step_global(c))
    if (rule == gs.rule) return std::move(gs);
  return std::nullopt;
}

uint32_t slot(const Rig& r, uint32_t cid, const std::string& f) {
  auto s = r.h.field_slot(cid, r.sym(f));
  REQUIRE(s.has_value());
  return *s;
}

const Value& field_of(const Rig& r, const Heap& h, const Location& l,
                      const std::string& f) {
  const Object* o = h.object(l);
  REQUIRE(o != nullptr);
  return o->fields[slot(r, o->cls, f)];
}

void set_field(const Rig& r, Heap& h, const Location& l, const std::string& f,
               Value v) {
  Object* o = h.object(l);
  REQUIRE(o != nullptr);
  o->fields[slot(r, o->cls, f)] = std::move(v);
}

// Structural isomorphism of two heap values: primitives must agree exactly,
// locations up to a consistently extended ptr bijection (annotations and
// block shapes included, monitor state deliberately ignored).
bool iso(const Heap& ha, const Value& va, const Heap& hb, const Value& vb,
         std::map<uint64_t, uint64_t>& bij) {
  const Prim* pa = as_prim(va);
  const Prim* pb = as_prim(vb);
  if (pa || pb) return pa && pb && *pa == *pb;
  const Location* la = as_loc(va);
  const Location* lb = as_loc(vb);
  if (!(la->ann == lb->ann)) return false;
  if (auto it = bij.find(la->ptr); it != bij.end())
    return it->second == lb->ptr;
  bij.emplace(la->ptr, lb->ptr);
  const MemoryBlock* ba = ha.get(*la);
  const MemoryBlock* bb = hb.get(*lb);
  if (!ba || !bb || ba->index() != bb->index()) return false;
  if (const Object* oa = std::get_if<Object>(ba)) {
    const Object& ob = std::get<Object>(*bb);
    if (oa->cls != ob.cls || oa->fields.size() != ob.fields.size())
      return false;
    for (size_t i = 0; i < oa->fields.size(); ++i)
      if (!iso(ha, oa->fields[i], hb, ob.fields[i], bij)) return false;
    return true;
  }
  if (const ArrayBlk* aa = std::get_if<ArrayBlk>(ba)) {
    const ArrayBlk& ab = std::get<ArrayBlk>(*bb);
    if (aa->elem != ab.elem || aa->elems.size() != ab.elems.size())
      return false;
    for (size_t i = 0; i < aa->elems.size(); ++i)
      if (!iso(ha, aa->elems[i], hb, ab.elems[i], bij)) return false;
    return true;
  }
  const IntentBlk& ia = std::get<IntentBlk>(*ba);
  const IntentBlk& ib = std::get<IntentBlk>(*bb);
  if (ia.target != ib.target || ia.extras.size() != ib.extras.size())
    return false;
  auto itb = ib.extras.begin();
  for (auto ita = ia.extras.begin(); ita != ia.extras.end(); ++ita, ++itb) {
    if (ita->first != itb->first) return false;
    if (!iso(ha, ita->second, hb, itb->second, bij)) return false;
  }
  return true;
}

// Reference taint: join of primitive taints reachable within `depth` hops.
// On an all-public cycle this converges regardless of the cut-off.
Taint taint_oracle(const Heap& h, const Value& v, int depth) {
  if (const Prim* p = as_prim(v)) return p->taint;
  if (depth == 0) return Taint::Public;
  const MemoryBlock* b = h.get(*as_loc(v));
  if (!b) return Taint::Public;
  Taint t = Taint::Public;
  auto sub = [&](const Value& w) {
    if (t != Taint::Secret) t = join(t, taint_oracle(h, w, depth - 1));
  };
  if (const Object* o = std::get_if<Object>(b))
    for (const Value& w : o->fields) sub(w);
  if (const ArrayBlk* a = std::get_if<ArrayBlk>(b))
    for (const Value& w : a->elems) sub(w);
  if (const IntentBlk* i = std::get_if<IntentBlk>(b))
    for (const auto& [k, w] : i->extras) sub(w);
  return t;
}

constexpr int64_t kMax = std::numeric_limits<int64_t>::max();
constexpr int64_t kMin = std::numeric_limits<int64_t>::min();

}  // namespace

// ---------------------------------------------------------------------------
// Right-hand sides and plain statements

static const char* kScratch = R"(
.class T extends Thread
.field x int
.field static sx int

.method m () void locals 2
  move r0 5
  move r0 "hi"
  move r0 null
  move r0 true
  move r1 r2.x
  move r0 T.sx
  return
.end method

.method g () void locals 0
  goto 2
  return
  return
.end method

.method c () void locals 2
  if r0 eq r1 goto 3
  return
  return
  return
.end method

.method l () void locals 2
  if r0 lt r1 goto 3
  return
  return
  return
.end method

.method ops () void locals 3
  add r0 r1 r2
  sub r0 r1 r2
  mul r0 r1 r2
  div r0 r1 r2
  rem r0 r1 r2
  neg r0 r1
  not r0 r1
  and r0 r1 r2
  return
.end method

.method statics () void locals 1
  move r0 11
  move T.sx r0
  move r0 T.sx
  return
.end method
.end class
)";

TEST_CASE("rhs evaluation covers constants, registers, fields and statics") {
  Rig r(kScratch);
  LocalConfig lc = make_lc(r, "T", "m");
  auto ref = *r.h.lookup(r.sym("T"), r.sym("m"));
  const auto& body = r.p.cls(ref.cls).methods[ref.mth].body;
  auto rhs = [&](size_t i) { return std::get<StMove>(body[i]).rhs; };

  CHECK(*as_int(*r.m.eval_rhs(lc, rhs(0))) == 5);
  CHECK(*as_str(*r.m.eval_rhs(lc, rhs(1))) == "hi");
  CHECK(is_null(*r.m.eval_rhs(lc, rhs(2))));
  CHECK(*as_bool(*r.m.eval_rhs(lc, rhs(3))) == true);
  CHECK(*as_int(*r.m.eval_rhs(lc, rhs(4))) == 0);  // fresh field default
  CHECK(*as_int(*r.m.eval_rhs(lc, rhs(5))) == 0);  // unseeded static default

  // Field reads preserve the stored taint.
  set_field(r, lc.heap, lc.owner, "x", make_int(42, Taint::Secret));
  const Value v = *r.m.eval_rhs(lc, rhs(4));
  CHECK(*as_int(v) == 42);
  CHECK(as_prim(v)->taint == Taint::Secret);

  // A field read off a non-pointer register is stuck.
  lc.stack.top().regs[2] = make_int(0);
  CHECK(!r.m.eval_rhs(lc, rhs(4)).has_value());
}

TEST_CASE("goto jumps to its target") {
  Rig r(kScratch);
  LocalConfig n = step1(r, make_lc(r, "T", "g"), "R-Goto");
  CHECK(n.stack.top().pp.pc == 2);
}

TEST_CASE("comparisons decide branches and refuse mixed kinds") {
  Rig r(kScratch);

  LocalConfig lc = make_lc(r, "T", "c");
  CHECK(step1(r, lc, "R-True").stack.top().pp.pc == 3);  // 0 == 0

  lc.stack.top().regs[1] = make_int(1);
  CHECK(step1(r, lc, "R-False").stack.top().pp.pc == 1);

  lc.stack.top().regs[1] = make_str("x");  // int vs string: stuck
  CHECK(r.m.step_local(lc).empty());

  // eq on a location and null is defined and false.
  lc.stack.top().regs[0] = lc.owner;
  lc.stack.top().regs[1] = make_null();
  CHECK(step1(r, lc, "R-False").stack.top().pp.pc == 1);

  // Ordering exists only on integers.
  LocalConfig lt = make_lc(r, "T", "l");
  lt.stack.top().regs[0] = make_int(2);
  lt.stack.top().regs[1] = make_int(3);
  CHECK(step1(r, lt, "R-True").stack.top().pp.pc == 3);
  lt.stack.top().regs[0] = make_str("a");
  lt.stack.top().regs[1] = make_str("b");
  CHECK(r.m.step_local(lt).empty());
}

TEST_CASE("integer arithmetic saturates at the 64-bit bounds") {
  Rig r(kScratch);
  auto bin = [&](uint32_t pc, Value a, Value b) -> std::optional<Value> {
    LocalConfig lc = make_lc(r, "T", "ops");
    lc.stack.top().pp.pc = pc;
    lc.stack.top().regs[1] = std::move(a);
    lc.stack.top().regs[2] = std::move(b);
    auto steps = r.m.step_local(lc);
    if (steps.empty()) return std::nullopt;
    REQUIRE(steps.size() == 1);
    return steps[0].next.stack.top().regs[0];
  };

  CHECK(*as_int(*bin(0, make_int(kMax), make_int(1))) == kMax);
  CHECK(*as_int(*bin(1, make_int(kMin), make_int(1))) == kMin);
  CHECK(*as_int(*bin(2, make_int(kMin), make_int(-1))) == kMax);
  CHECK(*as_int(*bin(3, make_int(kMin), make_int(-1))) == kMax);
  CHECK(*as_int(*bin(4, make_int(kMin), make_int(-1))) == 0);
  CHECK(*as_int(*bin(3, make_int(-7), make_int(2))) == -3);
  CHECK(*as_int(*bin(4, make_int(-7), make_int(2))) == -1);
  // Largest product below the saturation point stays exact.
  CHECK(*as_int(*bin(2, make_int(3037000499), make_int(3037000499))) ==
        9223372030926249001LL);

  // Division and remainder by zero are stuck, not crashes.
  CHECK(!bin(3, make_int(1), make_int(0)).has_value());
  CHECK(!bin(4, make_int(1), make_int(0)).has_value());

  // Taint joins across operands.
  CHECK(as_prim(*bin(0, make_int(1, Taint::Secret), make_int(2)))->taint ==
        Taint::Secret);

  // neg saturates too; not and the bitwise trio are boolean-only.
  CHECK(*as_int(*bin(5, make_int(kMin), make_int(0))) == kMax);
  CHECK(*as_bool(*bin(6, make_bool(true), make_int(0))) == false);
  CHECK(*as_bool(*bin(7, make_bool(true), make_bool(false))) == false);
  CHECK(!bin(7, make_int(1), make_int(2)).has_value());
}

TEST_CASE("static fields round-trip through the shared store") {
  Rig r(kScratch);
  LocalConfig lc = make_lc(r, "T", "statics");
  lc = step1(r, lc, "R-MoveReg");
  lc = step1(r, lc, "R-MoveSFld");
  CHECK(*as_int(lc.statics.vals.at(
            StaticHeap::key(r.cid("T"), r.sym("sx")))) == 11);
  lc = step1(r, lc, "R-MoveReg");
  CHECK(*as_int(lc.stack.top().regs[0]) == 11);
}

// ---------------------------------------------------------------------------
// Calls, returns, sources

static const char* kCalls = R"(
.class T extends Thread
.method src () String locals 0
  move ret "id"
  return
.end method

.method other () String locals 0
  move ret "id"
  return
.end method

.method use () void locals 0
  invoke r0 src
  return
.end method

.method use2 () void locals 0
  invoke r0 other
  return
.end method

.method static helper (int) int locals 1
  move ret r1
  return
.end method

.method uses () void locals 1
  move r0 9
  sinvoke T helper r0
  move r0 ret
  return
.end method
.end class
)";

TEST_CASE("calls push frames and returns mark source results secret") {
  Rig r(kCalls, "T src source\n");

  LocalConfig lc = make_lc(r, "T", "use");
  lc = step1(r, lc, "R-Call");
  REQUIRE(lc.stack.frames.size() == 2);
  const MethodDef& src = r.method("T", "src");
  CHECK(lc.stack.top().pp.pc == 0);
  CHECK(lc.stack.top().regs.size() == src.reg_count());
  CHECK(as_loc(lc.stack.top().regs[src.this_reg()])->ptr == lc.owner.ptr);
  REQUIRE(lc.stack.top().ctx.size() == 1);  // receiver, no arguments
  CHECK(as_loc(lc.stack.top().ctx[0])->ptr == lc.owner.ptr);

  lc = step1(r, lc, "R-MoveReg");
  lc = step1(r, lc, "R-Return");
  REQUIRE(lc.stack.frames.size() == 1);
  const MethodDef& use = r.method("T", "use");
  const Value& res = lc.stack.top().regs[use.res_reg()];
  CHECK(*as_str(res) == "id");
  CHECK(as_prim(res)->taint == Taint::Secret);  // src is a declared source
  CHECK(lc.stack.top().pp.pc == 1);

  // The same body returning from a non-source keeps the value public.
  LocalConfig lp = make_lc(r, "T", "use2");
  lp = step1(r, lp, "R-Call");
  lp = step1(r, lp, "R-MoveReg");
  lp = step1(r, lp, "R-Return");
  CHECK(as_prim(lp.stack.top().regs[use.res_reg()])->taint == Taint::Public);
}

TEST_CASE("static calls carry arguments without a receiver") {
  Rig r(kCalls);
  LocalConfig lc = make_lc(r, "T", "uses");
  lc = step1(r, lc, "R-MoveReg");
  lc = step1(r, lc, "R-SCall");
  REQUIRE(lc.stack.frames.size() == 2);
  const MethodDef& helper = r.method("T", "helper");
  CHECK(helper.is_static);
  CHECK(lc.stack.top().regs.size() == helper.reg_count());
  CHECK(*as_int(lc.stack.top().regs[helper.param_reg(0)]) == 9);
  REQUIRE(lc.stack.top().ctx.size() == 1);  // arguments only
  CHECK(*as_int(lc.stack.top().ctx[0]) == 9);

  lc = step1(r, lc, "R-MoveReg");
  lc = step1(r, lc, "R-Return");
  lc = step1(r, lc, "R-MoveReg");
  CHECK(*as_int(lc.stack.top().regs[0]) == 9);
}

// ---------------------------------------------------------------------------
// Exceptions

static const char* kThrows = R"(
.class E extends Throwable
.end class

.class T extends Thread
.method m () void locals 2
  new r0 E
  throw r0
  return
  moveexception r1
  return
.catch E from 1 to 1 using 3
.end method

.method callee () void locals 1
  new r0 E
  throw r0
  return
.end method

.method caller () void locals 0
  invoke r0 callee
  return
.end method
.end class
)";

TEST_CASE("thrown exceptions reach their handler") {
  Rig r(kThrows);
  const MethodDef& m = r.method("T", "m");

  LocalConfig lc = make_lc(r, "T", "m");
  lc = step1(r, lc, "R-NewObj");
  const Location exc = *as_loc(lc.stack.top().regs[0]);
  CHECK(exc.ann.kind == AnnKind::Pp);
  CHECK(exc.ann.pp.pc == 0);
  CHECK(lc.heap.object(exc)->cls == r.cid("E"));

  lc = step1(r, lc, "R-Throw");
  CHECK(lc.stack.status == StackStatus::Abnormal);
  CHECK(lc.stack.top().pp.pc == 1);  // pc is unchanged while abnormal
  CHECK(as_loc(lc.stack.top().regs[m.excpt_reg()])->ptr == exc.ptr);

  lc = step1(r, lc, "R-Caught");
  CHECK(lc.stack.status == StackStatus::Normal);
  CHECK(lc.stack.top().pp.pc == 3);

  lc = step1(r, lc, "R-MoveException");
  CHECK(as_loc(lc.stack.top().regs[1])->ptr == exc.ptr);
  CHECK(lc.stack.top().pp.pc == 4);
}

TEST_CASE("uncaught exceptions unwind into the caller") {
  Rig r(kThrows);
  const MethodDef& caller = r.method("T", "caller");

  LocalConfig lc = make_lc(r, "T", "caller");
  lc = step1(r, lc, "R-Call");
  lc = step1(r, lc, "R-NewObj");
  const Location exc = *as_loc(lc.stack.top().regs[0]);
  lc = step1(r, lc, "R-Throw");
  lc = step1(r, lc, "R-UnCaught");
  REQUIRE(lc.stack.frames.size() == 1);
  CHECK(lc.stack.status == StackStatus::Abnormal);
  CHECK(as_loc(lc.stack.top().regs[caller.excpt_reg()])->ptr == exc.ptr);

  // No handler in the caller either: the stack is terminally abnormal.
  CHECK(r.m.step_local(lc).empty());
}

// ---------------------------------------------------------------------------
// Monitors, wait, join, interrupts

static const char* kSync = R"(
.class T extends Thread
.method w () void locals 0
  monitorenter r0
  monitorenter r0
  wait r0
  return
.end method

.method x () void locals 0
  monitorenter r0
  monitorexit r0
  monitorenter r0
  return
.end method

.method foreign (T) void locals 0
  monitorenter r1
  return
.end method

.method j (Thread) void locals 0
  join r1
  return
.end method
.end class
)";

TEST_CASE("monitors count recursively and wait round-trips") {
  Rig r(kSync);
  LocalConfig lc = make_lc(r, "T", "w");

  lc = step1(r, lc, "R-MonitorEnter1");
  CHECK(lc.heap.object(lc.owner)->m_cnt == 1);
  CHECK(lc.heap.object(lc.owner)->acquired->ptr == lc.owner.ptr);
  lc = step1(r, lc, "R-MonitorEnter2");
  CHECK(lc.heap.object(lc.owner)->m_cnt == 2);

  lc = step1(r, lc, "R-StartWait");
  CHECK(lc.stack.status == StackStatus::Waiting);
  CHECK(lc.stack.wait_lock.ptr == lc.owner.ptr);
  CHECK(lc.stack.wait_count == 2);
  CHECK(lc.heap.object(lc.owner)->m_cnt == 0);  // lock released
  CHECK(lc.stack.top().pp.pc == 2);

  // Wake up: the monitor is free, so the full count is re-acquired.
  LocalConfig woke = step1(r, lc, "R-StopWait");
  CHECK(woke.stack.status == StackStatus::Normal);
  CHECK(woke.stack.top().pp.pc == 3);
  CHECK(woke.heap.object(woke.owner)->m_cnt == 2);
  CHECK(woke.heap.object(woke.owner)->acquired->ptr == woke.owner.ptr);

  // Interrupted instead: fresh interrupt exception at the wait site.
  set_field(r, lc.heap, lc.owner, "inte", make_bool(true));
  auto steps = r.m.step_local(lc);
  bool saw = false;
  for (const LocalStep& s : steps) {
    if (std::string("R-InterruptWait") != s.rule) continue;
    saw = true;
    CHECK(s.next.stack.status == StackStatus::Abnormal);
    const MethodDef& w = r.method("T", "w");
    const Location* e = as_loc(s.next.stack.top().regs[w.excpt_reg()]);
    REQUIRE(e != nullptr);
    CHECK(e->ann.kind == AnnKind::Pp);
    CHECK(e->ann.pp.pc == 2);  // the wait statement
    CHECK(s.next.heap.object(*e)->cls == r.cid("IntExcpt"));
    CHECK(*as_bool(field_of(r, s.next.heap, s.next.owner, "inte")) == false);
  }
  CHECK(saw);
}

TEST_CASE("monitorexit keeps the stale holder and re-entry needs a free lock") {
  Rig r(kSync);
  LocalConfig lc = make_lc(r, "T", "x");
  lc = step1(r, lc, "R-MonitorEnter1");
  lc = step1(r, lc, "R-MonitorExit");
  CHECK(lc.heap.object(lc.owner)->m_cnt == 0);
  CHECK(lc.heap.object(lc.owner)->acquired.has_value());  // stale by design
  lc = step1(r, lc, "R-MonitorEnter1");
  CHECK(lc.heap.object(lc.owner)->m_cnt == 1);

  // A lock held by somebody else blocks the acquisition entirely.
  LocalConfig fo = make_lc(r, "T", "foreign");
  Location other{fo.next_ptr++, ann_cls(r.sym("T"))};
  fo.heap.put(other, blank_object(r, r.cid("T")));
  Location lock{fo.next_ptr++, ann_cls(r.sym("T"))};
  Object lo = blank_object(r, r.cid("T"));
  lo.acquired = other;
  lo.m_cnt = 1;
  fo.heap.put(lock, std::move(lo));
  fo.stack.top().regs[1] = lock;
  CHECK(r.m.step_local(fo).empty());
}

TEST_CASE("join honours interruption, completion and blocking") {
  Rig r(kSync);
  const MethodDef& j = r.method("T", "j");

  LocalConfig lc = make_lc(r, "T", "j");
  Location tgt{lc.next_ptr++, ann_cls(r.sym("T"))};
  lc.heap.put(tgt, blank_object(r, r.cid("T")));
  lc.stack.top().regs[1] = tgt;

  // The target is still running: join blocks.
  CHECK(r.m.step_local(lc).empty());

  // Finished target: join falls through.
  LocalConfig done = lc;
  set_field(r, done.heap, tgt, "finished", make_bool(true));
  CHECK(step1(r, done, "R-JoinThread").stack.top().pp.pc == 1);

  // Interrupted joiner: abnormal stack, fresh exception, flag cleared.
  LocalConfig intr = lc;
  set_field(r, intr.heap, intr.owner, "inte", make_bool(true));
  const uint64_t fresh = intr.next_ptr;
  LocalConfig n = step1(r, intr, "R-InterruptJoin");
  CHECK(n.stack.status == StackStatus::Abnormal);
  const Location* e = as_loc(n.stack.top().regs[j.excpt_reg()]);
  REQUIRE(e != nullptr);
  CHECK(e->ptr == fresh);
  CHECK(e->ann.kind == AnnKind::Pp);
  CHECK(e->ann.pp.pc == 0);  // the join statement
  CHECK(n.heap.object(*e)->cls == r.cid("IntExcpt"));
  CHECK(*as_bool(field_of(r, n.heap, n.owner, "inte")) == false);
  CHECK(n.next_ptr == fresh + 1);
}

// ---------------------------------------------------------------------------
// Arrays, intents, casts

static const char* kData = R"(
.class B extends Activity
.end class

.class T extends Thread
.method arr () void locals 4
  move r1 3
  newarray r0 r1 int
  move r2 7
  move r1 0
  move r0[r1] r2
  move r3 r0[r1]
  return
.end method

.method bad () void locals 3
  move r1 0
  newarray r0 r1 int
  move r0[r1] r2
  return
.end method

.method ns (Thread[]) void locals 2
  move r1 null
  move r0 0
  move r3[r0] r1
  return
.end method

.method extras () void locals 3
  newintent r0 B
  move r1 "k"
  move r2 5
  putextra r0 r1 r2
  getextra r0 r1 int
  return
.end method

.method extras2 () void locals 3
  newintent r0 B
  move r1 "k"
  move r2 "v"
  putextra r0 r1 r2
  getextra r0 r1 int
  return
.end method

.method casts (Thread) void locals 1
  instanceof r0 r2 Thread
  checkcast r2 Thread
  checkcast r2 IntExcpt
  return
.end method
.end class
)";

TEST_CASE("arrays allocate, store covariantly and read back") {
  Rig r(kData);
  LocalConfig lc = make_lc(r, "T", "arr");
  lc = step1(r, lc, "R-MoveReg");
  lc = step1(r, lc, "R-NewArr");
  const Location arr = *as_loc(lc.stack.top().regs[0]);
  CHECK(arr.ann.kind == AnnKind::Pp);
  {
    const ArrayBlk& a = std::get<ArrayBlk>(*lc.heap.get(arr));
    REQUIRE(a.elems.size() == 3);
    CHECK(*as_int(a.elems[0]) == 0);
  }
  lc = step1(r, lc, "R-MoveReg");
  lc = step1(r, lc, "R-MoveReg");
  lc = step1(r, lc, "R-MoveArr");
  CHECK(*as_int(std::get<ArrayBlk>(*lc.heap.get(arr)).elems[0]) == 7);
  lc = step1(r, lc, "R-MoveReg");
  CHECK(*as_int(lc.stack.top().regs[3]) == 7);

  // Out-of-bounds store on the empty array is stuck.
  LocalConfig b = make_lc(r, "T", "bad");
  b = step1(r, b, "R-MoveReg");
  b = step1(r, b, "R-NewArr");
  CHECK(r.m.step_local(b).empty());

  // Null can not be stored into an array cell.
  LocalConfig ns = make_lc(r, "T", "ns");
  Location cell{ns.next_ptr++, ann_cls(r.sym("T"))};
  {
    // The parameter is Thread[]; the block stores the element type.
    const TypeNode& tn = r.p.type(r.method("T", "ns").params[0]);
    REQUIRE(tn.kind == TypeKind::Array);
    ns.heap.put(cell, ArrayBlk{tn.elem, {make_null()}});
  }
  ns.stack.top().regs[3] = cell;
  ns = step1(r, ns, "R-MoveReg");
  ns = step1(r, ns, "R-MoveReg");
  CHECK(r.m.step_local(ns).empty());
}

TEST_CASE("intent extras are typed key-value pairs") {
  Rig r(kData);
  const MethodDef& extras = r.method("T", "extras");

  LocalConfig lc = make_lc(r, "T", "extras");
  lc = step1(r, lc, "R-NewIntent");
  const Location in = *as_loc(lc.stack.top().regs[0]);
  CHECK(in.ann.kind == AnnKind::Pp);  // allocated at the statement, not in(c)
  CHECK(std::get<IntentBlk>(*lc.heap.get(in)).target == r.sym("B"));

  lc = step1(r, lc, "R-MoveReg");
  lc = step1(r, lc, "R-MoveReg");
  lc = step1(r, lc, "R-PutExtra");
  CHECK(*as_int(std::get<IntentBlk>(*lc.heap.get(in)).extras.at("k")) == 5);

  // A missing key blocks the read.
  LocalConfig miss = lc;
  miss.stack.top().regs[1] = make_str("zzz");
  CHECK(r.m.step_local(miss).empty());

  lc = step1(r, lc, "R-GetExtra");
  CHECK(*as_int(lc.stack.top().regs[extras.res_reg()]) == 5);

  // Reading at the wrong type is stuck too.
  LocalConfig w = make_lc(r, "T", "extras2");
  w = step1(r, w, "R-NewIntent");
  w = step1(r, w, "R-MoveReg");
  w = step1(r, w, "R-MoveReg");
  w = step1(r, w, "R-PutExtra");
  CHECK(r.m.step_local(w).empty());
}

TEST_CASE("instanceof and checkcast follow the class hierarchy") {
  Rig r(kData);
  LocalConfig lc = make_lc(r, "T", "casts");
  lc.stack.top().regs[2] = lc.owner;  // a T, hence a Thread

  LocalConfig t = step1(r, lc, "R-InstOfTrue");
  CHECK(*as_bool(t.stack.top().regs[0]) == true);
  CHECK(as_prim(t.stack.top().regs[0])->taint == Taint::Public);
  t = step1(r, t, "R-Cast");
  CHECK(t.stack.top().pp.pc == 2);
  CHECK(r.m.step_local(t).empty());  // T is no IntExcpt: the cast is stuck

  // A non-Thread object answers false.
  LocalConfig f = make_lc(r, "T", "casts");
  Location exc{f.next_ptr++, ann_cls(r.sym("IntExcpt"))};
  f.heap.put(exc, blank_object(r, r.cid("IntExcpt")));
  f.stack.top().regs[2] = exc;
  CHECK(*as_bool(step1(r, f, "R-InstOfFalse").stack.top().regs[0]) == false);

  // instanceof needs a location.
  LocalConfig n = make_lc(r, "T", "casts");
  n.stack.top().regs[2] = make_null();
  CHECK(r.m.step_local(n).empty());
}

// ---------------------------------------------------------------------------
// Serialization and taint

static const char* kShapes = R"(
.class P extends Object
.field self P
.field a Q
.field b Q
.end class

.class Q extends Object
.field n int
.end class
)";

TEST_CASE("serialization copies primitives verbatim") {
  Rig r(kShapes);
  Heap h, ext;
  uint64_t np = 1;
  auto v = r.m.serialize(h, make_int(5, Taint::Secret), np, ext);
  REQUIRE(v.has_value());
  CHECK(*v == make_int(5, Taint::Secret));
  CHECK(ext.cells.empty());
  CHECK(np == 1);

  // Dangling pointers are detected, not chased.
  CHECK(!r.m.serialize(h, Location{99, ann_cls(r.sym("P"))}, np, ext)
             .has_value());
}

TEST_CASE("serialization preserves cycles, sharing and annotations") {
  Rig r(kShapes);
  const ProgramPoint site{1, 2, 3};

  Heap h;
  uint64_t np = 1;
  Location lp{np++, ann_pp(site)};
  Location lq{np++, ann_pp(site)};
  Object q = blank_object(r, r.cid("Q"));
  q.fields[slot(r, r.cid("Q"), "n")] = make_int(7, Taint::Secret);
  q.acquired = lq;  // monitor state must not survive the copy
  q.m_cnt = 3;
  h.put(lq, std::move(q));
  Object p = blank_object(r, r.cid("P"));
  p.fields[slot(r, r.cid("P"), "self")] = lp;  // cycle
  p.fields[slot(r, r.cid("P"), "a")] = lq;     // sharing
  p.fields[slot(r, r.cid("P"), "b")] = lq;
  h.put(lp, std::move(p));

  Heap ext;
  auto copy = r.m.serialize(h, lp, np, ext);
  REQUIRE(copy.has_value());
  const Location lc = *as_loc(*copy);
  CHECK(lc.ptr >= 3);  // fresh
  CHECK(lc.ann == lp.ann);

  std::map<uint64_t, uint64_t> bij;
  CHECK(iso(h, lp, ext, *copy, bij));

  const Object* cp = ext.object(lc);
  REQUIRE(cp != nullptr);
  // The copy is self-referential on its own, not on the original.
  CHECK(as_loc(cp->fields[slot(r, r.cid("P"), "self")])->ptr == lc.ptr);
  // Sharing survives: both fields name the same fresh cell.
  const Location* ca = as_loc(cp->fields[slot(r, r.cid("P"), "a")]);
  const Location* cb = as_loc(cp->fields[slot(r, r.cid("P"), "b")]);
  CHECK(ca->ptr == cb->ptr);
  CHECK(ca->ptr != lq.ptr);
  // Monitor state was reset on the copied cell.
  const Object* cq = ext.object(*ca);
  REQUIRE(cq != nullptr);
  CHECK(cq->m_cnt == 0);
  CHECK(!cq->acquired.has_value());
  CHECK(as_prim(cq->fields[slot(r, r.cid("Q"), "n")])->taint ==
        Taint::Secret);
}

TEST_CASE("reachability taint agrees with a depth-bounded oracle") {
  Rig r(kShapes);

  CHECK(r.m.taint_of(Heap{}, make_int(3)) == Taint::Public);
  CHECK(r.m.taint_of(Heap{}, make_str("s", Taint::Secret)) == Taint::Secret);

  Heap h;
  uint64_t np = 1;
  Location lp{np++, ann_cls(r.sym("P"))};
  Location lq{np++, ann_cls(r.sym("Q"))};
  Object p = blank_object(r, r.cid("P"));
  p.fields[slot(r, r.cid("P"), "self")] = lp;  // all-public cycle
  p.fields[slot(r, r.cid("P"), "a")] = lq;
  h.put(lp, std::move(p));
  Object q = blank_object(r, r.cid("Q"));
  h.put(lq, std::move(q));

  CHECK(r.m.taint_of(h, lp) == Taint::Public);
  CHECK(r.m.taint_of(h, lp) == taint_oracle(h, lp, 64));

  set_field(r, h, lq, "n", make_int(1, Taint::Secret));
  CHECK(r.m.taint_of(h, lp) == Taint::Secret);
  CHECK(r.m.taint_of(h, lp) == taint_oracle(h, lp, 64));

  Location la{np++, ann_cls(r.sym("P"))};
  h.put(la, ArrayBlk{kTypeInt, {make_int(0), make_int(1, Taint::Secret)}});
  CHECK(r.m.taint_of(h, la) == Taint::Secret);
  CHECK(r.m.taint_of(h, la) == taint_oracle(h, la, 64));

  Location li{np++, ann_in(r.sym("P"))};
  h.put(li, IntentBlk{r.sym("P"), {{"k", make_str("v", Taint::Secret)}}});
  CHECK(r.m.taint_of(h, li) == Taint::Secret);
  CHECK(r.m.taint_of(h, li) == taint_oracle(h, li, 64));
}

TEST_CASE("fingerprints identify configurations up to pointer renaming") {
  Rig r("\n.class A extends Activity\n.end class\n");
  auto mk = [&](uint64_t base, bool garbage) {
    Configuration c;
    Location a{base, ann_cls(r.sym("A"))};
    c.heap.put(a, blank_object(r, r.cid("A")));
    c.activities.push_back(
        {a, LifeState::Running, false, {}, {}, CallStack{}});
    if (garbage)
      c.heap.put(Location{base + 5, ann_cls(r.sym("A"))},
                 blank_object(r, r.cid("A")));
    c.next_ptr = base + 10;
    return c;
  };
  CHECK(fingerprint(mk(1, false)) == fingerprint(mk(47, false)));
  CHECK(fingerprint(mk(1, false)) != fingerprint(mk(1, true)));
  CHECK(fingerprint(mk(1, true)) == fingerprint(mk(47, true)));

  Configuration t = mk(1, false);
  set_field(r, t.heap, t.activities[0].obj, "inte", make_bool(false));
  Configuration u = mk(1, false);
  set_field(r, u.heap, u.activities[0].obj, "inte",
            make_bool(false, Taint::Secret));
  CHECK(fingerprint(t) != fingerprint(u));  // taints are part of the state
}

// ---------------------------------------------------------------------------
// Global semantics: boot and the life-cycle

TEST_CASE("boot builds one constructor configuration per argument choice") {
  Rig r(read_corpus("leaky.dal"), read_corpus("leaky_ss.txt"));
  auto boots = r.m.boot(r.cid("Leaky"));
  REQUIRE(boots.size() == 1);  // <init> takes no arguments
  const Configuration& c = boots[0];

  REQUIRE(c.activities.size() == 1);
  const ActivityFrame& af = c.activities[0];
  CHECK(af.active);
  CHECK(af.state == LifeState::Constructor);
  REQUIRE(af.stack.frames.size() == 1);
  const Frame& f = af.stack.top();
  CHECK(r.p.name(r.p.cls(f.pp.cls).methods[f.pp.mth].name) == "<init>");
  CHECK(f.pp.pc == 0);

  // The activity is wired to a pending in(c) intent cell.
  const Value& in = field_of(r, c.heap, af.obj, "intent");
  const Location* li = as_loc(in);
  REQUIRE(li != nullptr);
  CHECK(li->ann.kind == AnnKind::In);
  CHECK(std::get<IntentBlk>(*c.heap.get(*li)).target == r.sym("Leaky"));

  CHECK(!r.m.wf_violation(c).has_value());
  CHECK(fingerprint(c) == fingerprint(r.m.boot(r.cid("Leaky"))[0]));
}

TEST_CASE("an activity winds down through back, destroy and replace") {
  Rig r("\n.class A extends Activity\n.end class\n");
  auto boots = r.m.boot(r.cid("A"));
  REQUIRE(boots.size() == 1);
  Configuration c = boots[0];

  c = drive(r, c, {"A-Deactivate"});
  auto s = find_step(r, c, "A-Step");  // Constructor -> OnStart
  REQUIRE(s.has_value());
  CHECK(!s->fired_user_cb);
  CHECK(r.p.name(s->fired_cb) == "onStart");
  c = s->next;
  CHECK(c.activities[0].state == LifeState::OnStart);

  c = drive(r, c, {"A-Deactivate"});
  s = find_step(r, c, "A-Step");  // OnStart -> OnResume
  REQUIRE(s.has_value());
  CHECK(r.p.name(s->fired_cb) == "onResume");
  c = s->next;

  c = drive(r, c, {"A-Deactivate"});
  s = find_step(r, c, "A-Step");  // OnResume -> Running, no handler: silent
  REQUIRE(s.has_value());
  CHECK(s->fired_cb == 0);
  c = s->next;
  CHECK(c.activities[0].state == LifeState::Running);
  REQUIRE(!c.activities[0].stack.frames.empty());  // last callback remains

  // Back: the user leaves, the finish flag is raised.
  auto back = find_step(r, c, "A-Back");
  REQUIRE(back.has_value());
  c = back->next;
  CHECK(*as_bool(field_of(r, c.heap, c.activities[0].obj, "finished")));
  CHECK(c.activities[0].state == LifeState::Running);

  // A finished activity only winds down: pause, stop, destroy.
  c = drive(r, c, {"A-Step", "A-Deactivate"});
  CHECK(c.activities[0].state == LifeState::OnPause);
  {
    // OnPause -> OnResume is off the table once finished.
    for (const GlobalStep& gs : r.m.step_global(c))
      if (std::string("A-Step") == gs.rule)
        CHECK(gs.next.activities[0].state == LifeState::OnStop);
  }
  c = drive(r, c, {"A-Step", "A-Deactivate", "A-Step", "A-Deactivate"});
  CHECK(c.activities[0].state == LifeState::OnDestroy);

  // Replace: a fresh object takes over, the old one becomes garbage.
  auto rep = find_step(r, c, "A-Replace");
  REQUIRE(rep.has_value());
  const Location old = c.activities[0].obj;
  CHECK(rep->next.activities[0].obj.ptr != old.ptr);
  CHECK(rep->next.activities[0].state == LifeState::Constructor);
  CHECK(rep->next.activities[0].active);
  CHECK(rep->next.heap.contains(old));  // garbage is kept
  CHECK(!*as_bool(
      field_of(r, rep->next.heap, rep->next.activities[0].obj, "finished")));

  // Destroy: the frame disappears for good.
  auto des = find_step(r, c, "A-Destroy");
  REQUIRE(des.has_value());
  CHECK(des->next.activities.empty());
}

TEST_CASE("spawned threads run their bodies and die") {
  Rig r(R"(
.class W extends Thread
.method run () void locals 0
  return
.end method
.end class

.class A extends Activity
.method onStart () void locals 1
  new r0 W
  startthread r0
  return
.end method
.end class
)");
  auto boots = r.m.boot(r.cid("A"));
  REQUIRE(boots.size() == 1);
  Configuration c = drive(r, boots[0], {"A-Deactivate"});

  auto s = find_step(r, c, "A-Step");
  REQUIRE(s.has_value());
  CHECK(s->fired_user_cb);  // onStart is overridden by A
  CHECK(r.p.name(s->fired_cb) == "onStart");
  c = drive(r, s->next, {"R-NewObj", "R-StartThread"});

  REQUIRE(c.activities[0].pending_threads.size() == 1);
  const Location w = c.activities[0].pending_threads[0];

  auto ts = find_step(r, c, "A-ThreadStart");
  REQUIRE(ts.has_value());
  c = ts->next;
  CHECK(c.activities[0].pending_threads.empty());
  REQUIRE(c.threads.size() == 1);
  const ThreadFrame& tf = c.threads[0];
  CHECK(tf.thread.ptr == w.ptr);
  CHECK(tf.parent.ptr == c.activities[0].obj.ptr);
  REQUIRE(tf.stack.frames.size() == 1);
  const MethodDef& run = r.method("W", "run");
  CHECK(r.p.name(r.p.cls(tf.stack.top().pp.cls).name) == "W");
  CHECK(as_loc(tf.stack.top().regs[run.this_reg()])->ptr == w.ptr);
  REQUIRE(tf.stack.top().ctx.size() == 1);
  CHECK(as_loc(tf.stack.top().ctx[0])->ptr == w.ptr);

  // The body is a bare return: the thread is immediately reapable.
  auto kill = find_step(r, c, "T-Kill");
  REQUIRE(kill.has_value());
  CHECK(kill->next.threads.empty());
  CHECK(*as_bool(field_of(r, kill->next.heap, w, "finished")));

  // Pending intents and threads drain from the thread to its parent.
  Configuration ci = c;
  ci.threads[0].pending_acts.push_back(IntentBlk{r.sym("A"), {}});
  auto ti = find_step(r, ci, "T-Intent");
  REQUIRE(ti.has_value());
  CHECK(ti->next.threads[0].pending_acts.empty());
  REQUIRE(ti->next.activities[0].pending_acts.size() == 1);
  CHECK(ti->next.activities[0].pending_acts[0].target == r.sym("A"));

  Configuration ct = c;
  ct.threads[0].pending_threads.push_back(w);
  auto tt = find_step(r, ct, "T-Thread");
  REQUIRE(tt.has_value());
  CHECK(tt->next.threads[0].pending_threads.empty());
  REQUIRE(tt->next.activities[0].pending_threads.size() == 1);
  CHECK(tt->next.activities[0].pending_threads[0].ptr == w.ptr);
}

TEST_CASE("intents launch child activities and results come back") {
  Rig r(R"(
.class B extends Activity
.method onStart () void locals 1
  new r0 Object
  move r1.result r0
  return
.end method
.end class

.class A extends Activity
.method onPause () void locals 3
  newintent r0 B
  move r1 "k"
  move r2 42
  putextra r0 r1 r2
  startactivity r0
  return
.end method
.end class
)");
  auto boots = r.m.boot(r.cid("A"));
  REQUIRE(boots.size() == 1);
  Configuration c = drive(r, boots[0],
                          {"A-Deactivate", "A-Step", "A-Deactivate", "A-Step",
                           "A-Deactivate", "A-Step", "A-Step"});
  CHECK(c.activities[0].state == LifeState::OnPause);

  c = drive(r, c, {"R-NewIntent"});
  {
    // Fresh intents are annotated with their allocation site.
    const Frame& f = c.activities[0].stack.top();
    CHECK(as_loc(f.regs[0])->ann.kind == AnnKind::Pp);
  }
  c = drive(r, c, {"R-MoveReg", "R-MoveReg", "R-PutExtra", "R-StartAct"});
  REQUIRE(c.activities[0].pending_acts.size() == 1);
  CHECK(c.activities[0].pending_acts[0].target == r.sym("B"));
  c = drive(r, c, {"A-Deactivate"});

  const Location pa = c.activities[0].obj;
  auto st = find_step(r, c, "A-Start");
  REQUIRE(st.has_value());
  c = st->next;

  REQUIRE(c.activities.size() == 2);
  const ActivityFrame& child = c.activities[0];
  CHECK(r.p.name(r.p.cls(c.heap.object(child.obj)->cls).name) == "B");
  CHECK(child.state == LifeState::Constructor);
  CHECK(child.active);
  CHECK(c.activities[1].obj.ptr == pa.ptr);
  CHECK(c.activities[1].pending_acts.empty());
  CHECK(as_loc(field_of(r, c.heap, child.obj, "parent"))->ptr == pa.ptr);
  {
    const Location* in = as_loc(field_of(r, c.heap, child.obj, "intent"));
    REQUIRE(in != nullptr);
    CHECK(in->ann.kind == AnnKind::In);
    const IntentBlk& blk = std::get<IntentBlk>(*c.heap.get(*in));
    CHECK(blk.target == r.sym("B"));
    CHECK(*as_int(blk.extras.at("k")) == 42);
  }

  // Run the child to completion; its result is handed back serialized.
  c = drive(r, c, {"A-Deactivate"});
  auto cb = find_step(r, c, "A-Step");  // B's user onStart
  REQUIRE(cb.has_value());
  CHECK(cb->fired_user_cb);
  c = drive(r, cb->next,
            {"R-NewObj", "R-MoveFld", "A-Deactivate", "A-Step", "A-Deactivate",
             "A-Step", "A-Back", "A-Step", "A-Deactivate"});
  CHECK(c.activities[0].state == LifeState::OnPause);
  CHECK(*as_bool(field_of(r, c.heap, c.activities[0].obj, "finished")));

  const Location* bres =
      as_loc(field_of(r, c.heap, c.activities[0].obj, "result"));
  REQUIRE(bres != nullptr);

  // The hidden parent may also advance underneath (pause -> stop).
  auto hid = find_step(r, c, "A-Hidden");
  REQUIRE(hid.has_value());
  CHECK(hid->next.activities[1].state == LifeState::OnStop);
  CHECK(hid->next.activities[1].active);

  // No pending intent on the parent: swapping is a result hand-off here.
  CHECK(!find_step(r, c, "A-Swap").has_value());
  auto res = find_step(r, c, "A-Result");
  REQUIRE(res.has_value());
  c = res->next;
  REQUIRE(c.activities.size() == 2);
  CHECK(c.activities[0].obj.ptr == pa.ptr);
  CHECK(c.activities[0].active);
  // The parent keeps its own life-cycle state; only the callback changes.
  CHECK(c.activities[0].state == LifeState::OnPause);
  CHECK(r.p.name(r.p.cls(c.activities[0].stack.top().pp.cls)
                     .methods[c.activities[0].stack.top().pp.mth]
                     .name) == "onActivityResult");
  const Location* pres =
      as_loc(field_of(r, c.heap, c.activities[0].obj, "result"));
  REQUIRE(pres != nullptr);
  CHECK(pres->ptr != bres->ptr);  // a serialized copy, not the same cell
  CHECK(c.heap.object(*pres)->cls == r.cid("Object"));
  CHECK(!c.activities[1].active);
}

TEST_CASE("a paused activity with pending intents swaps below its child") {
  Rig r(R"(
.class B extends Activity
.end class

.class A extends Activity
.method onPause () void locals 1
  newintent r0 B
  startactivity r0
  newintent r0 B
  startactivity r0
  return
.end method
.end class
)");
  auto boots = r.m.boot(r.cid("A"));
  REQUIRE(boots.size() == 1);
  Configuration c = drive(
      r, boots[0],
      {"A-Deactivate", "A-Step", "A-Deactivate", "A-Step", "A-Deactivate",
       "A-Step", "A-Step", "R-NewIntent", "R-StartAct", "R-NewIntent",
       "R-StartAct", "A-Deactivate", "A-Start"});
  REQUIRE(c.activities.size() == 2);
  REQUIRE(c.activities[1].pending_acts.size() == 1);  // one intent left

  const Location pa = c.activities[1].obj;
  const Location cb = c.activities[0].obj;
  c = drive(r, c,
            {"A-Deactivate", "A-Step", "A-Deactivate", "A-Step",
             "A-Deactivate", "A-Step", "A-Back", "A-Step", "A-Deactivate"});
  CHECK(c.activities[0].state == LifeState::OnPause);

  auto sw = find_step(r, c, "A-Swap");
  REQUIRE(sw.has_value());
  CHECK(sw->next.activities[0].obj.ptr == pa.ptr);
  CHECK(sw->next.activities[1].obj.ptr == cb.ptr);
  CHECK(!sw->next.activities[0].active);
  CHECK(!sw->next.activities[1].active);

  // Both pending intents are spent eventually: the parent can launch again.
  CHECK(find_step(r, sw->next, "A-Start").has_value());
}

// ---------------------------------------------------------------------------
// Exploration

TEST_CASE("exploring the empty program reaches only the initial state") {
  Rig r("");
  auto res =
      r.m.explore(static_cast<uint32_t>(r.p.classes.size()), ExploreOptions{});
  CHECK(res.nodes.size() == 1);
  CHECK(res.leaks.empty());
  CHECK(res.complete);
}

TEST_CASE("exploration finds the aliased leak under the restart schedule") {
  Rig r(read_corpus("leaky.dal"), read_corpus("leaky_ss.txt"));
  ExploreOptions o;
  o.max_steps = 20000;
  o.max_configs = 20000;
  o.schedule = {"onRestart", "onResume", "onPause", "onPause"};
  auto res = r.m.explore(r.cid("Leaky"), o);

  REQUIRE(res.leaks.size() == 1);
  const LeakWitness& w = res.leaks[0];
  CHECK(r.p.name(w.sink_cls) == "Leaky");
  CHECK(r.p.name(w.sink_mth) == "send");
  CHECK(w.arg_index == 0);  // the payload, not the URL
  REQUIRE(!w.trace.empty());
  CHECK(w.trace.front() == "boot | - | -");
  CHECK(w.trace.back().find("R-Call") != std::string::npos);
  CHECK(w.trace.back().find("Leaky.onPause") != std::string::npos);

  // The witness configuration really sits at the sink entry with a secret
  // payload and a public URL.
  const Configuration& wc = res.nodes[w.node].cfg;
  const MethodDef& send = r.method("Leaky", "send");
  bool at_sink = false;
  for (const ActivityFrame& af : wc.activities) {
    if (af.stack.frames.empty()) continue;
    const Frame& f = af.stack.top();
    if (r.p.name(r.p.cls(f.pp.cls).methods[f.pp.mth].name) != "send")
      continue;
    at_sink = true;
    CHECK(f.pp.pc == 0);
    CHECK(r.m.taint_of(wc.heap, f.regs[send.param_reg(0)]) == Taint::Secret);
    CHECK(r.m.taint_of(wc.heap, f.regs[send.param_reg(1)]) == Taint::Public);
  }
  CHECK(at_sink);

  // Every reached configuration is well-formed.
  size_t bad = 0;
  for (const ReachedNode& n : res.nodes)
    if (r.m.wf_violation(n.cfg).has_value()) ++bad;
  CHECK(bad == 0);

  // Exploration is reproducible step for step.
  auto res2 = r.m.explore(r.cid("Leaky"), o);
  CHECK(res2.nodes.size() == res.nodes.size());
  CHECK(res2.steps == res.steps);
  REQUIRE(res2.leaks.size() == 1);
  CHECK(res2.leaks[0].trace == w.trace);
  CHECK(res2.leaks[0].node == w.node);
  REQUIRE(res.nodes.size() > 1);
  CHECK(fingerprint(res2.nodes.back().cfg) ==
        fingerprint(res.nodes.back().cfg));
}

TEST_CASE("the anonymised variant reaches its sink without leaking") {
  Rig r(read_corpus("anon.dal"), read_corpus("anon_ss.txt"));
  ExploreOptions o;
  o.max_steps = 6000;
  o.max_configs = 6000;
  auto res = r.m.explore(r.cid("Anon"), o);

  CHECK(res.leaks.empty());

  // The exploration does reach send; the payload is just public by then.
  bool hit = false;
  for (const ReachedNode& n : res.nodes)
    for (const ActivityFrame& af : n.cfg.activities) {
      if (af.stack.frames.empty()) continue;
      const Frame& f = af.stack.top();
      const MethodDef& m = r.p.cls(f.pp.cls).methods[f.pp.mth];
      hit = hit || (r.p.name(m.name) == "send" && f.pp.pc == 0);
    }
  CHECK(hit);

  // Freshness: pointers never run backwards and heaps stay below next_ptr.
  size_t bad = 0;
  for (const ReachedNode& n : res.nodes) {
    if (!n.cfg.heap.cells.empty() &&
        n.cfg.heap.cells.rbegin()->first >= n.cfg.next_ptr)
      ++bad;
    if (n.parent >= 0 && n.cfg.next_ptr < res.nodes[n.parent].cfg.next_ptr)
      ++bad;
    if (r.m.wf_violation(n.cfg).has_value()) ++bad;
  }
  CHECK(bad == 0);
}

TEST_CASE("stepping a configuration twice gives identical successors") {
  Rig r(read_corpus("leaky.dal"), read_corpus("leaky_ss.txt"));
  Configuration c = r.m.boot(r.cid("Leaky"))[0];
  for (int i = 0; i < 12; ++i) {
    auto a = r.m.step_global(c);
    auto b = r.m.step_global(c);
    REQUIRE(a.size() == b.size());
    for (size_t k = 0; k < a.size(); ++k) {
      CHECK(std::string(a[k].rule) == b[k].rule);
      CHECK(a[k].frame_id == b[k].frame_id);
      CHECK(a[k].where == b[k].where);
      CHECK(a[k].next == b[k].next);
    }
    if (a.empty()) break;
    c = std::move(a.front().next);
  }
}
