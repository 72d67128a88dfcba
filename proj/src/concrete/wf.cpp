#include "fstaint/concrete/machine.hpp"

namespace fstaint::concrete {

using namespace frontend;

namespace {

bool is_ref_type(const Program& p, TypeId ty) {
  TypeKind k = p.type(ty).kind;
  return k == TypeKind::Class || k == TypeKind::Array || k == TypeKind::Intent;
}

bool closed(const Heap& heap, const Value& v) {
  const Location* l = as_loc(v);
  return !l || heap.contains(*l);
}

std::optional<std::string> check_intents(const Heap& heap,
                                         const std::vector<IntentBlk>& pis) {
  for (const IntentBlk& i : pis)
    for (const auto& [k, v] : i.extras)
      if (!closed(heap, v)) return "pending intent extra is dangling";
  return std::nullopt;
}

}  // namespace

std::optional<std::string> Machine::check_stack(const Heap& heap,
                                                const CallStack& st,
                                                const Location& owner) const {
  const Program& p = program();
  if (st.frames.empty()) return "empty call stack";
  for (const Frame& f : st.frames) {
    if (f.pp.cls >= p.classes.size()) return "frame class out of range";
    const ClassDef& c = p.cls(f.pp.cls);
    if (f.pp.mth >= c.methods.size()) return "frame method out of range";
    const MethodDef& m = c.methods[f.pp.mth];
    // pc == body.size() is a fell-off-the-end stuck state, still well-formed
    if (f.pp.pc > m.body.size()) return "frame pc out of range";
    if (f.regs.size() != m.reg_count()) return "register file has wrong size";
    for (const Value& v : f.regs)
      if (!closed(heap, v)) return "register holds a dangling location";
    for (const Value& v : f.ctx)
      if (!closed(heap, v)) return "context holds a dangling location";
  }
  const Frame& top = st.frames.back();
  const MethodDef& tm = p.cls(top.pp.cls).methods[top.pp.mth];
  if (st.status == StackStatus::Waiting) {
    if (st.wait_count <= 0) return "waiting stack without a saved count";
    if (!heap.object(st.wait_lock)) return "waiting stack lost its monitor";
    if (top.pp.pc >= tm.body.size() ||
        !std::holds_alternative<StWait>(tm.body[top.pp.pc]))
      return "waiting stack is not parked on a wait statement";
  }
  if (st.status == StackStatus::Abnormal) {
    const Location* exc = as_loc(top.regs[tm.excpt_reg()]);
    const Object* o = exc ? heap.object(*exc) : nullptr;
    if (!o || !hier_->is_throwable(p.cls(o->cls).name))
      return "abnormal stack without a throwable in excpt";
  }
  (void)owner;
  return std::nullopt;
}

namespace {

std::optional<std::string> check_heap(const Machine& m, const Program& p,
                                      const frontend::Hierarchy& h,
                                      const Heap& heap) {
  for (const auto& [ptr, cell] : heap.cells) {
    if (const Object* o = std::get_if<Object>(&cell.blk)) {
      const auto& decl = h.fields_of(o->cls);
      if (o->fields.size() != decl.size()) return "object field count drifted";
      for (size_t i = 0; i < decl.size(); ++i) {
        const Value& v = o->fields[i];
        if (!closed(heap, v)) return "object field is dangling";
        bool ok = is_null(v) ? is_ref_type(p, decl[i].ty)
                             : m.value_type_leq(heap, v, decl[i].ty);
        if (!ok) return "object field violates its declared type";
      }
      if (o->acquired && !heap.contains(*o->acquired))
        return "monitor owner is dangling";
      if (o->m_cnt < 0) return "negative monitor count";
    } else if (const ArrayBlk* a = std::get_if<ArrayBlk>(&cell.blk)) {
      for (const Value& v : a->elems) {
        if (!closed(heap, v)) return "array element is dangling";
        bool ok = is_null(v) ? is_ref_type(p, a->elem)
                             : m.value_type_leq(heap, v, a->elem);
        if (!ok) return "array element violates the element type";
      }
    } else {
      for (const auto& [k, v] : std::get<IntentBlk>(cell.blk).extras)
        if (!closed(heap, v)) return "intent extra is dangling";
    }
  }
  return std::nullopt;
}

std::optional<std::string> check_statics(const Heap& heap,
                                         const StaticHeap& statics) {
  for (const auto& [key, v] : statics.vals)
    if (!closed(heap, v)) return "static field is dangling";
  return std::nullopt;
}

}  // namespace

std::optional<std::string> Machine::wf_violation(
    const Configuration& cfg) const {
  const Program& p = program();
  int actives = 0;
  for (const ActivityFrame& af : cfg.activities) actives += af.active ? 1 : 0;
  if (actives > 1) return "more than one active frame";

  for (const ActivityFrame& af : cfg.activities) {
    const Object* o = cfg.heap.object(af.obj);
    if (!o || !hier_->is_activity(p.cls(o->cls).name))
      return "activity frame owner is not an activity object";
    if (auto err = check_intents(cfg.heap, af.pending_acts)) return err;
    for (const Location& l : af.pending_threads) {
      const Object* t = cfg.heap.object(l);
      if (!t || !hier_->is_thread_class(p.cls(t->cls).name))
        return "pending thread is not a thread object";
    }
    if (auto err = check_stack(cfg.heap, af.stack, af.obj)) return err;
  }
  for (const ThreadFrame& tf : cfg.threads) {
    const Object* t = cfg.heap.object(tf.thread);
    if (!t || !hier_->is_thread_class(p.cls(t->cls).name))
      return "thread frame owner is not a thread object";
    const Object* par = cfg.heap.object(tf.parent);
    if (!par || !hier_->is_activity(p.cls(par->cls).name))
      return "thread frame parent is not an activity object";
    if (auto err = check_intents(cfg.heap, tf.pending_acts)) return err;
    for (const Location& l : tf.pending_threads) {
      const Object* t2 = cfg.heap.object(l);
      if (!t2 || !hier_->is_thread_class(p.cls(t2->cls).name))
        return "pending thread is not a thread object";
    }
    if (auto err = check_stack(cfg.heap, tf.stack, tf.thread)) return err;
  }
  if (auto err = check_statics(cfg.heap, cfg.statics)) return err;
  return check_heap(*this, p, *hier_, cfg.heap);
}

std::optional<std::string> Machine::wf_violation(const LocalConfig& lc) const {
  const Program& p = program();
  const Object* o = lc.heap.object(lc.owner);
  if (!o) return "local owner is not an object";
  Sym c = p.cls(o->cls).name;
  if (!hier_->is_activity(c) && !hier_->is_thread_class(c))
    return "local owner is neither an activity nor a thread";
  if (auto err = check_intents(lc.heap, lc.pending_acts)) return err;
  for (const Location& l : lc.pending_threads) {
    const Object* t = lc.heap.object(l);
    if (!t || !hier_->is_thread_class(p.cls(t->cls).name))
      return "pending thread is not a thread object";
  }
  if (auto err = check_stack(lc.heap, lc.stack, lc.owner)) return err;
  if (auto err = check_statics(lc.heap, lc.statics)) return err;
  return check_heap(*this, p, *hier_, lc.heap);
}

}  // namespace fstaint::concrete
