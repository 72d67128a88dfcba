#include <cstdio>

#include "fstaint/concrete/machine.hpp"

namespace fstaint::concrete {

using namespace frontend;

LifecycleModel LifecycleModel::standard() {
  using S = LifeState;
  return {{
      {S::Constructor, S::OnStart},
      {S::OnStart, S::OnResume},
      {S::OnResume, S::Running},
      {S::Running, S::Running},
      {S::Running, S::OnPause},
      {S::OnPause, S::OnResume},
      {S::OnPause, S::OnStop},
      {S::OnStop, S::OnRestart},
      {S::OnStop, S::OnDestroy},
      {S::OnRestart, S::OnStart},
  }};
}

bool LifecycleModel::allows(LifeState a, LifeState b) const {
  for (auto [x, y] : transitions)
    if (x == a && y == b) return true;
  return false;
}

namespace {

// Transitions a finished activity is still allowed to take: it may only
// wind down towards destruction.
bool winds_down(LifeState a, LifeState b) {
  using S = LifeState;
  return (a == S::Running && b == S::OnPause) ||
         (a == S::OnPause && b == S::OnStop) ||
         (a == S::OnStop && b == S::OnDestroy);
}

}  // namespace

bool Machine::finished_flag(const Heap& heap, const Location& act) const {
  const Object* o = heap.object(act);
  auto slot = o ? hier_->field_slot(o->cls, f_finished_) : std::nullopt;
  const bool* b = slot ? as_bool(o->fields[*slot]) : nullptr;
  return b && *b;
}

std::string Machine::frame_where(const CallStack& st) const {
  if (st.frames.empty()) return "-";
  const Program& p = program();
  const ProgramPoint& pp = st.frames.back().pp;
  return p.name(p.cls(pp.cls).name) + '.' +
         p.name(p.cls(pp.cls).methods[pp.mth].name) + '.' +
         std::to_string(pp.pc);
}

std::vector<Value> Machine::arg_pool(const Heap& heap, const Location& act,
                                     TypeId ty) const {
  const Program& p = program();
  switch (p.type(ty).kind) {
    case TypeKind::Int: return {make_int(0), make_int(1, Taint::Secret)};
    case TypeKind::Bool:
      return {make_bool(false), make_bool(true, Taint::Secret)};
    case TypeKind::String:
      return {make_str(""), make_str("input", Taint::Secret)};
    case TypeKind::Class: {
      std::vector<Value> pool{make_null()};
      const Object* o = heap.object(act);
      if (o && hier_->subclass(p.cls(o->cls).name, p.type(ty).cls))
        pool.push_back(act);
      return pool;
    }
    default: return {make_null()};  // intents and arrays are not synthesized
  }
}

std::vector<Frame> Machine::callback_frames(const Heap& heap,
                                            const Location& act,
                                            LifeState s) const {
  const Program& p = program();
  std::vector<Frame> out;
  const Object* o = heap.object(act);
  if (!o) return out;
  for (MethodRef ref : hier_->callbacks(p.cls(o->cls).name, s)) {
    const MethodDef& m = p.cls(ref.cls).methods[ref.mth];
    std::vector<std::vector<Value>> pools;
    for (TypeId ty : m.params) pools.push_back(arg_pool(heap, act, ty));
    std::vector<size_t> pick(pools.size(), 0);
    while (true) {
      Frame f;
      f.pp = {ref.cls, ref.mth, 0};
      f.regs.assign(m.reg_count(), make_int(0));
      f.regs[m.this_reg()] = act;
      for (size_t j = 0; j < pools.size(); ++j) {
        f.regs[m.param_reg(static_cast<uint32_t>(j))] = pools[j][pick[j]];
        f.ctx.push_back(pools[j][pick[j]]);
      }
      out.push_back(std::move(f));
      size_t j = 0;
      for (; j < pools.size(); ++j) {
        if (++pick[j] < pools[j].size()) break;
        pick[j] = 0;
      }
      if (j == pools.size()) break;
    }
  }
  return out;
}

std::vector<Configuration> Machine::boot(uint32_t launcher_cid) const {
  const Program& p = program();
  // No launcher activity (e.g. the empty program): boot to the inert empty
  // configuration.  Nothing runs, nothing leaks.
  if (launcher_cid >= p.classes.size() ||
      !hier_->field_slot(launcher_cid, f_intent_))
    return {Configuration{}};
  Sym c = p.cls(launcher_cid).name;

  Configuration base;
  Location act{base.next_ptr++, ann_cls(c)};
  Location in{base.next_ptr++, ann_in(c)};
  Object o = new_object(launcher_cid);
  o.fields[*hier_->field_slot(launcher_cid, f_intent_)] = in;
  base.heap.put(act, std::move(o));
  base.heap.put(in, IntentBlk{c, {}});
  for (uint32_t cid = 0; cid < p.classes.size(); ++cid)
    for (const FieldDef& fd : p.cls(cid).fields)
      if (fd.is_static)
        base.statics.vals.emplace(StaticHeap::key(cid, fd.name),
                                  default_value(p, fd.ty));
  base.activities.push_back(
      {act, LifeState::Constructor, true, {}, {}, CallStack{}});

  std::vector<Configuration> out;
  for (Frame& f : callback_frames(base.heap, act, LifeState::Constructor)) {
    Configuration n = base;
    n.activities[0].stack.frames.push_back(std::move(f));
    out.push_back(std::move(n));
  }
  return out;
}

std::vector<GlobalStep> Machine::step_global(const Configuration& cfg) const {
  std::vector<GlobalStep> out;
  const Program& p = program();
  using S = LifeState;

  auto fid_a = [](const ActivityFrame& af) {
    return 'a' + std::to_string(af.obj.ptr);
  };
  auto fid_t = [](const ThreadFrame& tf) {
    return 't' + std::to_string(tf.thread.ptr);
  };
  auto push = [&](const char* rule, std::string fid, std::string where,
                  Configuration&& n, Sym cb = 0, bool user = false) {
    out.push_back(
        {rule, std::move(fid), std::move(where), std::move(n), cb, user});
  };
  // Records which callback a rule just started, for schedule waypoints.
  auto cb_of = [&](const Frame& f, Sym* cb, bool* user) {
    *cb = p.cls(f.pp.cls).methods[f.pp.mth].name;
    *user = !p.cls(f.pp.cls).is_builtin;
  };

  int active = -1;
  for (size_t i = 0; i < cfg.activities.size(); ++i)
    if (cfg.activities[i].active) active = static_cast<int>(i);

  // --- the active frame runs, hands off pending threads, or goes idle
  if (active >= 0) {
    const ActivityFrame& af = cfg.activities[active];
    LocalConfig view{af.obj,           af.stack,  af.pending_acts,
                     af.pending_threads, cfg.heap, cfg.statics,
                     cfg.next_ptr};
    for (LocalStep& ls : step_local(view)) {
      Configuration n = cfg;
      ActivityFrame& naf = n.activities[active];
      naf.stack = std::move(ls.next.stack);
      naf.pending_acts = std::move(ls.next.pending_acts);
      naf.pending_threads = std::move(ls.next.pending_threads);
      n.heap = std::move(ls.next.heap);
      n.statics = std::move(ls.next.statics);
      n.next_ptr = ls.next.next_ptr;
      push(ls.rule, fid_a(af), frame_where(af.stack), std::move(n));
    }
    if (successful(af.stack)) {
      Configuration n = cfg;
      n.activities[active].active = false;
      push("A-Deactivate", fid_a(af), "-", std::move(n));
    }
    Sym run = *p.find_sym("run");
    for (size_t j = 0; j < af.pending_threads.size(); ++j) {
      const Location& lt = af.pending_threads[j];
      const Object* to = cfg.heap.object(lt);
      auto ref = to ? hier_->lookup(p.cls(to->cls).name, run) : std::nullopt;
      if (!ref) continue;
      const MethodDef& rm = p.cls(ref->cls).methods[ref->mth];
      Frame f;
      f.pp = {ref->cls, ref->mth, 0};
      f.regs.assign(rm.reg_count(), make_int(0));
      f.regs[rm.this_reg()] = lt;
      f.ctx.push_back(lt);
      Configuration n = cfg;
      n.activities[active].pending_threads.erase(
          n.activities[active].pending_threads.begin() +
          static_cast<ptrdiff_t>(j));
      ThreadFrame tf{af.obj, lt, {}, {}, CallStack{}};
      tf.stack.frames.push_back(std::move(f));
      n.threads.insert(n.threads.begin(), std::move(tf));
      push("A-ThreadStart", fid_a(af), "-", std::move(n));
    }
  }

  // --- life-cycle rules: only with every frame idle
  if (active < 0 && !cfg.activities.empty()) {
    const ActivityFrame& top = cfg.activities[0];
    const bool top_ok = successful(top.stack);
    const bool top_fin = finished_flag(cfg.heap, top.obj);

    if (top_ok) {
      for (auto [s, s2] : model_.transitions) {
        if (s != top.state) continue;
        if (!top.pending_acts.empty() && !(s == S::Running && s2 == S::OnPause))
          continue;
        if (top_fin && !winds_down(s, s2)) continue;
        std::vector<Frame> cbs = callback_frames(cfg.heap, top.obj, s2);
        if (cbs.empty()) {
          // No callback is registered (possible for `running` only): the
          // state still advances, silently.
          if (s2 == s) continue;
          Configuration n = cfg;
          n.activities[0].state = s2;
          push("A-Step", fid_a(top), "-", std::move(n));
          continue;
        }
        for (Frame& f : cbs) {
          Sym cb;
          bool user;
          cb_of(f, &cb, &user);
          Configuration n = cfg;
          ActivityFrame& naf = n.activities[0];
          naf.state = s2;
          naf.active = true;
          naf.stack = CallStack{};
          naf.stack.frames.push_back(std::move(f));
          push("A-Step", fid_a(top), "-", std::move(n), cb, user);
        }
      }
      if (top.state == S::Running && top.pending_acts.empty()) {
        Configuration n = cfg;
        Object* o = n.heap.object(top.obj);
        o->fields[*hier_->field_slot(o->cls, f_finished_)] = make_bool(true);
        push("A-Back", fid_a(top), "-", std::move(n));
      }
      if (top.state == S::OnDestroy) {
        // The screen flipped: the activity restarts as a fresh object.
        Sym c = p.cls(cfg.heap.object(top.obj)->cls).name;
        Configuration pre = cfg;
        Location fresh{pre.next_ptr++, ann_cls(c)};
        pre.heap.put(fresh, new_object(hier_->class_id(c)));
        for (Frame& f : callback_frames(pre.heap, fresh, S::Constructor)) {
          Sym cb;
          bool user;
          cb_of(f, &cb, &user);
          Configuration n = pre;
          ActivityFrame& naf = n.activities[0];
          naf.obj = fresh;
          naf.state = S::Constructor;
          naf.active = true;
          naf.stack = CallStack{};
          naf.stack.frames.push_back(std::move(f));
          std::string fid = fid_a(naf);
          push("A-Replace", std::move(fid), "-", std::move(n), cb, user);
        }
      }
      if ((top.state == S::OnPause || top.state == S::OnStop) &&
          !top.pending_acts.empty()) {
        const IntentBlk& i = top.pending_acts.front();
        if (p.class_ids.count(i.target) && hier_->is_activity(i.target)) {
          uint32_t cid = hier_->class_id(i.target);
          Configuration pre = cfg;
          pre.activities[0].pending_acts.erase(
              pre.activities[0].pending_acts.begin());
          // Serialized copy of the intent, then the child activity object.
          std::unordered_map<uint64_t, Location> memo;
          IntentBlk copy{i.target, {}};
          bool ok = true;
          for (const auto& [k, v] : i.extras) {
            auto r = ser_value(cfg.heap, v, pre.next_ptr, pre.heap, memo);
            if (!r) {
              ok = false;
              break;
            }
            copy.extras.emplace(k, std::move(*r));
          }
          if (ok) {
            Location child{pre.next_ptr++, ann_cls(i.target)};
            Location in{pre.next_ptr++, ann_in(i.target)};
            Object o = new_object(cid);
            o.fields[*hier_->field_slot(cid, f_intent_)] = in;
            o.fields[*hier_->field_slot(cid, f_parent_)] = top.obj;
            pre.heap.put(child, std::move(o));
            pre.heap.put(in, std::move(copy));
            for (Frame& f :
                 callback_frames(pre.heap, child, S::Constructor)) {
              Sym cb;
              bool user;
              cb_of(f, &cb, &user);
              Configuration n = pre;
              ActivityFrame naf{
                  child, S::Constructor, true, {}, {}, CallStack{}};
              naf.stack.frames.push_back(std::move(f));
              std::string fid = fid_a(naf);
              n.activities.insert(n.activities.begin(), std::move(naf));
              push("A-Start", std::move(fid), "-", std::move(n), cb, user);
            }
          }
        }
      }
      // A finished child on top hands control back to its parent.
      if (top.state == S::OnPause && top.pending_acts.empty() && top_fin &&
          cfg.activities.size() >= 2) {
        const ActivityFrame& snd = cfg.activities[1];
        const Object* to = cfg.heap.object(top.obj);
        auto pslot = to ? hier_->field_slot(to->cls, f_parent_) : std::nullopt;
        const Location* par = pslot ? as_loc(to->fields[*pslot]) : nullptr;
        if (par && *par == snd.obj && successful(snd.stack) &&
            (snd.state == S::OnPause || snd.state == S::OnStop)) {
          if (!snd.pending_acts.empty()) {
            Configuration n = cfg;
            std::swap(n.activities[0], n.activities[1]);
            push("A-Swap", fid_a(snd), "-", std::move(n));
          } else {
            auto rslot = hier_->field_slot(to->cls, f_result_);
            Configuration pre = cfg;
            auto w = serialize(cfg.heap, to->fields[*rslot], pre.next_ptr,
                               pre.heap);
            if (w) {
              Object* po = pre.heap.object(snd.obj);
              po->fields[*hier_->field_slot(po->cls, f_result_)] =
                  std::move(*w);
              for (Frame& f : callback_frames(pre.heap, snd.obj,
                                              S::OnActivityResult)) {
                Sym cb;
                bool user;
                cb_of(f, &cb, &user);
                Configuration n = pre;
                std::swap(n.activities[0], n.activities[1]);
                ActivityFrame& naf = n.activities[0];
                naf.active = true;
                naf.stack = CallStack{};
                naf.stack.frames.push_back(std::move(f));
                push("A-Result", fid_a(snd), "-", std::move(n), cb, user);
              }
            }
          }
        }
      }
    }

    // Finished activities disappear from any position once destroyed.
    for (size_t k = 0; k < cfg.activities.size(); ++k) {
      const ActivityFrame& af = cfg.activities[k];
      if (af.state != S::OnDestroy || !successful(af.stack) ||
          !finished_flag(cfg.heap, af.obj))
        continue;
      Configuration n = cfg;
      n.activities.erase(n.activities.begin() + static_cast<ptrdiff_t>(k));
      push("A-Destroy", fid_a(af), "-", std::move(n));
    }

    // A backgrounded activity may wind down while the top one is idle.
    if (top_ok && (top.state == S::OnResume || top.state == S::OnPause)) {
      for (size_t k = 1; k < cfg.activities.size(); ++k) {
        const ActivityFrame& af = cfg.activities[k];
        if (!successful(af.stack)) continue;
        for (auto [s1, s2] : {std::pair{S::OnPause, S::OnStop},
                              std::pair{S::OnStop, S::OnDestroy}}) {
          if (af.state != s1) continue;
          for (Frame& f : callback_frames(cfg.heap, af.obj, s2)) {
            Sym cb;
            bool user;
            cb_of(f, &cb, &user);
            Configuration n = cfg;
            ActivityFrame& naf = n.activities[k];
            naf.state = s2;
            naf.active = true;
            naf.stack = CallStack{};
            naf.stack.frames.push_back(std::move(f));
            push("A-Hidden", fid_a(af), "-", std::move(n), cb, user);
          }
        }
      }
    }
  }

  // --- threads run concurrently with everything above
  for (size_t j = 0; j < cfg.threads.size(); ++j) {
    const ThreadFrame& tf = cfg.threads[j];
    LocalConfig view{tf.thread,          tf.stack,  tf.pending_acts,
                     tf.pending_threads, cfg.heap, cfg.statics,
                     cfg.next_ptr};
    for (LocalStep& ls : step_local(view)) {
      Configuration n = cfg;
      ThreadFrame& ntf = n.threads[j];
      ntf.stack = std::move(ls.next.stack);
      ntf.pending_acts = std::move(ls.next.pending_acts);
      ntf.pending_threads = std::move(ls.next.pending_threads);
      n.heap = std::move(ls.next.heap);
      n.statics = std::move(ls.next.statics);
      n.next_ptr = ls.next.next_ptr;
      push(ls.rule, fid_t(tf), frame_where(tf.stack), std::move(n));
    }
    int parent = -1;
    for (size_t i = 0; i < cfg.activities.size(); ++i)
      if (cfg.activities[i].obj == tf.parent) parent = static_cast<int>(i);
    if (tf.pending_acts.empty() && tf.pending_threads.empty() &&
        successful(tf.stack)) {
      Configuration n = cfg;
      Object* to = n.heap.object(tf.thread);
      to->fields[*hier_->field_slot(to->cls, f_finished_)] = make_bool(true);
      n.threads.erase(n.threads.begin() + static_cast<ptrdiff_t>(j));
      push("T-Kill", fid_t(tf), "-", std::move(n));
    }
    if (parent >= 0 && !tf.pending_acts.empty()) {
      Configuration n = cfg;
      ThreadFrame& ntf = n.threads[j];
      n.activities[parent].pending_acts.insert(
          n.activities[parent].pending_acts.begin(),
          std::move(ntf.pending_acts.front()));
      ntf.pending_acts.erase(ntf.pending_acts.begin());
      push("T-Intent", fid_t(tf), "-", std::move(n));
    }
    if (parent >= 0) {
      for (size_t x = 0; x < tf.pending_threads.size(); ++x) {
        Configuration n = cfg;
        ThreadFrame& ntf = n.threads[j];
        n.activities[parent].pending_threads.insert(
            n.activities[parent].pending_threads.begin(),
            ntf.pending_threads[x]);
        ntf.pending_threads.erase(ntf.pending_threads.begin() +
                                  static_cast<ptrdiff_t>(x));
        push("T-Thread", fid_t(tf), "-", std::move(n));
      }
    }
  }

#ifndef NDEBUG
  for (const GlobalStep& s : out)
    if (auto err = wf_violation(s.next)) {
      fprintf(stderr, "step_global(%s) broke well-formedness: %s\n", s.rule,
              err->c_str());
      abort();
    }
#endif
  return out;
}

}  // namespace fstaint::concrete
