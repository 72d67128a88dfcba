#include "fstaint/concrete/state.hpp"

#include <unordered_map>

namespace fstaint::concrete {

using frontend::Program;
using frontend::TypeKind;

Value default_value(const Program& p, TypeId ty) {
  switch (p.type(ty).kind) {
    case TypeKind::Int: return make_int(0);
    case TypeKind::Bool: return make_bool(false);
    case TypeKind::String: return make_str("");
    default: return make_null();  // class, array, intent, void
  }
}

namespace {

// Streams a configuration into a string, renaming pointers to ids in order
// of first appearance.  Roots are emitted first, then the cells they reach
// breadth-first, so isomorphic configurations produce identical keys.
class Canon {
 public:
  explicit Canon(const Heap& heap) : heap_(&heap) {}

  void text(const char* s) { out_ += s; }

  void num(uint64_t n) {
    out_ += std::to_string(n);
    out_ += ',';
  }

  void str(const std::string& s) {
    num(s.size());
    out_ += s;
  }

  void loc(const Location& l) {
    out_ += 'L';
    num(rid(l.ptr));
  }

  void value(const Value& v) {
    if (const Prim* p = as_prim(v)) {
      if (const int64_t* i = std::get_if<int64_t>(&p->v)) {
        out_ += 'i';
        out_ += std::to_string(*i);
      } else if (const bool* b = std::get_if<bool>(&p->v)) {
        out_ += *b ? "b1" : "b0";
      } else if (const std::string* s = std::get_if<std::string>(&p->v)) {
        out_ += 's';
        str(*s);
      } else {
        out_ += 'n';
      }
      out_ += p->taint == Taint::Secret ? "!" : ";";
    } else {
      loc(std::get<Location>(v));
    }
  }

  void pp(const ProgramPoint& q) {
    num(q.cls);
    num(q.mth);
    num(q.pc);
  }

  void intent(const IntentBlk& i) {
    out_ += 'I';
    num(i.target);
    for (const auto& [k, v] : i.extras) {
      str(k);
      value(v);
    }
    out_ += ';';
  }

  void block(const MemoryBlock& b) {
    if (const Object* o = std::get_if<Object>(&b)) {
      out_ += 'O';
      num(o->cls);
      for (const Value& v : o->fields) value(v);
      if (o->acquired) {
        out_ += '@';
        loc(*o->acquired);
      }
      num(static_cast<uint64_t>(o->m_cnt));
    } else if (const ArrayBlk* a = std::get_if<ArrayBlk>(&b)) {
      out_ += 'R';
      num(a->elem);
      for (const Value& v : a->elems) value(v);
      out_ += ';';
    } else {
      intent(std::get<IntentBlk>(b));
    }
  }

  void stack(const CallStack& st) {
    out_ += 'K';
    num(static_cast<uint64_t>(st.status));
    if (st.status == StackStatus::Waiting) {
      loc(st.wait_lock);
      num(static_cast<uint64_t>(st.wait_count));
    }
    for (const Frame& f : st.frames) {
      out_ += 'F';
      pp(f.pp);
      for (const Value& v : f.regs) value(v);
      out_ += '/';
      for (const Value& v : f.ctx) value(v);
      out_ += ';';
    }
  }

  // Emit queued cells in first-reference order; referencing new cells from a
  // cell body extends the queue.
  void drain() {
    while (qhead_ < queue_.size()) {
      uint64_t ptr = queue_[qhead_++];
      out_ += "|C";
      num(ids_.at(ptr));
      auto it = heap_->cells.find(ptr);
      if (it == heap_->cells.end()) {
        out_ += '!';  // dangling (never well-formed, but keep keys total)
        continue;
      }
      const Annotation& a = it->second.ann;
      num(static_cast<uint64_t>(a.kind));
      if (a.kind == AnnKind::Pp)
        pp(a.pp);
      else
        num(a.cls);
      block(it->second.blk);
    }
  }

  bool seen(uint64_t ptr) const { return ids_.count(ptr) != 0; }

  uint32_t rid(uint64_t ptr) {
    auto [it, fresh] =
        ids_.try_emplace(ptr, static_cast<uint32_t>(ids_.size()));
    if (fresh) queue_.push_back(ptr);
    return it->second;
  }

  std::string take() { return std::move(out_); }

 private:
  const Heap* heap_;
  std::string out_;
  std::unordered_map<uint64_t, uint32_t> ids_;
  std::vector<uint64_t> queue_;
  size_t qhead_ = 0;
};

}  // namespace

std::string fingerprint(const Configuration& cfg) {
  Canon c(cfg.heap);
  for (const ActivityFrame& af : cfg.activities) {
    c.text("|A");
    c.num(static_cast<uint64_t>(af.state));
    c.num(af.active ? 1 : 0);
    c.loc(af.obj);
    for (const IntentBlk& i : af.pending_acts) c.intent(i);
    c.text("/");
    for (const Location& l : af.pending_threads) c.loc(l);
    c.stack(af.stack);
  }
  for (const ThreadFrame& tf : cfg.threads) {
    c.text("|T");
    c.loc(tf.parent);
    c.loc(tf.thread);
    for (const IntentBlk& i : tf.pending_acts) c.intent(i);
    c.text("/");
    for (const Location& l : tf.pending_threads) c.loc(l);
    c.stack(tf.stack);
  }
  c.text("|S");
  for (const auto& [key, v] : cfg.statics.vals) {
    c.num(key);
    c.value(v);
  }
  c.drain();
  // Unreachable cells still distinguish configurations; append them in
  // pointer order (their contents may pull in further cells).
  for (const auto& [ptr, cell] : cfg.heap.cells) {
    if (!c.seen(ptr)) {
      c.text("|G");
      c.rid(ptr);
      c.drain();
    }
  }
  return c.take();
}

std::string to_string(const frontend::Program& p, const Value& v) {
  if (const Prim* pr = as_prim(v)) {
    std::string s;
    if (const int64_t* i = std::get_if<int64_t>(&pr->v))
      s = std::to_string(*i);
    else if (const bool* b = std::get_if<bool>(&pr->v))
      s = *b ? "true" : "false";
    else if (const std::string* t = std::get_if<std::string>(&pr->v))
      s = '"' + *t + '"';
    else
      s = "null";
    return s + (pr->taint == Taint::Secret ? ":sec" : ":pub");
  }
  const Location& l = std::get<Location>(v);
  std::string s = "loc#" + std::to_string(l.ptr) + "@";
  switch (l.ann.kind) {
    case AnnKind::Pp:
      s += l.ann.pp.cls < p.classes.size() ? p.name(p.cls(l.ann.pp.cls).name)
                                           : "?";
      s += '.' + std::to_string(l.ann.pp.mth) + '.' +
           std::to_string(l.ann.pp.pc);
      break;
    case AnnKind::Cls: s += p.name(l.ann.cls); break;
    case AnnKind::In: s += "in(" + p.name(l.ann.cls) + ')'; break;
  }
  return s;
}

}  // namespace fstaint::concrete
