#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fstaint/frontend/ast.hpp"
#include "fstaint/frontend/hierarchy.hpp"

namespace fstaint::concrete {

using frontend::ProgramPoint;
using frontend::Sym;
using frontend::TypeId;

enum class Taint : uint8_t { Public, Secret };

inline Taint join(Taint a, Taint b) {
  return a == Taint::Secret || b == Taint::Secret ? Taint::Secret
                                                  : Taint::Public;
}

// Allocation annotation carried by every location: regular allocations are
// tagged with their program point, activity objects with their class, and
// intents attached to a (re)started activity with the class they target.
enum class AnnKind : uint8_t { Pp, Cls, In };

struct Annotation {
  AnnKind kind = AnnKind::Pp;
  ProgramPoint pp{};  // Pp only
  Sym cls = 0;        // Cls / In only
  bool operator==(const Annotation&) const = default;
};

inline Annotation ann_pp(const ProgramPoint& pp) {
  return {AnnKind::Pp, pp, 0};
}
inline Annotation ann_cls(Sym c) { return {AnnKind::Cls, {}, c}; }
inline Annotation ann_in(Sym c) { return {AnnKind::In, {}, c}; }

struct Location {
  uint64_t ptr = 0;  // never reused within a run
  Annotation ann;
  bool operator==(const Location&) const = default;
};

struct Null {
  bool operator==(const Null&) const = default;
};

// Primitive payload plus its taint; locations carry no taint of their own
// (the taint of a pointer is whatever is reachable through it).
struct Prim {
  std::variant<int64_t, bool, std::string, Null> v;
  Taint taint = Taint::Public;
  bool operator==(const Prim&) const = default;
};

using Value = std::variant<Prim, Location>;

inline Value make_int(int64_t v, Taint t = Taint::Public) {
  return Prim{v, t};
}
inline Value make_bool(bool v, Taint t = Taint::Public) { return Prim{v, t}; }
inline Value make_str(std::string v, Taint t = Taint::Public) {
  return Prim{std::move(v), t};
}
inline Value make_null() { return Prim{Null{}, Taint::Public}; }

inline const Prim* as_prim(const Value& v) { return std::get_if<Prim>(&v); }
inline const Location* as_loc(const Value& v) {
  return std::get_if<Location>(&v);
}
inline bool is_null(const Value& v) {
  const Prim* p = as_prim(v);
  return p && std::holds_alternative<Null>(p->v);
}
inline const int64_t* as_int(const Value& v) {
  const Prim* p = as_prim(v);
  return p ? std::get_if<int64_t>(&p->v) : nullptr;
}
inline const bool* as_bool(const Value& v) {
  const Prim* p = as_prim(v);
  return p ? std::get_if<bool>(&p->v) : nullptr;
}
inline const std::string* as_str(const Value& v) {
  const Prim* p = as_prim(v);
  return p ? std::get_if<std::string>(&p->v) : nullptr;
}

// 0_tau: int 0, false, "" or null depending on tau.
Value default_value(const frontend::Program& p, TypeId ty);

struct Object {
  uint32_t cls;               // class id
  std::vector<Value> fields;  // Hierarchy::fields_of order
  // Monitor bookkeeping.  Lives outside the field map: serialization resets
  // it and structural identity (fingerprints aside) still tracks it.
  std::optional<Location> acquired;
  int64_t m_cnt = 0;
  bool operator==(const Object&) const = default;
};

struct ArrayBlk {
  TypeId elem;
  std::vector<Value> elems;
  bool operator==(const ArrayBlk&) const = default;
};

struct IntentBlk {
  Sym target;  // activity class
  std::map<std::string, Value> extras;
  bool operator==(const IntentBlk&) const = default;
};

using MemoryBlock = std::variant<Object, ArrayBlk, IntentBlk>;

struct HeapCell {
  Annotation ann;
  MemoryBlock blk;
  bool operator==(const HeapCell&) const = default;
};

// Pointer-keyed store.  Cells are never collected; unreachable garbage is
// kept (and still participates in equality).
struct Heap {
  std::map<uint64_t, HeapCell> cells;

  bool contains(const Location& l) const { return cells.count(l.ptr) != 0; }
  const MemoryBlock* get(const Location& l) const {
    auto it = cells.find(l.ptr);
    return it == cells.end() ? nullptr : &it->second.blk;
  }
  MemoryBlock* get(const Location& l) {
    auto it = cells.find(l.ptr);
    return it == cells.end() ? nullptr : &it->second.blk;
  }
  const Object* object(const Location& l) const {
    const MemoryBlock* b = get(l);
    return b ? std::get_if<Object>(b) : nullptr;
  }
  Object* object(const Location& l) {
    MemoryBlock* b = get(l);
    return b ? std::get_if<Object>(b) : nullptr;
  }
  void put(const Location& l, MemoryBlock b) {
    cells.insert_or_assign(l.ptr, HeapCell{l.ann, std::move(b)});
  }
  bool operator==(const Heap&) const = default;
};

// Static fields, keyed by declaring class id and field name.
struct StaticHeap {
  std::map<uint64_t, Value> vals;

  static uint64_t key(uint32_t cid, Sym f) {
    return (static_cast<uint64_t>(cid) << 32) | f;
  }
  bool operator==(const StaticHeap&) const = default;
};

struct Frame {
  ProgramPoint pp;
  std::vector<Value> regs;  // full register file, MethodDef::reg_count wide
  std::vector<Value> ctx;   // pristine call values (receiver :: args)
  bool operator==(const Frame&) const = default;
};

enum class StackStatus : uint8_t { Normal, Abnormal, Waiting };

// Call stack; back() is the executing frame.  A waiting stack records the
// released monitor here rather than as an extra stack element, and an
// abnormal stack keeps the pending exception in the top excpt register.
struct CallStack {
  std::vector<Frame> frames;
  StackStatus status = StackStatus::Normal;
  Location wait_lock{};    // Waiting only
  int64_t wait_count = 0;  // monitor count restored on wake-up

  Frame& top() { return frames.back(); }
  const Frame& top() const { return frames.back(); }
  bool operator==(const CallStack&) const = default;
};

struct ActivityFrame {
  Location obj;
  frontend::LifeState state = frontend::LifeState::Constructor;
  bool active = false;
  std::vector<IntentBlk> pending_acts;    // front is the head
  std::vector<Location> pending_threads;  // front is the head
  CallStack stack;
  bool operator==(const ActivityFrame&) const = default;
};

struct ThreadFrame {
  Location parent;  // spawning activity
  Location thread;  // thread object; identifies the frame in traces
  std::vector<IntentBlk> pending_acts;
  std::vector<Location> pending_threads;
  CallStack stack;
  bool operator==(const ThreadFrame&) const = default;
};

// One runnable unit as seen by the local reduction relation: its stack and
// pending work, plus the shared stores it may touch.
struct LocalConfig {
  Location owner;  // the activity or thread object running this stack
  CallStack stack;
  std::vector<IntentBlk> pending_acts;
  std::vector<Location> pending_threads;
  Heap heap;
  StaticHeap statics;
  uint64_t next_ptr = 1;
  bool operator==(const LocalConfig&) const = default;
};

struct Configuration {
  std::vector<ActivityFrame> activities;  // front is the top of the stack
  std::vector<ThreadFrame> threads;       // front is the newest thread
  Heap heap;
  StaticHeap statics;
  uint64_t next_ptr = 1;
  bool operator==(const Configuration&) const = default;
};

// Canonical key: two configurations get the same fingerprint iff they
// coincide up to a renaming of the pointers reachable from the frames,
// stacks and statics.  Unreachable cells are appended in pointer order.
std::string fingerprint(const Configuration& cfg);

// Debug rendering, mainly for test failure output.
std::string to_string(const frontend::Program& p, const Value& v);

}  // namespace fstaint::concrete
