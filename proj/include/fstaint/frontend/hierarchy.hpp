#pragma once

// Derived views over a validated Program: subtyping, virtual dispatch,
// inherited field layouts, exception handler resolution, lifecycle callback
// sets, and the allocation-site table shared with the abstract domain.

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "fstaint/frontend/ast.hpp"

namespace fstaint::frontend {

inline uint64_t pp_key(const ProgramPoint& pp) {
  return (static_cast<uint64_t>(pp.cls) << 42) |
         (static_cast<uint64_t>(pp.mth) << 21) | pp.pc;
}

// Abstract location universe. Allocation statements (new / newarray /
// newintent) are the only flow-sensitively trackable sites; every other
// location kind is summarised flow-insensitively:
//   [0, F)         FS(site i)       most-recent object of allocation site i
//   [F, 2F)        NFS(site i)      older objects of allocation site i
//   [2F, 2F+C)     class c          the singleton activity/static object
//   [2F+C, 2F+2C)  in(c)            intents targeting activity c
//   [2F+2C, ...)   exn site j       interrupt exceptions born at pp j
enum class LocKind : uint8_t { Fs, NfsAlloc, NfsClass, NfsIn, NfsExn };

struct LocDesc {
  LocKind kind;
  uint32_t index;  // fs/alloc/exn: site index; class/in: class id
};

struct SiteTable {
  std::vector<ProgramPoint> fs_sites;   // alloc statements, program order
  std::vector<ProgramPoint> exn_sites;  // join/wait statements
  std::unordered_map<uint64_t, uint32_t> fs_index;  // pp_key -> site index
  std::unordered_map<uint64_t, uint32_t> exn_index;
  uint32_t n_classes = 0;

  uint32_t fs_count() const { return static_cast<uint32_t>(fs_sites.size()); }
  uint32_t exn_count() const {
    return static_cast<uint32_t>(exn_sites.size());
  }
  uint32_t universe() const {
    return 2 * fs_count() + 2 * n_classes + exn_count();
  }

  uint32_t loc_fs(uint32_t site) const { return site; }
  uint32_t loc_nfs_alloc(uint32_t site) const { return fs_count() + site; }
  uint32_t loc_class(uint32_t cid) const { return 2 * fs_count() + cid; }
  uint32_t loc_in(uint32_t cid) const {
    return 2 * fs_count() + n_classes + cid;
  }
  uint32_t loc_exn(uint32_t j) const {
    return 2 * fs_count() + 2 * n_classes + j;
  }
  LocDesc describe(uint32_t loc) const {
    const uint32_t f = fs_count();
    if (loc < f) return {LocKind::Fs, loc};
    if (loc < 2 * f) return {LocKind::NfsAlloc, loc - f};
    if (loc < 2 * f + n_classes) return {LocKind::NfsClass, loc - 2 * f};
    if (loc < 2 * f + 2 * n_classes)
      return {LocKind::NfsIn, loc - 2 * f - n_classes};
    return {LocKind::NfsExn, loc - 2 * f - 2 * n_classes};
  }
  // The flow-insensitive counterpart of a location (identity off FS).
  uint32_t to_nfs(uint32_t loc) const {
    return loc < fs_count() ? loc + fs_count() : loc;
  }
  std::optional<uint32_t> fs_site_of(const ProgramPoint& pp) const {
    auto it = fs_index.find(pp_key(pp));
    if (it == fs_index.end()) return std::nullopt;
    return it->second;
  }
};

// Activity lifecycle states. `Running` additionally dispatches user event
// handlers (non-lifecycle methods whose name starts with "on").
enum class LifeState : uint8_t {
  Constructor,  // <init>
  Running,      // onResume has completed; event handlers may fire
  OnPause,
  OnStop,
  OnRestart,
  OnStart,
  OnResume,
  OnDestroy,
  OnActivityResult,
};

struct MethodRef {
  uint32_t cls, mth;  // indices into Program::classes / ClassDef::methods
  bool operator==(const MethodRef&) const = default;
};

class Hierarchy {
 public:
  // May intern new types into p (location typing); declarations are not
  // modified.
  explicit Hierarchy(Program& p);

  const Program& program() const { return *p_; }
  const SiteTable& sites() const { return sites_; }

  // ---- subtyping -----------------------------------------------------
  bool subclass(Sym c, Sym d) const;        // reflexive-transitive
  bool subtype(TypeId a, TypeId b) const;   // adds covariant arrays
  bool is_activity(Sym c) const { return subclass(c, activity_); }
  bool is_thread_class(Sym c) const { return subclass(c, thread_); }
  bool is_throwable(Sym c) const { return subclass(c, throwable_); }

  // ---- dispatch --------------------------------------------------------
  // Walks c and its superclasses for a method named m.
  std::optional<MethodRef> lookup(Sym c, Sym m) const;
  // All classes *defining* a method named m (virtual dispatch candidates).
  const std::vector<uint32_t>& lookup_hat(Sym m) const;

  // ---- layout ----------------------------------------------------------
  // Inherited + own instance fields, superclass fields first; canonical order.
  const std::vector<FieldDef>& fields_of(uint32_t cid) const;
  std::optional<uint32_t> field_slot(uint32_t cid, Sym f) const;
  // Classes whose layout declares (possibly by inheritance) field f.
  const std::vector<uint32_t>& classes_with_field(Sym f) const;

  // ---- exceptions --------------------------------------------------------
  // First matching handler in declaration order, or nullopt (uncaught).
  std::optional<uint32_t> excpt_handler(const ProgramPoint& pp,
                                        Sym thrown) const;

  // ---- lifecycle ---------------------------------------------------------
  // Callback methods of activity class c for state s (resolved via lookup).
  std::vector<MethodRef> callbacks(Sym c, LifeState s) const;
  // Union over all states; drives abstract callback entry points.
  std::vector<MethodRef> all_callbacks(Sym c) const;
  // User-declared (non-builtin) activity classes, declaration order.
  const std::vector<uint32_t>& user_activities() const { return user_acts_; }

  // ---- site typing -------------------------------------------------------
  // Static type of the objects a location may denote.
  TypeId loc_type(uint32_t loc) const;
  Sym sym_object() const { return object_; }
  Sym sym_activity() const { return activity_; }
  Sym sym_thread() const { return thread_; }
  Sym sym_throwable() const { return throwable_; }
  Sym sym_intexcpt() const { return intexcpt_; }
  Sym sym_init() const { return init_; }

  uint32_t class_id(Sym c) const { return p_->class_ids.at(c); }

 private:
  const Program* p_;
  SiteTable sites_;
  Sym object_, activity_, thread_, throwable_, intexcpt_, init_;
  std::vector<std::vector<FieldDef>> fields_;  // per class id
  std::vector<std::unordered_map<Sym, uint32_t>> field_slots_;
  std::unordered_map<Sym, std::vector<uint32_t>> by_method_;
  std::unordered_map<Sym, std::vector<uint32_t>> by_field_;
  std::vector<uint32_t> user_acts_;
  std::vector<TypeId> loc_types_;
  std::vector<std::unordered_set<Sym>> supers_;  // transitive, incl. self
  static const std::vector<uint32_t> kNoClasses;
};

}  // namespace fstaint::frontend
