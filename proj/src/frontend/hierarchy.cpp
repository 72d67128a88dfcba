#include <algorithm>

#include "fstaint/frontend/hierarchy.hpp"

namespace fstaint::frontend {

const std::vector<uint32_t> Hierarchy::kNoClasses{};

Hierarchy::Hierarchy(Program& p) : p_(&p) {
  object_ = p.find_sym("Object").value();
  activity_ = p.find_sym("Activity").value();
  thread_ = p.find_sym("Thread").value();
  throwable_ = p.find_sym("Throwable").value();
  intexcpt_ = p.find_sym("IntExcpt").value();
  init_ = p.find_sym("<init>").value_or(0);

  // Supertype closure (validation guarantees acyclicity).
  supers_.resize(p.classes.size());
  for (uint32_t i = 0; i < p.classes.size(); ++i) {
    std::vector<Sym> stack{p.classes[i].name};
    while (!stack.empty()) {
      Sym c = stack.back();
      stack.pop_back();
      if (!supers_[i].insert(c).second) continue;
      const ClassDef& d = *p.find_class(c);
      if (d.super != c) stack.push_back(d.super);
      for (Sym s : d.interfaces) stack.push_back(s);
    }
  }

  // Field layouts: superclass chain first, then own instance fields.
  fields_.resize(p.classes.size());
  field_slots_.resize(p.classes.size());
  for (uint32_t i = 0; i < p.classes.size(); ++i) {
    std::vector<uint32_t> chain;  // root .. self
    Sym c = p.classes[i].name;
    while (true) {
      chain.push_back(p.class_ids.at(c));
      const ClassDef& d = p.classes[chain.back()];
      if (d.super == c) break;
      c = d.super;
    }
    std::reverse(chain.begin(), chain.end());
    for (uint32_t cid : chain)
      for (const FieldDef& f : p.classes[cid].fields)
        if (!f.is_static) {
          field_slots_[i].emplace(f.name,
                                  static_cast<uint32_t>(fields_[i].size()));
          fields_[i].push_back(f);
        }
  }

  for (uint32_t i = 0; i < p.classes.size(); ++i) {
    const ClassDef& c = p.classes[i];
    for (const MethodDef& m : c.methods) {
      (void)m;
      by_method_[m.name].push_back(i);
    }
    for (const FieldDef& f : fields_[i]) by_field_[f.name].push_back(i);
    if (!c.is_builtin && !c.is_interface && subclass(c.name, activity_))
      user_acts_.push_back(i);
  }

  // Allocation-site and exception-site tables, program order.
  for (uint32_t ci = 0; ci < p.classes.size(); ++ci)
    for (uint32_t mi = 0; mi < p.classes[ci].methods.size(); ++mi) {
      const MethodDef& m = p.classes[ci].methods[mi];
      for (uint32_t pc = 0; pc < m.body.size(); ++pc) {
        ProgramPoint pp{ci, mi, pc};
        const Statement& st = m.body[pc];
        if (std::holds_alternative<StNew>(st) ||
            std::holds_alternative<StNewArray>(st) ||
            std::holds_alternative<StNewIntent>(st)) {
          sites_.fs_index.emplace(pp_key(pp),
                                  static_cast<uint32_t>(sites_.fs_sites.size()));
          sites_.fs_sites.push_back(pp);
        } else if (std::holds_alternative<StJoin>(st) ||
                   std::holds_alternative<StWait>(st)) {
          sites_.exn_index.emplace(
              pp_key(pp), static_cast<uint32_t>(sites_.exn_sites.size()));
          sites_.exn_sites.push_back(pp);
        }
      }
    }
  sites_.n_classes = static_cast<uint32_t>(p.classes.size());

  // Static type of each abstract location.
  loc_types_.resize(sites_.universe());
  auto site_type = [&](const ProgramPoint& pp) -> TypeId {
    const Statement& st = p.stmt(pp);
    if (auto* n = std::get_if<StNew>(&st)) return p.class_type(n->cls);
    if (auto* a = std::get_if<StNewArray>(&st)) return p.array_type(a->elem);
    return kTypeIntent;  // newintent
  };
  for (uint32_t s = 0; s < sites_.fs_count(); ++s) {
    loc_types_[sites_.loc_fs(s)] = site_type(sites_.fs_sites[s]);
    loc_types_[sites_.loc_nfs_alloc(s)] = loc_types_[sites_.loc_fs(s)];
  }
  for (uint32_t c = 0; c < sites_.n_classes; ++c) {
    loc_types_[sites_.loc_class(c)] = p.class_type(p.classes[c].name);
    loc_types_[sites_.loc_in(c)] = kTypeIntent;
  }
  for (uint32_t e = 0; e < sites_.exn_count(); ++e)
    loc_types_[sites_.loc_exn(e)] = p.class_type(intexcpt_);
}

bool Hierarchy::subclass(Sym c, Sym d) const {
  auto it = p_->class_ids.find(c);
  return it != p_->class_ids.end() && supers_[it->second].count(d) > 0;
}

bool Hierarchy::subtype(TypeId a, TypeId b) const {
  if (a == b) return true;
  const TypeNode& x = p_->type(a);
  const TypeNode& y = p_->type(b);
  if (x.kind == TypeKind::Class && y.kind == TypeKind::Class)
    return subclass(x.cls, y.cls);
  if (x.kind == TypeKind::Array && y.kind == TypeKind::Array)
    return subtype(x.elem, y.elem);  // covariant arrays
  return false;
}

std::optional<MethodRef> Hierarchy::lookup(Sym c, Sym m) const {
  auto it = p_->class_ids.find(c);
  if (it == p_->class_ids.end()) return std::nullopt;
  Sym cur = c;
  while (true) {
    const uint32_t cid = p_->class_ids.at(cur);
    const ClassDef& d = p_->classes[cid];
    for (uint32_t mi = 0; mi < d.methods.size(); ++mi)
      if (d.methods[mi].name == m) return MethodRef{cid, mi};
    if (d.super == cur) return std::nullopt;
    cur = d.super;
  }
}

const std::vector<uint32_t>& Hierarchy::lookup_hat(Sym m) const {
  auto it = by_method_.find(m);
  return it == by_method_.end() ? kNoClasses : it->second;
}

const std::vector<FieldDef>& Hierarchy::fields_of(uint32_t cid) const {
  return fields_[cid];
}

std::optional<uint32_t> Hierarchy::field_slot(uint32_t cid, Sym f) const {
  auto it = field_slots_[cid].find(f);
  if (it == field_slots_[cid].end()) return std::nullopt;
  return it->second;
}

const std::vector<uint32_t>& Hierarchy::classes_with_field(Sym f) const {
  auto it = by_field_.find(f);
  return it == by_field_.end() ? kNoClasses : it->second;
}

std::optional<uint32_t> Hierarchy::excpt_handler(const ProgramPoint& pp,
                                                 Sym thrown) const {
  const MethodDef& m = p_->classes[pp.cls].methods[pp.mth];
  for (const Handler& h : m.handlers)
    if (h.pc_lo <= pp.pc && pp.pc <= h.pc_hi && subclass(thrown, h.cls))
      return h.target;  // first match in declaration order wins
  return std::nullopt;
}

namespace {

const char* life_callback(LifeState s) {
  switch (s) {
    case LifeState::Constructor: return "<init>";
    case LifeState::OnPause: return "onPause";
    case LifeState::OnStop: return "onStop";
    case LifeState::OnRestart: return "onRestart";
    case LifeState::OnStart: return "onStart";
    case LifeState::OnResume: return "onResume";
    case LifeState::OnDestroy: return "onDestroy";
    case LifeState::OnActivityResult: return "onActivityResult";
    default: return nullptr;  // Running
  }
}

bool lifecycle_name(const std::string& n) {
  static const char* kNames[] = {"<init>",    "onStart",   "onResume",
                                 "onPause",   "onStop",    "onRestart",
                                 "onDestroy", "onActivityResult"};
  for (auto* k : kNames)
    if (n == k) return true;
  return false;
}

}  // namespace

std::vector<MethodRef> Hierarchy::callbacks(Sym c, LifeState s) const {
  std::vector<MethodRef> out;
  if (const char* name = life_callback(s)) {
    auto m = p_->find_sym(name);
    if (m)
      if (auto r = lookup(c, *m)) out.push_back(*r);
    return out;
  }
  // Running: user event handlers — non-lifecycle virtual "on*" methods
  // visible on c, innermost override first.
  std::unordered_set<Sym> seen;
  Sym cur = c;
  while (true) {
    const uint32_t cid = p_->class_ids.at(cur);
    const ClassDef& d = p_->classes[cid];
    for (uint32_t mi = 0; mi < d.methods.size(); ++mi) {
      const MethodDef& m = d.methods[mi];
      const std::string& n = p_->name(m.name);
      if (m.is_static || lifecycle_name(n) || n.rfind("on", 0) != 0) continue;
      if (seen.insert(m.name).second) out.push_back({cid, mi});
    }
    if (d.super == cur) break;
    cur = d.super;
  }
  return out;
}

std::vector<MethodRef> Hierarchy::all_callbacks(Sym c) const {
  std::vector<MethodRef> out;
  auto add = [&](std::vector<MethodRef> v) {
    for (MethodRef r : v)
      if (std::find(out.begin(), out.end(), r) == out.end()) out.push_back(r);
  };
  for (LifeState s :
       {LifeState::Constructor, LifeState::Running, LifeState::OnPause,
        LifeState::OnStop, LifeState::OnRestart, LifeState::OnStart,
        LifeState::OnResume, LifeState::OnDestroy,
        LifeState::OnActivityResult})
    add(callbacks(c, s));
  return out;
}

TypeId Hierarchy::loc_type(uint32_t loc) const { return loc_types_[loc]; }

}  // namespace fstaint::frontend
