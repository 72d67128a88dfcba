#include "fstaint/absdomain/block.hpp"

#include <cassert>

#include "fstaint/frontend/parser.hpp"

namespace fstaint::absdomain {

using frontend::LocKind;

bool same_shape(const AbsBlock& a, const AbsBlock& b) {
  if (a.index() != b.index()) return false;
  if (const auto* oa = std::get_if<AbsObj>(&a)) {
    const auto& ob = std::get<AbsObj>(b);
    return oa->cls == ob.cls && oa->fields.size() == ob.fields.size();
  }
  if (const auto* aa = std::get_if<AbsArr>(&a)) return aa->elem == std::get<AbsArr>(b).elem;
  return std::get<AbsIntent>(a).cls == std::get<AbsIntent>(b).cls;
}

AbsBlock join_block(const AbsBlock& a, const AbsBlock& b) {
  assert(same_shape(a, b));
  if (const auto* oa = std::get_if<AbsObj>(&a)) {
    AbsObj r = *oa;
    const auto& ob = std::get<AbsObj>(b);
    for (std::size_t i = 0; i < r.fields.size(); ++i) r.fields[i] = join(r.fields[i], ob.fields[i]);
    return r;
  }
  if (const auto* aa = std::get_if<AbsArr>(&a)) {
    return AbsArr{aa->elem, join(aa->content, std::get<AbsArr>(b).content)};
  }
  const auto& ia = std::get<AbsIntent>(a);
  return AbsIntent{ia.cls, join(ia.content, std::get<AbsIntent>(b).content)};
}

namespace {

template <typename ValueLeq>
bool leq_block_with(const AbsBlock& a, const AbsBlock& b, ValueLeq&& value_leq) {
  if (!same_shape(a, b)) return false;
  if (const auto* oa = std::get_if<AbsObj>(&a)) {
    const auto& ob = std::get<AbsObj>(b);
    for (std::size_t i = 0; i < oa->fields.size(); ++i)
      if (!value_leq(oa->fields[i], ob.fields[i])) return false;
    return true;
  }
  if (const auto* aa = std::get_if<AbsArr>(&a))
    return value_leq(aa->content, std::get<AbsArr>(b).content);
  return value_leq(std::get<AbsIntent>(a).content, std::get<AbsIntent>(b).content);
}

}  // namespace

bool leq_block(const AbsBlock& a, const AbsBlock& b) {
  return leq_block_with(a, b, [](const AbsValue& x, const AbsValue& y) { return leq(x, y); });
}

bool leq_block_nfs(const AbsBlock& a, const AbsBlock& b, std::uint32_t fs_count) {
  return leq_block_with(
      a, b, [&](const AbsValue& x, const AbsValue& y) { return leq_nfs(x, y, fs_count); });
}

AbsBlock lift_block(const AbsBlock& b, const Filter& k, std::uint32_t fs_count) {
  if (const auto* o = std::get_if<AbsObj>(&b)) {
    AbsObj r = *o;
    for (auto& v : r.fields) v = lift_value(v, k, fs_count);
    return r;
  }
  if (const auto* a = std::get_if<AbsArr>(&b))
    return AbsArr{a->elem, lift_value(a->content, k, fs_count)};
  const auto& i = std::get<AbsIntent>(b);
  return AbsIntent{i.cls, lift_value(i.content, k, fs_count)};
}

std::size_t hash_of(const AbsBlock& b) {
  std::size_t h = b.index() * 0x9e3779b97f4a7c15ull;
  if (const auto* o = std::get_if<AbsObj>(&b)) {
    h = h * 31 + o->cls;
    for (const auto& v : o->fields) h = h * 31 + hash_of(v);
  } else if (const auto* a = std::get_if<AbsArr>(&b)) {
    h = h * 31 + a->elem;
    h = h * 31 + hash_of(a->content);
  } else {
    const auto& i = std::get<AbsIntent>(b);
    h = h * 31 + i.cls;
    h = h * 31 + hash_of(i.content);
  }
  return h;
}

AbsHeap join_heap(const AbsHeap& a, const AbsHeap& b) {
  assert(a.cells.size() == b.cells.size());
  AbsHeap r(a.cells.size());
  for (std::size_t i = 0; i < a.cells.size(); ++i) {
    if (a.cells[i] && b.cells[i]) r.cells[i] = join_block(*a.cells[i], *b.cells[i]);
    else if (a.cells[i]) r.cells[i] = a.cells[i];
    else r.cells[i] = b.cells[i];
  }
  return r;
}

bool leq_heap(const AbsHeap& a, const AbsHeap& b) {
  if (a.cells.size() != b.cells.size()) return false;
  for (std::size_t i = 0; i < a.cells.size(); ++i) {
    if (!a.cells[i]) continue;
    if (!b.cells[i] || !leq_block(*a.cells[i], *b.cells[i])) return false;
  }
  return true;
}

std::size_t hash_of(const AbsHeap& h) {
  std::size_t acc = 0x100000001b3ull;
  for (const auto& c : h.cells) acc = acc * 31 + (c ? hash_of(*c) : 0);
  return acc;
}

LiftResult lift_heap(const AbsHeap& h, const Filter& k, std::uint32_t fs_count) {
  LiftResult r{AbsHeap(h.cells.size()), {}};
  for (std::size_t i = 0; i < h.cells.size(); ++i) {
    if (!h.cells[i]) continue;
    if (k.test(static_cast<Loc>(i))) {
      r.emitted.emplace_back(static_cast<Loc>(i), *h.cells[i]);
    } else {
      r.heap.cells[i] = lift_block(*h.cells[i], k, fs_count);
    }
  }
  return r;
}

Filter reach_filter(const LocSet& start, const AbsHeap& h, std::uint32_t fs_count) {
  Filter r;
  std::vector<Loc> work;
  start.for_each([&](Loc l) {
    if (l < fs_count) {
      r.add(l);
      work.push_back(l);
    }
  });
  while (!work.empty()) {
    Loc site = work.back();
    work.pop_back();
    if (site >= h.cells.size() || !h.cells[site]) continue;
    for_each_value(*h.cells[site], [&](const AbsValue& v) {
      v.locs.for_each([&](Loc l) {
        if (l < fs_count && !r.test(l)) {
          r.add(l);
          work.push_back(l);
        }
      });
    });
  }
  return r;
}

Filter reach_filter(const AbsValue& v, const AbsHeap& h, std::uint32_t fs_count) {
  return reach_filter(v.locs, h, fs_count);
}

std::string Render::loc(Loc l) const {
  const auto& prog = hier->program();
  const auto& sites = hier->sites();
  auto d = sites.describe(l);
  auto pp_name = [&](const frontend::ProgramPoint& pp) {
    return prog.name(prog.classes[pp.cls].name) + "." +
           prog.name(prog.classes[pp.cls].methods[pp.mth].name) + "." + std::to_string(pp.pc);
  };
  switch (d.kind) {
    case LocKind::Fs: return "FS(" + pp_name(sites.fs_sites[d.index]) + ")";
    case LocKind::NfsAlloc: return "NFS(" + pp_name(sites.fs_sites[d.index]) + ")";
    case LocKind::NfsClass: return "CLS(" + prog.name(prog.classes[d.index].name) + ")";
    case LocKind::NfsIn: return "IN(" + prog.name(prog.classes[d.index].name) + ")";
    case LocKind::NfsExn: return "EXN(" + pp_name(sites.exn_sites[d.index]) + ")";
  }
  return "?";
}

std::string Render::value(const AbsValue& v) const {
  if (v.is_bot()) return "bot";
  std::string s = "(";
  std::string sep;
  if (!v.locs.empty()) {
    s += "locs{";
    std::string inner;
    v.locs.for_each([&](Loc l) {
      if (!inner.empty()) inner += ",";
      inner += loc(l);
    });
    s += inner + "}";
    sep = " ";
  }
  auto field = [&](const char* name, std::string val) {
    s += sep + name + std::string("=") + val;
    sep = " ";
  };
  static const char* kSign[] = {"_", "-", "0", "+", "T"};
  static const char* kBool[] = {"_", "ff", "tt", "T"};
  if (v.sign != Sign::Bot) field("int", kSign[static_cast<int>(v.sign)]);
  if (v.boolean != BoolAbs::Bot) field("bool", kBool[static_cast<int>(v.boolean)]);
  if (v.str != StrAbs::Bot) field("str", "T");
  field("taint", v.taint == Taint::Secret ? "secret" : "public");
  return s + ")";
}

std::string Render::block(const AbsBlock& b) const {
  const auto& prog = hier->program();
  if (const auto* o = std::get_if<AbsObj>(&b)) {
    std::string s = "obj " + prog.name(o->cls) + "{";
    std::string sep;
    const auto& layout = hier->fields_of(hier->class_id(o->cls));
    for (std::size_t i = 0; i < o->fields.size(); ++i) {
      s += sep + (i < layout.size() ? prog.name(layout[i].name) : "?") + ":" +
           value(o->fields[i]);
      sep = ", ";
    }
    return s + "}";
  }
  if (const auto* a = std::get_if<AbsArr>(&b))
    return "arr " + frontend::print_type(prog, a->elem) + "[" + value(a->content) + "]";
  const auto& i = std::get<AbsIntent>(b);
  return "intent " + prog.name(i.cls) + "{" + value(i.content) + "}";
}

std::string Render::heap(const AbsHeap& h) const {
  std::string s = "{";
  std::string sep;
  for (std::size_t i = 0; i < h.cells.size(); ++i) {
    if (!h.cells[i]) continue;
    s += sep + loc(static_cast<Loc>(i)) + " -> " + block(*h.cells[i]);
    sep = ", ";
  }
  return s + "}";
}

std::string Render::filter(const Filter& k) const {
  std::string s = "{";
  std::string sep;
  k.for_each([&](Loc l) {
    s += sep + loc(l);
    sep = ", ";
  });
  return s + "}";
}

}  // namespace fstaint::absdomain
