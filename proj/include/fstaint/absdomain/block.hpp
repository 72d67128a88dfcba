#pragma once

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "fstaint/absdomain/domain.hpp"
#include "fstaint/frontend/hierarchy.hpp"

namespace fstaint::absdomain {

// Abstract object: fields in Hierarchy::fields_of slot order for the class.
struct AbsObj {
  frontend::Sym cls = 0;
  std::vector<AbsValue> fields;
  bool operator==(const AbsObj&) const = default;
};

// Abstract array: element type plus one content value (field-insensitive).
struct AbsArr {
  frontend::TypeId elem = 0;
  AbsValue content;
  bool operator==(const AbsArr&) const = default;
};

// Abstract intent: target class plus one joined payload value.
struct AbsIntent {
  frontend::Sym cls = 0;
  AbsValue content;
  bool operator==(const AbsIntent&) const = default;
};

using AbsBlock = std::variant<AbsObj, AbsArr, AbsIntent>;

bool same_shape(const AbsBlock& a, const AbsBlock& b);
AbsBlock join_block(const AbsBlock& a, const AbsBlock& b);
bool leq_block(const AbsBlock& a, const AbsBlock& b);
bool leq_block_nfs(const AbsBlock& a, const AbsBlock& b, std::uint32_t fs_count);
AbsBlock lift_block(const AbsBlock& b, const Filter& k, std::uint32_t fs_count);
std::size_t hash_of(const AbsBlock& b);

// Applies fn to every value stored in the block.
template <typename F>
void for_each_value(const AbsBlock& b, F&& fn) {
  if (const auto* o = std::get_if<AbsObj>(&b)) {
    for (const auto& v : o->fields) fn(v);
  } else if (const auto* a = std::get_if<AbsArr>(&b)) {
    fn(a->content);
  } else {
    fn(std::get<AbsIntent>(b).content);
  }
}

// Flow-sensitive abstract heap: one optional block per flow-sensitive site.
struct AbsHeap {
  std::vector<std::optional<AbsBlock>> cells;

  explicit AbsHeap(std::size_t fs_count = 0) : cells(fs_count) {}

  bool all_bot() const {
    for (const auto& c : cells)
      if (c) return false;
    return true;
  }

  bool operator==(const AbsHeap&) const = default;
};

AbsHeap join_heap(const AbsHeap& a, const AbsHeap& b);
// Heap clause of the local-state order: every non-bottom entry of a must be
// dominated by the corresponding entry of b.
bool leq_heap(const AbsHeap& a, const AbsHeap& b);
std::size_t hash_of(const AbsHeap& h);

// Result of lifting a heap: flagged cells are cleared and their original
// blocks emitted toward the flow-insensitive heap (values inside emitted
// blocks stay as-is; flow-insensitive reads lift at lookup time), while
// surviving cells have their values lifted in place.
struct LiftResult {
  AbsHeap heap;
  std::vector<std::pair<Loc, AbsBlock>> emitted;
};
LiftResult lift_heap(const AbsHeap& h, const Filter& k, std::uint32_t fs_count);

// Reachability filter: the set of flow-sensitive sites reachable from the
// flow-sensitive locations of the start set by following values stored in the
// heap.  The start sites are always included, even when their cell is bottom.
Filter reach_filter(const LocSet& start, const AbsHeap& h, std::uint32_t fs_count);
Filter reach_filter(const AbsValue& v, const AbsHeap& h, std::uint32_t fs_count);

// Stable textual rendering for goldens, diagnostics and clause output.
struct Render {
  const frontend::Hierarchy* hier;

  std::string loc(Loc l) const;
  std::string value(const AbsValue& v) const;
  std::string block(const AbsBlock& b) const;
  std::string heap(const AbsHeap& h) const;
  std::string filter(const Filter& k) const;
};

}  // namespace fstaint::absdomain
