#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "fstaint/frontend/ast.hpp"

namespace fstaint::absdomain {

// Abstract locations are indices into the SiteTable universe: flow-sensitive
// sites occupy [0, F), their flow-insensitive twins [F, 2F), and class/in/exn
// locations follow.  Only the [0, 2F) ranges are flavor-paired.
using Loc = std::uint32_t;

inline Loc nfs_flip(Loc loc, std::uint32_t fs_count) {
  if (loc < fs_count) return loc + fs_count;
  if (loc < 2 * fs_count) return loc - fs_count;
  return loc;
}

// Set of abstract locations; invariant: no trailing zero words, so that
// equality and hashing are structural.
class LocSet {
public:
  LocSet() = default;

  static LocSet single(Loc loc) {
    LocSet s;
    s.add(loc);
    return s;
  }

  bool test(Loc loc) const {
    std::size_t w = loc / 64;
    return w < words_.size() && (words_[w] >> (loc % 64)) & 1;
  }

  void add(Loc loc) {
    std::size_t w = loc / 64;
    if (w >= words_.size()) words_.resize(w + 1, 0);
    words_[w] |= std::uint64_t{1} << (loc % 64);
  }

  bool empty() const { return words_.empty(); }

  std::size_t count() const {
    std::size_t n = 0;
    for (auto w : words_) n += static_cast<std::size_t>(__builtin_popcountll(w));
    return n;
  }

  LocSet& operator|=(const LocSet& o) {
    if (o.words_.size() > words_.size()) words_.resize(o.words_.size(), 0);
    for (std::size_t i = 0; i < o.words_.size(); ++i) words_[i] |= o.words_[i];
    return *this;
  }

  LocSet& operator&=(const LocSet& o) {
    if (words_.size() > o.words_.size()) words_.resize(o.words_.size());
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
    trim();
    return *this;
  }

  bool subset_of(const LocSet& o) const {
    for (std::size_t i = 0; i < words_.size(); ++i) {
      std::uint64_t other = i < o.words_.size() ? o.words_[i] : 0;
      if (words_[i] & ~other) return false;
    }
    return true;
  }

  template <typename F>
  void for_each(F&& fn) const {
    for (std::size_t i = 0; i < words_.size(); ++i) {
      std::uint64_t w = words_[i];
      while (w) {
        int b = __builtin_ctzll(w);
        fn(static_cast<Loc>(i * 64 + static_cast<std::size_t>(b)));
        w &= w - 1;
      }
    }
  }

  // Applies fn to every member and collects the images.
  template <typename F>
  LocSet mapped(F&& fn) const {
    LocSet out;
    for_each([&](Loc l) { out.add(fn(l)); });
    return out;
  }

  std::size_t hash() const {
    std::size_t h = 0x9e3779b97f4a7c15ull;
    for (auto w : words_) h = h * 0x100000001b3ull ^ w;
    return h;
  }

  bool operator==(const LocSet&) const = default;

private:
  std::vector<std::uint64_t> words_;

  void trim() {
    while (!words_.empty() && words_.back() == 0) words_.pop_back();
  }
};

// Sign lattice for integers.
enum class Sign : std::uint8_t { Bot, Neg, Zero, Pos, Top };

// Boolean lattice.
enum class BoolAbs : std::uint8_t { Bot, False, True, Top };

// String presence lattice (strings carry no further structure).
enum class StrAbs : std::uint8_t { Bot, Top };

// Taint lattice; Public is bottom.
enum class Taint : std::uint8_t { Public, Secret };

Sign sign_join(Sign a, Sign b);
Sign sign_meet(Sign a, Sign b);
bool sign_leq(Sign a, Sign b);
Sign sign_of(std::int64_t n);

BoolAbs bool_join(BoolAbs a, BoolAbs b);
BoolAbs bool_meet(BoolAbs a, BoolAbs b);
bool bool_leq(BoolAbs a, BoolAbs b);
BoolAbs bool_of(bool b);

inline StrAbs str_join(StrAbs a, StrAbs b) { return a == StrAbs::Top || b == StrAbs::Top ? StrAbs::Top : StrAbs::Bot; }
inline StrAbs str_meet(StrAbs a, StrAbs b) { return a == StrAbs::Top && b == StrAbs::Top ? StrAbs::Top : StrAbs::Bot; }
inline bool str_leq(StrAbs a, StrAbs b) { return a == StrAbs::Bot || b == StrAbs::Top; }

inline Taint taint_join(Taint a, Taint b) { return a == Taint::Secret || b == Taint::Secret ? Taint::Secret : Taint::Public; }
inline Taint taint_meet(Taint a, Taint b) { return a == Taint::Secret && b == Taint::Secret ? Taint::Secret : Taint::Public; }
inline bool taint_leq(Taint a, Taint b) { return a == Taint::Public || b == Taint::Secret; }

// Product abstract value: location set x sign x bool x string presence x taint.
// The bottom element (null's abstraction) has every component at bottom.
struct AbsValue {
  LocSet locs;
  Sign sign = Sign::Bot;
  BoolAbs boolean = BoolAbs::Bot;
  StrAbs str = StrAbs::Bot;
  Taint taint = Taint::Public;

  bool is_bot() const {
    return locs.empty() && sign == Sign::Bot && boolean == BoolAbs::Bot &&
           str == StrAbs::Bot && taint == Taint::Public;
  }

  bool operator==(const AbsValue&) const = default;
};

AbsValue join(const AbsValue& a, const AbsValue& b);
AbsValue meet(const AbsValue& a, const AbsValue& b);
bool leq(const AbsValue& a, const AbsValue& b);
// Flow-insensitive comparison: locations match up to flavor flipping.
bool leq_nfs(const AbsValue& a, const AbsValue& b, std::uint32_t fs_count);

std::size_t hash_of(const AbsValue& v);

// Abstractions of constants and type defaults.
AbsValue bot_value();
AbsValue from_const_int(std::int64_t n);
AbsValue from_const_bool(bool b);
AbsValue from_const_string();
AbsValue zero_int();
AbsValue zero_bool();
AbsValue zero_string();
AbsValue top_int();
AbsValue top_bool();
AbsValue top_string();
AbsValue top_ref(LocSet compatible);

// Default field/register value for a declared type (references default to null).
AbsValue default_of_type(const frontend::TypeNode& t);

// Abstract operators.  Arithmetic is strict in the sign component, logic in
// the boolean component: an operand without a concretization of the right
// kind admits no non-stuck execution.
AbsValue abs_unop(frontend::UnOp op, const AbsValue& a);
AbsValue abs_binop(frontend::BinOp op, const AbsValue& a, const AbsValue& b);

// May-outcomes of a comparison.  Since null is below every abstract value and
// null == null holds, eq can never be definitely false (nor ne definitely
// true); the lt family is int-only and prunes when either side has no int.
struct CompResult {
  bool may_true;
  bool may_false;
};
CompResult abs_comp(frontend::CmpOp op, const AbsValue& a, const AbsValue& b);

// Abstract filters map flow-sensitive sites [0, F) to lift flags.
using Filter = LocSet;

inline Filter filter_join(Filter a, const Filter& b) {
  a |= b;
  return a;
}

// lift(v, k): flow-sensitive locations whose site is flagged become
// flow-insensitive; everything else (including primitives) is unchanged.
AbsValue lift_value(const AbsValue& v, const Filter& k, std::uint32_t fs_count);
// lift(v, 1*): applied when reading values out of flow-insensitive facts.
AbsValue lift_value_all(const AbsValue& v, std::uint32_t fs_count);

}  // namespace fstaint::absdomain
