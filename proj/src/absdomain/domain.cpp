#include "fstaint/absdomain/domain.hpp"

namespace fstaint::absdomain {

using frontend::BinOp;
using frontend::CmpOp;
using frontend::TypeKind;
using frontend::UnOp;

Sign sign_join(Sign a, Sign b) {
  if (a == b || b == Sign::Bot) return a;
  if (a == Sign::Bot) return b;
  return Sign::Top;
}

Sign sign_meet(Sign a, Sign b) {
  if (a == b || b == Sign::Top) return a;
  if (a == Sign::Top) return b;
  return Sign::Bot;
}

bool sign_leq(Sign a, Sign b) { return a == Sign::Bot || a == b || b == Sign::Top; }

Sign sign_of(std::int64_t n) { return n < 0 ? Sign::Neg : n > 0 ? Sign::Pos : Sign::Zero; }

BoolAbs bool_join(BoolAbs a, BoolAbs b) {
  if (a == b || b == BoolAbs::Bot) return a;
  if (a == BoolAbs::Bot) return b;
  return BoolAbs::Top;
}

BoolAbs bool_meet(BoolAbs a, BoolAbs b) {
  if (a == b || b == BoolAbs::Top) return a;
  if (a == BoolAbs::Top) return b;
  return BoolAbs::Bot;
}

bool bool_leq(BoolAbs a, BoolAbs b) { return a == BoolAbs::Bot || a == b || b == BoolAbs::Top; }

BoolAbs bool_of(bool b) { return b ? BoolAbs::True : BoolAbs::False; }

AbsValue join(const AbsValue& a, const AbsValue& b) {
  AbsValue r;
  r.locs = a.locs;
  r.locs |= b.locs;
  r.sign = sign_join(a.sign, b.sign);
  r.boolean = bool_join(a.boolean, b.boolean);
  r.str = str_join(a.str, b.str);
  r.taint = taint_join(a.taint, b.taint);
  return r;
}

AbsValue meet(const AbsValue& a, const AbsValue& b) {
  AbsValue r;
  r.locs = a.locs;
  r.locs &= b.locs;
  r.sign = sign_meet(a.sign, b.sign);
  r.boolean = bool_meet(a.boolean, b.boolean);
  r.str = str_meet(a.str, b.str);
  r.taint = taint_meet(a.taint, b.taint);
  return r;
}

bool leq(const AbsValue& a, const AbsValue& b) {
  return a.locs.subset_of(b.locs) && sign_leq(a.sign, b.sign) &&
         bool_leq(a.boolean, b.boolean) && str_leq(a.str, b.str) &&
         taint_leq(a.taint, b.taint);
}

bool leq_nfs(const AbsValue& a, const AbsValue& b, std::uint32_t fs_count) {
  bool locs_ok = true;
  a.locs.for_each([&](Loc l) {
    if (!b.locs.test(l) && !b.locs.test(nfs_flip(l, fs_count))) locs_ok = false;
  });
  return locs_ok && sign_leq(a.sign, b.sign) && bool_leq(a.boolean, b.boolean) &&
         str_leq(a.str, b.str) && taint_leq(a.taint, b.taint);
}

std::size_t hash_of(const AbsValue& v) {
  std::size_t h = v.locs.hash();
  h = h * 31 + static_cast<std::size_t>(v.sign);
  h = h * 31 + static_cast<std::size_t>(v.boolean);
  h = h * 31 + static_cast<std::size_t>(v.str);
  h = h * 31 + static_cast<std::size_t>(v.taint);
  return h;
}

AbsValue bot_value() { return {}; }

AbsValue from_const_int(std::int64_t n) {
  AbsValue v;
  v.sign = sign_of(n);
  return v;
}

AbsValue from_const_bool(bool b) {
  AbsValue v;
  v.boolean = bool_of(b);
  return v;
}

AbsValue from_const_string() {
  AbsValue v;
  v.str = StrAbs::Top;
  return v;
}

AbsValue zero_int() {
  AbsValue v;
  v.sign = Sign::Zero;
  return v;
}

AbsValue zero_bool() {
  AbsValue v;
  v.boolean = BoolAbs::False;
  return v;
}

AbsValue zero_string() {
  AbsValue v;
  v.str = StrAbs::Top;
  return v;
}

AbsValue top_int() {
  AbsValue v;
  v.sign = Sign::Top;
  v.taint = Taint::Secret;
  return v;
}

AbsValue top_bool() {
  AbsValue v;
  v.boolean = BoolAbs::Top;
  v.taint = Taint::Secret;
  return v;
}

AbsValue top_string() {
  AbsValue v;
  v.str = StrAbs::Top;
  v.taint = Taint::Secret;
  return v;
}

AbsValue top_ref(LocSet compatible) {
  AbsValue v;
  v.locs = std::move(compatible);
  return v;
}

AbsValue default_of_type(const frontend::TypeNode& t) {
  switch (t.kind) {
    case TypeKind::Int: return zero_int();
    case TypeKind::Bool: return zero_bool();
    case TypeKind::String: return zero_string();
    default: return bot_value();  // references and void default to null
  }
}

namespace {

Sign sign_neg(Sign a) {
  switch (a) {
    case Sign::Neg: return Sign::Pos;
    case Sign::Pos: return Sign::Neg;
    default: return a;
  }
}

Sign sign_add(Sign a, Sign b) {
  if (a == Sign::Zero) return b;
  if (b == Sign::Zero) return a;
  if (a == b) return a;  // saturating arithmetic cannot flip the sign
  return Sign::Top;
}

Sign sign_mul(Sign a, Sign b) {
  if (a == Sign::Zero || b == Sign::Zero) return Sign::Zero;
  if (a == Sign::Top || b == Sign::Top) return Sign::Top;
  return a == b ? Sign::Pos : Sign::Neg;
}

// may_true/may_false of `a < b` over the int concretizations of two signs.
CompResult sign_lt(Sign a, Sign b) {
  if (a == Sign::Top || b == Sign::Top) return {true, true};
  if (a == b) return a == Sign::Zero ? CompResult{false, true} : CompResult{true, true};
  bool lt = (a == Sign::Neg) || (a == Sign::Zero && b == Sign::Pos);
  return {lt, !lt};
}

CompResult sign_le(Sign a, Sign b) {
  if (a == Sign::Top || b == Sign::Top) return {true, true};
  if (a == b) return a == Sign::Zero ? CompResult{true, false} : CompResult{true, true};
  bool le = (a == Sign::Neg) || (a == Sign::Zero && b == Sign::Pos);
  return {le, !le};
}

BoolAbs bool_and(BoolAbs a, BoolAbs b) {
  if (a == BoolAbs::False || b == BoolAbs::False) return BoolAbs::False;
  if (a == BoolAbs::True && b == BoolAbs::True) return BoolAbs::True;
  return BoolAbs::Top;
}

BoolAbs bool_or(BoolAbs a, BoolAbs b) {
  if (a == BoolAbs::True || b == BoolAbs::True) return BoolAbs::True;
  if (a == BoolAbs::False && b == BoolAbs::False) return BoolAbs::False;
  return BoolAbs::Top;
}

BoolAbs bool_xor(BoolAbs a, BoolAbs b) {
  if (a == BoolAbs::Top || b == BoolAbs::Top) return BoolAbs::Top;
  return a == b ? BoolAbs::False : BoolAbs::True;
}

BoolAbs bool_not(BoolAbs a) {
  switch (a) {
    case BoolAbs::True: return BoolAbs::False;
    case BoolAbs::False: return BoolAbs::True;
    default: return a;
  }
}

}  // namespace

AbsValue abs_unop(UnOp op, const AbsValue& a) {
  AbsValue r;
  if (op == UnOp::Neg) {
    if (a.sign == Sign::Bot) return r;
    r.sign = sign_neg(a.sign);
  } else {
    if (a.boolean == BoolAbs::Bot) return r;
    r.boolean = bool_not(a.boolean);
  }
  r.taint = a.taint;
  return r;
}

AbsValue abs_binop(BinOp op, const AbsValue& a, const AbsValue& b) {
  AbsValue r;
  switch (op) {
    case BinOp::And:
    case BinOp::Or:
    case BinOp::Xor:
      if (a.boolean == BoolAbs::Bot || b.boolean == BoolAbs::Bot) return r;
      r.boolean = op == BinOp::And   ? bool_and(a.boolean, b.boolean)
                  : op == BinOp::Or  ? bool_or(a.boolean, b.boolean)
                                     : bool_xor(a.boolean, b.boolean);
      break;
    default:
      if (a.sign == Sign::Bot || b.sign == Sign::Bot) return r;
      switch (op) {
        case BinOp::Add: r.sign = sign_add(a.sign, b.sign); break;
        case BinOp::Sub: r.sign = sign_add(a.sign, sign_neg(b.sign)); break;
        case BinOp::Mul: r.sign = sign_mul(a.sign, b.sign); break;
        case BinOp::Div:
        case BinOp::Rem:
          // A definitely-zero divisor admits no non-stuck execution.
          if (b.sign == Sign::Zero) return r;
          r.sign = a.sign == Sign::Zero ? Sign::Zero : Sign::Top;
          break;
        default: break;
      }
  }
  r.taint = taint_join(a.taint, b.taint);
  return r;
}

CompResult abs_comp(CmpOp op, const AbsValue& a, const AbsValue& b) {
  switch (op) {
    case CmpOp::Lt:
    case CmpOp::Le:
    case CmpOp::Gt:
    case CmpOp::Ge: {
      if (a.sign == Sign::Bot || b.sign == Sign::Bot) return {false, false};
      switch (op) {
        case CmpOp::Lt: return sign_lt(a.sign, b.sign);
        case CmpOp::Le: return sign_le(a.sign, b.sign);
        case CmpOp::Gt: return sign_lt(b.sign, a.sign);
        default: return sign_le(b.sign, a.sign);
      }
    }
    case CmpOp::Eq:
    case CmpOp::Ne: {
      // Null concretizes below every value and null == null holds, so a
      // differing defined pair is the only question.  Ints differ unless both
      // are exactly zero; bools differ when the components overlap opposite
      // constants; any string or pointer admits a differing defined pair.
      bool ints_differ =
          (a.sign != Sign::Bot && b.sign != Sign::Bot) &&
          !(a.sign == Sign::Zero && b.sign == Sign::Zero);
      bool a_may_true = a.boolean == BoolAbs::True || a.boolean == BoolAbs::Top;
      bool a_may_false = a.boolean == BoolAbs::False || a.boolean == BoolAbs::Top;
      bool b_may_true = b.boolean == BoolAbs::True || b.boolean == BoolAbs::Top;
      bool b_may_false = b.boolean == BoolAbs::False || b.boolean == BoolAbs::Top;
      bool bools_differ = (a_may_true && b_may_false) || (a_may_false && b_may_true);
      bool strs_differ = a.str == StrAbs::Top && b.str == StrAbs::Top;
      bool refs_differ = !a.locs.empty() || !b.locs.empty();
      bool unequal_pair = ints_differ || bools_differ || strs_differ || refs_differ;
      if (op == CmpOp::Eq) return {true, unequal_pair};
      return {unequal_pair, true};
    }
  }
  return {true, true};
}

AbsValue lift_value(const AbsValue& v, const Filter& k, std::uint32_t fs_count) {
  AbsValue r = v;
  r.locs = v.locs.mapped([&](Loc l) { return l < fs_count && k.test(l) ? l + fs_count : l; });
  return r;
}

AbsValue lift_value_all(const AbsValue& v, std::uint32_t fs_count) {
  AbsValue r = v;
  r.locs = v.locs.mapped([&](Loc l) { return l < fs_count ? l + fs_count : l; });
  return r;
}

}  // namespace fstaint::absdomain
