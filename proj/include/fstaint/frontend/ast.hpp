#pragma once

// Core syntax for the register-based input language: programs, classes,
// methods, statements, and the interning tables (symbols, types) shared by
// every later stage.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

namespace fstaint::frontend {

// Interned identifier (class, method, field names). Index into Program::syms.
using Sym = uint32_t;
// Interned type. Index into Program::types.
using TypeId = uint32_t;

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ValidateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Types

enum class TypeKind : uint8_t { Bool, Int, String, Void, Intent, Class, Array };

struct TypeNode {
  TypeKind kind;
  Sym cls = 0;       // TypeKind::Class
  TypeId elem = 0;   // TypeKind::Array
  bool operator==(const TypeNode&) const = default;
};

// Fixed slots in every Program's type pool.
inline constexpr TypeId kTypeBool = 0;
inline constexpr TypeId kTypeInt = 1;
inline constexpr TypeId kTypeString = 2;
inline constexpr TypeId kTypeVoid = 3;
inline constexpr TypeId kTypeIntent = 4;

inline bool is_prim_type(TypeKind k) {
  return k == TypeKind::Bool || k == TypeKind::Int || k == TypeKind::String;
}

// ---------------------------------------------------------------------------
// Registers and operands
//
// A method with `loc` locals, n parameters and (for non-static methods) an
// implicit receiver owns registers
//   r0 .. r_{loc-1}          locals
//   r_loc                    receiver (virtual methods only)
//   r_{loc+1} .. r_{loc+n}   parameters (r_loc .. for static methods)
//   then two distinguished registers: `ret` (call/operation result) and
//   `excpt` (pending exception), addressed by name only.

enum class RegKind : uint8_t { Plain, Res, Excpt };

struct Reg {
  RegKind kind = RegKind::Plain;
  uint16_t idx = 0;  // meaningful for Plain only
  bool operator==(const Reg&) const = default;
};

inline Reg reg(uint16_t i) { return Reg{RegKind::Plain, i}; }
inline Reg reg_res() { return Reg{RegKind::Res, 0}; }
inline Reg reg_excpt() { return Reg{RegKind::Excpt, 0}; }

struct LhsReg {
  Reg r;
  bool operator==(const LhsReg&) const = default;
};
struct LhsField {
  Reg obj;
  Sym field;
  bool operator==(const LhsField&) const = default;
};
struct LhsArray {
  Reg arr, idx;
  bool operator==(const LhsArray&) const = default;
};
struct LhsStatic {
  Sym cls, field;
  bool operator==(const LhsStatic&) const = default;
};
using Lhs = std::variant<LhsReg, LhsField, LhsArray, LhsStatic>;

struct ConstNull {
  bool operator==(const ConstNull&) const = default;
};
// Literal operand: integer, boolean, string, or null.
using Const = std::variant<int64_t, bool, std::string, ConstNull>;

using Rhs = std::variant<Lhs, Const>;

// ---------------------------------------------------------------------------
// Statements

enum class BinOp : uint8_t { Add, Sub, Mul, Div, Rem, And, Or, Xor };
enum class UnOp : uint8_t { Neg, Not };
enum class CmpOp : uint8_t { Lt, Le, Gt, Ge, Eq, Ne };

struct StGoto {
  uint32_t target;
  bool operator==(const StGoto&) const = default;
};
struct StIf {
  CmpOp op;
  Reg a, b;
  uint32_t target;  // fallthrough is pc+1
  bool operator==(const StIf&) const = default;
};
struct StMove {
  Lhs lhs;
  Rhs rhs;
  bool operator==(const StMove&) const = default;
};
struct StUnOp {
  UnOp op;
  Reg dst, src;
  bool operator==(const StUnOp&) const = default;
};
struct StBinOp {
  BinOp op;
  Reg dst, a, b;
  bool operator==(const StBinOp&) const = default;
};
struct StNew {
  Reg dst;
  Sym cls;
  bool operator==(const StNew&) const = default;
};
struct StNewArray {
  Reg dst, len;
  TypeId elem;
  bool operator==(const StNewArray&) const = default;
};
struct StNewIntent {
  Reg dst;
  Sym cls;  // target activity class
  bool operator==(const StNewIntent&) const = default;
};
struct StPutExtra {  // intent, key, value
  Reg intent, key, value;
  bool operator==(const StPutExtra&) const = default;
};
struct StGetExtra {  // result goes to `ret`
  Reg intent, key;
  TypeId ty;
  bool operator==(const StGetExtra&) const = default;
};
struct StInvoke {
  Reg obj;
  Sym mth;
  std::vector<Reg> args;
  bool operator==(const StInvoke&) const = default;
};
struct StSInvoke {
  Sym cls, mth;
  std::vector<Reg> args;
  bool operator==(const StSInvoke&) const = default;
};
struct StReturn {
  bool operator==(const StReturn&) const = default;
};
struct StThrow {
  Reg src;
  bool operator==(const StThrow&) const = default;
};
struct StMoveException {  // copies the pending exception out of `excpt`
  Reg dst;
  bool operator==(const StMoveException&) const = default;
};
struct StCheckCast {  // execution continues only if the cast holds
  Reg src;
  TypeId ty;
  bool operator==(const StCheckCast&) const = default;
};
struct StInstanceOf {
  Reg dst, src;
  TypeId ty;
  bool operator==(const StInstanceOf&) const = default;
};
struct StMonitorEnter {
  Reg obj;
  bool operator==(const StMonitorEnter&) const = default;
};
struct StMonitorExit {
  Reg obj;
  bool operator==(const StMonitorExit&) const = default;
};
struct StStartThread {
  Reg obj;
  bool operator==(const StStartThread&) const = default;
};
struct StInterrupt {
  Reg obj;
  bool operator==(const StInterrupt&) const = default;
};
struct StInterrupted {  // reads and clears the interrupt flag; result in `ret`
  Reg obj;
  bool operator==(const StInterrupted&) const = default;
};
struct StIsInterrupted {  // reads the interrupt flag; result in `ret`
  Reg obj;
  bool operator==(const StIsInterrupted&) const = default;
};
struct StJoin {
  Reg obj;
  bool operator==(const StJoin&) const = default;
};
struct StWait {
  Reg obj;
  bool operator==(const StWait&) const = default;
};
struct StStartActivity {
  Reg intent;
  bool operator==(const StStartActivity&) const = default;
};

using Statement =
    std::variant<StGoto, StIf, StMove, StUnOp, StBinOp, StNew, StNewArray,
                 StNewIntent, StPutExtra, StGetExtra, StInvoke, StSInvoke,
                 StReturn, StThrow, StMoveException, StCheckCast, StInstanceOf,
                 StMonitorEnter, StMonitorExit, StStartThread, StInterrupt,
                 StInterrupted, StIsInterrupted, StJoin, StWait,
                 StStartActivity>;

// ---------------------------------------------------------------------------
// Declarations

struct Handler {
  uint32_t pc_lo, pc_hi;  // inclusive statement range
  Sym cls;                // caught class
  uint32_t target;        // handler entry pc
  bool operator==(const Handler&) const = default;
};

struct FieldDef {
  Sym name;
  TypeId ty;
  bool is_static = false;  // static fields live in the global static store
  bool operator==(const FieldDef&) const = default;
};

struct MethodDef {
  Sym name;
  std::vector<TypeId> params;
  TypeId ret;
  bool is_static = false;
  uint32_t loc = 0;  // number of local registers
  std::vector<Statement> body;
  std::vector<Handler> handlers;

  bool operator==(const MethodDef&) const = default;

  // Register file layout (see the comment above Reg).
  uint32_t reg_count() const {
    return loc + (is_static ? 0u : 1u) + static_cast<uint32_t>(params.size()) +
           2u;
  }
  uint32_t this_reg() const { return loc; }  // virtual methods only
  uint32_t param_reg(uint32_t j) const {
    return loc + (is_static ? 0u : 1u) + j;
  }
  uint32_t res_reg() const { return reg_count() - 2; }
  uint32_t excpt_reg() const { return reg_count() - 1; }
  uint32_t resolve(Reg r) const {
    switch (r.kind) {
      case RegKind::Res: return res_reg();
      case RegKind::Excpt: return excpt_reg();
      default: return r.idx;
    }
  }
};

struct ClassDef {
  Sym name;
  Sym super;                     // == name for the root class Object
  std::vector<Sym> interfaces;   // implemented interfaces
  bool is_interface = false;
  bool is_builtin = false;
  std::vector<FieldDef> fields;  // own fields only; see Hierarchy::fields_of
  std::vector<MethodDef> methods;

  bool operator==(const ClassDef&) const = default;
};

// ---------------------------------------------------------------------------
// Program

struct ProgramPoint {
  uint32_t cls = 0, mth = 0, pc = 0;  // indices into Program::classes etc.
  bool operator==(const ProgramPoint&) const = default;
  auto operator<=>(const ProgramPoint&) const = default;
};

struct Program {
  std::vector<std::string> syms;
  std::unordered_map<std::string, Sym> sym_ids;
  std::vector<TypeNode> types;
  std::vector<ClassDef> classes;
  std::unordered_map<Sym, uint32_t> class_ids;  // name -> index

  Program();  // interns the fixed type slots

  Sym intern(std::string_view s);
  std::optional<Sym> find_sym(std::string_view s) const;
  const std::string& name(Sym s) const { return syms[s]; }

  TypeId intern_type(const TypeNode& t);
  TypeId class_type(Sym c) { return intern_type({TypeKind::Class, c, 0}); }
  TypeId array_type(TypeId elem) {
    return intern_type({TypeKind::Array, 0, elem});
  }
  const TypeNode& type(TypeId t) const { return types[t]; }

  const ClassDef* find_class(Sym name) const;
  const ClassDef& cls(uint32_t id) const { return classes[id]; }
  const Statement& stmt(const ProgramPoint& pp) const {
    return classes[pp.cls].methods[pp.mth].body[pp.pc];
  }
  const MethodDef& method(const ProgramPoint& pp) const {
    return classes[pp.cls].methods[pp.mth];
  }
};

}  // namespace fstaint::frontend
