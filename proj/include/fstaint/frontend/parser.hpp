#pragma once

// Line-oriented assembly front end: parsing, validation, the canonical
// printer (parse . print == id), and the sources/sinks configuration file.

#include <string>
#include <string_view>

#include "fstaint/frontend/ast.hpp"

namespace fstaint::frontend {

struct AnalysisConfig {
  // (class, method) pairs; a source call returns secret data, a sink call
  // must never receive secret arguments.
  std::vector<std::pair<Sym, Sym>> sources;
  std::vector<std::pair<Sym, Sym>> sinks;
  // Activity classes seeded as entry points; empty means "every activity".
  std::vector<Sym> entries;

  bool is_source(Sym c, Sym m) const {
    for (auto& p : sources)
      if (p.first == c && p.second == m) return true;
    return false;
  }
  bool is_sink(Sym c, Sym m) const {
    for (auto& p : sinks)
      if (p.first == c && p.second == m) return true;
    return false;
  }
};

// Parses a program, injects the built-in classes (Object, Throwable,
// IntExcpt, Activity, Thread) and validates the result. Throws ParseError
// or ValidateError with "file:line:col: message" positions.
Program parse_program(std::string_view text, std::string_view filename = "<input>");

// Parse without builtins/validation; used by the printer round-trip test.
Program parse_program_raw(std::string_view text,
                          std::string_view filename = "<input>");

void inject_builtins(Program& p);
void validate(const Program& p);

// Canonical textual form. For any program P (with builtins),
// parse_program(print_program(P)) is structurally identical to P.
std::string print_program(const Program& p, bool include_builtins = false);
std::string print_statement(const Program& p, const Statement& st);
std::string print_type(const Program& p, TypeId t);

// One directive per line: "Class method source", "Class method sink",
// "Class entry". '#' or ';' start comments.
AnalysisConfig parse_config(const Program& p, std::string_view text,
                            std::string_view filename = "<config>");

}  // namespace fstaint::frontend
