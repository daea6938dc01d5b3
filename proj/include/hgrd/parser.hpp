// Recursive-descent frontend for MiniCU (.mcu). Produces a resolved Program
// or a list of diagnostics; never both.
#pragma once

#include "hgrd/ast.hpp"

#include <optional>
#include <string>
#include <vector>

namespace hgrd {

enum class DiagKind {
  SyntaxError,
  UnboundIdentifier,
  NonConstantDivisor,
  TypeError,
  UnreachableCode,
};

struct Diagnostic {
  DiagKind kind = DiagKind::SyntaxError;
  SourceLoc loc;
  std::string message;

  std::string str() const;
};

struct ParseResult {
  std::optional<Program> program;
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return program.has_value(); }
};

ParseResult parseTranslationUnit(const std::string &source,
                                 const std::string &fileName);

} // namespace hgrd
