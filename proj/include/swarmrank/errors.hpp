#pragma once

#include <stdexcept>
#include <string>

namespace swarmrank {

enum class Errc {
  // graph
  MissingOwner,
  MissingParent,
  WrongReferentSort,
  UnknownNode,
  NegativeWeight,
  SchemaViolation,
  DuplicateEdge,
  EmptyDistribution,
  ZeroTotalWeight,
  // grammar
  UnknownGrammar,
  SyntaxError,
  UnknownLabel,
  UnknownGuard,
  DanglingState,
  SortMismatch,
  // engine
  ZeroVector,
  NoOutputEnergy,
  InvalidConfig,
  // aggregation
  UnknownProblem,
  NoCategorizations,
  NoHumans,
  MissingPayload,
  // cli / io
  IoError,
  ParseError,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string& msg)
      : std::runtime_error(std::string(errc_name(code)) + ": " + msg), code_(code) {}

  Errc code() const { return code_; }

private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& msg) { throw Error(code, msg); }

} // namespace swarmrank
