#pragma once

#include <string>

#include "swarmrank/grammar.hpp"

namespace swarmrank {

/// Parse failure with source location (1-based).
class GrammarParseError : public Error {
public:
  GrammarParseError(Errc code, int line, int col, const std::string& msg)
      : Error(code, std::to_string(line) + ":" + std::to_string(col) + ": " + msg),
        line_(line),
        col_(col) {}

  int line() const { return line_; }
  int col() const { return col_; }

private:
  int line_;
  int col_;
};

/// Parses the grammar DSL:
///
///   grammar <name> {
///     start <State>;
///     terminal <Sort>[, <Sort>];
///     state <State> : <Sort> {
///       try <label> [where <guard>] -> <State>;
///       ...
///       else die;
///     }
///   }
///
/// Guards: TargetHasVotedOn, CurrentInSet(<set>), TargetInSet(<set>).
/// `#` starts a line comment. Rule labels must exist in `schema`.
TraversalGrammar parse_grammar(const std::string& text,
                               const Schema& schema = Schema::core(SchemaMode::MultipleDomains));

/// Canonical serialization: states in declaration order, rules in priority
/// order, single-space tokens, LF line endings. parse(serialize(g)) == g.
std::string serialize_grammar(const TraversalGrammar& g);

} // namespace swarmrank
