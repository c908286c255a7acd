#include "swarmrank/grammar_dsl.hpp"

#include <cctype>
#include <sstream>

namespace swarmrank {

namespace {

struct Token {
  enum Kind { Ident, Punct, Arrow, End } kind = End;
  std::string text;
  int line = 1;
  int col = 1;
};

class Lexer {
public:
  explicit Lexer(const std::string& text) : text_(text) { advance(); }

  const Token& peek() const { return tok_; }

  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

private:
  void advance() {
    skip_ws();
    tok_.line = line_;
    tok_.col = col_;
    if (pos_ >= text_.size()) {
      tok_.kind = Token::End;
      tok_.text.clear();
      return;
    }
    char c = text_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        bump();
      tok_.kind = Token::Ident;
      tok_.text = text_.substr(start, pos_ - start);
      return;
    }
    if (c == '-' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '>') {
      bump();
      bump();
      tok_.kind = Token::Arrow;
      tok_.text = "->";
      return;
    }
    if (c == '{' || c == '}' || c == '(' || c == ')' || c == ';' || c == ':' || c == ',') {
      tok_.kind = Token::Punct;
      tok_.text = std::string(1, c);
      bump();
      return;
    }
    throw GrammarParseError(Errc::SyntaxError, line_, col_,
                            std::string("unexpected character '") + c + "'");
  }

  void skip_ws() {
    for (;;) {
      while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) bump();
      if (pos_ < text_.size() && text_[pos_] == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') bump();
        continue;
      }
      break;
    }
  }

  void bump() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  const std::string& text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
  Token tok_;
};

[[noreturn]] void err(Errc code, const Token& t, const std::string& msg) {
  throw GrammarParseError(code, t.line, t.col, msg);
}

Token expect_ident(Lexer& lx, const std::string& what) {
  Token t = lx.take();
  if (t.kind != Token::Ident) err(Errc::SyntaxError, t, "expected " + what);
  return t;
}

Token expect_keyword(Lexer& lx, const std::string& kw) {
  Token t = lx.take();
  if (t.kind != Token::Ident || t.text != kw)
    err(Errc::SyntaxError, t, "expected '" + kw + "'");
  return t;
}

void expect_punct(Lexer& lx, char c) {
  Token t = lx.take();
  if (t.kind != Token::Punct || t.text[0] != c)
    err(Errc::SyntaxError, t, std::string("expected '") + c + "'");
}

Sort expect_sort(Lexer& lx) {
  Token t = expect_ident(lx, "a node sort");
  if (t.text == "Human") return Sort::Human;
  if (t.text == "Domain") return Sort::Domain;
  if (t.text == "Problem") return Sort::Problem;
  if (t.text == "Solution") return Sort::Solution;
  err(Errc::SyntaxError, t, "unknown sort '" + t.text + "'");
}

EdgeGuard parse_guard(Lexer& lx) {
  Token t = expect_ident(lx, "a guard name");
  if (t.text == "TargetHasVotedOn") return EdgeGuard{GuardKind::TargetHasVotedOn, ""};
  if (t.text == "CurrentInSet" || t.text == "TargetInSet") {
    expect_punct(lx, '(');
    Token set = expect_ident(lx, "a node set name");
    expect_punct(lx, ')');
    GuardKind k = t.text == "CurrentInSet" ? GuardKind::CurrentInSet : GuardKind::TargetInSet;
    return EdgeGuard{k, set.text};
  }
  err(Errc::UnknownGuard, t, "unknown guard '" + t.text + "'");
}

} // namespace

TraversalGrammar parse_grammar(const std::string& text, const Schema& schema) {
  Lexer lx(text);
  expect_keyword(lx, "grammar");
  Token name = expect_ident(lx, "a grammar name");
  expect_punct(lx, '{');

  expect_keyword(lx, "start");
  Token start = expect_ident(lx, "a start state");
  expect_punct(lx, ';');

  std::set<Sort> terminals;
  if (lx.peek().kind == Token::Ident && lx.peek().text == "terminal") {
    lx.take();
    terminals.insert(expect_sort(lx));
    while (lx.peek().kind == Token::Punct && lx.peek().text == ",") {
      lx.take();
      terminals.insert(expect_sort(lx));
    }
    expect_punct(lx, ';');
  }

  std::vector<GrammarState> states;
  std::set<std::string> state_ids;
  std::vector<Token> next_refs;
  while (lx.peek().kind == Token::Ident && lx.peek().text == "state") {
    lx.take();
    Token sid = expect_ident(lx, "a state name");
    if (!state_ids.insert(sid.text).second)
      err(Errc::SyntaxError, sid, "duplicate state '" + sid.text + "'");
    expect_punct(lx, ':');
    Sort sort = expect_sort(lx);
    expect_punct(lx, '{');
    std::vector<Rule> rules;
    for (;;) {
      const Token& t = lx.peek();
      if (t.kind == Token::Ident && t.text == "try") {
        lx.take();
        Token label = expect_ident(lx, "an edge label");
        if (!schema.has_label(label.text))
          err(Errc::UnknownLabel, label, "label '" + label.text + "' is not in the schema");
        EdgeGuard guard;
        if (lx.peek().kind == Token::Ident && lx.peek().text == "where") {
          lx.take();
          guard = parse_guard(lx);
        }
        Token arrow = lx.take();
        if (arrow.kind != Token::Arrow) err(Errc::SyntaxError, arrow, "expected '->'");
        Token next = expect_ident(lx, "a next state");
        next_refs.push_back(next);
        expect_punct(lx, ';');
        rules.push_back(Rule{label.text, guard, next.text});
      } else if (t.kind == Token::Ident && t.text == "else") {
        lx.take();
        expect_keyword(lx, "die");
        expect_punct(lx, ';');
        break;
      } else {
        break;
      }
    }
    expect_punct(lx, '}');
    states.push_back(GrammarState{sid.text, sort, std::move(rules)});
  }
  expect_punct(lx, '}');
  Token trailing = lx.take();
  if (trailing.kind != Token::End) err(Errc::SyntaxError, trailing, "trailing input after grammar");

  if (!state_ids.count(start.text))
    err(Errc::DanglingState, start, "start state '" + start.text + "' is not declared");
  for (const auto& ref : next_refs)
    if (!state_ids.count(ref.text))
      err(Errc::DanglingState, ref, "state '" + ref.text + "' is not declared");

  return TraversalGrammar(name.text, std::move(states), start.text, std::move(terminals));
}

std::string serialize_grammar(const TraversalGrammar& g) {
  std::ostringstream out;
  out << "grammar " << g.name() << " {\n";
  out << "  start " << g.start_state() << ";\n";
  if (!g.terminal_sorts().empty()) {
    out << "  terminal";
    bool first = true;
    for (Sort s : g.terminal_sorts()) {
      const char* n = s == Sort::Human     ? "Human"
                      : s == Sort::Domain  ? "Domain"
                      : s == Sort::Problem ? "Problem"
                                           : "Solution";
      out << (first ? " " : ", ") << n;
      first = false;
    }
    out << ";\n";
  }
  for (const auto& st : g.states()) {
    const char* n = st.sort == Sort::Human     ? "Human"
                    : st.sort == Sort::Domain  ? "Domain"
                    : st.sort == Sort::Problem ? "Problem"
                                               : "Solution";
    out << "  state " << st.id << " : " << n << " {\n";
    for (const auto& r : st.rules) {
      out << "    try " << r.label;
      switch (r.guard.kind) {
        case GuardKind::None:
          break;
        case GuardKind::TargetHasVotedOn:
          out << " where TargetHasVotedOn";
          break;
        case GuardKind::CurrentInSet:
          out << " where CurrentInSet(" << r.guard.set_name << ")";
          break;
        case GuardKind::TargetInSet:
          out << " where TargetInSet(" << r.guard.set_name << ")";
          break;
      }
      out << " -> " << r.next_state << ";\n";
    }
    out << "    else die;\n";
    out << "  }\n";
  }
  out << "}\n";
  return out.str();
}

} // namespace swarmrank
