#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "lampi/var.hpp"

namespace lampi {

// Raised by every parser in the project; position is a byte offset into the
// source text.
struct SyntaxError : std::runtime_error {
  size_t position;
  SyntaxError(const std::string& msg, size_t pos)
      : std::runtime_error(msg + " (at offset " + std::to_string(pos) + ")"),
        position(pos) {}
};

struct Token {
  enum Kind { Ident, Number, Symbol, End } kind;
  std::string text;
  int number = 0;
  int var_index = -1;  // for Ident: base!k suffix, -1 if absent
  size_t pos = 0;

  Var as_var() const { return Var{text, var_index}; }
};

// Whitespace-insensitive tokenizer shared by all surface grammars.
std::vector<Token> tokenize(const std::string& src);

// Token cursor with single-token lookahead plus mark/reset.
struct TokenStream {
  std::vector<Token> toks;
  size_t pos = 0;

  explicit TokenStream(const std::string& src) : toks(tokenize(src)) {}

  const Token& peek(size_t k = 0) const {
    size_t i = pos + k;
    return i < toks.size() ? toks[i] : toks.back();
  }
  const Token& next() {
    const Token& t = peek();
    if (t.kind != Token::End) pos++;
    return t;
  }
  bool at_end() const { return peek().kind == Token::End; }
  bool is_symbol(const std::string& s, size_t k = 0) const {
    const Token& t = peek(k);
    return t.kind == Token::Symbol && t.text == s;
  }
  bool accept_symbol(const std::string& s) {
    if (is_symbol(s)) {
      pos++;
      return true;
    }
    return false;
  }
  void expect_symbol(const std::string& s) {
    if (!accept_symbol(s))
      throw SyntaxError("expected '" + s + "', found '" + peek().text + "'",
                        peek().pos);
  }
  Var expect_ident() {
    const Token& t = peek();
    if (t.kind != Token::Ident)
      throw SyntaxError("expected identifier, found '" + t.text + "'", t.pos);
    pos++;
    return t.as_var();
  }
  int expect_number() {
    const Token& t = peek();
    if (t.kind != Token::Number)
      throw SyntaxError("expected number, found '" + t.text + "'", t.pos);
    pos++;
    return t.number;
  }
  void expect_end() const {
    if (!at_end())
      throw SyntaxError("unexpected trailing input '" + peek().text + "'",
                        peek().pos);
  }
};

}  // namespace lampi
