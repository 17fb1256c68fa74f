#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "idxpar/diag.hpp"

namespace idxpar {

struct Token {
  enum class Kind {
    Ident,
    Int,
    KwParam,
    KwInt,
    KwFloat,
    KwFor,
    KwIf,
    KwElse,
    // punctuation / operators; `text` holds the spelling
    Punct,
    End,
  };
  Kind kind = Kind::End;
  std::string text;
  long long value = 0;  // Int
  int line = 1, col = 1;

  bool is(Kind k) const { return kind == k; }
  bool is_punct(std::string_view p) const { return kind == Kind::Punct && text == p; }
};

// `#pragma` lines, `//` and `/* */` comments are skipped as trivia.
std::vector<Token> lex(std::string_view source, std::vector<Diagnostic>& diags);

}  // namespace idxpar
