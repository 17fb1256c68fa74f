#include "idxpar/lexer.hpp"

#include <cctype>
#include <map>

namespace idxpar {

namespace {
const std::map<std::string, Token::Kind, std::less<>> kKeywords = {
    {"param", Token::Kind::KwParam}, {"int", Token::Kind::KwInt},
    {"float", Token::Kind::KwFloat}, {"for", Token::Kind::KwFor},
    {"if", Token::Kind::KwIf},       {"else", Token::Kind::KwElse},
};
}  // namespace

std::vector<Token> lex(std::string_view src, std::vector<Diagnostic>& diags) {
  std::vector<Token> out;
  size_t i = 0;
  int line = 1, col = 1;

  auto advance = [&](size_t n) {
    for (size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  auto peek = [&](size_t off = 0) -> char { return i + off < src.size() ? src[i + off] : '\0'; };

  while (i < src.size()) {
    char c = peek();
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    if (c == '/' && peek(1) == '/') {
      while (i < src.size() && peek() != '\n') advance(1);
      continue;
    }
    if (c == '/' && peek(1) == '*') {
      advance(2);
      while (i < src.size() && !(peek() == '*' && peek(1) == '/')) advance(1);
      if (i >= src.size()) {
        diags.push_back({line, col, "unterminated block comment"});
        break;
      }
      advance(2);
      continue;
    }
    if (c == '#') {
      // annotation lines (e.g. inserted pragmas) are trivia to the parser
      while (i < src.size() && peek() != '\n') advance(1);
      continue;
    }

    Token t;
    t.line = line;
    t.col = col;

    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = i;
      while (i < src.size() &&
             (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_'))
        advance(1);
      t.text = std::string(src.substr(start, i - start));
      auto it = kKeywords.find(t.text);
      t.kind = it != kKeywords.end() ? it->second : Token::Kind::Ident;
      out.push_back(std::move(t));
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t start = i;
      while (i < src.size() && std::isdigit(static_cast<unsigned char>(peek()))) advance(1);
      if (peek() == '.') {
        diags.push_back({t.line, t.col, "floating-point literals are not supported"});
        while (i < src.size() && (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.'))
          advance(1);
        continue;
      }
      t.kind = Token::Kind::Int;
      t.text = std::string(src.substr(start, i - start));
      t.value = std::stoll(t.text);
      out.push_back(std::move(t));
      continue;
    }

    auto two = std::string{c, peek(1)};
    static const char* kTwo[] = {"==", "!=", "<=", ">=", "++"};
    bool matched2 = false;
    for (const char* p : kTwo) {
      if (two == p) {
        t.kind = Token::Kind::Punct;
        t.text = two;
        advance(2);
        out.push_back(std::move(t));
        matched2 = true;
        break;
      }
    }
    if (matched2) continue;

    static const std::string kOne = "()[]{};,=<>+-*";
    if (kOne.find(c) != std::string::npos) {
      t.kind = Token::Kind::Punct;
      t.text = std::string(1, c);
      advance(1);
      out.push_back(std::move(t));
      continue;
    }

    std::string msg = "unexpected character '" + std::string(1, c) + "'";
    if (c == '&' || c == '*') msg += " (pointers are not supported)";
    if (c == '%' || c == '/') msg = "operator '" + std::string(1, c) + "' is not supported";
    diags.push_back({line, col, msg});
    advance(1);
  }

  Token end;
  end.kind = Token::Kind::End;
  end.line = line;
  end.col = col;
  out.push_back(end);
  return out;
}

}  // namespace idxpar
