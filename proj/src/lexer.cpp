#include "lampi/lexer.hpp"

#include <cctype>

namespace lampi {

namespace {

const char* kSymbols3[] = {"(+)", "<->"};
const char* kSymbols2[] = {"<<", ">>", "<-", "<|", "|>", "->", "|-", "|="};
const char kSymbols1[] = "()[]{},.\\+*/|!?:;^&@=<>";

}  // namespace

std::vector<Token> tokenize(const std::string& src) {
  std::vector<Token> out;
  size_t i = 0, n = src.size();
  while (i < n) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      i++;
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = i;
      while (i < n && (std::isalnum(static_cast<unsigned char>(src[i])) ||
                       src[i] == '_'))
        i++;
      Token t{Token::Ident, src.substr(start, i - start), 0, -1, start};
      // base!k generated-name suffix
      if (i + 1 < n && src[i] == '!' &&
          std::isdigit(static_cast<unsigned char>(src[i + 1]))) {
        i++;
        size_t numstart = i;
        while (i < n && std::isdigit(static_cast<unsigned char>(src[i]))) i++;
        t.var_index = std::stoi(src.substr(numstart, i - numstart));
      }
      out.push_back(std::move(t));
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t start = i;
      while (i < n && std::isdigit(static_cast<unsigned char>(src[i]))) i++;
      Token t{Token::Number, src.substr(start, i - start), 0, -1, start};
      t.number = std::stoi(t.text);
      out.push_back(std::move(t));
      continue;
    }
    bool matched = false;
    for (const char* s : kSymbols3) {
      if (src.compare(i, 3, s) == 0) {
        out.push_back({Token::Symbol, s, 0, -1, i});
        i += 3;
        matched = true;
        break;
      }
    }
    if (matched) continue;
    for (const char* s : kSymbols2) {
      if (src.compare(i, 2, s) == 0) {
        out.push_back({Token::Symbol, s, 0, -1, i});
        i += 2;
        matched = true;
        break;
      }
    }
    if (matched) continue;
    if (std::string(kSymbols1).find(c) != std::string::npos) {
      out.push_back({Token::Symbol, std::string(1, c), 0, -1, i});
      i++;
      continue;
    }
    throw SyntaxError(std::string("unexpected character '") + c + "'", i);
  }
  out.push_back({Token::End, "<end>", 0, -1, n});
  return out;
}

}  // namespace lampi
