#include "subchar/wubi.hpp"

#include <fstream>
#include <sstream>

#include "subchar/utf8.hpp"

namespace subchar {

namespace {

bool is_wubi_letter(char c) { return c >= 'a' && c <= 'y'; }

char32_t single_scalar(const std::string& field, const std::string& what) {
  size_t pos = 0;
  const char32_t c = utf8::decode(field, pos);
  if (pos != field.size())
    throw TableError(what + " is not a single character: " + field);
  return c;
}

}  // namespace

bool is_wubi_code_shape(std::string_view s) {
  size_t i = 0;
  while (i < s.size() && is_wubi_letter(s[i]))
    ++i;
  if (i < 1 || i > 5)
    return false;
  const size_t letters_end = i;
  while (i < s.size() && s[i] >= '0' && s[i] <= '9')
    ++i;
  return i == s.size() && letters_end <= 5;
}

WubiTable WubiTable::load(std::istream& in) {
  WubiTable t;
  // Raw codes before disambiguation; tracks how many characters claimed
  // each code so collisions get suffixes 2, 3, ... in input order.
  std::unordered_map<std::string, int> claimed;
  std::string line;
  int lineno = 0;
  bool punct_section = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (line.empty())
      continue;
    if (line.rfind("#!", 0) == 0) {
      punct_section = true;
      continue;
    }
    if (line[0] == '#')
      continue;
    const size_t tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos)
      throw TableError("line " + std::to_string(lineno) +
                       ": expected exactly two tab-separated fields");
    const std::string left = line.substr(0, tab);
    const std::string right = line.substr(tab + 1);
    if (left.empty() || right.empty())
      throw TableError("line " + std::to_string(lineno) + ": empty field");
    const char32_t c = single_scalar(left, "line " + std::to_string(lineno) +
                                               ": character field");
    if (punct_section) {
      const char32_t ascii = single_scalar(
          right, "line " + std::to_string(lineno) + ": replacement field");
      if (ascii >= 0x80)
        throw TableError("line " + std::to_string(lineno) +
                         ": punctuation replacement must be ASCII");
      t.punct_[c] = ascii;
      continue;
    }
    for (char ch : right)
      if (!is_wubi_letter(ch))
        throw TableError("line " + std::to_string(lineno) +
                         ": code contains letter outside a-y: " + right);
    if (right.size() > 5)
      throw TableError("line " + std::to_string(lineno) +
                       ": code longer than 5 letters: " + right);
    if (t.to_code_.count(c))
      throw TableError("line " + std::to_string(lineno) +
                       ": duplicate character: " + left);
    std::string code = right;
    const int n = ++claimed[right];
    if (n > 1)
      code += std::to_string(n);
    t.to_code_[c] = code;
    t.from_code_[code] = c;
  }
  return t;
}

WubiTable WubiTable::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw TableError("cannot open table file: " + path);
  return load(in);
}

const std::string* WubiTable::code_for(char32_t c) const {
  const auto it = to_code_.find(c);
  return it == to_code_.end() ? nullptr : &it->second;
}

char32_t WubiTable::char_for(std::string_view code) const {
  const auto it = from_code_.find(code);
  return it == from_code_.end() ? 0 : it->second;
}

char32_t WubiTable::punct_for(char32_t c) const {
  const auto it = punct_.find(c);
  return it == punct_.end() ? 0 : it->second;
}

CodecToken WubiTable::encode_char(char32_t c) const {
  if (const std::string* code = code_for(c))
    return {TokenKind::WubiCode, *code};
  if (const char32_t ascii = punct_for(c))
    return {TokenKind::Punct, std::string(1, static_cast<char>(ascii))};
  std::string text(kEscapePrefix);
  utf8::append(text, c);
  return {TokenKind::Passthrough, text};
}

std::string WubiTable::decode_token(const CodecToken& t) const {
  switch (t.kind) {
    case TokenKind::WubiCode: {
      const char32_t c = char_for(t.text);
      if (c == 0)
        throw UnknownCodeError(t.text);
      return utf8::encode(c);
    }
    case TokenKind::Passthrough:
      return t.text.substr(kEscapePrefix.size());
    case TokenKind::Punct:
      return t.text;
  }
  throw std::logic_error("bad token kind");
}

std::vector<CodecToken> WubiTable::encode_sentence(std::string_view s) const {
  std::vector<CodecToken> out;
  size_t pos = 0;
  while (pos < s.size()) {
    const char32_t c = utf8::decode(s, pos);
    // Whitespace collapses to token boundaries.
    if (c == ' ' || c == '\t')
      continue;
    out.push_back(encode_char(c));
  }
  return out;
}

std::string WubiTable::decode_sentence(
    const std::vector<CodecToken>& tokens) const {
  std::string out;
  for (const auto& t : tokens)
    out += decode_token(t);
  return out;
}

std::string WubiTable::encode_sentence_str(std::string_view s) const {
  std::string out;
  for (const auto& t : encode_sentence(s)) {
    if (!out.empty())
      out.push_back(' ');
    out += t.text;
  }
  return out;
}

CodecToken WubiTable::classify(std::string_view token_text) const {
  if (token_text.rfind(kEscapePrefix, 0) == 0)
    return {TokenKind::Passthrough, std::string(token_text)};
  if (token_text.size() == 1 && static_cast<unsigned char>(token_text[0]) < 0x80 &&
      !is_wubi_letter(token_text[0]) &&
      !(token_text[0] >= '0' && token_text[0] <= '9'))
    return {TokenKind::Punct, std::string(token_text)};
  if (is_wubi_code_shape(token_text)) {
    if (char_for(token_text) == 0)
      throw UnknownCodeError(std::string(token_text));
    return {TokenKind::WubiCode, std::string(token_text)};
  }
  throw UnknownCodeError(std::string(token_text));
}

std::string WubiTable::decode_sentence_str(std::string_view line) const {
  std::string out;
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && line[i] == ' ')
      ++i;
    if (i >= line.size())
      break;
    size_t j = line.find(' ', i);
    if (j == std::string_view::npos)
      j = line.size();
    out += decode_token(classify(line.substr(i, j - i)));
    i = j;
  }
  return out;
}

std::string WubiTable::normalize_punct(std::string_view s) const {
  std::string out;
  size_t pos = 0;
  while (pos < s.size()) {
    const char32_t c = utf8::decode(s, pos);
    if (const char32_t ascii = punct_for(c))
      out.push_back(static_cast<char>(ascii));
    else
      utf8::append(out, c);
  }
  return out;
}

}  // namespace subchar
