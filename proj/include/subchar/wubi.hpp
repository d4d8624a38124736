#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace subchar {

// Escape prefix for passthrough tokens. U+27C2, outside [a-y0-9], so no
// passthrough serialization collides with a Wubi code.
inline constexpr char32_t kEscapeChar = 0x27C2;
inline constexpr std::string_view kEscapePrefix = "⟂";

enum class TokenKind { WubiCode, Passthrough, Punct };

struct CodecToken {
  TokenKind kind;
  std::string text;

  bool operator==(const CodecToken&) const = default;
};

class TableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnknownCodeError : public std::runtime_error {
 public:
  explicit UnknownCodeError(const std::string& code)
      : std::runtime_error("unknown Wubi code: " + code), code_(code) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

// Bidirectional character<->code table with collision-disambiguated codes
// and a punctuation normalization map. Immutable after load.
class WubiTable {
 public:
  // Parses the table file format: lines `char<TAB>code`, `#` comments,
  // blank lines ignored, `#!` switches to the punctuation section with
  // lines `char<TAB>ascii`. Raw code collisions get digit suffixes in
  // stable input order (first keeps the bare code, then 2, 3, ...).
  static WubiTable load(std::istream& in);
  static WubiTable load_file(const std::string& path);

  bool has_char(char32_t c) const { return to_code_.count(c) != 0; }
  const std::string* code_for(char32_t c) const;
  // Returns 0 if the code is unknown.
  char32_t char_for(std::string_view code) const;
  char32_t punct_for(char32_t c) const;  // 0 if not mapped

  size_t size() const { return to_code_.size(); }

  CodecToken encode_char(char32_t c) const;
  std::string decode_token(const CodecToken& t) const;

  std::vector<CodecToken> encode_sentence(std::string_view s) const;
  std::string decode_sentence(const std::vector<CodecToken>& tokens) const;

  // Serialized form: token texts joined by single spaces.
  std::string encode_sentence_str(std::string_view s) const;
  // Parses a space-separated token line and decodes it.
  std::string decode_sentence_str(std::string_view line) const;

  // Classifies one serialized token text. Throws UnknownCodeError for
  // tokens that look like Wubi codes but are absent, or match nothing.
  CodecToken classify(std::string_view token_text) const;

  // Replaces punctuation-map keys by their ASCII values, leaves the rest.
  std::string normalize_punct(std::string_view s) const;

  const std::unordered_map<char32_t, std::string>& entries() const {
    return to_code_;
  }
  const std::unordered_map<char32_t, char32_t>& punct_map() const {
    return punct_;
  }

 private:
  std::unordered_map<char32_t, std::string> to_code_;
  std::map<std::string, char32_t, std::less<>> from_code_;
  std::unordered_map<char32_t, char32_t> punct_;
};

// True for strings of shape [a-y]{1,5}[0-9]*.
bool is_wubi_code_shape(std::string_view s);

}  // namespace subchar
