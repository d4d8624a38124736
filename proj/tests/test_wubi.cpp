#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <sstream>

#include "subchar/utf8.hpp"
#include "subchar/wubi.hpp"

using namespace subchar;

namespace {

WubiTable fixture() {
  return WubiTable::load_file(SUBCHAR_DATA_DIR "/wubi_table.tsv");
}

}  // namespace

TEST_CASE("load_table basic entries") {
  std::istringstream in("照\tjvko\n毫\typt\n");
  WubiTable t = WubiTable::load(in);
  CHECK(t.size() == 2);
  CHECK(*t.code_for(U'照') == "jvko");
  CHECK(*t.code_for(U'毫') == "ypt");
  CHECK(t.char_for("jvko") == U'照');
}

TEST_CASE("load_table empty stream") {
  std::istringstream in("");
  WubiTable t = WubiTable::load(in);
  CHECK(t.size() == 0);
}

TEST_CASE("load_table collision suffixing in input order") {
  std::istringstream in("甲\tabcd\n乙\tabcd\n");
  WubiTable t = WubiTable::load(in);
  CHECK(*t.code_for(U'甲') == "abcd");
  CHECK(*t.code_for(U'乙') == "abcd2");
  // decode(encode(x)) = x for both
  CHECK(t.decode_token(t.encode_char(U'甲')) == "甲");
  CHECK(t.decode_token(t.encode_char(U'乙')) == "乙");
}

TEST_CASE("load_table errors") {
  SUBCASE("not two fields") {
    std::istringstream in("照 jvko\n");
    CHECK_THROWS_AS(WubiTable::load(in), TableError);
  }
  SUBCASE("three fields") {
    std::istringstream in("照\tjvko\textra\n");
    CHECK_THROWS_AS(WubiTable::load(in), TableError);
  }
  SUBCASE("multi-character field") {
    std::istringstream in("照照\tjvko\n");
    CHECK_THROWS_AS(WubiTable::load(in), TableError);
  }
  SUBCASE("letter outside a-y") {
    std::istringstream in("照\tjvkz\n");
    CHECK_THROWS_AS(WubiTable::load(in), TableError);
  }
  SUBCASE("duplicate character") {
    std::istringstream in("照\tjvko\n照\tabcd\n");
    CHECK_THROWS_AS(WubiTable::load(in), TableError);
  }
}

TEST_CASE("encode_char kinds") {
  WubiTable t = fixture();
  const CodecToken zhao = t.encode_char(U'照');
  CHECK(zhao.kind == TokenKind::WubiCode);
  CHECK(zhao.text == "jvko");
  const CodecToken stop = t.encode_char(U'。');
  CHECK(stop.kind == TokenKind::Punct);
  CHECK(stop.text == ".");
  const CodecToken latin = t.encode_char(U'A');
  CHECK(latin.kind == TokenKind::Passthrough);
  CHECK(latin.text == "⟂A");
}

TEST_CASE("decode_token") {
  WubiTable t = fixture();
  CHECK(t.decode_token({TokenKind::WubiCode, "jvko"}) == "照");
  CHECK(t.decode_token({TokenKind::Passthrough, "⟂A"}) == "A");
  CHECK_THROWS_AS(t.decode_token({TokenKind::WubiCode, "zzzz"}),
                  UnknownCodeError);
}

TEST_CASE("encode_sentence matches the published rows") {
  WubiTable t = fixture();
  CHECK(t.encode_sentence_str("这种说法毫无根据。") ==
        "p tkh yu if ypt fq sve rndg .");
  CHECK(t.encode_sentence_str("毫无理由") == "ypt fq gj mh");
  CHECK(t.encode_sentence("").empty());
}

TEST_CASE("decode_sentence inverts encode with punct normalized") {
  WubiTable t = fixture();
  CHECK(t.decode_sentence_str("p tkh yu if ypt fq sve rndg .") ==
        "这种说法毫无根据.");
  CHECK(t.decode_sentence_str("ypt fq gj mh") == "毫无理由");
  CHECK(t.decode_sentence({}) == "");
}

TEST_CASE("decode_sentence_str rejects unknown codes") {
  WubiTable t = fixture();
  CHECK_THROWS_AS(t.decode_sentence_str("ypt zzzz"), UnknownCodeError);
  // Shape-valid code absent from the table
  CHECK_THROWS_AS(t.decode_sentence_str("qqqqq"), UnknownCodeError);
}

TEST_CASE("code alphabet shape") {
  WubiTable t = fixture();
  for (const auto& [c, code] : t.entries()) {
    CHECK(is_wubi_code_shape(code));
  }
}

TEST_CASE("injectivity over the whole table") {
  WubiTable t = fixture();
  std::unordered_map<std::string, char32_t> seen;
  for (const auto& [c, code] : t.entries()) {
    auto [it, inserted] = seen.emplace(code, c);
    CHECK(inserted);
  }
}

TEST_CASE("escape prefix is outside the code alphabet") {
  CHECK_FALSE(is_wubi_code_shape(std::string(kEscapePrefix) + "a"));
  CHECK_FALSE(is_wubi_code_shape(std::string(kEscapePrefix)));
}

TEST_CASE("randomized round trip equals punct normalization") {
  WubiTable t = fixture();
  std::vector<char32_t> pool;
  for (const auto& [c, code] : t.entries())
    pool.push_back(c);
  for (const auto& [c, ascii] : t.punct_map())
    pool.push_back(c);
  // Assorted passthrough scalars (no whitespace: spaces are boundaries).
  for (char32_t c : {U'A', U'z', U'9', U'€', U'語', U'x', U'Ж'})
    pool.push_back(c);

  std::mt19937 rng(42);
  std::uniform_int_distribution<size_t> pick(0, pool.size() - 1);
  std::uniform_int_distribution<int> len(0, 30);
  for (int iter = 0; iter < 2000; ++iter) {
    std::string s;
    const int n = len(rng);
    for (int i = 0; i < n; ++i)
      utf8::append(s, pool[pick(rng)]);
    const std::string round = t.decode_sentence(t.encode_sentence(s));
    REQUIRE(round == t.normalize_punct(s));
  }
}
