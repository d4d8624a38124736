#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <random>
#include <set>
#include <sstream>

#include "subchar/bpe.hpp"
#include "subchar/utf8.hpp"

using namespace subchar;

namespace {

// Independent learner: recounts every adjacent pair from scratch at each
// step and picks the maximum with the lexicographic tie-break. Only the
// algorithm's definition, no incremental bookkeeping.
std::vector<MergePair> oracle_learn(
    const std::vector<std::pair<std::string, long>>& token_counts,
    size_t num_merges) {
  std::vector<std::pair<std::vector<std::string>, long>> words;
  for (const auto& [tok, count] : token_counts) {
    auto syms = utf8::split_chars(tok);
    syms.emplace_back(kEow);
    words.emplace_back(std::move(syms), count);
  }
  std::vector<MergePair> merges;
  while (merges.size() < num_merges) {
    std::map<MergePair, long> counts;
    for (const auto& [syms, count] : words)
      for (size_t i = 0; i + 1 < syms.size(); ++i)
        counts[{syms[i], syms[i + 1]}] += count;
    MergePair best;
    long best_count = 0;
    for (const auto& [pair, count] : counts) {
      // std::map iterates pairs in ascending order, so strict > keeps the
      // lexicographically smallest pair among ties.
      if (count > best_count) {
        best_count = count;
        best = pair;
      }
    }
    if (best_count < 2)
      break;
    merges.push_back(best);
    for (auto& [syms, count] : words) {
      std::vector<std::string> next;
      for (size_t i = 0; i < syms.size();) {
        if (i + 1 < syms.size() && syms[i] == best.first &&
            syms[i + 1] == best.second) {
          next.push_back(best.first + best.second);
          i += 2;
        } else {
          next.push_back(syms[i]);
          ++i;
        }
      }
      syms = std::move(next);
    }
  }
  return merges;
}

BpeModel learn_from_string(const std::string& corpus, size_t merges) {
  std::istringstream in(corpus);
  return learn_bpe(in, merges);
}

}  // namespace

TEST_CASE("learn_bpe zero merges") {
  CHECK(learn_from_string("a b ab abc\n", 0).merges().empty());
}

TEST_CASE("learn_bpe counts pairs across token frequencies") {
  // {"ab": 3, "abc": 2}: (a,b) occurs 5 times and wins.
  BpeModel m = learn_from_string("ab ab ab abc abc\n", 1);
  REQUIRE(m.merges().size() == 1);
  CHECK(m.merges()[0] == MergePair{"a", "b"});
}

TEST_CASE("learn_bpe empty corpus") {
  CHECK(learn_from_string("", 5).merges().empty());
}

TEST_CASE("learned (p,t) merge splits ypt as y@@ pt") {
  // Make (p,t) the dominant pair.
  BpeModel m = learn_from_string("pt pt pt ypt\n", 1);
  REQUIRE(m.merges().size() == 1);
  CHECK(m.merges()[0] == MergePair{"p", "t"});
  CHECK(m.apply_line("ypt") == "y@@ pt");
}

TEST_CASE("apply_bpe") {
  SUBCASE("single merge splits the rest to characters") {
    BpeModel m({{"p", "t"}});
    CHECK(m.apply_line("ypt fq") == "y@@ pt f@@ q");
  }
  SUBCASE("model reassembling the other codes keeps them whole") {
    BpeModel m({{"p", "t"}, {"f", "q"}, {"g", "j"}, {"m", "h"}});
    CHECK(m.apply_line("ypt fq gj mh") == "y@@ pt fq gj mh");
  }
  SUBCASE("empty model splits to characters") {
    BpeModel m;
    CHECK(m.apply_line("ab") == "a@@ b");
  }
  SUBCASE("full reassembly emits the token unchanged") {
    BpeModel m({{"a", "b"}, {"ab", "c"}});
    CHECK(m.apply_line("abc") == "abc");
  }
  SUBCASE("rejects @@ in input") {
    BpeModel m;
    CHECK_THROWS_AS(m.apply_line("a@@b"), BpeError);
  }
}

TEST_CASE("undo_bpe") {
  CHECK(undo_bpe("y@@ pt fq gj mh") == "ypt fq gj mh");
  CHECK(undo_bpe("hello world") == "hello world");
  CHECK(undo_bpe("a@@ b@@ c") == "abc");
  CHECK(undo_bpe("") == "");
  CHECK(undo_bpe("a@@") == "a");
}

TEST_CASE("vocabulary counts") {
  SUBCASE("empty model") {
    BpeModel m;
    std::istringstream in("ab\n");
    auto v = bpe_vocabulary(m, in);
    CHECK(v.size() == 2);
    CHECK(v.at("a@@") == 1);
    CHECK(v.at("b") == 1);
  }
  SUBCASE("with merges") {
    BpeModel m({{"p", "t"}, {"f", "q"}});
    std::istringstream in("ypt fq\n");
    auto v = bpe_vocabulary(m, in);
    CHECK(v.size() == 3);
    CHECK(v.at("y@@") == 1);
    CHECK(v.at("pt") == 1);
    CHECK(v.at("fq") == 1);
  }
}

TEST_CASE("model file round trip and header handling") {
  BpeModel m({{"p", "t"}, {"y", "pt"}});
  std::ostringstream out;
  m.save(out);
  std::istringstream in("#version: 0.2\n" + out.str());
  BpeModel loaded = BpeModel::load(in);
  CHECK(loaded.merges() == m.merges());
}

TEST_CASE("duplicate merge pair rejected") {
  CHECK_THROWS_AS(BpeModel({{"a", "b"}, {"a", "b"}}), BpeError);
}

TEST_CASE("oracle equivalence on random small corpora") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> n_tokens(1, 50);
  std::uniform_int_distribution<int> tok_len(1, 6);
  std::uniform_int_distribution<int> letter(0, 3);  // tiny alphabet: ties
  std::uniform_int_distribution<long> count(1, 9);
  std::uniform_int_distribution<int> n_merges(0, 20);
  for (int iter = 0; iter < 100; ++iter) {
    std::vector<std::pair<std::string, long>> token_counts;
    std::map<std::string, long> seen;
    const int nt = n_tokens(rng);
    for (int i = 0; i < nt; ++i) {
      std::string tok;
      const int len = tok_len(rng);
      for (int k = 0; k < len; ++k)
        tok.push_back(static_cast<char>('a' + letter(rng)));
      seen[tok] += count(rng);
    }
    for (const auto& [tok, c] : seen)
      token_counts.emplace_back(tok, c);
    const size_t merges = n_merges(rng);
    const auto expected = oracle_learn(token_counts, merges);
    const auto actual = learn_bpe_from_counts(token_counts, merges).merges();
    REQUIRE(actual == expected);
  }
}

TEST_CASE("inversion: undo after apply is identity") {
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> n_merge(0, 10);
  std::uniform_int_distribution<int> n_tok(0, 12);
  std::uniform_int_distribution<int> tok_len(1, 8);
  std::uniform_int_distribution<int> letter(0, 4);
  for (int iter = 0; iter < 2000; ++iter) {
    // Random (not necessarily learnable) merge list over short symbols.
    std::vector<MergePair> merges;
    std::set<MergePair> used;
    const int nm = n_merge(rng);
    for (int i = 0; i < nm; ++i) {
      std::string l(1, static_cast<char>('a' + letter(rng)));
      std::string r(1, static_cast<char>('a' + letter(rng)));
      if (letter(rng) == 0)
        r = std::string(kEow);
      if (used.insert({l, r}).second)
        merges.push_back({l, r});
    }
    BpeModel model(merges);
    std::string line;
    const int nt = n_tok(rng);
    for (int t = 0; t < nt; ++t) {
      if (t)
        line.push_back(' ');
      const int len = tok_len(rng);
      for (int k = 0; k < len; ++k)
        line.push_back(static_cast<char>('a' + letter(rng)));
    }
    REQUIRE(undo_bpe(model.apply_line(line)) == line);
  }
}

TEST_CASE("monotone vocabulary bound") {
  const std::string corpus =
      "ypt fq gj mh\np tkh yu if ypt fq sve rndg\nypt ypt gj gj\n";
  std::set<std::string> base;
  for (char c : corpus)
    if (c != ' ' && c != '\n')
      base.insert(std::string(1, c));
  for (size_t k : {0u, 1u, 3u, 8u, 20u}) {
    std::istringstream in(corpus);
    BpeModel m = learn_bpe(in, k);
    std::istringstream in2(corpus);
    auto vocab = bpe_vocabulary(m, in2);
    // Count symbols with continuation markers stripped: each merge then
    // adds at most one new symbol string.
    std::set<std::string> stripped;
    for (const auto& [sym, count] : vocab) {
      std::string s = sym;
      if (s.size() >= 2 && s.compare(s.size() - 2, 2, "@@") == 0)
        s.resize(s.size() - 2);
      stripped.insert(s);
    }
    CHECK(stripped.size() <= base.size() + k);
    CHECK(stripped.size() >= 1);
  }
}

TEST_CASE("determinism: repeated learning is byte-identical") {
  const std::string corpus = "ab ab abc bc bc bc a b c abcd\n";
  const BpeModel a = learn_from_string(corpus, 10);
  const BpeModel b = learn_from_string(corpus, 10);
  CHECK(a.merges() == b.merges());
  CHECK(a.apply_line("abcd bc ab") == b.apply_line("abcd bc ab"));
}

TEST_CASE("idempotent reassembly") {
  const std::string corpus = "ab ab ab abc abc bcd bcd\n";
  BpeModel m = learn_from_string(corpus, 5);
  for (const std::string line : {"ab abc bcd", "abcd", "a b c d"}) {
    const std::string once = m.apply_line(line);
    CHECK(m.apply_line(undo_bpe(once)) == once);
  }
}
