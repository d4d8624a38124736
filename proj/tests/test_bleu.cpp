#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include "subchar/bleu.hpp"

using namespace subchar;

namespace {

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string t;
  while (is >> t)
    out.push_back(t);
  return out;
}

// Brute-force BLEU: enumerates n-grams as token vectors, no hashing or
// aggregation tricks. Kept independent of the library implementation.
double oracle_bleu(const std::vector<std::string>& hyps,
                   const std::vector<std::string>& refs) {
  double matched[4] = {0, 0, 0, 0};
  double total[4] = {0, 0, 0, 0};
  double hyp_len = 0, ref_len = 0;
  for (size_t i = 0; i < hyps.size(); ++i) {
    const auto h = split(hyps[i]);
    const auto r = split(refs[i]);
    hyp_len += h.size();
    ref_len += r.size();
    for (int n = 1; n <= 4; ++n) {
      std::map<std::vector<std::string>, int> hc, rc;
      for (size_t k = 0; k + n <= h.size(); ++k)
        hc[std::vector<std::string>(h.begin() + k, h.begin() + k + n)]++;
      for (size_t k = 0; k + n <= r.size(); ++k)
        rc[std::vector<std::string>(r.begin() + k, r.begin() + k + n)]++;
      for (const auto& [gram, c] : hc) {
        total[n - 1] += c;
        auto it = rc.find(gram);
        if (it != rc.end())
          matched[n - 1] += std::min(c, it->second);
      }
    }
  }
  double log_sum = 0;
  for (int n = 0; n < 4; ++n) {
    if (total[n] == 0 || matched[n] == 0)
      return 0.0;
    log_sum += std::log(matched[n] / total[n]);
  }
  const double bp =
      hyp_len > ref_len ? 1.0 : std::exp(1.0 - ref_len / hyp_len);
  return bp * std::exp(log_sum / 4.0) * 100.0;
}

}  // namespace

TEST_CASE("identity scores 100") {
  BleuReport r = corpus_bleu({"a b c d"}, {"a b c d"});
  for (int n = 1; n <= 4; ++n)
    CHECK(r.precision(n) == 1.0);
  CHECK(r.brevity_penalty() == 1.0);
  CHECK(r.score() == doctest::Approx(100.0));
}

TEST_CASE("hand-derived 5-token example") {
  // Bigram matches: ab, cd, de (not bc); trigram match: cde only.
  BleuReport r = corpus_bleu({"a b c d e"}, {"c d e a b"});
  CHECK(r.precision(1) == doctest::Approx(1.0));
  CHECK(r.precision(2) == doctest::Approx(3.0 / 4.0));
  CHECK(r.precision(3) == doctest::Approx(1.0 / 3.0));
  CHECK(r.precision(4) == doctest::Approx(0.0));
  CHECK(r.score() == 0.0);
}

TEST_CASE("clipping credits each reference n-gram at most its count") {
  BleuReport r = corpus_bleu({"the the the"}, {"the cat"});
  CHECK(r.precision(1) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("errors") {
  CHECK_THROWS_AS(corpus_bleu({"a"}, {"a", "b"}), BleuError);
  CHECK_THROWS_AS(corpus_bleu({}, {}), BleuError);
}

TEST_CASE("report line format") {
  BleuReport r = corpus_bleu({"a b c d"}, {"a b c d"});
  const std::string line = r.to_string();
  CHECK(line.rfind("BLEU = 100.00, 100.0/100.0/100.0/100.0 (BP=1.000", 0) == 0);
}

TEST_CASE("sentence order permutation invariance") {
  const std::vector<std::string> hyp = {"a b", "c d e", "a a c"};
  const std::vector<std::string> ref = {"a b c", "c d", "a c c"};
  BleuReport r1 = corpus_bleu(hyp, ref);
  BleuReport r2 = corpus_bleu({hyp[2], hyp[0], hyp[1]},
                              {ref[2], ref[0], ref[1]});
  CHECK(r1.score() == doctest::Approx(r2.score()).epsilon(1e-12));
  CHECK(r1.matched == r2.matched);
  CHECK(r1.total == r2.total);
}

TEST_CASE("token renaming invariance") {
  BleuReport r1 = corpus_bleu({"a b a c"}, {"a c a b"});
  BleuReport r2 = corpus_bleu({"x y x z"}, {"x z x y"});
  CHECK(r1.score() == doctest::Approx(r2.score()).epsilon(1e-12));
}

TEST_CASE("oracle equivalence on random tiny corpora") {
  std::mt19937 rng(3);
  std::uniform_int_distribution<int> n_lines(1, 20);
  std::uniform_int_distribution<int> n_toks(1, 6);
  std::uniform_int_distribution<int> vocab(0, 4);
  for (int iter = 0; iter < 200; ++iter) {
    std::vector<std::string> hyp, ref;
    const int lines = n_lines(rng);
    for (int l = 0; l < lines; ++l) {
      auto mk = [&] {
        std::string s;
        const int nt = n_toks(rng);
        for (int t = 0; t < nt; ++t) {
          if (t)
            s.push_back(' ');
          s.push_back(static_cast<char>('a' + vocab(rng)));
        }
        return s;
      };
      hyp.push_back(mk());
      ref.push_back(mk());
    }
    const double expected = oracle_bleu(hyp, ref);
    const double actual = corpus_bleu(hyp, ref).score();
    REQUIRE(std::abs(actual - expected) < 1e-9);
    REQUIRE(actual >= 0.0);
    REQUIRE(actual <= 100.0 + 1e-9);
  }
}

TEST_CASE("score 100 only for token-identical corpora (random probes)") {
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> n_toks(4, 8);
  std::uniform_int_distribution<int> vocab(0, 3);
  for (int iter = 0; iter < 200; ++iter) {
    std::string h, r;
    const int nt = n_toks(rng);
    bool same = true;
    for (int t = 0; t < nt; ++t) {
      if (t) {
        h.push_back(' ');
        r.push_back(' ');
      }
      const char a = static_cast<char>('a' + vocab(rng));
      const char b = static_cast<char>('a' + vocab(rng));
      h.push_back(a);
      r.push_back(b);
      same = same && a == b;
    }
    const double score = corpus_bleu({h}, {r}).score();
    if (same)
      CHECK(score == doctest::Approx(100.0));
    else
      CHECK(score < 100.0);
  }
}
