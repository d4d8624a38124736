#pragma once

#include <array>
#include <cstdint>
#include <istream>
#include <string>
#include <vector>

namespace subchar {

class BleuError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kBleuMaxOrder = 4;

// Corpus-level BLEU in the multi-bleu convention: clipped n-gram counts
// aggregated corpus-wide, geometric mean over orders 1..4, no smoothing
// (any zero precision zeroes the score).
struct BleuReport {
  std::array<uint64_t, kBleuMaxOrder> matched{};  // clipped matches per order
  std::array<uint64_t, kBleuMaxOrder> total{};    // hypothesis n-grams per order
  uint64_t hyp_length = 0;
  uint64_t ref_length = 0;

  double precision(int order) const {  // order in 1..4
    const auto t = total[order - 1];
    return t == 0 ? 0.0
                  : static_cast<double>(matched[order - 1]) /
                        static_cast<double>(t);
  }
  double brevity_penalty() const;
  double score() const;  // in [0, 100]

  // "BLEU = <score>, p1/p2/p3/p4 (BP=..., ratio=..., hyp_len=..., ref_len=...)"
  std::string to_string() const;
};

BleuReport corpus_bleu(const std::vector<std::string>& hypotheses,
                       const std::vector<std::string>& references);
BleuReport corpus_bleu(std::istream& hypotheses, std::istream& references);

}  // namespace subchar
