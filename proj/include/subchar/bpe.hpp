#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace subchar {

// End-of-word sentinel used as a standalone symbol during learning.
inline constexpr std::string_view kEow = "</w>";
// Continuation marker on every non-final symbol of a split token.
inline constexpr std::string_view kContinuation = "@@";

class BpeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using MergePair = std::pair<std::string, std::string>;

// Ordered list of learned merges; replay order is learning order.
class BpeModel {
 public:
  BpeModel() = default;
  explicit BpeModel(std::vector<MergePair> merges);
  BpeModel(std::initializer_list<MergePair> merges)
      : BpeModel(std::vector<MergePair>(merges)) {}

  const std::vector<MergePair>& merges() const { return merges_; }
  size_t size() const { return merges_.size(); }

  // Splits one token into output symbols, all but the last suffixed "@@".
  // Tokens whose merges fully reassemble them come back as one symbol.
  std::vector<std::string> split_token(std::string_view token) const;

  // Applies the model to one space-separated token line.
  std::string apply_line(std::string_view line) const;

  // Merge file format: one "left right" per line; "#version..." header
  // lines are ignored.
  static BpeModel load(std::istream& in);
  static BpeModel load_file(const std::string& path);
  void save(std::ostream& out) const;
  void save_file(const std::string& path) const;

 private:
  struct PairHash {
    size_t operator()(const MergePair& p) const {
      return std::hash<std::string>()(p.first) * 1000003u ^
             std::hash<std::string>()(p.second);
    }
  };

  std::vector<MergePair> merges_;
  std::unordered_map<MergePair, size_t, PairHash> rank_;
};

// Learns at most num_merges merges from a token-line stream. Stops early
// when no adjacent pair occurs at least twice. Ties break toward the
// lexicographically smallest (left, right) pair.
BpeModel learn_bpe(std::istream& corpus, size_t num_merges);
BpeModel learn_bpe_from_counts(
    const std::vector<std::pair<std::string, long>>& token_counts,
    size_t num_merges);

// Deletes every "@@ " and a trailing "@@"; inverse of apply_line.
std::string undo_bpe(std::string_view line);

// Symbol -> count over the BPE-applied corpus; map size is the model's
// effective vocabulary.
std::unordered_map<std::string, long> bpe_vocabulary(const BpeModel& model,
                                                     std::istream& corpus);

}  // namespace subchar
