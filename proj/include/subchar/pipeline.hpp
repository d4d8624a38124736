#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "subchar/bpe.hpp"
#include "subchar/wubi.hpp"

namespace subchar {

class PipelineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CorpusStats {
  uint64_t sentences = 0;
  uint64_t tokens = 0;
  uint64_t distinct_tokens = 0;

  // Exact rational tokens/sentences; 0 for an empty corpus.
  double avg_tokens_per_sentence() const {
    return sentences == 0 ? 0.0
                          : static_cast<double>(tokens) /
                                static_cast<double>(sentences);
  }

  std::string to_key_value() const;
  std::string to_json() const;
};

enum class Side { SourceZh, TargetEn };

struct PipelineConfig {
  std::string table_path;
  size_t bpe_merges = 0;
  Side side = Side::SourceZh;
  bool lowercase_en = false;
  bool filter_digits = false;  // drop lines containing ASCII digits
  bool parallel = true;
};

struct AlignmentReport {
  uint64_t src_lines = 0;
  uint64_t tgt_lines = 0;
  // First index (0-based) past the shorter stream when counts differ.
  std::optional<uint64_t> first_mismatch;
  std::vector<uint64_t> empty_side_indices;  // empty on exactly one side

  bool ok() const { return !first_mismatch && empty_side_indices.empty(); }
  std::string to_string() const;
};

// One line of the Chinese preprocessing path: Wubi-encode, then BPE if a
// model is given.
std::string preprocess_zh_line(const WubiTable& table, const BpeModel* model,
                               std::string_view line);
// Inverse path: undo BPE, then decode Wubi codes back to characters.
std::string postprocess_zh_line(const WubiTable& table, std::string_view line);

// Streaming variants; line counts are preserved. Errors carry 1-based
// line numbers.
void preprocess_zh(const WubiTable& table, const BpeModel* model,
                   std::istream& in, std::ostream& out, bool parallel = true);
void postprocess_zh(const WubiTable& table, std::istream& in, std::ostream& out,
                    bool parallel = true);

// Whitespace split with leading/trailing ASCII punctuation detached as
// separate tokens; optional lowercasing stands in for truecasing.
std::string tokenize_en(std::string_view line, bool lowercase);

CorpusStats corpus_stats(std::istream& in);

AlignmentReport check_parallel(std::istream& src, std::istream& tgt);

bool line_has_digit(std::string_view line);

}  // namespace subchar
