#include "subchar/pipeline.hpp"

#include <cctype>
#include <sstream>
#include <unordered_set>

#include "subchar/parallel.hpp"

namespace subchar {

std::string CorpusStats::to_key_value() const {
  std::ostringstream os;
  os << "sentences=" << sentences << " tokens=" << tokens
     << " avg_tokens_per_sentence=" << avg_tokens_per_sentence()
     << " distinct_tokens=" << distinct_tokens;
  return os.str();
}

std::string CorpusStats::to_json() const {
  std::ostringstream os;
  os << "{\"sentences\":" << sentences << ",\"tokens\":" << tokens
     << ",\"avg_tokens_per_sentence\":" << avg_tokens_per_sentence()
     << ",\"distinct_tokens\":" << distinct_tokens << "}";
  return os.str();
}

std::string AlignmentReport::to_string() const {
  std::ostringstream os;
  os << "src_lines=" << src_lines << " tgt_lines=" << tgt_lines;
  if (first_mismatch)
    os << " first_mismatch=" << *first_mismatch;
  if (!empty_side_indices.empty()) {
    os << " empty_side=[";
    for (size_t i = 0; i < empty_side_indices.size(); ++i)
      os << (i ? "," : "") << empty_side_indices[i];
    os << "]";
  }
  os << (ok() ? " ok" : " MISALIGNED");
  return os.str();
}

std::string preprocess_zh_line(const WubiTable& table, const BpeModel* model,
                               std::string_view line) {
  std::string encoded = table.encode_sentence_str(line);
  if (model)
    return model->apply_line(encoded);
  return encoded;
}

std::string postprocess_zh_line(const WubiTable& table, std::string_view line) {
  return table.decode_sentence_str(undo_bpe(line));
}

namespace {

LineFn with_line_numbers(std::function<std::string(const std::string&)> fn) {
  return [fn = std::move(fn)](const std::string& line, size_t lineno) {
    try {
      return fn(line);
    } catch (const std::exception& e) {
      throw PipelineError("line " + std::to_string(lineno) + ": " + e.what());
    }
  };
}

}  // namespace

void preprocess_zh(const WubiTable& table, const BpeModel* model,
                   std::istream& in, std::ostream& out, bool parallel) {
  TransformOptions opts;
  opts.parallel = parallel;
  transform_stream(in, out,
                   with_line_numbers([&](const std::string& line) {
                     return preprocess_zh_line(table, model, line);
                   }),
                   opts);
}

void postprocess_zh(const WubiTable& table, std::istream& in, std::ostream& out,
                    bool parallel) {
  TransformOptions opts;
  opts.parallel = parallel;
  transform_stream(in, out,
                   with_line_numbers([&](const std::string& line) {
                     return postprocess_zh_line(table, line);
                   }),
                   opts);
}

std::string tokenize_en(std::string_view line, bool lowercase) {
  std::vector<std::string> tokens;
  size_t i = 0;
  auto is_punct = [](char c) {
    return std::ispunct(static_cast<unsigned char>(c)) != 0;
  };
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i])))
      ++i;
    if (i >= line.size())
      break;
    size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j])))
      ++j;
    std::string_view word = line.substr(i, j - i);
    i = j;
    // Peel leading and trailing ASCII punctuation off the word.
    std::vector<std::string> leading, trailing;
    while (word.size() > 1 && is_punct(word.front())) {
      leading.emplace_back(1, word.front());
      word.remove_prefix(1);
    }
    while (word.size() > 1 && is_punct(word.back())) {
      trailing.emplace_back(1, word.back());
      word.remove_suffix(1);
    }
    for (auto& t : leading)
      tokens.push_back(std::move(t));
    tokens.emplace_back(word);
    for (auto it = trailing.rbegin(); it != trailing.rend(); ++it)
      tokens.push_back(std::move(*it));
  }
  std::string out;
  for (auto& t : tokens) {
    if (!out.empty())
      out.push_back(' ');
    if (lowercase)
      for (char& c : t)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    out += t;
  }
  return out;
}

CorpusStats corpus_stats(std::istream& in) {
  CorpusStats stats;
  std::unordered_set<std::string> distinct;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    ++stats.sentences;
    size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && line[i] == ' ')
        ++i;
      if (i >= line.size())
        break;
      size_t j = line.find(' ', i);
      if (j == std::string::npos)
        j = line.size();
      ++stats.tokens;
      distinct.insert(line.substr(i, j - i));
      i = j;
    }
  }
  stats.distinct_tokens = distinct.size();
  return stats;
}

AlignmentReport check_parallel(std::istream& src, std::istream& tgt) {
  AlignmentReport report;
  std::string s, t;
  uint64_t idx = 0;
  bool src_ok = true, tgt_ok = true;
  while (true) {
    src_ok = static_cast<bool>(std::getline(src, s));
    tgt_ok = static_cast<bool>(std::getline(tgt, t));
    if (!src_ok && !tgt_ok)
      break;
    if (src_ok)
      ++report.src_lines;
    if (tgt_ok)
      ++report.tgt_lines;
    if (src_ok != tgt_ok) {
      if (!report.first_mismatch)
        report.first_mismatch = idx;
    } else if (s.empty() != t.empty()) {
      report.empty_side_indices.push_back(idx);
    }
    ++idx;
  }
  return report;
}

bool line_has_digit(std::string_view line) {
  for (char c : line)
    if (c >= '0' && c <= '9')
      return true;
  return false;
}

}  // namespace subchar
