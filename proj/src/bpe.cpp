#include "subchar/bpe.hpp"

#include <algorithm>
#include <fstream>
#include <queue>
#include <sstream>

#include "subchar/utf8.hpp"

namespace subchar {

namespace {

void check_no_marker(std::string_view token) {
  if (token.find(kContinuation) != std::string_view::npos)
    throw BpeError("token contains reserved '@@' marker: " + std::string(token));
}

// Token -> symbol sequence used during learning and application: one
// symbol per codepoint plus the standalone end-of-word sentinel.
std::vector<std::string> base_symbols(std::string_view token) {
  auto syms = utf8::split_chars(token);
  syms.emplace_back(kEow);
  return syms;
}

struct PairHash {
  size_t operator()(const MergePair& p) const {
    return std::hash<std::string>()(p.first) * 1000003u ^
           std::hash<std::string>()(p.second);
  }
};

void for_each_token(std::string_view line, auto&& fn) {
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t'))
      ++i;
    if (i >= line.size())
      break;
    size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t')
      ++j;
    fn(line.substr(i, j - i));
    i = j;
  }
}

}  // namespace

BpeModel::BpeModel(std::vector<MergePair> merges) : merges_(std::move(merges)) {
  for (size_t i = 0; i < merges_.size(); ++i) {
    if (!rank_.emplace(merges_[i], i).second)
      throw BpeError("duplicate merge pair: " + merges_[i].first + " " +
                     merges_[i].second);
  }
}

std::vector<std::string> BpeModel::split_token(std::string_view token) const {
  check_no_marker(token);
  if (token.empty())
    return {};
  auto syms = base_symbols(token);
  // Replaying merges in model order == repeatedly merging the lowest-rank
  // adjacent pair.
  while (syms.size() > 1) {
    size_t best_rank = merges_.size();
    for (size_t i = 0; i + 1 < syms.size(); ++i) {
      const auto it = rank_.find({syms[i], syms[i + 1]});
      if (it != rank_.end() && it->second < best_rank)
        best_rank = it->second;
    }
    if (best_rank == merges_.size())
      break;
    const MergePair& m = merges_[best_rank];
    std::vector<std::string> next;
    next.reserve(syms.size());
    for (size_t i = 0; i < syms.size();) {
      if (i + 1 < syms.size() && syms[i] == m.first && syms[i + 1] == m.second) {
        next.push_back(m.first + m.second);
        i += 2;
      } else {
        next.push_back(syms[i]);
        ++i;
      }
    }
    syms = std::move(next);
  }
  // Strip the sentinel.
  if (syms.back() == kEow)
    syms.pop_back();
  else
    syms.back().resize(syms.back().size() - kEow.size());
  if (!syms.empty() && syms.back().empty())
    syms.pop_back();
  for (size_t i = 0; i + 1 < syms.size(); ++i)
    syms[i] += kContinuation;
  return syms;
}

std::string BpeModel::apply_line(std::string_view line) const {
  std::string out;
  for_each_token(line, [&](std::string_view token) {
    for (const auto& sym : split_token(token)) {
      if (!out.empty())
        out.push_back(' ');
      out += sym;
    }
  });
  return out;
}

BpeModel BpeModel::load(std::istream& in) {
  std::vector<MergePair> merges;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (first && line.rfind("#version", 0) == 0) {
      first = false;
      continue;
    }
    first = false;
    if (line.empty())
      continue;
    const size_t sp = line.find(' ');
    if (sp == std::string::npos || line.find(' ', sp + 1) != std::string::npos)
      throw BpeError("malformed merge line: " + line);
    merges.emplace_back(line.substr(0, sp), line.substr(sp + 1));
  }
  return BpeModel(std::move(merges));
}

BpeModel BpeModel::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw BpeError("cannot open merge file: " + path);
  return load(in);
}

void BpeModel::save(std::ostream& out) const {
  for (const auto& [l, r] : merges_)
    out << l << ' ' << r << '\n';
}

void BpeModel::save_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out)
    throw BpeError("cannot open merge file for writing: " + path);
  save(out);
}

BpeModel learn_bpe_from_counts(
    const std::vector<std::pair<std::string, long>>& token_counts,
    size_t num_merges) {
  struct Word {
    std::vector<std::string> syms;
    long count;
  };
  std::vector<Word> words;
  words.reserve(token_counts.size());
  for (const auto& [token, count] : token_counts) {
    check_no_marker(token);
    words.push_back({base_symbols(token), count});
  }

  std::unordered_map<MergePair, long, PairHash> pair_counts;
  // Word indices that may contain a pair; validated by rescanning.
  std::unordered_map<MergePair, std::vector<size_t>, PairHash> pair_words;

  struct Entry {
    long count;
    MergePair pair;
  };
  struct EntryCmp {
    bool operator()(const Entry& a, const Entry& b) const {
      if (a.count != b.count)
        return a.count < b.count;
      return a.pair > b.pair;  // smallest pair on top
    }
  };
  std::priority_queue<Entry, std::vector<Entry>, EntryCmp> heap;

  auto bump = [&](const MergePair& p, long delta, size_t word_idx,
                  bool index_word) {
    long& c = pair_counts[p];
    c += delta;
    if (index_word)
      pair_words[p].push_back(word_idx);
    // An entry for the current count must always exist, including after
    // decrements, or the pair could be skipped as stale forever.
    if (c > 0)
      heap.push({c, p});
  };

  for (size_t w = 0; w < words.size(); ++w) {
    const auto& syms = words[w].syms;
    for (size_t i = 0; i + 1 < syms.size(); ++i)
      bump({syms[i], syms[i + 1]}, words[w].count, w, true);
  }

  std::vector<MergePair> merges;
  std::unordered_map<MergePair, bool, PairHash> merged;
  while (merges.size() < num_merges && !heap.empty()) {
    const Entry top = heap.top();
    heap.pop();
    const auto it = pair_counts.find(top.pair);
    if (it == pair_counts.end() || it->second != top.count)
      continue;  // stale
    if (top.count < 2)
      break;
    if (merged.count(top.pair))
      continue;
    merged[top.pair] = true;
    merges.push_back(top.pair);
    const std::string fused = top.pair.first + top.pair.second;

    auto indices = std::move(pair_words[top.pair]);
    pair_words.erase(top.pair);
    std::sort(indices.begin(), indices.end());
    indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
    for (size_t w : indices) {
      auto& word = words[w];
      bool contains = false;
      for (size_t i = 0; i + 1 < word.syms.size(); ++i)
        if (word.syms[i] == top.pair.first &&
            word.syms[i + 1] == top.pair.second) {
          contains = true;
          break;
        }
      if (!contains)
        continue;
      // Retract the word's old pairs, rewrite it, then re-add.
      for (size_t i = 0; i + 1 < word.syms.size(); ++i)
        bump({word.syms[i], word.syms[i + 1]}, -word.count, w, false);
      std::vector<std::string> next;
      next.reserve(word.syms.size());
      for (size_t i = 0; i < word.syms.size();) {
        if (i + 1 < word.syms.size() && word.syms[i] == top.pair.first &&
            word.syms[i + 1] == top.pair.second) {
          next.push_back(fused);
          i += 2;
        } else {
          next.push_back(word.syms[i]);
          ++i;
        }
      }
      word.syms = std::move(next);
      for (size_t i = 0; i + 1 < word.syms.size(); ++i)
        bump({word.syms[i], word.syms[i + 1]}, word.count, w, true);
    }
    pair_counts.erase(top.pair);
  }
  return BpeModel(std::move(merges));
}

BpeModel learn_bpe(std::istream& corpus, size_t num_merges) {
  std::unordered_map<std::string, long> counts;
  std::vector<std::string> order;  // first-seen order, for determinism
  std::string line;
  while (std::getline(corpus, line)) {
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    for_each_token(line, [&](std::string_view tok) {
      long& c = counts[std::string(tok)];
      if (c == 0)
        order.emplace_back(tok);
      ++c;
    });
  }
  if (corpus.bad())
    throw BpeError("I/O error while reading corpus");
  std::vector<std::pair<std::string, long>> token_counts;
  token_counts.reserve(order.size());
  for (auto& tok : order) {
    const long c = counts[tok];
    token_counts.emplace_back(std::move(tok), c);
  }
  return learn_bpe_from_counts(token_counts, num_merges);
}

std::string undo_bpe(std::string_view line) {
  std::string out;
  out.reserve(line.size());
  size_t i = 0;
  while (i < line.size()) {
    if (line.compare(i, 3, "@@ ") == 0) {
      i += 3;
    } else if (i + 2 == line.size() && line.compare(i, 2, kContinuation) == 0) {
      i += 2;
    } else {
      out.push_back(line[i]);
      ++i;
    }
  }
  return out;
}

std::unordered_map<std::string, long> bpe_vocabulary(const BpeModel& model,
                                                     std::istream& corpus) {
  std::unordered_map<std::string, long> vocab;
  std::string line;
  while (std::getline(corpus, line)) {
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    for_each_token(line, [&](std::string_view token) {
      for (const auto& sym : model.split_token(token))
        ++vocab[sym];
    });
  }
  if (corpus.bad())
    throw BpeError("I/O error while reading corpus");
  return vocab;
}

}  // namespace subchar
