#include "subchar/bleu.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <unordered_map>

namespace subchar {

namespace {

std::vector<std::string> split_tokens(const std::string& line) {
  std::vector<std::string> tokens;
  std::istringstream is(line);
  std::string t;
  while (is >> t)
    tokens.push_back(t);
  return tokens;
}

// n-gram key: tokens joined with a separator byte that cannot appear
// inside a space-split token.
std::unordered_map<std::string, uint64_t> ngram_counts(
    const std::vector<std::string>& tokens, int n) {
  std::unordered_map<std::string, uint64_t> counts;
  if (tokens.size() < static_cast<size_t>(n))
    return counts;
  for (size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string key = tokens[i];
    for (int k = 1; k < n; ++k) {
      key.push_back('\x1f');
      key += tokens[i + k];
    }
    ++counts[key];
  }
  return counts;
}

}  // namespace

double BleuReport::brevity_penalty() const {
  if (hyp_length == 0)
    return 0.0;
  if (hyp_length > ref_length)
    return 1.0;
  return std::exp(1.0 - static_cast<double>(ref_length) /
                            static_cast<double>(hyp_length));
}

double BleuReport::score() const {
  double log_sum = 0.0;
  for (int n = 1; n <= kBleuMaxOrder; ++n) {
    const double p = precision(n);
    if (p <= 0.0)
      return 0.0;
    log_sum += std::log(p);
  }
  return brevity_penalty() * std::exp(log_sum / kBleuMaxOrder) * 100.0;
}

std::string BleuReport::to_string() const {
  char buf[256];
  const double ratio = ref_length == 0
                           ? 0.0
                           : static_cast<double>(hyp_length) /
                                 static_cast<double>(ref_length);
  std::snprintf(buf, sizeof(buf),
                "BLEU = %.2f, %.1f/%.1f/%.1f/%.1f (BP=%.3f, ratio=%.3f, "
                "hyp_len=%llu, ref_len=%llu)",
                score(), precision(1) * 100.0, precision(2) * 100.0,
                precision(3) * 100.0, precision(4) * 100.0, brevity_penalty(),
                ratio, static_cast<unsigned long long>(hyp_length),
                static_cast<unsigned long long>(ref_length));
  return buf;
}

BleuReport corpus_bleu(const std::vector<std::string>& hypotheses,
                       const std::vector<std::string>& references) {
  if (hypotheses.size() != references.size())
    throw BleuError("line count mismatch: " + std::to_string(hypotheses.size()) +
                    " hypotheses vs " + std::to_string(references.size()) +
                    " references");
  if (hypotheses.empty())
    throw BleuError("empty hypothesis corpus");
  BleuReport report;
  for (size_t i = 0; i < hypotheses.size(); ++i) {
    const auto hyp = split_tokens(hypotheses[i]);
    const auto ref = split_tokens(references[i]);
    report.hyp_length += hyp.size();
    report.ref_length += ref.size();
    for (int n = 1; n <= kBleuMaxOrder; ++n) {
      const auto hyp_ngrams = ngram_counts(hyp, n);
      const auto ref_ngrams = ngram_counts(ref, n);
      for (const auto& [gram, count] : hyp_ngrams) {
        report.total[n - 1] += count;
        const auto it = ref_ngrams.find(gram);
        if (it != ref_ngrams.end())
          report.matched[n - 1] += std::min(count, it->second);
      }
    }
  }
  return report;
}

BleuReport corpus_bleu(std::istream& hypotheses, std::istream& references) {
  std::vector<std::string> hyp, ref;
  std::string line;
  while (std::getline(hypotheses, line)) {
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    hyp.push_back(line);
  }
  while (std::getline(references, line)) {
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    ref.push_back(line);
  }
  return corpus_bleu(hyp, ref);
}

}  // namespace subchar
