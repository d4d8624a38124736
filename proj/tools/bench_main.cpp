// Benchmark: serial reference kernel vs the OpenMP kernel on the two
// hot per-line transforms (Wubi encoding, BPE application).

#include <chrono>
#include <iostream>
#include <random>
#include <sstream>
#include <vector>

#include "subchar/bpe.hpp"
#include "subchar/parallel.hpp"
#include "subchar/pipeline.hpp"
#include "subchar/utf8.hpp"
#include "subchar/wubi.hpp"

using namespace subchar;
using Clock = std::chrono::steady_clock;

namespace {

double run_ms(const std::vector<std::string>& lines, const LineFn& fn,
              bool parallel, std::vector<std::string>& out) {
  const auto t0 = Clock::now();
  if (parallel)
    transform_block_parallel(lines, out, 1, fn);
  else
    transform_block_serial(lines, out, 1, fn);
  const auto t1 = Clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

void bench(const std::string& name, const std::vector<std::string>& lines,
           const LineFn& fn) {
  std::vector<std::string> serial_out, parallel_out;
  const double warm = run_ms(lines, fn, false, serial_out);
  (void)warm;
  const double serial_ms = run_ms(lines, fn, false, serial_out);
  const double parallel_ms = run_ms(lines, fn, true, parallel_out);
  const bool same = serial_out == parallel_out;
  std::cout << name << ": serial " << serial_ms << " ms, openmp "
            << parallel_ms << " ms, speedup "
            << (parallel_ms > 0 ? serial_ms / parallel_ms : 0.0)
            << (same ? "" : "  OUTPUT MISMATCH") << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  size_t n_lines = 200000;
  if (argc > 1)
    n_lines = std::stoul(argv[1]);
  const std::string table_path =
      argc > 2 ? argv[2] : std::string("data/wubi_table.tsv");

  WubiTable table = WubiTable::load_file(table_path);
  std::vector<char32_t> chars;
  for (const auto& [c, code] : table.entries())
    chars.push_back(c);

  std::mt19937 rng(123);
  std::uniform_int_distribution<size_t> pick(0, chars.size() - 1);
  std::uniform_int_distribution<int> len(5, 40);
  std::vector<std::string> zh_lines(n_lines);
  for (auto& line : zh_lines) {
    const int n = len(rng);
    for (int i = 0; i < n; ++i)
      utf8::append(line, chars[pick(rng)]);
  }
  std::cout << "corpus: " << n_lines << " synthetic lines\n";

  bench("wubi-encode", zh_lines, [&](const std::string& line, size_t) {
    return table.encode_sentence_str(line);
  });

  std::vector<std::string> encoded;
  transform_block_parallel(zh_lines, encoded, 1,
                           [&](const std::string& line, size_t) {
                             return table.encode_sentence_str(line);
                           });
  std::string joined;
  for (const auto& l : encoded)
    joined += l + "\n";
  std::istringstream in(joined);
  const BpeModel model = learn_bpe(in, 200);
  std::cout << "bpe model: " << model.size() << " merges\n";

  bench("bpe-apply", encoded, [&](const std::string& line, size_t) {
    return model.apply_line(line);
  });

  bench("postprocess", encoded, [&](const std::string& line, size_t) {
    return postprocess_zh_line(table, line);
  });
  return 0;
}
