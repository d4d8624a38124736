#pragma once

#include <exception>
#include <functional>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace subchar {

// Transform applied to one line; line numbers are 1-based.
using LineFn = std::function<std::string(const std::string& line, size_t lineno)>;

// Serial reference kernel.
inline void transform_block_serial(const std::vector<std::string>& in,
                                   std::vector<std::string>& out,
                                   size_t first_lineno, const LineFn& fn) {
  out.resize(in.size());
  for (size_t i = 0; i < in.size(); ++i)
    out[i] = fn(in[i], first_lineno + i);
}

// OpenMP kernel. Output order equals input order; the first exception (by
// line index) wins, matching the serial kernel's error.
inline void transform_block_parallel(const std::vector<std::string>& in,
                                     std::vector<std::string>& out,
                                     size_t first_lineno, const LineFn& fn) {
#ifdef _OPENMP
  out.resize(in.size());
  std::vector<std::exception_ptr> errors(in.size());
#pragma omp parallel for schedule(static)
  for (size_t i = 0; i < in.size(); ++i) {
    try {
      out[i] = fn(in[i], first_lineno + i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e)
      std::rethrow_exception(e);
#else
  transform_block_serial(in, out, first_lineno, fn);
#endif
}

struct TransformOptions {
  bool parallel = true;
  size_t block_lines = 4096;  // memory bound: block_lines * longest line
  bool strip_cr = false;
};

// Streams `in` to `out` line by line, transforming blocks with the chosen
// kernel. Returns the number of lines processed.
inline size_t transform_stream(std::istream& in, std::ostream& out,
                               const LineFn& fn,
                               const TransformOptions& opts = {}) {
  std::vector<std::string> block, result;
  block.reserve(opts.block_lines);
  std::string line;
  size_t lineno = 0;
  auto flush = [&] {
    const size_t first = lineno - block.size() + 1;
    if (opts.parallel)
      transform_block_parallel(block, result, first, fn);
    else
      transform_block_serial(block, result, first, fn);
    for (const auto& l : result)
      out << l << '\n';
    block.clear();
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (opts.strip_cr && !line.empty() && line.back() == '\r')
      line.pop_back();
    block.push_back(line);
    if (block.size() >= opts.block_lines)
      flush();
  }
  if (!block.empty())
    flush();
  return lineno;
}

}  // namespace subchar
