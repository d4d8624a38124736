// subchar: sub-character Chinese MT preprocessing toolkit.
//
// One binary with subcommands covering the whole workflow: Wubi
// encoding/decoding, BPE learn/apply/undo, corpus preprocessing and
// sweeps, statistics, BLEU, and the toy attention NMT.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "subchar/bleu.hpp"
#include "subchar/bpe.hpp"
#include "subchar/nmt.hpp"
#include "subchar/parallel.hpp"
#include "subchar/pipeline.hpp"
#include "subchar/wubi.hpp"

using namespace subchar;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

struct IoOptions {
  std::string input_path;   // empty = stdin
  std::string output_path;  // empty = stdout
  bool strip_cr = false;
};

void add_io_flags(CLI::App* cmd, IoOptions& io) {
  cmd->add_option("--input", io.input_path, "Input file (default: stdin)");
  cmd->add_option("--output", io.output_path, "Output file (default: stdout)");
  cmd->add_flag("--crlf", io.strip_cr, "Strip trailing \\r from input lines");
}

struct IoStreams {
  std::ifstream fin;
  std::ofstream fout;
  std::istream* in;
  std::ostream* out;

  explicit IoStreams(const IoOptions& io) {
    if (io.input_path.empty()) {
      in = &std::cin;
    } else {
      fin.open(io.input_path);
      if (!fin)
        throw PipelineError("cannot open input file: " + io.input_path);
      in = &fin;
    }
    if (io.output_path.empty()) {
      out = &std::cout;
    } else {
      fout.open(io.output_path);
      if (!fout)
        throw PipelineError("cannot open output file: " + io.output_path);
      out = &fout;
    }
  }
};

void stream_transform(const IoOptions& io, const LineFn& fn) {
  IoStreams s(io);
  TransformOptions opts;
  opts.strip_cr = io.strip_cr;
  transform_stream(*s.in, *s.out, fn, opts);
}

std::vector<std::string> read_lines(std::istream& in, bool strip_cr) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (strip_cr && !line.empty() && line.back() == '\r')
      line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

std::vector<size_t> parse_merge_list(const std::string& spec) {
  std::vector<size_t> out;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ','))
    out.push_back(std::stoul(item));
  if (out.empty())
    throw PipelineError("empty --merges list");
  return out;
}

// Vocabulary for the toy NMT: tokens in first-seen order, then the
// markers.
struct ToyVocab {
  std::vector<std::string> tokens;
  std::map<std::string, int> ids;
  int start_id, eos_id, unk_id;

  explicit ToyVocab(const std::vector<std::string>& lines) {
    for (const auto& line : lines) {
      std::istringstream is(line);
      std::string tok;
      while (is >> tok)
        if (ids.emplace(tok, static_cast<int>(tokens.size())).second)
          tokens.push_back(tok);
    }
    start_id = static_cast<int>(tokens.size());
    tokens.push_back("<START>");
    eos_id = static_cast<int>(tokens.size());
    tokens.push_back("<EOS>");
    unk_id = static_cast<int>(tokens.size());
    tokens.push_back("<UNK>");
    ids[tokens[start_id]] = start_id;
    ids[tokens[eos_id]] = eos_id;
    ids[tokens[unk_id]] = unk_id;
  }

  std::vector<int> encode(const std::string& line) const {
    std::vector<int> out;
    std::istringstream is(line);
    std::string tok;
    while (is >> tok) {
      auto it = ids.find(tok);
      out.push_back(it == ids.end() ? unk_id : it->second);
    }
    return out;
  }
};

int run_sweep(const std::string& table_path, const std::string& merges_spec,
              const std::string& output_prefix, const IoOptions& io) {
  const WubiTable table = WubiTable::load_file(table_path);
  IoStreams s(io);
  const auto lines = read_lines(*s.in, io.strip_cr);

  // Wubi-encode once; every sweep point learns and applies on top.
  std::vector<std::string> encoded(lines.size());
  for (size_t i = 0; i < lines.size(); ++i) {
    try {
      encoded[i] = table.encode_sentence_str(lines[i]);
    } catch (const std::exception& e) {
      throw PipelineError("line " + std::to_string(i + 1) + ": " + e.what());
    }
  }

  *s.out << "merges\tvocab_size\tsentences\ttokens\tavg_tokens_per_sentence\n";
  for (size_t k : parse_merge_list(merges_spec)) {
    std::string joined;
    for (const auto& l : encoded)
      joined += l + "\n";
    BpeModel model;
    if (k > 0) {
      std::istringstream in(joined);
      model = learn_bpe(in, k);
    }
    // k = 0 is the empty-model baseline (single-letter symbols), so the
    // avg tokens/sentence column is non-increasing in k.
    std::ostringstream applied;
    for (const auto& l : encoded)
      applied << model.apply_line(l) << '\n';
    const std::string corpus = applied.str();
    if (!output_prefix.empty()) {
      std::ofstream f(output_prefix + std::to_string(k) + ".txt");
      if (!f)
        throw PipelineError("cannot write sweep corpus for k=" +
                            std::to_string(k));
      f << corpus;
    }
    std::istringstream vin(joined);
    const auto vocab = bpe_vocabulary(model, vin);
    std::istringstream sin(corpus);
    const CorpusStats stats = corpus_stats(sin);
    *s.out << k << '\t' << vocab.size() << '\t' << stats.sentences << '\t'
           << stats.tokens << '\t' << stats.avg_tokens_per_sentence() << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sub-character Chinese MT preprocessing toolkit"};
  app.require_subcommand(1);

  std::string table_path, model_path, ref_path, output_prefix, side = "source_zh";
  std::string checkpoint_path, merges_spec = "0";
  size_t merges = 0;
  bool lowercase = false, filter_digits = false, json_stats = false;
  uint64_t seed = 1;
  size_t epochs = 30, batch = 16;
  std::string dims_spec = "32,64,64";
  std::string src_path, tgt_path;
  size_t max_len = 50;
  double lr = 1.0;

  IoOptions io;

  auto* encode_cmd = app.add_subcommand("encode", "Chinese -> Wubi codes");
  encode_cmd->add_option("--table", table_path, "Wubi table file")->required();
  add_io_flags(encode_cmd, io);

  auto* decode_cmd = app.add_subcommand("decode", "Wubi codes -> Chinese");
  decode_cmd->add_option("--table", table_path)->required();
  add_io_flags(decode_cmd, io);

  auto* learn_cmd = app.add_subcommand("learn-bpe", "Learn BPE merges");
  learn_cmd->add_option("--merges", merges, "Number of merges")->required();
  learn_cmd->add_option("--model", model_path, "Merge file to write")->required();
  add_io_flags(learn_cmd, io);

  auto* apply_cmd = app.add_subcommand("apply-bpe", "Apply BPE merges");
  apply_cmd->add_option("--model", model_path, "Merge file")->required();
  add_io_flags(apply_cmd, io);

  auto* undo_cmd = app.add_subcommand("undo-bpe", "Remove @@ continuation");
  add_io_flags(undo_cmd, io);

  auto* pre_cmd = app.add_subcommand(
      "preprocess", "Wubi-encode and optionally BPE a Chinese corpus "
                    "(or tokenize English with --side target_en)");
  pre_cmd->add_option("--table", table_path);
  pre_cmd->add_option("--merges", merges, "Learn this many merges first");
  pre_cmd->add_option("--model", model_path, "Existing merge file to apply");
  pre_cmd->add_option("--side", side, "source_zh or target_en");
  pre_cmd->add_flag("--lowercase", lowercase, "Lowercase English tokens");
  pre_cmd->add_flag("--filter-digits", filter_digits,
                    "Drop lines containing ASCII digits");
  add_io_flags(pre_cmd, io);

  auto* post_cmd = app.add_subcommand("postprocess",
                                      "Undo BPE and decode back to Chinese");
  post_cmd->add_option("--table", table_path)->required();
  add_io_flags(post_cmd, io);

  auto* stats_cmd = app.add_subcommand("stats", "Corpus statistics");
  stats_cmd->add_flag("--json", json_stats, "Emit JSON instead of key=value");
  add_io_flags(stats_cmd, io);

  auto* check_cmd = app.add_subcommand("check-parallel",
                                       "Validate parallel corpus alignment");
  check_cmd->add_option("--src", src_path, "Source corpus")->required();
  check_cmd->add_option("--ref", ref_path, "Target corpus")->required();

  auto* bleu_cmd = app.add_subcommand("bleu", "Corpus BLEU against a reference");
  bleu_cmd->add_option("--ref", ref_path, "Reference file")->required();
  add_io_flags(bleu_cmd, io);

  auto* sweep_cmd = app.add_subcommand(
      "sweep", "Preprocess at several merge counts, report vocab and stats");
  sweep_cmd->add_option("--table", table_path)->required();
  sweep_cmd->add_option("--merges", merges_spec, "Comma-separated merge counts")
      ->required();
  sweep_cmd->add_option("--output", output_prefix,
                        "Prefix for per-count corpora (<prefix><k>.txt)");
  sweep_cmd->add_option("--input", io.input_path, "Input file (default: stdin)");
  sweep_cmd->add_flag("--crlf", io.strip_cr, "Strip trailing \\r from input");

  auto* train_cmd = app.add_subcommand("train-toy", "Train the toy NMT");
  train_cmd->add_option("--src", src_path, "Source token file")->required();
  train_cmd->add_option("--ref", ref_path, "Target token file")->required();
  train_cmd->add_option("--model", checkpoint_path, "Checkpoint to write")
      ->required();
  train_cmd->add_option("--seed", seed);
  train_cmd->add_option("--epochs", epochs);
  train_cmd->add_option("--batch", batch);
  train_cmd->add_option("--lr", lr, "Learning-rate scale");
  train_cmd->add_option("--dims", dims_spec, "d_emb,d_hid,d_att");

  auto* translate_cmd = app.add_subcommand("translate-toy",
                                           "Greedy decode with a checkpoint");
  translate_cmd->add_option("--model", checkpoint_path)->required();
  translate_cmd->add_option("--max-len", max_len);
  add_io_flags(translate_cmd, io);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0)
      return app.exit(e);
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (encode_cmd->parsed()) {
      const WubiTable table = WubiTable::load_file(table_path);
      stream_transform(io, [&](const std::string& line, size_t lineno) {
        try {
          return table.encode_sentence_str(line);
        } catch (const std::exception& e) {
          throw PipelineError("line " + std::to_string(lineno) + ": " +
                              e.what());
        }
      });
    } else if (decode_cmd->parsed()) {
      const WubiTable table = WubiTable::load_file(table_path);
      stream_transform(io, [&](const std::string& line, size_t lineno) {
        try {
          return table.decode_sentence_str(line);
        } catch (const std::exception& e) {
          throw PipelineError("line " + std::to_string(lineno) + ": " +
                              e.what());
        }
      });
    } else if (learn_cmd->parsed()) {
      IoStreams s(io);
      const BpeModel model = learn_bpe(*s.in, merges);
      model.save_file(model_path);
    } else if (apply_cmd->parsed()) {
      const BpeModel model = BpeModel::load_file(model_path);
      stream_transform(io, [&](const std::string& line, size_t) {
        return model.apply_line(line);
      });
    } else if (undo_cmd->parsed()) {
      stream_transform(io, [](const std::string& line, size_t) {
        return undo_bpe(line);
      });
    } else if (pre_cmd->parsed()) {
      if (side == "target_en") {
        stream_transform(io, [&](const std::string& line, size_t) {
          return tokenize_en(line, lowercase);
        });
      } else if (side == "source_zh") {
        if (table_path.empty())
          throw PipelineError("--table is required for --side source_zh");
        const WubiTable table = WubiTable::load_file(table_path);
        IoStreams s(io);
        auto lines = read_lines(*s.in, io.strip_cr);
        if (filter_digits)
          std::erase_if(lines, line_has_digit);
        std::vector<std::string> encoded(lines.size());
        for (size_t i = 0; i < lines.size(); ++i) {
          try {
            encoded[i] = table.encode_sentence_str(lines[i]);
          } catch (const std::exception& e) {
            throw PipelineError("line " + std::to_string(i + 1) + ": " +
                                e.what());
          }
        }
        BpeModel model;
        bool have_model = false;
        if (!model_path.empty()) {
          model = BpeModel::load_file(model_path);
          have_model = true;
        } else if (merges > 0) {
          std::string joined;
          for (const auto& l : encoded)
            joined += l + "\n";
          std::istringstream in(joined);
          model = learn_bpe(in, merges);
          have_model = true;
        }
        for (const auto& l : encoded)
          *s.out << (have_model ? model.apply_line(l) : l) << '\n';
      } else {
        throw PipelineError("unknown --side: " + side);
      }
    } else if (post_cmd->parsed()) {
      const WubiTable table = WubiTable::load_file(table_path);
      stream_transform(io, [&](const std::string& line, size_t lineno) {
        try {
          return postprocess_zh_line(table, line);
        } catch (const std::exception& e) {
          throw PipelineError("line " + std::to_string(lineno) + ": " +
                              e.what());
        }
      });
    } else if (stats_cmd->parsed()) {
      IoStreams s(io);
      const CorpusStats stats = corpus_stats(*s.in);
      *s.out << (json_stats ? stats.to_json() : stats.to_key_value()) << '\n';
    } else if (check_cmd->parsed()) {
      std::ifstream src(src_path), tgt(ref_path);
      if (!src)
        throw PipelineError("cannot open source file: " + src_path);
      if (!tgt)
        throw PipelineError("cannot open target file: " + ref_path);
      const AlignmentReport report = check_parallel(src, tgt);
      std::cout << report.to_string() << '\n';
      return report.ok() ? 0 : kExitData;
    } else if (bleu_cmd->parsed()) {
      std::ifstream ref(ref_path);
      if (!ref)
        throw BleuError("cannot open reference file: " + ref_path);
      IoStreams s(io);
      const BleuReport report = corpus_bleu(*s.in, ref);
      *s.out << report.to_string() << '\n';
    } else if (sweep_cmd->parsed()) {
      return run_sweep(table_path, merges_spec, output_prefix, io);
    } else if (train_cmd->parsed()) {
      std::ifstream src_in(src_path), tgt_in(ref_path);
      if (!src_in)
        throw PipelineError("cannot open source file: " + src_path);
      if (!tgt_in)
        throw PipelineError("cannot open target file: " + ref_path);
      const auto src_lines = read_lines(src_in, io.strip_cr);
      const auto tgt_lines = read_lines(tgt_in, io.strip_cr);
      if (src_lines.size() != tgt_lines.size())
        throw PipelineError("source/target line count mismatch");
      const ToyVocab src_vocab(src_lines), tgt_vocab(tgt_lines);
      std::vector<nmt::SentencePair> corpus;
      for (size_t i = 0; i < src_lines.size(); ++i) {
        auto s = src_vocab.encode(src_lines[i]);
        if (s.empty())
          continue;
        auto t = tgt_vocab.encode(tgt_lines[i]);
        t.insert(t.begin(), tgt_vocab.start_id);
        t.push_back(tgt_vocab.eos_id);
        corpus.push_back({std::move(s), std::move(t)});
      }
      size_t d_emb = 32, d_hid = 64, d_att = 64;
      {
        std::stringstream ss(dims_spec);
        char comma;
        if (!(ss >> d_emb >> comma >> d_hid >> comma >> d_att))
          throw PipelineError("bad --dims, expected d_emb,d_hid,d_att");
      }
      nmt::NmtDims dims{src_vocab.tokens.size(), tgt_vocab.tokens.size(),
                        d_emb, d_hid, d_att};
      nmt::NmtModel model;
      model.params = nmt::NmtParams::random_init(dims, seed);
      model.src_vocab = src_vocab.tokens;
      model.tgt_vocab = tgt_vocab.tokens;
      model.start_id = tgt_vocab.start_id;
      model.eos_id = tgt_vocab.eos_id;
      model.unk_id = tgt_vocab.unk_id;
      nmt::TrainConfig cfg;
      cfg.epochs = epochs;
      cfg.batch_size = batch;
      cfg.seed = seed;
      cfg.lr = lr;
      cfg.verbose = true;
      nmt::train(model.params, corpus, cfg);
      model.save_file(checkpoint_path);
    } else if (translate_cmd->parsed()) {
      const nmt::NmtModel model = nmt::NmtModel::load_file(checkpoint_path);
      std::map<std::string, int> src_ids;
      for (size_t i = 0; i < model.src_vocab.size(); ++i)
        src_ids[model.src_vocab[i]] = static_cast<int>(i);
      int src_unk = 0;
      if (auto it = src_ids.find("<UNK>"); it != src_ids.end())
        src_unk = it->second;
      IoStreams s(io);
      std::string line;
      while (std::getline(*s.in, line)) {
        if (io.strip_cr && !line.empty() && line.back() == '\r')
          line.pop_back();
        std::vector<int> src;
        std::istringstream is(line);
        std::string tok;
        while (is >> tok) {
          auto it = src_ids.find(tok);
          src.push_back(it == src_ids.end() ? src_unk : it->second);
        }
        if (src.empty()) {
          *s.out << '\n';
          continue;
        }
        const auto out_ids = nmt::translate(model.params, src, model.start_id,
                                            model.eos_id, max_len);
        std::string out_line;
        for (int id : out_ids) {
          if (!out_line.empty())
            out_line.push_back(' ');
          out_line += model.tgt_vocab[id];
        }
        *s.out << out_line << '\n';
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "subchar: " << e.what() << '\n';
    return kExitData;
  }
  return 0;
}
