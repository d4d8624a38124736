#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "subchar/nmt.hpp"

namespace subchar::nmt {

namespace {

struct FlatView {
  std::vector<double*> tensors;
  std::vector<size_t> sizes;
  size_t total = 0;

  explicit FlatView(NmtParams& p) {
    p.for_each_tensor([&](const std::string&, double* d, size_t n) {
      tensors.push_back(d);
      sizes.push_back(n);
      total += n;
    });
  }
};

void zero_params(NmtParams& p) {
  p.for_each_tensor([](const std::string&, double* d, size_t n) {
    std::fill(d, d + n, 0.0);
  });
}

}  // namespace

std::vector<double> train(NmtParams& params,
                          const std::vector<SentencePair>& corpus,
                          const TrainConfig& config) {
  if (corpus.empty())
    throw NmtError("empty training corpus");
  const size_t batch = std::max<size_t>(1, config.batch_size);

  NmtParams accum_grad = NmtParams::zeros(params.dims);
  NmtParams accum_update = NmtParams::zeros(params.dims);
  NmtParams batch_grad = NmtParams::zeros(params.dims);
  FlatView pv(params), gv(batch_grad), agv(accum_grad), auv(accum_update);

  std::vector<size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(config.seed);

  std::vector<double> curve;
  curve.reserve(config.epochs);

  std::vector<NmtParams> worker_grads;
  for (size_t epoch = 0; epoch < config.epochs; ++epoch) {
    if (config.shuffle)
      std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    for (size_t start = 0; start < order.size(); start += batch) {
      const size_t end = std::min(start + batch, order.size());
      const size_t count = end - start;
      zero_params(batch_grad);
      std::vector<double> losses(count, 0.0);
      if (config.parallel && count > 1) {
        // Per-example gradients in parallel, summed in fixed order below.
        if (worker_grads.size() < count)
          worker_grads.resize(count, NmtParams::zeros(params.dims));
        for (size_t k = 0; k < count; ++k)
          zero_params(worker_grads[k]);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
        for (size_t k = 0; k < count; ++k) {
          const SentencePair& ex = corpus[order[start + k]];
          losses[k] =
              sequence_loss_grad(params, ex.src, ex.tgt, worker_grads[k]);
        }
        for (size_t k = 0; k < count; ++k) {
          FlatView wv(worker_grads[k]);
          for (size_t t = 0; t < gv.tensors.size(); ++t)
            for (size_t i = 0; i < gv.sizes[t]; ++i)
              gv.tensors[t][i] += wv.tensors[t][i];
        }
      } else {
        for (size_t k = 0; k < count; ++k) {
          const SentencePair& ex = corpus[order[start + k]];
          losses[k] = sequence_loss_grad(params, ex.src, ex.tgt, batch_grad);
        }
      }
      for (double l : losses)
        epoch_loss += l;

      const double scale = 1.0 / static_cast<double>(count);
      for (size_t t = 0; t < pv.tensors.size(); ++t) {
        double* w = pv.tensors[t];
        double* dw = gv.tensors[t];
        double* eg = agv.tensors[t];
        double* eu = auv.tensors[t];
        for (size_t i = 0; i < pv.sizes[t]; ++i) {
          const double grad = dw[i] * scale;
          eg[i] = config.rho * eg[i] + (1.0 - config.rho) * grad * grad;
          const double update = -std::sqrt(eu[i] + config.eps) /
                                std::sqrt(eg[i] + config.eps) * grad;
          eu[i] = config.rho * eu[i] + (1.0 - config.rho) * update * update;
          w[i] += config.lr * update;
        }
      }
    }
    const double mean_loss = epoch_loss / static_cast<double>(corpus.size());
    curve.push_back(mean_loss);
    if (config.verbose)
      std::fprintf(stderr, "epoch %zu loss %.6f\n", epoch + 1, mean_loss);
  }
  return curve;
}

void NmtModel::save(std::ostream& out) const {
  out << "subchar-nmt-checkpoint v1\n";
  out << "dims " << params.dims.vocab_src << ' ' << params.dims.vocab_tgt << ' '
      << params.dims.d_emb << ' ' << params.dims.d_hid << ' '
      << params.dims.d_att << '\n';
  out << "special " << start_id << ' ' << eos_id << ' ' << unk_id << '\n';
  out << "src_vocab " << src_vocab.size() << '\n';
  for (const auto& tok : src_vocab)
    out << tok << '\n';
  out << "tgt_vocab " << tgt_vocab.size() << '\n';
  for (const auto& tok : tgt_vocab)
    out << tok << '\n';
  char buf[40];
  params.for_each_tensor([&](const std::string& name, const double* d,
                             size_t n) {
    out << "tensor " << name << ' ' << n << '\n';
    for (size_t i = 0; i < n; ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g", d[i]);
      out << buf << (i + 1 == n ? '\n' : ' ');
    }
  });
}

NmtModel NmtModel::load(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "subchar-nmt-checkpoint v1")
    throw NmtError("not a recognized checkpoint file");
  NmtDims dims;
  std::string tag;
  in >> tag >> dims.vocab_src >> dims.vocab_tgt >> dims.d_emb >> dims.d_hid >>
      dims.d_att;
  if (tag != "dims")
    throw NmtError("checkpoint: expected dims record");
  NmtModel model;
  in >> tag >> model.start_id >> model.eos_id >> model.unk_id;
  if (tag != "special")
    throw NmtError("checkpoint: expected special record");
  size_t n = 0;
  in >> tag >> n;
  if (tag != "src_vocab")
    throw NmtError("checkpoint: expected src_vocab record");
  std::getline(in, line);
  model.src_vocab.resize(n);
  for (auto& tok : model.src_vocab)
    if (!std::getline(in, tok))
      throw NmtError("checkpoint: truncated src vocab");
  in >> tag >> n;
  if (tag != "tgt_vocab")
    throw NmtError("checkpoint: expected tgt_vocab record");
  std::getline(in, line);
  model.tgt_vocab.resize(n);
  for (auto& tok : model.tgt_vocab)
    if (!std::getline(in, tok))
      throw NmtError("checkpoint: truncated tgt vocab");
  model.params = NmtParams::zeros(dims);
  model.params.for_each_tensor([&](const std::string& name, double* d,
                                   size_t size) {
    std::string tname;
    size_t tsize = 0;
    if (!(in >> tag >> tname >> tsize) || tag != "tensor" || tname != name ||
        tsize != size)
      throw NmtError("checkpoint: bad tensor record, expected " + name);
    for (size_t i = 0; i < size; ++i)
      if (!(in >> d[i]))
        throw NmtError("checkpoint: truncated tensor " + name);
  });
  return model;
}

void NmtModel::save_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out)
    throw NmtError("cannot open checkpoint for writing: " + path);
  save(out);
}

NmtModel NmtModel::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw NmtError("cannot open checkpoint: " + path);
  return load(in);
}

}  // namespace subchar::nmt
