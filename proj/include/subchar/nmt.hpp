#pragma once

#include <cstdint>
#include <functional>
#include <istream>
#include <ostream>
#include <random>
#include <string>
#include <vector>

namespace subchar::nmt {

class NmtError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Vec = std::vector<double>;

struct Mat {
  size_t rows = 0, cols = 0;
  std::vector<double> a;

  Mat() = default;
  Mat(size_t r, size_t c) : rows(r), cols(c), a(r * c, 0.0) {}

  double& operator()(size_t i, size_t j) { return a[i * cols + j]; }
  double operator()(size_t i, size_t j) const { return a[i * cols + j]; }
  size_t size() const { return a.size(); }

  // Row view helpers for embedding tables.
  double* row(size_t i) { return a.data() + i * cols; }
  const double* row(size_t i) const { return a.data() + i * cols; }
};

struct GruWeights {
  Mat w_update, u_update;  // z gate
  Mat w_reset, u_reset;    // r gate
  Mat w_cand, u_cand;      // candidate state
  Vec b_update, b_reset, b_cand;

  GruWeights() = default;
  GruWeights(size_t input_dim, size_t hidden_dim);
  size_t input_dim() const { return w_update.cols; }
  size_t hidden_dim() const { return w_update.rows; }
};

struct NmtDims {
  size_t vocab_src = 0;
  size_t vocab_tgt = 0;
  size_t d_emb = 0;
  size_t d_hid = 0;
  size_t d_att = 0;

  bool operator==(const NmtDims&) const = default;
};

// All weights of the bidirectional-GRU encoder, additive attention, GRU
// decoder and readout. Shapes are validated at construction.
struct NmtParams {
  NmtDims dims;
  Mat src_emb;               // vocab_src x d_emb
  Mat tgt_emb;               // vocab_tgt x d_emb
  GruWeights enc_fwd, enc_bwd;  // input d_emb, hidden d_hid
  GruWeights dec;               // input d_emb + 2*d_hid, hidden d_hid
  Mat att_state;             // d_att x d_hid, applied to s_{t-1}
  Mat att_enc;               // d_att x 2*d_hid, applied to h_i
  Vec att_score;             // d_att
  Mat init_state;            // d_hid x d_hid, from backward state h_bwd[1]
  Vec init_bias;             // d_hid
  Mat out_proj;              // vocab_tgt x (d_hid + 2*d_hid + d_emb)
  Vec out_bias;              // vocab_tgt

  static NmtParams zeros(const NmtDims& dims);
  // Uniform(-0.08, 0.08) from a seeded generator.
  static NmtParams random_init(const NmtDims& dims, uint64_t seed);

  size_t parameter_count() const;
  // Visits every tensor as a flat double span, in a fixed order.
  void for_each_tensor(
      const std::function<void(const std::string&, double*, size_t)>& fn);
  void for_each_tensor(const std::function<void(const std::string&,
                                                const double*, size_t)>& fn) const;
};

struct EncodedSource {
  std::vector<Vec> states;  // h_i = [h_fwd_i ; h_bwd_i], dim 2*d_hid
  size_t length() const { return states.size(); }
};

struct AttentionStep {
  Vec scores;   // a_t, length n
  Vec weights;  // softmax(a_t)
  Vec context;  // sum_i weights[i] * h_i, dim 2*d_hid
};

EncodedSource encode(const NmtParams& params, const std::vector<int>& tokens);

AttentionStep attend(const NmtParams& params, const EncodedSource& enc,
                     const Vec& s_prev);

// Decoder initial state: tanh-affine map of the backward state at
// position 1.
Vec initial_state(const NmtParams& params, const EncodedSource& enc,
                  const Vec& h_bwd_first);

struct DecodeStep {
  Vec logits;  // over target vocab
  Vec state;   // s_t
  AttentionStep attention;
};

DecodeStep decode_step(const NmtParams& params, const EncodedSource& enc,
                       const Vec& s_prev, int y_prev_id);

// Mean token-level negative log-likelihood under teacher forcing. tgt
// must include the start and end marker ids.
double sequence_loss(const NmtParams& params, const std::vector<int>& src,
                     const std::vector<int>& tgt);

// Analytic gradients of sequence_loss; grads must be zero-initialized
// with matching dims (accumulated into). Returns the loss.
double sequence_loss_grad(const NmtParams& params, const std::vector<int>& src,
                          const std::vector<int>& tgt, NmtParams& grads);

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::string worst_tensor;
  size_t worst_index = 0;
  double analytic = 0.0, numeric = 0.0;
};

// Central finite differences of sequence_loss against analytic gradients
// for every parameter.
GradCheckReport grad_check(const NmtParams& params, const std::vector<int>& src,
                           const std::vector<int>& tgt, double epsilon);

struct TrainConfig {
  size_t epochs = 10;
  size_t batch_size = 16;
  double rho = 0.95;        // Adadelta decay
  double eps = 1e-6;        // Adadelta epsilon
  double lr = 1.0;          // learning-rate scale on the Adadelta update
  uint64_t seed = 1;        // shuffle seed
  bool shuffle = true;
  bool parallel = true;     // per-example gradients within a batch
  bool verbose = false;
};

struct SentencePair {
  std::vector<int> src;
  std::vector<int> tgt;  // includes start/end markers
};

// Adadelta training; per-epoch mean loss returned. Deterministic given
// the seed (fixed gradient reduction order).
std::vector<double> train(NmtParams& params,
                          const std::vector<SentencePair>& corpus,
                          const TrainConfig& config);

// Greedy decoding from start_id until eos_id or max_len emitted tokens.
// Argmax ties break toward the lowest id.
std::vector<int> translate(const NmtParams& params, const std::vector<int>& src,
                           int start_id, int eos_id, size_t max_len);

// Checkpoint container: dimensions, vocabularies and all tensors in a
// versioned text format (documented in the README).
struct NmtModel {
  NmtParams params;
  std::vector<std::string> src_vocab;  // id -> token
  std::vector<std::string> tgt_vocab;
  int start_id = -1;
  int eos_id = -1;
  int unk_id = -1;

  void save(std::ostream& out) const;
  static NmtModel load(std::istream& in);
  void save_file(const std::string& path) const;
  static NmtModel load_file(const std::string& path);
};

}  // namespace subchar::nmt
