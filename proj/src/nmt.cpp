#include "subchar/nmt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace subchar::nmt {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// y = M x
void matvec(const Mat& m, const Vec& x, Vec& y) {
  y.assign(m.rows, 0.0);
  for (size_t i = 0; i < m.rows; ++i) {
    double acc = 0.0;
    const double* row = m.row(i);
    for (size_t j = 0; j < m.cols; ++j)
      acc += row[j] * x[j];
    y[i] = acc;
  }
}

// y += M^T x
void matvec_t_add(const Mat& m, const Vec& x, Vec& y) {
  for (size_t i = 0; i < m.rows; ++i) {
    const double* row = m.row(i);
    const double xi = x[i];
    for (size_t j = 0; j < m.cols; ++j)
      y[j] += row[j] * xi;
  }
}

// dM += y x^T
void outer_add(Mat& dm, const Vec& y, const Vec& x) {
  for (size_t i = 0; i < dm.rows; ++i) {
    double* row = dm.row(i);
    const double yi = y[i];
    for (size_t j = 0; j < dm.cols; ++j)
      row[j] += yi * x[j];
  }
}

void add(Vec& a, const Vec& b) {
  for (size_t i = 0; i < a.size(); ++i)
    a[i] += b[i];
}

void softmax_inplace(Vec& v) {
  const double mx = *std::max_element(v.begin(), v.end());
  double sum = 0.0;
  for (double& x : v) {
    x = std::exp(x - mx);
    sum += x;
  }
  for (double& x : v)
    x /= sum;
}

struct GruCache {
  Vec x, h_prev, z, r, cand, rh;
};

Vec gru_forward(const GruWeights& w, const Vec& x, const Vec& h_prev,
                GruCache* cache) {
  const size_t dh = w.hidden_dim();
  Vec z, r, tmp;
  matvec(w.w_update, x, z);
  matvec(w.u_update, h_prev, tmp);
  for (size_t i = 0; i < dh; ++i)
    z[i] = sigmoid(z[i] + tmp[i] + w.b_update[i]);
  matvec(w.w_reset, x, r);
  matvec(w.u_reset, h_prev, tmp);
  for (size_t i = 0; i < dh; ++i)
    r[i] = sigmoid(r[i] + tmp[i] + w.b_reset[i]);
  Vec rh(dh);
  for (size_t i = 0; i < dh; ++i)
    rh[i] = r[i] * h_prev[i];
  Vec cand;
  matvec(w.w_cand, x, cand);
  matvec(w.u_cand, rh, tmp);
  for (size_t i = 0; i < dh; ++i)
    cand[i] = std::tanh(cand[i] + tmp[i] + w.b_cand[i]);
  Vec h(dh);
  for (size_t i = 0; i < dh; ++i)
    h[i] = (1.0 - z[i]) * h_prev[i] + z[i] * cand[i];
  if (cache)
    *cache = {x, h_prev, z, r, cand, rh};
  return h;
}

// Accumulates parameter gradients into gw and input gradients into dx and
// dh_prev (both +=).
void gru_backward(const GruWeights& w, const GruCache& c, const Vec& dh,
                  GruWeights& gw, Vec& dx, Vec& dh_prev) {
  const size_t dh_dim = w.hidden_dim();
  Vec dz(dh_dim), dcand(dh_dim);
  for (size_t i = 0; i < dh_dim; ++i) {
    dz[i] = dh[i] * (c.cand[i] - c.h_prev[i]);
    dcand[i] = dh[i] * c.z[i];
    dh_prev[i] += dh[i] * (1.0 - c.z[i]);
  }
  Vec dcand_pre(dh_dim);
  for (size_t i = 0; i < dh_dim; ++i)
    dcand_pre[i] = dcand[i] * (1.0 - c.cand[i] * c.cand[i]);
  outer_add(gw.w_cand, dcand_pre, c.x);
  outer_add(gw.u_cand, dcand_pre, c.rh);
  add(gw.b_cand, dcand_pre);
  matvec_t_add(w.w_cand, dcand_pre, dx);
  Vec drh(dh_dim, 0.0);
  matvec_t_add(w.u_cand, dcand_pre, drh);
  Vec dr(dh_dim);
  for (size_t i = 0; i < dh_dim; ++i) {
    dr[i] = drh[i] * c.h_prev[i];
    dh_prev[i] += drh[i] * c.r[i];
  }
  Vec dz_pre(dh_dim), dr_pre(dh_dim);
  for (size_t i = 0; i < dh_dim; ++i) {
    dz_pre[i] = dz[i] * c.z[i] * (1.0 - c.z[i]);
    dr_pre[i] = dr[i] * c.r[i] * (1.0 - c.r[i]);
  }
  outer_add(gw.w_update, dz_pre, c.x);
  outer_add(gw.u_update, dz_pre, c.h_prev);
  add(gw.b_update, dz_pre);
  matvec_t_add(w.w_update, dz_pre, dx);
  matvec_t_add(w.u_update, dz_pre, dh_prev);
  outer_add(gw.w_reset, dr_pre, c.x);
  outer_add(gw.u_reset, dr_pre, c.h_prev);
  add(gw.b_reset, dr_pre);
  matvec_t_add(w.w_reset, dr_pre, dx);
  matvec_t_add(w.u_reset, dr_pre, dh_prev);
}

Vec embedding_row(const Mat& table, int id) {
  if (id < 0 || static_cast<size_t>(id) >= table.rows)
    throw NmtError("token id out of range: " + std::to_string(id));
  return Vec(table.row(id), table.row(id) + table.cols);
}

// Attention with the tanh pre-activations kept for backprop.
struct AttentionCache {
  AttentionStep step;
  std::vector<Vec> hidden;  // u_i = tanh(W_a s + U_a h_i)
  Vec s_prev;
};

AttentionCache attend_cached(const NmtParams& p, const EncodedSource& enc,
                             const Vec& s_prev) {
  const size_t n = enc.length();
  if (n == 0)
    throw NmtError("empty source encoding");
  if (s_prev.size() != p.dims.d_hid)
    throw NmtError("decoder state dimension mismatch");
  Vec ws;
  matvec(p.att_state, s_prev, ws);
  AttentionCache cache;
  cache.s_prev = s_prev;
  cache.step.scores.resize(n);
  cache.hidden.resize(n);
  for (size_t i = 0; i < n; ++i) {
    if (enc.states[i].size() != 2 * p.dims.d_hid)
      throw NmtError("encoder state dimension mismatch");
    Vec u;
    matvec(p.att_enc, enc.states[i], u);
    for (size_t k = 0; k < u.size(); ++k)
      u[k] = std::tanh(u[k] + ws[k]);
    double score = 0.0;
    for (size_t k = 0; k < u.size(); ++k)
      score += p.att_score[k] * u[k];
    cache.step.scores[i] = score;
    cache.hidden[i] = std::move(u);
  }
  cache.step.weights = cache.step.scores;
  softmax_inplace(cache.step.weights);
  cache.step.context.assign(2 * p.dims.d_hid, 0.0);
  for (size_t i = 0; i < n; ++i)
    for (size_t k = 0; k < cache.step.context.size(); ++k)
      cache.step.context[k] += cache.step.weights[i] * enc.states[i][k];
  return cache;
}

// Backward through one attention step. dcontext and ds_scores flow in;
// ds_prev and per-position dh_enc flow out (accumulated).
void attend_backward(const NmtParams& p, const EncodedSource& enc,
                     const AttentionCache& c, const Vec& dcontext,
                     NmtParams& g, Vec& ds_prev, std::vector<Vec>& dh_enc) {
  const size_t n = enc.length();
  Vec dweights(n, 0.0);
  for (size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (size_t k = 0; k < dcontext.size(); ++k) {
      acc += dcontext[k] * enc.states[i][k];
      dh_enc[i][k] += c.step.weights[i] * dcontext[k];
    }
    dweights[i] = acc;
  }
  // softmax backward
  double dot = 0.0;
  for (size_t i = 0; i < n; ++i)
    dot += dweights[i] * c.step.weights[i];
  Vec dscores(n);
  for (size_t i = 0; i < n; ++i)
    dscores[i] = c.step.weights[i] * (dweights[i] - dot);
  for (size_t i = 0; i < n; ++i) {
    const Vec& u = c.hidden[i];
    Vec du_pre(u.size());
    for (size_t k = 0; k < u.size(); ++k) {
      g.att_score[k] += dscores[i] * u[k];
      du_pre[k] = dscores[i] * p.att_score[k] * (1.0 - u[k] * u[k]);
    }
    outer_add(g.att_state, du_pre, c.s_prev);
    matvec_t_add(p.att_state, du_pre, ds_prev);
    outer_add(g.att_enc, du_pre, enc.states[i]);
    matvec_t_add(p.att_enc, du_pre, dh_enc[i]);
  }
}

struct EncoderCache {
  std::vector<Vec> x;  // embedded source tokens
  std::vector<GruCache> fwd, bwd;
  std::vector<Vec> h_fwd, h_bwd;
  EncodedSource enc;
};

EncoderCache encode_cached(const NmtParams& p, const std::vector<int>& tokens) {
  if (tokens.empty())
    throw NmtError("empty source sequence");
  const size_t n = tokens.size();
  EncoderCache c;
  c.x.reserve(n);
  for (int id : tokens)
    c.x.push_back(embedding_row(p.src_emb, id));
  c.fwd.resize(n);
  c.bwd.resize(n);
  c.h_fwd.resize(n);
  c.h_bwd.resize(n);
  Vec h(p.dims.d_hid, 0.0);
  for (size_t i = 0; i < n; ++i) {
    h = gru_forward(p.enc_fwd, c.x[i], h, &c.fwd[i]);
    c.h_fwd[i] = h;
  }
  h.assign(p.dims.d_hid, 0.0);
  for (size_t i = n; i-- > 0;) {
    h = gru_forward(p.enc_bwd, c.x[i], h, &c.bwd[i]);
    c.h_bwd[i] = h;
  }
  c.enc.states.resize(n);
  for (size_t i = 0; i < n; ++i) {
    c.enc.states[i] = c.h_fwd[i];
    c.enc.states[i].insert(c.enc.states[i].end(), c.h_bwd[i].begin(),
                           c.h_bwd[i].end());
  }
  return c;
}

Vec initial_state_cached(const NmtParams& p, const Vec& h_bwd_first, Vec* pre) {
  Vec s;
  matvec(p.init_state, h_bwd_first, s);
  for (size_t i = 0; i < s.size(); ++i)
    s[i] = std::tanh(s[i] + p.init_bias[i]);
  if (pre)
    *pre = s;  // tanh output is enough to backprop through
  return s;
}

struct StepCache {
  Vec e_prev;
  AttentionCache att;
  GruCache gru;
  Vec s;        // s_t
  Vec readout;  // [s_t ; c_t ; e_prev]
  Vec probs;
  int y_prev;
  int target;
};

struct SequenceCache {
  EncoderCache enc;
  Vec s0;
  std::vector<StepCache> steps;
  double loss = 0.0;
};

SequenceCache forward_sequence(const NmtParams& p, const std::vector<int>& src,
                               const std::vector<int>& tgt) {
  if (tgt.size() < 2)
    throw NmtError("target must contain start and end markers");
  SequenceCache c;
  c.enc = encode_cached(p, src);
  c.s0 = initial_state_cached(p, c.enc.h_bwd[0], nullptr);
  const size_t m = tgt.size() - 1;
  c.steps.resize(m);
  const Vec* s_prev = &c.s0;
  double total = 0.0;
  for (size_t t = 0; t < m; ++t) {
    StepCache& st = c.steps[t];
    st.y_prev = tgt[t];
    st.target = tgt[t + 1];
    if (st.target < 0 || static_cast<size_t>(st.target) >= p.dims.vocab_tgt)
      throw NmtError("target id out of range: " + std::to_string(st.target));
    st.e_prev = embedding_row(p.tgt_emb, st.y_prev);
    st.att = attend_cached(p, c.enc.enc, *s_prev);
    Vec g = st.e_prev;
    g.insert(g.end(), st.att.step.context.begin(), st.att.step.context.end());
    st.s = gru_forward(p.dec, g, *s_prev, &st.gru);
    st.readout = st.s;
    st.readout.insert(st.readout.end(), st.att.step.context.begin(),
                      st.att.step.context.end());
    st.readout.insert(st.readout.end(), st.e_prev.begin(), st.e_prev.end());
    Vec logits;
    matvec(p.out_proj, st.readout, logits);
    add(logits, p.out_bias);
    st.probs = logits;
    softmax_inplace(st.probs);
    total += -std::log(std::max(st.probs[st.target], 1e-300));
    s_prev = &st.s;
  }
  c.loss = total / static_cast<double>(m);
  return c;
}

void backward_sequence(const NmtParams& p, const std::vector<int>& src,
                       const SequenceCache& c, NmtParams& g) {
  const size_t m = c.steps.size();
  const size_t n = src.size();
  const size_t dh = p.dims.d_hid;
  const size_t de = p.dims.d_emb;
  const double inv_m = 1.0 / static_cast<double>(m);

  std::vector<Vec> dh_enc(n, Vec(2 * dh, 0.0));
  Vec ds_carry(dh, 0.0);

  for (size_t t = m; t-- > 0;) {
    const StepCache& st = c.steps[t];
    Vec dlogits = st.probs;
    dlogits[st.target] -= 1.0;
    for (double& v : dlogits)
      v *= inv_m;
    outer_add(g.out_proj, dlogits, st.readout);
    add(g.out_bias, dlogits);
    Vec dreadout(st.readout.size(), 0.0);
    matvec_t_add(p.out_proj, dlogits, dreadout);

    Vec ds(dh, 0.0), dcontext(2 * dh, 0.0), de_prev(de, 0.0);
    std::copy(dreadout.begin(), dreadout.begin() + dh, ds.begin());
    std::copy(dreadout.begin() + dh, dreadout.begin() + 3 * dh,
              dcontext.begin());
    std::copy(dreadout.begin() + 3 * dh, dreadout.end(), de_prev.begin());
    add(ds, ds_carry);

    // Decoder GRU: input was [e_prev ; context].
    Vec dg(de + 2 * dh, 0.0);
    Vec ds_prev(dh, 0.0);
    gru_backward(p.dec, st.gru, ds, g.dec, dg, ds_prev);
    for (size_t k = 0; k < de; ++k)
      de_prev[k] += dg[k];
    for (size_t k = 0; k < 2 * dh; ++k)
      dcontext[k] += dg[de + k];

    attend_backward(p, c.enc.enc, st.att, dcontext, g, ds_prev, dh_enc);

    double* emb_grad = g.tgt_emb.row(st.y_prev);
    for (size_t k = 0; k < de; ++k)
      emb_grad[k] += de_prev[k];

    ds_carry = std::move(ds_prev);
  }

  // Through the initial-state map into the backward encoder state at 1.
  Vec ds0_pre(dh);
  for (size_t i = 0; i < dh; ++i)
    ds0_pre[i] = ds_carry[i] * (1.0 - c.s0[i] * c.s0[i]);
  outer_add(g.init_state, ds0_pre, c.enc.h_bwd[0]);
  add(g.init_bias, ds0_pre);
  Vec dhb_extra(dh, 0.0);
  matvec_t_add(p.init_state, ds0_pre, dhb_extra);

  std::vector<Vec> dx(n, Vec(de, 0.0));

  // Forward-direction GRU, backprop right to left.
  Vec carry(dh, 0.0);
  for (size_t i = n; i-- > 0;) {
    Vec dhi = carry;
    for (size_t k = 0; k < dh; ++k)
      dhi[k] += dh_enc[i][k];
    carry.assign(dh, 0.0);
    gru_backward(p.enc_fwd, c.enc.fwd[i], dhi, g.enc_fwd, dx[i], carry);
  }

  // Backward-direction GRU: h_bwd[i] depends on h_bwd[i+1], so backprop
  // runs left to right.
  carry.assign(dh, 0.0);
  for (size_t i = 0; i < n; ++i) {
    Vec dhi = carry;
    for (size_t k = 0; k < dh; ++k)
      dhi[k] += dh_enc[i][dh + k];
    if (i == 0)
      add(dhi, dhb_extra);
    carry.assign(dh, 0.0);
    gru_backward(p.enc_bwd, c.enc.bwd[i], dhi, g.enc_bwd, dx[i], carry);
  }

  for (size_t i = 0; i < n; ++i) {
    double* emb_grad = g.src_emb.row(src[i]);
    for (size_t k = 0; k < de; ++k)
      emb_grad[k] += dx[i][k];
  }
}

}  // namespace

GruWeights::GruWeights(size_t input_dim, size_t hidden_dim)
    : w_update(hidden_dim, input_dim),
      u_update(hidden_dim, hidden_dim),
      w_reset(hidden_dim, input_dim),
      u_reset(hidden_dim, hidden_dim),
      w_cand(hidden_dim, input_dim),
      u_cand(hidden_dim, hidden_dim),
      b_update(hidden_dim, 0.0),
      b_reset(hidden_dim, 0.0),
      b_cand(hidden_dim, 0.0) {}

NmtParams NmtParams::zeros(const NmtDims& dims) {
  if (dims.vocab_src == 0 || dims.vocab_tgt == 0 || dims.d_emb == 0 ||
      dims.d_hid == 0 || dims.d_att == 0)
    throw NmtError("all model dimensions must be positive");
  NmtParams p;
  p.dims = dims;
  p.src_emb = Mat(dims.vocab_src, dims.d_emb);
  p.tgt_emb = Mat(dims.vocab_tgt, dims.d_emb);
  p.enc_fwd = GruWeights(dims.d_emb, dims.d_hid);
  p.enc_bwd = GruWeights(dims.d_emb, dims.d_hid);
  p.dec = GruWeights(dims.d_emb + 2 * dims.d_hid, dims.d_hid);
  p.att_state = Mat(dims.d_att, dims.d_hid);
  p.att_enc = Mat(dims.d_att, 2 * dims.d_hid);
  p.att_score.assign(dims.d_att, 0.0);
  p.init_state = Mat(dims.d_hid, dims.d_hid);
  p.init_bias.assign(dims.d_hid, 0.0);
  p.out_proj = Mat(dims.vocab_tgt, dims.d_hid + 2 * dims.d_hid + dims.d_emb);
  p.out_bias.assign(dims.vocab_tgt, 0.0);
  return p;
}

NmtParams NmtParams::random_init(const NmtDims& dims, uint64_t seed) {
  NmtParams p = zeros(dims);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-0.08, 0.08);
  p.for_each_tensor([&](const std::string&, double* data, size_t size) {
    for (size_t i = 0; i < size; ++i)
      data[i] = dist(rng);
  });
  return p;
}

size_t NmtParams::parameter_count() const {
  size_t total = 0;
  for_each_tensor(
      [&](const std::string&, const double*, size_t size) { total += size; });
  return total;
}

void NmtParams::for_each_tensor(
    const std::function<void(const std::string&, double*, size_t)>& fn) {
  auto visit_gru = [&](const std::string& prefix, GruWeights& g) {
    fn(prefix + ".w_update", g.w_update.a.data(), g.w_update.size());
    fn(prefix + ".u_update", g.u_update.a.data(), g.u_update.size());
    fn(prefix + ".b_update", g.b_update.data(), g.b_update.size());
    fn(prefix + ".w_reset", g.w_reset.a.data(), g.w_reset.size());
    fn(prefix + ".u_reset", g.u_reset.a.data(), g.u_reset.size());
    fn(prefix + ".b_reset", g.b_reset.data(), g.b_reset.size());
    fn(prefix + ".w_cand", g.w_cand.a.data(), g.w_cand.size());
    fn(prefix + ".u_cand", g.u_cand.a.data(), g.u_cand.size());
    fn(prefix + ".b_cand", g.b_cand.data(), g.b_cand.size());
  };
  fn("src_emb", src_emb.a.data(), src_emb.size());
  fn("tgt_emb", tgt_emb.a.data(), tgt_emb.size());
  visit_gru("enc_fwd", enc_fwd);
  visit_gru("enc_bwd", enc_bwd);
  visit_gru("dec", dec);
  fn("att_state", att_state.a.data(), att_state.size());
  fn("att_enc", att_enc.a.data(), att_enc.size());
  fn("att_score", att_score.data(), att_score.size());
  fn("init_state", init_state.a.data(), init_state.size());
  fn("init_bias", init_bias.data(), init_bias.size());
  fn("out_proj", out_proj.a.data(), out_proj.size());
  fn("out_bias", out_bias.data(), out_bias.size());
}

void NmtParams::for_each_tensor(
    const std::function<void(const std::string&, const double*, size_t)>& fn)
    const {
  const_cast<NmtParams*>(this)->for_each_tensor(
      [&](const std::string& name, double* data, size_t size) {
        fn(name, data, size);
      });
}

EncodedSource encode(const NmtParams& params, const std::vector<int>& tokens) {
  return encode_cached(params, tokens).enc;
}

AttentionStep attend(const NmtParams& params, const EncodedSource& enc,
                     const Vec& s_prev) {
  return attend_cached(params, enc, s_prev).step;
}

Vec initial_state(const NmtParams& params, const EncodedSource&,
                  const Vec& h_bwd_first) {
  return initial_state_cached(params, h_bwd_first, nullptr);
}

DecodeStep decode_step(const NmtParams& params, const EncodedSource& enc,
                       const Vec& s_prev, int y_prev_id) {
  DecodeStep out;
  const Vec e_prev = embedding_row(params.tgt_emb, y_prev_id);
  AttentionCache att = attend_cached(params, enc, s_prev);
  Vec g = e_prev;
  g.insert(g.end(), att.step.context.begin(), att.step.context.end());
  out.state = gru_forward(params.dec, g, s_prev, nullptr);
  Vec readout = out.state;
  readout.insert(readout.end(), att.step.context.begin(),
                 att.step.context.end());
  readout.insert(readout.end(), e_prev.begin(), e_prev.end());
  matvec(params.out_proj, readout, out.logits);
  add(out.logits, params.out_bias);
  out.attention = std::move(att.step);
  return out;
}

double sequence_loss(const NmtParams& params, const std::vector<int>& src,
                     const std::vector<int>& tgt) {
  return forward_sequence(params, src, tgt).loss;
}

double sequence_loss_grad(const NmtParams& params, const std::vector<int>& src,
                          const std::vector<int>& tgt, NmtParams& grads) {
  if (!(grads.dims == params.dims))
    throw NmtError("gradient dims mismatch");
  SequenceCache cache = forward_sequence(params, src, tgt);
  backward_sequence(params, src, cache, grads);
  return cache.loss;
}

GradCheckReport grad_check(const NmtParams& params, const std::vector<int>& src,
                           const std::vector<int>& tgt, double epsilon) {
  NmtParams grads = NmtParams::zeros(params.dims);
  sequence_loss_grad(params, src, tgt, grads);

  NmtParams probe = params;
  GradCheckReport report;

  // Flatten both parameter sets in the same fixed tensor order.
  std::vector<std::tuple<std::string, double*, size_t>> probe_tensors;
  probe.for_each_tensor([&](const std::string& name, double* d, size_t n) {
    probe_tensors.emplace_back(name, d, n);
  });
  std::vector<std::tuple<std::string, double*, size_t>> grad_tensors;
  grads.for_each_tensor([&](const std::string& name, double* d, size_t n) {
    grad_tensors.emplace_back(name, d, n);
  });

  for (size_t ti = 0; ti < probe_tensors.size(); ++ti) {
    auto& [name, data, size] = probe_tensors[ti];
    double* analytic = std::get<1>(grad_tensors[ti]);
    for (size_t i = 0; i < size; ++i) {
      const double saved = data[i];
      data[i] = saved + epsilon;
      const double up = sequence_loss(probe, src, tgt);
      data[i] = saved - epsilon;
      const double down = sequence_loss(probe, src, tgt);
      data[i] = saved;
      const double numeric = (up - down) / (2.0 * epsilon);
      const double denom =
          std::max({std::abs(analytic[i]), std::abs(numeric), 1e-6});
      const double rel = std::abs(analytic[i] - numeric) / denom;
      if (rel > report.max_rel_error) {
        report.max_rel_error = rel;
        report.worst_tensor = name;
        report.worst_index = i;
        report.analytic = analytic[i];
        report.numeric = numeric;
      }
    }
  }
  return report;
}

std::vector<int> translate(const NmtParams& params, const std::vector<int>& src,
                           int start_id, int eos_id, size_t max_len) {
  if (max_len < 1)
    throw NmtError("max_len must be at least 1");
  EncoderCache ec = encode_cached(params, src);
  const EncodedSource& enc = ec.enc;
  Vec s = initial_state_cached(params, ec.h_bwd[0], nullptr);
  int y_prev = start_id;
  std::vector<int> out;
  while (out.size() < max_len) {
    DecodeStep step = decode_step(params, enc, s, y_prev);
    int best = 0;
    for (size_t i = 1; i < step.logits.size(); ++i)
      if (step.logits[i] > step.logits[best])
        best = static_cast<int>(i);
    if (best == eos_id)
      break;
    out.push_back(best);
    y_prev = best;
    s = std::move(step.state);
  }
  return out;
}

}  // namespace subchar::nmt
