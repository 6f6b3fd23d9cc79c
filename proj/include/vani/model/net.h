// Copyright 2026 The VANI Project Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef VANI_MODEL_NET_H_
#define VANI_MODEL_NET_H_

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "vani/model/autodiff.h"
#include "vani/model/config.h"
#include "vani/model/params.h"
#include "vani/text.h"
#include "vani/util/error.h"
#include "vani/util/mat.h"
#include "vani/util/rng.h"

namespace vani {

// F0 enters the network in units of 100 Hz so gate pre-activations stay in
// a trainable range; the same scale is the f0-predictor target domain.
inline constexpr double kF0InputScale = 0.01;
inline constexpr double kLogSigmaClamp = 7.0;
inline constexpr double kLog2Pi = 1.8378770664093453;

// Frame-level conditioning for the mel decoder: duration-regulated text
// context plus accent/speaker embeddings and the F0/energy contours.
template <typename T>
struct Conditioning {
  Mat<T> context;          // d_txt x F
  std::vector<T> accent;   // d_accent
  std::vector<T> speaker;  // d_speaker
  std::vector<T> f0_hz;    // F, raw Hz
  std::vector<T> energy;   // F

  int n_frames() const { return context.cols; }
};

template <typename T>
struct TrainingExample {
  TokenSequence tokens;
  int accent_idx = 0;
  int speaker_idx = 0;
  std::vector<int> durations;  // per token, sums to mel.cols
  Mat<T> mel;                  // n_mels x F
  std::vector<T> f0_hz;        // F
  std::vector<T> energy;       // F
};

// The mel synthesizer: embedding + convolutional text encoder,
// deterministic duration/F0/energy predictors, and a 2-step autoregressive
// affine flow over mel frames (step 1 runs in time order, step 2 over the
// reversed sequence). Training-direction passes run on the autodiff tape;
// the sampling direction is a plain autoregressive loop.
template <typename T>
class VaniModel {
 public:
  explicit VaniModel(const ModelConfig& cfg) : cfg_(cfg) {
    cfg_.Validate();
    BuildParams();
    InitParams();
  }

  const ModelConfig& config() const { return cfg_; }
  ParamSet<T>& params() { return params_; }
  const ParamSet<T>& params() const { return params_; }

  int64_t CountParams() const { return params_.TotalSize(); }

  // ---- text encoder ----

  // Embedding lookup + 3 residual tanh conv layers; one column per token.
  Mat<T> EncodeText(const TokenSequence& tokens) const {
    CheckTokens(tokens);
    int tlen = tokens.length();
    std::vector<std::vector<T>> cols(tlen);
    const Mat<T>& emb = params_.Get("text_emb")->value;
    for (int i = 0; i < tlen; ++i) {
      cols[i].resize(cfg_.d_txt);
      for (int r = 0; r < cfg_.d_txt; ++r)
        cols[i][r] = emb(r, tokens.ids[i]);
    }
    for (int l = 0; l < 3; ++l) {
      const Mat<T>& w = params_.Get(EncName(l, "w"))->value;
      const Mat<T>& b = params_.Get(EncName(l, "b"))->value;
      std::vector<std::vector<T>> next(tlen);
      for (int i = 0; i < tlen; ++i) {
        std::vector<T> window = GatherWindow(cols, i);
        std::vector<T> y = MatVecPure(w, window);
        for (int r = 0; r < cfg_.d_txt; ++r)
          next[i].push_back(std::tanh(y[r] + b.v[r]) + cols[i][r]);
      }
      cols = std::move(next);
    }
    Mat<T> phi(cfg_.d_txt, tlen);
    for (int i = 0; i < tlen; ++i)
      for (int r = 0; r < cfg_.d_txt; ++r) phi(r, i) = cols[i][r];
    return phi;
  }

  // Tape twin of EncodeText; returns one Ref per token column.
  std::vector<typename Graph<T>::Ref> EncodeTextGraph(
      Graph<T>* g, const TokenSequence& tokens) {
    CheckTokens(tokens);
    using Ref = typename Graph<T>::Ref;
    int tlen = tokens.length();
    Ref emb = g->Param(params_.Get("text_emb"));
    std::vector<Ref> cols(tlen);
    for (int i = 0; i < tlen; ++i) cols[i] = g->Col(emb, tokens.ids[i]);
    for (int l = 0; l < 3; ++l) {
      Ref w = g->Param(params_.Get(EncName(l, "w")));
      Ref b = g->Param(params_.Get(EncName(l, "b")));
      Ref zero = g->Input(Mat<T>(cfg_.d_txt, 1));
      std::vector<Ref> next(tlen);
      for (int i = 0; i < tlen; ++i) {
        std::vector<Ref> window;
        for (int k = -(cfg_.conv_kernel / 2); k <= cfg_.conv_kernel / 2; ++k) {
          int j = i + k;
          window.push_back(j >= 0 && j < tlen ? cols[j] : zero);
        }
        Ref y = g->Tanh(g->Add(g->MatVec(w, g->Concat(window)), b));
        next[i] = g->Add(y, cols[i]);
      }
      cols = std::move(next);
    }
    return cols;
  }

  // ---- duration regulation ----

  // Repeats column i of phi durations[i] times.
  static Mat<T> RegulateDurations(const Mat<T>& phi,
                                  std::span<const int> durations) {
    if (static_cast<int>(durations.size()) != phi.cols)
      throw Error("durations/token count mismatch");
    int total = 0;
    for (int d : durations) {
      if (d < 1) throw Error("durations must be >= 1");
      total += d;
    }
    Mat<T> out(phi.rows, total);
    int at = 0;
    for (int i = 0; i < phi.cols; ++i)
      for (int rep = 0; rep < durations[i]; ++rep, ++at)
        for (int r = 0; r < phi.rows; ++r) out(r, at) = phi(r, i);
    return out;
  }

  // ---- attribute predictors ----

  struct Attributes {
    std::vector<T> duration_raw;  // per token, positive reals
    std::vector<int> durations;   // per token, >= 1
    std::vector<T> f0_hz;         // per frame
    std::vector<T> energy;        // per frame
  };

  Attributes PredictAttributes(const Mat<T>& phi, int accent_idx,
                               int speaker_idx) const {
    std::vector<T> acc = EmbeddingCol("accent_emb", accent_idx, cfg_.n_accents);
    std::vector<T> spk =
        EmbeddingCol("speaker_emb", speaker_idx, cfg_.n_speakers);
    Attributes out;
    for (int i = 0; i < phi.cols; ++i) {
      std::vector<T> in = TokenCondVec(phi, i, acc, spk);
      T raw = PredictorForward("pred_dur", in, /*softplus=*/true);
      out.duration_raw.push_back(raw);
      out.durations.push_back(
          std::max<int>(1, static_cast<int>(std::llround(double(raw)))));
    }
    Mat<T> ctx = RegulateDurations(phi, out.durations);
    for (int j = 0; j < ctx.cols; ++j) {
      std::vector<T> in = TokenCondVec(ctx, j, acc, spk);
      T f0 = PredictorForward("pred_f0", in, false) / static_cast<T>(kF0InputScale);
      out.f0_hz.push_back(std::max(T(0), f0));
      out.energy.push_back(PredictorForward("pred_energy", in, false));
    }
    return out;
  }

  Conditioning<T> MakeConditioning(const Mat<T>& phi,
                                   std::span<const int> durations,
                                   int accent_idx, int speaker_idx,
                                   std::vector<T> f0_hz,
                                   std::vector<T> energy) const {
    Conditioning<T> cond;
    cond.context = RegulateDurations(phi, durations);
    cond.accent = EmbeddingCol("accent_emb", accent_idx, cfg_.n_accents);
    cond.speaker = EmbeddingCol("speaker_emb", speaker_idx, cfg_.n_speakers);
    cond.f0_hz = std::move(f0_hz);
    cond.energy = std::move(energy);
    if (static_cast<int>(cond.f0_hz.size()) != cond.context.cols ||
        static_cast<int>(cond.energy.size()) != cond.context.cols)
      throw Error("conditioning length mismatch");
    return cond;
  }

  // ---- flow, training direction (tape) ----

  struct FlowResult {
    Mat<T> z;
    T log_det = T(0);
    // Saved per-step affine outputs, time-aligned: mu[s], log_sigma[s]
    // are n_mels x F.
    std::vector<Mat<T>> mu;
    std::vector<Mat<T>> log_sigma;
  };

  FlowResult FlowForward(const Mat<T>& x, const Conditioning<T>& cond) {
    CheckFlowInputs(x, cond);
    CheckParamsFinite();
    Graph<T> g;
    auto cond_refs = BuildCondRefs(&g, cond);
    std::vector<typename Graph<T>::Ref> x_cols(x.cols);
    for (int t = 0; t < x.cols; ++t) x_cols[t] = g.Input(ColOf(x, t));
    auto flow = BuildFlowGraph(&g, x_cols, cond_refs);

    FlowResult out;
    out.z = Mat<T>(x.rows, x.cols);
    for (int t = 0; t < x.cols; ++t)
      for (int r = 0; r < x.rows; ++r)
        out.z(r, t) = g.Val(flow.z_cols[t]).v[r];
    out.log_det = -g.ScalarValue(flow.sum_log_sigma);
    out.mu.resize(cfg_.n_flow_steps);
    out.log_sigma.resize(cfg_.n_flow_steps);
    for (int s = 0; s < cfg_.n_flow_steps; ++s) {
      out.mu[s] = Mat<T>(x.rows, x.cols);
      out.log_sigma[s] = Mat<T>(x.rows, x.cols);
      for (int t = 0; t < x.cols; ++t)
        for (int r = 0; r < x.rows; ++r) {
          out.mu[s](r, t) = g.Val(flow.mu_cols[s][t]).v[r];
          out.log_sigma[s](r, t) = g.Val(flow.ls_cols[s][t]).v[r];
        }
    }
    if (!MatFinite(out.z)) throw Error("flow produced non-finite values");
    return out;
  }

  // Negative log likelihood per frame-channel element under a standard
  // normal prior: (0.5 * sum(z^2 + log 2pi) - log_det) / (C * F).
  T Nll(const Mat<T>& x, const Conditioning<T>& cond) {
    FlowResult r = FlowForward(x, cond);
    double zsq = 0.0;
    for (T v : r.z.v) zsq += static_cast<double>(v) * v;
    double n = static_cast<double>(r.z.size());
    double nll =
        (0.5 * (zsq + n * kLog2Pi) - static_cast<double>(r.log_det)) / n;
    if (!std::isfinite(nll)) throw Error("non-finite NLL");
    return static_cast<T>(nll);
  }

  // ---- flow, sampling direction (pure autoregressive) ----

  Mat<T> FlowInverse(const Mat<T>& z, const Conditioning<T>& cond) const {
    CheckFlowInputs(z, cond);
    int F = z.cols, C = cfg_.n_mels, H = cfg_.lstm_hidden;
    std::vector<std::vector<T>> frame_cond(F);
    for (int j = 0; j < F; ++j) frame_cond[j] = FrameCondVec(cond, j);

    Mat<T> cur = z;
    for (int s = cfg_.n_flow_steps - 1; s >= 0; --s) {
      Mat<T> prev_out = cur;  // this step's output, time-aligned
      Mat<T> step_in(C, F);
      std::vector<std::vector<T>> h(cfg_.n_lstm_layers, std::vector<T>(H, T(0)));
      std::vector<std::vector<T>> c(cfg_.n_lstm_layers, std::vector<T>(H, T(0)));
      const Mat<T>& go = params_.Get(FlowName(s, "go"))->value;
      std::vector<T> prev(go.v.begin(), go.v.end());
      for (int t = 0; t < F; ++t) {
        int j = StepFrameIndex(s, t, F);
        std::vector<T> in = ConcatVec(prev, frame_cond[j]);
        const std::vector<T>& top = LstmStackPure(s, in, &h, &c);
        auto [mu, ls] = AffineHeadPure(s, top);
        for (int r = 0; r < C; ++r)
          step_in(r, j) = prev_out(r, j) * std::exp(ls[r]) + mu[r];
        prev.assign(C, T(0));
        for (int r = 0; r < C; ++r) prev[r] = step_in(r, j);
      }
      cur = std::move(step_in);
    }
    return cur;
  }

  // ---- training loss ----

  struct LossRefs {
    typename Graph<T>::Ref total;
    typename Graph<T>::Ref nll;
    typename Graph<T>::Ref dur;
    typename Graph<T>::Ref f0;
    typename Graph<T>::Ref energy;
  };

  // Full training objective on the tape: flow NLL (teacher-forced F0 and
  // energy) plus L2 losses of the three attribute predictors.
  LossRefs BuildLoss(Graph<T>* g, const TrainingExample<T>& ex) {
    using Ref = typename Graph<T>::Ref;
    int tlen = ex.tokens.length();
    if (static_cast<int>(ex.durations.size()) != tlen)
      throw Error("durations/token count mismatch");
    int F = ex.mel.cols;
    int dsum = 0;
    for (int d : ex.durations) dsum += d;
    if (dsum != F) throw Error("durations do not sum to the frame count");
    if (static_cast<int>(ex.f0_hz.size()) != F ||
        static_cast<int>(ex.energy.size()) != F)
      throw Error("f0/energy length mismatch");

    std::vector<Ref> phi = EncodeTextGraph(g, ex.tokens);
    Ref acc = g->Col(g->Param(params_.Get("accent_emb")), ex.accent_idx);
    Ref spk = g->Col(g->Param(params_.Get("speaker_emb")), ex.speaker_idx);

    // Frame-level context by repeating token columns.
    std::vector<Ref> ctx(F);
    {
      int at = 0;
      for (int i = 0; i < tlen; ++i)
        for (int rep = 0; rep < ex.durations[i]; ++rep) ctx[at++] = phi[i];
    }

    CondGraphRefs cond_refs;
    cond_refs.frame_cond.resize(F);
    std::vector<Ref> f0_in(F), en_in(F);
    for (int j = 0; j < F; ++j) {
      Mat<T> f0v(1, 1), env(1, 1);
      f0v.v[0] = ex.f0_hz[j] * static_cast<T>(kF0InputScale);
      env.v[0] = ex.energy[j];
      f0_in[j] = g->Input(std::move(f0v));
      en_in[j] = g->Input(std::move(env));
      cond_refs.frame_cond[j] =
          g->Concat({ctx[j], acc, spk, f0_in[j], en_in[j]});
    }

    std::vector<Ref> x_cols(F);
    for (int t = 0; t < F; ++t) x_cols[t] = g->Input(ColOf(ex.mel, t));
    auto flow = BuildFlowGraph(g, x_cols, cond_refs);

    // nll = (0.5 * sum z^2 + 0.5 * N log 2pi + sum log_sigma) / N.
    Ref zsq = g->Scalar(T(0));
    for (int t = 0; t < F; ++t)
      zsq = g->Add(zsq, g->Sum(g->Square(flow.z_cols[t])));
    T n_elems = static_cast<T>(ex.mel.size());
    Ref nll = g->Scale(
        g->AddConst(g->Add(g->Scale(zsq, T(0.5)), flow.sum_log_sigma),
                    T(0.5) * n_elems * static_cast<T>(kLog2Pi)),
        T(1) / n_elems);

    // Predictor losses.
    Ref dur_loss = g->Scalar(T(0));
    for (int i = 0; i < tlen; ++i) {
      Ref in = g->Concat({phi[i], acc, spk});
      Ref pred = PredictorGraph(g, "pred_dur", in, /*softplus=*/true);
      Ref target = g->Scalar(static_cast<T>(ex.durations[i]));
      dur_loss = g->Add(dur_loss, g->Square(g->Sub(pred, target)));
    }
    dur_loss = g->Scale(dur_loss, T(1) / static_cast<T>(tlen));

    Ref f0_loss = g->Scalar(T(0));
    Ref en_loss = g->Scalar(T(0));
    for (int j = 0; j < F; ++j) {
      Ref in = g->Concat({ctx[j], acc, spk});
      Ref pf = PredictorGraph(g, "pred_f0", in, false);
      Ref pe = PredictorGraph(g, "pred_energy", in, false);
      f0_loss = g->Add(f0_loss, g->Square(g->Sub(pf, f0_in[j])));
      en_loss = g->Add(en_loss, g->Square(g->Sub(pe, en_in[j])));
    }
    f0_loss = g->Scale(f0_loss, T(1) / static_cast<T>(F));
    en_loss = g->Scale(en_loss, T(1) / static_cast<T>(F));

    LossRefs out;
    out.nll = nll;
    out.dur = dur_loss;
    out.f0 = f0_loss;
    out.energy = en_loss;
    out.total = g->Add(
        g->Add(nll, g->Scale(dur_loss, static_cast<T>(cfg_.w_duration))),
        g->Add(g->Scale(f0_loss, static_cast<T>(cfg_.w_f0)),
               g->Scale(en_loss, static_cast<T>(cfg_.w_energy))));
    return out;
  }

  // ---- synthesis ----

  // tau = 0 samples the prior mean. Any (text, accent, speaker) combination
  // is legal; cross-lingual transfer is simply a non-native pairing.
  Mat<T> Synthesize(const TokenSequence& tokens, int accent_idx,
                    int speaker_idx, double tau, uint64_t seed,
                    Attributes* attrs_out = nullptr) const {
    Mat<T> phi = EncodeText(tokens);
    Attributes attrs = PredictAttributes(phi, accent_idx, speaker_idx);
    Conditioning<T> cond =
        MakeConditioning(phi, attrs.durations, accent_idx, speaker_idx,
                         attrs.f0_hz, attrs.energy);
    int F = cond.n_frames();
    Mat<T> z(cfg_.n_mels, F);
    if (tau > 0.0) {
      Rng rng(seed);
      for (auto& v : z.v) v = static_cast<T>(tau * rng.Gaussian());
    }
    if (attrs_out) *attrs_out = attrs;
    return FlowInverse(z, cond);
  }

  int StepFrameIndex(int step, int t, int F) const {
    return step % 2 == 0 ? t : F - 1 - t;
  }

 private:
  struct CondGraphRefs {
    std::vector<typename Graph<T>::Ref> frame_cond;
  };

  struct FlowGraphOut {
    std::vector<typename Graph<T>::Ref> z_cols;  // time-aligned
    typename Graph<T>::Ref sum_log_sigma;
    // mu_cols[s][t], ls_cols[s][t], time-aligned per step.
    std::vector<std::vector<typename Graph<T>::Ref>> mu_cols;
    std::vector<std::vector<typename Graph<T>::Ref>> ls_cols;
  };

  static std::string EncName(int layer, const char* part) {
    return "enc" + std::to_string(layer) + "." + part;
  }
  static std::string FlowName(int step, const std::string& part) {
    return "flow" + std::to_string(step) + "." + part;
  }

  void CheckTokens(const TokenSequence& tokens) const {
    if (tokens.ids.empty()) throw Error("empty token sequence");
    for (int id : tokens.ids)
      if (id < 0 || id >= cfg_.vocab_size)
        throw Error("token id out of range: " + std::to_string(id));
  }

  void CheckFlowInputs(const Mat<T>& x, const Conditioning<T>& cond) const {
    if (x.rows != cfg_.n_mels) throw Error("mel channel count mismatch");
    if (x.cols < 1) throw Error("empty mel sequence");
    if (cond.context.rows != cfg_.d_txt ||
        cond.context.cols != x.cols ||
        static_cast<int>(cond.f0_hz.size()) != x.cols ||
        static_cast<int>(cond.energy.size()) != x.cols ||
        static_cast<int>(cond.accent.size()) != cfg_.d_accent ||
        static_cast<int>(cond.speaker.size()) != cfg_.d_speaker)
      throw Error("conditioning shape mismatch");
  }

  void CheckParamsFinite() const {
    for (size_t i = 0; i < params_.count(); ++i)
      for (T v : params_.at(i)->value.v)
        if (!std::isfinite(static_cast<double>(v)))
          throw Error("non-finite parameter in " + params_.at(i)->name);
  }

  static bool MatFinite(const Mat<T>& m) {
    for (T v : m.v)
      if (!std::isfinite(static_cast<double>(v))) return false;
    return true;
  }

  static Mat<T> ColOf(const Mat<T>& m, int j) {
    Mat<T> out(m.rows, 1);
    for (int r = 0; r < m.rows; ++r) out.v[r] = m(r, j);
    return out;
  }

  std::vector<T> EmbeddingCol(const std::string& table, int idx,
                              int table_size) const {
    if (idx < 0 || idx >= table_size)
      throw Error("embedding index out of range for " + table + ": " +
                  std::to_string(idx));
    const Mat<T>& emb = params_.Get(table)->value;
    std::vector<T> out(emb.rows);
    for (int r = 0; r < emb.rows; ++r) out[r] = emb(r, idx);
    return out;
  }

  std::vector<T> GatherWindow(const std::vector<std::vector<T>>& cols,
                              int center) const {
    int half = cfg_.conv_kernel / 2;
    std::vector<T> out;
    out.reserve(static_cast<size_t>(cfg_.conv_kernel) * cfg_.d_txt);
    for (int k = -half; k <= half; ++k) {
      int j = center + k;
      if (j >= 0 && j < static_cast<int>(cols.size()))
        out.insert(out.end(), cols[j].begin(), cols[j].end());
      else
        out.insert(out.end(), cfg_.d_txt, T(0));
    }
    return out;
  }

  static std::vector<T> MatVecPure(const Mat<T>& w, const std::vector<T>& x) {
    std::vector<T> out(w.rows);
    for (int i = 0; i < w.rows; ++i) {
      T acc = T(0);
      const T* row = &w.v[static_cast<size_t>(i) * w.cols];
      for (int j = 0; j < w.cols; ++j) acc += row[j] * x[j];
      out[i] = acc;
    }
    return out;
  }

  static T StableSigmoid(T x) {
    if (x >= T(0)) {
      T e = std::exp(-x);
      return T(1) / (T(1) + e);
    }
    T e = std::exp(x);
    return e / (T(1) + e);
  }

  static std::vector<T> ConcatVec(const std::vector<T>& a,
                                  const std::vector<T>& b) {
    std::vector<T> out;
    out.reserve(a.size() + b.size());
    out.insert(out.end(), a.begin(), a.end());
    out.insert(out.end(), b.begin(), b.end());
    return out;
  }

  std::vector<T> TokenCondVec(const Mat<T>& m, int col,
                              const std::vector<T>& acc,
                              const std::vector<T>& spk) const {
    std::vector<T> out;
    out.reserve(m.rows + acc.size() + spk.size());
    for (int r = 0; r < m.rows; ++r) out.push_back(m(r, col));
    out.insert(out.end(), acc.begin(), acc.end());
    out.insert(out.end(), spk.begin(), spk.end());
    return out;
  }

  std::vector<T> FrameCondVec(const Conditioning<T>& cond, int j) const {
    std::vector<T> out;
    out.reserve(cfg_.d_txt + cfg_.d_accent + cfg_.d_speaker + 2);
    for (int r = 0; r < cond.context.rows; ++r)
      out.push_back(cond.context(r, j));
    out.insert(out.end(), cond.accent.begin(), cond.accent.end());
    out.insert(out.end(), cond.speaker.begin(), cond.speaker.end());
    out.push_back(cond.f0_hz[j] * static_cast<T>(kF0InputScale));
    out.push_back(cond.energy[j]);
    return out;
  }

  // gates rows: [input; forget; cell; output]
  const std::vector<T>& LstmStackPure(int step, const std::vector<T>& in,
                                      std::vector<std::vector<T>>* h,
                                      std::vector<std::vector<T>>* c) const {
    int H = cfg_.lstm_hidden;
    const std::vector<T>* x = &in;
    for (int l = 0; l < cfg_.n_lstm_layers; ++l) {
      const Mat<T>& w = params_.Get(FlowName(step, LstmName(l, "w")))->value;
      const Mat<T>& u = params_.Get(FlowName(step, LstmName(l, "u")))->value;
      const Mat<T>& b = params_.Get(FlowName(step, LstmName(l, "b")))->value;
      std::vector<T> wx = MatVecPure(w, *x);
      std::vector<T> uh = MatVecPure(u, (*h)[l]);
      std::vector<T>& hc = (*h)[l];
      std::vector<T>& cc = (*c)[l];
      for (int r = 0; r < H; ++r) {
        T gi = StableSigmoid(wx[r] + uh[r] + b.v[r]);
        T gf = StableSigmoid(wx[H + r] + uh[H + r] + b.v[H + r]);
        T gg = std::tanh(wx[2 * H + r] + uh[2 * H + r] + b.v[2 * H + r]);
        T go = StableSigmoid(wx[3 * H + r] + uh[3 * H + r] + b.v[3 * H + r]);
        cc[r] = gf * cc[r] + gi * gg;
        hc[r] = go * std::tanh(cc[r]);
      }
      x = &(*h)[l];
    }
    return (*h)[cfg_.n_lstm_layers - 1];
  }

  std::pair<std::vector<T>, std::vector<T>> AffineHeadPure(
      int step, const std::vector<T>& hidden) const {
    const Mat<T>& w = params_.Get(FlowName(step, "head.w"))->value;
    const Mat<T>& b = params_.Get(FlowName(step, "head.b"))->value;
    std::vector<T> y = MatVecPure(w, hidden);
    int C = cfg_.n_mels;
    std::vector<T> mu(C), ls(C);
    for (int r = 0; r < C; ++r) {
      mu[r] = y[r] + b.v[r];
      T s = y[C + r] + b.v[C + r];
      ls[r] = std::min(static_cast<T>(kLogSigmaClamp),
                       std::max(static_cast<T>(-kLogSigmaClamp), s));
    }
    return {mu, ls};
  }

  T PredictorForward(const std::string& name, const std::vector<T>& in,
                     bool softplus) const {
    const Mat<T>& w1 = params_.Get(name + ".l1.w")->value;
    const Mat<T>& b1 = params_.Get(name + ".l1.b")->value;
    const Mat<T>& w2 = params_.Get(name + ".l2.w")->value;
    const Mat<T>& b2 = params_.Get(name + ".l2.b")->value;
    std::vector<T> h = MatVecPure(w1, in);
    for (int r = 0; r < w1.rows; ++r) h[r] = std::tanh(h[r] + b1.v[r]);
    std::vector<T> y = MatVecPure(w2, h);
    T out = y[0] + b2.v[0];
    if (softplus)
      out = out > T(20) ? out
                        : (out < T(-20) ? std::exp(out)
                                        : std::log1p(std::exp(out)));
    return out;
  }

  typename Graph<T>::Ref PredictorGraph(Graph<T>* g, const std::string& name,
                                        typename Graph<T>::Ref in,
                                        bool softplus) {
    using Ref = typename Graph<T>::Ref;
    Ref w1 = g->Param(params_.Get(name + ".l1.w"));
    Ref b1 = g->Param(params_.Get(name + ".l1.b"));
    Ref w2 = g->Param(params_.Get(name + ".l2.w"));
    Ref b2 = g->Param(params_.Get(name + ".l2.b"));
    Ref h = g->Tanh(g->Add(g->MatVec(w1, in), b1));
    Ref y = g->Add(g->MatVec(w2, h), b2);
    return softplus ? g->Softplus(y) : y;
  }

  CondGraphRefs BuildCondRefs(Graph<T>* g, const Conditioning<T>& cond) {
    CondGraphRefs out;
    int F = cond.n_frames();
    out.frame_cond.resize(F);
    for (int j = 0; j < F; ++j) {
      std::vector<T> v = FrameCondVec(cond, j);
      Mat<T> m(static_cast<int>(v.size()), 1);
      m.v = std::move(v);
      out.frame_cond[j] = g->Input(std::move(m));
    }
    return out;
  }

  FlowGraphOut BuildFlowGraph(Graph<T>* g,
                              const std::vector<typename Graph<T>::Ref>& x_cols,
                              const CondGraphRefs& cond) {
    using Ref = typename Graph<T>::Ref;
    int F = static_cast<int>(x_cols.size());
    int C = cfg_.n_mels;
    int H = cfg_.lstm_hidden;

    FlowGraphOut out;
    out.sum_log_sigma = g->Scalar(T(0));
    out.mu_cols.resize(cfg_.n_flow_steps);
    out.ls_cols.resize(cfg_.n_flow_steps);

    std::vector<Ref> cur = x_cols;  // current step input, time-aligned
    for (int s = 0; s < cfg_.n_flow_steps; ++s) {
      out.mu_cols[s].resize(F);
      out.ls_cols[s].resize(F);
      std::vector<Ref> next(F);

      std::vector<Ref> lstm_w(cfg_.n_lstm_layers), lstm_u(cfg_.n_lstm_layers),
          lstm_b(cfg_.n_lstm_layers);
      for (int l = 0; l < cfg_.n_lstm_layers; ++l) {
        lstm_w[l] = g->Param(params_.Get(FlowName(s, LstmName(l, "w"))));
        lstm_u[l] = g->Param(params_.Get(FlowName(s, LstmName(l, "u"))));
        lstm_b[l] = g->Param(params_.Get(FlowName(s, LstmName(l, "b"))));
      }
      Ref head_w = g->Param(params_.Get(FlowName(s, "head.w")));
      Ref head_b = g->Param(params_.Get(FlowName(s, "head.b")));

      Ref zero_h = g->Input(Mat<T>(H, 1));
      std::vector<Ref> h(cfg_.n_lstm_layers, zero_h);
      std::vector<Ref> c(cfg_.n_lstm_layers, zero_h);
      Ref prev = g->Param(params_.Get(FlowName(s, "go")));

      for (int t = 0; t < F; ++t) {
        int j = StepFrameIndex(s, t, F);
        Ref in = g->Concat({prev, cond.frame_cond[j]});
        Ref x = in;
        for (int l = 0; l < cfg_.n_lstm_layers; ++l) {
          Ref gates = g->Add(
              g->Add(g->MatVec(lstm_w[l], x), g->MatVec(lstm_u[l], h[l])),
              lstm_b[l]);
          Ref gi = g->Sigmoid(g->SliceRows(gates, 0, H));
          Ref gf = g->Sigmoid(g->SliceRows(gates, H, H));
          Ref gg = g->Tanh(g->SliceRows(gates, 2 * H, H));
          Ref go = g->Sigmoid(g->SliceRows(gates, 3 * H, H));
          c[l] = g->Add(g->Mul(gf, c[l]), g->Mul(gi, gg));
          h[l] = g->Mul(go, g->Tanh(c[l]));
          x = h[l];
        }
        Ref head = g->Add(g->MatVec(head_w, x), head_b);
        Ref mu = g->SliceRows(head, 0, C);
        Ref ls = g->Clamp(g->SliceRows(head, C, C),
                          static_cast<T>(-kLogSigmaClamp),
                          static_cast<T>(kLogSigmaClamp));
        next[j] = g->Mul(g->Sub(cur[j], mu), g->Exp(g->Neg(ls)));
        out.sum_log_sigma = g->Add(out.sum_log_sigma, g->Sum(ls));
        out.mu_cols[s][j] = mu;
        out.ls_cols[s][j] = ls;
        prev = cur[j];
      }
      cur = std::move(next);
    }
    out.z_cols = cur;
    return out;
  }

  static std::string LstmName(int layer, const char* part) {
    return "lstm" + std::to_string(layer) + "." + part;
  }

  void BuildParams() {
    int C = cfg_.n_mels, H = cfg_.lstm_hidden;
    params_.Add("text_emb", Mat<T>(cfg_.d_txt, cfg_.vocab_size));
    for (int l = 0; l < 3; ++l) {
      params_.Add(EncName(l, "w"),
                  Mat<T>(cfg_.d_txt, cfg_.d_txt * cfg_.conv_kernel));
      params_.Add(EncName(l, "b"), Mat<T>(cfg_.d_txt, 1));
    }
    params_.Add("accent_emb", Mat<T>(cfg_.d_accent, cfg_.n_accents));
    params_.Add("speaker_emb", Mat<T>(cfg_.d_speaker, cfg_.n_speakers));
    int cond_dim = cfg_.d_txt + cfg_.d_accent + cfg_.d_speaker + 2;
    for (int s = 0; s < cfg_.n_flow_steps; ++s) {
      for (int l = 0; l < cfg_.n_lstm_layers; ++l) {
        int in_dim = l == 0 ? C + cond_dim : H;
        params_.Add(FlowName(s, LstmName(l, "w")), Mat<T>(4 * H, in_dim));
        params_.Add(FlowName(s, LstmName(l, "u")), Mat<T>(4 * H, H));
        params_.Add(FlowName(s, LstmName(l, "b")), Mat<T>(4 * H, 1));
      }
      params_.Add(FlowName(s, "head.w"), Mat<T>(2 * C, H));
      params_.Add(FlowName(s, "head.b"), Mat<T>(2 * C, 1));
      params_.Add(FlowName(s, "go"), Mat<T>(C, 1));
    }
    int pin = cfg_.d_txt + cfg_.d_accent + cfg_.d_speaker;
    for (const char* p : {"pred_dur", "pred_f0", "pred_energy"}) {
      params_.Add(std::string(p) + ".l1.w", Mat<T>(cfg_.predictor_hidden, pin));
      params_.Add(std::string(p) + ".l1.b", Mat<T>(cfg_.predictor_hidden, 1));
      params_.Add(std::string(p) + ".l2.w", Mat<T>(1, cfg_.predictor_hidden));
      params_.Add(std::string(p) + ".l2.b", Mat<T>(1, 1));
    }
  }

  // The affine heads and go frames start at zero so the flow opens as the
  // identity; LSTM forget gates start open.
  void InitParams() {
    Rng rng(cfg_.seed);
    int H = cfg_.lstm_hidden;
    for (size_t i = 0; i < params_.count(); ++i) {
      ParamTensor<T>* p = params_.at(i);
      const std::string& name = p->name;
      if (name.find("head.") != std::string::npos ||
          name.find(".go") != std::string::npos || name == "go" ||
          name.ends_with("go")) {
        continue;  // stay zero
      }
      if (name.ends_with(".b")) {
        if (name.find("lstm") != std::string::npos) {
          for (int r = H; r < 2 * H; ++r) p->value.v[r] = T(1);
        }
        continue;
      }
      if (name == "text_emb" || name == "accent_emb" || name == "speaker_emb") {
        for (auto& v : p->value.v)
          v = static_cast<T>(rng.Uniform(-0.1, 0.1));
        continue;
      }
      double a = 1.0 / std::sqrt(static_cast<double>(p->value.cols));
      for (auto& v : p->value.v) v = static_cast<T>(rng.Uniform(-a, a));
    }
  }

  ModelConfig cfg_;
  ParamSet<T> params_;
};

}  // namespace vani

#endif  // VANI_MODEL_NET_H_
