#include "phase/model.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>

#include <nlohmann/json.hpp>

#include "phase/common.hpp"
#include "phase/rng.hpp"

namespace phase {

using nn::Tensor;

void PhaseModelConfig::validate() const {
  if (t_bins == 0 || features == 0) fail_usage("model config: t_bins and features must be > 0");
  if (conv_kernel % 2 == 0) fail_usage("model config: conv_kernel must be odd");
  if (attn_heads == 0 || (2 * lstm_hidden) % attn_heads != 0)
    fail_usage("model config: 2 * lstm_hidden must be divisible by attn_heads");
  if (dropout_rate < 0.0 || dropout_rate >= 1.0)
    fail_usage("model config: dropout_rate must be in [0, 1)");
}

namespace {

void glorot_fill(Tensor& t, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (auto& v : t.data) v = rng.uniform(-limit, limit);
}

nn::LstmParams init_lstm(std::size_t input, std::size_t hidden, Rng& rng) {
  nn::LstmParams p;
  p.w = Tensor({4 * hidden, input});
  p.u = Tensor({4 * hidden, hidden});
  p.b = Tensor({4 * hidden});
  glorot_fill(p.w, input, 4 * hidden, rng);
  glorot_fill(p.u, hidden, 4 * hidden, rng);
  for (std::size_t j = 0; j < hidden; ++j) p.b[hidden + j] = 1.0;  // forget gate bias
  return p;
}

nn::MhaParams init_mha(std::size_t dim, Rng& rng) {
  nn::MhaParams p;
  for (Tensor* w : {&p.wq, &p.wk, &p.wv, &p.wo}) {
    *w = Tensor({dim, dim});
    glorot_fill(*w, dim, dim, rng);
  }
  for (Tensor* b : {&p.bq, &p.bk, &p.bv, &p.bo}) *b = Tensor({dim});
  return p;
}

}  // namespace

PhaseModel PhaseModel::init(const PhaseModelConfig& config) {
  config.validate();
  PhaseModel m;
  m.config = config;
  Rng rng(mix_seed(config.seed, 0x70686173ull));

  m.conv_kernel = Tensor({config.conv_kernel, config.features, config.conv_filters});
  glorot_fill(m.conv_kernel, config.conv_kernel * config.features,
              config.conv_kernel * config.conv_filters, rng);
  m.conv_bias = Tensor({config.conv_filters});

  const std::size_t h = config.lstm_hidden;
  m.lstm1.fwd = init_lstm(config.conv_filters, h, rng);
  m.lstm1.bwd = init_lstm(config.conv_filters, h, rng);
  m.attn1 = init_mha(2 * h, rng);
  m.lstm2.fwd = init_lstm(2 * h, h, rng);
  m.lstm2.bwd = init_lstm(2 * h, h, rng);
  m.attn2 = init_mha(2 * h, rng);

  m.head_w = Tensor({2 * h, 1});
  glorot_fill(m.head_w, 2 * h, 1, rng);
  m.head_b = Tensor({1});
  return m;
}

double PhaseModel::forward(const Tensor& x, nn::Mode mode, std::uint64_t seed,
                           ModelCache* cache) const {
  if (x.shape.size() != 2 || x.dim(0) != config.t_bins || x.dim(1) != config.features)
    fail_numeric("model forward: input shape mismatch vs config");
  ModelCache local;
  ModelCache& c = cache ? *cache : local;
  const bool keep = cache != nullptr;

  c.x = x;
  c.conv_out = nn::conv1d_forward(x, conv_kernel, conv_bias);
  c.lstm1_out = nn::bilstm_forward(c.conv_out, lstm1, keep ? &c.lstm1 : nullptr);
  Tensor a1 = nn::mha_forward(c.lstm1_out, attn1, config.attn_heads, keep ? &c.attn1 : nullptr);
  c.drop1_out = nn::dropout_forward(a1, config.dropout_rate, mode, mix_seed(seed, 1),
                                    keep ? &c.drop1_mask : nullptr);
  c.lstm2_out = nn::bilstm_forward(c.drop1_out, lstm2, keep ? &c.lstm2 : nullptr);
  Tensor a2 = nn::mha_forward(c.lstm2_out, attn2, config.attn_heads, keep ? &c.attn2 : nullptr);
  c.drop2_out = nn::dropout_forward(a2, config.dropout_rate, mode, mix_seed(seed, 2),
                                    keep ? &c.drop2_mask : nullptr);
  c.pooled = nn::mean_pool_time(c.drop2_out);
  Tensor logit = nn::dense_forward(c.pooled, head_w, head_b);
  c.logit = logit[0];
  if (!std::isfinite(c.logit)) fail_numeric("model forward: non-finite logit");
  c.p = nn::sigmoid(c.logit);
  return c.p;
}

std::vector<Tensor> PhaseModel::backward(const ModelCache& c, double dp) const {
  const double dlogit = nn::sigmoid_backward(c.p, dp);
  Tensor dlogit_t({1});
  dlogit_t[0] = dlogit;

  Tensor dpooled, dhead_w, dhead_b;
  nn::dense_backward(c.pooled, head_w, dlogit_t, dpooled, dhead_w, dhead_b);
  Tensor ddrop2 = nn::mean_pool_time_backward(dpooled, config.t_bins);
  Tensor da2 = nn::dropout_backward(ddrop2, c.drop2_mask);

  Tensor dlstm2_out;
  nn::MhaParams dattn2;
  nn::mha_backward(attn2, config.attn_heads, c.attn2, da2, dlstm2_out, dattn2);

  Tensor ddrop1;
  nn::BilstmParams dlstm2;
  nn::bilstm_backward(lstm2, c.lstm2, dlstm2_out, ddrop1, dlstm2);
  Tensor da1 = nn::dropout_backward(ddrop1, c.drop1_mask);

  Tensor dlstm1_out;
  nn::MhaParams dattn1;
  nn::mha_backward(attn1, config.attn_heads, c.attn1, da1, dlstm1_out, dattn1);

  Tensor dconv;
  nn::BilstmParams dlstm1;
  nn::bilstm_backward(lstm1, c.lstm1, dlstm1_out, dconv, dlstm1);

  Tensor dx, dconv_kernel, dconv_bias;
  nn::conv1d_backward(c.x, conv_kernel, dconv, dx, dconv_kernel, dconv_bias);

  std::vector<Tensor> grads;
  grads.reserve(29);
  grads.push_back(std::move(dconv_kernel));
  grads.push_back(std::move(dconv_bias));
  for (nn::BilstmParams* lp : {&dlstm1}) {
    grads.push_back(std::move(lp->fwd.w));
    grads.push_back(std::move(lp->fwd.u));
    grads.push_back(std::move(lp->fwd.b));
    grads.push_back(std::move(lp->bwd.w));
    grads.push_back(std::move(lp->bwd.u));
    grads.push_back(std::move(lp->bwd.b));
  }
  for (nn::MhaParams* ap : {&dattn1}) {
    grads.push_back(std::move(ap->wq));
    grads.push_back(std::move(ap->bq));
    grads.push_back(std::move(ap->wk));
    grads.push_back(std::move(ap->bk));
    grads.push_back(std::move(ap->wv));
    grads.push_back(std::move(ap->bv));
    grads.push_back(std::move(ap->wo));
    grads.push_back(std::move(ap->bo));
  }
  for (nn::BilstmParams* lp : {&dlstm2}) {
    grads.push_back(std::move(lp->fwd.w));
    grads.push_back(std::move(lp->fwd.u));
    grads.push_back(std::move(lp->fwd.b));
    grads.push_back(std::move(lp->bwd.w));
    grads.push_back(std::move(lp->bwd.u));
    grads.push_back(std::move(lp->bwd.b));
  }
  for (nn::MhaParams* ap : {&dattn2}) {
    grads.push_back(std::move(ap->wq));
    grads.push_back(std::move(ap->bq));
    grads.push_back(std::move(ap->wk));
    grads.push_back(std::move(ap->bk));
    grads.push_back(std::move(ap->wv));
    grads.push_back(std::move(ap->bv));
    grads.push_back(std::move(ap->wo));
    grads.push_back(std::move(ap->bo));
  }
  grads.push_back(std::move(dhead_w));
  grads.push_back(std::move(dhead_b));
  return grads;
}

std::vector<Tensor*> PhaseModel::params() {
  std::vector<Tensor*> out;
  out.reserve(29);
  out.push_back(&conv_kernel);
  out.push_back(&conv_bias);
  for (nn::BilstmParams* lp : {&lstm1}) {
    out.push_back(&lp->fwd.w);
    out.push_back(&lp->fwd.u);
    out.push_back(&lp->fwd.b);
    out.push_back(&lp->bwd.w);
    out.push_back(&lp->bwd.u);
    out.push_back(&lp->bwd.b);
  }
  for (nn::MhaParams* ap : {&attn1}) {
    out.push_back(&ap->wq);
    out.push_back(&ap->bq);
    out.push_back(&ap->wk);
    out.push_back(&ap->bk);
    out.push_back(&ap->wv);
    out.push_back(&ap->bv);
    out.push_back(&ap->wo);
    out.push_back(&ap->bo);
  }
  for (nn::BilstmParams* lp : {&lstm2}) {
    out.push_back(&lp->fwd.w);
    out.push_back(&lp->fwd.u);
    out.push_back(&lp->fwd.b);
    out.push_back(&lp->bwd.w);
    out.push_back(&lp->bwd.u);
    out.push_back(&lp->bwd.b);
  }
  for (nn::MhaParams* ap : {&attn2}) {
    out.push_back(&ap->wq);
    out.push_back(&ap->bq);
    out.push_back(&ap->wk);
    out.push_back(&ap->bk);
    out.push_back(&ap->wv);
    out.push_back(&ap->bv);
    out.push_back(&ap->wo);
    out.push_back(&ap->bo);
  }
  out.push_back(&head_w);
  out.push_back(&head_b);
  return out;
}

std::vector<std::pair<std::string, const Tensor*>> PhaseModel::named_params() const {
  auto& self = const_cast<PhaseModel&>(*this);
  auto ptrs = self.params();
  static const char* kNames[] = {
      "conv.kernel", "conv.bias",
      "lstm1.fwd.w", "lstm1.fwd.u", "lstm1.fwd.b", "lstm1.bwd.w", "lstm1.bwd.u", "lstm1.bwd.b",
      "attn1.wq", "attn1.bq", "attn1.wk", "attn1.bk", "attn1.wv", "attn1.bv", "attn1.wo",
      "attn1.bo",
      "lstm2.fwd.w", "lstm2.fwd.u", "lstm2.fwd.b", "lstm2.bwd.w", "lstm2.bwd.u", "lstm2.bwd.b",
      "attn2.wq", "attn2.bq", "attn2.wk", "attn2.bk", "attn2.wv", "attn2.bv", "attn2.wo",
      "attn2.bo",
      "head.w", "head.b",
  };
  std::vector<std::pair<std::string, const Tensor*>> out;
  out.reserve(ptrs.size());
  for (std::size_t i = 0; i < ptrs.size(); ++i) out.emplace_back(kNames[i], ptrs[i]);
  return out;
}

bool PhaseModel::operator==(const PhaseModel& other) const {
  if (!(config == other.config)) return false;
  auto a = named_params();
  auto b = other.named_params();
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!(*a[i].second == *b[i].second)) return false;
  return true;
}

namespace {

constexpr char kMagic[8] = {'P', 'H', 'A', 'S', 'E', 'M', 'D', 'L'};
constexpr std::uint32_t kModelVersion = 1;

void write_u64(std::ostream& out, std::uint64_t v) {
  char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(buf, 8);
}

std::uint64_t read_u64(std::istream& in) {
  unsigned char buf[8];
  in.read(reinterpret_cast<char*>(buf), 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return v;
}

void write_doubles(std::ostream& out, const std::vector<double>& values) {
  for (double d : values) write_u64(out, std::bit_cast<std::uint64_t>(d));
}

}  // namespace

void PhaseModel::save(std::ostream& out, const std::string& config_hash,
                      std::uint64_t seed) const {
  nlohmann::json header;
  if (!config_hash.empty()) header["meta"] = {{"config_hash", config_hash}, {"seed", seed}};
  header["config"] = {
      {"t_bins", config.t_bins},       {"features", config.features},
      {"conv_filters", config.conv_filters}, {"conv_kernel", config.conv_kernel},
      {"lstm_hidden", config.lstm_hidden},   {"attn_heads", config.attn_heads},
      {"dropout_rate", config.dropout_rate}, {"seed", config.seed},
  };
  nlohmann::json manifest = nlohmann::json::array();
  for (const auto& [name, tensor] : named_params())
    manifest.push_back({{"name", name}, {"shape", tensor->shape}});
  header["tensors"] = std::move(manifest);
  const std::string header_str = header.dump();

  out.write(kMagic, 8);
  write_u64(out, kModelVersion);
  write_u64(out, header_str.size());
  out.write(header_str.data(), static_cast<std::streamsize>(header_str.size()));
  for (const auto& [name, tensor] : named_params()) write_doubles(out, tensor->data);
  if (!out) fail_data("model save: write failed");
}

PhaseModel PhaseModel::load(std::istream& in) {
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kMagic, 8) != 0) fail_data("model file: bad magic");
  const std::uint64_t version = read_u64(in);
  if (version != kModelVersion)
    fail_data("model file: incompatible version " + std::to_string(version));
  const std::uint64_t header_len = read_u64(in);
  if (!in || header_len == 0 || header_len > (1ull << 20)) fail_data("model file: bad header");
  std::string header_str(header_len, '\0');
  in.read(header_str.data(), static_cast<std::streamsize>(header_len));
  if (!in) fail_data("model file: truncated header");
  nlohmann::json header = nlohmann::json::parse(header_str, nullptr, false);
  if (header.is_discarded()) fail_data("model file: invalid header JSON");

  PhaseModelConfig cfg;
  const auto& jc = header.at("config");
  cfg.t_bins = jc.at("t_bins").get<std::size_t>();
  cfg.features = jc.at("features").get<std::size_t>();
  cfg.conv_filters = jc.at("conv_filters").get<std::size_t>();
  cfg.conv_kernel = jc.at("conv_kernel").get<std::size_t>();
  cfg.lstm_hidden = jc.at("lstm_hidden").get<std::size_t>();
  cfg.attn_heads = jc.at("attn_heads").get<std::size_t>();
  cfg.dropout_rate = jc.at("dropout_rate").get<double>();
  cfg.seed = jc.at("seed").get<std::uint64_t>();
  cfg.validate();

  PhaseModel model = PhaseModel::init(cfg);  // shapes from config
  auto named = model.named_params();
  const auto& manifest = header.at("tensors");
  if (manifest.size() != named.size()) fail_data("model file: tensor manifest size mismatch");
  auto ptrs = model.params();
  for (std::size_t i = 0; i < named.size(); ++i) {
    const auto& entry = manifest[i];
    if (entry.at("name").get<std::string>() != named[i].first)
      fail_data("model file: tensor name mismatch at index " + std::to_string(i));
    const auto shape = entry.at("shape").get<std::vector<std::size_t>>();
    if (shape != named[i].second->shape)
      fail_data("model file: tensor shape mismatch for " + named[i].first);
    for (auto& v : ptrs[i]->data) {
      v = std::bit_cast<double>(read_u64(in));
      if (!in) fail_data("model file: truncated payload");
    }
  }
  return model;
}

}  // namespace phase
