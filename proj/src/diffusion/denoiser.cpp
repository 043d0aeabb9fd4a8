// Copyright (c) 2026 scenegen contributors
// SPDX-License-Identifier: Apache-2.0
#include "scenegen/diffusion/denoiser.hpp"

#include <cmath>
#include <stdexcept>

namespace scenegen::diffusion {

void DenoiserConfig::validate() const {
  if (blocks < 2 || hidden < 1 || heads < 1 || hidden % heads != 0)
    throw std::invalid_argument("DenoiserConfig: bad transformer dimensions");
  if (control_blocks() > blocks)
    throw std::invalid_argument("DenoiserConfig: control blocks exceed block count");
}

Tensor sinusoidal_embedding(double position, int dim) {
  Tensor emb = Tensor::zeros({dim});
  for (int i = 0; i < dim / 2; ++i) {
    const double freq = std::exp(-std::log(10000.0) * (2.0 * i) / dim);
    emb.data()[2 * i] = std::sin(position * freq);
    emb.data()[2 * i + 1] = std::cos(position * freq);
  }
  return emb;
}

FactorizedBlock::FactorizedBlock(int dim, int heads, int mlp, ParamMap& params,
                                 const std::string& name, RandomStream& rng) {
  ln_s = LayerNorm(dim, params, name + ".ln_s");
  ln_t = LayerNorm(dim, params, name + ".ln_t");
  ln_m = LayerNorm(dim, params, name + ".ln_m");
  attn_s = MultiheadSelfAttention(dim, heads, params, name + ".attn_s", rng);
  attn_t = MultiheadSelfAttention(dim, heads, params, name + ".attn_t", rng);
  fc1 = Linear(dim, mlp, params, name + ".fc1", rng);
  fc2 = Linear(mlp, dim, params, name + ".fc2", rng);
}

Tensor FactorizedBlock::forward(const Tensor& x) const {
  // x: (frames, cells, dim)
  Tensor h = add(x, attn_s.forward(ln_s.forward(x)));
  Tensor ht = permute(h, {1, 0, 2});  // (cells, frames, dim)
  ht = add(ht, attn_t.forward(ln_t.forward(ht)));
  h = permute(ht, {1, 0, 2});
  Tensor m = fc2.forward(gelu(fc1.forward(ln_m.forward(h))));
  return add(h, m);
}

Denoiser::Denoiser(const DenoiserConfig& config, std::uint64_t seed) : config_(config) {
  config.validate();
  RandomStream rng(mix_seed(seed, 0xD1FF));
  const int d = config.hidden;
  token_embed_ = Linear(config.channels, d, params_, "token_embed", rng);
  pos_spatial_ = Tensor::param({config.cells(), d});
  init_trunc_normal(pos_spatial_, rng, 0.02);
  params_.add("pos_spatial", pos_spatial_);
  temb1_ = Linear(d, d, params_, "temb1", rng);
  temb2_ = Linear(d, d, params_, "temb2", rng);
  for (int i = 0; i < config.blocks; ++i)
    blocks_.emplace_back(d, config.heads, config.mlp, params_, "block" + std::to_string(i), rng);
  final_norm_ = LayerNorm(d, params_, "final_norm");
  out_proj_ = Linear(d, config.channels, params_, "out_proj", rng);
}

namespace {

Tensor embed_token_stream(const Tensor& z, int t, const Linear& token_embed,
                          const Tensor& pos_spatial, const Linear& temb1, const Linear& temb2,
                          const DenoiserConfig& config) {
  if (z.ndim() != 4 || z.dim(3) != config.channels || z.dim(1) != config.latent_size ||
      z.dim(2) != config.latent_size)
    throw std::invalid_argument("denoiser: expected (n," + std::to_string(config.latent_size) +
                                "," + std::to_string(config.latent_size) + "," +
                                std::to_string(config.channels) + "), got " +
                                shape_str(z.shape()));
  const int n = z.dim(0);
  const int S = config.cells();
  const int d = config.hidden;
  Tensor x = reshape(z, {n, S, config.channels});
  x = token_embed.forward(x);  // (n,S,d)
  x = add(x, broadcast(pos_spatial, x.shape()));
  // temporal position: fixed sinusoidal per frame
  Tensor tpos = Tensor::zeros({n, 1, d});
  for (int f = 0; f < n; ++f) {
    Tensor e = sinusoidal_embedding(f, d);
    for (int i = 0; i < d; ++i) tpos.data()[f * d + i] = e.at(i);
  }
  x = add(x, broadcast(tpos, x.shape()));
  // diffusion timestep embedding
  Tensor temb = temb2.forward(gelu(temb1.forward(sinusoidal_embedding(t, d))));
  x = add(x, broadcast(temb, x.shape()));
  return x;
}

}  // namespace

Tensor Denoiser::embed_tokens(const Tensor& z_t, int t) const {
  return embed_token_stream(z_t, t, token_embed_, pos_spatial_, temb1_, temb2_, config_);
}

Tensor Denoiser::forward(const Tensor& z_t, int t,
                         const std::vector<Tensor>& control_residuals) const {
  if (!control_residuals.empty() &&
      static_cast<int>(control_residuals.size()) != config_.blocks)
    throw std::invalid_argument("denoiser: control residual count " +
                                std::to_string(control_residuals.size()) + " != block count " +
                                std::to_string(config_.blocks));
  const int n = z_t.dim(0);
  Tensor x = embed_tokens(z_t, t);
  for (size_t i = 0; i < blocks_.size(); ++i) {
    if (!control_residuals.empty() && control_residuals[i].defined()) {
      if (control_residuals[i].shape() != x.shape())
        throw std::invalid_argument("denoiser: control residual " + std::to_string(i) +
                                    " shape " + shape_str(control_residuals[i].shape()) +
                                    " does not match tokens " + shape_str(x.shape()));
      x = add(x, control_residuals[i]);
    }
    x = blocks_[i].forward(x);
  }
  x = final_norm_.forward(x);
  x = out_proj_.forward(x);  // (n,S,c)
  return reshape(x, {n, config_.latent_size, config_.latent_size, config_.channels});
}

ControlNet::ControlNet(const Denoiser& backbone, int cond_channels, std::uint64_t seed)
    : config_(backbone.config()), cond_channels_(cond_channels) {
  RandomStream rng(mix_seed(seed, 0xC0));
  const int d = config_.hidden;
  token_embed_ = Linear(config_.channels, d, params_, "token_embed", rng);
  cond_embed_ = Linear(cond_channels, d, params_, "cond_embed", rng);
  pos_spatial_ = Tensor::param({config_.cells(), d});
  params_.add("pos_spatial", pos_spatial_);
  temb1_ = Linear(d, d, params_, "temb1", rng);
  temb2_ = Linear(d, d, params_, "temb2", rng);
  for (int i = 0; i < config_.control_blocks(); ++i)
    blocks_.emplace_back(d, config_.heads, config_.mlp, params_, "block" + std::to_string(i),
                         rng);
  for (int i = 0; i < config_.control_blocks(); ++i)
    out_projs_.emplace_back(d, d, params_, "out_proj" + std::to_string(i), rng, 0.02,
                            /*zero_init=*/true);
  // trainable copies of the backbone's leading layers
  copy_matching_params(backbone.params(), params_);
}

std::vector<Tensor> ControlNet::forward(const Tensor& z_cond, const Tensor& z_t, int t) const {
  if (z_cond.ndim() != 4 || z_cond.dim(3) != cond_channels_)
    throw std::invalid_argument("controlnet: condition channels " + shape_str(z_cond.shape()) +
                                " do not match configured " + std::to_string(cond_channels_));
  if (z_cond.dim(0) != z_t.dim(0))
    throw std::invalid_argument("controlnet: condition frames " + shape_str(z_cond.shape()) +
                                " vs latent " + shape_str(z_t.shape()));
  const int n = z_t.dim(0);
  const int S = config_.cells();
  Tensor x = embed_token_stream(z_t, t, token_embed_, pos_spatial_, temb1_, temb2_, config_);
  Tensor cond = reshape(z_cond, {n, S, cond_channels_});
  x = add(x, cond_embed_.forward(cond));
  std::vector<Tensor> residuals;
  residuals.reserve(blocks_.size());
  for (size_t i = 0; i < blocks_.size(); ++i) {
    x = blocks_[i].forward(x);
    residuals.push_back(out_projs_[i].forward(x));
  }
  return residuals;
}

std::vector<Tensor> combine_controls(const std::vector<double>& weights,
                                     const std::vector<std::vector<Tensor>>& residual_sets) {
  if (weights.size() != residual_sets.size() || residual_sets.empty())
    throw std::invalid_argument("combine_controls: weight/result list mismatch");
  for (double w : weights)
    if (w < 0) throw std::invalid_argument("combine_controls: negative weight");
  const size_t len = residual_sets[0].size();
  for (const auto& set : residual_sets)
    if (set.size() != len)
      throw std::invalid_argument("combine_controls: residual lists differ in length (" +
                                  std::to_string(set.size()) + " vs " + std::to_string(len) + ")");
  std::vector<Tensor> out;
  out.reserve(len);
  for (size_t i = 0; i < len; ++i) {
    Tensor acc = scale(residual_sets[0][i], weights[0]);
    for (size_t s = 1; s < residual_sets.size(); ++s)
      acc = add(acc, scale(residual_sets[s][i], weights[s]));
    out.push_back(acc);
  }
  return out;
}

std::vector<Tensor> pad_residuals(std::vector<Tensor> residuals, int blocks) {
  residuals.resize(blocks);
  return residuals;
}

void copy_matching_params(const ParamMap& src, ParamMap& dst) {
  for (const auto& [name, unused] : dst.items()) {
    Tensor s = src.find(name);
    if (!s.defined()) continue;
    Tensor d = dst.find(name);
    if (s.shape() != d.shape())
      throw std::logic_error("copy_matching_params: shape mismatch for " + name);
    d.array() = s.array();
  }
}

}  // namespace scenegen::diffusion
