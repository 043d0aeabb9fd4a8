// Copyright (c) 2026 scenegen contributors
// SPDX-License-Identifier: Apache-2.0
#include "scenegen/latent/autoencoder.hpp"

#include <cmath>
#include <stdexcept>

namespace scenegen::latent {

Autoencoder::Conv Autoencoder::make_conv(const std::string& name, int cin, int cout,
                                         const Conv2dSpec& spec, RandomStream& rng) {
  Conv c;
  c.cin = cin;
  c.cout = cout;
  c.spec = spec;
  c.w = Tensor::param({spec.kh * spec.kw * cin, cout});
  init_normal(c.w, rng, std::sqrt(2.0 / (spec.kh * spec.kw * cin)));
  c.b = Tensor::param({cout});
  params_.add(name + ".weight", c.w);
  params_.add(name + ".bias", c.b);
  return c;
}

Tensor Autoencoder::apply(const Conv& conv, const Tensor& x) {
  return conv2d(x, conv.w, conv.b, conv.cin, conv.cout, conv.spec);
}

Autoencoder::Autoencoder(const AutoencoderConfig& config, std::uint64_t seed) : config_(config) {
  if (config.image_size % 8 != 0)
    throw std::invalid_argument("Autoencoder: image size must be divisible by 8");
  RandomStream rng(mix_seed(seed, 0xAE));
  const int b = config.base_channels, c = config.latent_channels;
  const Conv2dSpec down{4, 4, 2, 1};
  const Conv2dSpec same{3, 3, 1, 1};
  enc1_ = make_conv("enc1", 3, b, down, rng);
  enc2_ = make_conv("enc2", b, 2 * b, down, rng);
  enc3_ = make_conv("enc3", 2 * b, 3 * b, down, rng);
  enc_out_ = make_conv("enc_out", 3 * b, c, same, rng);
  dec_in_ = make_conv("dec_in", c, 3 * b, same, rng);
  dec1_ = make_conv("dec1", 3 * b, 2 * b, same, rng);
  dec2_ = make_conv("dec2", 2 * b, b, same, rng);
  dec3_ = make_conv("dec3", b, b, same, rng);
  dec_out_ = make_conv("dec_out", b, 3, same, rng);
  latent_mean_ = Tensor::zeros({c});
  latent_std_ = Tensor::constant({c}, 1.0);
}

Tensor Autoencoder::encode(const Tensor& frames) const {
  if (frames.ndim() != 4 || frames.dim(3) != 3)
    throw std::invalid_argument("Autoencoder::encode: expected (N,H,W,3), got " +
                                shape_str(frames.shape()));
  if (frames.dim(1) % 8 != 0 || frames.dim(2) % 8 != 0)
    throw std::invalid_argument("Autoencoder::encode: resolution " + shape_str(frames.shape()) +
                                " not divisible by 8");
  Tensor x = gelu(apply(enc1_, frames));
  x = gelu(apply(enc2_, x));
  x = gelu(apply(enc3_, x));
  return apply(enc_out_, x);
}

Tensor Autoencoder::decode(const Tensor& latents) const {
  if (latents.ndim() != 4 || latents.dim(3) != config_.latent_channels)
    throw std::invalid_argument("Autoencoder::decode: expected (N,h,w," +
                                std::to_string(config_.latent_channels) + "), got " +
                                shape_str(latents.shape()));
  Tensor x = gelu(apply(dec_in_, latents));
  x = gelu(apply(dec1_, upsample_nearest2x(x)));
  x = gelu(apply(dec2_, upsample_nearest2x(x)));
  x = gelu(apply(dec3_, upsample_nearest2x(x)));
  return apply(dec_out_, x);
}

Tensor Autoencoder::encode_normalized(const Tensor& frames) const {
  Tensor z = encode(frames);
  Tensor mean_b = broadcast(latent_mean_, z.shape());
  Tensor std_b = broadcast(latent_std_, z.shape());
  return div(sub(z, mean_b), std_b);
}

Tensor Autoencoder::decode_normalized(const Tensor& latents) const {
  Tensor mean_b = broadcast(latent_mean_, latents.shape());
  Tensor std_b = broadcast(latent_std_, latents.shape());
  return decode(add(mul(latents, std_b), mean_b));
}

void Autoencoder::calibrate_latent_stats(const Tensor& frames) {
  NoGradGuard ng;
  Tensor z = encode(frames);
  const int c = config_.latent_channels;
  const std::int64_t cells = z.size() / c;
  for (int ch = 0; ch < c; ++ch) {
    double s = 0, s2 = 0;
    for (std::int64_t i = 0; i < cells; ++i) {
      const double v = z.at(i * c + ch);
      s += v;
      s2 += v * v;
    }
    const double mean = s / cells;
    const double var = std::max(s2 / cells - mean * mean, 1e-12);
    latent_mean_.data()[ch] = mean;
    latent_std_.data()[ch] = std::sqrt(var);
  }
}

ParamMap Autoencoder::checkpoint_entries() const {
  ParamMap all;
  for (const auto& [name, t] : params_.items()) all.add(name, t);
  all.add("latent_norm.mean", latent_mean_);
  all.add("latent_norm.std", latent_std_);
  return all;
}

double reconstruction_psnr(const Autoencoder& ae, const Tensor& frames) {
  NoGradGuard ng;
  Tensor recon = ae.decode(ae.encode(frames));
  const double mse = (recon.array() - frames.array()).square().mean();
  if (mse <= 0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(1.0 / mse);
}

}  // namespace scenegen::latent
