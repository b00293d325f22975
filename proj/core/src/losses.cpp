// Copyright 2026 The trisplat Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "trisplat/losses.hpp"

#include <array>
#include <cmath>
#include <numeric>

#include "trisplat/error.hpp"

namespace trisplat {

void LossWeights::validate() const {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw UsageError("loss lambda must lie in [0, 1]");
  }
  if (!(beta1 >= 0.0) || !(beta2 >= 0.0)) {
    throw UsageError("loss betas must be non-negative");
  }
}

namespace {

void require_same_shape(const Image& a, const Image& b) {
  if (!a.same_shape(b)) throw UsageError("image shapes differ");
}

std::array<double, kSsimWindow> gaussian_taps() {
  std::array<double, kSsimWindow> taps;
  const int half = kSsimWindow / 2;
  double sum = 0.0;
  for (int i = 0; i < kSsimWindow; ++i) {
    const double d = i - half;
    taps[i] = std::exp(-d * d / (2.0 * kSsimSigma * kSsimSigma));
    sum += taps[i];
  }
  for (double& t : taps) t /= sum;
  return taps;
}

// Separable Gaussian filter of a single-channel plane, zero padded.
std::vector<double> blur(const std::vector<double>& src, int w, int h) {
  static const auto taps = gaussian_taps();
  const int half = kSsimWindow / 2;
  std::vector<double> tmp(src.size(), 0.0), out(src.size(), 0.0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int k = -half; k <= half; ++k) {
        const int xx = x + k;
        if (xx < 0 || xx >= w) continue;
        acc += taps[k + half] * src[static_cast<std::size_t>(y) * w + xx];
      }
      tmp[static_cast<std::size_t>(y) * w + x] = acc;
    }
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int k = -half; k <= half; ++k) {
        const int yy = y + k;
        if (yy < 0 || yy >= h) continue;
        acc += taps[k + half] * tmp[static_cast<std::size_t>(yy) * w + x];
      }
      out[static_cast<std::size_t>(y) * w + x] = acc;
    }
  }
  return out;
}

std::vector<double> plane(const Image& img, int c) {
  std::vector<double> out(img.pixel_count());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = img.data[i * img.channels + c];
  }
  return out;
}

struct SsimStats {
  std::vector<double> mu_x, mu_y, sxx, syy, sxy;
};

SsimStats ssim_stats(const std::vector<double>& x, const std::vector<double>& y,
                     int w, int h) {
  std::vector<double> xx(x.size()), yy(x.size()), xy(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    xx[i] = x[i] * x[i];
    yy[i] = y[i] * y[i];
    xy[i] = x[i] * y[i];
  }
  return {blur(x, w, h), blur(y, w, h), blur(xx, w, h), blur(yy, w, h),
          blur(xy, w, h)};
}

void check_ssim_size(const Image& img) {
  if (img.width < kSsimWindow || img.height < kSsimWindow) {
    throw UsageError("image is smaller than the 11x11 SSIM window");
  }
}

}  // namespace

double l1(const Image& pred, const Image& target) {
  require_same_shape(pred, target);
  if (pred.data.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.data.size(); ++i) {
    sum += std::abs(pred.data[i] - target.data[i]);
  }
  return sum / static_cast<double>(pred.data.size());
}

double ssim(const Image& pred, const Image& target) {
  require_same_shape(pred, target);
  check_ssim_size(pred);
  const int w = pred.width, h = pred.height;
  double total = 0.0;
  for (int c = 0; c < pred.channels; ++c) {
    const SsimStats s = ssim_stats(plane(pred, c), plane(target, c), w, h);
    for (std::size_t i = 0; i < s.mu_x.size(); ++i) {
      const double mx = s.mu_x[i], my = s.mu_y[i];
      const double vx = s.sxx[i] - mx * mx;
      const double vy = s.syy[i] - my * my;
      const double cxy = s.sxy[i] - mx * my;
      total += ((2.0 * mx * my + kSsimC1) * (2.0 * cxy + kSsimC2)) /
               ((mx * mx + my * my + kSsimC1) * (vx + vy + kSsimC2));
    }
  }
  return total / static_cast<double>(pred.data.size());
}

double dssim(const Image& pred, const Image& target) {
  return 0.5 * (1.0 - ssim(pred, target));
}

void dssim_backward(const Image& pred, const Image& target, double scale,
                    Image& grad) {
  require_same_shape(pred, target);
  require_same_shape(pred, grad);
  check_ssim_size(pred);
  const int w = pred.width, h = pred.height;
  // d dssim / d S(p) = -1 / (2 N) for every pixel-channel.
  const double d_s = -0.5 * scale / static_cast<double>(pred.data.size());
  for (int c = 0; c < pred.channels; ++c) {
    const std::vector<double> x = plane(pred, c);
    const std::vector<double> y = plane(target, c);
    const SsimStats s = ssim_stats(x, y, w, h);
    const std::size_t n = x.size();
    std::vector<double> g_mu(n), g_sxx(n), g_sxy(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double mx = s.mu_x[i], my = s.mu_y[i];
      const double a1 = 2.0 * mx * my + kSsimC1;
      const double a2 = 2.0 * (s.sxy[i] - mx * my) + kSsimC2;
      const double b1 = mx * mx + my * my + kSsimC1;
      const double b2 = (s.sxx[i] - mx * mx) + (s.syy[i] - my * my) + kSsimC2;
      const double S = a1 * a2 / (b1 * b2);
      g_mu[i] = d_s * ((2.0 * my * a2 - 2.0 * my * a1) / (b1 * b2) -
                       S * (2.0 * mx / b1 - 2.0 * mx / b2));
      g_sxx[i] = d_s * (-S / b2);
      g_sxy[i] = d_s * (2.0 * a1 / (b1 * b2));
    }
    // The zero-padded symmetric blur is self-adjoint.
    const std::vector<double> bm = blur(g_mu, w, h);
    const std::vector<double> bxx = blur(g_sxx, w, h);
    const std::vector<double> bxy = blur(g_sxy, w, h);
    for (std::size_t i = 0; i < n; ++i) {
      grad.data[i * grad.channels + c] += bm[i] + 2.0 * x[i] * bxx[i] + y[i] * bxy[i];
    }
  }
}

double opacity_loss(std::span<const double> opacities) {
  if (opacities.empty()) return 0.0;
  return std::accumulate(opacities.begin(), opacities.end(), 0.0) /
         static_cast<double>(opacities.size());
}

namespace {

template <typename Fn>
std::size_t for_each_normal_pixel(const Image& rendered, const Image& prior,
                                  std::span<const std::uint8_t> mask, Fn&& fn) {
  if (!rendered.same_shape(prior) || rendered.channels != 3) {
    throw UsageError("normal images must be H x W x 3 of equal size");
  }
  if (!mask.empty() && mask.size() != rendered.pixel_count()) {
    throw UsageError("normal mask does not match the image");
  }
  std::size_t count = 0;
  for (std::size_t i = 0; i < rendered.pixel_count(); ++i) {
    if (!mask.empty() && !mask[i]) continue;
    const Eigen::Map<const Eigen::Vector3d> n(rendered.data.data() + 3 * i);
    const double len = n.norm();
    if (len <= 1e-6) continue;
    const Eigen::Map<const Eigen::Vector3d> pr(prior.data.data() + 3 * i);
    fn(i, Vec3(n), len, Vec3(pr));
    ++count;
  }
  return count;
}

}  // namespace

double normal_loss(const Image& rendered, const Image& prior,
                   std::span<const std::uint8_t> valid_mask) {
  double sum = 0.0;
  const std::size_t count = for_each_normal_pixel(
      rendered, prior, valid_mask,
      [&](std::size_t, const Vec3& n, double len, const Vec3& pr) {
        sum += 1.0 - n.dot(pr) / len;
      });
  return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

NormalLossResult normal_loss_backward(const Image& rendered, const Image& prior,
                                      std::span<const std::uint8_t> valid_mask) {
  NormalLossResult out;
  out.grad = Image(rendered.width, rendered.height, 3);
  std::vector<std::pair<std::size_t, Vec3>> terms;
  double sum = 0.0;
  const std::size_t count = for_each_normal_pixel(
      rendered, prior, valid_mask,
      [&](std::size_t i, const Vec3& n, double len, const Vec3& pr) {
        const Vec3 n_hat = n / len;
        sum += 1.0 - n_hat.dot(pr);
        terms.emplace_back(i, -(pr - n_hat * n_hat.dot(pr)) / len);
      });
  if (count == 0) return out;
  out.value = sum / static_cast<double>(count);
  const double inv = 1.0 / static_cast<double>(count);
  for (const auto& [i, g] : terms) {
    for (int c = 0; c < 3; ++c) out.grad.data[3 * i + c] = g[c] * inv;
  }
  return out;
}

Image prior_normals_to_world(const Image& encoded, const Camera& cam) {
  if (encoded.channels != 3) throw DataError("normal prior must have 3 channels");
  Image out(encoded.width, encoded.height, 3);
  const Mat3 rt = cam.rotation.transpose();
  for (std::size_t i = 0; i < encoded.pixel_count(); ++i) {
    Vec3 n(2.0 * encoded.data[3 * i] - 1.0, 2.0 * encoded.data[3 * i + 1] - 1.0,
           2.0 * encoded.data[3 * i + 2] - 1.0);
    const double len = n.norm();
    if (len <= 1e-6) continue;
    const Vec3 w = rt * (n / len);
    for (int c = 0; c < 3; ++c) out.data[3 * i + c] = w[c];
  }
  return out;
}

double psnr(const Image& pred, const Image& target) {
  require_same_shape(pred, target);
  if (pred.data.empty()) return kPsnrCap;
  double mse = 0.0;
  for (std::size_t i = 0; i < pred.data.size(); ++i) {
    const double d = pred.data[i] - target.data[i];
    mse += d * d;
  }
  mse /= static_cast<double>(pred.data.size());
  if (mse <= 0.0) return kPsnrCap;
  return std::min(kPsnrCap, -10.0 * std::log10(mse));
}

PhotometricLoss loss_backward(const Image& pred, const Image& target,
                              const LossWeights& weights) {
  require_same_shape(pred, target);
  PhotometricLoss out;
  out.grad = Image(pred.width, pred.height, pred.channels);
  out.l1 = l1(pred, target);
  const double n = static_cast<double>(pred.data.size());
  const double l1_scale = (1.0 - weights.lambda) / n;
  for (std::size_t i = 0; i < pred.data.size(); ++i) {
    const double d = pred.data[i] - target.data[i];
    out.grad.data[i] = d > 0.0 ? l1_scale : (d < 0.0 ? -l1_scale : 0.0);
  }
  if (weights.lambda > 0.0) {
    out.dssim = dssim(pred, target);
    dssim_backward(pred, target, weights.lambda, out.grad);
  }
  out.total = (1.0 - weights.lambda) * out.l1 + weights.lambda * out.dssim;
  return out;
}

}  // namespace trisplat
