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

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "trisplat/camera.hpp"
#include "trisplat/image.hpp"

namespace trisplat {

// Weights of the training objective
//   (1 - lambda) L1 + lambda D-SSIM + beta1 L_opacity + beta2 L_normal.
struct LossWeights {
  double lambda = 0.2;
  double beta1 = 0.01;
  double beta2 = 0.05;

  void validate() const;
};

inline constexpr int kSsimWindow = 11;
inline constexpr double kSsimSigma = 1.5;
inline constexpr double kSsimC1 = 0.01 * 0.01;
inline constexpr double kSsimC2 = 0.03 * 0.03;
inline constexpr double kPsnrCap = 100.0;

double l1(const Image& pred, const Image& target);

// Mean SSIM over pixels and channels with an 11x11 Gaussian window
// (sigma 1.5) and zero padding at the borders.
double ssim(const Image& pred, const Image& target);

// (1 - SSIM) / 2.
double dssim(const Image& pred, const Image& target);

// Adds scale * d dssim / d pred to grad.
void dssim_backward(const Image& pred, const Image& target, double scale,
                    Image& grad);

// Mean of the given opacities.
double opacity_loss(std::span<const double> opacities);

// Mean over valid pixels of 1 - n_render . n_prior. Pixels whose rendered
// normal is shorter than 1e-6 are skipped. valid_mask may be empty (all
// valid). rendered may be unnormalized; it is normalized per pixel.
double normal_loss(const Image& rendered, const Image& prior,
                   std::span<const std::uint8_t> valid_mask);

struct NormalLossResult {
  double value = 0.0;
  Image grad;  // d loss / d rendered (accumulated, unnormalized) normals
};

NormalLossResult normal_loss_backward(const Image& rendered, const Image& prior,
                                      std::span<const std::uint8_t> valid_mask);

// Converts a normal-prior image encoded in [0,1]^3 (camera space) to unit
// world-space normals via R^T.
Image prior_normals_to_world(const Image& encoded, const Camera& cam);

// Peak signal-to-noise ratio for [0,1] images in dB, capped at 100.
double psnr(const Image& pred, const Image& target);

struct PhotometricLoss {
  double total = 0.0;
  double l1 = 0.0;
  double dssim = 0.0;
  Image grad;  // d total / d pred
};

// (1 - lambda) L1 + lambda D-SSIM and its image gradient.
PhotometricLoss loss_backward(const Image& pred, const Image& target,
                              const LossWeights& weights);

}  // namespace trisplat
