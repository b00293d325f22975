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

#include "trisplat/image.hpp"

#include "trisplat/error.hpp"

namespace trisplat {

Image downsample_box(const Image& img, int factor) {
  if (factor < 1 || img.width % factor != 0 || img.height % factor != 0) {
    throw UsageError("downsample factor does not divide the image size");
  }
  if (factor == 1) return img;
  Image out(img.width / factor, img.height / factor, img.channels);
  const double inv = 1.0 / (factor * factor);
  for (int y = 0; y < out.height; ++y) {
    for (int x = 0; x < out.width; ++x) {
      double* dst = out.pixel(x, y);
      for (int sy = 0; sy < factor; ++sy) {
        for (int sx = 0; sx < factor; ++sx) {
          const double* src = img.pixel(x * factor + sx, y * factor + sy);
          for (int c = 0; c < img.channels; ++c) dst[c] += src[c];
        }
      }
      for (int c = 0; c < img.channels; ++c) dst[c] *= inv;
    }
  }
  return out;
}

Image downsample_box_adjoint(const Image& grad, int factor) {
  if (factor < 1) throw UsageError("downsample factor must be positive");
  if (factor == 1) return grad;
  Image out(grad.width * factor, grad.height * factor, grad.channels);
  const double inv = 1.0 / (factor * factor);
  for (int y = 0; y < out.height; ++y) {
    for (int x = 0; x < out.width; ++x) {
      const double* src = grad.pixel(x / factor, y / factor);
      double* dst = out.pixel(x, y);
      for (int c = 0; c < grad.channels; ++c) dst[c] = src[c] * inv;
    }
  }
  return out;
}

}  // namespace trisplat
