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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "trisplat/error.hpp"
#include "trisplat/losses.hpp"

using namespace trisplat;

namespace {

Image random_image(std::mt19937_64& rng, int w, int h) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Image img(w, h, 3);
  for (double& v : img.data) v = u(rng);
  return img;
}

// Direct 2D evaluation of the windowed SSIM statistics, zero outside the
// image, no separability.
double ssim_direct(const Image& x, const Image& y) {
  const int half = 5;
  double g[11][11];
  double total = 0.0;
  for (int i = 0; i < 11; ++i) {
    for (int j = 0; j < 11; ++j) {
      g[i][j] = std::exp(-((i - half) * (i - half) + (j - half) * (j - half)) / (2 * 1.5 * 1.5));
      total += g[i][j];
    }
  }
  double acc = 0.0;
  for (int c = 0; c < 3; ++c) {
    for (int py = 0; py < x.height; ++py) {
      for (int px = 0; px < x.width; ++px) {
        double mx = 0, my = 0, sxx = 0, syy = 0, sxy = 0;
        for (int i = 0; i < 11; ++i) {
          for (int j = 0; j < 11; ++j) {
            const int xx = px + j - half, yy = py + i - half;
            if (xx < 0 || yy < 0 || xx >= x.width || yy >= x.height) continue;
            const double w = g[i][j] / total;
            const double a = x.at(xx, yy, c), b = y.at(xx, yy, c);
            mx += w * a;
            my += w * b;
            sxx += w * a * a;
            syy += w * b * b;
            sxy += w * a * b;
          }
        }
        const double vx = sxx - mx * mx, vy = syy - my * my, cxy = sxy - mx * my;
        const double c1 = 0.0001, c2 = 0.0009;
        acc += (2 * mx * my + c1) * (2 * cxy + c2) / ((mx * mx + my * my + c1) * (vx + vy + c2));
      }
    }
  }
  return acc / (3.0 * x.width * x.height);
}

}  // namespace

TEST(L1, Examples) {
  Image zeros(4, 4, 3, 0.0), ones(4, 4, 3, 1.0);
  EXPECT_EQ(l1(zeros, zeros), 0.0);
  EXPECT_EQ(l1(zeros, ones), 1.0);
  Image half = zeros;
  for (std::size_t i = 0; i < half.data.size() / 2; ++i) half.data[i] = 0.5;
  EXPECT_DOUBLE_EQ(l1(half, zeros), 0.25);
  EXPECT_THROW(l1(Image(4, 4, 3), Image(4, 5, 3)), UsageError);
}

TEST(Ssim, IdenticalImages) {
  std::mt19937_64 rng(40);
  for (int i = 0; i < 20; ++i) {
    const Image a = random_image(rng, 16 + i, 12 + i);
    EXPECT_NEAR(ssim(a, a), 1.0, 1e-12);
    EXPECT_NEAR(dssim(a, a), 0.0, 1e-12);
  }
}

TEST(Ssim, MatchesDirectFormula) {
  std::mt19937_64 rng(41);
  for (int i = 0; i < 3; ++i) {
    const Image a = random_image(rng, 23, 17);
    Image b = a;
    std::normal_distribution<double> n(0.0, 0.1);
    for (double& v : b.data) v += n(rng);
    EXPECT_NEAR(ssim(a, b), ssim_direct(a, b), 1e-6);
    EXPECT_NEAR(dssim(a, b), (1.0 - ssim_direct(a, b)) / 2.0, 1e-6);
  }
}

TEST(Ssim, RejectsSmallImages) {
  EXPECT_THROW(ssim(Image(8, 8, 3), Image(8, 8, 3)), UsageError);
  EXPECT_THROW(dssim(Image(11, 10, 3), Image(11, 10, 3)), UsageError);
}

TEST(Dssim, GradientMatchesDifference) {
  std::mt19937_64 rng(42);
  const Image a = random_image(rng, 12, 12), b = random_image(rng, 12, 12);
  Image grad(12, 12, 3);
  dssim_backward(a, b, 1.0, grad);
  for (std::size_t i = 0; i < a.data.size(); i += 7) {
    Image p = a, m = a;
    p.data[i] += 1e-6;
    m.data[i] -= 1e-6;
    const double fd = (dssim(p, b) - dssim(m, b)) / 2e-6;
    EXPECT_NEAR(grad.data[i], fd, 1e-4 * std::max(1.0, std::abs(fd)));
  }
}

TEST(OpacityLoss, Examples) {
  const std::vector<double> zeros(10, 0.0), ones(10, 1.0);
  std::vector<double> mixed(10, 0.0);
  for (int i = 0; i < 5; ++i) mixed[i] = 1.0;
  EXPECT_EQ(opacity_loss(zeros), 0.0);
  EXPECT_EQ(opacity_loss(ones), 1.0);
  EXPECT_EQ(opacity_loss(mixed), 0.5);
}

TEST(NormalLoss, Examples) {
  Image n(4, 4, 3), anti(4, 4, 3), ortho(4, 4, 3);
  for (std::size_t i = 0; i < n.pixel_count(); ++i) {
    n.data[3 * i + 2] = 1.0;
    anti.data[3 * i + 2] = -1.0;
    ortho.data[3 * i] = 1.0;
  }
  EXPECT_NEAR(normal_loss(n, n, {}), 0.0, 1e-15);
  EXPECT_NEAR(normal_loss(n, anti, {}), 2.0, 1e-15);
  EXPECT_NEAR(normal_loss(n, ortho, {}), 1.0, 1e-15);

  // Empty rendered pixels and masked pixels are skipped.
  Image partial = n;
  partial.data[2] = 0.0;
  std::vector<std::uint8_t> mask(16, 1);
  mask[1] = 0;
  Image prior = n;
  prior.data[5] = -1.0;  // pixel 1 disagrees but is masked out
  EXPECT_NEAR(normal_loss(partial, prior, mask), 0.0, 1e-15);
}

TEST(NormalLoss, GradientMatchesDifference) {
  std::mt19937_64 rng(43);
  std::normal_distribution<double> g(0.0, 1.0);
  Image r(5, 5, 3), p(5, 5, 3);
  for (std::size_t i = 0; i < r.pixel_count(); ++i) {
    Vec3 a(g(rng), g(rng), g(rng)), b(g(rng), g(rng), g(rng));
    b.normalize();
    for (int c = 0; c < 3; ++c) {
      r.data[3 * i + c] = a[c];
      p.data[3 * i + c] = b[c];
    }
  }
  const NormalLossResult res = normal_loss_backward(r, p, {});
  EXPECT_NEAR(res.value, normal_loss(r, p, {}), 1e-15);
  for (std::size_t i = 0; i < r.data.size(); ++i) {
    Image rp = r, rm = r;
    rp.data[i] += 1e-6;
    rm.data[i] -= 1e-6;
    const double fd = (normal_loss(rp, p, {}) - normal_loss(rm, p, {})) / 2e-6;
    EXPECT_NEAR(res.grad.data[i], fd, 1e-7);
  }
}

TEST(PriorNormals, DecodeAndRotate) {
  Camera cam;
  cam.rotation << 0, 0, 1, 0, 1, 0, -1, 0, 0;  // 90 deg about y
  Image enc(1, 1, 3);
  enc.data = {0.5, 0.5, 0.0};  // camera-space (0, 0, -1)
  const Image w = prior_normals_to_world(enc, cam);
  const Vec3 expected = cam.rotation.transpose() * Vec3(0, 0, -1);
  for (int c = 0; c < 3; ++c) EXPECT_NEAR(w.data[c], expected[c], 1e-15);
}

TEST(Psnr, Examples) {
  std::mt19937_64 rng(44);
  const Image a = random_image(rng, 8, 8);
  EXPECT_EQ(psnr(a, a), 100.0);
  Image b(8, 8, 3, 0.5), c(8, 8, 3, 0.6);
  EXPECT_NEAR(psnr(b, c), 20.0, 1e-9);
  for (int i = 0; i < 10; ++i) {
    const Image x = random_image(rng, 9, 7), y = random_image(rng, 9, 7);
    double mse = 0.0;
    for (std::size_t k = 0; k < x.data.size(); ++k) mse += (x.data[k] - y.data[k]) * (x.data[k] - y.data[k]);
    mse /= x.data.size();
    EXPECT_NEAR(psnr(x, y), -10.0 * std::log10(mse), 1e-9);
  }
}

TEST(LossBackward, L1Gradient) {
  std::mt19937_64 rng(45);
  const Image a = random_image(rng, 16, 16), b = random_image(rng, 16, 16);
  LossWeights w;
  w.lambda = 0.0;
  const PhotometricLoss l = loss_backward(a, b, w);
  EXPECT_NEAR(l.total, l1(a, b), 1e-15);
  const double n = 16.0 * 16.0 * 3.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    const double s = a.data[i] > b.data[i] ? 1.0 : -1.0;
    EXPECT_NEAR(l.grad.data[i], s / n, 1e-18);
  }
  const PhotometricLoss same = loss_backward(a, a, w);
  for (double g : same.grad.data) EXPECT_EQ(g, 0.0);
}

TEST(LossBackward, MixedObjective) {
  std::mt19937_64 rng(46);
  const Image a = random_image(rng, 14, 13), b = random_image(rng, 14, 13);
  LossWeights w;
  w.lambda = 0.2;
  const PhotometricLoss l = loss_backward(a, b, w);
  EXPECT_NEAR(l.total, 0.8 * l1(a, b) + 0.2 * dssim(a, b), 1e-14);
  EXPECT_GE(l.total, 0.0);
  LossWeights bad;
  bad.lambda = 1.5;
  EXPECT_THROW(bad.validate(), UsageError);
  bad.lambda = 0.2;
  bad.beta1 = -1;
  EXPECT_THROW(bad.validate(), UsageError);
}
