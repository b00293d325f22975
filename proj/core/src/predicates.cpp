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

#include "trisplat/predicates.hpp"

#include <cmath>

#include <gmpxx.h>

namespace trisplat::predicates {

namespace {

constexpr double kEpsilon = 0x1.0p-53;
constexpr double kOrientBound = (7.0 + 56.0 * kEpsilon) * kEpsilon;
constexpr double kInsphereBound = (16.0 + 224.0 * kEpsilon) * kEpsilon;

template <typename T>
T orient_det(const T& adx, const T& ady, const T& adz, const T& bdx,
             const T& bdy, const T& bdz, const T& cdx, const T& cdy,
             const T& cdz) {
  return adz * (bdx * cdy - cdx * bdy) + bdz * (cdx * ady - adx * cdy) +
         cdz * (adx * bdy - bdx * ady);
}

template <typename T>
T insphere_det(const T (&ae)[3], const T (&be)[3], const T (&ce)[3],
               const T (&de)[3]) {
  const T ab = ae[0] * be[1] - be[0] * ae[1];
  const T bc = be[0] * ce[1] - ce[0] * be[1];
  const T cd = ce[0] * de[1] - de[0] * ce[1];
  const T da = de[0] * ae[1] - ae[0] * de[1];
  const T ac = ae[0] * ce[1] - ce[0] * ae[1];
  const T bd = be[0] * de[1] - de[0] * be[1];
  const T abc = ae[2] * bc - be[2] * ac + ce[2] * ab;
  const T bcd = be[2] * cd - ce[2] * bd + de[2] * bc;
  const T cda = ce[2] * da + de[2] * ac + ae[2] * cd;
  const T dab = de[2] * ab + ae[2] * bd + be[2] * da;
  const T alift = ae[0] * ae[0] + ae[1] * ae[1] + ae[2] * ae[2];
  const T blift = be[0] * be[0] + be[1] * be[1] + be[2] * be[2];
  const T clift = ce[0] * ce[0] + ce[1] * ce[1] + ce[2] * ce[2];
  const T dlift = de[0] * de[0] + de[1] * de[1] + de[2] * de[2];
  return (dlift * abc - clift * dab) + (blift * cda - alift * bcd);
}

template <typename T>
int sign_of(const T& v) {
  return v > 0 ? 1 : (v < 0 ? -1 : 0);
}

}  // namespace

int orient3d(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  const double adx = a.x() - d.x(), bdx = b.x() - d.x(), cdx = c.x() - d.x();
  const double ady = a.y() - d.y(), bdy = b.y() - d.y(), cdy = c.y() - d.y();
  const double adz = a.z() - d.z(), bdz = b.z() - d.z(), cdz = c.z() - d.z();
  const double det = orient_det(adx, ady, adz, bdx, bdy, bdz, cdx, cdy, cdz);
  const double permanent =
      (std::abs(bdx * cdy) + std::abs(cdx * bdy)) * std::abs(adz) +
      (std::abs(cdx * ady) + std::abs(adx * cdy)) * std::abs(bdz) +
      (std::abs(adx * bdy) + std::abs(bdx * ady)) * std::abs(cdz);
  const double bound = kOrientBound * permanent;
  if (det > bound || -det > bound) return det > 0 ? 1 : -1;

  auto q = [](double v) { return mpq_class(v); };
  const mpq_class ex = orient_det<mpq_class>(
      q(a.x()) - q(d.x()), q(a.y()) - q(d.y()), q(a.z()) - q(d.z()),
      q(b.x()) - q(d.x()), q(b.y()) - q(d.y()), q(b.z()) - q(d.z()),
      q(c.x()) - q(d.x()), q(c.y()) - q(d.y()), q(c.z()) - q(d.z()));
  return sign_of(ex);
}

int insphere(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d,
             const Vec3& e) {
  const double ae[3] = {a.x() - e.x(), a.y() - e.y(), a.z() - e.z()};
  const double be[3] = {b.x() - e.x(), b.y() - e.y(), b.z() - e.z()};
  const double ce[3] = {c.x() - e.x(), c.y() - e.y(), c.z() - e.z()};
  const double de[3] = {d.x() - e.x(), d.y() - e.y(), d.z() - e.z()};
  const double det = insphere_det(ae, be, ce, de);

  auto abs_cross = [](const double (&p)[3], const double (&r)[3]) {
    return std::abs(p[0] * r[1]) + std::abs(r[0] * p[1]);
  };
  auto lift = [](const double (&p)[3]) {
    return p[0] * p[0] + p[1] * p[1] + p[2] * p[2];
  };
  const double az = std::abs(ae[2]), bz = std::abs(be[2]);
  const double cz = std::abs(ce[2]), dz = std::abs(de[2]);
  const double permanent =
      ((abs_cross(ce, de)) * bz + (abs_cross(de, be)) * cz +
       (abs_cross(be, ce)) * dz) * lift(ae) +
      ((abs_cross(de, ae)) * cz + (abs_cross(ae, ce)) * dz +
       (abs_cross(ce, de)) * az) * lift(be) +
      ((abs_cross(ae, be)) * dz + (abs_cross(be, de)) * az +
       (abs_cross(de, ae)) * bz) * lift(ce) +
      ((abs_cross(be, ce)) * az + (abs_cross(ce, ae)) * bz +
       (abs_cross(ae, be)) * cz) * lift(de);
  const double bound = kInsphereBound * permanent;
  if (det > bound || -det > bound) return det > 0 ? 1 : -1;

  const mpq_class ex = insphere_det<mpq_class>(
      {mpq_class(a.x()) - e.x(), mpq_class(a.y()) - e.y(), mpq_class(a.z()) - e.z()},
      {mpq_class(b.x()) - e.x(), mpq_class(b.y()) - e.y(), mpq_class(b.z()) - e.z()},
      {mpq_class(c.x()) - e.x(), mpq_class(c.y()) - e.y(), mpq_class(c.z()) - e.z()},
      {mpq_class(d.x()) - e.x(), mpq_class(d.y()) - e.y(), mpq_class(d.z()) - e.z()});
  return sign_of(ex);
}

}  // namespace trisplat::predicates
