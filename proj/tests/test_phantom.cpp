#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "lact/phantom.hpp"
#include "lact/rng.hpp"

using namespace lact;

namespace {

// Boundary point at parametric angle t, built from the rotation matrix
// directly so membership tests do not reuse the implementation's algebra.
void boundary_point(const Ellipse& e, double t, double scale, double& x,
                    double& y) {
  const double bx = scale * e.a * std::cos(t);
  const double by = scale * e.b * std::sin(t);
  x = e.cx + bx * std::cos(e.tilt) - by * std::sin(e.tilt);
  y = e.cy + bx * std::sin(e.tilt) + by * std::cos(e.tilt);
}

}  // namespace

TEST_CASE("ellipse validation") {
  CHECK_THROWS_AS(Ellipse(0, 0, 0.0, 1, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(Ellipse(0, 0, 1, -0.5, 0, 1), std::invalid_argument);
  const Ellipse e(0, 0, 1, 1, 4.0, 1);
  CHECK(e.tilt == doctest::Approx(4.0 - kPi).epsilon(1e-12));
  const Ellipse f(0, 0, 1, 1, -0.5, 1);
  CHECK(f.tilt == doctest::Approx(-0.5 + kPi).epsilon(1e-12));
}

TEST_CASE("membership against parametric boundary") {
  SplitMix64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Ellipse e(rng.uniform(-0.4, 0.4), rng.uniform(-0.4, 0.4),
                    rng.uniform(0.05, 0.5), rng.uniform(0.05, 0.5),
                    rng.uniform(0.0, kPi), 1.0);
    for (int i = 0; i < 64; ++i) {
      const double t = 2.0 * kPi * i / 64;
      double x, y;
      boundary_point(e, t, 0.995, x, y);
      CHECK(e.contains(x, y));
      boundary_point(e, t, 1.005, x, y);
      CHECK_FALSE(e.contains(x, y));
    }
    CHECK(e.contains(e.cx, e.cy));
  }
}

TEST_CASE("support radius equals the sampled support function") {
  SplitMix64 rng(12);
  for (int trial = 0; trial < 10; ++trial) {
    const Ellipse e(0, 0, rng.uniform(0.1, 0.8), rng.uniform(0.1, 0.8),
                    rng.uniform(0.0, kPi), 1.0);
    for (int j = 0; j < 12; ++j) {
      const double theta = kPi * j / 12;
      const double cx = std::cos(theta), sx = std::sin(theta);
      double h = 0.0;
      const int m = 20000;
      for (int i = 0; i < m; ++i) {
        double x, y;
        boundary_point(e, 2.0 * kPi * i / m, 1.0, x, y);
        h = std::max(h, x * cx + y * sx);
      }
      CHECK(e.support_radius(theta) == doctest::Approx(h).epsilon(1e-6));
    }
  }
}

TEST_CASE("line integral matches dense membership integration") {
  SplitMix64 rng(13);
  for (int trial = 0; trial < 6; ++trial) {
    const Ellipse e(rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3),
                    rng.uniform(0.1, 0.5), rng.uniform(0.1, 0.5),
                    rng.uniform(0.0, kPi), rng.uniform(0.5, 2.0));
    for (int j = 0; j < 8; ++j) {
      const double theta = kPi * (j + 0.31) / 8;
      const double s = rng.uniform(-0.9, 0.9);
      const double c = std::cos(theta), si = std::sin(theta);
      const double dt = 1e-4;
      double acc = 0.0;
      for (double t = -2.0; t <= 2.0; t += dt) {
        const double x = s * c - t * si;
        const double y = s * si + t * c;
        if (e.contains(x, y)) acc += dt;
      }
      acc *= e.intensity;
      CHECK(e.line_integral(theta, s) ==
            doctest::Approx(acc).epsilon(1e-3).scale(1.0));
    }
  }
}

TEST_CASE("disk phantom closed forms") {
  const EllipsePhantom d = phantoms::disk(0.5, 1.0);
  REQUIRE(d.ellipses().size() == 1);
  const Ellipse& e = d.ellipses()[0];
  for (int j = 0; j < 8; ++j) {
    const double theta = kPi * j / 8;
    CHECK(e.support_radius(theta) == doctest::Approx(0.5).epsilon(1e-14));
    const double s = -0.5 + j * 0.12;
    const double expect =
        std::abs(s) < 0.5 ? 2.0 * std::sqrt(0.25 - s * s) : 0.0;
    CHECK(e.line_integral(theta, s) == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("rasterize sums intensities of covering ellipses") {
  EllipsePhantom p;
  p.add(Ellipse(0.0, 0.0, 0.6, 0.4, 0.3, 1.0));
  p.add(Ellipse(0.1, -0.1, 0.3, 0.2, 1.2, 0.5));
  const int n = 64;
  const Image img = rasterize(p, n);
  SplitMix64 rng(14);
  for (int trial = 0; trial < 200; ++trial) {
    const int i = static_cast<int>(rng.next_u64() % n);
    const int j = static_cast<int>(rng.next_u64() % n);
    const double x = img.x_of(j), y = img.y_of(i);
    double expect = 0.0;
    for (const Ellipse& e : p.ellipses())
      if (e.contains(x, y)) expect += e.intensity;
    CHECK(img.at(i, j) == expect);
  }
}

TEST_CASE("analytic sinogram is the sum of per-ellipse integrals") {
  EllipsePhantom p;
  p.add(Ellipse(0.2, 0.0, 0.4, 0.3, 0.0, 1.0));
  p.add(Ellipse(-0.1, 0.2, 0.2, 0.2, 0.0, -0.4));
  const Geometry g = Geometry::parallel(12, 31);
  const Sinogram sino = analytic_sinogram(p, g);
  for (int j = 0; j < g.n_angles(); ++j)
    for (int k = 0; k < g.n_det(); ++k) {
      double expect = 0.0;
      for (const Ellipse& e : p.ellipses())
        expect += e.line_integral(g.angle(j), g.s_of(k));
      CHECK(sino.at(j, k) == doctest::Approx(expect).epsilon(1e-14));
    }
}

TEST_CASE("head phantom tables") {
  const EllipsePhantom soft = phantoms::shepp_logan();
  const EllipsePhantom orig = phantoms::shepp_logan_original();
  REQUIRE(soft.ellipses().size() == 10);
  REQUIRE(orig.ellipses().size() == 10);
  CHECK(soft.ellipses()[0].a == doctest::Approx(0.69));
  CHECK(soft.ellipses()[0].b == doctest::Approx(0.92));
  CHECK(soft.ellipses()[0].intensity == doctest::Approx(1.0));
  CHECK(soft.ellipses()[1].intensity == doctest::Approx(-0.8));
  CHECK(orig.ellipses()[0].intensity == doctest::Approx(2.0));
  CHECK(orig.ellipses()[1].intensity == doctest::Approx(-0.98));
  // Geometry is shared between the two intensity sets.
  for (int i = 0; i < 10; ++i) {
    CHECK(soft.ellipses()[i].cx == orig.ellipses()[i].cx);
    CHECK(soft.ellipses()[i].a == orig.ellipses()[i].a);
    CHECK(soft.ellipses()[i].tilt == orig.ellipses()[i].tilt);
  }
  // Interior value: outer shell plus the subtracted brain region.
  const Image img = rasterize(soft, 128);
  CHECK(img.at(64, 64) == doctest::Approx(0.2).epsilon(1e-12));
}
