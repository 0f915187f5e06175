// Property tests for the norm toolkit: the axioms of the Sobolev scale, the
// derivative-interpolation inequality with its sharp constant, a computable
// uniform-norm embedding for band-limited fields, and stability of the
// product and composition estimates across frequency and amplitude sweeps.
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "curveforge/norms.hpp"
#include "curveforge/spectral.hpp"
#include "doctest.h"

using namespace curveforge;

namespace {

constexpr double kPi = std::numbers::pi;

double seminorm(const GridField& f, int j) {
  return std::sqrt(integrate(grad_order_squared(f, j)));
}

// sqrt(sum_{|k|_inf <= kmax} 1 / sum_{j<=s} |k|^{2j} / volume): by
// Cauchy-Schwarz on the Fourier series, sup|u| is bounded by this multiple of
// the H^s norm for any field supported on the band.
double band_embedding_constant(int m, int kmax, int s) {
  double sum = 0.0;
  int k[3] = {0, 0, 0};
  for (int a = 0; a < m; ++a) k[a] = -kmax;
  while (true) {
    double ksq = 0.0;
    for (int a = 0; a < m; ++a) ksq += static_cast<double>(k[a]) * k[a];
    double weight = 0.0, pw = 1.0;
    for (int j = 0; j <= s; ++j, pw *= ksq) weight += pw;
    sum += 1.0 / weight;
    int a = 0;
    while (a < m && k[a] == kmax) k[a++] = -kmax;
    if (a == m) break;
    ++k[a];
  }
  return std::sqrt(sum / std::pow(2.0 * kPi, m));
}

GridField pointwise_product(const GridField& f, const GridField& g) {
  GridField out = f;
  out.samples *= g.samples;
  return out;
}

}  // namespace

TEST_CASE("order zero recovers the L2 norm and the scale is monotone") {
  std::mt19937_64 rng(11);
  for (int m : {1, 2, 3}) {
    const TorusGrid g(m, 8);
    const GridField f = random_band_limited(g, 3, 1.0, rng);
    CHECK(sobolev_norm(f, 0) == doctest::Approx(l2_norm(f)).epsilon(1e-12));
    for (int s = 0; s < 3; ++s) CHECK(sobolev_norm(f, s) <= sobolev_norm(f, s + 1));
    CHECK(ck_norm(f, 0) == doctest::Approx(c0_norm(f)).epsilon(1e-12));
    CHECK(ck_norm(f, 2) >= c0_norm(f));
  }
}

TEST_CASE("sobolev norms are homogeneous and subadditive") {
  std::mt19937_64 rng(12);
  for (int m : {1, 2}) {
    const TorusGrid g(m, 16);
    const GridField f = random_band_limited(g, 4, 1.0, rng);
    const GridField h = random_band_limited(g, 4, 0.6, rng);
    GridField scaled = f, sum = f;
    scaled.samples *= -2.5;
    sum.samples += h.samples;
    for (int s : {0, 1, 2, 3}) {
      CHECK(sobolev_norm(scaled, s) == doctest::Approx(2.5 * sobolev_norm(f, s)).epsilon(1e-12));
      CHECK(sobolev_norm(sum, s) <= sobolev_norm(f, s) + sobolev_norm(h, s) + 1e-12);
    }
  }
}

TEST_CASE("derivative seminorms interpolate with constant one") {
  // |grad^j u|_{L2} <= |grad^n u|_{L2}^{j/n} |u|_{L2}^{1-j/n}: Hoelder on the
  // Fourier side, so the constant is exactly one and a single mode is sharp.
  std::mt19937_64 rng(13);
  for (int m : {1, 2}) {
    const TorusGrid g(m, 16);
    const GridField f = random_band_limited(g, 5, 1.0, rng);
    const double l2 = l2_norm(f);
    for (int n : {2, 3}) {
      for (int j = 1; j < n; ++j) {
        const double a = static_cast<double>(j) / n;
        const double rhs = std::pow(seminorm(f, n), a) * std::pow(l2, 1.0 - a);
        CHECK(seminorm(f, j) <= rhs * (1.0 + 1e-10));
      }
    }
  }

  const TorusGrid g1(1, 16);
  const GridField mode = sample(g1, [](const double* x) { return std::sin(3.0 * x[0]); });
  for (int j = 1; j < 3; ++j) {
    const double a = j / 3.0;
    const double rhs = std::pow(seminorm(mode, 3), a) * std::pow(l2_norm(mode), 1.0 - a);
    CHECK(seminorm(mode, j) == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("uniform norm is controlled on each frequency band") {
  CHECK(band_embedding_constant(1, 3, 1) ==
        doctest::Approx(std::sqrt(2.6 / (2.0 * kPi))).epsilon(1e-12));

  std::mt19937_64 rng(14);
  const struct {
    int m, s;
  } cases[] = {{1, 1}, {2, 2}, {3, 2}};
  for (const auto& c : cases) {
    const TorusGrid g(c.m, 8);
    const double constant = band_embedding_constant(c.m, 3, c.s);
    for (int trial = 0; trial < 8; ++trial) {
      const GridField f = random_band_limited(g, 3, 1.0, rng);
      CHECK(c0_norm(f) <= constant * sobolev_norm(f, c.s) * (1.0 + 1e-9));
    }
  }
}

TEST_CASE("product estimates stay bounded across frequency bands") {
  // |fg|_{H^s} <= C(|f|_{C0}|g|_{H^s} + |f|_{H^s}|g|_{C0}) and the gradient
  // pairing analogue at one order higher: the ratio to the right-hand side
  // must not grow as the fields get more oscillatory, which is what fails if
  // an exponent in the estimate is wrong.
  std::mt19937_64 rng(15);
  const int s = 2;
  std::vector<double> product_ratios, pairing_ratios;
  for (int band : {2, 4, 8, 16}) {
    const TorusGrid g(1, 4 * band + 4);  // resolves the doubled band exactly
    const GridField f = random_band_limited(g, band, 1.0, rng);
    const GridField h = random_band_limited(g, band, 1.0, rng);

    const GridField p = pointwise_product(f, h);
    const double prhs = c0_norm(f) * sobolev_norm(h, s) + sobolev_norm(f, s) * c0_norm(h);
    product_ratios.push_back(sobolev_norm(p, s) / prhs);

    GridField q(g);
    for (int a = 0; a < g.dim(); ++a)
      q.samples += partial_derivative(f, a, 1).samples * partial_derivative(h, a, 1).samples;
    const double qrhs =
        ck_norm(f, 1) * sobolev_norm(h, s + 1) + sobolev_norm(f, s + 1) * ck_norm(h, 1);
    pairing_ratios.push_back(sobolev_norm(q, s) / qrhs);
  }
  for (double r : product_ratios) CHECK(r < 1.0);
  for (double r : pairing_ratios) CHECK(r < 1.0);
  CHECK(product_ratios.back() < 2.0 * product_ratios.front());
  CHECK(pairing_ratios.back() < 2.0 * pairing_ratios.front());
}

TEST_CASE("composition through an exponential profile stays within its bound") {
  // For F(w) = e^{2w} - 1 the claimed control is
  //   |F(w)|_{H^s} <= C max_j sup|F^(j)| (1 + |w|_{C0}^s) |w|_{H^s};
  // the sweep checks the amplitude growth is fully absorbed by the explicit
  // factors, and the small-amplitude limit pins the linearized ratio 2^{1-s}.
  const TorusGrid g(1, 64);
  const GridField shape =
      sample(g, [](const double* x) { return std::sin(x[0]) + 0.3 * std::cos(2.0 * x[0]); });
  for (int s : {1, 2, 3}) {
    double small_ratio = 0.0;
    for (double amp : {0.01, 0.1, 0.5, 1.0, 2.0}) {
      GridField w = shape;
      w.samples *= amp;
      GridField fw = w;
      fw.samples = (2.0 * w.samples).exp() - 1.0;
      const double nu = c0_norm(w);
      const double profile = std::pow(2.0, s) * std::exp(2.0 * nu);
      const double ratio =
          sobolev_norm(fw, s) / (profile * (1.0 + std::pow(nu, s)) * sobolev_norm(w, s));
      CHECK(ratio < 1.0);
      if (amp == 0.01) small_ratio = ratio;
    }
    CHECK(small_ratio == doctest::Approx(std::pow(2.0, 1 - s)).epsilon(0.1));
  }
}
