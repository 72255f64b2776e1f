#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace fbx::detail {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
};

// Gauss-Kronrod 7/15 rule on [a, b]; nodes and weights from QUADPACK qk15.
template <class F>
QuadratureResult gauss_kronrod15(const F& f, double a, double b) {
  static constexpr std::array<double, 8> kNodes = {
      0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
      0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
      0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
      0.207784955007898467600689403773245, 0.0};
  static constexpr std::array<double, 8> kKronrod = {
      0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
      0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
      0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
      0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
  static constexpr std::array<double, 4> kGauss = {
      0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
      0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kKronrod[7];
  double gauss = fc * kGauss[3];
  for (int i = 0; i < 7; ++i) {
    const double dx = half * kNodes[i];
    const double sum = f(center - dx) + f(center + dx);
    kronrod += kKronrod[i] * sum;
    if (i % 2 == 1) gauss += kGauss[i / 2] * sum;
  }
  return {kronrod * half, std::abs((kronrod - gauss) * half)};
}

// Globally adaptive bisection: split the interval with the largest error
// estimate until the summed estimate is below abs_tol.
template <class F>
QuadratureResult integrate_adaptive(const F& f, double a, double b, double abs_tol,
                                    int max_intervals = 4000) {
  struct Piece {
    double a, b;
    QuadratureResult r;
  };
  std::vector<Piece> pieces{{a, b, gauss_kronrod15(f, a, b)}};
  for (;;) {
    double total = 0.0;
    double err = 0.0;
    std::size_t worst = 0;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      total += pieces[i].r.value;
      err += pieces[i].r.error;
      if (pieces[i].r.error > pieces[worst].r.error) worst = i;
    }
    if (err <= abs_tol) return {total, err};
    if (static_cast<int>(pieces.size()) >= max_intervals) {
      throw std::runtime_error("adaptive quadrature did not reach tolerance");
    }
    const Piece p = pieces[worst];
    const double mid = 0.5 * (p.a + p.b);
    pieces[worst] = {p.a, mid, gauss_kronrod15(f, p.a, mid)};
    pieces.push_back({mid, p.b, gauss_kronrod15(f, mid, p.b)});
  }
}

}  // namespace fbx::detail
