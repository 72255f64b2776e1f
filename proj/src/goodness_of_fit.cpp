#include "fbx/goodness_of_fit.hpp"

#include "fbx/error.hpp"

namespace fbx {
namespace {

double kolmogorov_c(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("KS significance level must lie in (0,1)");
  return std::sqrt(-0.5 * std::log(0.5 * alpha));
}

}  // namespace

double ks_critical_value(double alpha, std::size_t n) {
  if (n == 0) throw DomainError("KS critical value needs at least one sample");
  return kolmogorov_c(alpha) / std::sqrt(static_cast<double>(n));
}

double ks_two_sample_critical_value(double alpha, std::size_t n, std::size_t m) {
  if (n == 0 || m == 0) throw DomainError("KS critical value needs non-empty samples");
  const auto nd = static_cast<double>(n);
  const auto md = static_cast<double>(m);
  return kolmogorov_c(alpha) * std::sqrt((nd + md) / (nd * md));
}

double ks_two_sample_distance(std::span<const double> a, std::span<const double> b) {
  const auto na = static_cast<double>(a.size());
  const auto nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

}  // namespace fbx
