#include "nomabf/sampling.hpp"

#include <cmath>
#include <vector>

namespace nomabf {

Rng make_rng(std::initializer_list<std::uint64_t> key) {
  std::vector<std::uint32_t> words;
  words.reserve(2 * key.size());
  for (std::uint64_t k : key) {
    words.push_back(static_cast<std::uint32_t>(k));
    words.push_back(static_cast<std::uint32_t>(k >> 32));
  }
  std::seed_seq seq(words.begin(), words.end());
  return Rng(seq);
}

CVec sample_channel(Rng& rng, int n_t) {
  detail::require(n_t >= 1, "sample_channel: n_t must be positive");
  std::normal_distribution<double> gauss(0.0, std::sqrt(0.5 / n_t));
  CVec h(n_t);
  for (int k = 0; k < n_t; ++k) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    h(k) = Complex(re, im);
  }
  return h;
}

CVec sample_error_ball(Rng& rng, int n_t, double epsilon) {
  detail::require(n_t >= 1, "sample_error_ball: n_t must be positive");
  detail::require(epsilon >= 0, "sample_error_ball: negative radius");
  if (epsilon == 0.0) return CVec::Zero(n_t);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  CVec d(n_t);
  double n = 0;
  do {
    for (int k = 0; k < n_t; ++k) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      d(k) = Complex(re, im);
    }
    n = d.norm();
  } while (n == 0.0);
  const double radius = epsilon * std::pow(unif(rng), 1.0 / (2.0 * n_t));
  CVec e = (radius / n) * d;
  const double en = e.norm();
  if (en > epsilon) e *= epsilon / en;
  return e;
}

}  // namespace nomabf
