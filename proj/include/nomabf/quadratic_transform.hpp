#pragma once

#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

#include "nomabf/core_model.hpp"

namespace nomabf {

// One ratio a^H B^{-1} a of a sum-of-ratios objective; B must be positive
// definite.
template <typename Real>
struct RatioTerm {
  ComplexVector<Real> numerator;
  ComplexMatrix<Real> denominator;
};

// sum_m 2 Re(t_m^H a_m) - t_m^H B_m t_m
template <typename Real>
Real qt_value(std::span<const RatioTerm<Real>> terms,
              std::span<const ComplexVector<Real>> t) {
  detail::require(terms.size() == t.size(), "qt_value: length mismatch");
  Real total = 0;
  for (std::size_t m = 0; m < terms.size(); ++m) {
    const auto& a = terms[m].numerator;
    const auto& B = terms[m].denominator;
    detail::require(t[m].size() == a.size() && B.rows() == a.size() &&
                        B.cols() == a.size(),
                    "qt_value: dimension mismatch");
    total += Real(2) * std::real(t[m].dot(a)) - std::real(t[m].dot(B * t[m]));
  }
  return total;
}

// t_m = B_m^{-1} a_m. Throws std::domain_error when some B_m is not
// positive definite.
template <typename Real>
std::vector<ComplexVector<Real>> qt_optimal_scalars(
    std::span<const RatioTerm<Real>> terms) {
  std::vector<ComplexVector<Real>> out;
  out.reserve(terms.size());
  for (const auto& term : terms) {
    Eigen::LLT<ComplexMatrix<Real>> llt(term.denominator);
    if (llt.info() != Eigen::Success)
      throw std::domain_error("qt_optimal_scalars: denominator not positive definite");
    out.push_back(llt.solve(term.numerator));
  }
  return out;
}

// Scalars t_{u,l} for u <= l. Only the upper triangle is stored.
template <typename Real>
class ScalingSetT {
 public:
  ScalingSetT() = default;
  explicit ScalingSetT(int users)
      : users_(users), data_(users * (users + 1) / 2, std::complex<Real>(0)) {}

  [[nodiscard]] int users() const { return users_; }

  std::complex<Real>& operator()(int u, int l) { return data_[index(u, l)]; }
  const std::complex<Real>& operator()(int u, int l) const {
    return data_[index(u, l)];
  }

 private:
  [[nodiscard]] std::size_t index(int u, int l) const {
    detail::require(u >= 0 && l >= u && l < users_, "ScalingSet: index out of range");
    // Row u starts after rows 0..u-1, each of length U - row.
    return static_cast<std::size_t>(u * users_ - u * (u - 1) / 2 + (l - u));
  }

  int users_{0};
  std::vector<std::complex<Real>> data_;
};

using ScalingSet = ScalingSetT<double>;

// Optimal quadratic-transform scalars for every constrained (u, l) pair.
template <typename Real>
ScalingSetT<Real> update_t(const ChannelSetT<Real>& channels,
                           const ErrorSetT<Real>& errors,
                           const BeamformerSetT<Real>& beams) {
  check_shapes(channels, errors, beams);
  const int U = channels.users();
  ScalingSetT<Real> t(U);
  for (int l = 0; l < U; ++l) {
    const ComplexVector<Real> h = channels.estimates[l] + errors.errors[l];
    for (int u = 0; u <= l; ++u) {
      const Real den = sinr_denominator(u, l, channels, errors, beams);
      t(u, l) = h.dot(beams.beams[u]) / den;
    }
  }
  return t;
}

// 2 Re(t* h^H w_u) - |t|^2 (interference + noise). Equals the SINR at the
// optimal t and lower-bounds it elsewhere.
template <typename Real>
Real transformed_sinr(int u, int l, const ScalingSetT<Real>& t,
                      const ChannelSetT<Real>& channels,
                      const ErrorSetT<Real>& errors,
                      const BeamformerSetT<Real>& beams) {
  const ComplexVector<Real> h = channels.estimates[l] + errors.errors[l];
  const std::complex<Real> tul = t(u, l);
  return Real(2) * std::real(std::conj(tul) * h.dot(beams.beams[u])) -
         std::norm(tul) * sinr_denominator(u, l, channels, errors, beams);
}

}  // namespace nomabf
