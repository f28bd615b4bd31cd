#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "nomabf/types.hpp"

namespace nomabf {

template <typename Real>
struct CanonicalChannels {
  ChannelSetT<Real> channels;
  // noma_index[original user] = position in the SIC order.
  std::vector<int> noma_index;
  // original_index[NOMA position] = original user.
  std::vector<int> original_index;
};

// Sorts users by nondecreasing estimated channel norm. Ties keep the
// original order.
template <typename Real>
CanonicalChannels<Real> canonicalize_order(const ChannelSetT<Real>& channels) {
  const int U = channels.users();
  std::vector<int> order(U);
  std::iota(order.begin(), order.end(), 0);
  std::vector<Real> norms(U);
  for (int u = 0; u < U; ++u) norms[u] = channels.estimates[u].norm();
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return norms[a] < norms[b]; });

  CanonicalChannels<Real> out;
  out.channels.epsilon = channels.epsilon;
  out.channels.sigma2 = channels.sigma2;
  out.noma_index.resize(U);
  out.original_index = order;
  for (int k = 0; k < U; ++k) {
    out.channels.estimates.push_back(channels.estimates[order[k]]);
    out.noma_index[order[k]] = k;
  }
  return out;
}

// Interference-plus-noise seen by decoder l when detecting user u:
// residual SIC error from weaker users plus stronger users' signals.
template <typename Real>
Real sinr_denominator(int u, int l, const ChannelSetT<Real>& channels,
                      const ErrorSetT<Real>& errors,
                      const BeamformerSetT<Real>& beams) {
  const int U = channels.users();
  const ComplexVector<Real>& e = errors.errors[l];
  const ComplexVector<Real> h = channels.estimates[l] + e;
  Real den = channels.sigma2;
  for (int m = 0; m < u; ++m) den += std::norm(e.dot(beams.beams[m]));
  for (int k = u + 1; k < U; ++k) den += std::norm(h.dot(beams.beams[k]));
  return den;
}

// SINR of user u's stream at decoder l >= u, with true channel estimate + error.
template <typename Real>
Real compute_sinr(int u, int l, const ChannelSetT<Real>& channels,
                  const ErrorSetT<Real>& errors,
                  const BeamformerSetT<Real>& beams) {
  const int U = channels.users();
  detail::require(u >= 0 && u < U && l >= u && l < U,
                  "compute_sinr: index out of range");
  const ComplexVector<Real> h = channels.estimates[l] + errors.errors[l];
  const Real num = std::norm(h.dot(beams.beams[u]));
  return num / sinr_denominator(u, l, channels, errors, beams);
}

// Minimum SINR of user u over every decoder that must detect it.
template <typename Real>
Real effective_sinr(int u, const ChannelSetT<Real>& channels,
                    const ErrorSetT<Real>& errors,
                    const BeamformerSetT<Real>& beams) {
  Real best = compute_sinr(u, u, channels, errors, beams);
  for (int l = u + 1; l < channels.users(); ++l)
    best = std::min(best, compute_sinr(u, l, channels, errors, beams));
  return best;
}

template <typename Real>
Real achievable_rate(int u, const ChannelSetT<Real>& channels,
                     const ErrorSetT<Real>& errors,
                     const BeamformerSetT<Real>& beams) {
  return std::log2(Real(1) + effective_sinr(u, channels, errors, beams));
}

// margin[u] = effective SINR - target; the QoS holds iff margin >= 0.
template <typename Real>
std::vector<Real> qos_margins(const BeamformerSetT<Real>& beams,
                              const ChannelSetT<Real>& channels,
                              const ErrorSetT<Real>& errors,
                              const QosTargetsT<Real>& targets) {
  check_shapes(channels, errors, beams);
  detail::require(targets.users() == channels.users(), "target size mismatch");
  std::vector<Real> margins(channels.users());
  for (int u = 0; u < channels.users(); ++u)
    margins[u] = effective_sinr(u, channels, errors, beams) - targets.gamma[u];
  return margins;
}

}  // namespace nomabf
