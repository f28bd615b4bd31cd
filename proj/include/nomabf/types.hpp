#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace nomabf {

template <typename Real>
using ComplexVector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;
template <typename Real>
using ComplexMatrix =
    Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

using CVec = ComplexVector<double>;
using CMat = ComplexMatrix<double>;
using Complex = std::complex<double>;

// Per-user channel estimates with the error-ball radius and noise power (mW).
// Users are indexed 0..U-1 in NOMA (SIC) order once canonicalized.
template <typename Real>
struct ChannelSetT {
  std::vector<ComplexVector<Real>> estimates;
  Real epsilon{0};
  Real sigma2{1};

  [[nodiscard]] int users() const { return static_cast<int>(estimates.size()); }
  [[nodiscard]] int antennas() const {
    return estimates.empty() ? 0 : static_cast<int>(estimates.front().size());
  }
};

template <typename Real>
struct BeamformerSetT {
  std::vector<ComplexVector<Real>> beams;

  [[nodiscard]] int users() const { return static_cast<int>(beams.size()); }

  static BeamformerSetT zeros(int antennas, int users) {
    return {std::vector<ComplexVector<Real>>(
        users, ComplexVector<Real>::Zero(antennas))};
  }
};

template <typename Real>
struct ErrorSetT {
  std::vector<ComplexVector<Real>> errors;

  [[nodiscard]] int users() const { return static_cast<int>(errors.size()); }

  static ErrorSetT zeros(int antennas, int users) {
    return {std::vector<ComplexVector<Real>>(
        users, ComplexVector<Real>::Zero(antennas))};
  }
};

// Target SINRs, linear scale. dB is only used at I/O boundaries.
template <typename Real>
struct QosTargetsT {
  std::vector<Real> gamma;

  static QosTargetsT from_db(const std::vector<Real>& db) {
    QosTargetsT q;
    q.gamma.reserve(db.size());
    for (Real d : db) q.gamma.push_back(std::pow(Real(10), d / Real(10)));
    return q;
  }
  static QosTargetsT uniform_db(int users, Real db) {
    return from_db(std::vector<Real>(users, db));
  }
  [[nodiscard]] Real gamma_db(int u) const {
    return Real(10) * std::log10(gamma[u]);
  }
  [[nodiscard]] int users() const { return static_cast<int>(gamma.size()); }
};

using ChannelSet = ChannelSetT<double>;
using BeamformerSet = BeamformerSetT<double>;
using ErrorSet = ErrorSetT<double>;
using QosTargets = QosTargetsT<double>;

enum class SolverStatus {
  Optimal,
  Infeasible,
  Unbounded,
  MaxIterations,
  NumericalFailure,
};

inline std::string_view to_string(SolverStatus s) {
  switch (s) {
    case SolverStatus::Optimal: return "Optimal";
    case SolverStatus::Infeasible: return "Infeasible";
    case SolverStatus::Unbounded: return "Unbounded";
    case SolverStatus::MaxIterations: return "MaxIterations";
    case SolverStatus::NumericalFailure: return "NumericalFailure";
  }
  return "Unknown";
}

namespace detail {

inline void require(bool cond, const char* what) {
  if (!cond) throw std::invalid_argument(what);
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  return m.allFinite();
}

}  // namespace detail

// Throws std::invalid_argument if the vectors disagree in count or dimension.
template <typename Real>
void check_shapes(const ChannelSetT<Real>& ch, const ErrorSetT<Real>& err,
                  const BeamformerSetT<Real>& bf) {
  const int U = ch.users();
  const int N = ch.antennas();
  detail::require(U >= 1, "channel set is empty");
  detail::require(ch.sigma2 > Real(0), "noise power must be positive");
  detail::require(err.users() == U, "error set size mismatch");
  detail::require(bf.users() == U, "beamformer set size mismatch");
  for (int u = 0; u < U; ++u) {
    detail::require(ch.estimates[u].size() == N, "channel dimension mismatch");
    detail::require(err.errors[u].size() == N, "error dimension mismatch");
    detail::require(bf.beams[u].size() == N, "beam dimension mismatch");
  }
}

}  // namespace nomabf
