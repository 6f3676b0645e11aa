#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace eqs {

using cplx = std::complex<double>;

/// Pure n-qubit state. Basis index bit q holds qubit q (qubit 0 is the least
/// significant bit).
class StateVector {
 public:
  StateVector() = default;

  /// |0...0> on n qubits.
  explicit StateVector(int n_qubits);

  /// Takes ownership of raw amplitudes; the length must be a power of two.
  /// Amplitudes are used as given (no normalization).
  static StateVector from_amplitudes(std::vector<cplx> amps);

  /// Computational basis state |index>.
  static StateVector basis(int n_qubits, std::size_t index);

  int n_qubits() const { return n_qubits_; }
  std::size_t dim() const { return amps_.size(); }

  cplx& operator[](std::size_t i) { return amps_[i]; }
  const cplx& operator[](std::size_t i) const { return amps_[i]; }

  std::span<cplx> amplitudes() { return amps_; }
  std::span<const cplx> amplitudes() const { return amps_; }

  double norm() const;
  void normalize();

 private:
  int n_qubits_ = 0;
  std::vector<cplx> amps_;
};

}  // namespace eqs
