#pragma once

// Small dense complex linear algebra used throughout the library.

#include "udiscrim/linalg/eigen.hpp"
#include "udiscrim/linalg/matrix.hpp"
#include "udiscrim/linalg/random.hpp"
#include "udiscrim/linalg/structure.hpp"

namespace udiscrim::linalg {

inline UnitaryGate exp_i_hermitian(const Matrix& h, const PartyStructure& s,
                                   const Tolerances& tol = default_tolerances()) {
  return {exp_i_hermitian_matrix(h, tol), s, tol};
}

inline UnitaryGate exp_i_hermitian(const Matrix& h, const Tolerances& tol = default_tolerances()) {
  return exp_i_hermitian(h, PartyStructure::single(h.rows()), tol);
}

inline Spectrum eig_unitary(const UnitaryGate& u, const Tolerances& tol = default_tolerances()) {
  return eig_unitary(u.matrix(), tol);
}

}  // namespace udiscrim::linalg
