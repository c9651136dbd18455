#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace perturbatrix {

template <typename Real>
using Complex = std::complex<Real>;

template <typename Real>
using CMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Real>
using CVector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;

template <typename Real>
using RVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

template <typename Real>
using RMatrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;

// Double-precision shorthands used by everything above linalg.
using cplx = std::complex<double>;
using MatrixC = CMatrix<double>;
using VectorC = CVector<double>;
using VectorR = RVector<double>;
using MatrixR = RMatrix<double>;
using Index = Eigen::Index;

enum class ErrorKind {
  InvalidArgument,
  DimensionMismatch,
  NotHermitian,
  NotPSD,
  NotSectorial,
  NotInCone,
  NotUnitVector,
  NoConvergence,
  Overflow,
  DegenerateLeadingCoefficient,
  PoleProximity,
  SpectrumCollision,
  ZeroDenominator,
  HypothesisViolated,
  CollisionDetected,
  MaxStepsExceeded,
  AmbiguousMatch,
  EmptyInterval,
  HypothesisUnverifiable,
  QuadratureFailure,
  UnboundedDerivative,
  OutOfSector,
  ParseError,
};

inline const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::NotPSD: return "NotPSD";
    case ErrorKind::NotSectorial: return "NotSectorial";
    case ErrorKind::NotInCone: return "NotInCone";
    case ErrorKind::NotUnitVector: return "NotUnitVector";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::Overflow: return "Overflow";
    case ErrorKind::DegenerateLeadingCoefficient: return "DegenerateLeadingCoefficient";
    case ErrorKind::PoleProximity: return "PoleProximity";
    case ErrorKind::SpectrumCollision: return "SpectrumCollision";
    case ErrorKind::ZeroDenominator: return "ZeroDenominator";
    case ErrorKind::HypothesisViolated: return "HypothesisViolated";
    case ErrorKind::CollisionDetected: return "CollisionDetected";
    case ErrorKind::MaxStepsExceeded: return "MaxStepsExceeded";
    case ErrorKind::AmbiguousMatch: return "AmbiguousMatch";
    case ErrorKind::EmptyInterval: return "EmptyInterval";
    case ErrorKind::HypothesisUnverifiable: return "HypothesisUnverifiable";
    case ErrorKind::QuadratureFailure: return "QuadratureFailure";
    case ErrorKind::UnboundedDerivative: return "UnboundedDerivative";
    case ErrorKind::OutOfSector: return "OutOfSector";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

template <typename Derived>
void require_square(const Eigen::MatrixBase<Derived>& a, const char* who) {
  if (a.rows() != a.cols()) {
    fail(ErrorKind::DimensionMismatch, std::string(who) + ": matrix is not square");
  }
}

template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& a, const char* who) {
  if (!a.allFinite()) fail(ErrorKind::InvalidArgument, std::string(who) + ": non-finite entry");
}

}  // namespace perturbatrix
