#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace chiral {

using Real = double;
using Complex = std::complex<double>;
using Index = Eigen::Index;

using VectorXr = Eigen::VectorXd;
using MatrixXr = Eigen::MatrixXd;
using VectorXc = Eigen::VectorXcd;
using MatrixXc = Eigen::MatrixXcd;
using MatrixXi = Eigen::MatrixXi;

/// Row-major complex matrix. Density matrices use this layout so that
/// row-major sparse operators act on contiguous rows.
using RowMatrixXc = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using SparseMatrixC = Eigen::SparseMatrix<Complex, Eigen::ColMajor>;
using SparseRowMatrixC = Eigen::SparseMatrix<Complex, Eigen::RowMajor>;
using TripletC = Eigen::Triplet<Complex>;

inline constexpr Complex kI{0.0, 1.0};
inline constexpr Real kPi = 3.14159265358979323846;

enum class ErrorCode {
  // reservoir
  PhaseConditionViolated,
  NoPositiveRoot,
  DiagonalizationFailure,
  NotInChiralWindow,
  IntegrandSingular,
  // chain
  OddChain,
  ZeroAsymmetry,
  DimensionOverflow,
  ToleranceFailure,
  SolverDivergence,
  IndexOutOfRange,
  InvalidState,
  InvalidArgument,
  // trajectories
  EquivalenceCheckFailed,
  NormUnderflow,
  // lab
  ConfigError,
  RuntimeFailure,
  UnknownFigure,
};

const char* to_string(ErrorCode code);

/// Every module reports failures through this exception; `code()` identifies
/// the failure class, `what()` carries the details.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::PhaseConditionViolated: return "PhaseConditionViolated";
    case ErrorCode::NoPositiveRoot: return "NoPositiveRoot";
    case ErrorCode::DiagonalizationFailure: return "DiagonalizationFailure";
    case ErrorCode::NotInChiralWindow: return "NotInChiralWindow";
    case ErrorCode::IntegrandSingular: return "IntegrandSingular";
    case ErrorCode::OddChain: return "OddChain";
    case ErrorCode::ZeroAsymmetry: return "ZeroAsymmetry";
    case ErrorCode::DimensionOverflow: return "DimensionOverflow";
    case ErrorCode::ToleranceFailure: return "ToleranceFailure";
    case ErrorCode::SolverDivergence: return "SolverDivergence";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::InvalidState: return "InvalidState";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::EquivalenceCheckFailed: return "EquivalenceCheckFailed";
    case ErrorCode::NormUnderflow: return "NormUnderflow";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::RuntimeFailure: return "RuntimeFailure";
    case ErrorCode::UnknownFigure: return "UnknownFigure";
  }
  return "Unknown";
}

}  // namespace chiral
