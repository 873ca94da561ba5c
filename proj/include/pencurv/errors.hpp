#pragma once

#include <stdexcept>
#include <string>

namespace pencurv {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error { using Error::Error; };
struct PreconditionViolation : Error { using Error::Error; };
struct ZeroForm : Error { using Error::Error; };
struct ClusterAmbiguous : Error { using Error::Error; };
struct NumericallyAmbiguous : Error { using Error::Error; };
struct InconsistentImages : Error { using Error::Error; };
struct NonDecaying : Error { using Error::Error; };
struct InvalidMultiplicities : Error { using Error::Error; };
struct DegenerateLadder : Error { using Error::Error; };
struct ZeroPairing : Error { using Error::Error; };
struct FamilyMismatch : Error { using Error::Error; };

struct NotSymmetric : Error {
  NotSymmetric(const std::string& what, int row, int col) : Error(what), row(row), col(col) {}
  int row;
  int col;
};

struct ParseError : Error { using Error::Error; };

}  // namespace pencurv
