#pragma once

#include <stdexcept>
#include <string>

namespace impes {

enum class ErrorCode {
  InvalidArgument = 1,
  Resolution,     // interface too complex for the mesh
  DegenerateCut,  // immersed basis system singular
  Solver,         // linear solver failed to converge
  Contract,       // mismatched stage inputs
  Io,
  Internal,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace impes
