#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dualfront {

/// Machine-readable error category. The CLI maps these onto exit codes.
enum class ErrorCode {
  kShape,            // mismatched jet/matrix shapes
  kDomain,           // log of non-positive real, zero divisor, off-model point
  kSyntax,           // expression or MapSpec syntax error
  kUndeclared,       // identifier not declared
  kArity,            // wrong number of function arguments
  kSpec,             // semantically invalid MapSpec
  kRankDeficient,    // normal map undefined without a user-supplied normal
  kTruncation,       // requested chain deeper than the jet order allows
  kNondiagnosable,   // degenerate point (d phi = 0, rank drop)
  kHypothesis,       // zero-set census hypotheses violated
  kUnresolved,       // adaptive search did not converge
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::size_t offset = npos)
      : std::runtime_error(message), code_(code), offset_(offset) {}

  ErrorCode code() const noexcept { return code_; }
  /// Byte offset into the parsed source, or npos when not applicable.
  std::size_t offset() const noexcept { return offset_; }

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  ErrorCode code_;
  std::size_t offset_;
};

}  // namespace dualfront
