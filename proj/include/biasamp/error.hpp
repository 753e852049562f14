#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace biasamp {

enum class ErrorCode {
  InvalidArgument = 1,
  NoConvergence = 2,
  Singular = 3,
  Io = 4,
  Parse = 5,
  Undefined = 6,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Solver gave up; carries the best residual it reached.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, double residual, int iters)
      : Error(ErrorCode::NoConvergence, what + " (residual " + std::to_string(residual) + " after " +
                                            std::to_string(iters) + " iterations)"),
        residual_(residual),
        iters_(iters) {}
  double residual() const noexcept { return residual_; }
  int iters() const noexcept { return iters_; }

 private:
  double residual_;
  int iters_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) { throw Error(code, msg); }

inline void require(bool ok, const std::string& msg) {
  if (!ok) fail(ErrorCode::InvalidArgument, msg);
}

// Warnings (lambda floor substitution etc). Default sink writes to stderr.
using LogSink = std::function<void(const std::string&)>;
void set_log_sink(LogSink sink);
void warn(const std::string& msg);

}  // namespace biasamp
