#pragma once

#include <stdexcept>
#include <string>

namespace varlab {

// Failure classes. The CLI maps them onto exit codes; library code throws.
enum class ErrorCode {
  contract,            // programming error: dimension/space mismatch, bad arguments
  degenerate_oracle,   // J == 0 (sup J <= 0): nothing to find
  beta_star_infinite,  // ratio J/|x|^2 unbounded above
  empty_interval,      // alpha* >= beta*
  lambda_outside,      // lambda not in the admissible interval
  hypothesis_violated, // finite-instance hypothesis gate
  no_barrier,          // mountain pass found no separating ridge
  no_convergence,      // iterative solver gave up
  descent_blocked,     // decomposable oracle could not decrease J
  parse,               // malformed config or input file
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  // Refusals are hypothesis gates, not failures of the machinery.
  bool is_refusal() const noexcept {
    return code_ == ErrorCode::degenerate_oracle || code_ == ErrorCode::beta_star_infinite ||
           code_ == ErrorCode::empty_interval || code_ == ErrorCode::lambda_outside ||
           code_ == ErrorCode::hypothesis_violated;
  }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool condition, const std::string& what) {
  if (!condition) fail(ErrorCode::contract, what);
}

}  // namespace varlab
