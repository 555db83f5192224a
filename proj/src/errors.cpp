#include "varlab/errors.hpp"

namespace varlab {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::contract: return "contract";
    case ErrorCode::degenerate_oracle: return "degenerate_oracle";
    case ErrorCode::beta_star_infinite: return "beta_star_infinite";
    case ErrorCode::empty_interval: return "empty_interval";
    case ErrorCode::lambda_outside: return "lambda_outside";
    case ErrorCode::hypothesis_violated: return "hypothesis_violated";
    case ErrorCode::no_barrier: return "no_barrier";
    case ErrorCode::no_convergence: return "no_convergence";
    case ErrorCode::descent_blocked: return "descent_blocked";
    case ErrorCode::parse: return "parse";
  }
  return "contract";
}

}  // namespace varlab
