#pragma once

#include <stdexcept>
#include <string>

namespace pickands {

enum class ErrorCode {
  invalid_argument = 1,
  out_of_range = 2,
  domain = 3,
  model = 4,
  unsupported = 5,
  insufficient_data = 6,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline void require(bool cond, ErrorCode code, const std::string& msg) {
  if (!cond) throw Error(code, msg);
}

}  // namespace pickands
