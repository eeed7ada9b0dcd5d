#pragma once

#include <stdexcept>
#include <string>

namespace enf {

// Library-wide error type. The CLI maps pipeline stages to exit codes; the
// library itself just throws with a descriptive message.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw Error(msg);
}

}  // namespace enf
