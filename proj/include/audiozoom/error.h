#ifndef AUDIOZOOM_ERROR_H_
#define AUDIOZOOM_ERROR_H_

#include <stdexcept>
#include <string>

namespace azoom {

// Thrown for invalid inputs and numerical failures. The CLI maps it to the
// "data error" exit status.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace azoom

#endif  // AUDIOZOOM_ERROR_H_
