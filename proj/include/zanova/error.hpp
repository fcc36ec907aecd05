#ifndef ZANOVA_ERROR_HPP
#define ZANOVA_ERROR_HPP

#include <stdexcept>
#include <string>

namespace zanova {

/// Malformed or inconsistent experiment configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation produced a non-finite value or an unsolvable system.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace zanova

#endif
