#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pss {

/// Invalid problem, set, or rule parameters detected at construction time.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A non-finite coordinate reached an oracle boundary.
class NonFiniteInput : public ConfigError {
 public:
  NonFiniteInput(const std::string& where, std::size_t coordinate)
      : ConfigError(where + ": non-finite value at coordinate " + std::to_string(coordinate)),
        coordinate_(coordinate) {}

  std::size_t coordinate() const noexcept { return coordinate_; }

 private:
  std::size_t coordinate_;
};

/// A precondition of the iteration was violated while running (e.g. an iterate left dom(g)).
class ContractViolation : public std::runtime_error {
 public:
  ContractViolation(const std::string& what, std::size_t iteration)
      : std::runtime_error(what + " (iteration " + std::to_string(iteration) + ")"),
        iteration_(iteration) {}

  std::size_t iteration() const noexcept { return iteration_; }

 private:
  std::size_t iteration_;
};

}  // namespace pss
