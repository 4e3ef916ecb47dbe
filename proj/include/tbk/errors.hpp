#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace tbk {

// Invalid parameters or inputs outside an operation's domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Requested size exceeds a dense/eigen/BFS capacity limit.
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

// An iterative numeric procedure failed; carries the iteration trace.
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, std::vector<std::string> trace)
      : std::runtime_error(what), trace_(std::move(trace)) {}

  const std::vector<std::string>& trace() const noexcept { return trace_; }

 private:
  std::vector<std::string> trace_;
};

}  // namespace tbk
