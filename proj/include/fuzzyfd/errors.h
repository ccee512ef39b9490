#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace fuzzyfd {

// Bad input data or configuration: unreadable files, malformed documents,
// invalid flags. The CLI maps these to exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A configuration that cannot work at all, e.g. an embedding service whose
// vectors disagree with the configured dimension.
class ConfigError : public InputError {
 public:
  using InputError::InputError;
};

// A transient failure talking to an external service. Carries the texts of
// the batch that failed so callers can resubmit them.
class RetriableError : public std::runtime_error {
 public:
  RetriableError(const std::string& what, std::vector<std::string> failed_batch)
      : std::runtime_error(what), failed_batch_(std::move(failed_batch)) {}

  const std::vector<std::string>& failed_batch() const { return failed_batch_; }

 private:
  std::vector<std::string> failed_batch_;
};

// Broken internal invariant or a violated operation precondition.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Work was abandoned because it ran past its deadline.
class DeadlineExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fuzzyfd
