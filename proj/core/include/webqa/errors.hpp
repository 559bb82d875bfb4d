#pragma once

#include <stdexcept>
#include <string>

namespace webqa {

// Base of every error the toolkit raises on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller broke a documented precondition (bad input, malformed file, bad flags).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

// Unknown node id, page id, or similar lookup miss.
class LookupError : public ContractViolation {
 public:
  using ContractViolation::ContractViolation;
};

// Input bytes that are not valid UTF-8.
class DecodeError : public ContractViolation {
 public:
  using ContractViolation::ContractViolation;
};

// Inconsistent configuration, e.g. an entity label outside the vocabulary.
class ConfigError : public ContractViolation {
 public:
  using ContractViolation::ContractViolation;
};

// A predicate provider failed (transport, decoding, non-200 status).
class ProviderError : public Error {
 public:
  using Error::Error;
};

// A configured size limit was hit (partition cap, oracle space cap, expansion cap).
class CapExceeded : public Error {
 public:
  using Error::Error;
};

}  // namespace webqa
