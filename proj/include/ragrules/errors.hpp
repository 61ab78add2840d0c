#pragma once

#include <stdexcept>
#include <string>

namespace ragrules {

// Bad configuration: unknown kinds, missing fields, scripted-model misses.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The model could not produce an output (transport, HTTP status, body shape).
class InferenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A predicate could not reach a 0/1 verdict. Never the same thing as a 0.
class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Exhaustive enumeration refused because the input is too large.
class RefusalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class LoadError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ragrules
