#pragma once

#include <stdexcept>
#include <string>

namespace sentcomp {

// Bad parameters or unusable inputs supplied by the caller.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed files or text.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

class GrammarError : public std::runtime_error {
 public:
  explicit GrammarError(const std::string& what) : std::runtime_error(what) {}
};

// A solution vector that cannot be read back as a compression.
class DecodeError : public std::runtime_error {
 public:
  explicit DecodeError(const std::string& what) : std::runtime_error(what) {}
};

// A binary solution whose context variables disagree with its word choices.
class IntegrityError : public std::runtime_error {
 public:
  explicit IntegrityError(const std::string& what) : std::runtime_error(what) {}
};

class InfeasibleError : public std::runtime_error {
 public:
  explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

// Violated precondition inside the solver stack; indicates a caller bug.
class InternalError : public std::logic_error {
 public:
  explicit InternalError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace sentcomp
