#pragma once

#include <stdexcept>
#include <string>

namespace aksz {

/// Shapes or labels that do not fit together (wrong dimensions, unknown basis labels).
class StructuralError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An algebraic identity that must hold exactly failed (d∘d ≠ 0, anticommutation, ...).
class IntegrityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The input does not satisfy the hypothesis of a check.
class HypothesisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Rejected configuration text; `path` points at the offending JSON node.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

}  // namespace aksz
