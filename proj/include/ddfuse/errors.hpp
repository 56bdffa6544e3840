#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ddfuse {

/// Root of every error the library throws on bad input or undefined math.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A value violates a type invariant (degenerate box, score outside [0,1],
/// masses that do not sum to one, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Wrong frame arity, or evidences defined on different frames.
class FrameError : public Error {
 public:
  using Error::Error;
};

/// Mass on a structure an operation does not handle (e.g. a non-singleton
/// proper subset passed to compatibility weighting).
class UnsupportedStructureError : public Error {
 public:
  using Error::Error;
};

/// Dempster's rule is undefined when all product mass lands on the empty set.
class TotalConflictError : public Error {
 public:
  explicit TotalConflictError(double conflict)
      : Error("total conflict between evidences (K = " +
              std::to_string(1.0 - conflict) + ")"),
        conflict_(conflict) {}
  double conflict() const { return conflict_; }

 private:
  double conflict_;
};

class PlacementError : public Error {
 public:
  using Error::Error;
};

/// Scenes present in one detection set but not the other.
class PairingError : public Error {
 public:
  explicit PairingError(std::vector<std::string> ids);
  const std::vector<std::string>& missing_ids() const { return ids_; }

 private:
  std::vector<std::string> ids_;
};

/// Malformed input file. `where` is a line number or a field path.
class ParseError : public Error {
 public:
  ParseError(const std::string& where, const std::string& what)
      : Error(where + ": " + what) {}
};

inline PairingError::PairingError(std::vector<std::string> ids)
    : Error([&] {
        std::string msg = "unpaired image ids:";
        for (const auto& id : ids) msg += " " + id;
        return msg;
      }()),
      ids_(std::move(ids)) {}

}  // namespace ddfuse
