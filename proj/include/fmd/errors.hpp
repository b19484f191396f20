#pragma once

#include <stdexcept>
#include <string>

namespace fmd {

/// Thrown when a numeric routine cannot produce a result (e.g. a kernel
/// matrix that stays indefinite after jitter escalation).
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown by file readers; carries the 1-based row/column of the offending cell.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, long row, long col)
      : std::runtime_error(what + " (row " + std::to_string(row) + ", column " +
                           std::to_string(col) + ")"),
        row_(row),
        col_(col) {}

  long row() const { return row_; }
  long col() const { return col_; }

 private:
  long row_;
  long col_;
};

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fmd
