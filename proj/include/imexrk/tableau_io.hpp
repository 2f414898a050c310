#pragma once

#include "imexrk/tableau.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

namespace imexrk {

/// Raised for malformed or invalid tableau text. Line and entry are 1-based;
/// zero means "not tied to a location".
class TableauError : public std::runtime_error {
 public:
  TableauError(const std::string& what, int line = 0, int entry = 0)
      : std::runtime_error(what), line_(line), entry_(entry) {}
  int line() const { return line_; }
  int entry() const { return entry_; }

 private:
  int line_;
  int entry_;
};

/// Reads the text format:
///
///     # comment
///     s
///     a_11 ... a_1s        (s implicit rows)
///     ...
///     ahat_11 ... ahat_1s  (s explicit rows)
///
/// Entries are decimal literals or integer fractions `p/q`. b and bhat are
/// the last rows; c is taken from the implicit row sums.
ButcherPaird parse_tableau(std::string_view text);

ButcherPaird read_tableau_file(const std::filesystem::path& path);

/// Writes the text format with round-trip exact decimals.
std::string render_tableau(const ButcherPaird& pair, std::string_view comment = {});

}  // namespace imexrk
