#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "tradenet/dynamics.hpp"
#include "tradenet/market.hpp"

namespace tradenet {

// Accept/reject record of a two-agent run: rows[t][c] is 'A' if the c-th
// responder demanded trade t (matched the counterpart's offer), 'R' otherwise.
struct ArRows {
  std::vector<std::string> rows;

  std::size_t num_columns() const { return rows.empty() ? 0 : rows.front().size(); }
  // Columns [first, first + count) of every row.
  ArRows Slice(std::size_t first, std::size_t count) const;
};

// Needs recorded steps. DomainError unless the market has two agents.
ArRows ComputeArRows(const Market& market, const DynamicsTrace& trace);

struct FragmentMatch {
  std::size_t column = 0;  // 1-based first column of the window
  int fragment = 0;        // 1..5, in the order listed in ar_rows.cpp
  bool swapped = false;    // matched with the rows exchanged
};

// Scans every three-column window for the five fragments that cannot occur in
// a cycle of a fully substitutable buyer/seller pair with two trades, in both
// row orders. At most one match is reported per window. With `cyclic`, windows
// wrap around the end (the rows are one period of a cycle). DomainError unless
// there are exactly two rows of equal length.
std::vector<FragmentMatch> CheckFragments(const ArRows& rows, bool cyclic = false);

}  // namespace tradenet
