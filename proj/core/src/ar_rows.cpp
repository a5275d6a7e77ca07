#include "tradenet/ar_rows.hpp"

#include <array>

#include "tradenet/errors.hpp"

namespace tradenet {
namespace {

struct Fragment {
  const char* top;
  const char* bottom;
};

// '*' matches either letter.
constexpr std::array<Fragment, 5> kFragments = {{
    {"AAR", "AR*"},
    {"RAA", "RR*"},
    {"AAR", "*AR"},
    {"RRA", "ARA"},
    {"RAR", "RRA"},
}};

bool Matches(const char* pattern, const std::array<char, 3>& window) {
  for (int c = 0; c < 3; ++c) {
    if (pattern[c] != '*' && pattern[c] != window[c]) return false;
  }
  return true;
}

}  // namespace

ArRows ArRows::Slice(std::size_t first, std::size_t count) const {
  ArRows out;
  for (const std::string& row : rows) out.rows.push_back(row.substr(first, count));
  return out;
}

ArRows ComputeArRows(const Market& market, const DynamicsTrace& trace) {
  if (market.num_agents() != 2) throw DomainError("A/R rows need a two-agent market");
  const std::size_t expected =
      trace.satisfied_series.empty() ? 0 : trace.satisfied_series.size() - 1;
  if (trace.steps.size() != expected) {
    throw DomainError("trace does not have every best response recorded");
  }
  ArRows out;
  out.rows.assign(market.num_trades(), std::string(trace.steps.size(), 'R'));
  for (std::size_t c = 0; c < trace.steps.size(); ++c) {
    const TraceStep& step = trace.steps[c];
    for (TradeIdx t = 0; t < market.num_trades(); ++t) {
      const auto local = market.LocalIndex(step.agent, t);
      if (local && (step.demanded & (1U << *local))) out.rows[t][c] = 'A';
    }
  }
  return out;
}

std::vector<FragmentMatch> CheckFragments(const ArRows& rows, bool cyclic) {
  if (rows.rows.size() != 2) throw DomainError("fragment check needs exactly two rows");
  const std::string& top = rows.rows[0];
  const std::string& bottom = rows.rows[1];
  if (top.size() != bottom.size()) throw DomainError("A/R rows differ in length");
  const std::size_t n = top.size();
  std::vector<FragmentMatch> out;
  if (n == 0 || (!cyclic && n < 3)) return out;
  const std::size_t windows = cyclic ? n : n - 2;
  for (std::size_t s = 0; s < windows; ++s) {
    std::array<char, 3> a{};
    std::array<char, 3> b{};
    for (std::size_t c = 0; c < 3; ++c) {
      a[c] = top[(s + c) % n];
      b[c] = bottom[(s + c) % n];
    }
    for (int f = 0; f < static_cast<int>(kFragments.size()); ++f) {
      const Fragment& frag = kFragments[f];
      if (Matches(frag.top, a) && Matches(frag.bottom, b)) {
        out.push_back({s + 1, f + 1, false});
        break;
      }
      if (Matches(frag.top, b) && Matches(frag.bottom, a)) {
        out.push_back({s + 1, f + 1, true});
        break;
      }
    }
  }
  return out;
}

}  // namespace tradenet
