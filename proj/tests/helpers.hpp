#pragma once

#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "causal_cues/dataset.hpp"
#include "causal_cues/error.hpp"

namespace testing {

// Binary-or-wider dataset from row-major rows; cardinality is max + 1, at least 2.
inline causal_cues::Dataset make_dataset(const std::vector<std::string>& names,
                                         const std::vector<std::vector<std::uint32_t>>& rows) {
  std::vector<std::vector<std::uint32_t>> cols(names.size());
  std::vector<std::size_t> cards(names.size(), 2);
  for (const auto& r : rows) {
    for (std::size_t j = 0; j < names.size(); ++j) {
      cols[j].push_back(r[j]);
      if (r[j] + 1 > cards[j]) cards[j] = r[j] + 1;
    }
  }
  return causal_cues::Dataset(names, cards, cols);
}

// Repeats each row count[i] times.
inline causal_cues::Dataset weighted_dataset(const std::vector<std::string>& names,
                                             const std::vector<std::vector<std::uint32_t>>& rows,
                                             const std::vector<std::size_t>& counts) {
  std::vector<std::vector<std::uint32_t>> out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t k = 0; k < counts[i]; ++k) out.push_back(rows[i]);
  }
  return make_dataset(names, out);
}

inline causal_cues::Dataset parse(const std::string& csv, const causal_cues::LoadOptions& opts = {}) {
  std::istringstream in(csv);
  return causal_cues::read_csv(in, opts);
}

template <class F>
causal_cues::ErrorCode error_of(F&& f) {
  try {
    f();
  } catch (const causal_cues::CausalError& e) {
    return e.code();
  }
  throw std::runtime_error("expected a CausalError");
}

template <class F>
std::string message_of(F&& f) {
  try {
    f();
  } catch (const causal_cues::CausalError& e) {
    return e.what();
  }
  throw std::runtime_error("expected a CausalError");
}

}  // namespace testing
