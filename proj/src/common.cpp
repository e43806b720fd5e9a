#include "causal_cues/error.hpp"
#include "causal_cues/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace causal_cues {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMissingFile: return "MissingFile";
    case ErrorCode::kRaggedRow: return "RaggedRow";
    case ErrorCode::kUnparseableCell: return "UnparseableCell";
    case ErrorCode::kCardinalityViolation: return "CardinalityViolation";
    case ErrorCode::kMissingValue: return "MissingValue";
    case ErrorCode::kUnknownColumn: return "UnknownColumn";
    case ErrorCode::kDuplicateColumn: return "DuplicateColumn";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kDomainError: return "DomainError";
    case ErrorCode::kOverlappingArguments: return "OverlappingArguments";
    case ErrorCode::kDuplicateNode: return "DuplicateNode";
    case ErrorCode::kUnknownNode: return "UnknownNode";
    case ErrorCode::kNotADag: return "NotADag";
    case ErrorCode::kMissingSepset: return "MissingSepset";
    case ErrorCode::kNodeSetMismatch: return "NodeSetMismatch";
    case ErrorCode::kUnresolvedUndirectedEdge: return "UnresolvedUndirectedEdge";
    case ErrorCode::kTooManyNodes: return "TooManyNodes";
    case ErrorCode::kDegenerateTreatment: return "DegenerateTreatment";
    case ErrorCode::kNonBinaryTarget: return "NonBinaryTarget";
    case ErrorCode::kSingularFit: return "SingularFit";
    case ErrorCode::kInvalidSpec: return "InvalidSpec";
    case ErrorCode::kStateSpaceTooLarge: return "StateSpaceTooLarge";
    case ErrorCode::kUnknownFixture: return "UnknownFixture";
    case ErrorCode::kMalformedJson: return "MalformedJson";
  }
  return "Unknown";
}

std::size_t thread_count() {
  if (const char* env = std::getenv("CAUSAL_CUES_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min(thread_count(), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace causal_cues
