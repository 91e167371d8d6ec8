#include "hypre/predictor.hpp"

#include <stdexcept>

namespace hypre {

std::string Source::label() const {
  switch (kind) {
    case SourceKind::kTable:
      return "table:" + std::to_string(length);
    case SourceKind::kBase:
      return "base";
    case SourceKind::kBaseFallback:
      return "fallback";
  }
  return "?";
}

std::uint64_t StorageBreakdown::total() const {
  std::uint64_t sum = 0;
  for (const auto& item : items) sum += item.bits;
  return sum;
}

void CallSequenceGuard::on_predict(std::uint64_t pc) {
  if (pending_) throw std::logic_error("predict called twice without an update");
  pending_ = true;
  pc_ = pc;
}

void CallSequenceGuard::on_update(std::uint64_t pc) {
  if (!pending_) throw std::logic_error("update without a preceding predict");
  if (pc != pc_) throw std::logic_error("update pc does not match the predicted branch");
  pending_ = false;
}

}  // namespace hypre
