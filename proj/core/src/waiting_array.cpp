#include "twa/waiting_array.hpp"

#include <bit>
#include <stdexcept>

namespace twa {

namespace {

unsigned checked_log2(std::size_t slots) {
  if (!std::has_single_bit(slots))
    throw std::invalid_argument("waiting array size must be a power of two");
  return static_cast<unsigned>(std::countr_zero(slots));
}

}  // namespace

WaitingArray::WaitingArray(std::size_t slots)
    : log2_slots_(checked_log2(slots)), slots_(std::make_unique<WaitSlot[]>(slots)) {}

WaitingArray& WaitingArray::shared() {
  // Leaked: waiters may still be parked on it during static destruction.
  static auto* array = new WaitingArray;
  return *array;
}

}  // namespace twa
