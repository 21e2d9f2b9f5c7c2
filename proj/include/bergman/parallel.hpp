#pragma once

#include <cstddef>
#include <functional>

namespace bergman {

/// Process-wide cap on worker threads; 0 restores the hardware default.
void set_max_threads(unsigned count);
unsigned max_threads();

/// Calls body(i) for i in [0, count), split into contiguous chunks over at most
/// max_threads() workers. body must only write state owned by index i.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

} // namespace bergman
