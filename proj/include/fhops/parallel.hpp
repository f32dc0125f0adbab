#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

namespace fhops::par {

// Clamp a requested worker count to [1, 256]. A request of 0 means "one
// worker per hardware thread".
int resolve_threads(int requested);

// Splits [begin, end) into at most `pieces` contiguous half-open ranges of
// near-equal length. The split depends only on the range and `pieces`, never
// on the worker count, so reductions that merge piece results in index order
// stay bit-identical across thread counts.
std::vector<std::pair<std::int64_t, std::int64_t>> split_range(
    std::int64_t begin, std::int64_t end, std::int64_t pieces);

// Runs fn(piece_index) for every piece_index in [0, piece_count) on `threads`
// workers. fn must only touch state owned by its piece index. Exceptions
// thrown by fn are captured and rethrown on the calling thread.
void for_pieces(std::int64_t piece_count, int threads,
                const std::function<void(std::int64_t)>& fn);

}  // namespace fhops::par
