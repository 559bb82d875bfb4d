#include <algorithm>

#include "webqa/errors.hpp"
#include "webqa/synth.hpp"

namespace webqa {

std::vector<Partition> ordered_partitions(std::size_t n, std::size_t cap) {
  if (n == 0) throw ContractViolation("ordered_partitions needs at least one example");
  if (n > cap) {
    throw CapExceeded("refusing to enumerate ordered partitions of " + std::to_string(n) +
                      " examples (cap " + std::to_string(cap) + "); label fewer pages or raise max_examples");
  }
  std::vector<Partition> out;
  for (std::size_t k = 1; k <= n; ++k) {
    std::vector<Partition> with_k;
    std::vector<std::size_t> assign(n, 0);
    while (true) {
      Partition blocks(k);
      for (std::size_t i = 0; i < n; ++i) blocks[assign[i]].push_back(i);
      if (std::none_of(blocks.begin(), blocks.end(), [](const auto& b) { return b.empty(); })) {
        with_k.push_back(std::move(blocks));
      }
      std::size_t pos = 0;
      while (pos < n && ++assign[pos] == k) assign[pos++] = 0;
      if (pos == n) break;
    }
    std::sort(with_k.begin(), with_k.end());
    out.insert(out.end(), std::make_move_iterator(with_k.begin()), std::make_move_iterator(with_k.end()));
  }
  return out;
}

}  // namespace webqa
