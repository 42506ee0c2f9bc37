#include "ordrobust/isotonic.hpp"

#include <vector>

namespace ordrobust {

Vec pav_nondecreasing(const Vec& values, const Vec& weights) {
  const int n = static_cast<int>(values.size());
  if (n == 0) return values;
  struct Block {
    double mean;
    double weight;
    int count;
  };
  std::vector<Block> blocks;
  blocks.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double w = weights.size() == n ? weights(i) : 1.0;
    blocks.push_back({values(i), w, 1});
    while (blocks.size() >= 2 && blocks[blocks.size() - 2].mean > blocks.back().mean) {
      const Block top = blocks.back();
      blocks.pop_back();
      Block& prev = blocks.back();
      const double total = prev.weight + top.weight;
      prev.mean = (prev.mean * prev.weight + top.mean * top.weight) / total;
      prev.weight = total;
      prev.count += top.count;
    }
  }
  Vec out(n);
  int idx = 0;
  for (const Block& b : blocks) {
    for (int i = 0; i < b.count; ++i) out(idx++) = b.mean;
  }
  return out;
}

}  // namespace ordrobust
