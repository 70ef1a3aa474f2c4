// SPDX-License-Identifier: Apache-2.0
#include "faultfs/hdf5/field_map.hpp"

#include <algorithm>
#include <stdexcept>

namespace faultfs::hdf5 {

FieldMap build_field_map(const Hdf5Model& model) {
  std::vector<FieldSpan> parsed = model.fields;
  std::stable_sort(parsed.begin(), parsed.end(),
                   [](const FieldSpan& a, const FieldSpan& b) { return a.offset < b.offset; });

  FieldMap map;
  map.size = model.metadata_size;
  std::uint64_t cur = 0;
  for (FieldSpan s : parsed) {
    if (s.end() <= cur || s.offset >= map.size) continue;
    if (s.offset > cur) map.spans.push_back({"gap", cur, s.offset - cur, FieldRole::Reserved});
    if (s.offset < cur) {
      s.length -= cur - s.offset;
      s.offset = cur;
    }
    s.length = std::min(s.length, map.size - s.offset);
    cur = s.end();
    map.spans.push_back(std::move(s));
  }
  if (cur < map.size) map.spans.push_back({"gap", cur, map.size - cur, FieldRole::Reserved});
  return map;
}

const FieldSpan& FieldMap::at(std::uint64_t offset) const {
  auto it = std::upper_bound(spans.begin(), spans.end(), offset,
                             [](std::uint64_t o, const FieldSpan& s) { return o < s.offset; });
  if (it == spans.begin() || offset >= size) {
    throw std::out_of_range("offset " + std::to_string(offset) + " outside metadata");
  }
  return *std::prev(it);
}

std::uint64_t FieldMap::bytes_with(FieldRole role) const {
  std::uint64_t n = 0;
  for (const FieldSpan& s : spans) {
    if (s.role == role) n += s.length;
  }
  return n;
}

}  // namespace faultfs::hdf5
