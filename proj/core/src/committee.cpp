#include "poa/committee.hpp"

#include <algorithm>
#include <stdexcept>

namespace poa {

Committee::Committee(std::vector<NodeId> sealers) : sealers_(std::move(sealers)) {
  if (sealers_.empty()) throw std::invalid_argument("committee must not be empty");
  auto sorted = sealers_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::invalid_argument("committee has duplicate sealers");
  for (NodeId id : sealers_)
    if (!id.valid()) throw std::invalid_argument("committee has an invalid sealer id");
}

Committee Committee::of_size(std::size_t n) {
  std::vector<NodeId> ids;
  ids.reserve(n);
  for (std::size_t i = 0; i < n; ++i) ids.emplace_back(static_cast<std::uint32_t>(i));
  return Committee(std::move(ids));
}

std::optional<std::size_t> Committee::index_of(NodeId id) const {
  for (std::size_t i = 0; i < sealers_.size(); ++i)
    if (sealers_[i] == id) return i;
  return std::nullopt;
}

}  // namespace poa
