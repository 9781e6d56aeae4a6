#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "poa/types.hpp"

namespace poa {

/// Ordered sealer committee. Position in the list is the rotation index.
class Committee {
 public:
  Committee() = default;
  /// Throws std::invalid_argument on an empty list or duplicate ids.
  explicit Committee(std::vector<NodeId> sealers);

  /// Committee of nodes 0..n-1.
  static Committee of_size(std::size_t n);

  std::size_t size() const { return sealers_.size(); }
  NodeId at(std::size_t index) const { return sealers_.at(index); }
  std::optional<std::size_t> index_of(NodeId id) const;
  bool contains(NodeId id) const { return index_of(id).has_value(); }
  std::span<const NodeId> sealers() const { return sealers_; }

 private:
  std::vector<NodeId> sealers_;
};

}  // namespace poa
