#include "dsr/node_data.hpp"

#include <algorithm>

namespace dsr {

LabelVector LabelVector::from_ids(std::vector<std::size_t> ids) {
  LabelVector labels;
  labels.classes = ids.empty() ? 0 : *std::max_element(ids.begin(), ids.end()) + 1;
  labels.ids = std::move(ids);
  return labels;
}

}  // namespace dsr
