#pragma once

#include <optional>
#include <vector>

namespace corgii {

/// AP = (1/|relevant|) sum over ranks r of Prec@r * rel(r). Relevant items
/// missing from the ranking contribute nothing. Returns nullopt when
/// `relevant` is empty, so the caller can exclude the query.
std::optional<double> average_precision(const std::vector<int>& ranked, const std::vector<int>& relevant);

}  // namespace corgii
