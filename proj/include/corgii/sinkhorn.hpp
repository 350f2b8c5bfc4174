#pragma once

#include "corgii/diff.hpp"

namespace corgii {

/// Soft permutation from square logits: P0 = exp(logits / temp), then `iters`
/// rounds of column normalization followed by row normalization. Computed in
/// the log domain, so large logits neither overflow nor underflow to 0.
diff::Var sinkhorn(diff::Var logits, double temp, int iters);
diff::Tensor sinkhorn(const diff::Tensor& logits, double temp, int iters);

}  // namespace corgii
