#pragma once

#include <string>
#include <vector>

#include "corgii/index.hpp"

namespace corgii {

struct CorpusStats {
  std::vector<int> token_rank;       // posting lengths of nonempty tokens, descending
  std::vector<int> doc_rank;         // unique-token counts per graph, descending
  std::vector<Token> tokens;         // nonempty tokens, ascending; rows of cooc
  std::vector<std::vector<int>> cooc;  // |pl(a) ∩ pl(b)| over `tokens`
  std::vector<double> sigma;         // singular values of the posting matrix, descending
  int effective_rank = 0;
  int actual_rank = 0;
};

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, descending.
std::vector<double> symmetric_eigenvalues(std::vector<std::vector<double>> a);

/// Size of the intersection of two ascending id lists.
int intersection_size(const std::vector<int>& a, const std::vector<int>& b);

/// Smallest K whose leading energy fraction sum_{i<=K} s_i^2 / sum s_i^2
/// exceeds gamma. Throws for gamma outside (0, 1).
int effective_rank(const std::vector<double>& sigma, double gamma);

CorpusStats compute_stats(const InvertedIndex& index, double gamma = 0.95);

/// Writes token_rank.csv, doc_rank.csv and spectrum.csv into `dir`.
void write_stats_csv(const CorpusStats& stats, const std::string& dir);

}  // namespace corgii
