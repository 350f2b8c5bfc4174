#include "corgii/stats.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <stdexcept>

namespace corgii {

std::vector<double> symmetric_eigenvalues(std::vector<std::vector<double>> a) {
  const int n = static_cast<int>(a.size());
  for (const auto& row : a) {
    if (static_cast<int>(row.size()) != n) throw std::invalid_argument("symmetric_eigenvalues: matrix not square");
  }
  auto off_norm = [&] {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) s += a[i][j] * a[i][j];
    }
    return s;
  };
  double scale = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) scale += a[i][j] * a[i][j];
  }
  const double tol = 1e-26 * std::max(scale, 1e-300);
  for (int sweep = 0; sweep < 100 && off_norm() > tol; ++sweep) {
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a[p][q];
        if (std::fabs(apq) < 1e-300) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        a[p][q] = a[q][p] = 0.0;
      }
    }
  }
  std::vector<double> eig(n);
  for (int i = 0; i < n; ++i) eig[i] = a[i][i];
  std::sort(eig.begin(), eig.end(), std::greater<>());
  return eig;
}

int intersection_size(const std::vector<int>& a, const std::vector<int>& b) {
  int n = 0;
  auto i = a.begin(), j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++n;
      ++i;
      ++j;
    }
  }
  return n;
}

int effective_rank(const std::vector<double>& sigma, double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in (0, 1)");
  double total = 0.0;
  for (double s : sigma) total += s * s;
  if (total <= 0.0) return 0;
  double acc = 0.0;
  for (std::size_t k = 0; k < sigma.size(); ++k) {
    acc += sigma[k] * sigma[k];
    if (acc / total > gamma) return static_cast<int>(k + 1);
  }
  return static_cast<int>(sigma.size());
}

CorpusStats compute_stats(const InvertedIndex& index, double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in (0, 1)");
  CorpusStats st;
  for (Token t = 0; t < index.vocabulary(); ++t) {
    if (!index.posting(t).empty()) {
      st.tokens.push_back(t);
      st.token_rank.push_back(static_cast<int>(index.posting(t).size()));
    }
  }
  std::sort(st.token_rank.begin(), st.token_rank.end(), std::greater<>());
  for (int i = 0; i < index.corpus_size(); ++i) st.doc_rank.push_back(static_cast<int>(index.doc_tokens(i).size()));
  std::sort(st.doc_rank.begin(), st.doc_rank.end(), std::greater<>());

  const int k = static_cast<int>(st.tokens.size());
  st.cooc.assign(k, std::vector<int>(k, 0));
  std::vector<std::vector<double>> gram(k, std::vector<double>(k, 0.0));
  for (int i = 0; i < k; ++i) {
    for (int j = i; j < k; ++j) {
      const int v = intersection_size(index.posting(st.tokens[i]), index.posting(st.tokens[j]));
      st.cooc[i][j] = st.cooc[j][i] = v;
      gram[i][j] = gram[j][i] = v;
    }
  }
  // The Gram matrix PL PL^T is positive semidefinite; its eigenvalues are the
  // squared singular values of the posting matrix.
  const auto eig = symmetric_eigenvalues(std::move(gram));
  const double top = eig.empty() ? 0.0 : std::max(eig.front(), 0.0);
  for (double e : eig) {
    const double s = std::sqrt(std::max(e, 0.0));
    st.sigma.push_back(s);
    if (e > 1e-9 * top && e > 1e-12) ++st.actual_rank;
  }
  st.effective_rank = effective_rank(st.sigma, gamma);
  return st;
}

void write_stats_csv(const CorpusStats& stats, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream out(fs::path(dir) / name);
    if (!out) throw std::runtime_error("cannot write " + (fs::path(dir) / name).string());
    return out;
  };
  {
    auto out = open("token_rank.csv");
    out << "rank,length\n";
    for (std::size_t i = 0; i < stats.token_rank.size(); ++i) out << i + 1 << ',' << stats.token_rank[i] << '\n';
  }
  {
    auto out = open("doc_rank.csv");
    out << "rank,fill\n";
    for (std::size_t i = 0; i < stats.doc_rank.size(); ++i) out << i + 1 << ',' << stats.doc_rank[i] << '\n';
  }
  auto out = open("spectrum.csv");
  out << "i,sigma\n";
  out.precision(17);
  for (std::size_t i = 0; i < stats.sigma.size(); ++i) out << i + 1 << ',' << stats.sigma[i] << '\n';
}

}  // namespace corgii
