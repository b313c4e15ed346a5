#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace attackqa::kernels {

/// Row-major n x dim matrix with precomputed row norms.
struct Matrix {
    std::vector<double> data;
    std::vector<double> norms;
    std::size_t rows = 0;
    std::size_t dim = 0;

    std::span<const double> row(std::size_t i) const { return {data.data() + i * dim, dim}; }
};

double norm(std::span<const double> v) noexcept;
double dot(std::span<const double> a, std::span<const double> b) noexcept;

/// Cosine of q against every row; 0 where either norm is 0. `out` has rows entries.
void cosine_scores_serial(const Matrix& m, std::span<const double> q, std::span<double> out);
void cosine_scores_omp(const Matrix& m, std::span<const double> q, std::span<double> out);

struct Hit {
    std::size_t row;
    double score;
};

/// Best min(k, rows) rows: score descending, then `ids[row]` ascending.
std::vector<Hit> top_k(std::span<const double> scores, const std::vector<std::string>& ids,
                       std::size_t k);

/// Top-k for many queries. The OpenMP version splits queries across threads.
std::vector<std::vector<Hit>> rank_batch_serial(const Matrix& m,
                                                const std::vector<std::string>& ids,
                                                const std::vector<std::vector<double>>& queries,
                                                std::size_t k);
std::vector<std::vector<Hit>> rank_batch_omp(const Matrix& m, const std::vector<std::string>& ids,
                                             const std::vector<std::vector<double>>& queries,
                                             std::size_t k);

}  // namespace attackqa::kernels
