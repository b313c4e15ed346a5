#include "attackqa/retrieval/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace attackqa::kernels {

double norm(std::span<const double> v) noexcept { return std::sqrt(dot(v, v)); }

double dot(std::span<const double> a, std::span<const double> b) noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

namespace {

inline double cosine_row(const Matrix& m, std::size_t r, std::span<const double> q, double qn) {
    const double rn = m.norms[r];
    if (rn == 0.0 || qn == 0.0) return 0.0;
    return dot(m.row(r), q) / (rn * qn);
}

}  // namespace

void cosine_scores_serial(const Matrix& m, std::span<const double> q, std::span<double> out) {
    const double qn = norm(q);
    for (std::size_t r = 0; r < m.rows; ++r) out[r] = cosine_row(m, r, q, qn);
}

void cosine_scores_omp(const Matrix& m, std::span<const double> q, std::span<double> out) {
    const double qn = norm(q);
    const auto rows = static_cast<std::ptrdiff_t>(m.rows);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t r = 0; r < rows; ++r) {
        out[static_cast<std::size_t>(r)] = cosine_row(m, static_cast<std::size_t>(r), q, qn);
    }
}

std::vector<Hit> top_k(std::span<const double> scores, const std::vector<std::string>& ids,
                       std::size_t k) {
    std::vector<Hit> hits(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) hits[i] = Hit{i, scores[i]};
    const auto take = std::min(k, hits.size());
    auto better = [&](const Hit& a, const Hit& b) {
        if (a.score != b.score) return a.score > b.score;
        return ids[a.row] < ids[b.row];
    };
    std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(take), hits.end(),
                      better);
    hits.resize(take);
    return hits;
}

std::vector<std::vector<Hit>> rank_batch_serial(const Matrix& m,
                                                const std::vector<std::string>& ids,
                                                const std::vector<std::vector<double>>& queries,
                                                std::size_t k) {
    std::vector<std::vector<Hit>> out(queries.size());
    std::vector<double> scores(m.rows);
    for (std::size_t i = 0; i < queries.size(); ++i) {
        cosine_scores_serial(m, queries[i], scores);
        out[i] = top_k(scores, ids, k);
    }
    return out;
}

std::vector<std::vector<Hit>> rank_batch_omp(const Matrix& m, const std::vector<std::string>& ids,
                                             const std::vector<std::vector<double>>& queries,
                                             std::size_t k) {
    std::vector<std::vector<Hit>> out(queries.size());
    const auto n = static_cast<std::ptrdiff_t>(queries.size());
#pragma omp parallel
    {
        std::vector<double> scores(m.rows);
#pragma omp for schedule(dynamic, 4)
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            const auto qi = static_cast<std::size_t>(i);
            cosine_scores_serial(m, queries[qi], scores);
            out[qi] = top_k(scores, ids, k);
        }
    }
    return out;
}

}  // namespace attackqa::kernels
