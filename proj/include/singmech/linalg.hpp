#pragma once

#include <cstddef>
#include <vector>

#include "singmech/evaluate.hpp"
#include "singmech/expr.hpp"
#include "singmech/zero_test.hpp"

namespace singmech {

/// Small dense row-major matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols, 0.0) {}

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
    double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }
    [[nodiscard]] double max_abs() const noexcept;
    [[nodiscard]] Matrix submatrix(const std::vector<std::size_t>& rows, const std::vector<std::size_t>& cols) const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> a_;
};

struct RankResult {
    std::size_t rank = 0;
    /// Pivot positions in selection order.
    std::vector<std::size_t> pivot_rows;
    std::vector<std::size_t> pivot_cols;
};

/// Gaussian elimination with full pivoting. A pivot counts while its magnitude
/// exceeds `relative_threshold * max|entry|` of the input.
[[nodiscard]] RankResult full_pivot_rank(Matrix m, double relative_threshold);

/// Solves a x = b with partial pivoting. Throws SingularMinor.
[[nodiscard]] std::vector<double> solve(Matrix a, std::vector<double> b);

using ExprMatrix = std::vector<std::vector<Expr>>;

[[nodiscard]] ExprMatrix submatrix(const ExprMatrix& m, const std::vector<std::size_t>& rows,
                                   const std::vector<std::size_t>& cols);
[[nodiscard]] Matrix evaluate(const ExprMatrix& m, const Binding& b);

/// Cofactor expansion. Intended for n <= 4.
[[nodiscard]] Expr determinant(const ExprMatrix& m);

/// Exact inverse: adjugate over determinant for n <= 4, Gauss-Jordan with
/// pivots certified nonzero by `is_zero` for 5 <= n <= 8. Throws SingularMinor
/// when no nonzero pivot exists, UnsupportedLagrangian for n > 8.
[[nodiscard]] ExprMatrix inverse(const ExprMatrix& m, const SamplerConfig& config = {});

struct RankConfig {
    std::uint64_t seed = kDefaultSeed;
    int samples = 16;
    double threshold = 1e-10;
};

struct SampledRank {
    std::size_t rank = 0;
    /// Pivot columns chosen at the first sample, ascending.
    std::vector<std::size_t> pivots;
    int samples_used = 0;
};

/// Numeric rank of a square matrix of expressions at seeded random points.
/// Pivots come from full pivoting at the first point; every later point must
/// reproduce the rank and keep the principal minor on those pivots
/// nonsingular. Throws NonConstantRank otherwise.
[[nodiscard]] SampledRank sampled_rank(const ExprMatrix& m, const RankConfig& config);

}  // namespace singmech
