#include "singmech/linalg.hpp"

#include <cmath>
#include <algorithm>
#include <numeric>
#include <set>
#include <utility>

#include "singmech/detail/normal_form.hpp"
#include "singmech/errors.hpp"

namespace singmech {

using detail::nf_add;
using detail::nf_mul;
using detail::nf_pow;

double Matrix::max_abs() const noexcept {
    double m = 0.0;
    for (double x : a_) m = std::max(m, std::fabs(x));
    return m;
}

Matrix Matrix::submatrix(const std::vector<std::size_t>& rows, const std::vector<std::size_t>& cols) const {
    Matrix out(rows.size(), cols.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < cols.size(); ++j) out(i, j) = (*this)(rows[i], cols[j]);
    }
    return out;
}

RankResult full_pivot_rank(Matrix m, double relative_threshold) {
    RankResult r;
    const double cutoff = relative_threshold * m.max_abs();
    std::vector<std::size_t> row_id(m.rows());
    std::vector<std::size_t> col_id(m.cols());
    std::iota(row_id.begin(), row_id.end(), 0);
    std::iota(col_id.begin(), col_id.end(), 0);
    const std::size_t n = std::min(m.rows(), m.cols());
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t pi = k, pj = k;
        double best = -1.0;
        for (std::size_t i = k; i < m.rows(); ++i) {
            for (std::size_t j = k; j < m.cols(); ++j) {
                if (std::fabs(m(i, j)) > best) {
                    best = std::fabs(m(i, j));
                    pi = i;
                    pj = j;
                }
            }
        }
        if (!(best > cutoff) || best == 0.0) break;
        if (pi != k) {
            for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(k, j), m(pi, j));
            std::swap(row_id[k], row_id[pi]);
        }
        if (pj != k) {
            for (std::size_t i = 0; i < m.rows(); ++i) std::swap(m(i, k), m(i, pj));
            std::swap(col_id[k], col_id[pj]);
        }
        for (std::size_t i = k + 1; i < m.rows(); ++i) {
            double f = m(i, k) / m(k, k);
            if (f == 0.0) continue;
            for (std::size_t j = k; j < m.cols(); ++j) m(i, j) -= f * m(k, j);
        }
        r.pivot_rows.push_back(row_id[k]);
        r.pivot_cols.push_back(col_id[k]);
        ++r.rank;
    }
    return r;
}

std::vector<double> solve(Matrix a, std::vector<double> b) {
    const std::size_t n = a.rows();
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < n; ++i) {
            if (std::fabs(a(i, k)) > std::fabs(a(p, k))) p = i;
        }
        if (a(p, k) == 0.0) throw SingularMinor("singular linear system");
        if (p != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(p, j));
            std::swap(b[k], b[p]);
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            double f = a(i, k) / a(k, k);
            for (std::size_t j = k; j < n; ++j) a(i, j) -= f * a(k, j);
            b[i] -= f * b[k];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= a(i, j) * x[j];
        x[i] = s / a(i, i);
    }
    return x;
}

ExprMatrix submatrix(const ExprMatrix& m, const std::vector<std::size_t>& rows, const std::vector<std::size_t>& cols) {
    ExprMatrix out(rows.size(), std::vector<Expr>(cols.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < cols.size(); ++j) out[i][j] = m[rows[i]][cols[j]];
    }
    return out;
}

Matrix evaluate(const ExprMatrix& m, const Binding& b) {
    Matrix out(m.size(), m.empty() ? 0 : m[0].size());
    for (std::size_t i = 0; i < out.rows(); ++i) {
        for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) = evaluate(m[i][j], b);
    }
    return out;
}

namespace {

ExprMatrix minor_of(const ExprMatrix& m, std::size_t skip_row, std::size_t skip_col) {
    ExprMatrix out;
    out.reserve(m.size() - 1);
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (i == skip_row) continue;
        std::vector<Expr> row;
        row.reserve(m.size() - 1);
        for (std::size_t j = 0; j < m.size(); ++j) {
            if (j != skip_col) row.push_back(m[i][j]);
        }
        out.push_back(std::move(row));
    }
    return out;
}

ExprMatrix gauss_jordan_inverse(const ExprMatrix& m, const SamplerConfig& config) {
    const std::size_t n = m.size();
    ExprMatrix a = m;
    ExprMatrix inv(n, std::vector<Expr>(n, Expr(0)));
    for (std::size_t i = 0; i < n; ++i) inv[i][i] = Expr(1);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = n;
        for (std::size_t i = k; i < n && p == n; ++i) {
            if (!is_zero(a[i][k], config).zero()) p = i;
        }
        if (p == n) throw SingularMinor("matrix is singular");
        std::swap(a[k], a[p]);
        std::swap(inv[k], inv[p]);
        Expr pivot_inv = nf_pow(a[k][k], -1);
        for (std::size_t j = 0; j < n; ++j) {
            a[k][j] = nf_mul({a[k][j], pivot_inv});
            inv[k][j] = nf_mul({inv[k][j], pivot_inv});
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (i == k || a[i][k].is_zero()) continue;
            Expr f = a[i][k];
            for (std::size_t j = 0; j < n; ++j) {
                a[i][j] = nf_add({a[i][j], nf_mul({Expr(-1), f, a[k][j]})});
                inv[i][j] = nf_add({inv[i][j], nf_mul({Expr(-1), f, inv[k][j]})});
            }
        }
    }
    return inv;
}

ExprMatrix normal_form(const ExprMatrix& m) {
    ExprMatrix out = m;
    for (auto& row : out) {
        for (auto& x : row) x = simplify(x);
    }
    return out;
}

// Entries in normal form.
Expr det_nf(const ExprMatrix& m) {
    const std::size_t n = m.size();
    if (n == 0) return Expr(1);
    if (n == 1) return m[0][0];
    if (n == 2) return nf_add({nf_mul({m[0][0], m[1][1]}), nf_mul({Expr(-1), m[0][1], m[1][0]})});
    std::vector<Expr> terms;
    for (std::size_t j = 0; j < n; ++j) {
        if (m[0][j].is_zero()) continue;
        Expr c = det_nf(minor_of(m, 0, j));
        terms.push_back(nf_mul({Expr(j % 2 == 0 ? 1 : -1), m[0][j], c}));
    }
    return nf_add(std::move(terms));
}

}  // namespace

Expr determinant(const ExprMatrix& m) { return det_nf(normal_form(m)); }

ExprMatrix inverse(const ExprMatrix& input, const SamplerConfig& config) {
    const ExprMatrix m = normal_form(input);
    const std::size_t n = m.size();
    if (n == 0) return {};
    if (n > 8) throw UnsupportedLagrangian("symbolic inverse is limited to 8x8 blocks");
    if (n > 4) return gauss_jordan_inverse(m, config);
    Expr det = det_nf(m);
    if (is_zero(det, config).zero()) throw SingularMinor("matrix is singular (determinant " + det.str() + ")");
    Expr det_inv = nf_pow(det, -1);
    ExprMatrix inv(n, std::vector<Expr>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            Expr cof = n == 1 ? Expr(1) : det_nf(minor_of(m, j, i));
            inv[i][j] = nf_mul({Expr((i + j) % 2 == 0 ? 1 : -1), cof, det_inv});
        }
    }
    return inv;
}

SampledRank sampled_rank(const ExprMatrix& m, const RankConfig& config) {
    SampledRank out;
    std::set<std::string> symbols;
    for (const auto& row : m) {
        for (const Expr& x : row) {
            auto f = free_symbols(x);
            symbols.insert(f.begin(), f.end());
        }
    }
    Sampler sampler(SamplerConfig{.seed = config.seed});
    int attempts = 0;
    while (out.samples_used < config.samples) {
        if (++attempts > 20 * config.samples) throw DomainError("matrix cannot be evaluated at sampled states");
        Matrix value;
        try {
            value = evaluate(m, sampler.draw(symbols));
        } catch (const DomainError&) {
            continue;
        }
        bool finite = true;
        for (std::size_t i = 0; i < value.rows(); ++i) {
            for (std::size_t j = 0; j < value.cols(); ++j) finite = finite && std::isfinite(value(i, j));
        }
        if (!finite) continue;

        RankResult r = full_pivot_rank(value, config.threshold);
        if (out.samples_used == 0) {
            out.rank = r.rank;
            out.pivots = r.pivot_cols;
            std::sort(out.pivots.begin(), out.pivots.end());
        } else {
            if (r.rank != out.rank) {
                throw NonConstantRank("rank " + std::to_string(r.rank) + " at sample " +
                                      std::to_string(out.samples_used + 1) + ", expected " +
                                      std::to_string(out.rank));
            }
            if (!out.pivots.empty()) {
                // Same absolute cutoff as for the whole matrix.
                Matrix minor = value.submatrix(out.pivots, out.pivots);
                const double peak = minor.max_abs();
                if (!(peak > 0.0) || full_pivot_rank(minor, config.threshold * value.max_abs() / peak).rank != out.rank) {
                    throw NonConstantRank("pivot minor singular at sample " + std::to_string(out.samples_used + 1));
                }
            }
        }
        ++out.samples_used;
    }
    return out;
}

}  // namespace singmech
