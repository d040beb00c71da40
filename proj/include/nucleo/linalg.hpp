// Copyright 2026 The nucleo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef NUCLEO_LINALG_HPP
#define NUCLEO_LINALG_HPP

#include "nucleo/rational.hpp"

#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace nucleo {

/// 0-1 incidence vector (coalition, arc set, ...).
using Indicator = std::vector<std::uint8_t>;

/// Dense row-major matrix over Q.
class RationalMatrix {
public:
    RationalMatrix() = default;
    RationalMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

    static RationalMatrix identity(std::size_t n) {
        RationalMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }

    static RationalMatrix from_rows(const std::vector<RationalVector>& rows, std::size_t cols) {
        RationalMatrix m(rows.size(), cols);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (rows[r].size() != cols) throw std::invalid_argument("ragged matrix rows");
            for (std::size_t c = 0; c < cols; ++c) m(r, c) = rows[r][c];
        }
        return m;
    }

    static RationalMatrix from_indicators(const std::vector<Indicator>& rows, std::size_t cols) {
        RationalMatrix m(rows.size(), cols);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (rows[r].size() != cols) throw std::invalid_argument("ragged matrix rows");
            for (std::size_t c = 0; c < cols; ++c)
                if (rows[r][c]) m(r, c) = 1;
        }
        return m;
    }

    [[nodiscard]] std::size_t rows() const { return rows_; }
    [[nodiscard]] std::size_t cols() const { return cols_; }

    Rational& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const Rational& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    [[nodiscard]] std::span<const Rational> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    void swap_rows(std::size_t a, std::size_t b) {
        if (a == b) return;
        for (std::size_t c = 0; c < cols_; ++c) std::swap((*this)(a, c), (*this)(b, c));
    }

    friend bool operator==(const RationalMatrix&, const RationalMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Rational> data_;
};

namespace detail {

// In-place reduced row echelon form; returns pivot columns in row order.
inline std::vector<std::size_t> rref(RationalMatrix& m) {
    std::vector<std::size_t> pivots;
    std::size_t row = 0;
    for (std::size_t col = 0; col < m.cols() && row < m.rows(); ++col) {
        std::size_t sel = row;
        while (sel < m.rows() && m(sel, col).is_zero()) ++sel;
        if (sel == m.rows()) continue;
        m.swap_rows(row, sel);
        const Rational inv = Rational(1) / m(row, col);
        for (std::size_t c = col; c < m.cols(); ++c) m(row, c) *= inv;
        for (std::size_t r = 0; r < m.rows(); ++r) {
            if (r == row || m(r, col).is_zero()) continue;
            const Rational f = m(r, col);
            for (std::size_t c = col; c < m.cols(); ++c)
                if (!m(row, c).is_zero()) m(r, c) -= f * m(row, c);
        }
        pivots.push_back(col);
        ++row;
    }
    return pivots;
}

inline std::uint64_t mod_pow(std::uint64_t base, std::uint64_t exp, std::uint64_t p) {
    std::uint64_t result = 1 % p;
    base %= p;
    while (exp) {
        if (exp & 1) result = result * base % p;
        base = base * base % p;
        exp >>= 1;
    }
    return result;
}

inline std::uint64_t mod_inverse(std::uint64_t a, std::uint64_t p) { return mod_pow(a, p - 2, p); }

// RREF over F_p (p prime, small); returns pivot columns.
inline std::vector<std::size_t> rref_mod_p(std::vector<std::vector<std::uint64_t>>& m, std::size_t cols, std::uint64_t p) {
    std::vector<std::size_t> pivots;
    std::size_t row = 0;
    for (std::size_t col = 0; col < cols && row < m.size(); ++col) {
        std::size_t sel = row;
        while (sel < m.size() && m[sel][col] % p == 0) ++sel;
        if (sel == m.size()) continue;
        std::swap(m[row], m[sel]);
        const std::uint64_t inv = mod_inverse(m[row][col] % p, p);
        for (std::size_t c = 0; c < cols; ++c) m[row][c] = m[row][c] % p * inv % p;
        for (std::size_t r = 0; r < m.size(); ++r) {
            if (r == row) continue;
            const std::uint64_t f = m[r][col] % p;
            if (f == 0) continue;
            for (std::size_t c = 0; c < cols; ++c) m[r][c] = (m[r][c] % p + (p - f) * m[row][c]) % p;
        }
        pivots.push_back(col);
        ++row;
    }
    return pivots;
}

}  // namespace detail

/// Rank over Q by exact Gauss-Jordan elimination.
inline std::size_t rank_over_q(RationalMatrix m) { return detail::rref(m).size(); }

inline std::size_t rank_over_q(const std::vector<Indicator>& rows, std::size_t n) {
    return rank_over_q(RationalMatrix::from_indicators(rows, n));
}

/// True iff `v` lies in span_Q(`basis`). All vectors must have the same length.
inline bool in_span_over_q(const Indicator& v, const std::vector<Indicator>& basis) {
    const std::size_t n = v.size();
    for (const auto& b : basis)
        if (b.size() != n) throw std::invalid_argument("in_span_over_q: length mismatch");
    const auto without = rank_over_q(basis, n);
    auto with = basis;
    with.push_back(v);
    return rank_over_q(with, n) == without;
}

/// Residue vector over Z_p.
struct ModPVector {
    std::vector<std::uint64_t> entries;
    std::uint64_t p = 2;

    friend bool operator==(const ModPVector&, const ModPVector&) = default;
};

/// Rank of a residue matrix over F_p.
inline std::size_t rank_mod_p(std::vector<std::vector<std::uint64_t>> rows, std::uint64_t p) {
    if (rows.empty()) return 0;
    const std::size_t cols = rows.front().size();
    for (const auto& r : rows)
        if (r.size() != cols) throw std::invalid_argument("rank_mod_p: ragged rows");
    return detail::rref_mod_p(rows, cols, p).size();
}

inline std::size_t rank_mod_p(const std::vector<Indicator>& rows, std::uint64_t p) {
    std::vector<std::vector<std::uint64_t>> m;
    m.reserve(rows.size());
    for (const auto& r : rows) m.emplace_back(r.begin(), r.end());
    return rank_mod_p(std::move(m), p);
}

/// Basis of the orthogonal complement over F_p of span(V mod p) in F_p^n.
///
/// One vector per free column of the reduced echelon form, so the result has
/// exactly n - rank_mod_p(V, p) linearly independent entries.
inline std::vector<ModPVector> orthogonal_basis_mod_p(const std::vector<Indicator>& vectors, std::size_t n,
                                                      std::uint64_t p) {
    std::vector<std::vector<std::uint64_t>> m;
    for (const auto& v : vectors) {
        if (v.size() != n) throw std::invalid_argument("orthogonal_basis_mod_p: length mismatch");
        m.emplace_back(v.begin(), v.end());
    }
    const auto pivots = detail::rref_mod_p(m, n, p);
    std::vector<bool> is_pivot(n, false);
    for (auto c : pivots) is_pivot[c] = true;

    std::vector<ModPVector> basis;
    for (std::size_t f = 0; f < n; ++f) {
        if (is_pivot[f]) continue;
        ModPVector u{std::vector<std::uint64_t>(n, 0), p};
        u.entries[f] = 1;
        for (std::size_t r = 0; r < pivots.size(); ++r) u.entries[pivots[r]] = (p - m[r][f] % p) % p;
        basis.push_back(std::move(u));
    }
    return basis;
}

/// Outcome of an exact linear solve; `Underdetermined` and `Inconsistent` are
/// ordinary results, not errors.
struct LinearSolveResult {
    enum class Status { Unique, Underdetermined, Inconsistent };
    Status status = Status::Inconsistent;
    RationalVector solution;  // set only when Unique

    [[nodiscard]] bool unique() const { return status == Status::Unique; }
};

inline LinearSolveResult solve_linear_system_q(const RationalMatrix& a, const RationalVector& rhs) {
    if (rhs.size() != a.rows()) throw std::invalid_argument("solve_linear_system_q: rhs size mismatch");
    RationalMatrix aug(a.rows(), a.cols() + 1);
    for (std::size_t r = 0; r < a.rows(); ++r) {
        for (std::size_t c = 0; c < a.cols(); ++c) aug(r, c) = a(r, c);
        aug(r, a.cols()) = rhs[r];
    }
    const auto pivots = detail::rref(aug);
    if (!pivots.empty() && pivots.back() == a.cols()) return {LinearSolveResult::Status::Inconsistent, {}};
    if (pivots.size() < a.cols()) return {LinearSolveResult::Status::Underdetermined, {}};
    RationalVector x(a.cols());
    for (std::size_t r = 0; r < pivots.size(); ++r) x[pivots[r]] = aug(r, a.cols());
    return {LinearSolveResult::Status::Unique, std::move(x)};
}

/// Greedy Q-basis of the span: keeps each vector that raises the rank.
inline std::vector<Indicator> independent_subset(const std::vector<Indicator>& vectors, std::size_t n) {
    std::vector<Indicator> kept;
    for (const auto& v : vectors) {
        auto trial = kept;
        trial.push_back(v);
        if (rank_over_q(trial, n) == trial.size()) kept = std::move(trial);
    }
    return kept;
}

}  // namespace nucleo

#endif  // NUCLEO_LINALG_HPP
