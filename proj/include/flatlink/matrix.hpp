#pragma once

// Exact rational scalars and dense matrices.

#include <gmpxx.h>

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace flatlink {

using Rat = mpq_class;
using Int = mpz_class;

inline Rat make_rat(const Int& num, const Int& den = 1) {
    if (den == 0) throw std::domain_error("rational with zero denominator");
    Rat r(num, den);
    r.canonicalize();
    return r;
}

/// Parses "p/q", "p", or a decimal such as "-1.25" into an exact rational.
inline Rat parse_rat(const std::string& text) {
    std::string s = text;
    s.erase(std::remove_if(s.begin(), s.end(), ::isspace), s.end());
    if (s.empty()) throw std::invalid_argument("empty rational");
    auto dot = s.find('.');
    if (dot != std::string::npos) {
        if (s.find('/') != std::string::npos) throw std::invalid_argument("bad rational: " + text);
        std::string digits = s.substr(0, dot) + s.substr(dot + 1);
        std::size_t frac = s.size() - dot - 1;
        if (digits.empty() || digits == "-" || digits == "+") throw std::invalid_argument("bad rational: " + text);
        Int num;
        if (num.set_str(digits[0] == '+' ? digits.substr(1) : digits, 10) != 0)
            throw std::invalid_argument("bad rational: " + text);
        Int den;
        mpz_ui_pow_ui(den.get_mpz_t(), 10, frac);
        return make_rat(num, den);
    }
    Rat r;
    if (r.set_str(s[0] == '+' ? s.substr(1) : s, 10) != 0) throw std::invalid_argument("bad rational: " + text);
    if (r.get_den() == 0) throw std::invalid_argument("bad rational: " + text);
    r.canonicalize();
    return r;
}

/// "p/q" with q omitted when 1.
inline std::string to_string(const Rat& r) { return r.get_str(); }

inline int sign(const Rat& r) { return sgn(r); }
inline int sign(const Int& r) { return sgn(r); }

/// Dense row-major matrix over Q. Column vectors are m x 1 matrices.
class QMatrix {
public:
    QMatrix() = default;
    QMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
    QMatrix(std::size_t rows, std::size_t cols, std::vector<Rat> entries)
        : rows_(rows), cols_(cols), data_(std::move(entries)) {
        if (data_.size() != rows_ * cols_) throw std::invalid_argument("QMatrix: entry count mismatch");
    }
    QMatrix(std::initializer_list<std::initializer_list<Rat>> rows) {
        rows_ = rows.size();
        cols_ = rows_ ? rows.begin()->size() : 0;
        data_.reserve(rows_ * cols_);
        for (const auto& r : rows) {
            if (r.size() != cols_) throw std::invalid_argument("QMatrix: ragged initializer");
            data_.insert(data_.end(), r.begin(), r.end());
        }
    }

    static QMatrix identity(std::size_t n) {
        QMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }
    static QMatrix diagonal(std::span<const Rat> d) {
        QMatrix m(d.size(), d.size());
        for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
        return m;
    }
    static QMatrix column(std::span<const Rat> v) {
        return QMatrix(v.size(), 1, std::vector<Rat>(v.begin(), v.end()));
    }
    static QMatrix row(std::span<const Rat> v) {
        return QMatrix(1, v.size(), std::vector<Rat>(v.begin(), v.end()));
    }
    /// Matrix whose columns are the given equal-length vectors.
    static QMatrix from_columns(const std::vector<std::vector<Rat>>& cols) {
        if (cols.empty()) return {};
        QMatrix m(cols.front().size(), cols.size());
        for (std::size_t j = 0; j < cols.size(); ++j) {
            if (cols[j].size() != m.rows_) throw std::invalid_argument("from_columns: ragged input");
            for (std::size_t i = 0; i < m.rows_; ++i) m(i, j) = cols[j][i];
        }
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }
    bool empty() const { return data_.empty(); }

    Rat& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const Rat& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<const Rat> entries() const { return data_; }

    std::vector<Rat> col(std::size_t j) const {
        std::vector<Rat> v(rows_);
        for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
        return v;
    }
    std::vector<Rat> row_vec(std::size_t i) const {
        return {data_.begin() + static_cast<std::ptrdiff_t>(i * cols_),
                data_.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols_)};
    }

    QMatrix transpose() const {
        QMatrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    bool is_zero() const {
        return std::all_of(data_.begin(), data_.end(), [](const Rat& x) { return x == 0; });
    }
    bool is_symmetric() const {
        if (!square()) return false;
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = i + 1; j < cols_; ++j)
                if ((*this)(i, j) != (*this)(j, i)) return false;
        return true;
    }
    bool is_integral() const {
        return std::all_of(data_.begin(), data_.end(), [](const Rat& x) { return x.get_den() == 1; });
    }

    Rat trace() const {
        Rat t = 0;
        for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
        return t;
    }

    friend bool operator==(const QMatrix& a, const QMatrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

    QMatrix& operator+=(const QMatrix& o) {
        check_same(o);
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
        return *this;
    }
    QMatrix& operator-=(const QMatrix& o) {
        check_same(o);
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
        return *this;
    }
    QMatrix& operator*=(const Rat& s) {
        for (auto& x : data_) x *= s;
        return *this;
    }
    friend QMatrix operator+(QMatrix a, const QMatrix& b) { return a += b; }
    friend QMatrix operator-(QMatrix a, const QMatrix& b) { return a -= b; }
    friend QMatrix operator*(QMatrix a, const Rat& s) { return a *= s; }
    friend QMatrix operator*(const Rat& s, QMatrix a) { return a *= s; }
    friend QMatrix operator-(QMatrix a) { return a *= Rat(-1); }

    friend QMatrix operator*(const QMatrix& a, const QMatrix& b) {
        if (a.cols_ != b.rows_) throw std::invalid_argument("QMatrix product: dimension mismatch");
        QMatrix c(a.rows_, b.cols_);
        Rat t;
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const Rat& aik = a(i, k);
                if (aik == 0) continue;
                for (std::size_t j = 0; j < b.cols_; ++j) {
                    t = aik * b(k, j);
                    c(i, j) += t;
                }
            }
        return c;
    }

    friend std::ostream& operator<<(std::ostream& os, const QMatrix& m) {
        os << '[';
        for (std::size_t i = 0; i < m.rows_; ++i) {
            os << (i ? ",[" : "[");
            for (std::size_t j = 0; j < m.cols_; ++j) os << (j ? "," : "") << m(i, j).get_str();
            os << ']';
        }
        return os << ']';
    }

private:
    void check_same(const QMatrix& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("QMatrix: shape mismatch");
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Rat> data_;
};

inline Rat dot(std::span<const Rat> a, std::span<const Rat> b) {
    if (a.size() != b.size()) throw std::invalid_argument("dot: length mismatch");
    Rat s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline std::vector<Rat> mat_vec(const QMatrix& m, std::span<const Rat> v) {
    if (m.cols() != v.size()) throw std::invalid_argument("mat_vec: dimension mismatch");
    std::vector<Rat> out(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) out[i] += m(i, j) * v[j];
    return out;
}

/// ab - ba.
inline QMatrix commutator(const QMatrix& a, const QMatrix& b) { return a * b - b * a; }

inline Int lcm_of_denominators(std::span<const Rat> v) {
    Int l = 1;
    for (const auto& x : v) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.get_den_mpz_t());
    return l;
}

/// Scales a rational vector to a primitive integer vector; the first nonzero
/// entry is made positive. Throws on the zero vector.
inline std::vector<Int> primitive_integer(std::span<const Rat> v) {
    Int l = lcm_of_denominators(v);
    std::vector<Int> out(v.size());
    Int g = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        Rat s = v[i] * l;
        out[i] = s.get_num();
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), out[i].get_mpz_t());
    }
    if (g == 0) throw std::invalid_argument("primitive_integer: zero vector");
    auto first = std::find_if(out.begin(), out.end(), [](const Int& x) { return x != 0; });
    if (*first < 0) g = -g;
    for (auto& x : out) x /= g;
    return out;
}

inline std::vector<Rat> to_rat(std::span<const Int> v) { return {v.begin(), v.end()}; }

}  // namespace flatlink
