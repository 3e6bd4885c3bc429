#include "powerseek/numeric.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>

namespace powerseek {

namespace {

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s) {
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    }
    return true;
}

}  // namespace

Rational parse_rational(std::string_view text) {
    std::string_view s = text;
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    bool negative = false;
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
        negative = s.front() == '-';
        s.remove_prefix(1);
    }
    const auto bad = [&] { return InvalidArgument("not a rational number: \"" + std::string(text) + "\""); };

    Rational value;
    if (auto slash = s.find('/'); slash != std::string_view::npos) {
        auto num = s.substr(0, slash);
        auto den = s.substr(slash + 1);
        if (!all_digits(num) || !all_digits(den)) throw bad();
        mpz_class n(std::string(num), 10);
        mpz_class d(std::string(den), 10);
        if (d == 0) throw InvalidArgument("zero denominator in \"" + std::string(text) + "\"");
        value = Rational(n, d);
        value.canonicalize();
    } else if (auto dot = s.find('.'); dot != std::string_view::npos) {
        auto whole = s.substr(0, dot);
        auto frac = s.substr(dot + 1);
        if (whole.empty() && frac.empty()) throw bad();
        if ((!whole.empty() && !all_digits(whole)) || (!frac.empty() && !all_digits(frac))) throw bad();
        mpz_class w = whole.empty() ? mpz_class(0) : mpz_class(std::string(whole), 10);
        mpz_class f = frac.empty() ? mpz_class(0) : mpz_class(std::string(frac), 10);
        mpz_class scale;
        mpz_ui_pow_ui(scale.get_mpz_t(), 10, frac.size());
        value = Rational(w * scale + f, scale);
        value.canonicalize();
    } else {
        if (!all_digits(s)) throw bad();
        value = Rational(mpz_class(std::string(s), 10));
    }
    return negative ? Rational(-value) : value;
}

std::string to_string(const Rational& value) {
    Rational v = value;
    v.canonicalize();
    if (v.get_den() == 1) return v.get_num().get_str();
    return v.get_str();
}

std::string to_string(double value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

Rational rational_from_double(double value) {
    if (!std::isfinite(value)) throw InvalidArgument("non-finite value cannot be made rational");
    Rational r(value);
    r.canonicalize();
    return r;
}

template <>
Vector<Rational> solve_linear<Rational>(const Matrix<Rational>& a, const Vector<Rational>& b) {
    const Eigen::Index n = a.rows();
    if (a.cols() != n || b.size() != n) throw InvalidArgument("solve_linear: dimension mismatch");
    Matrix<Rational> m = a;
    Vector<Rational> rhs = b;
    for (Eigen::Index col = 0; col < n; ++col) {
        Eigen::Index pivot = col;
        while (pivot < n && m(pivot, col) == 0) ++pivot;
        if (pivot == n) throw NumericError("solve_linear: singular system");
        if (pivot != col) {
            m.row(pivot).swap(m.row(col));
            std::swap(rhs(pivot), rhs(col));
        }
        const Rational inv = 1 / m(col, col);
        for (Eigen::Index j = col; j < n; ++j) m(col, j) *= inv;
        rhs(col) *= inv;
        for (Eigen::Index row = 0; row < n; ++row) {
            if (row == col || m(row, col) == 0) continue;
            const Rational factor = m(row, col);
            for (Eigen::Index j = col; j < n; ++j) m(row, j) -= factor * m(col, j);
            rhs(row) -= factor * rhs(col);
        }
    }
    return rhs;
}

template <>
Vector<double> solve_linear<double>(const Matrix<double>& a, const Vector<double>& b) {
    const Eigen::Index n = a.rows();
    if (a.cols() != n || b.size() != n) throw InvalidArgument("solve_linear: dimension mismatch");
    if (n == 0) return Vector<double>(0);
    Eigen::PartialPivLU<Matrix<double>> lu(a);
    Vector<double> x = lu.solve(b);
    // residual relative to |A| |x|
    const double residual = (a * x - b).cwiseAbs().maxCoeff();
    const double scale = std::max(1.0, a.cwiseAbs().rowwise().sum().maxCoeff() * x.cwiseAbs().maxCoeff());
    if (!std::isfinite(residual) || residual > 1e-9 * scale) {
        throw NumericError("solve_linear: residual " + to_string(residual) + " exceeds 1e-9");
    }
    return x;
}

}  // namespace powerseek
