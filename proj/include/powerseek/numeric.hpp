#pragma once

#include <gmpxx.h>

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <string_view>

/// Rational scalars via GMP.  Eigen needs NumTraits for storage and arithmetic
/// and an explicit cast path to double (gmpxx has no conversion operator).
namespace Eigen {
template <>
struct NumTraits<mpq_class> : GenericNumTraits<mpq_class> {
    typedef mpq_class Real;
    typedef mpq_class NonInteger;
    typedef mpq_class Nested;
    typedef mpq_class Literal;
    enum {
        IsComplex = 0,
        IsInteger = 0,
        IsSigned = 1,
        RequireInitialization = 1,
        ReadCost = 6,
        AddCost = 150,
        MulCost = 100
    };
    static inline Real epsilon() { return 0; }
    static inline Real dummy_precision() { return 0; }
    static inline int digits10() { return 0; }
};

namespace internal {
template <>
struct cast_impl<mpq_class, double> {
    static inline double run(const mpq_class& x) { return x.get_d(); }
};
template <>
struct cast_impl<mpq_class, mpq_class> {
    static inline mpq_class run(const mpq_class& x) { return x; }
};
}  // namespace internal
}  // namespace Eigen

namespace powerseek {

using Rational = mpq_class;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Thrown when an argument violates a documented precondition.
class InvalidArgument : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

/// Thrown when a numerical routine cannot deliver its guarantee
/// (singular system, residual too large, missing bisection crossing).
class NumericError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Per-scalar policy: exact types compare exactly, floating types use a
/// fixed absolute tie band.
template <typename Scalar>
struct ScalarTraits;

template <>
struct ScalarTraits<double> {
    static constexpr bool exact = false;
    static constexpr const char* mode_name = "float";
    static double tie_tolerance() { return 1e-9; }
};

template <>
struct ScalarTraits<Rational> {
    static constexpr bool exact = true;
    static constexpr const char* mode_name = "exact";
    static Rational tie_tolerance() { return 0; }
};

/// Parses "p/q", an integer, or a plain decimal ("0.125", "-2.5e-3" is
/// rejected) into an exact rational.  Throws InvalidArgument.
Rational parse_rational(std::string_view text);

/// Canonical text: "p/q" or "p" when the denominator is 1.
std::string to_string(const Rational& value);

/// Round-trippable shortest-ish form ("%.17g").
std::string to_string(double value);

inline double to_double(const Rational& value) { return value.get_d(); }
inline double to_double(double value) { return value; }

/// Converts an exact rational to the target scalar.
template <typename Scalar>
Scalar from_rational(const Rational& value);

template <>
inline Rational from_rational<Rational>(const Rational& value) {
    return value;
}

template <>
inline double from_rational<double>(const Rational& value) {
    return value.get_d();
}

/// Exact conversion of a double to a rational (every finite double is dyadic).
Rational rational_from_double(double value);

template <typename Scalar>
Scalar abs_value(const Scalar& x) {
    if constexpr (ScalarTraits<Scalar>::exact) {
        return abs(x);
    } else {
        return x < 0 ? -x : x;
    }
}

/// Solves A x = b.  Rational: Gauss-Jordan with first-nonzero pivoting, exact.
/// double: partial-pivot LU, rejecting results whose residual exceeds
/// 1e-9 relative to max(1, norm(A) * norm(x)).
template <typename Scalar>
Vector<Scalar> solve_linear(const Matrix<Scalar>& a, const Vector<Scalar>& b);

/// Lexicographic order on vectors of equal length; used for orbit sets.
template <typename Scalar>
struct LexLess {
    bool operator()(const Vector<Scalar>& lhs, const Vector<Scalar>& rhs) const {
        for (Eigen::Index i = 0; i < lhs.size(); ++i) {
            if (lhs(i) < rhs(i)) return true;
            if (rhs(i) < lhs(i)) return false;
        }
        return false;
    }
};

template <typename Scalar>
bool vectors_equal(const Vector<Scalar>& lhs, const Vector<Scalar>& rhs) {
    if (lhs.size() != rhs.size()) return false;
    for (Eigen::Index i = 0; i < lhs.size(); ++i) {
        if (!(lhs(i) == rhs(i))) return false;
    }
    return true;
}

}  // namespace powerseek
