#pragma once

#include <array>
#include <complex>
#include <cstddef>

#include "qsimnet/errors.hpp"

namespace qsimnet {

using Complex = std::complex<double>;

/// Tolerance for algebraic identities (unitarity, completeness, hermiticity).
inline constexpr double kAlgebraTol = 1e-12;
/// Tolerance for accumulated state norms (up to ~100 chained gates).
inline constexpr double kStateTol = 1e-9;

bool is_finite(Complex v);

// ---------------------------------------------------------------------------
// Single-qubit state
// ---------------------------------------------------------------------------

/// (alpha, beta) amplitudes of |0> and |1>. Unit norm within kStateTol.
struct AmplitudePair {
  Complex alpha{1.0, 0.0};
  Complex beta{0.0, 0.0};
};

double norm_squared(const AmplitudePair& s);
bool is_normalized(const AmplitudePair& s, double tol = kStateTol);
AmplitudePair normalized(const AmplitudePair& s);

/// True when b equals a times some unit-modulus phase, i.e. |<a|b>| = 1
/// within tol. Global phase is unobservable in measurement statistics, so
/// state equality is always compared this way.
bool equal_up_to_phase(const AmplitudePair& a, const AmplitudePair& b,
                       double tol = kStateTol);

// ---------------------------------------------------------------------------
// 2x2 matrices
// ---------------------------------------------------------------------------

/// Row-major 2x2 complex matrix. Defaults to the identity.
struct Mat2 {
  Complex m00{1.0, 0.0};
  Complex m01{0.0, 0.0};
  Complex m10{0.0, 0.0};
  Complex m11{1.0, 0.0};
};

Mat2 operator*(const Mat2& a, const Mat2& b);
bool approx_equal(const Mat2& a, const Mat2& b, double tol = kAlgebraTol);
Mat2 dagger(const Mat2& m);
bool is_unitary(const Mat2& m, double tol = kAlgebraTol);

/// Gate from the (phi, a, b) parameterization:
///   e^{i phi} [[a, b], [-conj(b), conj(a)]]
/// Requires |a|^2 + |b|^2 = 1 within kStateTol; the global phase is stored
/// and propagated exactly. This is a constructor only -- gates are stored as
/// plain matrices, so gates that need phi != 0 in this form (such as
/// sigma-x) still have an exact representation.
Mat2 make_gate(double phi, Complex a, Complex b);

/// Conjugate transpose, validated: throws ValidationError when m is not
/// unitary within kAlgebraTol.
Mat2 inverse(const Mat2& m);

AmplitudePair apply(const Mat2& m, const AmplitudePair& s);

namespace gates {
Mat2 identity();
Mat2 sigma_x();
Mat2 sigma_z();
Mat2 hadamard();
/// Rotation with ry(theta)|0> = (cos theta, sin theta):
///   [[cos theta, -sin theta], [sin theta, cos theta]]
Mat2 ry(double theta);
}  // namespace gates

// ---------------------------------------------------------------------------
// Two-qubit state and 4x4 matrices, basis order |00>,|01>,|10>,|11>
// ---------------------------------------------------------------------------

struct Vec4 {
  Complex a00{0.0, 0.0};
  Complex a01{0.0, 0.0};
  Complex a10{0.0, 0.0};
  Complex a11{0.0, 0.0};
};

double norm_squared(const Vec4& v);
bool is_normalized(const Vec4& v, double tol = kStateTol);
bool equal_up_to_phase(const Vec4& a, const Vec4& b, double tol = kStateTol);

/// Row-major 4x4 complex matrix.
struct Mat4 {
  std::array<Complex, 16> m{};

  Complex& at(std::size_t row, std::size_t col) { return m[row * 4 + col]; }
  const Complex& at(std::size_t row, std::size_t col) const {
    return m[row * 4 + col];
  }
};

Mat4 operator*(const Mat4& a, const Mat4& b);
bool approx_equal(const Mat4& a, const Mat4& b, double tol = kAlgebraTol);
Mat4 identity4();
bool is_unitary(const Mat4& m, double tol = kAlgebraTol);

/// I (x) G -- block-diag(G, G); G acts on the second qubit.
Mat4 tensor_left(const Mat2& g);
/// G (x) I -- [[g00 I, g01 I], [g10 I, g11 I]]; G acts on the first qubit.
Mat4 tensor_right(const Mat2& g);

Vec4 apply4(const Mat4& m, const Vec4& v);

// ---------------------------------------------------------------------------
// Density matrices and amplitude-damping Kraus operators
// ---------------------------------------------------------------------------

/// 2x2 density matrix, row-major.
struct DensityMatrix {
  Complex r00{1.0, 0.0};
  Complex r01{0.0, 0.0};
  Complex r10{0.0, 0.0};
  Complex r11{0.0, 0.0};
};

double trace_real(const DensityMatrix& rho);
/// Hermitian within kAlgebraTol, unit trace within kStateTol, both
/// eigenvalues >= -kStateTol.
bool is_valid_density(const DensityMatrix& rho);
DensityMatrix pure_density(const AmplitudePair& s);
bool approx_equal(const DensityMatrix& a, const DensityMatrix& b, double tol);

/// Amplitude-damping operator pair with damping factor eta:
///   E0 = [[1, 0], [0, sqrt(1-eta)]]   (attenuation did not occur)
///   E1 = [[0, sqrt(eta)], [0, 0]]     (attenuation occurred; |1> decays)
struct KrausPair {
  Mat2 e0;
  Mat2 e1;
  double eta = 0.0;
};

/// Throws ValidationError when eta is outside [0,1].
KrausPair make_amplitude_damping_kraus(double eta);

/// E0†E0 + E1†E1 = I within tol.
bool is_complete(const KrausPair& k, double tol = kAlgebraTol);

/// E0 rho E0† + E1 rho E1†. Validates the inputs: throws ValidationError on
/// a completeness violation or an invalid density matrix.
DensityMatrix apply_operator_sum(const DensityMatrix& rho, const KrausPair& k);

}  // namespace qsimnet
