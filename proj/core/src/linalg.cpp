#include "qsimnet/linalg.hpp"

#include <cmath>
#include <string>

namespace qsimnet {

namespace {

std::string norm_defect_message(const char* what, double norm_sq) {
  return std::string(what) + ": squared norm is " + std::to_string(norm_sq) +
         ", expected 1";
}

}  // namespace

bool is_finite(Complex v) {
  return std::isfinite(v.real()) && std::isfinite(v.imag());
}

// --------------------------------------------------------------------------
// AmplitudePair

double norm_squared(const AmplitudePair& s) {
  return std::norm(s.alpha) + std::norm(s.beta);
}

bool is_normalized(const AmplitudePair& s, double tol) {
  return is_finite(s.alpha) && is_finite(s.beta) &&
         std::abs(norm_squared(s) - 1.0) <= tol;
}

AmplitudePair normalized(const AmplitudePair& s) {
  const double n = std::sqrt(norm_squared(s));
  if (n <= 0.0 || !std::isfinite(n)) {
    throw ValidationError("cannot normalize a zero-norm amplitude pair");
  }
  return {s.alpha / n, s.beta / n};
}

bool equal_up_to_phase(const AmplitudePair& a, const AmplitudePair& b,
                       double tol) {
  // |<a|b>| = 1 iff b = e^{i phi} a for normalized states.
  const Complex overlap = std::conj(a.alpha) * b.alpha + std::conj(a.beta) * b.beta;
  const double na = std::sqrt(norm_squared(a));
  const double nb = std::sqrt(norm_squared(b));
  if (na == 0.0 || nb == 0.0) return na == nb;
  return std::abs(std::abs(overlap) / (na * nb) - 1.0) <= tol;
}

// --------------------------------------------------------------------------
// Mat2

Mat2 operator*(const Mat2& a, const Mat2& b) {
  return {a.m00 * b.m00 + a.m01 * b.m10, a.m00 * b.m01 + a.m01 * b.m11,
          a.m10 * b.m00 + a.m11 * b.m10, a.m10 * b.m01 + a.m11 * b.m11};
}

bool approx_equal(const Mat2& a, const Mat2& b, double tol) {
  return std::abs(a.m00 - b.m00) <= tol && std::abs(a.m01 - b.m01) <= tol &&
         std::abs(a.m10 - b.m10) <= tol && std::abs(a.m11 - b.m11) <= tol;
}

Mat2 dagger(const Mat2& m) {
  return {std::conj(m.m00), std::conj(m.m10), std::conj(m.m01),
          std::conj(m.m11)};
}

bool is_unitary(const Mat2& m, double tol) {
  return approx_equal(m * dagger(m), Mat2{}, tol) &&
         approx_equal(dagger(m) * m, Mat2{}, tol);
}

Mat2 make_gate(double phi, Complex a, Complex b) {
  const double n = std::norm(a) + std::norm(b);
  if (!is_finite(a) || !is_finite(b) || std::abs(n - 1.0) > kStateTol) {
    throw ValidationError(norm_defect_message("gate coefficients (a, b)", n));
  }
  const Complex phase = std::polar(1.0, phi);
  return {phase * a, phase * b, phase * -std::conj(b), phase * std::conj(a)};
}

Mat2 inverse(const Mat2& m) {
  if (!is_unitary(m)) {
    throw ValidationError("inverse requires a unitary matrix");
  }
  return dagger(m);
}

AmplitudePair apply(const Mat2& m, const AmplitudePair& s) {
  return {m.m00 * s.alpha + m.m01 * s.beta, m.m10 * s.alpha + m.m11 * s.beta};
}

namespace gates {

Mat2 identity() { return {}; }

Mat2 sigma_x() { return {{0, 0}, {1, 0}, {1, 0}, {0, 0}}; }

Mat2 sigma_z() { return {{1, 0}, {0, 0}, {0, 0}, {-1, 0}}; }

Mat2 hadamard() {
  const double h = 1.0 / std::sqrt(2.0);
  return {{h, 0}, {h, 0}, {h, 0}, {-h, 0}};
}

Mat2 ry(double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return {{c, 0}, {-s, 0}, {s, 0}, {c, 0}};
}

}  // namespace gates

// --------------------------------------------------------------------------
// Vec4 / Mat4

double norm_squared(const Vec4& v) {
  return std::norm(v.a00) + std::norm(v.a01) + std::norm(v.a10) +
         std::norm(v.a11);
}

bool is_normalized(const Vec4& v, double tol) {
  return is_finite(v.a00) && is_finite(v.a01) && is_finite(v.a10) &&
         is_finite(v.a11) && std::abs(norm_squared(v) - 1.0) <= tol;
}

bool equal_up_to_phase(const Vec4& a, const Vec4& b, double tol) {
  const Complex overlap = std::conj(a.a00) * b.a00 + std::conj(a.a01) * b.a01 +
                          std::conj(a.a10) * b.a10 + std::conj(a.a11) * b.a11;
  const double na = std::sqrt(norm_squared(a));
  const double nb = std::sqrt(norm_squared(b));
  if (na == 0.0 || nb == 0.0) return na == nb;
  return std::abs(std::abs(overlap) / (na * nb) - 1.0) <= tol;
}

Mat4 operator*(const Mat4& a, const Mat4& b) {
  Mat4 out;
  for (std::size_t r = 0; r < 4; ++r) {
    for (std::size_t c = 0; c < 4; ++c) {
      Complex sum{0.0, 0.0};
      for (std::size_t k = 0; k < 4; ++k) sum += a.at(r, k) * b.at(k, c);
      out.at(r, c) = sum;
    }
  }
  return out;
}

bool approx_equal(const Mat4& a, const Mat4& b, double tol) {
  for (std::size_t i = 0; i < 16; ++i) {
    if (std::abs(a.m[i] - b.m[i]) > tol) return false;
  }
  return true;
}

Mat4 identity4() {
  Mat4 out;
  for (std::size_t i = 0; i < 4; ++i) out.at(i, i) = {1.0, 0.0};
  return out;
}

bool is_unitary(const Mat4& m, double tol) {
  Mat4 md;
  for (std::size_t r = 0; r < 4; ++r) {
    for (std::size_t c = 0; c < 4; ++c) md.at(r, c) = std::conj(m.at(c, r));
  }
  return approx_equal(m * md, identity4(), tol) &&
         approx_equal(md * m, identity4(), tol);
}

Mat4 tensor_left(const Mat2& g) {
  Mat4 out;
  out.at(0, 0) = g.m00;
  out.at(0, 1) = g.m01;
  out.at(1, 0) = g.m10;
  out.at(1, 1) = g.m11;
  out.at(2, 2) = g.m00;
  out.at(2, 3) = g.m01;
  out.at(3, 2) = g.m10;
  out.at(3, 3) = g.m11;
  return out;
}

Mat4 tensor_right(const Mat2& g) {
  Mat4 out;
  out.at(0, 0) = g.m00;
  out.at(1, 1) = g.m00;
  out.at(0, 2) = g.m01;
  out.at(1, 3) = g.m01;
  out.at(2, 0) = g.m10;
  out.at(3, 1) = g.m10;
  out.at(2, 2) = g.m11;
  out.at(3, 3) = g.m11;
  return out;
}

Vec4 apply4(const Mat4& m, const Vec4& v) {
  const std::array<Complex, 4> in{v.a00, v.a01, v.a10, v.a11};
  std::array<Complex, 4> out{};
  for (std::size_t r = 0; r < 4; ++r) {
    for (std::size_t c = 0; c < 4; ++c) out[r] += m.at(r, c) * in[c];
  }
  return {out[0], out[1], out[2], out[3]};
}

// --------------------------------------------------------------------------
// Density matrices and Kraus operators

double trace_real(const DensityMatrix& rho) {
  return rho.r00.real() + rho.r11.real();
}

bool is_valid_density(const DensityMatrix& rho) {
  if (!is_finite(rho.r00) || !is_finite(rho.r01) || !is_finite(rho.r10) ||
      !is_finite(rho.r11)) {
    return false;
  }
  // Hermitian: real diagonal, r10 = conj(r01).
  if (std::abs(rho.r00.imag()) > kAlgebraTol ||
      std::abs(rho.r11.imag()) > kAlgebraTol ||
      std::abs(rho.r10 - std::conj(rho.r01)) > kAlgebraTol) {
    return false;
  }
  if (std::abs(trace_real(rho) - 1.0) > kStateTol) return false;
  // Eigenvalues of a 2x2 hermitian matrix: (t/2) +/- sqrt((t/2)^2 - det).
  const double t = trace_real(rho);
  const double det =
      rho.r00.real() * rho.r11.real() - std::norm(rho.r01);
  const double disc = std::max(0.0, t * t / 4.0 - det);
  const double lo = t / 2.0 - std::sqrt(disc);
  return lo >= -kStateTol;
}

DensityMatrix pure_density(const AmplitudePair& s) {
  return {s.alpha * std::conj(s.alpha), s.alpha * std::conj(s.beta),
          s.beta * std::conj(s.alpha), s.beta * std::conj(s.beta)};
}

bool approx_equal(const DensityMatrix& a, const DensityMatrix& b, double tol) {
  return std::abs(a.r00 - b.r00) <= tol && std::abs(a.r01 - b.r01) <= tol &&
         std::abs(a.r10 - b.r10) <= tol && std::abs(a.r11 - b.r11) <= tol;
}

KrausPair make_amplitude_damping_kraus(double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw ValidationError("damping factor eta must lie in [0,1], got " +
                          std::to_string(eta));
  }
  KrausPair k;
  k.eta = eta;
  k.e0 = {{1, 0}, {0, 0}, {0, 0}, {std::sqrt(1.0 - eta), 0}};
  k.e1 = {{0, 0}, {std::sqrt(eta), 0}, {0, 0}, {0, 0}};
  return k;
}

bool is_complete(const KrausPair& k, double tol) {
  const Mat2 sum_first = dagger(k.e0) * k.e0;
  const Mat2 sum_second = dagger(k.e1) * k.e1;
  const Mat2 total{sum_first.m00 + sum_second.m00, sum_first.m01 + sum_second.m01,
                   sum_first.m10 + sum_second.m10, sum_first.m11 + sum_second.m11};
  return approx_equal(total, Mat2{}, tol);
}

namespace {

DensityMatrix sandwich(const Mat2& e, const DensityMatrix& rho) {
  // e * rho * e†
  const Mat2 r{rho.r00, rho.r01, rho.r10, rho.r11};
  const Mat2 out = e * r * dagger(e);
  return {out.m00, out.m01, out.m10, out.m11};
}

}  // namespace

DensityMatrix apply_operator_sum(const DensityMatrix& rho, const KrausPair& k) {
  if (!is_complete(k)) {
    throw ValidationError("Kraus pair violates completeness: E0†E0 + E1†E1 != I");
  }
  if (!is_valid_density(rho)) {
    throw ValidationError("operator-sum input is not a valid density matrix");
  }
  const DensityMatrix a = sandwich(k.e0, rho);
  const DensityMatrix b = sandwich(k.e1, rho);
  return {a.r00 + b.r00, a.r01 + b.r01, a.r10 + b.r10, a.r11 + b.r11};
}

}  // namespace qsimnet
