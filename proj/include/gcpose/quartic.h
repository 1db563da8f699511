#ifndef GCPOSE_QUARTIC_H_
#define GCPOSE_QUARTIC_H_

#include <array>
#include <complex>
#include <span>
#include <vector>

namespace gcpose {

using Complex = std::complex<double>;

// Monic quartic x^4 + a3 x^3 + a2 x^2 + a1 x + a0.
struct Quartic {
    double a3 = 0.0;
    double a2 = 0.0;
    double a1 = 0.0;
    double a0 = 0.0;

    Complex evaluate(Complex x) const { return (((x + a3) * x + a2) * x + a1) * x + a0; }
    double coefficient_scale() const;  // max(1, |a3|, |a2|, |a1|, |a0|)
};

// A r^4 + B r^3 + C r^2 + D r + E, highest power first. Not necessarily monic.
struct QuarticPolynomial {
    std::array<double, 5> c{};  // {A, B, C, D, E}

    double evaluate(double x) const { return (((c[0] * x + c[1]) * x + c[2]) * x + c[3]) * x + c[4]; }
    QuarticPolynomial scaled(double s) const;
};

// Ferrari-style closed form over complex arithmetic (T1..T5, R1..R6). Always returns four
// roots, repeated roots included.
std::array<Complex, 4> solve_quartic_closed_form(const Quartic &q);

// Closed-form roots of the monic cubic x^3 + b x^2 + c x + d.
std::array<Complex, 3> solve_cubic_closed_form(double b, double c, double d);

// Roots of a general polynomial of degree <= 4. The polynomial is reduced to lower
// degree while its leading coefficient is below 1e-14 times the largest remaining one;
// otherwise it is divided through and solved by solve_quartic_closed_form. The identically
// zero polynomial yields no roots.
std::vector<Complex> solve_polynomial(const QuarticPolynomial &p);

inline constexpr double kDefaultImagTolerance = 1e-6;
inline constexpr double kDefaultRootBound = 0.2618;  // rad, about 15 deg

// Real parts of the roots with |Im| < imag_tol and |Re| < mag_bound, in input order.
std::vector<double> real_roots_filtered(std::span<const Complex> roots, double imag_tol = kDefaultImagTolerance,
                                        double mag_bound = kDefaultRootBound);

}  // namespace gcpose

#endif  // GCPOSE_QUARTIC_H_
