#include "gcpose/quartic.h"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace gcpose {

namespace {

const Complex kCubeUnity(-0.5, std::numbers::sqrt3 / 2.0);

Complex principal_cbrt(Complex z) {
    if (z == Complex(0.0, 0.0)) {
        return z;
    }
    return std::pow(z, 1.0 / 3.0);
}

// sqrt(x) branch of +-sqrt(x) that makes |base + root| largest.
Complex sqrt_away_from(Complex base, Complex x) {
    const Complex root = std::sqrt(x);
    return std::abs(base + root) >= std::abs(base - root) ? root : -root;
}

std::array<Complex, 2> solve_monic_quadratic(Complex b, Complex c) {
    const Complex half_b = 0.5 * b;
    const Complex q = -(half_b + sqrt_away_from(half_b, half_b * half_b - c));
    if (q == Complex(0.0, 0.0)) {
        return {q, q};
    }
    return {q, c / q};
}

}  // namespace

double Quartic::coefficient_scale() const {
    return std::max({1.0, std::abs(a3), std::abs(a2), std::abs(a1), std::abs(a0)});
}

QuarticPolynomial QuarticPolynomial::scaled(double s) const {
    QuarticPolynomial out;
    for (std::size_t i = 0; i < c.size(); ++i) {
        out.c[i] = s * c[i];
    }
    return out;
}

std::array<Complex, 4> solve_quartic_closed_form(const Quartic &q) {
    const double a = q.a3, b = q.a2, c = q.a1, d = q.a0;

    const Complex T1 = -a / 4.0;
    const Complex T2 = b * b - 3.0 * a * c + 12.0 * d;
    const Complex T3 = (2.0 * b * b * b - 9.0 * a * b * c + 27.0 * c * c + 27.0 * a * a * d - 72.0 * b * d) / 2.0;
    const Complex T4 = (-a * a * a + 4.0 * a * b - 8.0 * c) / 32.0;
    const Complex T5 = (3.0 * a * a - 8.0 * b) / 48.0;

    // Either sign of R1 is valid; taking the one away from T3 keeps T3 + R1 from cancelling.
    const Complex R1 = sqrt_away_from(T3, T3 * T3 - T2 * T2 * T2);
    const Complex R2_principal = principal_cbrt(T3 + R1);

    // Each cube-root branch gives a root R3 of the resolvent cubic. Keep the one with the
    // largest |T5 + R3| so the division by R4 below is as well conditioned as possible.
    Complex R2 = R2_principal;
    Complex R3 = 0.0;
    if (R2_principal != Complex(0.0, 0.0)) {
        double best = -1.0;
        Complex branch = R2_principal;
        for (int k = 0; k < 3; ++k) {
            const Complex R3_k = (T2 / branch + branch) / 12.0;
            if (std::abs(T5 + R3_k) > best) {
                best = std::abs(T5 + R3_k);
                R2 = branch;
                R3 = R3_k;
            }
            branch *= kCubeUnity;
        }
    }

    const Complex R4 = std::sqrt(T5 + R3);
    const Complex R5 = 2.0 * T5 - R3;
    Complex R6;
    const double scale = q.coefficient_scale();
    if (std::abs(R4) > 1e-10 * std::sqrt(scale)) {
        R6 = T4 / R4;
    } else {
        // R4 -> 0 only for an (almost) biquadratic depressed quartic y^4 + p y^2 + r. The
        // limit of T4 / R4 is then sqrt(R5^2 - r); for x^4 - 1 this is the constant 1.
        const double r_dep = d - a * c / 4.0 + a * a * b / 16.0 - 3.0 * a * a * a * a / 256.0;
        R6 = std::sqrt(R5 * R5 - r_dep);
    }

    const Complex S_minus = std::sqrt(R5 - R6);
    const Complex S_plus = std::sqrt(R5 + R6);
    return {T1 - R4 - S_minus, T1 - R4 + S_minus, T1 + R4 - S_plus, T1 + R4 + S_plus};
}

std::array<Complex, 3> solve_cubic_closed_form(double b, double c, double d) {
    const double p = c - b * b / 3.0;
    const double q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
    const Complex minus_half_q = -q / 2.0;
    const Complex C = principal_cbrt(minus_half_q + sqrt_away_from(minus_half_q, q * q / 4.0 + p * p * p / 27.0));
    const double shift = -b / 3.0;
    if (C == Complex(0.0, 0.0)) {
        return {Complex(shift), Complex(shift), Complex(shift)};
    }
    std::array<Complex, 3> roots;
    Complex branch = C;
    for (int k = 0; k < 3; ++k) {
        roots[k] = branch - p / (3.0 * branch) + shift;
        branch *= kCubeUnity;
    }
    return roots;
}

std::vector<Complex> solve_polynomial(const QuarticPolynomial &p) {
    std::size_t lead = 0;
    while (lead < p.c.size()) {
        double rest = 0.0;
        for (std::size_t i = lead + 1; i < p.c.size(); ++i) {
            rest = std::max(rest, std::abs(p.c[i]));
        }
        if (p.c[lead] != 0.0 && std::abs(p.c[lead]) >= 1e-14 * rest) {
            break;
        }
        ++lead;
    }
    const int degree = static_cast<int>(p.c.size()) - 1 - static_cast<int>(lead);
    if (degree <= 0) {
        return {};
    }
    const double A = p.c[lead];
    auto coef = [&](int k) { return p.c[lead + static_cast<std::size_t>(k)] / A; };

    switch (degree) {
        case 4: {
            const auto r = solve_quartic_closed_form(Quartic{coef(1), coef(2), coef(3), coef(4)});
            return {r.begin(), r.end()};
        }
        case 3: {
            const auto r = solve_cubic_closed_form(coef(1), coef(2), coef(3));
            return {r.begin(), r.end()};
        }
        case 2: {
            const auto r = solve_monic_quadratic(coef(1), coef(2));
            return {r.begin(), r.end()};
        }
        default:
            return {Complex(-coef(1))};
    }
}

std::vector<double> real_roots_filtered(std::span<const Complex> roots, double imag_tol, double mag_bound) {
    std::vector<double> out;
    out.reserve(roots.size());
    for (const Complex &r : roots) {
        if (std::abs(r.imag()) < imag_tol && std::abs(r.real()) < mag_bound) {
            out.push_back(r.real());
        }
    }
    return out;
}

}  // namespace gcpose
