#pragma once

namespace hsflow {

/// Exponentially scaled modified Bessel functions I_k(x) e^{-x}, k = 0, 1, 2, for x >= 0.
/// Writes the three values into out[0..2].
void bessel_i012_scaled(double x, double out[3]);

double bessel_i0_scaled(double x);
double bessel_i1_scaled(double x);

/// Volume of the unit ball in R^n.
double unit_ball_volume(int n);

/// Surface area of the unit sphere S^{n-1} in R^n.
double unit_sphere_area(int n);

/// Normalisation c_E = 1 / (n (n-2) |B_1|) of the fundamental solution, n >= 3.
double fundamental_constant(int n);

/// C_n = 4 (4 pi)^{-n/2} c_E, the constant linking B and K.
double cn_constant(int n);

}  // namespace hsflow
