#pragma once
// Kernels of the time-dependent Stokes system in the half-space R^n_+:
// heat kernel Gamma, Laplace fundamental solution E, the boundary potentials
// A, B, C_i, the radial kernel K and the Golovkin tensor.
//
// Axis indices are 0-based; axis n-1 is the normal direction.

#include <vector>

#include "hsflow/quad.hpp"

namespace hsflow {

struct SpacePoint {
    std::vector<double> tangential;
    double normal = 0.0;

    int dim() const { return static_cast<int>(tangential.size()) + 1; }
    double operator[](int k) const {
        return k < static_cast<int>(tangential.size()) ? tangential[k] : normal;
    }
    /// Full coordinate vector (x', x_n).
    std::vector<double> full() const;
    static SpacePoint from_full(const std::vector<double>& x);
};

struct KernelValue {
    double value = 0.0;
    double abs_error = 0.0;
};

/// Which of the two equivalent integral representations to evaluate.
enum class Form { First, Second };

/// Multi-index helper: e.g. deriv(3, {0, 2}) = d_0 d_2 in R^3.
std::vector<int> multi_index(int n, std::initializer_list<int> axes);

/// 1-D heat kernel (4 pi t)^{-1/2} e^{-y^2/4t} and its y-derivatives up to order 3.
double heat1d(double y, double t, int k = 0);

/// d^deriv Gamma(x, t). Exactly 0 for t <= 0. Total order <= 3.
KernelValue heat_kernel(const std::vector<double>& x, double t, const std::vector<int>& deriv = {});

/// d^deriv E(x), E(x) = c_E |x|^{2-n} (n >= 3), -(1/2pi) log|x| (n = 2). Order <= 2.
KernelValue fundamental_solution(const std::vector<double>& x, const std::vector<int>& deriv = {});

/// A(x,t) = int_Sigma Gamma(z',0,t) E(x-z') dz', n in {2, 3}.
/// First derivatives are analytic (Second form); higher ones use centred differences.
KernelValue func_A(const SpacePoint& x, double t, const std::vector<int>& deriv, const QuadSpec& q,
                   Form form = Form::Second);

/// B(x,t) = int_Sigma Gamma(x-z',t) E(z',0) dz', n in {2, 3}.
/// The First form factors B = Gamma_1(x_n,t) B'(x',t), so normal derivatives come from
/// derivatives of Gamma_1 (in particular d_n B = -(x_n/2t) B). Tangential order <= 2 is
/// analytic; order 3 uses a centred difference.
KernelValue func_B(const SpacePoint& x, double t, const std::vector<int>& deriv, const QuadSpec& q,
                   Form form = Form::First);

/// C_i(x,y,t) = int_0^{x_n} int_Sigma d_n Gamma(x-y*-z,t) d_i E(z) dz, optionally
/// differentiated once in the tangential x-direction `tangential_deriv` (-1 for none).
KernelValue func_Ci(int i, const SpacePoint& x, const SpacePoint& y, double t, const QuadSpec& q,
                    int tangential_deriv = -1);

/// d_{x_n} C_i through the derivative identities (tangential derivatives only are integrated).
KernelValue ci_normal_derivative(int i, const SpacePoint& x, const SpacePoint& y, double t,
                                 const QuadSpec& q);

/// d_{x_n} C_i by differentiating under the integral sign (Leibniz rule). Independent route.
KernelValue ci_normal_derivative_leibniz(int i, const SpacePoint& x, const SpacePoint& y, double t,
                                         const QuadSpec& q);

/// d_{y_n} C_i by differentiating under the integral sign.
KernelValue ci_yn_derivative(int i, const SpacePoint& x, const SpacePoint& y, double t,
                             const QuadSpec& q);

/// Function part of the Golovkin tensor for t > 0. j < n-1 uses
/// -2 delta_ij d_n Gamma - 4 d_j C_i(x,0,t); j = n-1 uses the representation without
/// normal derivatives of C.
KernelValue golovkin(int i, int j, const SpacePoint& x, double t, const QuadSpec& q);

/// Golovkin tensor always through -2 delta_ij d_n Gamma - 4 d_j C_i, with d_n C_i from the
/// Leibniz route. Used to cross-check golovkin() for j = n-1.
KernelValue golovkin_via_ci(int i, int j, const SpacePoint& x, double t, const QuadSpec& q);

/// K(x',t) = int_Sigma e^{-|x'-z'|^2/4t} |z'|^{2-n} dz' by quadrature, n = dim(x')+1 >= 3.
KernelValue kernel_K(const std::vector<double>& xprime, double t, const QuadSpec& q);

/// Closed form 2 pi sqrt(pi t) I_0(d^2/8t) e^{-d^2/8t} of K for n = 3.
double kernel_K_closed_form(const std::vector<double>& xprime, double t);

/// Radius beyond which a Gaussian e^{-r^2/4t} is below 1e-16.
double gaussian_cutoff(double t);

}  // namespace hsflow
