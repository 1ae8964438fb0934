#pragma once

#include <complex>

namespace ramanecho {

using cplx = std::complex<double>;

cplx complex_gamma(cplx z);
cplx log_gamma(cplx z);       // principal branch not guaranteed; exp() of it is Gamma(z)
cplx reciprocal_gamma(cplx z); // entire; zero at the poles of Gamma

// J_nu(x) for complex order and real x >= 0. Series up to x = 20, Bessel ODE beyond.
cplx bessel_j(cplx nu, double x);
cplx bessel_j_series(cplx nu, double x);
cplx bessel_j_ode(cplx nu, double x, double x_start = 10.0);

// J_nu(x) Gamma(nu+1) / (x/2)^nu  =  sum_m (-x^2/4)^m / (m! (nu+1)_m).
// Bounded for large |Im nu| where J itself over/underflows.
cplx bessel_j_regularized(cplx nu, double x);

// J_{(1+ia)/2} J_{(1-ia)/2} + J_{(-1+ia)/2} J_{(-1-ia)/2} at argument x.
cplx bessel_cross_product_m(cplx alpha_tilde, double x);

// Faddeeva function w(z) = exp(-z^2) erfc(-iz).
cplx faddeeva_w(cplx z);

}  // namespace ramanecho
