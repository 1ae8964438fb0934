#pragma once

#include <Eigen/Core>
#include <unsupported/Eigen/MatrixFunctions>

#include "ramanecho/params.hpp"

namespace ramanecho::detail {

// y(t+h) = Phi y + u E(t) + v E(t+h) for y' = L y + b E with E linear over the step:
// Phi = exp(hL), u = h (phi1 - phi2)(hL) b, v = h phi2(hL) b.
template <int N>
struct StepCoeffs {
    Eigen::Matrix<cplx, N, N> phi;
    Eigen::Matrix<cplx, N, 1> u;
    Eigen::Matrix<cplx, N, 1> v;
};

template <int N>
StepCoeffs<N> step_coeffs(const Eigen::Matrix<cplx, N, N>& L, const Eigen::Matrix<cplx, N, 1>& b, double h) {
    // exp of [[hL, hb, 0], [0, 0, 1], [0, 0, 0]] carries h phi1 b and h phi2 b in its last columns
    Eigen::Matrix<cplx, N + 2, N + 2> a = Eigen::Matrix<cplx, N + 2, N + 2>::Zero();
    a.template topLeftCorner<N, N>() = h * L;
    a.template block<N, 1>(0, N) = h * b;
    a(N, N + 1) = 1.0;
    const Eigen::Matrix<cplx, N + 2, N + 2> e = a.exp();
    StepCoeffs<N> c;
    c.phi = e.template topLeftCorner<N, N>();
    const Eigen::Matrix<cplx, N, 1> p1 = e.template block<N, 1>(0, N);
    const Eigen::Matrix<cplx, N, 1> p2 = e.template block<N, 1>(0, N + 1);
    c.v = p2;
    c.u = p1 - p2;
    return c;
}

}  // namespace ramanecho::detail
