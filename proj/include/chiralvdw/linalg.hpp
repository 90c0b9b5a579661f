#pragma once

#include <complex>

#include <Eigen/Dense>

namespace chiralvdw {

using Complex = std::complex<double>;

using Vector3 = Eigen::Vector3d;
using CVector3 = Eigen::Vector3cd;
using Tensor3 = Eigen::Matrix3d;
using CTensor3 = Eigen::Matrix3cd;

inline constexpr double kPi = 3.14159265358979323846;

// dyadic(u, v)_{ij} = u_i v_j (no conjugation).
template <class A, class B>
auto dyadic(const Eigen::MatrixBase<A>& u, const Eigen::MatrixBase<B>& v) {
  return (u * v.transpose()).eval();
}

// Matrix [v]_x with [v]_x w = v x w.
template <class Scalar>
Eigen::Matrix<Scalar, 3, 3> cross_matrix(const Eigen::Matrix<Scalar, 3, 1>& v) {
  Eigen::Matrix<Scalar, 3, 3> m;
  m << Scalar(0), -v(2), v(1),
       v(2), Scalar(0), -v(0),
       -v(1), v(0), Scalar(0);
  return m;
}

// v x T: cross product applied to every column of T.
template <class Scalar>
Eigen::Matrix<Scalar, 3, 3> cross_left(const Eigen::Matrix<Scalar, 3, 1>& v,
                                       const Eigen::Matrix<Scalar, 3, 3>& t) {
  return cross_matrix(v) * t;
}

// T x v: cross product applied to every row of T, (T x v)_{ij} = eps_{jkl} T_{ik} v_l.
template <class Scalar>
Eigen::Matrix<Scalar, 3, 3> cross_right(const Eigen::Matrix<Scalar, 3, 3>& t,
                                        const Eigen::Matrix<Scalar, 3, 1>& v) {
  return t * cross_matrix(v);
}

inline double max_abs_imag(const CTensor3& t) { return t.imag().cwiseAbs().maxCoeff(); }

}  // namespace chiralvdw
