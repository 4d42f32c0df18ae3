#pragma once

#include <Eigen/Dense>
#include <complex>
#include <memory>
#include <string>
#include <vector>

namespace garding {

using cd = std::complex<double>;

enum class GroupKind { Torus, SU2 };

struct GroupDescriptor {
    GroupKind kind = GroupKind::Torus;
    int n = 1;              // torus dimension; 3 (algebra dimension) for SU(2)
    int step = 1;           // Hoermander step of the vector-field system
    int hausdorff_dim = 1;
    std::vector<int> fields;  // indices into the fixed Lie algebra basis

    static GroupDescriptor torus(int n);
    static GroupDescriptor su2();  // two-field system {X1, X2}

    int algebra_dim() const { return kind == GroupKind::Torus ? n : 3; }
    // Volume of the group in exponential coordinates (Lebesgue on the algebra).
    double volume() const;
    std::string name() const;
    bool operator==(const GroupDescriptor& o) const { return kind == o.kind && n == o.n; }
};

struct GroupPoint {
    std::vector<double> c;  // torus angles, or Euler (alpha, beta, gamma)
};

struct LieAlgebraVector {
    std::vector<double> c;
    double central_norm() const;
};

struct DualIndex {
    GroupKind kind = GroupKind::Torus;
    std::vector<int> k;  // torus lattice point
    int two_l = 0;       // SU(2) spin, doubled

    static DualIndex torus(std::vector<int> k) { return {GroupKind::Torus, std::move(k), 0}; }
    static DualIndex spin(int two_l) { return {GroupKind::SU2, {}, two_l}; }

    int dim() const { return kind == GroupKind::Torus ? 1 : two_l + 1; }
    long lambda4() const;  // 4 * Laplace eigenvalue, exact
    double lambda() const { return 0.25 * double(lambda4()); }
    double weight() const;  // (1 + lambda)^(1/2)
    double degree() const;  // |k| on the torus, l on SU(2)
    std::string label() const;

    bool operator<(const DualIndex& o) const;
    bool operator==(const DualIndex& o) const { return kind == o.kind && k == o.k && two_l == o.two_l; }
};

// <xi> for an SU(2) spin l, handy for turning l-cutoffs into weight cutoffs.
double su2_cutoff(double l);

struct QuadratureRule {
    GroupDescriptor group;
    double degree = 0;
    std::vector<GroupPoint> nodes;
    std::vector<double> weights;
    std::vector<int> shape;         // torus: per axis; SU(2): {n_beta, n_alpha, n_gamma}
    std::vector<double> beta, beta_w;  // SU(2) Gauss-Legendre data (weights sum to 1)
    std::size_t size() const { return weights.size(); }

    // d^l(beta_b) for all two_l <= two_lmax, indexed [b][two_l]; built on first use.
    const std::vector<std::vector<Eigen::MatrixXd>>& d_table(int two_lmax) const;

private:
    mutable std::shared_ptr<std::vector<std::vector<Eigen::MatrixXd>>> dtab_;
    mutable int dtab_two_l_ = -1;
};

std::vector<DualIndex> enumerate_dual(const GroupDescriptor& g, double cutoff);

GroupPoint identity(const GroupDescriptor& g);
GroupPoint multiply(const GroupDescriptor& g, const GroupPoint& x, const GroupPoint& y);
GroupPoint inverse(const GroupDescriptor& g, const GroupPoint& x);

Eigen::MatrixXcd rep_matrix(const GroupDescriptor& g, const DualIndex& xi, const GroupPoint& x);
// Differential of the representation on the j-th basis vector of the algebra.
Eigen::MatrixXcd lie_rep(const GroupDescriptor& g, const DualIndex& xi, int j);
// lie_rep(j)^2, using that the SU(2) matrices are tridiagonal.
Eigen::MatrixXcd lie_rep_square(const GroupDescriptor& g, const DualIndex& xi, int j);

GroupPoint exp_map(const GroupDescriptor& g, const LieAlgebraVector& Y);
LieAlgebraVector log_map(const GroupDescriptor& g, const GroupPoint& x);
double haar_density(const GroupDescriptor& g, const LieAlgebraVector& Y);
double exp_jacobian(const GroupDescriptor& g, const LieAlgebraVector& Y);
// Same densities as functions of the central norm alone.
double haar_density_radial(const GroupDescriptor& g, double theta);

QuadratureRule haar_quadrature(const GroupDescriptor& g, double exactness_degree);

// SU(2) in the defining representation (first row/column is spin up).
Eigen::Matrix2cd su2_matrix(const GroupPoint& x);
GroupPoint su2_point(const Eigen::Matrix2cd& U);

// Nodes and weights on [-1, 1], cached.
const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre(int n);

// Exact derivative along the j-th left-invariant field of grid samples.
Eigen::VectorXcd left_derivative(const QuadratureRule& rule, int j, const Eigen::VectorXcd& f);

}  // namespace garding
