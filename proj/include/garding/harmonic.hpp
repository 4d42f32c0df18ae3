#pragma once

#include <map>
#include <vector>

#include "garding/group.hpp"

namespace garding {

// Peter-Weyl basis e_{xi,ij} = sqrt(d_xi) xi_ij, flattened as offset(xi) + i*d + j.
struct BasisLayout {
    std::vector<DualIndex> duals;
    std::vector<int> offset;
    int size = 0;

    BasisLayout() = default;
    explicit BasisLayout(std::vector<DualIndex> d);

    int find(const DualIndex& xi) const;  // -1 when absent
    int index(int dual, int i, int j) const { return offset[dual] + i * duals[dual].dim() + j; }
    int max_two_l() const;

private:
    std::map<DualIndex, int> lookup_;
};

using GridFunction = Eigen::VectorXcd;

struct FourierCoefficients {
    GroupDescriptor group;
    std::vector<DualIndex> duals;
    std::vector<Eigen::MatrixXcd> blocks;

    // u_{xi,ij} = sqrt(d) fhat(xi)_{ji}
    Eigen::VectorXcd to_basis(const BasisLayout& layout) const;
    static FourierCoefficients from_basis(const GroupDescriptor& g, const BasisLayout& layout,
                                          const Eigen::VectorXcd& u);
};

FourierCoefficients forward_transform(const QuadratureRule& rule, const GridFunction& f,
                                      const std::vector<DualIndex>& duals);
GridFunction inverse_transform(const FourierCoefficients& c, const QuadratureRule& rule);
double plancherel_norm(const FourierCoefficients& c);

// Every dual index a rule of the given degree resolves (box on the torus).
std::vector<DualIndex> resolved_duals(const QuadratureRule& rule);

// Samples of a callable on the rule's nodes.
template <class F>
GridFunction sample(const QuadratureRule& rule, F&& f) {
    GridFunction v(rule.size());
    for (std::size_t i = 0; i < rule.size(); ++i) v[i] = f(rule.nodes[i]);
    return v;
}

double quadrature_l2(const QuadratureRule& rule, const GridFunction& f);

}  // namespace garding
