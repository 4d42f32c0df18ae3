#include "garding/harmonic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "garding/errors.hpp"
#include "garding/wigner.hpp"

namespace garding {

BasisLayout::BasisLayout(std::vector<DualIndex> d) : duals(std::move(d)) {
    for (std::size_t k = 0; k < duals.size(); ++k) {
        offset.push_back(size);
        size += duals[k].dim() * duals[k].dim();
        lookup_.emplace(duals[k], int(k));
    }
}

int BasisLayout::find(const DualIndex& xi) const {
    auto it = lookup_.find(xi);
    return it == lookup_.end() ? -1 : it->second;
}

int BasisLayout::max_two_l() const {
    int t = 0;
    for (const auto& d : duals) t = std::max(t, d.two_l);
    return t;
}

Eigen::VectorXcd FourierCoefficients::to_basis(const BasisLayout& layout) const {
    Eigen::VectorXcd u = Eigen::VectorXcd::Zero(layout.size);
    for (std::size_t k = 0; k < duals.size(); ++k) {
        const int p = layout.find(duals[k]);
        if (p < 0) continue;
        const int d = duals[k].dim();
        const double sq = std::sqrt(double(d));
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) u[layout.index(p, i, j)] = sq * blocks[k](j, i);
    }
    return u;
}

FourierCoefficients FourierCoefficients::from_basis(const GroupDescriptor& g, const BasisLayout& layout,
                                                    const Eigen::VectorXcd& u) {
    FourierCoefficients c;
    c.group = g;
    c.duals = layout.duals;
    for (std::size_t k = 0; k < layout.duals.size(); ++k) {
        const int d = layout.duals[k].dim();
        const double sq = std::sqrt(double(d));
        Eigen::MatrixXcd B(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) B(j, i) = u[layout.index(int(k), i, j)] / sq;
        c.blocks.push_back(std::move(B));
    }
    return c;
}

const std::vector<std::vector<Eigen::MatrixXd>>& QuadratureRule::d_table(int two_lmax) const {
    if (dtab_ && dtab_two_l_ >= two_lmax) return *dtab_;
    auto t = std::make_shared<std::vector<std::vector<Eigen::MatrixXd>>>(beta.size());
    for (std::size_t b = 0; b < beta.size(); ++b) {
        (*t)[b].resize(two_lmax + 1);
        for (int par = 0; par < 2 && par <= two_lmax; ++par) {
            const int top = two_lmax - ((two_lmax - par) % 2);
            auto all = wigner_d_all(top, beta[b]);
            for (std::size_t k = 0; k < all.size(); ++k) (*t)[b][par + 2 * k] = std::move(all[k]);
        }
    }
    dtab_ = t;
    dtab_two_l_ = two_lmax;
    return *dtab_;
}

namespace {

using std::numbers::pi;

int max_two_l(const std::vector<DualIndex>& duals) {
    int t = 0;
    for (const auto& d : duals) t = std::max(t, d.two_l);
    return t;
}

int max_abs_k(const std::vector<DualIndex>& duals) {
    int K = 0;
    for (const auto& d : duals)
        for (int v : d.k) K = std::max(K, std::abs(v));
    return K;
}

// Row-major tensor: contract axis `axis` with M (new_len x old_len); dims[axis] becomes new_len.
std::vector<cd> axis_sweep(const std::vector<cd>& in, std::vector<int>& dims, int axis, const Eigen::MatrixXcd& M) {
    std::size_t outer = 1, inner = 1;
    for (int i = 0; i < axis; ++i) outer *= dims[i];
    for (std::size_t i = axis + 1; i < dims.size(); ++i) inner *= dims[i];
    const int len = dims[axis], nl = int(M.rows());
    std::vector<cd> out(outer * nl * inner);
    for (std::size_t o = 0; o < outer; ++o) {
        Eigen::Map<const Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> A(
            in.data() + o * len * inner, len, Eigen::Index(inner));
        Eigen::Map<Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> B(
            out.data() + o * nl * inner, nl, Eigen::Index(inner));
        B.noalias() = M * A;
    }
    dims[axis] = nl;
    return out;
}

std::size_t box_offset(const DualIndex& xi, const std::vector<int>& dims, int K) {
    std::size_t off = 0;
    for (std::size_t i = 0; i < dims.size(); ++i) off = off * dims[i] + std::size_t(xi.k[i] + K);
    return off;
}

}  // namespace

FourierCoefficients forward_transform(const QuadratureRule& rule, const GridFunction& f,
                                      const std::vector<DualIndex>& duals) {
    FourierCoefficients out;
    out.group = rule.group;
    out.duals = duals;
    if (std::size_t(f.size()) != rule.size()) throw std::invalid_argument("grid size mismatch");
    if (rule.group.kind == GroupKind::Torus) {
        const int K = max_abs_k(duals), W = 2 * K + 1;
        std::vector<cd> box(f.data(), f.data() + f.size());
        std::vector<int> dims = rule.shape;
        for (int i = 0; i < rule.group.n; ++i) {
            const int N = rule.shape[i];
            Eigen::MatrixXcd M(W, N);  // e^{-i k x} / N
            for (int k = 0; k < W; ++k)
                for (int x = 0; x < N; ++x) M(k, x) = std::polar(1.0 / N, -2 * pi * double(k - K) * x / N);
            box = axis_sweep(box, dims, i, M);
        }
        for (const auto& xi : duals) {
            Eigen::MatrixXcd B(1, 1);
            B(0, 0) = box[box_offset(xi, dims, K)];
            out.blocks.push_back(std::move(B));
        }
        return out;
    }
    const int nb = rule.shape[0], na = rule.shape[1], ng = rule.shape[2];
    const int TL = max_two_l(duals), W = 2 * TL + 1;  // slot two_m + TL
    // G[b][m][n] = sum_{a,c} f e^{i m alpha_a} e^{i n gamma_c} / (na ng)
    std::vector<Eigen::MatrixXcd> G(nb, Eigen::MatrixXcd::Zero(W, W));
    Eigen::MatrixXcd eg(ng, W), ea(na, W);
    for (int c = 0; c < ng; ++c)
        for (int s = 0; s < W; ++s) eg(c, s) = std::polar(1.0, 0.5 * (s - TL) * 4 * pi * c / ng);
    for (int a = 0; a < na; ++a)
        for (int s = 0; s < W; ++s) ea(a, s) = std::polar(1.0, 0.5 * (s - TL) * 2 * pi * a / na);
    for (int b = 0; b < nb; ++b) {
        Eigen::Map<const Eigen::MatrixXcd> F(f.data() + std::size_t(b) * na * ng, ng, na);
        // F(c, a); H(a, n) = sum_c F(c,a) eg(c,n)
        const Eigen::MatrixXcd H = F.transpose() * eg;
        G[b] = ea.transpose() * H / double(na * ng);
    }
    const auto& dt = rule.d_table(TL);
    for (const auto& xi : duals) {
        const int d = xi.dim();
        Eigen::MatrixXcd B = Eigen::MatrixXcd::Zero(d, d);
        for (int b = 0; b < nb; ++b) {
            const Eigen::MatrixXd& dm = dt[b][xi.two_l];
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) {
                    const int smj = 2 * j - xi.two_l + TL, smi = 2 * i - xi.two_l + TL;
                    B(i, j) += rule.beta_w[b] * dm(j, i) * G[b](smj, smi);
                }
        }
        out.blocks.push_back(std::move(B));
    }
    return out;
}

GridFunction inverse_transform(const FourierCoefficients& c, const QuadratureRule& rule) {
    GridFunction f = GridFunction::Zero(rule.size());
    if (rule.group.kind == GroupKind::Torus) {
        const int K = max_abs_k(c.duals), W = 2 * K + 1;
        std::vector<int> dims(rule.group.n, W);
        std::size_t total = 1;
        for (int d : dims) total *= d;
        std::vector<cd> box(total, cd(0));
        for (std::size_t k = 0; k < c.duals.size(); ++k) box[box_offset(c.duals[k], dims, K)] += c.blocks[k](0, 0);
        for (int i = 0; i < rule.group.n; ++i) {
            const int N = rule.shape[i];
            Eigen::MatrixXcd M(N, W);  // e^{i k x}
            for (int x = 0; x < N; ++x)
                for (int k = 0; k < W; ++k) M(x, k) = std::polar(1.0, 2 * pi * double(k - K) * x / N);
            box = axis_sweep(box, dims, i, M);
        }
        return Eigen::Map<const GridFunction>(box.data(), Eigen::Index(box.size()));
    }
    const int nb = rule.shape[0], na = rule.shape[1], ng = rule.shape[2];
    const int TL = max_two_l(c.duals), W = 2 * TL + 1;
    const auto& dt = rule.d_table(TL);
    Eigen::MatrixXcd eg(W, ng), ea(W, na);
    for (int c2 = 0; c2 < ng; ++c2)
        for (int s = 0; s < W; ++s) eg(s, c2) = std::polar(1.0, -0.5 * (s - TL) * 4 * pi * c2 / ng);
    for (int a = 0; a < na; ++a)
        for (int s = 0; s < W; ++s) ea(s, a) = std::polar(1.0, -0.5 * (s - TL) * 2 * pi * a / na);
    for (int b = 0; b < nb; ++b) {
        Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(W, W);  // H(m_i, m_j)
        for (std::size_t k = 0; k < c.duals.size(); ++k) {
            const int tl = c.duals[k].two_l, d = tl + 1;
            const Eigen::MatrixXd& dm = dt[b][tl];
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j)
                    H(2 * i - tl + TL, 2 * j - tl + TL) += double(d) * dm(i, j) * c.blocks[k](j, i);
        }
        // f(a, c) = sum ea(mi, a) H(mi, mj) eg(mj, c)
        const Eigen::MatrixXcd T = ea.transpose() * H * eg;  // (na, ng)
        for (int a = 0; a < na; ++a)
            for (int c2 = 0; c2 < ng; ++c2) f[(std::size_t(b) * na + a) * ng + c2] = T(a, c2);
    }
    return f;
}

double plancherel_norm(const FourierCoefficients& c) {
    double s = 0;
    for (std::size_t k = 0; k < c.duals.size(); ++k) s += c.duals[k].dim() * c.blocks[k].squaredNorm();
    return std::sqrt(s);
}

double quadrature_l2(const QuadratureRule& rule, const GridFunction& f) {
    double s = 0;
    for (std::size_t t = 0; t < rule.size(); ++t) s += rule.weights[t] * std::norm(f[t]);
    return std::sqrt(s);
}

std::vector<DualIndex> resolved_duals(const QuadratureRule& rule) {
    std::vector<DualIndex> out;
    if (rule.group.kind == GroupKind::SU2) {
        for (int tl = 0; tl <= int(std::lround(2 * rule.degree)); ++tl) out.push_back(DualIndex::spin(tl));
        return out;
    }
    const int n = rule.group.n, D = int(std::lround(rule.degree));
    std::vector<int> k(n, -D);
    while (true) {
        out.push_back(DualIndex::torus(k));
        int i = n - 1;
        while (i >= 0 && k[i] == D) k[i--] = -D;
        if (i < 0) break;
        ++k[i];
    }
    std::sort(out.begin(), out.end());
    return out;
}

Eigen::VectorXcd left_derivative(const QuadratureRule& rule, int j, const Eigen::VectorXcd& f) {
    const auto duals = resolved_duals(rule);
    FourierCoefficients c = forward_transform(rule, f, duals);
    const GridFunction back = inverse_transform(c, rule);
    const double scale = std::max(1.0, f.cwiseAbs().maxCoeff());
    if ((back - f).cwiseAbs().maxCoeff() > 1e-9 * scale)
        throw AliasingError("left_derivative: input is not band-limited for this quadrature");
    for (std::size_t k = 0; k < duals.size(); ++k) c.blocks[k] = lie_rep(rule.group, duals[k], j) * c.blocks[k];
    return inverse_transform(c, rule);
}

}  // namespace garding
