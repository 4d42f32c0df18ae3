#include "garding/group.hpp"

#include <algorithm>
#include <boost/math/special_functions/legendre.hpp>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>

#include "garding/errors.hpp"
#include "garding/wigner.hpp"

namespace garding {

using std::numbers::pi;

GroupDescriptor GroupDescriptor::torus(int n) {
    if (n < 1) throw ConfigError("torus dimension must be positive");
    GroupDescriptor g;
    g.kind = GroupKind::Torus;
    g.n = n;
    g.step = 1;
    g.hausdorff_dim = n;
    for (int j = 0; j < n; ++j) g.fields.push_back(j);
    return g;
}

GroupDescriptor GroupDescriptor::su2() {
    GroupDescriptor g;
    g.kind = GroupKind::SU2;
    g.n = 3;
    g.step = 2;
    g.hausdorff_dim = 2 * 1 + 1 * 2;  // dim H1 = 2 at weight 1, one more direction at weight 2
    g.fields = {0, 1};
    return g;
}

double GroupDescriptor::volume() const {
    return kind == GroupKind::Torus ? std::pow(2 * pi, n) : 16 * pi * pi;
}

std::string GroupDescriptor::name() const {
    return kind == GroupKind::Torus ? "torus(" + std::to_string(n) + ")" : "su2";
}

double LieAlgebraVector::central_norm() const {
    double s = 0;
    for (double v : c) s += v * v;
    return std::sqrt(s);
}

long DualIndex::lambda4() const {
    if (kind == GroupKind::SU2) return long(two_l) * (two_l + 2);
    long s = 0;
    for (int v : k) s += long(v) * v;
    return 4 * s;
}

double DualIndex::weight() const { return std::sqrt(1.0 + lambda()); }

double DualIndex::degree() const {
    if (kind == GroupKind::SU2) return 0.5 * two_l;
    return std::sqrt(0.25 * double(lambda4()));
}

std::string DualIndex::label() const {
    std::ostringstream os;
    if (kind == GroupKind::SU2) {
        os << "l=" << (two_l % 2 ? std::to_string(two_l) + "/2" : std::to_string(two_l / 2));
    } else {
        os << "(";
        for (std::size_t i = 0; i < k.size(); ++i) os << (i ? "," : "") << k[i];
        os << ")";
    }
    return os.str();
}

bool DualIndex::operator<(const DualIndex& o) const {
    const long a = lambda4(), b = o.lambda4();
    if (a != b) return a < b;
    if (kind == GroupKind::SU2) return two_l < o.two_l;
    return k < o.k;
}

double su2_cutoff(double l) { return std::sqrt(1.0 + l * (l + 1.0)); }

std::vector<DualIndex> enumerate_dual(const GroupDescriptor& g, double cutoff) {
    if (!(cutoff >= 1.0)) throw ConfigError("dual cutoff must be >= 1");
    // <xi> <= cutoff, with a relative slack so that cutoffs built from
    // su2_cutoff() or sqrt() land on the intended shell.
    const double lim4 = 4.0 * (cutoff * cutoff - 1.0) * (1.0 + 1e-12) + 1e-9;
    std::vector<DualIndex> out;
    if (g.kind == GroupKind::SU2) {
        for (int two_l = 0;; ++two_l) {
            if (double(two_l) * (two_l + 2) > lim4) break;
            out.push_back(DualIndex::spin(two_l));
        }
        return out;
    }
    const int r = int(std::floor(std::sqrt(lim4 / 4.0)));
    std::vector<int> k(g.n, -r);
    while (true) {
        DualIndex d = DualIndex::torus(k);
        if (double(d.lambda4()) <= lim4) out.push_back(std::move(d));
        int i = g.n - 1;
        while (i >= 0 && k[i] == r) k[i--] = -r;
        if (i < 0) break;
        ++k[i];
    }
    std::sort(out.begin(), out.end());
    return out;
}

GroupPoint identity(const GroupDescriptor& g) {
    return GroupPoint{std::vector<double>(g.kind == GroupKind::Torus ? g.n : 3, 0.0)};
}

namespace {

double wrap(double a, double period) {
    double r = std::fmod(a, period);
    if (r < 0) r += period;
    if (r >= period) r -= period;
    return r;
}

}  // namespace

Eigen::Matrix2cd su2_matrix(const GroupPoint& x) {
    const double al = x.c[0], be = x.c[1], ga = x.c[2];
    const double c = std::cos(0.5 * be), s = std::sin(0.5 * be);
    Eigen::Matrix2cd U;
    U(0, 0) = std::polar(c, -0.5 * (al + ga));
    U(0, 1) = std::polar(-s, -0.5 * (al - ga));
    U(1, 0) = std::polar(s, 0.5 * (al - ga));
    U(1, 1) = std::polar(c, 0.5 * (al + ga));
    return U;
}

GroupPoint su2_point(const Eigen::Matrix2cd& U) {
    const cd a = U(0, 0), b = U(1, 0);
    const double beta = 2.0 * std::atan2(std::abs(b), std::abs(a));
    double alpha, gamma;
    const double tiny = 1e-300;
    if (std::abs(b) < tiny) {
        alpha = 0.0;
        gamma = -2.0 * std::arg(a);
    } else if (std::abs(a) < tiny) {
        alpha = 0.0;
        gamma = -2.0 * std::arg(b);
    } else {
        const double u = -2.0 * std::arg(a), v = 2.0 * std::arg(b);
        alpha = 0.5 * (u + v);
        gamma = 0.5 * (u - v);
    }
    // (alpha + 2pi, gamma + 2pi) is the same element.
    const double aw = wrap(alpha, 2 * pi);
    gamma += aw - alpha;
    return GroupPoint{{aw, beta, wrap(gamma, 4 * pi)}};
}

GroupPoint multiply(const GroupDescriptor& g, const GroupPoint& x, const GroupPoint& y) {
    if (g.kind == GroupKind::SU2) return su2_point(su2_matrix(x) * su2_matrix(y));
    GroupPoint z{std::vector<double>(g.n)};
    for (int i = 0; i < g.n; ++i) z.c[i] = wrap(x.c[i] + y.c[i], 2 * pi);
    return z;
}

GroupPoint inverse(const GroupDescriptor& g, const GroupPoint& x) {
    if (g.kind == GroupKind::SU2) return su2_point(su2_matrix(x).adjoint());
    GroupPoint z{std::vector<double>(g.n)};
    for (int i = 0; i < g.n; ++i) z.c[i] = wrap(-x.c[i], 2 * pi);
    return z;
}

Eigen::MatrixXcd rep_matrix(const GroupDescriptor& g, const DualIndex& xi, const GroupPoint& x) {
    if (g.kind == GroupKind::Torus) {
        if (xi.kind != GroupKind::Torus || int(xi.k.size()) != g.n)
            throw DomainError("dual index does not belong to " + g.name());
        double ph = 0;
        for (int i = 0; i < g.n; ++i) ph += xi.k[i] * x.c[i];
        Eigen::MatrixXcd M(1, 1);
        M(0, 0) = std::polar(1.0, ph);
        return M;
    }
    if (xi.kind != GroupKind::SU2 || xi.two_l < 0 || xi.two_l > 390)
        throw DomainError("dual index outside the supported SU(2) range");
    const int d = xi.two_l + 1;
    const Eigen::MatrixXd dm = wigner_d_matrix(xi.two_l, x.c[1]);
    Eigen::MatrixXcd D(d, d);
    for (int i = 0; i < d; ++i) {
        const double mi = 0.5 * (2 * i - xi.two_l);
        for (int j = 0; j < d; ++j) {
            const double mj = 0.5 * (2 * j - xi.two_l);
            D(i, j) = std::polar(dm(i, j), -mi * x.c[0] - mj * x.c[2]);
        }
    }
    return D;
}

Eigen::MatrixXcd lie_rep(const GroupDescriptor& g, const DualIndex& xi, int j) {
    if (g.kind == GroupKind::Torus) {
        Eigen::MatrixXcd M(1, 1);
        M(0, 0) = cd(0, xi.k.at(j));
        return M;
    }
    // X_j = -i sigma_j / 2 maps to -i J_j, rows/columns in ascending m.
    const int d = xi.two_l + 1;
    const double l = 0.5 * xi.two_l;
    Eigen::MatrixXcd J = Eigen::MatrixXcd::Zero(d, d);
    for (int i = 0; i < d; ++i) {
        const double m = i - l;
        if (j == 2) {
            J(i, i) = m;
        } else if (i + 1 < d) {
            const double up = 0.5 * std::sqrt(l * (l + 1) - m * (m + 1));  // <m+1|J+|m>/2
            if (j == 0) {
                J(i + 1, i) = up;
                J(i, i + 1) = up;
            } else {
                J(i + 1, i) = cd(0, -up);
                J(i, i + 1) = cd(0, up);
            }
        }
    }
    return cd(0, -1) * J;
}

Eigen::MatrixXcd lie_rep_square(const GroupDescriptor& g, const DualIndex& xi, int j) {
    const Eigen::MatrixXcd X = lie_rep(g, xi, j);
    const int d = int(X.rows());
    Eigen::MatrixXcd Y = Eigen::MatrixXcd::Zero(d, d);
    for (int r = 0; r < d; ++r)
        for (int m = std::max(0, r - 1); m <= std::min(d - 1, r + 1); ++m)
            for (int c = std::max(0, m - 1); c <= std::min(d - 1, m + 1); ++c) Y(r, c) += X(r, m) * X(m, c);
    return Y;
}

GroupPoint exp_map(const GroupDescriptor& g, const LieAlgebraVector& Y) {
    if (g.kind == GroupKind::Torus) {
        GroupPoint x{std::vector<double>(g.n)};
        for (int i = 0; i < g.n; ++i) x.c[i] = wrap(Y.c.at(i), 2 * pi);
        return x;
    }
    const double th = Y.central_norm();
    const double c = std::cos(0.5 * th);
    const double s = th > 0 ? std::sin(0.5 * th) / th : 0.5;
    // exp(-i Y.sigma / 2)
    Eigen::Matrix2cd U;
    U(0, 0) = cd(c, -s * Y.c[2]);
    U(1, 1) = cd(c, s * Y.c[2]);
    U(0, 1) = cd(-s * Y.c[1], -s * Y.c[0]);
    U(1, 0) = cd(s * Y.c[1], -s * Y.c[0]);
    return su2_point(U);
}

LieAlgebraVector log_map(const GroupDescriptor& g, const GroupPoint& x) {
    if (g.kind == GroupKind::Torus) {
        LieAlgebraVector Y{std::vector<double>(g.n)};
        for (int i = 0; i < g.n; ++i) {
            double v = wrap(x.c[i], 2 * pi);
            if (v > pi) v -= 2 * pi;
            Y.c[i] = v;
        }
        return Y;
    }
    const Eigen::Matrix2cd U = su2_matrix(x);
    const double c = std::clamp(0.5 * (U(0, 0) + U(1, 1)).real(), -1.0, 1.0);
    const double th = 2.0 * std::acos(c);
    if (th > 2 * pi - 1e-9) throw DomainError("log_map: point outside the injectivity ball");
    const double s = std::sin(0.5 * th);
    const double f = s > 1e-300 ? th / s : 2.0;
    // U = cos(th/2) I - i sin(th/2) n.sigma
    return LieAlgebraVector{{-f * U(1, 0).imag(), f * U(1, 0).real(), -f * U(0, 0).imag()}};
}

double haar_density_radial(const GroupDescriptor& g, double theta) {
    if (g.kind == GroupKind::Torus) return 1.0;
    if (theta >= 2 * pi) throw DomainError("density requested outside the injectivity ball");
    if (theta < 1e-8) return 1.0 - theta * theta / 12.0;
    const double q = std::sin(0.5 * theta) / (0.5 * theta);
    return q * q;
}

double haar_density(const GroupDescriptor& g, const LieAlgebraVector& Y) {
    return haar_density_radial(g, Y.central_norm());
}

// The Haar density in exponential coordinates is the Jacobian of exp measured in
// left-translated frames, so the two coincide on these groups.
double exp_jacobian(const GroupDescriptor& g, const LieAlgebraVector& Y) { return haar_density(g, Y); }

const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre(int n) {
    static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    const auto zeros = boost::math::legendre_p_zeros<double>(n);
    std::vector<double> x, w;
    for (auto it2 = zeros.rbegin(); it2 != zeros.rend(); ++it2)
        if (*it2 != 0.0) x.push_back(-*it2);
    if (n % 2) x.push_back(0.0);
    for (double z : zeros)
        if (z != 0.0) x.push_back(z);
    // polish in extended precision so the weights sum to 2 at rounding level
    for (double& z : x) {
        long double t = z;
        for (int it2 = 0; it2 < 3; ++it2)
            t -= boost::math::legendre_p(n, t) / boost::math::legendre_p_prime(n, t);
        const long double dp = boost::math::legendre_p_prime(n, t);
        z = double(t);
        w.push_back(double(2.0L / ((1.0L - t * t) * dp * dp)));
    }
    return cache.emplace(n, std::make_pair(std::move(x), std::move(w))).first->second;
}

QuadratureRule haar_quadrature(const GroupDescriptor& g, double exactness_degree) {
    if (!(exactness_degree >= 0.5)) throw ConfigError("quadrature degree must be >= 1/2");
    QuadratureRule R;
    R.group = g;
    if (g.kind == GroupKind::Torus) {
        const int D = int(std::ceil(exactness_degree - 1e-12));
        R.degree = D;
        const int N = 4 * D + 1;  // oversampled so band violations are visible
        R.shape.assign(g.n, N);
        std::size_t total = 1;
        for (int i = 0; i < g.n; ++i) total *= N;
        R.nodes.reserve(total);
        std::vector<int> idx(g.n, 0);
        for (std::size_t t = 0; t < total; ++t) {
            GroupPoint p{std::vector<double>(g.n)};
            for (int i = 0; i < g.n; ++i) p.c[i] = 2 * pi * idx[i] / N;
            R.nodes.push_back(std::move(p));
            R.weights.push_back(1.0 / double(total));
            for (int i = g.n - 1; i >= 0; --i) {
                if (++idx[i] < N) break;
                idx[i] = 0;
            }
        }
        return R;
    }
    const int two_D = int(std::ceil(2 * exactness_degree - 1e-12));
    R.degree = 0.5 * two_D;
    const int na = 2 * two_D + 1, ng = 2 * two_D + 1, nb = two_D + 1;
    R.shape = {nb, na, ng};
    const auto& gl = gauss_legendre(nb);
    for (int b = 0; b < nb; ++b) {
        // ascending beta
        const double x = gl.first[nb - 1 - b];
        R.beta.push_back(std::acos(x));
        R.beta_w.push_back(0.5 * gl.second[nb - 1 - b]);
    }
    R.nodes.reserve(std::size_t(nb) * na * ng);
    for (int b = 0; b < nb; ++b)
        for (int a = 0; a < na; ++a)
            for (int c = 0; c < ng; ++c) {
                R.nodes.push_back(GroupPoint{{2 * pi * a / na, R.beta[b], 4 * pi * c / ng}});
                R.weights.push_back(R.beta_w[b] / (double(na) * ng));
            }
    return R;
}

}  // namespace garding
