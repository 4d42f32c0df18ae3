#include "garding/wigner.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <cstdint>
#include <stdexcept>
#include <unordered_map>

namespace garding {
namespace {

double log_fact(int n) { return std::lgamma(double(n) + 1.0); }

// The single surviving term of the factorial sum when l = max(|m|, |n|).
double d_start(int two_l, int two_m, int two_n, double c, double s) {
    const int lpm = (two_l + two_m) / 2, lmm = (two_l - two_m) / 2;
    const int lpn = (two_l + two_n) / 2, lmn = (two_l - two_n) / 2;
    const int k = std::max(0, (two_n - two_m) / 2);
    const int a = lpn - k, b = (two_m - two_n) / 2 + k, e = lmm - k;
    const double logc = 0.5 * (log_fact(lpm) + log_fact(lmm) + log_fact(lpn) + log_fact(lmn)) -
                        (log_fact(a) + log_fact(k) + log_fact(b) + log_fact(e));
    const int pc = two_l + (two_n - two_m) / 2 - 2 * k;  // exponent of cos(beta/2)
    const int ps = (two_m - two_n) / 2 + 2 * k;
    const double sign = (((two_m - two_n) / 2 + k) % 2 == 0) ? 1.0 : -1.0;
    return sign * std::exp(logc) * std::pow(c, pc) * std::pow(s, ps);
}

// One upward step: returns d^{j+1} from d^j, d^{j-1}; j, m, n as doubles.
inline double d_step(double j, double m, double n, double cosb, double dj, double djm1) {
    if (j == 0.0) return cosb * dj;  // only (m, n) = (0, 0) exists at j = 0
    const double jp = j + 1.0;
    const double lhs = j * std::sqrt((jp * jp - m * m) * (jp * jp - n * n));
    const double t1 = (2.0 * j + 1.0) * (j * jp * cosb - m * n) * dj;
    const double t2 = jp * std::sqrt(std::max(0.0, (j * j - m * m) * (j * j - n * n))) * djm1;
    return (t1 - t2) / lhs;
}

}  // namespace

double wigner_d(int two_l, int two_m, int two_n, double beta) {
    if (two_l < 0 || std::abs(two_m) > two_l || std::abs(two_n) > two_l || (two_l - two_m) % 2 ||
        (two_l - two_n) % 2)
        throw std::invalid_argument("wigner_d: invalid (l, m, n)");
    const double c = std::cos(0.5 * beta), s = std::sin(0.5 * beta), cosb = std::cos(beta);
    int two_j = std::max(std::abs(two_m), std::abs(two_n));
    double dj = d_start(two_j, two_m, two_n, c, s), djm1 = 0.0;
    const double m = 0.5 * two_m, n = 0.5 * two_n;
    while (two_j < two_l) {
        const double next = d_step(0.5 * two_j, m, n, cosb, dj, djm1);
        djm1 = dj;
        dj = next;
        two_j += 2;
    }
    return dj;
}

std::vector<Eigen::MatrixXd> wigner_d_all(int two_lmax, double beta) {
    const int parity = two_lmax % 2;
    WignerStream st({beta}, parity, 2 * two_lmax);
    std::vector<Eigen::MatrixXd> out;
    for (int two_l = parity; two_l <= two_lmax; two_l += 2) {
        st.advance();
        const int d = two_l + 1;
        Eigen::MatrixXd D(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) D(i, j) = *st.values(2 * i - two_l, 2 * j - two_l);
        out.push_back(std::move(D));
    }
    return out;
}

Eigen::MatrixXd wigner_d_matrix(int two_l, double beta) { return wigner_d_all(two_l, beta).back(); }

double clebsch_gordan(int two_j1, int two_m1, int two_j2, int two_m2, int two_J, int two_M) {
    static const auto fact = [] {
        std::array<long double, 400> f{};
        f[0] = 1.0L;
        for (std::size_t i = 1; i < f.size(); ++i) f[i] = f[i - 1] * (long double)i;
        return f;
    }();
    if (two_m1 + two_m2 != two_M) return 0.0;
    if (std::abs(two_m1) > two_j1 || std::abs(two_m2) > two_j2 || std::abs(two_M) > two_J) return 0.0;
    if (two_J < std::abs(two_j1 - two_j2) || two_J > two_j1 + two_j2) return 0.0;
    if ((two_j1 + two_j2 + two_J) % 2 || (two_j1 - two_m1) % 2 || (two_j2 - two_m2) % 2 ||
        (two_J - two_M) % 2)
        return 0.0;
    const int j1pj2mJ = (two_j1 + two_j2 - two_J) / 2;
    const int Jpj1mj2 = (two_J + two_j1 - two_j2) / 2;
    const int Jmj1pj2 = (two_J - two_j1 + two_j2) / 2;
    const int total = (two_j1 + two_j2 + two_J) / 2 + 1;
    if (total >= (int)fact.size()) throw std::out_of_range("clebsch_gordan: spins too large");
    const int j1mm1 = (two_j1 - two_m1) / 2, j1pm1 = (two_j1 + two_m1) / 2;
    const int j2mm2 = (two_j2 - two_m2) / 2, j2pm2 = (two_j2 + two_m2) / 2;
    const int JpM = (two_J + two_M) / 2, JmM = (two_J - two_M) / 2;
    long double pre = (long double)(two_J + 1) * fact[Jpj1mj2] * fact[Jmj1pj2] * fact[j1pj2mJ] /
                      fact[total];
    pre *= fact[JpM] * fact[JmM] * fact[j1mm1] * fact[j1pm1] * fact[j2mm2] * fact[j2pm2];
    const int a4 = (two_J - two_j2 + two_m1) / 2, a5 = (two_J - two_j1 - two_m2) / 2;
    const int kmin = std::max({0, -a4, -a5});
    const int kmax = std::min({j1pj2mJ, j1mm1, j2pm2});
    long double sum = 0.0L;
    for (int k = kmin; k <= kmax; ++k) {
        const long double den = fact[k] * fact[j1pj2mJ - k] * fact[j1mm1 - k] * fact[j2pm2 - k] *
                                fact[a4 + k] * fact[a5 + k];
        sum += ((k % 2) ? -1.0L : 1.0L) / den;
    }
    return double(std::sqrt(pre) * sum);
}

WignerStream::WignerStream(const std::vector<double>& betas, int parity, int two_max_shift)
    : betas_(betas), parity_(parity & 1), two_max_shift_(two_max_shift - (two_max_shift % 2)) {
    for (double b : betas_) {
        cosb_.push_back(std::cos(b));
        half_cos_.push_back(std::cos(0.5 * b));
        half_sin_.push_back(std::sin(0.5 * b));
    }
}

std::size_t WignerStream::slot(int two_m, int two_n) const {
    const std::size_t mi = std::size_t((two_m + two_cap_) / 2);
    const std::size_t si = std::size_t((two_n - two_m + two_max_shift_) / 2);
    const std::size_t width = std::size_t(two_max_shift_ / 2 + 1 + two_max_shift_ / 2);
    return (mi * width + si) * betas_.size();
}

void WignerStream::grow(int two_lcap) {
    int cap = std::max(two_lcap, two_cap_ < 0 ? 16 + parity_ : 2 * two_cap_ + parity_);
    if ((cap - parity_) % 2) ++cap;
    const std::size_t width = std::size_t(two_max_shift_ + 1);
    const std::size_t nb = betas_.size();
    std::vector<double> ncur(std::size_t(cap + 1) * width * nb, 0.0), nprev(ncur.size(), 0.0);
    if (two_cap_ >= 0) {
        for (int two_m = -two_cap_; two_m <= two_cap_; two_m += 2)
            for (int sh = -two_max_shift_; sh <= two_max_shift_; sh += 2) {
                const std::size_t from = slot(two_m, two_m + sh);
                const std::size_t to =
                    (std::size_t((two_m + cap) / 2) * width + std::size_t((sh + two_max_shift_) / 2)) * nb;
                std::copy_n(cur_.begin() + from, nb, ncur.begin() + to);
                std::copy_n(prev_.begin() + from, nb, nprev.begin() + to);
            }
    }
    cur_.swap(ncur);
    prev_.swap(nprev);
    two_cap_ = cap;
}

void WignerStream::advance() {
    const int two_new = two_l_ < 0 ? parity_ : two_l_ + 2;
    if (two_new > two_cap_) grow(two_new);
    const std::size_t nb = betas_.size();
    const double j = 0.5 * two_l_;
    for (int two_m = -two_new; two_m <= two_new; two_m += 2) {
        const int lo = std::max(-two_new, two_m - two_max_shift_);
        const int hi = std::min(two_new, two_m + two_max_shift_);
        for (int two_n = lo; two_n <= hi; two_n += 2) {
            double* c = &cur_[slot(two_m, two_n)];
            double* p = &prev_[slot(two_m, two_n)];
            if (std::max(std::abs(two_m), std::abs(two_n)) == two_new) {
                for (std::size_t k = 0; k < nb; ++k) {
                    p[k] = 0.0;
                    c[k] = d_start(two_new, two_m, two_n, half_cos_[k], half_sin_[k]);
                }
                continue;
            }
            const double m = 0.5 * two_m, n = 0.5 * two_n;
            if (two_l_ == 0) {
                for (std::size_t k = 0; k < nb; ++k) {
                    p[k] = c[k];
                    c[k] *= cosb_[k];
                }
                continue;
            }
            const double jp = j + 1.0;
            const double inv = 1.0 / (j * std::sqrt((jp * jp - m * m) * (jp * jp - n * n)));
            const double b = jp * std::sqrt(std::max(0.0, (j * j - m * m) * (j * j - n * n)));
            const double a = 2.0 * j + 1.0, mn = m * n, jj = j * jp;
            for (std::size_t k = 0; k < nb; ++k) {
                const double next = (a * (jj * cosb_[k] - mn) * c[k] - b * p[k]) * inv;
                p[k] = c[k];
                c[k] = next;
            }
        }
    }
    two_l_ = two_new;
}

const double* WignerStream::values(int two_m, int two_n) const {
    if (std::abs(two_m) > two_l_ || std::abs(two_n) > two_l_ || std::abs(two_n - two_m) > two_max_shift_)
        return nullptr;
    return &cur_[slot(two_m, two_n)];
}

}  // namespace garding

namespace garding {

double clebsch_gordan_cached(int two_j1, int two_m1, int two_j2, int two_m2, int two_J, int two_M) {
    if (two_m1 + two_m2 != two_M) return 0.0;
    thread_local std::unordered_map<std::uint64_t, double> cache;
    auto pack = [](int v) { return std::uint64_t(std::uint16_t(v + 512)) & 0x3ff; };
    const std::uint64_t key = pack(two_j1) | pack(two_m1) << 10 | pack(two_j2) << 20 | pack(two_m2) << 30 |
                              pack(two_J) << 40;
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    const double v = clebsch_gordan(two_j1, two_m1, two_j2, two_m2, two_J, two_M);
    cache.emplace(key, v);
    return v;
}

}  // namespace garding
