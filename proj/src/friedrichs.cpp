#include "garding/friedrichs.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <array>
#include <tuple>
#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include "garding/errors.hpp"
#include "garding/wigner.hpp"

namespace garding {

using std::numbers::pi;

namespace {

// ---------------------------------------------------------------------------
// P = int dz sum_xi W_z Op_xi(a(z, xi)) W_z with W_z multiplication by w_xi(x z^-1).
// Since w is central, W_z = lambda_z W lambda_z^*, so P only needs the
// z-independent pieces Qe = sum_xi Omega_xi^T B(xi) Omega_xi for each factor
// B of the symbol, with Omega_xi[(c,d); q] = <W e_q, e_{xi,cd}> real.
// The z-integral is then an exact Clebsch-Gordan mixing of Qe.

// A symbol split into x-functions times xi-matrices.
struct Channel {
    XFunction f;
    std::function<Eigen::MatrixXcd(const DualIndex&)> B;  // empty: mode channel filled per xi
    Eigen::MatrixXd qr, qi;                                // Qe, real and imaginary part
    Eigen::MatrixXcd cur;                                  // B at the current xi
    std::vector<int> diffs;                                // spin differences the x-modes connect
    bool active = false;

    void set_diffs() {
        diffs.clear();
        for (const auto& [m, c] : f.terms)
            for (int v = -m.tau.two_l; v <= m.tau.two_l; v += 2)
                if (std::find(diffs.begin(), diffs.end(), v) == diffs.end()) diffs.push_back(v);
    }
};

struct SymbolChannels {
    const Symbol* a = nullptr;
    std::vector<Channel> ch;
    std::map<XMode, int> by_mode;
    bool factored = false;

    // Fills cur for every channel; returns the largest entry size of the symbol at xi.
    double load(const DualIndex& xi, int n) {
        double big = 0;
        if (factored) {
            for (auto& c : ch) {
                c.cur = c.B(xi);
                c.active = c.cur.size() > 0 && c.cur.cwiseAbs().maxCoeff() > 0;
                if (c.active) big = std::max(big, c.cur.cwiseAbs().maxCoeff());
            }
            return big;
        }
        for (auto& c : ch) c.active = false;
        for (const auto& t : a->modes(xi)) {
            auto it = by_mode.find(t.mode);
            if (it == by_mode.end()) {
                Channel c;
                c.f = XFunction{a->group, {{t.mode, cd(1)}}};
                c.set_diffs();
                c.qr = Eigen::MatrixXd::Zero(n, n);
                c.qi = Eigen::MatrixXd::Zero(n, n);
                it = by_mode.emplace(t.mode, int(ch.size())).first;
                ch.push_back(std::move(c));
            }
            Channel& c = ch[it->second];
            if (c.active)
                c.cur += t.coef;
            else
                c.cur = t.coef;
            c.active = true;
        }
        for (auto& c : ch)
            if (c.active) big = std::max(big, c.cur.cwiseAbs().maxCoeff());
        return big;
    }
};

SymbolChannels make_channels(const Symbol& a, int n) {
    SymbolChannels s;
    s.a = &a;
    if (!a.factors.empty()) {
        s.factored = true;
        for (const auto& f : a.factors) {
            Channel c;
            c.f = f.f;
            c.B = f.B;
            c.set_diffs();
            c.qr = Eigen::MatrixXd::Zero(n, n);
            c.qi = Eigen::MatrixXd::Zero(n, n);
            s.ch.push_back(std::move(c));
        }
    }
    return s;
}

template <class F>
double gl(F&& f, double a, double b, int n) {
    const auto& [x, w] = gauss_legendre(n);
    double s = 0;
    for (int i = 0; i < n; ++i) s += w[i] * f(0.5 * (a + b) + 0.5 * (b - a) * x[i]);
    return 0.5 * (b - a) * s;
}

// ---------------------------------------------------------------------------
// Torus: Omega_xi[q] = C0 (2 pi)^-n s^{-n/2} Phihat(|xi - q| / s), Phihat the
// radial Fourier transform of the bump.

class TorusCoupling {
public:
    TorusCoupling(const WeightFunction& w, const BasisLayout& S) : w_(w), S_(S), n_(w.group.n) {}

    Eigen::VectorXd compute(const DualIndex& xi) const {
        const double s = w_.scale(xi);
        const double pref = w_.C0 * std::pow(2 * pi, -n_) * std::pow(s, -0.5 * n_);
        Eigen::VectorXd om(S_.size);
        for (std::size_t k = 0; k < S_.duals.size(); ++k) {
            double d2 = 0;
            for (int i = 0; i < n_; ++i) {
                const double v = xi.k[i] - S_.duals[k].k[i];
                d2 += v * v;
            }
            om[S_.offset[k]] = pref * bump_ft(std::sqrt(d2) / s);
        }
        return om;
    }

private:
    // Panels on [r/2, r] with bump values cached per node count.
    const std::vector<std::pair<double, double>>& panel(int nodes) const {
        auto it = cache_.find(nodes);
        if (it != cache_.end()) return it->second;
        const auto& [x, wt] = gauss_legendre(nodes);
        const double r = w_.phi.r, a = 0.5 * r, b = r;
        std::vector<std::pair<double, double>> v(nodes);
        for (int i = 0; i < nodes; ++i) {
            const double t = 0.5 * (a + b) + 0.5 * (b - a) * x[i];
            v[i] = {t, 0.5 * (b - a) * wt[i] * w_.phi(t)};
        }
        return cache_.emplace(nodes, std::move(v)).first->second;
    }

    double bump_ft(double kappa) const {
        const double r = w_.phi.r;
        int nodes = 64;
        while (nodes < 64 + kappa * r) nodes *= 2;
        const auto& P = panel(nodes);
        if (n_ == 1) {
            double s = kappa < 1e-14 ? 0.5 * r : std::sin(0.5 * kappa * r) / kappa;
            for (const auto& [t, wt] : P) s += wt * std::cos(kappa * t);
            return 2 * s;
        }
        auto kernel = [&](double t) -> double {
            const double kt = kappa * t;
            if (n_ == 2) return 2 * pi * std::cyl_bessel_j(0.0, kt) * t;
            if (n_ == 3) return 4 * pi * (kt < 1e-12 ? 1.0 : std::sin(kt) / kt) * t * t;
            throw ConfigError("torus dimensions above 3 are not supported by the weight");
        };
        double s = gl(kernel, 0, 0.5 * r, nodes);
        for (const auto& [t, wt] : P) s += wt * kernel(t);
        return s;
    }

    const WeightFunction& w_;
    const BasisLayout& S_;
    int n_;
    mutable std::map<int, std::vector<std::pair<double, double>>> cache_;
};

// ---------------------------------------------------------------------------
// SU(2): in Euler angles cos(theta/2) = cos(beta/2) cos((alpha+gamma)/2), and the
// alpha, gamma integrals leave
//   Omega[(c,d); (eta,i,j)] = sqrt(d_xi d_eta)/(2 pi) int_0^R sin(b) d^eta_ij d^xi_cd K_nu(b) db,
//   K_nu(b) = int_0^{phimax} w(theta) cos(2 nu phi) dphi,  nu = m_i - m_c = m_j - m_d,
// which vanishes unless j - i = d - c. Section entries are grouped by j - i.

class Su2Coupling {
public:
    Su2Coupling(const WeightFunction& w, const BasisLayout& S) : w_(w), S_(S) {
        two_L_ = S.max_two_l();
        std::vector<std::array<int, 5>> e;  // delta, two_mi, dual, i, j
        for (std::size_t k = 0; k < S.duals.size(); ++k) {
            const int d = S.duals[k].dim();
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) e.push_back({j - i, 2 * i - S.duals[k].two_l, int(k), i, j});
        }
        std::sort(e.begin(), e.end());
        const int nd = 2 * two_L_ + 1;
        goff_.assign(nd + 1, 0);
        for (const auto& v : e) ++goff_[v[0] + two_L_ + 1];
        for (int t = 0; t < nd; ++t) goff_[t + 1] += goff_[t];
        ent_ = e;
        // Omega is computed with entries sorted by m_i and handed out sorted by (dual, i),
        // so that each dual occupies one contiguous run of a group.
        local_.resize(nd);
        segs_.resize(nd);
        perm_.resize(e.size());
        for (int g = 0; g < nd; ++g) {
            std::vector<int>& L = local_[g];
            L.resize(goff_[g + 1] - goff_[g]);
            for (int t = 0; t < int(L.size()); ++t) L[t] = t;
            std::sort(L.begin(), L.end(), [&](int a, int b) {
                const auto &x = e[goff_[g] + a], &y = e[goff_[g] + b];
                return std::tie(x[2], x[3]) < std::tie(y[2], y[3]);
            });
            for (int t = 0; t < int(L.size()); ++t) {
                const auto& v = e[goff_[g] + L[t]];
                perm_[goff_[g] + t] = S.index(v[2], v[3], v[4]);
                if (segs_[g].empty() || segs_[g].back().dual != v[2]) segs_[g].push_back({v[2], t, 0});
                ++segs_[g].back().count;
            }
        }
    }

    struct Segment {
        int dual, start, count;
    };
    const std::vector<Segment>& segments(int g) const { return segs_[g]; }

    int groups() const { return 2 * two_L_ + 1; }
    int group_offset(int g) const { return goff_[g]; }
    int group_size(int g) const { return goff_[g + 1] - goff_[g]; }
    int delta_of(int g) const { return g - two_L_; }
    // grouped position -> layout index
    const std::vector<int>& perm() const { return perm_; }

    // Omega per group (rows c of xi, columns grouped entries), for increasing two_lx.
    void compute(int two_lx, std::vector<Eigen::MatrixXd>& om) {
        const DualIndex xi = DualIndex::spin(two_lx);
        const double R = w_.support_radius(xi);
        if (betas_.empty() || R < 0.8 * R0_ || two_lx < band_start_) new_band(two_lx, R);
        WignerStream& st = *stream_[two_lx & 1];
        while (st.two_l() < two_lx) st.advance();

        const int nb = int(betas_.size()), dx = two_lx + 1;
        const int kmax = two_lx + two_L_;
        // K_k(beta_b) for k = 2 nu = 0..kmax
        Eigen::MatrixXd K = Eigen::MatrixXd::Zero(nb, kmax + 1);
        const int nphi = 40 + int(1.5 * kmax * 0.5 * R);
        const auto& [px, pw] = gauss_legendre(nphi);
        std::vector<double> cs(kmax + 1);
        for (int b = 0; b < nb; ++b) {
            const double cb = std::cos(0.5 * betas_[b]);
            const double ratio = std::cos(0.5 * R) / cb;
            if (ratio >= 1) continue;
            const double pm = std::acos(ratio);
            for (int t = 0; t < nphi; ++t) {
                const double ph = 0.5 * pm * (1 + px[t]);
                const double th = 2 * std::acos(std::clamp(cb * std::cos(ph), -1.0, 1.0));
                const double wv = 0.5 * pm * pw[t] * w_.radial(th, xi);
                if (wv == 0) continue;
                const double c1 = std::cos(ph);
                double a0 = 1, a1 = c1;
                K(b, 0) += wv;
                if (kmax >= 1) K(b, 1) += wv * a1;
                for (int k = 2; k <= kmax; ++k) {
                    const double a2 = 2 * c1 * a1 - a0;
                    K(b, k) += wv * a2;
                    a0 = a1;
                    a1 = a2;
                }
            }
        }
        const double sx = std::sqrt(double(dx));
        om.resize(groups());
        Eigen::VectorXd y(nb);
        for (int g = 0; g < groups(); ++g) {
            const int delta = delta_of(g), off = goff_[g], cnt = group_size(g);
            om[g] = Eigen::MatrixXd::Zero(dx, cnt);
            if (cnt == 0) continue;
            tmp_ = Eigen::MatrixXd::Zero(dx, cnt);
            for (int c = 0; c < dx; ++c) {
                const int d = c + delta;
                if (d < 0 || d >= dx) continue;
                const int tmc = 2 * c - two_lx, tmd = 2 * d - two_lx;
                const double* dv = st.values(tmc, tmd);
                if (!dv) continue;
                // entries within a group are sorted by two_mi
                int p = 0;
                while (p < cnt) {
                    const int tmi = ent_[off + p][1];
                    int q = p;
                    while (q < cnt && ent_[off + q][1] == tmi) ++q;
                    const int k = std::abs(tmi - tmc);
                    for (int b = 0; b < nb; ++b) y[b] = dv[b] * K(b, k);
                    tmp_.row(c).segment(p, q - p).noalias() = sx * (y.transpose() * G_.block(0, off + p, nb, q - p));
                    p = q;
                }
            }
            for (int t = 0; t < cnt; ++t) om[g].col(t) = tmp_.col(local_[g][t]);
        }
    }

private:
    void new_band(int two_lx, double R) {
        R0_ = R;
        band_start_ = two_lx;
        int two_end = two_lx;
        while (two_end < two_lx + 4000 && w_.support_radius(DualIndex::spin(two_end + 1)) >= 0.8 * R0_) ++two_end;
        const int nb = 40 + int(1.5 * 0.5 * (two_L_ + two_end) * R0_);
        const auto& [x, wt] = gauss_legendre(nb);
        betas_.resize(nb);
        std::vector<double> bw(nb);
        for (int b = 0; b < nb; ++b) {
            betas_[b] = 0.5 * R0_ * (1 + x[b]);
            bw[b] = 0.5 * R0_ * wt[b];
        }
        G_.resize(nb, perm_.size());
        std::vector<std::vector<Eigen::MatrixXd>> dt(2);
        for (int b = 0; b < nb; ++b) {
            for (int par = 0; par < 2; ++par) {
                // top spin of this parity family inside the section
                const int top = (two_L_ - par) % 2 ? two_L_ - 1 : two_L_;
                dt[par] = top >= 0 ? wigner_d_all(top, betas_[b]) : std::vector<Eigen::MatrixXd>{};
            }
            const double base = bw[b] * std::sin(betas_[b]) / (2 * pi);
            for (std::size_t p = 0; p < perm_.size(); ++p) {
                const DualIndex& eta = S_.duals[ent_[p][2]];
                const int par = eta.two_l & 1;
                const Eigen::MatrixXd& D = dt[par][(eta.two_l - par) / 2];
                G_(b, p) = base * std::sqrt(double(eta.dim())) * D(ent_[p][3], ent_[p][4]);
            }
        }
        for (int par = 0; par < 2; ++par) stream_[par] = std::make_unique<WignerStream>(betas_, par, 2 * two_L_);
    }

    const WeightFunction& w_;
    const BasisLayout& S_;
    int two_L_ = 0;
    std::vector<int> goff_, perm_;
    std::vector<std::array<int, 5>> ent_;  // compute order
    std::vector<std::vector<int>> local_;  // per group: output slot -> compute slot
    std::vector<std::vector<Segment>> segs_;
    Eigen::MatrixXd tmp_;
    double R0_ = 0;
    int band_start_ = 0;
    std::vector<double> betas_;
    Eigen::MatrixXd G_;  // [beta][grouped entry]
    std::unique_ptr<WignerStream> stream_[2];
};

// ---------------------------------------------------------------------------
// Sweep driver: visits xi shells in increasing degree until the tail is small.

struct SweepStats {
    double reached = 0, last_tail = 0;
    bool capped = false;
    std::size_t count = 0;
};

double default_cap(const GroupDescriptor& g) {
    if (g.kind == GroupKind::SU2) return 160;
    return g.n == 1 ? 20000 : (g.n == 2 ? 400 : 80);
}

// Shell contributions are judged relative to the largest one seen; the sweep
// stops after `quiet` consecutive shells past the section below tolerance.
class TailMonitor {
public:
    TailMonitor(double tol, double section_degree) : tol_(tol), sec_(section_degree) {}
    bool done(double degree, double shell) {
        big_ = std::max(big_, shell);
        last_ = big_ > 0 ? shell / big_ : 0;
        if (degree <= sec_ + 1) return false;
        quiet_ = last_ < tol_ ? quiet_ + 1 : 0;
        return quiet_ >= 4;
    }
    double last() const { return last_; }

private:
    double tol_, sec_, big_ = 0, last_ = 0;
    int quiet_ = 0;
};

std::vector<std::vector<int>> torus_shell(int n, int D) {
    std::vector<std::vector<int>> out;
    std::vector<int> k(n, -D);
    while (true) {
        int m = 0;
        for (int v : k) m = std::max(m, std::abs(v));
        if (m == D) out.push_back(k);
        int i = 0;
        while (i < n && k[i] == D) k[i++] = -D;
        if (i == n) break;
        ++k[i];
    }
    return out;
}

// Callback receives (xi, coupling) where coupling is an Eigen::VectorXd (torus)
// or the grouped SU(2) blocks; it returns the shell measure for that xi.
template <class TorusCb, class Su2Cb>
SweepStats sweep(const WeightFunction& w, const BasisLayout& S, const FriedrichsOptions& opt, TorusCb&& tcb,
                 Su2Cb&& scb, Su2Coupling* su2) {
    const GroupDescriptor& g = w.group;
    const double cap = opt.max_degree > 0 ? opt.max_degree : default_cap(g);
    TailMonitor mon(opt.tail_tol, max_degree(S.duals));
    SweepStats st;
    if (g.kind == GroupKind::Torus) {
        TorusCoupling tc(w, S);
        for (int D = 0;; ++D) {
            double shell = 0;
            for (auto& k : torus_shell(g.n, D)) {
                const DualIndex xi = DualIndex::torus(k);
                shell += tcb(xi, tc.compute(xi));
                ++st.count;
            }
            st.reached = D;
            if (mon.done(D, shell)) break;
            if (D + 1 > cap) {
                st.capped = true;
                break;
            }
        }
    } else {
        std::vector<Eigen::MatrixXd> om;
        for (int two = 0;; ++two) {
            const DualIndex xi = DualIndex::spin(two);
            su2->compute(two, om);
            const double shell = scb(xi, om);
            ++st.count;
            st.reached = 0.5 * two;
            if (mon.done(0.5 * two, shell)) break;
            if (0.5 * (two + 1) > cap) {
                st.capped = true;
                break;
            }
        }
    }
    st.last_tail = mon.last();
    return st;
}

// ---------------------------------------------------------------------------
// Assembly of P from the Qe of each channel.

void mix_torus(const BasisLayout& S, const Channel& c, Eigen::MatrixXcd& P) {
    const int n = int(S.duals.empty() ? 0 : S.duals[0].k.size());
    for (const auto& [mode, coef] : c.f.terms)
        for (std::size_t q = 0; q < S.duals.size(); ++q) {
            std::vector<int> k = S.duals[q].k;
            for (int i = 0; i < n; ++i) k[i] += mode.tau.k[i];
            const int p = S.find(DualIndex::torus(k));
            if (p < 0) continue;
            const int a = S.offset[p], b = S.offset[q];
            P(a, b) += coef * cd(c.qr(a, b), c.qi(a, b));
        }
}

// P[(e',i',j'), (e,i,j)] = sum_k int D^tau_ab e_ik conj(e'_i'k') Qe[(e',k',j'), (e,k,j)]
void mix_su2(const BasisLayout& S, const std::vector<int>& pos, const Channel& c, Eigen::MatrixXcd& P) {
    for (const auto& [mode, coef] : c.f.terms) {
        const int tt = mode.tau.two_l, ta = mode.two_a, tb = mode.two_b;
        for (std::size_t r = 0; r < S.duals.size(); ++r) {
            const int tr = S.duals[r].two_l, dr = tr + 1;
            for (std::size_t s = 0; s < S.duals.size(); ++s) {
                const int ts = S.duals[s].two_l, ds = ts + 1;
                if (tr < std::abs(ts - tt) || tr > ts + tt || ((ts + tt - tr) & 1)) continue;
                for (int i = 0; i < ds; ++i) {
                    const int mi = 2 * i - ts, mip = ta + mi;
                    if (std::abs(mip) > tr) continue;
                    const double c1 = clebsch_gordan_cached(tt, ta, ts, mi, tr, mip);
                    if (c1 == 0) continue;
                    const int ip = (mip + tr) / 2;
                    for (int k = 0; k < ds; ++k) {
                        const int mk = 2 * k - ts, mkp = tb + mk;
                        if (std::abs(mkp) > tr) continue;
                        const double c2 = clebsch_gordan_cached(tt, tb, ts, mk, tr, mkp);
                        if (c2 == 0) continue;
                        const int kp = (mkp + tr) / 2;
                        const cd f = coef * (c1 * c2 / dr);
                        for (int jp = 0; jp < dr; ++jp) {
                            const int qrow = pos[S.index(int(r), kp, jp)];
                            const int prow = S.index(int(r), ip, jp);
                            for (int j = 0; j < ds; ++j) {
                                const int qcol = pos[S.index(int(s), k, j)];
                                P(prow, S.index(int(s), i, j)) += f * cd(c.qr(qrow, qcol), c.qi(qrow, qcol));
                            }
                        }
                    }
                }
            }
        }
    }
}

// Qe[G1, G2] += Omega_1^T diag(B[c + d1, c + d2]) Omega_2, only on the dual pairs
// whose spins differ by one of the channel's x-mode spins.
void accumulate_su2(const Su2Coupling& sc, const BasisLayout& S, const std::vector<Eigen::MatrixXd>& om,
                    Channel& ch) {
    const Eigen::MatrixXcd& B = ch.cur;
    const int dx = int(B.rows());
    Eigen::VectorXd vr(dx), vi(dx);
    Eigen::MatrixXd T;
    for (int g1 = 0; g1 < sc.groups(); ++g1) {
        if (sc.group_size(g1) == 0) continue;
        const int d1 = sc.delta_of(g1);
        for (int g2 = 0; g2 < sc.groups(); ++g2) {
            if (sc.group_size(g2) == 0) continue;
            const int d2 = sc.delta_of(g2);
            bool any_r = false, any_i = false;
            for (int c = 0; c < dx; ++c) {
                const int a = c + d1, b = c + d2;
                if (a < 0 || a >= dx || b < 0 || b >= dx) {
                    vr[c] = vi[c] = 0;
                    continue;
                }
                vr[c] = B(a, b).real();
                vi[c] = B(a, b).imag();
                any_r = any_r || vr[c] != 0;
                any_i = any_i || vi[c] != 0;
            }
            for (int part = 0; part < 2; ++part) {
                if (part == 0 ? !any_r : !any_i) continue;
                Eigen::MatrixXd& Q = part == 0 ? ch.qr : ch.qi;
                T = (part == 0 ? vr : vi).asDiagonal() * om[g2];
                const auto& s2 = sc.segments(g2);
                for (const auto& a : sc.segments(g1)) {
                    const int tl = S.duals[a.dual].two_l;
                    for (const auto& b : s2) {
                        const int diff = S.duals[b.dual].two_l - tl;
                        if (std::find(ch.diffs.begin(), ch.diffs.end(), diff) == ch.diffs.end()) continue;
                        Q.block(sc.group_offset(g1) + a.start, sc.group_offset(g2) + b.start, a.count, b.count)
                            .noalias() += om[g1].middleCols(a.start, a.count).transpose() * T.middleCols(b.start, b.count);
                    }
                }
            }
        }
    }
}

}  // namespace

// ---------------------------------------------------------------------------

FriedrichsResult friedrichs_operators(const std::vector<Symbol>& symbols, const WeightFunction& w, double cutoff,
                                      const FriedrichsOptions& opt) {
    const GroupDescriptor& g = w.group;
    for (const auto& a : symbols)
        if (!(a.group == g)) throw ConfigError("symbol and weight live on different groups");
    BasisLayout S(enumerate_dual(g, cutoff));
    const int N = S.size;
    std::vector<SymbolChannels> chans;
    chans.reserve(symbols.size());
    for (const auto& a : symbols) chans.push_back(make_channels(a, N));

    auto load_all = [&](const DualIndex& xi) {
        double big = 0;
        for (auto& sc : chans) big = std::max(big, sc.load(xi, N));
        return big;
    };

    std::unique_ptr<Su2Coupling> su2;
    if (g.kind == GroupKind::SU2) su2 = std::make_unique<Su2Coupling>(w, S);

    auto tcb = [&](const DualIndex& xi, const Eigen::VectorXd& om) {
        const double big = load_all(xi);
        const Eigen::MatrixXd outer = om * om.transpose();
        for (auto& sc : chans)
            for (auto& c : sc.ch) {
                if (!c.active) continue;
                const cd b = c.cur(0, 0);
                if (b.real() != 0) c.qr.noalias() += b.real() * outer;
                if (b.imag() != 0) c.qi.noalias() += b.imag() * outer;
            }
        return big * om.squaredNorm();
    };
    auto scb = [&](const DualIndex& xi, const std::vector<Eigen::MatrixXd>& om) {
        const double big = load_all(xi);
        double fro = 0;
        for (const auto& m : om) fro += m.squaredNorm();
        for (auto& sc : chans)
            for (auto& c : sc.ch)
                if (c.active) accumulate_su2(*su2, S, om, c);
        return big * fro;
    };
    const SweepStats st = sweep(w, S, opt, tcb, scb, su2.get());

    FriedrichsResult res;
    res.reached_degree = st.reached;
    res.last_tail = st.last_tail;
    res.capped = st.capped;
    res.duals_summed = st.count;
    std::vector<int> pos(N);
    if (su2)
        for (int p = 0; p < N; ++p) pos[su2->perm()[p]] = p;
    for (std::size_t s = 0; s < symbols.size(); ++s) {
        OperatorMatrix P;
        P.group = g;
        P.rows = P.cols = S;
        P.cutoff = cutoff;
        P.provenance = "friedrichs(" + symbols[s].name + ")";
        P.M = Eigen::MatrixXcd::Zero(N, N);
        for (const auto& c : chans[s].ch) {
            if (g.kind == GroupKind::Torus)
                mix_torus(S, c, P.M);
            else
                mix_su2(S, pos, c, P.M);
        }
        res.P.push_back(std::move(P));
    }
    return res;
}

OperatorMatrix friedrichs_operator(const Symbol& a, const WeightFunction& w, double cutoff,
                                   const FriedrichsOptions& opt) {
    return friedrichs_operators({a}, w, cutoff, opt).P.front();
}

Eigen::MatrixXd weight_coupling(const WeightFunction& w, const DualIndex& xi, const BasisLayout& section) {
    const int dx = xi.dim();
    if (w.group.kind == GroupKind::Torus) {
        TorusCoupling tc(w, section);
        return tc.compute(xi).transpose();
    }
    Su2Coupling sc(w, section);
    std::vector<Eigen::MatrixXd> om;
    sc.compute(xi.two_l, om);
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(dx * dx, section.size);
    for (int g = 0; g < sc.groups(); ++g) {
        const int delta = sc.delta_of(g);
        for (int c = 0; c < dx; ++c) {
            const int d = c + delta;
            if (d < 0 || d >= dx) continue;
            for (int t = 0; t < sc.group_size(g); ++t)
                out(c * dx + d, sc.perm()[sc.group_offset(g) + t]) = om[g](c, t);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

Amplitude friedrichs_amplitude(const Symbol& a, const WeightFunction& w, int nodes) {
    const GroupDescriptor g = a.group;
    if (!(g == w.group)) throw ConfigError("symbol and weight live on different groups");
    const int n = g.algebra_dim();
    if (nodes <= 0) nodes = n == 1 ? 192 : 20;
    Amplitude p;
    p.group = g;
    p.params = a.params;
    p.name = "friedrichs(" + a.name + ")";
    p.x_band = p.y_band = a.x_band;
    p.fn = [a, w, g, n, nodes](const GroupPoint& x, const GroupPoint& y, const DualIndex& xi) -> Eigen::MatrixXcd {
        const int d = xi.dim();
        const double R = w.support_radius(xi);
        const double dist = central_distance(g, x, y);
        if (dist > 2 * R) return Eigen::MatrixXcd::Zero(d, d);
        // z = m exp(Y) around the midpoint m = x (x^-1 y)^{1/2}, which is symmetric in x and y;
        // every z in both supports lies within R + dist/2 of m.
        LieAlgebraVector half = log_map(g, multiply(g, inverse(g, x), y));
        for (double& v : half.c) v *= 0.5;
        const GroupPoint m = multiply(g, x, exp_map(g, half));
        const double Rw = std::min(R + 0.5 * dist, 0.999 * pi);
        const auto& [gx, gw] = gauss_legendre(nodes);
        std::vector<GroupPoint> zs;
        std::vector<double> wz;
        std::vector<int> idx(n, 0);
        const double V = g.volume();
        while (true) {
            LieAlgebraVector Y;
            Y.c.resize(n);
            double wt = 1;
            for (int k = 0; k < n; ++k) {
                Y.c[k] = Rw * gx[idx[k]];
                wt *= Rw * gw[idx[k]];
            }
            if (Y.central_norm() < Rw) {
                const GroupPoint z = multiply(g, m, exp_map(g, Y));
                const double ww = w(multiply(g, x, inverse(g, z)), xi) * w(multiply(g, y, inverse(g, z)), xi);
                if (ww != 0) {
                    zs.push_back(z);
                    wz.push_back(wt * ww * haar_density(g, Y) / V);
                }
            }
            int k = 0;
            while (k < n && ++idx[k] == nodes) idx[k++] = 0;
            if (k == n) break;
        }
        Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(d, d);
        if (zs.empty()) return acc;
        const auto vals = a.values(zs, xi);
        for (std::size_t t = 0; t < zs.size(); ++t) acc += wz[t] * vals[t];
        return acc;
    };
    return p;
}

Symbol friedrichs_diagonal_symbol(const Symbol& a, const WeightFunction& w) {
    if (!(a.group == w.group)) throw ConfigError("symbol and weight live on different groups");
    Symbol s = a;
    s.name = "friedrichs_diag(" + a.name + ")";
    s.provenance = "weight-averaged";
    s.samples = nullptr;
    s.factors.clear();
    s.modes = [a, w](const DualIndex& xi) {
        ModeExpansion ex = a.modes(xi);
        std::map<DualIndex, double> memo;
        for (auto& t : ex) {
            auto it = memo.find(t.mode.tau);
            if (it == memo.end()) it = memo.emplace(t.mode.tau, w.character_moment(xi, t.mode.tau) / t.mode.tau.dim()).first;
            t.coef *= it->second;
        }
        return ex;
    };
    return s;
}

PositivityVerdict positivity_check(const OperatorMatrix& P, double tol) {
    if (!P.square()) throw ConfigError("positivity check needs a square section");
    PositivityVerdict v;
    v.tol = tol;
    if (P.M.size() == 0) {
        v.pass = true;
        return v;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(P.hermitian_part(), Eigen::EigenvaluesOnly);
    v.lambda_min = es.eigenvalues().minCoeff();
    v.norm = P.M.operatorNorm();
    v.pass = v.lambda_min >= -tol * std::max(1.0, v.norm);
    return v;
}

ManifestCheck manifest_form_check(const Symbol& a, const WeightFunction& w, double cutoff, int vectors,
                                  unsigned seed, const FriedrichsOptions& opt, double tol) {
    const GroupDescriptor& g = w.group;
    const FriedrichsResult fr = friedrichs_operators({a}, w, cutoff, opt);
    const OperatorMatrix& P = fr.P.front();
    const BasisLayout& S = P.cols;
    const int N = S.size;

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    Eigen::MatrixXcd U(N, vectors);
    for (int v = 0; v < vectors; ++v)
        for (int q = 0; q < N; ++q) U(q, v) = cd(nd(rng), nd(rng));

    ManifestCheck out;
    for (int v = 0; v < vectors; ++v) out.form.push_back((U.col(v).adjoint() * P.M * U.col(v))(0, 0).real());

    // z-rule exact for the products of two section coefficients and the symbol
    const double L = max_degree(S.duals);
    const double band = 2 * (g.kind == GroupKind::Torus ? std::sqrt(double(g.n)) * L : L) + a.x_band;
    const double deg = g.kind == GroupKind::Torus ? std::ceil(band / 4) : std::ceil(band) / 2;
    const QuadratureRule rule = haar_quadrature(g, std::max(deg, 1.0));
    const std::size_t nz = rule.size();

    // (lambda_z^* u) per node: eta(z)^T U_eta on each block
    std::vector<Eigen::MatrixXcd> Vz(vectors, Eigen::MatrixXcd(N, nz));
    for (std::size_t s = 0; s < nz; ++s)
        for (std::size_t k = 0; k < S.duals.size(); ++k) {
            const Eigen::MatrixXcd R = rep_matrix(g, S.duals[k], rule.nodes[s]);
            const int d = S.duals[k].dim();
            for (int v = 0; v < vectors; ++v)
                for (int kk = 0; kk < d; ++kk)
                    for (int j = 0; j < d; ++j) {
                        cd acc = 0;
                        for (int i = 0; i < d; ++i) acc += R(i, kk) * U(S.index(int(k), i, j), v);
                        Vz[v](S.index(int(k), kk, j), s) = acc;
                    }
        }

    std::vector<cd> man(vectors, cd(0));
    FriedrichsOptions same;
    same.tail_tol = 0;
    same.max_degree = std::max(fr.reached_degree, 1e-9);
    std::unique_ptr<Su2Coupling> su2;
    if (g.kind == GroupKind::SU2) su2 = std::make_unique<Su2Coupling>(w, S);

    auto add = [&](const DualIndex& xi, const Eigen::MatrixXd& Om) {
        const int dx = xi.dim();
        const auto av = a.values(rule.nodes, xi);
        for (int v = 0; v < vectors; ++v) {
            const Eigen::MatrixXcd Vx = Om * Vz[v];  // (dx*dx) x nodes
            for (std::size_t s = 0; s < nz; ++s) {
                const Eigen::Map<const Eigen::MatrixXcd, 0, Eigen::Stride<Eigen::Dynamic, Eigen::Dynamic>> Vm(
                    Vx.col(s).data(), dx, dx, Eigen::Stride<Eigen::Dynamic, Eigen::Dynamic>(1, dx));
                // rows c, columns d: sum_c conj(V_c) a V_c^T
                man[v] += rule.weights[s] * (Vm.conjugate() * av[s]).cwiseProduct(Vm).sum();
            }
        }
    };
    auto tcb = [&](const DualIndex& xi, const Eigen::VectorXd& om) {
        add(xi, om.transpose());
        return 1.0;
    };
    auto scb = [&](const DualIndex& xi, const std::vector<Eigen::MatrixXd>& om) {
        const int dx = xi.dim();
        Eigen::MatrixXd Om = Eigen::MatrixXd::Zero(dx * dx, N);
        for (int gi = 0; gi < su2->groups(); ++gi) {
            const int delta = su2->delta_of(gi);
            for (int c = 0; c < dx; ++c) {
                const int d = c + delta;
                if (d < 0 || d >= dx) continue;
                for (int t = 0; t < su2->group_size(gi); ++t)
                    Om(c * dx + d, su2->perm()[su2->group_offset(gi) + t]) = om[gi](c, t);
            }
        }
        add(xi, Om);
        return 1.0;
    };
    sweep(w, S, same, tcb, scb, su2.get());

    out.pass = true;
    for (int v = 0; v < vectors; ++v) {
        out.manifest.push_back(man[v].real());
        const double rel = std::abs(cd(out.form[v]) - man[v]) / std::max(std::abs(man[v]), 1e-300);
        out.max_rel_diff = std::max(out.max_rel_diff, rel);
    }
    out.pass = out.max_rel_diff <= tol;
    return out;
}

}  // namespace garding
