#include "dks/identities.hpp"

#include "dks/numeric.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>

namespace dks::gain {

namespace {

using C = std::complex<double>;
const C I(0.0, 1.0);

struct Ctx {
    double S, tau;
    double c, s, c2, s2, c3, c4, s4, c8;
    C E(double k) const { return std::exp(I * k * tau); }
    // cos(x)^p with integer-exponent sign handling (p = 2S - const can make
    // the base negative for tau beyond pi/6 or pi/4)
    double powc(double base, double p) const { return numeric::pow_log_space(base, p); }
};

Ctx make_ctx(double S, double tau) {
    Ctx x{};
    x.S = S;
    x.tau = tau;
    x.c = std::cos(tau);
    x.s = std::sin(tau);
    x.c2 = std::cos(2 * tau);
    x.s2 = std::sin(2 * tau);
    x.c3 = std::cos(3 * tau);
    x.c4 = std::cos(4 * tau);
    x.s4 = std::sin(4 * tau);
    x.c8 = std::cos(8 * tau);
    return x;
}

// Grouped result <[S_y^2, U^dag S_y^2 U]>, assembled from the primitive
// table entries of the operator expansion
//   (1/16)(Sp^4 V [1-e^{8it}] - Sp^2 V Sm^2 [1-e^{8it}] + 4 Sz(2Sz+1)V - H.c.)
// + (1/2)(Sp^2 Sz V + Sp^2 V - Sp^2 Sz - Sp^2 - Sp (Sz+1) V Sm e^{4it} - H.c.).
// The directly printed evaluation of this bracket does not reproduce the
// matrix computation; the assembly below does.
C comm_sy2_udsy2u(const Ctx& x) {
    const double S = x.S;
    C sp4_v = S / 4 * (2 * S - 1) * (S - 1) * (2 * S - 3) * x.powc(x.c2, 2 * S - 4) * x.E(-4);
    C sp2_v_sm2 = S / 4 * (2 * S - 1) *
                  (x.E(4) + 2.0 * (2 * S - 1) + S * (2 * S - 1) * x.E(-4)) *
                  x.powc(x.c2, 2 * S - 4);
    C sz_v = I * S * x.s2 * x.powc(x.c2, 2 * S - 1) * x.E(4);
    C sz2_v = S / 2 * (S * x.c4 - (S - 1)) * x.E(4) * x.powc(x.c2, 2 * S - 2);
    C sp2_sz_v = -S / 2 * (2 * S - 1) * x.powc(x.c2, 2 * S - 2) +
                 I * (S / 2) * (2 * S - 1) * (S - 1) * x.s2 * x.powc(x.c2, 2 * S - 3);
    C sp2_v = S / 2 * (2 * S - 1) * x.powc(x.c2, 2 * S - 2);
    C sp2_sz = -S / 2 * (2 * S - 1);
    C sp2 = S / 2 * (2 * S - 1);
    C sp_sz_v_sm = S / 4 *
                   ((S - 1) * x.E(6) + (1 - 5 * S) * x.E(2) + 4.0 * I * S * S * x.s2) *
                   x.powc(x.c2, 2 * S - 3);
    C sp_v_sm = S / 2 * (2 * S - 1) * x.powc(x.c2, 2 * S - 2) +
                S * x.powc(x.c2, 2 * S - 1) * x.E(2);

    C t1 = sp4_v * (1.0 - x.E(8)) - sp2_v_sm2 * (1.0 - x.E(8)) + 8.0 * sz2_v + 4.0 * sz_v;
    C t2 = sp2_sz_v + sp2_v - sp2_sz - sp2 - (sp_sz_v_sm + sp_v_sm) * x.E(4);
    return (t1 - std::conj(t1)) / 16.0 + (t2 - std::conj(t2)) / 2.0;
}

using Fn = std::function<C(const Ctx&)>;

const std::map<std::string, Fn>& table() {
    static const std::map<std::string, Fn> t = [] {
        std::map<std::string, Fn> m;
        auto S_ = [](const Ctx& x) { return x.S; };

        m["Sp_W"] = [=](const Ctx& x) { return C(S_(x) * x.powc(x.c, 2 * x.S - 1)); };
        m["Sp2_W"] = [=](const Ctx& x) {
            return x.S / 2 * (2 * x.S - 1) * x.powc(x.c, 2 * x.S - 2) * x.E(-1);
        };
        m["Sp3_W"] = [=](const Ctx& x) {
            return x.S / 2 * (2 * x.S - 1) * (x.S - 1) * x.powc(x.c, 2 * x.S - 3) * x.E(-2);
        };
        m["Sp_Wd"] = m["Sp_W"];
        m["Sp_W_Sz"] = [=](const Ctx& x) {
            return C(-x.S / 2 * x.powc(x.c, 2 * x.S - 1)) +
                   I * (x.S / 2) * (2 * x.S - 1) * x.s * x.powc(x.c, 2 * x.S - 2);
        };
        m["Sp_Wd_Sz"] = [=](const Ctx& x) {
            return C(-x.S / 2 * x.powc(x.c, 2 * x.S - 1)) -
                   I * (x.S / 2) * (2 * x.S - 1) * x.s * x.powc(x.c, 2 * x.S - 2);
        };
        m["Sz_W"] = [=](const Ctx& x) {
            return I * x.S * x.s * x.powc(x.c, 2 * x.S - 1) * x.E(1);
        };
        m["Sp_W_Sm"] = [=](const Ctx& x) {
            return C(x.S * x.powc(x.c, 2 * x.S - 1)) +
                   x.S / 2 * (2 * x.S - 1) * x.powc(x.c, 2 * x.S - 2) * x.E(-1);
        };
        m["Sp2_Wd_Sm"] = [=](const Ctx& x) {
            return x.S * (2 * x.S - 1) * x.powc(x.c, 2 * x.S - 2) * x.E(1) +
                   x.S / 2 * (2 * x.S - 1) * (x.S - 1) * x.powc(x.c, 2 * x.S - 3) * x.E(2);
        };
        m["Sz2_W"] = [=](const Ctx& x) {
            return x.S / 2 * x.powc(x.c, 2 * x.S - 2) * (1 - x.S + x.S * x.c2) * x.E(1);
        };
        m["Sp2_Sz_W"] = [=](const Ctx& x) {
            return x.S / 4 * (2 * x.S - 1) * x.powc(x.c, 2 * x.S - 3) *
                   ((x.S - 2) - x.S * x.E(-2));
        };
        m["Sp_Sz_W_Sm"] = [=](const Ctx& x) {
            return x.S / 4 *
                   (1.0 + (x.S - 1) * x.E(2) - 2 * x.S * x.S * x.E(-2) + x.S * (2 * x.S - 5)) *
                   x.powc(x.c, 2 * x.S - 3);
        };
        m["Sp2_Sz_V_W"] = [=](const Ctx& x) {
            return x.S / 4 * (2 * x.S - 1) * ((x.S - 2) * x.E(2) - x.S * x.E(-4)) *
                   x.powc(x.c3, 2 * x.S - 3);
        };
        m["Sp4_V_W"] = [=](const Ctx& x) {
            return x.S / 4 * (2 * x.S - 1) * (x.S - 1) * (2 * x.S - 3) *
                   x.powc(x.c3, 2 * x.S - 4) * x.E(-7);
        };
        m["Sp2_V_Wd_Sm2"] = [=](const Ctx& x) {
            return x.S / 4 * (2 * x.S - 1) *
                   (x.E(3) + x.S * (2 * x.S - 1) * x.E(-1) + (4 * x.S - 2) * x.E(1)) *
                   x.powc(x.c, 2 * x.S - 4);
        };
        // The first exponential reads exp(-i tau) here; the printed exp(+i tau)
        // disagrees with the matrix computation at every (S, tau) tested.
        m["Sp3_V_W_Sm"] = [=](const Ctx& x) {
            return x.S / 4 * (2 * x.S - 1) * (x.S - 1) *
                   (3.0 * x.E(-1) + 2 * x.S * x.E(-7)) * x.powc(x.c3, 2 * x.S - 4);
        };
        m["Sp3_V_Wd_Sm"] = [=](const Ctx& x) {
            return x.S / 4 * (2 * x.S - 1) * (x.S - 1) *
                   (3.0 * x.E(1) + 2 * x.S * x.E(-1)) * x.powc(x.c, 2 * x.S - 4);
        };
        m["Sp2_Sz_V_Wd"] = [=](const Ctx& x) {
            return x.S / 4 * (2 * x.S - 1) * ((x.S - 2) * x.E(2) - x.S) *
                   x.powc(x.c, 2 * x.S - 3);
        };
        m["Sp2_V_Wd"] = [=](const Ctx& x) {
            return x.S / 2 * (2 * x.S - 1) * x.powc(x.c, 2 * x.S - 2) * x.E(1);
        };
        m["Sp_Sz_Vd_W_Sm"] = [=](const Ctx& x) {
            C inner = 1.0 - x.S * (5.0 + 2 * x.S * (-1.0 + x.E(2)));
            return x.S / 4 * (C(x.S - 1) + x.E(2) * inner) * x.powc(x.c, 2 * x.S - 3) * x.E(-4);
        };
        m["Sp_Vd_W_Sm"] = [=](const Ctx& x) {
            return x.S / 2 * (2 * x.S * x.E(-1) + x.E(-3)) * x.powc(x.c, 2 * x.S - 2);
        };
        m["Sz2_Vd_W"] = [=](const Ctx& x) {
            return x.S / 2 * (1 - x.S + x.S * x.c2) * x.powc(x.c, 2 * x.S - 2) * x.E(-3);
        };
        m["Sz_Vd_W"] = [=](const Ctx& x) {
            return -I * x.S * x.s * x.powc(x.c, 2 * x.S - 1) * x.E(-3);
        };
        m["Sp2_V_W"] = [=](const Ctx& x) {
            return x.S / 2 * (2 * x.S - 1) * x.powc(x.c3, 2 * x.S - 2) * x.E(-1);
        };
        m["Sp3_W_Sm"] = [=](const Ctx& x) {
            return x.S / 4 * (2 * x.S - 1) * (x.S - 1) *
                   (2 * x.S * x.E(-3) + 3.0 * x.E(-1)) * x.powc(x.c, 2 * x.S - 4);
        };
        m["Sp2_W_Sm2"] = [=](const Ctx& x) {
            return x.S / 4 * (2 * x.S - 1) *
                   (x.E(1) + x.S * (2 * x.S - 1) * x.E(-3) + (4 * x.S - 2) * x.E(-1)) *
                   x.powc(x.c, 2 * x.S - 4);
        };
        m["Sp"] = [=](const Ctx& x) { return C(x.S); };
        m["Sp2"] = [=](const Ctx& x) { return C(x.S / 2 * (2 * x.S - 1)); };
        m["Sp_V"] = [=](const Ctx& x) { return x.S * x.powc(x.c2, 2 * x.S - 1) * x.E(2); };
        m["Sp2_V"] = [=](const Ctx& x) {
            return C(x.S / 2 * (2 * x.S - 1) * x.powc(x.c2, 2 * x.S - 2));
        };
        m["Sp3_V"] = [=](const Ctx& x) {
            return x.S / 2 * (2 * x.S - 1) * (x.S - 1) * x.powc(x.c2, 2 * x.S - 3) * x.E(-2);
        };
        m["Sp4_V"] = [=](const Ctx& x) {
            return x.S / 4 * (2 * x.S - 1) * (x.S - 1) * (2 * x.S - 3) *
                   x.powc(x.c2, 2 * x.S - 4) * x.E(-4);
        };
        m["Sp_Sz"] = [=](const Ctx& x) { return C(-x.S / 2); };
        m["Sp2_Sz"] = [=](const Ctx& x) { return C(-x.S / 2 * (2 * x.S - 1)); };
        m["Sz_V"] = [=](const Ctx& x) {
            return I * x.S * x.s2 * x.powc(x.c2, 2 * x.S - 1) * x.E(4);
        };
        m["Sz2_V"] = [=](const Ctx& x) {
            return x.S / 2 * (x.S * x.c4 - (x.S - 1)) * x.E(4) * x.powc(x.c2, 2 * x.S - 2);
        };
        m["Sp_Sz_V"] = [=](const Ctx& x) {
            return -x.S / 2 * x.powc(x.c2, 2 * x.S - 2) * x.E(4) +
                   I * x.S * x.S * x.s2 * x.powc(x.c2, 2 * x.S - 2) * x.E(2);
        };
        m["Sp2_Sz_V"] = [=](const Ctx& x) {
            return C(-x.S / 2 * (2 * x.S - 1) * x.powc(x.c2, 2 * x.S - 2)) +
                   I * (x.S / 2) * (2 * x.S - 1) * (x.S - 1) * x.s2 * x.powc(x.c2, 2 * x.S - 3);
        };
        m["Sp2_V_Sm"] = [=](const Ctx& x) {
            return x.S / 2 * (C(x.S) + x.E(4)) * (2 * x.S - 1) * x.powc(x.c2, 2 * x.S - 3) *
                   x.E(-2);
        };
        m["Sp2_V_Sm2"] = [=](const Ctx& x) {
            return x.S / 4 * (2 * x.S - 1) *
                   (x.E(4) + 2.0 * (2 * x.S - 1) + x.S * (2 * x.S - 1) * x.E(-4)) *
                   x.powc(x.c2, 2 * x.S - 4);
        };
        m["Sp_Sz_Sm"] = [=](const Ctx& x) { return C(-x.S * x.S); };
        m["Sp_Sz_V_Sm"] = [=](const Ctx& x) {
            return x.S / 4 *
                   ((x.S - 1) * x.E(6) + (1 - 5 * x.S) * x.E(2) + 4.0 * I * x.S * x.S * x.s2) *
                   x.powc(x.c2, 2 * x.S - 3);
        };
        m["Sp_V_Sm"] = [=](const Ctx& x) {
            return C(x.S / 2 * (2 * x.S - 1) * x.powc(x.c2, 2 * x.S - 2)) +
                   x.S * x.powc(x.c2, 2 * x.S - 1) * x.E(2);
        };

        // grouped commutator/product expectations, U = exp(-i tau S_z^2)
        m["comm_Sy_UdSyU"] = [=](const Ctx& x) {
            return I * x.S * (2 * x.S - 1) * x.s * x.powc(x.c, 2 * x.S - 2);
        };
        // Vanishes exactly: the pi rotation about x flips S_y and S_z while
        // fixing S_z^2 and the +x coherent state, sending this bracket to
        // minus itself. (The printed nonzero value does not match the matrix
        // computation.)
        m["comm_Sy2_UdSyU"] = [=](const Ctx&) { return C(0.0); };
        m["comm_Sy_UdSy2U"] = [=](const Ctx&) { return C(0.0); };
        m["comm_Sy2_UdSy2U"] = [=](const Ctx& x) { return comm_sy2_udsy2u(x); };
        m["triple_sym"] = [=](const Ctx& x) {
            return C(-x.S / 8 * (2 * x.S - 1) * x.powc(x.c3, 2 * x.S - 3) *
                         ((2 * x.S - 1) * x.c2 + x.S * x.c4) +
                     x.S / 8 * x.powc(x.c, 2 * x.S - 3) *
                         (1 - 4 * x.S + 8 * x.S * x.S +
                          (-1 + 2 * x.S + 4 * x.S * x.S) * x.c2 -
                          3 * (x.S - 1) * (2 * x.S - 1) * x.c4));
        };
        return m;
    }();
    return t;
}

} // namespace

std::complex<double> supplemental_identity(const std::string& id, double spin, double tau) {
    const auto& t = table();
    auto it = t.find(id);
    if (it == t.end())
        throw std::invalid_argument("supplemental_identity: unknown id '" + id + "'");
    if (spin < 0.5)
        throw std::invalid_argument("supplemental_identity: spin must be >= 1/2");
    return it->second(make_ctx(spin, tau));
}

const std::vector<std::string>& identity_ids() {
    static const std::vector<std::string> ids = [] {
        std::vector<std::string> v;
        for (const auto& [k, fn] : table()) v.push_back(k);
        return v;
    }();
    return ids;
}

} // namespace dks::gain
