#include "microswim/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "microswim/csv.hpp"
#include "microswim/errors.hpp"
#include "microswim/rng.hpp"

namespace microswim {

namespace {

constexpr double kPi = std::numbers::pi;

// Sign-symmetric trig so that mirrored states produce exactly mirrored
// dynamics (libm sin/cos are not bitwise odd/even).
inline double sym_sin(double x) { return x < 0.0 ? -std::sin(-x) : std::sin(x); }
inline double sym_cos(double x) { return std::cos(std::abs(x)); }

// 5-point Gauss-Legendre on [-1, 1].
constexpr int kGaussN = 5;
constexpr double kGaussX[kGaussN] = {-0.906179845938663992, -0.538469310105683091, 0.0,
                                     0.538469310105683091, 0.906179845938663992};
constexpr double kGaussW[kGaussN] = {0.236926885056189088, 0.478628670499366468,
                                     0.568888888888888889, 0.478628670499366468,
                                     0.236926885056189088};

/// Solves the SPD system a*x = b in place (row-major n x n). No pivoting, so
/// sign-mirrored inputs take the identical execution path.
void llt_solve(std::vector<double>& a, std::vector<double>& b, int n) {
    for (int j = 0; j < n; ++j) {
        double d = a[j * n + j];
        for (int k = 0; k < j; ++k) d -= a[j * n + k] * a[j * n + k];
        if (!(d > 0.0)) throw NumericalError("mass matrix lost positive definiteness");
        const double Ljj = std::sqrt(d);
        a[j * n + j] = Ljj;
        for (int i = j + 1; i < n; ++i) {
            double s = a[i * n + j];
            for (int k = 0; k < j; ++k) s -= a[i * n + k] * a[j * n + k];
            a[i * n + j] = s / Ljj;
        }
    }
    for (int i = 0; i < n; ++i) {
        double s = b[i];
        for (int k = 0; k < i; ++k) s -= a[i * n + k] * b[k];
        b[i] = s / a[i * n + i];
    }
    for (int i = n - 1; i >= 0; --i) {
        double s = b[i];
        for (int k = i + 1; k < n; ++k) s -= a[k * n + i] * b[k];
        b[i] = s / a[i * n + i];
    }
}

/// Per-link constants derived from a design.
struct LinkConsts {
    std::vector<double> length, mass, inertia;  // I = m l^2 / 12
    std::vector<double> added_mass;             // mu = c_a * rho * pi w^2/4 * l
    std::vector<double> added_inertia;          // mu * l^2 / 12
    double cn = 0.0;                            // 0.5 rho C_n depth, per unit length
    double ct = 0.0;                            // 0.5 rho C_t * 2(w+d), per unit length
    double tail_mass = 0.0;                     // rho pi depth^2/4 * factor (momentum flux)
    std::size_t links = 0;
    std::size_t joints = 0;
    std::size_t actuated = 0;
};

LinkConsts make_consts(const RobotDesign& d) {
    LinkConsts c;
    c.links = d.link_count();
    c.joints = d.joint_count();
    c.actuated = d.dof;
    c.length = d.segment_lengths;
    c.mass = d.segment_masses;
    const double ma_per_len =
        d.hydro.added_mass_factor * d.hydro.fluid_density * kPi * d.width * d.width / 4.0;
    for (std::size_t k = 0; k < c.links; ++k) {
        c.inertia.push_back(c.mass[k] * c.length[k] * c.length[k] / 12.0);
        c.added_mass.push_back(ma_per_len * c.length[k]);
        c.added_inertia.push_back(ma_per_len * c.length[k] * c.length[k] * c.length[k] / 12.0);
    }
    c.cn = 0.5 * d.hydro.fluid_density * d.hydro.normal_drag * d.depth;
    c.ct = 0.5 * d.hydro.fluid_density * d.hydro.tangential_drag * 2.0 * (d.width + d.depth);
    c.tail_mass = d.hydro.tail_reactive_factor * d.hydro.fluid_density * kPi * d.depth *
                  d.depth / 4.0;
    return c;
}

/// Scratch kinematics for one configuration. Coordinates are
/// q = [x, y, heading, phi_0 .. phi_{J-1}]; link k's angle depends on the
/// contiguous coordinate range [2, 3+k).
struct Kinematics {
    std::size_t links = 0;
    int ncoord = 0;
    std::vector<double> psi, psid;     // absolute link angle / rate
    std::vector<double> tx, ty, nx, ny;  // tangent (tail->head), normal
    std::vector<double> rx, ry;        // link centers
    std::vector<double> vx, vy;        // link center velocities
    std::vector<double> gx, gy;        // centripetal acceleration at center
    std::vector<double> Dx, Dy;        // [link][coord] velocity Jacobian rows

    void resize(std::size_t L, int N) {
        links = L;
        ncoord = N;
        psi.resize(L); psid.resize(L);
        tx.resize(L); ty.resize(L); nx.resize(L); ny.resize(L);
        rx.resize(L); ry.resize(L);
        vx.resize(L); vy.resize(L);
        gx.resize(L); gy.resize(L);
        Dx.assign(L * static_cast<std::size_t>(N), 0.0);
        Dy.assign(L * static_cast<std::size_t>(N), 0.0);
    }
    double* dx(std::size_t k) { return Dx.data() + k * static_cast<std::size_t>(ncoord); }
    double* dy(std::size_t k) { return Dy.data() + k * static_cast<std::size_t>(ncoord); }
    const double* dx(std::size_t k) const { return Dx.data() + k * static_cast<std::size_t>(ncoord); }
    const double* dy(std::size_t k) const { return Dy.data() + k * static_cast<std::size_t>(ncoord); }

    void compute(const LinkConsts& c, const double* q, const double* qd) {
        const std::size_t L = links;
        psi[0] = q[2];
        psid[0] = qd[2];
        for (std::size_t k = 1; k < L; ++k) {
            psi[k] = psi[k - 1] + q[2 + k];
            psid[k] = psid[k - 1] + qd[2 + k];
        }
        for (std::size_t k = 0; k < L; ++k) {
            tx[k] = sym_cos(psi[k]);
            ty[k] = sym_sin(psi[k]);
            nx[k] = -ty[k];
            ny[k] = tx[k];
        }
        std::fill(Dx.begin(), Dx.end(), 0.0);
        std::fill(Dy.begin(), Dy.end(), 0.0);
        dx(0)[0] = 1.0;
        dy(0)[1] = 1.0;
        rx[0] = q[0];
        ry[0] = q[1];
        vx[0] = qd[0];
        vy[0] = qd[1];
        gx[0] = 0.0;
        gy[0] = 0.0;
        for (std::size_t k = 1; k < L; ++k) {
            const double hp = 0.5 * c.length[k - 1];  // half length of previous link
            const double hk = 0.5 * c.length[k];
            double* dxk = dx(k);
            double* dyk = dy(k);
            const double* dxp = dx(k - 1);
            const double* dyp = dy(k - 1);
            for (int i = 0; i < ncoord; ++i) {
                dxk[i] = dxp[i];
                dyk[i] = dyp[i];
            }
            // G_{k-1} spans coords [2, 2+k), G_k spans [2, 3+k)
            for (std::size_t i = 2; i < 2 + k; ++i) {
                dxk[i] -= hp * nx[k - 1];
                dyk[i] -= hp * ny[k - 1];
            }
            for (std::size_t i = 2; i < 3 + k; ++i) {
                dxk[i] -= hk * nx[k];
                dyk[i] -= hk * ny[k];
            }
            rx[k] = rx[k - 1] - hp * tx[k - 1] - hk * tx[k];
            ry[k] = ry[k - 1] - hp * ty[k - 1] - hk * ty[k];
            vx[k] = vx[k - 1] - hp * psid[k - 1] * nx[k - 1] - hk * psid[k] * nx[k];
            vy[k] = vy[k - 1] - hp * psid[k - 1] * ny[k - 1] - hk * psid[k] * ny[k];
            gx[k] = gx[k - 1] + hp * psid[k - 1] * psid[k - 1] * tx[k - 1] +
                    hk * psid[k] * psid[k] * tx[k];
            gy[k] = gy[k - 1] + hp * psid[k - 1] * psid[k - 1] * ty[k - 1] +
                    hk * psid[k] * psid[k] * ty[k];
        }
    }
};

struct Workspace {
    Kinematics kin;
    std::vector<double> M, Mfac, rhs, sol, A, T;
    void resize(std::size_t L, int N) {
        kin.resize(L, N);
        M.assign(static_cast<std::size_t>(N) * N, 0.0);
        Mfac.assign(static_cast<std::size_t>(N) * N, 0.0);
        rhs.assign(N, 0.0);
        sol.assign(N, 0.0);
        A.assign(N, 0.0);
        T.assign(N, 0.0);
    }
};

struct ForceLedger {
    double drag_power = 0.0;     // dissipation rate, >= 0
    double damper_power = 0.0;   // passive + stop dampers, >= 0
    double wake_power = 0.0;     // momentum flux carried off at the tail tip
    bool limit_hit = false;
};

/// Assembles M(q) qdd = Q - bias and solves for qdd. The added-mass terms
/// enter both the matrix and the bias through the Lagrangian of the
/// effective kinetic energy, so the continuous-time power balance
/// d(KE)/dt = sum(Q . qd) holds identically.
void assemble_and_solve(const LinkConsts& c, const RobotDesign& d, const SimConfig& cfg,
                        const double* q, const double* qd, const double* volts,
                        Workspace& w, double* qdd, ForceLedger* ledger, double* torques) {
    const int N = w.kin.ncoord;
    w.kin.compute(c, q, qd);
    std::fill(w.M.begin(), w.M.end(), 0.0);
    std::fill(w.rhs.begin(), w.rhs.end(), 0.0);

    for (std::size_t k = 0; k < c.links; ++k) {
        const int cols = static_cast<int>(3 + k);  // coords beyond this are zero
        const double* dxk = w.kin.dx(k);
        const double* dyk = w.kin.dy(k);
        const double nxk = w.kin.nx[k], nyk = w.kin.ny[k];
        const double txk = w.kin.tx[k], tyk = w.kin.ty[k];
        const double vn = nxk * w.kin.vx[k] + nyk * w.kin.vy[k];
        const double vt = txk * w.kin.vx[k] + tyk * w.kin.vy[k];
        const double psd = w.kin.psid[k];

        for (int i = 0; i < cols; ++i) {
            w.A[i] = nxk * dxk[i] + nyk * dyk[i];
            w.T[i] = txk * dxk[i] + tyk * dyk[i];
        }
        const double m = c.mass[k];
        const double Irot = c.inertia[k] + c.added_inertia[k];
        const double mu = c.added_mass[k];

        // mass matrix: m D^T D + I_rot G G^T + mu A A^T  (G = 1 on [2, 3+k))
        for (int i = 0; i < cols; ++i) {
            const double mdx = m * dxk[i];
            const double mdy = m * dyk[i];
            const double muA = mu * w.A[i];
            double* Mrow = w.M.data() + static_cast<std::size_t>(i) * N;
            for (int j = i; j < cols; ++j)
                Mrow[j] += mdx * dxk[j] + mdy * dyk[j] + muA * w.A[j];
        }
        for (int i = 2; i < cols; ++i) {
            double* Mrow = w.M.data() + static_cast<std::size_t>(i) * N;
            for (int j = i; j < cols; ++j) Mrow[j] += Irot;
        }

        // bias (moved to rhs with negative sign)
        const double ngam = nxk * w.kin.gx[k] + nyk * w.kin.gy[k];
        const double coefA = m;  // body: m D^T gamma
        const double am1 = mu * (ngam - psd * vt);
        const double am2 = mu * vn;
        for (int i = 0; i < cols; ++i) {
            double bias = coefA * (dxk[i] * w.kin.gx[k] + dyk[i] * w.kin.gy[k]);
            bias += am1 * w.A[i] - am2 * psd * w.T[i];
            if (i >= 2) bias += am2 * vt;  // G component
            w.rhs[i] -= bias;
        }

        // resistive drag, Gauss quadrature along the link
        const double hl = 0.5 * c.length[k];
        for (int g = 0; g < kGaussN; ++g) {
            const double s = kGaussX[g] * hl;
            const double wq = kGaussW[g] * hl;
            const double px = w.kin.vx[k] + psd * s * nxk;
            const double py = w.kin.vy[k] + psd * s * nyk;
            const double pn = nxk * px + nyk * py;
            const double pt = txk * px + tyk * py;
            const double fn = -c.cn * std::abs(pn) * pn;
            const double ft = -c.ct * std::abs(pt) * pt;
            const double fx = fn * nxk + ft * txk;
            const double fy = fn * nyk + ft * tyk;
            for (int i = 0; i < cols; ++i) w.rhs[i] += wq * (fx * dxk[i] + fy * dyk[i]);
            const double fdotn_s = wq * s * fn;
            for (int i = 2; i < cols; ++i) w.rhs[i] += fdotn_s;
            if (ledger) ledger->drag_power -= wq * (fx * px + fy * py);
        }
    }

    // trailing-edge momentum flux (suction) at the posterior tip: the wake
    // carries fluid momentum m_t * v_n, producing a forward tangential force
    // and a lateral reaction on the last link
    if (c.tail_mass > 0.0) {
        const std::size_t k = c.links - 1;
        const int cols = static_cast<int>(3 + k);
        const double* dxk = w.kin.dx(k);
        const double* dyk = w.kin.dy(k);
        const double half = 0.5 * c.length[k];
        const double psd = w.kin.psid[k];
        const double vx_tip = w.kin.vx[k] - psd * half * w.kin.nx[k];
        const double vy_tip = w.kin.vy[k] - psd * half * w.kin.ny[k];
        const double vn = w.kin.nx[k] * vx_tip + w.kin.ny[k] * vy_tip;
        const double vt = w.kin.tx[k] * vx_tip + w.kin.ty[k] * vy_tip;
        const double fx = c.tail_mass * (0.5 * vn * vn * w.kin.tx[k] - vt * vn * w.kin.nx[k]);
        const double fy = c.tail_mass * (0.5 * vn * vn * w.kin.ty[k] - vt * vn * w.kin.ny[k]);
        // tip Jacobian: J_i(tip) = D_i - (l/2) G_i n
        for (int i = 0; i < cols; ++i) {
            double Ji_x = dxk[i], Ji_y = dyk[i];
            if (i >= 2) {
                Ji_x -= half * w.kin.nx[k];
                Ji_y -= half * w.kin.ny[k];
            }
            w.rhs[i] += fx * Ji_x + fy * Ji_y;
        }
        if (ledger) ledger->wake_power -= fx * vx_tip + fy * vy_tip;
    }

    // joint torques: motors on actuated joints, passive spring/damper and
    // software stops on every joint
    for (std::size_t j = 0; j < c.joints; ++j) {
        const double th = q[3 + j];
        const double thd = qd[3 + j];
        double tq = -d.joint_passive_stiffness * th - d.joint_passive_damping * thd;
        if (ledger) ledger->damper_power += d.joint_passive_damping * thd * thd;
        if (std::abs(th) > cfg.joint_stop) {
            const double excess = th - std::copysign(cfg.joint_stop, th);
            tq += -cfg.stop_stiffness * excess - cfg.stop_damping * thd;
            if (ledger) {
                ledger->damper_power += cfg.stop_damping * thd * thd;
                ledger->limit_hit = true;
            }
        }
        if (j < c.actuated) {
            const double tm = motor_torque(volts[j], thd, d);
            tq += tm;
            if (torques) torques[j] = tm;
        }
        w.rhs[3 + j] += tq;
    }

    // mirror the upper triangle
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < i; ++j)
            w.M[static_cast<std::size_t>(i) * N + j] = w.M[static_cast<std::size_t>(j) * N + i];

    w.Mfac = w.M;
    w.sol = w.rhs;
    llt_solve(w.Mfac, w.sol, N);
    for (int i = 0; i < N; ++i) qdd[i] = w.sol[i];
}

double spring_potential(const LinkConsts& c, const RobotDesign& d, const SimConfig& cfg,
                        const double* q) {
    double pe = 0.0;
    for (std::size_t j = 0; j < c.joints; ++j) {
        const double th = q[3 + j];
        pe += 0.5 * d.joint_passive_stiffness * th * th;
        if (std::abs(th) > cfg.joint_stop) {
            const double excess = std::abs(th) - cfg.joint_stop;
            pe += 0.5 * cfg.stop_stiffness * excess * excess;
        }
    }
    return pe;
}

double kinetic(const LinkConsts& c, Kinematics& kin, const double* q, const double* qd) {
    kin.compute(c, q, qd);
    double ke = 0.0;
    for (std::size_t k = 0; k < c.links; ++k) {
        const double vn = kin.nx[k] * kin.vx[k] + kin.ny[k] * kin.vy[k];
        ke += 0.5 * c.mass[k] * (kin.vx[k] * kin.vx[k] + kin.vy[k] * kin.vy[k]) +
              0.5 * (c.inertia[k] + c.added_inertia[k]) * kin.psid[k] * kin.psid[k] +
              0.5 * c.added_mass[k] * vn * vn;
    }
    return ke;
}

void state_to_flat(const SimState& s, double* q, double* qd) {
    q[0] = s.base_x;
    q[1] = s.base_y;
    q[2] = s.base_heading;
    qd[0] = s.base_vx;
    qd[1] = s.base_vy;
    qd[2] = s.base_angular_velocity;
    for (std::size_t j = 0; j < s.joint_angles.size(); ++j) {
        q[3 + j] = s.joint_angles[j];
        qd[3 + j] = s.joint_velocities[j];
    }
}

SimState flat_to_state(const double* q, const double* qd, std::size_t joints) {
    SimState s;
    s.base_x = q[0];
    s.base_y = q[1];
    s.base_heading = q[2];
    s.base_vx = qd[0];
    s.base_vy = qd[1];
    s.base_angular_velocity = qd[2];
    s.joint_angles.assign(q + 3, q + 3 + joints);
    s.joint_velocities.assign(qd + 3, qd + 3 + joints);
    return s;
}

/// RK4 over [q, qd, D_drag, D_damp] with voltages held constant.
struct Integrator {
    LinkConsts consts;
    RobotDesign design;
    SimConfig cfg;
    int N = 0;
    Workspace work;
    std::vector<double> y, k1, k2, k3, k4, tmp;
    bool limit_hit = false;

    Integrator(const RobotDesign& d, const SimConfig& c) : design(d), cfg(c) {
        consts = make_consts(d);
        N = static_cast<int>(3 + consts.joints);
        work.resize(consts.links, N);
        const std::size_t dim = 2 * static_cast<std::size_t>(N) + 3;
        y.assign(dim, 0.0);
        k1.assign(dim, 0.0);
        k2.assign(dim, 0.0);
        k3.assign(dim, 0.0);
        k4.assign(dim, 0.0);
        tmp.assign(dim, 0.0);
    }

    void deriv(const double* state, const double* volts, double* out) {
        ForceLedger ledger;
        assemble_and_solve(consts, design, cfg, state, state + N, volts, work, out + N,
                           &ledger, nullptr);
        for (int i = 0; i < N; ++i) out[i] = state[N + i];
        out[2 * N] = ledger.drag_power;
        out[2 * N + 1] = ledger.damper_power;
        out[2 * N + 2] = ledger.wake_power;
        limit_hit = limit_hit || ledger.limit_hit;
    }

    void rk4(const double* volts, double dt) {
        const std::size_t dim = y.size();
        deriv(y.data(), volts, k1.data());
        for (std::size_t i = 0; i < dim; ++i) tmp[i] = y[i] + 0.5 * dt * k1[i];
        deriv(tmp.data(), volts, k2.data());
        for (std::size_t i = 0; i < dim; ++i) tmp[i] = y[i] + 0.5 * dt * k2[i];
        deriv(tmp.data(), volts, k3.data());
        for (std::size_t i = 0; i < dim; ++i) tmp[i] = y[i] + dt * k3[i];
        deriv(tmp.data(), volts, k4.data());
        const double h6 = dt / 6.0;
        for (std::size_t i = 0; i < dim; ++i)
            y[i] += h6 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }

    bool finite() const {
        for (double v : y)
            if (!std::isfinite(v)) return false;
        return true;
    }
};

/// Shared driver for both voltage sources.
template <class SampleVolts, class AdvanceSource>
Trajectory run_sim(const RobotDesign& design, double duration, double dt, const SimConfig& cfg,
                   std::size_t n_act, SampleVolts&& sample_volts, AdvanceSource&& advance) {
    auto violations = validate_design(design);
    if (!violations.empty())
        throw DataError("simulate: invalid design: " + violations.front());
    if (!(dt > 0.0) || dt > 1e-3 + 1e-15)
        throw DataError("simulate: dt must satisfy 0 < dt <= 1e-3 s");
    if (!(duration > 0.0)) throw DataError("simulate: duration must be > 0");

    Integrator integ(design, cfg);
    const int N = integ.N;
    const std::size_t joints = integ.consts.joints;

    const long steps = static_cast<long>(std::llround(duration / dt));
    const int stride = std::max(1, cfg.record_every);
    const long tick_every =
        cfg.control_rate > 0.0
            ? std::max<long>(1, static_cast<long>(std::llround(1.0 / (cfg.control_rate * dt))))
            : 1;

    Trajectory traj;
    traj.sample_dt = dt * stride;
    const std::size_t frames = static_cast<std::size_t>(steps / stride) + 1;
    traj.time.reserve(frames);
    traj.marker_x.assign(2 * integ.consts.links, {});
    traj.marker_y.assign(2 * integ.consts.links, {});
    for (auto& m : traj.marker_x) m.reserve(frames);
    for (auto& m : traj.marker_y) m.reserve(frames);
    traj.joint_angles.assign(joints, {});
    traj.joint_torques.assign(n_act, {});
    traj.voltages.assign(n_act, {});
    for (auto& ch : traj.joint_angles) ch.reserve(frames);
    for (auto& ch : traj.joint_torques) ch.reserve(frames);
    for (auto& ch : traj.voltages) ch.reserve(frames);

    std::vector<double> volts(n_act, 0.0);
    std::vector<double> torques(n_act, 0.0);
    std::vector<double> mx, my;

    auto record = [&](long step_idx, double d_drag, double d_damp, double d_wake) {
        const double* q = integ.y.data();
        const double* qd = q + N;
        traj.time.push_back(static_cast<double>(step_idx) * dt);
        integ.work.kin.compute(integ.consts, q, qd);
        mx.clear();
        my.clear();
        const auto& kin = integ.work.kin;
        for (std::size_t k = 0; k < integ.consts.links; ++k) {
            mx.push_back(kin.rx[k]);
            my.push_back(kin.ry[k]);
            const double h = 0.5 * integ.consts.length[k];
            mx.push_back(kin.rx[k] - h * kin.tx[k]);  // joint after link k / tail tip
            my.push_back(kin.ry[k] - h * kin.ty[k]);
        }
        for (std::size_t m = 0; m < mx.size(); ++m) {
            traj.marker_x[m].push_back(mx[m]);
            traj.marker_y[m].push_back(my[m]);
        }
        for (std::size_t j = 0; j < joints; ++j) traj.joint_angles[j].push_back(q[3 + j]);
        for (std::size_t j = 0; j < n_act; ++j) {
            traj.joint_torques[j].push_back(motor_torque(volts[j], qd[3 + j], design));
            traj.voltages[j].push_back(volts[j]);
        }
        traj.hydro_dissipation.push_back(d_drag);
        traj.passive_dissipation.push_back(d_damp);
        traj.wake_energy.push_back(d_wake);
        traj.kinetic_energy.push_back(kinetic(integ.consts, integ.work.kin, q, qd));
        traj.spring_energy.push_back(spring_potential(integ.consts, design, cfg, q));
    };

    sample_volts(0.0, volts);
    for (auto& v : volts) v = std::clamp(v, -cfg.v_max, cfg.v_max);
    record(0, 0.0, 0.0, 0.0);

    double acc_drag_prev = 0.0, acc_damp_prev = 0.0, acc_wake_prev = 0.0;
    for (long step_idx = 1; step_idx <= steps; ++step_idx) {
        const double t_before = static_cast<double>(step_idx - 1) * dt;
        if ((step_idx - 1) % tick_every == 0) {
            sample_volts(t_before, volts);
            for (auto& v : volts) v = std::clamp(v, -cfg.v_max, cfg.v_max);
        }
        integ.limit_hit = false;
        integ.rk4(volts.data(), dt);
        advance(dt);
        if (!integ.finite())
            throw IntegrationDivergence("simulate: non-finite state", step_idx);
        if (integ.limit_hit) traj.joint_limit_steps.push_back(step_idx);
        if (step_idx % stride == 0) {
            const double acc_drag = integ.y[2 * N];
            const double acc_damp = integ.y[2 * N + 1];
            const double acc_wake = integ.y[2 * N + 2];
            record(step_idx, acc_drag - acc_drag_prev, acc_damp - acc_damp_prev,
                   acc_wake - acc_wake_prev);
            acc_drag_prev = acc_drag;
            acc_damp_prev = acc_damp;
            acc_wake_prev = acc_wake;
        }
    }
    return traj;
}

}  // namespace

SimState SimState::rest(const RobotDesign& design) {
    SimState s;
    s.joint_angles.assign(design.joint_count(), 0.0);
    s.joint_velocities.assign(design.joint_count(), 0.0);
    return s;
}

bool SimState::finite() const {
    auto ok = [](double v) { return std::isfinite(v); };
    if (!(ok(base_x) && ok(base_y) && ok(base_heading) && ok(base_vx) && ok(base_vy) &&
          ok(base_angular_velocity)))
        return false;
    for (double v : joint_angles)
        if (!ok(v)) return false;
    for (double v : joint_velocities)
        if (!ok(v)) return false;
    return true;
}

double motor_torque(double voltage, double joint_velocity, const RobotDesign& design) {
    const double raw = design.motor_gain * voltage - design.motor_damping * joint_velocity;
    return std::clamp(raw, -design.torque_limit, design.torque_limit);
}

Wrench hydro_wrench(const LinkMotion& motion, double link_length, const RobotDesign& design) {
    if (!(link_length > 0.0)) throw DataError("hydro_wrench: link_length must be > 0");
    const LinkConsts c = make_consts(design);
    const double txk = sym_cos(motion.heading), tyk = sym_sin(motion.heading);
    const double nxk = -tyk, nyk = txk;

    Wrench wr;
    const double hl = 0.5 * link_length;
    for (int g = 0; g < kGaussN; ++g) {
        const double s = kGaussX[g] * hl;
        const double wq = kGaussW[g] * hl;
        const double px = motion.velocity[0] + motion.angular_velocity * s * nxk;
        const double py = motion.velocity[1] + motion.angular_velocity * s * nyk;
        const double pn = nxk * px + nyk * py;
        const double pt = txk * px + tyk * py;
        const double fn = -c.cn * std::abs(pn) * pn;
        const double ft = -c.ct * std::abs(pt) * pt;
        wr.force[0] += wq * (fn * nxk + ft * txk);
        wr.force[1] += wq * (fn * nyk + ft * tyk);
        wr.torque += wq * s * fn;  // lever arm s along the tangent, normal force only
    }
    // added-mass reaction to normal acceleration, plus its rotary analog
    const double ma_per_len = design.hydro.added_mass_factor * design.hydro.fluid_density *
                              kPi * design.width * design.width / 4.0;
    const double mu = ma_per_len * link_length;
    const double an = nxk * motion.acceleration[0] + nyk * motion.acceleration[1];
    wr.force[0] += -mu * an * nxk;
    wr.force[1] += -mu * an * nyk;
    wr.torque += -(mu * link_length * link_length / 12.0) * motion.angular_acceleration;
    return wr;
}

StepResult step(const SimState& state, const std::vector<double>& voltages,
                const RobotDesign& design, double dt, const SimConfig& config) {
    auto violations = validate_design(design);
    if (!violations.empty()) throw DataError("step: invalid design: " + violations.front());
    if (!(dt > 0.0) || dt > 1e-3 + 1e-15)
        throw DataError("step: dt must satisfy 0 < dt <= 1e-3 s");
    if (voltages.size() != design.dof)
        throw DataError("step: expected one voltage per actuated joint");
    if (!state.finite()) throw IntegrationDivergence("step: non-finite input state", 0);
    if (state.joint_angles.size() != design.joint_count())
        throw DataError("step: state joint count does not match design");

    Integrator integ(design, config);
    state_to_flat(state, integ.y.data(), integ.y.data() + integ.N);
    integ.rk4(voltages.data(), dt);
    if (!integ.finite()) throw IntegrationDivergence("step: non-finite state", 1);

    StepResult r;
    r.state = flat_to_state(integ.y.data(), integ.y.data() + integ.N, design.joint_count());
    r.joint_torques.resize(design.dof);
    for (std::size_t j = 0; j < design.dof; ++j)
        r.joint_torques[j] =
            motor_torque(voltages[j], r.state.joint_velocities[j], design);
    r.hydro_dissipation = integ.y[2 * integ.N];
    r.passive_dissipation = integ.y[2 * integ.N + 1];
    r.joint_limit_hit = integ.limit_hit;
    return r;
}

Trajectory simulate(const RobotDesign& design, const CpgParams& cpg_params, double duration,
                    double dt, std::uint64_t seed, const SimConfig& config) {
    cpg_params.validate();
    if (cpg_params.n != design.dof)
        throw DataError("simulate: cpg_params.n must equal design.dof");

    CpgState cpg0 = CpgState::zero(cpg_params.n);
    double e_max = 0.0;
    for (double e : cpg_params.stimulus) e_max = std::max(e_max, e);
    if (e_max > 0.0) {
        cpg0.u_at(0, 0) += 1e-6;  // a silent network stays exactly silent
        if (config.cpg_init_noise > 0.0) {
            Rng rng = Rng::substream(seed, "cpg-init");
            for (auto& u : cpg0.u) u += rng.normal(0.0, config.cpg_init_noise * e_max);
        }
    }

    CpgIntegrator cpg(cpg_params, std::move(cpg0));
    // the network needs dt <= tau/10; subdivide when the body step is coarser
    const int sub = std::max(1, static_cast<int>(std::ceil(dt / (cpg_params.tau / 10.0))));

    auto sample = [&](double /*t*/, std::vector<double>& volts) {
        for (std::size_t i = 0; i < cpg_params.n; ++i)
            volts[i] = config.voltage_scale * cpg.output(i);
    };
    auto advance = [&](double h) { cpg.advance(h, sub); };
    return run_sim(design, duration, dt, config, design.dof, sample, advance);
}

Trajectory simulate_signal(const RobotDesign& design, const VoltageSignal& signal,
                           double duration, double dt, const SimConfig& config) {
    if (signal.channel_count() != design.dof)
        throw DataError("simulate_signal: signal channels must equal design.dof");
    auto sample = [&](double t, std::vector<double>& volts) {
        for (std::size_t i = 0; i < volts.size(); ++i) volts[i] = signal.value(i, t);
    };
    auto advance = [](double) {};
    return run_sim(design, duration, dt, config, design.dof, sample, advance);
}

EnergyAudit energy_audit(const Trajectory& traj, const RobotDesign& design) {
    (void)design;
    if (traj.frame_count() < 2) throw DataError("energy_audit: trajectory too short");
    if (traj.joint_torques.empty() || traj.hydro_dissipation.size() != traj.frame_count() ||
        traj.kinetic_energy.size() != traj.frame_count())
        throw DataError("energy_audit: trajectory lacks torque or energy channels");

    EnergyAudit a;
    for (std::size_t j = 0; j < traj.joint_torques.size(); ++j) {
        const auto& tau = traj.joint_torques[j];
        const auto& th = traj.joint_angles[j];
        for (std::size_t k = 0; k + 1 < tau.size(); ++k)
            a.actuator_work += 0.5 * (tau[k] + tau[k + 1]) * (th[k + 1] - th[k]);
    }
    a.delta_kinetic = traj.kinetic_energy.back() - traj.kinetic_energy.front();
    a.delta_spring = traj.spring_energy.back() - traj.spring_energy.front();
    for (std::size_t k = 1; k < traj.frame_count(); ++k) {
        a.hydro_dissipation += traj.hydro_dissipation[k];
        a.passive_dissipation += traj.passive_dissipation[k];
        if (k < traj.wake_energy.size()) a.wake_energy += traj.wake_energy[k];
    }
    a.residual = std::abs(a.actuator_work - a.delta_kinetic - a.delta_spring -
                          a.hydro_dissipation - a.passive_dissipation - a.wake_energy);
    const double scale = std::abs(a.actuator_work);
    a.residual_ratio = scale > 0.0 ? a.residual / scale : (a.residual > 0.0 ? 1.0 : 0.0);
    return a;
}

std::array<double, 2> total_momentum(const SimState& state, const RobotDesign& design) {
    const LinkConsts c = make_consts(design);
    Kinematics kin;
    kin.resize(c.links, static_cast<int>(3 + c.joints));
    std::vector<double> q(3 + c.joints), qd(3 + c.joints);
    state_to_flat(state, q.data(), qd.data());
    kin.compute(c, q.data(), qd.data());
    std::array<double, 2> p{0.0, 0.0};
    for (std::size_t k = 0; k < c.links; ++k) {
        const double vn = kin.nx[k] * kin.vx[k] + kin.ny[k] * kin.vy[k];
        p[0] += c.mass[k] * kin.vx[k] + c.added_mass[k] * vn * kin.nx[k];
        p[1] += c.mass[k] * kin.vy[k] + c.added_mass[k] * vn * kin.ny[k];
    }
    return p;
}

std::array<double, 2> net_drag_force(const SimState& state, const RobotDesign& design) {
    const LinkConsts c = make_consts(design);
    Kinematics kin;
    kin.resize(c.links, static_cast<int>(3 + c.joints));
    std::vector<double> q(3 + c.joints), qd(3 + c.joints);
    state_to_flat(state, q.data(), qd.data());
    kin.compute(c, q.data(), qd.data());
    std::array<double, 2> F{0.0, 0.0};
    for (std::size_t k = 0; k < c.links; ++k) {
        const double hl = 0.5 * c.length[k];
        for (int g = 0; g < kGaussN; ++g) {
            const double s = kGaussX[g] * hl;
            const double wq = kGaussW[g] * hl;
            const double px = kin.vx[k] + kin.psid[k] * s * kin.nx[k];
            const double py = kin.vy[k] + kin.psid[k] * s * kin.ny[k];
            const double pn = kin.nx[k] * px + kin.ny[k] * py;
            const double pt = kin.tx[k] * px + kin.ty[k] * py;
            const double fn = -c.cn * std::abs(pn) * pn;
            const double ft = -c.ct * std::abs(pt) * pt;
            F[0] += wq * (fn * kin.nx[k] + ft * kin.tx[k]);
            F[1] += wq * (fn * kin.ny[k] + ft * kin.ty[k]);
        }
    }
    return F;
}

double chain_kinetic_energy(const SimState& state, const RobotDesign& design) {
    const LinkConsts c = make_consts(design);
    Kinematics kin;
    kin.resize(c.links, static_cast<int>(3 + c.joints));
    std::vector<double> q(3 + c.joints), qd(3 + c.joints);
    state_to_flat(state, q.data(), qd.data());
    return kinetic(c, kin, q.data(), qd.data());
}

void chain_markers(const SimState& state, const RobotDesign& design, std::vector<double>& xs,
                   std::vector<double>& ys) {
    const LinkConsts c = make_consts(design);
    Kinematics kin;
    kin.resize(c.links, static_cast<int>(3 + c.joints));
    std::vector<double> q(3 + c.joints), qd(3 + c.joints);
    state_to_flat(state, q.data(), qd.data());
    kin.compute(c, q.data(), qd.data());
    xs.clear();
    ys.clear();
    for (std::size_t k = 0; k < c.links; ++k) {
        xs.push_back(kin.rx[k]);
        ys.push_back(kin.ry[k]);
        const double h = 0.5 * c.length[k];
        xs.push_back(kin.rx[k] - h * kin.tx[k]);
        ys.push_back(kin.ry[k] - h * kin.ty[k]);
    }
}

void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path) {
    std::vector<std::string> cols{"time"};
    for (std::size_t m = 0; m < traj.marker_count(); ++m) {
        cols.push_back("marker" + std::to_string(m) + "_x");
        cols.push_back("marker" + std::to_string(m) + "_y");
    }
    for (std::size_t j = 0; j < traj.joint_angles.size(); ++j)
        cols.push_back("joint" + std::to_string(j + 1) + "_angle");
    for (std::size_t j = 0; j < traj.joint_torques.size(); ++j)
        cols.push_back("joint" + std::to_string(j + 1) + "_torque");
    for (std::size_t j = 0; j < traj.voltages.size(); ++j)
        cols.push_back("joint" + std::to_string(j + 1) + "_voltage");
    cols.push_back("hydro_dissipation");
    cols.push_back("passive_dissipation");
    cols.push_back("wake_energy");
    cols.push_back("kinetic_energy");
    cols.push_back("spring_energy");

    CsvWriter w(path, "microswim.trajectory.v1", cols);
    std::vector<double> row;
    for (std::size_t k = 0; k < traj.frame_count(); ++k) {
        row.clear();
        row.push_back(traj.time[k]);
        for (std::size_t m = 0; m < traj.marker_count(); ++m) {
            row.push_back(traj.marker_x[m][k]);
            row.push_back(traj.marker_y[m][k]);
        }
        for (const auto& ch : traj.joint_angles) row.push_back(ch[k]);
        for (const auto& ch : traj.joint_torques) row.push_back(ch[k]);
        for (const auto& ch : traj.voltages) row.push_back(ch[k]);
        row.push_back(traj.hydro_dissipation[k]);
        row.push_back(traj.passive_dissipation[k]);
        row.push_back(traj.wake_energy[k]);
        row.push_back(traj.kinetic_energy[k]);
        row.push_back(traj.spring_energy[k]);
        w.row(row);
    }
}

}  // namespace microswim
