"""Universal tensor identities of Hermitian geometry, evaluated as residuals.

Every identity is written as ``lhs - rhs`` with both sides assembled from
independently computed ingredients (torsion, curvature, covariant
derivatives).  The ones in :func:`identity_suite` hold for every Hermitian
structure; those in :func:`btp_identities` need parallel Bismut torsion.

Index notation in comments: ``T^k_{ij,g}`` is the Bismut derivative,
``T^k_{ij;g}`` the Chern derivative, ``jb`` stands for a barred index.
Arrays: ``T[k,i,j]``, ``DT[k,i,j,g]``, ``R11[i,j,k,l] = R_{i jb k lb}``,
``R20[i,j,k,l] = R_{i j k lb}``.
"""

from __future__ import annotations

import numpy as np

from .engine import Geometry, geometry
from .forms import (
    StructureEquations,
    dbar_del_split,
    ddbar,
    from_coefficients,
    kahler_form,
    power,
    wedge,
)
from .tensor_core import BARRED, LOWER, max_abs

E = np.einsum


def _cyclic_TT(T):
    """``S[i,j,k,l] = sum_r T^r_ij T^l_rk + T^r_jk T^l_ri + T^r_ki T^l_rj``."""
    return (
        E("rij,lrk->ijkl", T, T)
        + E("rjk,lri->ijkl", T, T)
        + E("rki,lrj->ijkl", T, T)
    )


def _residuals_general(g: Geometry) -> dict[str, float]:
    n = g.n
    T, Tc = g.T, np.conj(g.T)
    Rb, Rc = g.bismut_curvature, g.chern_curvature
    R20, R11 = Rb.R20, Rb.R11
    DT = g.DbT  # [k, i, j, g]
    DTu = DT[..., :n]  # unbarred directions
    DTb = DT[..., n:]  # barred directions
    P = g.P  # [i, k, j, l] = P^{jl}_{ik}
    out = {}

    # R^b_{ijk lb} = T^l_{kj,i} - T^l_{ki,j} + cyclic TT
    rhs = (
        np.transpose(DTu, (3, 2, 1, 0))  # DT[l,k,j,i] -> [i,j,k,l]
        - np.transpose(DTu, (2, 3, 1, 0))  # DT[l,k,i,j] -> [i,j,k,l]
        + E("rij,lrk->ijkl", T, T)
        + E("rjk,lri->ijkl", T, T)
        + E("rki,lrj->ijkl", T, T)
    )
    out["bismut_R20_from_torsion"] = max_abs(R20 - rhs)

    # R^b_{ijb k lb} - R^c_{ijb k lb} = T^l_{ik,jb} + conj(T^k_{jl,ib}) - (...)
    lhs = R11 - Rc.R11
    rhs = (
        E("likj->ijkl", DTb)
        + np.conj(E("kjli->ijkl", DTb))
        - (
            E("lkr,ijr->ijkl", T, Tc)
            + E("jir,klr->ijkl", T, Tc)
            + E("rik,rjl->ijkl", T, Tc)
            - E("lir,kjr->ijkl", T, Tc)
        )
    )
    out["bismut_minus_chern_R11"] = max_abs(lhs - rhs)

    # T^k_{ij,l} + T^k_{jl,i} + T^k_{li,j} = 2 sum_r (T^r_li T^k_rj + T^r_jl T^k_ri + T^r_ij T^k_rl)
    lhs = E("kijl->ijlk", DTu) + E("kjli->ijlk", DTu) + E("klij->ijlk", DTu)
    rhs = 2 * (
        E("rli,krj->ijlk", T, T) + E("rjl,kri->ijlk", T, T) + E("rij,krl->ijlk", T, T)
    )
    out["cyclic_torsion_derivative"] = max_abs(lhs - rhs)

    # T^j_{ik,lb} + conj(T^i_{jl,kb}) - conj(T^k_{jl,ib}) = -P^{jl}_{ik} + (R^b_{i lb k jb} - R^b_{k lb i jb})
    lhs = (
        E("jikl->ikjl", DTb)
        + np.conj(E("ijlk->ikjl", DTb))
        - np.conj(E("kjli->ikjl", DTb))
    )
    rhs = -P + E("ilkj->ikjl", R11) - E("klij->ikjl", R11)
    out["barred_torsion_derivative"] = max_abs(lhs - rhs)

    # second Bianchi pieces for R^b_{ijk lb} (kinds: lower, lower, lower, barred)
    DR20 = g.nabla_b(R20, (LOWER, LOWER, LOWER, BARRED))  # [i,j,k,l,g]
    DR11 = g.nabla_b(R11, (LOWER, BARRED, LOWER, BARRED))
    DR20u, DR20b = DR20[..., :n], DR20[..., n:]
    DR11u = DR11[..., :n]

    # R_{ijk lb,p} + R_{pik lb,j} + R_{jpk lb,i} = -sum_r (R_{irk lb} T^r_jp + R_{jrk lb} T^r_pi + R_{prk lb} T^r_ij)
    lhs = (
        E("ijklp->ijpkl", DR20u)
        + E("piklj->ijpkl", DR20u)
        + E("jpkli->ijpkl", DR20u)
    )
    rhs = -(
        E("irkl,rjp->ijpkl", R20, T)
        + E("jrkl,rpi->ijpkl", R20, T)
        + E("prkl,rij->ijpkl", R20, T)
    )
    out["second_bianchi_30"] = max_abs(lhs - rhs)

    # R_{ipk lb,qb} - R_{i qb k lb,p} + R_{p qb k lb,i}
    #   = sum_r R_{r qb k lb} T^r_ip - R_{p rb k lb} T^q_ir + R_{i rb k lb} T^q_pr
    #           + R_{prk lb} conj(T^i_qr) - R_{irk lb} conj(T^p_qr)
    lhs = (
        E("ipklq->ipqkl", DR20b)
        - E("iqklp->ipqkl", DR11u)
        + E("pqkli->ipqkl", DR11u)
    )
    rhs = (
        E("rqkl,rip->ipqkl", R11, T)
        - E("prkl,qir->ipqkl", R11, T)
        + E("irkl,qpr->ipqkl", R11, T)
        + E("prkl,iqr->ipqkl", R20, Tc)
        - E("irkl,pqr->ipqkl", R20, Tc)
    )
    out["second_bianchi_21"] = max_abs(lhs - rhs)

    # T^l_{ij,k} = -(R_{jki lb} + R_{kij lb})
    lhs = E("lijk->ijkl", DTu)
    rhs = -(E("jkil->ijkl", R20) + E("kijl->ijkl", R20))
    out["torsion_derivative_from_R20"] = max_abs(lhs - rhs)

    # cyclic TT = -(R_{ijk lb} + R_{jki lb} + R_{kij lb})
    rhs = -(R20 + E("jkil->ijkl", R20) + E("kijl->ijkl", R20))
    out["cyclic_TT_from_R20"] = max_abs(_cyclic_TT(T) - rhs)

    # T^j_{ik,lb} = -P/3 + 2/3 (R_{i lb k jb} - R_{k lb i jb}) + 1/3 (R_{i jb k lb} - R_{k jb i lb})
    lhs = E("jikl->ikjl", DTb)
    rhs = (
        -P / 3
        + 2 / 3 * (E("ilkj->ikjl", R11) - E("klij->ikjl", R11))
        + 1 / 3 * (E("ijkl->ikjl", R11) - E("kjil->ikjl", R11))
    )
    out["barred_torsion_derivative_from_R11"] = max_abs(lhs - rhs)

    eta = g.eta
    Deta = g.nabla_b(eta, (LOWER,))
    # eta_{i,j} = -sum_r (R_{ijr rb} + R_{jri rb})
    rhs = -(E("ijrr->ij", R20) + E("jrir->ij", R20))
    out["eta_derivative"] = max_abs(Deta[:, :n] - rhs)

    # eta_{i,jb} = -1/3 (sum_r eta_r conj(T^i_jr) + conj(eta_r) T^j_ir - sum_{t,r} T^j_tr conj(T^i_tr))
    #              + 2/3 sum_r (R_{r jb i rb} - R_{i jb r rb}) + 1/3 sum_r (R_{r rb i jb} - R_{i rb r jb})
    rhs = (
        -1 / 3 * (E("r,ijr->ij", eta, Tc) + E("r,jir->ij", np.conj(eta), T) - E("jtr,itr->ij", T, Tc))
        + 2 / 3 * (E("rjir->ij", R11) - E("ijrr->ij", R11))
        + 1 / 3 * (E("rrij->ij", R11) - E("irrj->ij", R11))
    )
    out["eta_barred_derivative"] = max_abs(Deta[:, n:] - rhs)

    # Chern-connection Bianchi identities
    DcT = g.DcT
    DcTu, DcTb = DcT[..., :n], DcT[..., n:]
    # T^l_{ij;k} + T^l_{jk;i} + T^l_{ki;j} = sum_r (T^r_ij T^l_kr + T^r_jk T^l_ir + T^r_ki T^l_jr)
    lhs = E("lijk->ijkl", DcTu) + E("ljki->ijkl", DcTu) + E("lkij->ijkl", DcTu)
    rhs = E("rij,lkr->ijkl", T, T) + E("rjk,lir->ijkl", T, T) + E("rki,ljr->ijkl", T, T)
    out["chern_bianchi_torsion"] = max_abs(lhs - rhs)

    # R^c_{k jb i lb} - R^c_{i jb k lb} = T^l_{ik;jb}
    R11c = Rc.R11
    lhs = E("kjil->ijkl", R11c) - R11c
    out["chern_bianchi_R11"] = max_abs(lhs - E("likj->ijkl", DcTb))

    # R^c_{i jb k lb;m} - R^c_{m jb k lb;i} = sum_r T^r_im R^c_{r jb k lb}
    DR11c = g.nabla_c(R11c, (LOWER, BARRED, LOWER, BARRED))[..., :n]
    lhs = DR11c - E("mjkli->ijklm", DR11c)
    rhs = E("rim,rjkl->ijklm", T, R11c)
    out["chern_bianchi_second"] = max_abs(lhs - rhs)
    return out


def identity_suite(S: StructureEquations) -> dict[str, float]:
    """Residuals of the identities valid for every Hermitian structure."""
    g = geometry(S)
    out = _residuals_general(g)
    out.update(form_identities(S))
    return out


def form_identities(S: StructureEquations) -> dict[str, float]:
    """Identities checked at the level of differential forms."""
    g = geometry(S)
    n = S.n
    out = {}
    eta = from_coefficients(n, g.eta, "p")
    w = power(kahler_form(n), n - 1)
    del_w, _ = dbar_del_split(S, w)
    out["eta_definition"] = (del_w + wedge(eta, w)).max_abs()

    # del eta = -sum eta_{i,j} phi_i phi_j - 1/2 sum eta_k T^k_ij phi_i phi_j
    Deta = g.nabla_b(g.eta, (LOWER,))
    del_eta, dbar_eta = dbar_del_split(S, eta)
    pred = from_coefficients(n, -Deta[:, :n] - 0.5 * E("k,kij->ij", g.eta, g.T), "pp")
    out["del_eta_formula"] = (del_eta - pred).max_abs()
    # dbar eta = -sum eta_{i,jb} phi_i phib_j - sum eta_k conj(T^i_jk) phi_i phib_j
    pred = from_coefficients(n, -Deta[:, n:] - E("k,ijk->ij", g.eta, np.conj(g.T)), "pb")
    out["dbar_eta_formula"] = (dbar_eta - pred).max_abs()
    out["ddbar_omega_components"] = plcld_formula_crosscheck(S)
    return out


def plcld_component_form(S: StructureEquations):
    """The (2,2)-form 1/4 sum {(T^l_{ik,jb} - T^j_{ik,lb}) - P^{jl}_{ik}} phi_i phi_k phib_j phib_l."""
    g = geometry(S)
    n = S.n
    DTb = g.DbT[..., n:]
    coeff = 0.25 * (E("likj->ikjl", DTb) - E("jikl->ikjl", DTb) - g.P)
    return from_coefficients(n, coeff, "ppbb")


def plcld_formula_crosscheck(S: StructureEquations) -> float:
    """max |sqrt(-1) del dbar omega - component formula|."""
    lhs = ddbar(S, kahler_form(S.n)) * 1j
    return (lhs - plcld_component_form(S)).max_abs()


# ---------------------------------------------------------------------------


def btp_identities(S: StructureEquations) -> dict[str, float]:
    """Residuals of the identities satisfied by structures with parallel Bismut torsion.

    No precondition check happens here; ``classifier.prop15_identities``
    refuses non-BTP input.
    """
    g = geometry(S)
    n = S.n
    T, Tc = g.T, np.conj(g.T)
    dt = g.derived
    A, B, phi, phs = dt.A, dt.B, dt.phi, dt.phi_star
    out = {}
    out["cyclic_TT"] = max_abs(_cyclic_TT(T))
    out["T_A_vs_T_B"] = max_abs(2 * E("rsi,rs->i", T, A) - E("rsi,rs->i", T, B))
    Q7 = (
        E("jkr,ilr->ijkl", T, Tc)
        + E("lir,kjr->ijkl", T, Tc)
        - E("jir,klr->ijkl", T, Tc)
        - E("lkr,ijr->ijkl", T, Tc)
        - E("rik,rjl->ijkl", T, Tc)
    )
    out["Q_from_torsion"] = max_abs(dt.Q - Q7)
    eta = from_coefficients(n, g.eta, "p")
    del_eta, dbar_eta = dbar_del_split(S, eta)
    out["del_eta_vanishes"] = del_eta.max_abs()
    pred = from_coefficients(n, -np.conj(phi.T), "pb")  # -sum conj(phi^i_j) phi_i phib_j
    out["dbar_eta_from_phi"] = (dbar_eta - pred).max_abs()
    R9 = (
        E("lir,kjr->ijkl", T, Tc)
        - E("rik,rjl->ijkl", T, Tc)
        - E("jir,klr->ijkl", T, Tc)
        - E("lkr,ijr->ijkl", T, Tc)
    )
    out["bismut_minus_chern_R11_quadratic"] = max_abs(g.bismut_curvature.R11 - g.chern_curvature.R11 - R9)
    # sum_r phi^r_i T^j_rk + phi^r_k T^j_ir - phi^j_r T^r_ik
    r10 = E("ir,jrk->ijk", phi, T) + E("kr,jir->ijk", phi, T) - E("rj,rik->ijk", phi, T)
    out["phi_T_relation"] = max_abs(r10)
    mats = {"A": A, "B": B, "phi": phi, "phi*": phs}
    names = list(mats)
    for a in range(len(names)):
        for b in range(a + 1, len(names)):
            x, y = mats[names[a]], mats[names[b]]
            out[f"commutator[{names[a]},{names[b]}]"] = max_abs(x @ y - y @ x)
    # contraction consequences
    out["eta_T_contraction"] = max_abs(E("r,rik->ik", g.eta, T))
    out["trace_phiA_phiB"] = abs(2 * np.trace(phi @ A) - np.trace(phi @ B))
    out["nabla_Q"] = max_abs(g.nabla_b(dt.Q, (LOWER, BARRED, LOWER, BARRED)))
    out["ricQ_from_torsion"] = dt.ricq_identity_residual
    return out
