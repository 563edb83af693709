"""Concrete Cuntz-algebra realizations of the Ising computations.

The chiral Ising endomorphisms act on an algebra generated by a Cuntz pair
``r, t`` (``r^dag r = t^dag t = 1``, ``r^dag t = 0``) with

    tau(r) = t, tau(t) = r, tau(u) = -u,          u = r r^dag - t t^dag,
    sigma(r) = (r+t)/sqrt2, sigma(t) = (r-t)u/sqrt2,

and statistics operators

    eps(tau,tau) = -1,  eps(tau,sigma) = eps(sigma,tau) = -i u,
    eps(sigma,sigma) = kappa^{-1} (r r^dag + i t t^dag),  kappa = e^{i pi/8}.

The two-dimensional algebra is the tensor product of two chiral copies
(slots 0 and 1).  The local 2D extension uses the channel isometries
``T0 = t (x) 1, T1 = rr (x) 1, T2 = rt (x) 1`` (the first concrete choice
admitting an exact evaluation of Theta on them); the boundary algebra is
the braided product of two copies of that extension with the opposite
braiding, and every displayed relation is decided exactly.
"""

from __future__ import annotations

from functools import lru_cache

from .scalars import Ex, I, SQRT2, INV_SQRT2, ZETA, ROOT4_2
from .words import (OperatorExpr, Endo, ChannelEndo, ComposedEndo,
                    IdentityEndo, CuntzError)

__all__ = ["chiral_generators", "chiral_endos", "chiral_braiding",
           "ExtensionContext", "fermi_context", "ising2d_context",
           "boundary_context", "express_in_basis"]

HALF = Ex.rational(1, 2)
QUARTER = Ex.rational(1, 4)


def chiral_generators(slot: int = 0) -> dict:
    """The intertwiners r, t and the gauge unitary u of one chiral copy."""
    r = OperatorExpr.generator(slot, "s", 0)
    t = OperatorExpr.generator(slot, "s", 1)
    u = r * r.dagger() - t * t.dagger()
    return {"r": r, "t": t, "u": u}


def chiral_endos(slot: int = 0) -> dict:
    """The localized endomorphisms id, tau, sigma of one chiral copy."""
    g = chiral_generators(slot)
    r, t, u = g["r"], g["t"], g["u"]
    tau = Endo(f"tau@{slot}", {
        (slot, "s", 0): t,
        (slot, "s", 1): r,
    })
    sigma = Endo(f"sigma@{slot}", {
        (slot, "s", 0): INV_SQRT2 * (r + t),
        (slot, "s", 1): INV_SQRT2 * ((r - t) * u),
    })
    return {"id": IdentityEndo(), "tau": tau, "sigma": sigma}


def chiral_braiding(slot: int = 0) -> dict:
    """Statistics operators eps_{a,b} of the chiral Ising sectors."""
    g = chiral_generators(slot)
    r, t, u = g["r"], g["t"], g["u"]
    one = OperatorExpr.one()
    kappa_inv = ZETA.conj()
    eps = {
        ("id", "id"): one,
        ("id", "tau"): one, ("tau", "id"): one,
        ("id", "sigma"): one, ("sigma", "id"): one,
        ("tau", "tau"): Ex.rational(-1) * one,
        ("tau", "sigma"): (-1 * I) * u,
        ("sigma", "tau"): (-1 * I) * u,
        ("sigma", "sigma"): kappa_inv * (r * r.dagger()) + (I * kappa_inv) * (t * t.dagger()),
    }
    return eps


class ExtensionContext:
    """A Q-system context ``(theta, w, x)`` realized by concrete operators,
    together with the extension calculus on elements ``iota(n) v``.

    Elements of the extension are represented by their coefficient ``n``;
    the product, adjoint and conditional expectation are

        (n1) (n2)   -> n1 theta(n2) x
        (n)^*       -> w^dag x^dag theta(n^dag)
        mu(n)       -> d^{-1} w^dag theta(n) x w.
    """

    def __init__(self, name, theta, w, x, d: Ex, exports=None):
        self.name = name
        self.theta = theta
        self.w = w
        self.x = x
        self.d = d
        self.exports = exports or {}
        self._mul_cache: dict = {}
        # splitting x into prepared right factors makes the seam filter in
        # large products effective (set by the boundary constructor)
        self.x_factors = (x,)

    def ext_mul(self, n1: OperatorExpr, n2: OperatorExpr) -> OperatorExpr:
        key = (id(n1), id(n2))
        hit = self._mul_cache.get(key)
        if hit is not None:
            return hit[2]
        res = self._mul_theta_image(n1, n2)
        for factor in self.x_factors:
            res = (res * factor).compressed()
        self._mul_cache[key] = (n1, n2, res)
        return res

    def _mul_theta_image(self, left: OperatorExpr, n: OperatorExpr) -> OperatorExpr:
        """``left * theta(n)`` without materializing theta-images of long
        words: their generator images are chained into the accumulator one
        by one (each image is small and cached), so cancellations prune the
        intermediate products."""
        short = OperatorExpr({w: c for w, c in n.terms.items() if len(w) <= 8})
        out = (left * self.theta.apply(short)).compressed() if short.terms \
            else OperatorExpr.zero()
        for w, c in n.terms.items():
            if len(w) <= 8:
                continue
            acc = left
            for g in w:
                acc = (acc * self._gen_theta_image(g)).compressed()
            out = out + c * acc
        return out.compressed()

    def _gen_theta_image(self, g) -> OperatorExpr:
        cache = self.__dict__.setdefault("_gen_cache", {})
        img = cache.get(g)
        if img is None:
            img = self.theta.apply(OperatorExpr({(g,): Ex.rational(1)}))
            cache[g] = img
        return img

    def ext_star(self, n: OperatorExpr) -> OperatorExpr:
        left = (self.w.dagger() * self.x.dagger()).compressed()
        return self._mul_theta_image(left, n.dagger())

    def ext_exp(self, n: OperatorExpr) -> OperatorExpr:
        raw = self.w.dagger() * self.theta.apply(n) * self.x * self.w
        return (self.d.inverse() * raw).compressed()

    @property
    def ext_one(self) -> OperatorExpr:
        return self.w.dagger()

    def qsystem_residuals(self) -> dict[str, OperatorExpr]:
        """The four Q-system relations as difference expressions (all must
        be exactly zero, deciding identities at resolution depth 2)."""
        th, w, x = self.theta, self.w, self.x
        one = OperatorExpr.one()
        return {
            "unit_left": w.dagger() * x - one,
            "unit_right": th.apply(w.dagger()) * x - one,
            "associativity": x * x - th.apply(x) * x,
            "frobenius": x * x.dagger() - th.apply(x.dagger()) * x,
            "w_standardness": w.dagger() * w - self.d * one,
            "x_standardness": x.dagger() * x - self.d * one,
        }


@lru_cache(maxsize=1)
def fermi_context() -> ExtensionContext:
    """Example-3 data: ``theta = sigma^2``, ``w = 2^{1/4} r``,
    ``x = 2^{-1/4}(r + t)``, dimension sqrt(2)."""
    g = chiral_generators(0)
    e = chiral_endos(0)
    eps = chiral_braiding(0)
    theta = ComposedEndo(e["sigma"], e["sigma"], name="sigma^2")
    w = ROOT4_2 * g["r"]
    x = ROOT4_2.inverse() * (g["r"] + g["t"])
    # eps_{theta,theta} for theta = sigma^2: built from the sector channels
    # r in Hom(id, theta), t in Hom(tau, theta)
    r, t = g["r"], g["t"]
    iso = {"id": r, "tau": t}
    eps_theta = OperatorExpr.zero()
    for a, Ta in iso.items():
        for b, Tb in iso.items():
            emb_ba = Tb * _apply_name(e, b, Ta)       # channel (b,a) of theta^2
            emb_ab = Ta * _apply_name(e, a, Tb)
            eps_theta = eps_theta + emb_ba * eps[(a, b)] * emb_ab.dagger()
    exports = dict(g)
    exports.update({
        "eps_theta": eps_theta,
        "W": w, "X": x,
        "psi": ROOT4_2 * g["t"].dagger(),   # the Fermi field coefficient
    })
    return ExtensionContext("fermi", theta, w, x, SQRT2, exports)


def _apply_name(endos, name, expr):
    return endos[name].apply(expr)


@lru_cache(maxsize=1)
def ising2d_context() -> ExtensionContext:
    """Example-4 data: the canonical Q-system of the local 2D Ising model,
    with channels id, tau (x) tau, sigma (x) sigma."""
    gL = chiral_generators(0)
    gR = chiral_generators(1)
    eL = chiral_endos(0)
    eR = chiral_endos(1)
    rL, tL, uL = gL["r"], gL["t"], gL["u"]
    rR, tR, uR = gR["r"], gR["t"], gR["u"]

    T0 = tL
    T1 = rL * rL
    T2 = rL * tL
    rho_tt = _pair_endo(eL["tau"], eR["tau"], "tau(x)tau")
    rho_ss = _pair_endo(eL["sigma"], eR["sigma"], "sigma(x)sigma")
    theta = ChannelEndo("Theta", [T0, T1, T2],
                        [IdentityEndo(), rho_tt, rho_ss])

    uu = uL * uR
    rr = rL * rR
    tt = tL * tR
    W = SQRT2 * T0
    # one term per fusion channel of Theta Theta; the (sigma sigma)(tau tau)
    # channel contains the sigma-sector through u (x) u and must close on
    # T2 (Hom-typing forces the trailing isometry)
    X = INV_SQRT2 * (
        theta.apply(T0) * (T0 * T0.dagger() + T1 * T1.dagger() + T2 * T2.dagger())
        + theta.apply(T1) * T0 * T1.dagger()
        + theta.apply(T2) * T0 * T2.dagger()
        + theta.apply(T1) * T1 * T0.dagger()
        + theta.apply(T2) * T1 * T2.dagger()
        + theta.apply(T1) * T2 * uu * T2.dagger()
        + SQRT2 * (theta.apply(T2) * T2 * rr * T0.dagger())
        + SQRT2 * (theta.apply(T2) * T2 * tt * T1.dagger())
    )
    X = X.compressed()
    W_tt = SQRT2 * T1
    W_ss = T2

    channels = {"id": (T0, IdentityEndo()), "tau": (T1, rho_tt),
                "sigma": (T2, rho_ss)}
    eps_theta = OperatorExpr.zero()
    for na, (Ta, rho_a) in channels.items():
        for nb, (Tb, rho_b) in channels.items():
            emb_ba = Tb * rho_b.apply(Ta)
            emb_ab = Ta * rho_a.apply(Tb)
            eps_theta = eps_theta + emb_ba * _eps_2d(na, nb) * emb_ab.dagger()
    eps_theta = eps_theta.compressed()

    exports = {
        "rL": rL, "tL": tL, "uL": uL, "rR": rR, "tR": tR, "uR": uR,
        "uu": uu, "rr": rr, "tt": tt,
        "T0": T0, "T1": T1, "T2": T2,
        "W": W, "X": X, "W_tt": W_tt, "W_ss": W_ss,
        "Psi_tt": W_tt.dagger(), "Psi_ss": W_ss.dagger(),
        "eps_theta": eps_theta,
    }
    ctx = ExtensionContext("ising2d", theta, W, X, Ex.rational(2), exports)
    ctx.channels = channels
    ctx.pair_endos = {"tautau": rho_tt, "sigsig": rho_ss,
                      "tauL": eL["tau"], "tauR": eR["tau"],
                      "sigmaL": eL["sigma"], "sigmaR": eR["sigma"]}
    return ctx


def _pair_endo(endo_left, endo_right, name):
    images = {}
    images.update(endo_left.images)
    images.update(endo_right.images)
    return Endo(name, images)


def _eps_2d(name_a, name_b) -> OperatorExpr:
    """eps_{a(x)a, b(x)b} = eps_{a,b} (x) eps*_{b,a} for diagonal sectors."""
    epsL = chiral_braiding(0)
    epsR = chiral_braiding(1)
    return epsL[(name_a, name_b)] * epsR[(name_b, name_a)].dagger()


@lru_cache(maxsize=1)
def boundary_context() -> ExtensionContext:
    """The braided product of two copies of the 2D Ising extension with the
    opposite braiding (the universal boundary algebra of Example 5)."""
    base = ising2d_context()
    theta, W, X = base.theta, base.w, base.x

    eps_plus = base.exports["eps_theta"]

    # Theta(eps^-) assembled channel by channel (Theta is multiplicative,
    # so it can be applied to the small factors instead of the 100+-term
    # normal form of eps^-)
    th_eps_minus = OperatorExpr.zero()
    for na, (Ta, rho_a) in base.channels.items():
        for nb, (Tb, rho_b) in base.channels.items():
            emb_ab = theta.apply(Ta * rho_a.apply(Tb))
            emb_ba = theta.apply(Tb * rho_b.apply(Ta))
            mid = theta.apply(_eps_2d(na, nb).dagger())
            th_eps_minus = th_eps_minus + \
                (emb_ab * mid).compressed() * emb_ba.dagger()
    th_eps_minus = th_eps_minus.compressed()

    theta_C = ComposedEndo(theta, theta, name="Theta^2")
    W_C = (theta.apply(W) * W).compressed()
    X_left = (th_eps_minus * X).compressed()
    th_X = theta.apply(X).compressed()
    X_C = (X_left * th_X).compressed()

    W_tt, W_ss = base.exports["W_tt"], base.exports["W_ss"]
    psiL_tt = (W_tt.dagger() * theta.apply(W.dagger())).compressed()
    psiL_ss = (W_ss.dagger() * theta.apply(W.dagger())).compressed()
    psiR_tt = (W.dagger() * theta.apply(W_tt.dagger())).compressed()
    psiR_ss = (W.dagger() * theta.apply(W_ss.dagger())).compressed()

    exports = dict(base.exports)
    del exports["W"], exports["X"], exports["Psi_tt"], exports["Psi_ss"]
    exports.update({
        "W": W_C, "X": X_C, "eps_theta": eps_plus,
        "PsiL_tt": psiL_tt, "PsiL_ss": psiL_ss,
        "PsiR_tt": psiR_tt, "PsiR_ss": psiR_ss,
    })
    ctx = ExtensionContext("boundary", theta_C, W_C, X_C, Ex.rational(4), exports)
    ctx.x_factors = (X_left, th_X)
    ctx.pair_endos = base.pair_endos

    B_tt = ctx.ext_mul(ctx.ext_star(psiL_tt), psiR_tt)
    B_ss = ctx.ext_mul(ctx.ext_star(psiL_ss), psiR_ss)
    half_one = HALF * ctx.ext_one
    E_plus = ctx.ext_mul(half_one + HALF * B_tt, half_one + HALF * B_ss)
    E_minus = ctx.ext_mul(half_one + HALF * B_tt, half_one - HALF * B_ss)
    E_dual = half_one - HALF * B_tt
    sqrt_i = Ex.zeta_pow(2)        # exp(i pi / 4)
    sqrt_minus_i = Ex.zeta_pow(-2)
    psi_plus = sqrt_minus_i * ctx.ext_mul(
        ctx.ext_star(psiL_ss) * ctx.theta.apply(exports["uL"]), psiR_ss)
    psi_minus = sqrt_i * ctx.ext_mul(
        ctx.ext_star(psiL_ss) * ctx.theta.apply(exports["uR"]), psiR_ss)
    ctx.exports.update({
        "B_tt": B_tt, "B_ss": B_ss,
        "E_plus": E_plus, "E_minus": E_minus, "E_dual": E_dual,
        "psi_plus": psi_plus, "psi_minus": psi_minus,
    })
    return ctx


def express_in_basis(target: OperatorExpr, basis: list[OperatorExpr],
                     depth: int = 2) -> list[Ex]:
    """Exact coefficients of `target` in the linear span of `basis`.

    All expressions are expanded to a common creation depth (where words of
    fixed creation length are linearly independent) and the resulting exact
    linear system is solved by Gaussian elimination; raises
    :class:`CuntzError` if the target is not in the span.
    """
    exprs = [target] + list(basis)
    levels: dict = {}
    for e in exprs:
        for key, lvl in e.creation_depths().items():
            levels[key] = max(levels.get(key, 0), lvl, depth)
    expanded = [e.expanded(levels) for e in exprs]
    words = sorted({w for e in expanded for w in e.terms})
    rows = len(words)
    cols = len(basis)
    A = [[expanded[j + 1].terms.get(w, Ex()) for j in range(cols)] for w in words]
    y = [expanded[0].terms.get(w, Ex()) for w in words]
    # Gaussian elimination over the exact field
    sol = [Ex() for _ in range(cols)]
    piv_rows: list[int] = []
    piv_cols: list[int] = []
    r = 0
    for c in range(cols):
        p = next((k for k in range(r, rows) if not A[k][c].is_zero), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        y[r], y[p] = y[p], y[r]
        inv = A[r][c].inverse()
        A[r] = [v * inv for v in A[r]]
        y[r] = y[r] * inv
        for k in range(rows):
            if k != r and not A[k][c].is_zero:
                f = A[k][c]
                A[k] = [v - f * w2 for v, w2 in zip(A[k], A[r])]
                y[k] = y[k] - f * y[r]
        piv_rows.append(r)
        piv_cols.append(c)
        r += 1
    for k in range(r, rows):
        if not y[k].is_zero:
            raise CuntzError("expression does not lie in the span of the basis")
    for row, col in zip(piv_rows, piv_cols):
        sol[col] = y[row]
    return sol
