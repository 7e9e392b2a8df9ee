"""Direction-finding step: minimize the scalarized quadratic model.

For a fixed selection tuple ``beta`` the model is

    min_p  max_j  theta( J_j' p + 1/2 (p' B_j^{(l)} p)_l )

with ``theta`` the cone scalarization.  For a polyhedral cone this max of a
piecewise-linear transform of quadratics expands into a finite max of smooth
convex quadratic pieces

    f_k(p) = c_k . p + 1/2 p' Q_k p,    k = (objective slot, cone row),

whose min-max is solved through its concave dual g(lam) = min_p sum lam_k f_k
over the unit simplex: the inner minimizer is closed-form,
``p(lam) = -Q(lam)^{-1} c(lam)``, the dual gradient is ``f(p(lam))``, and the
duality gap between the best primal point seen and the best dual bound is the
optimality certificate.  The ascent combines projected-gradient steps, a
ridge-stabilized Newton polish on the active face, a minimum-norm-point fit of
the certificate (which jumps flat stretches of the dual surface), and a
log-barrier solve of the primal as a fallback for badly scaled piece families.

The outer search iterates this over every tuple of the partition set and
keeps the smallest value, breaking ties toward the lexicographically
smallest tuple.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cones import PolyhedralCone
from .errors import NonconvergenceError, SubproblemError
from .hessians import HessianStore
from .setops import PartitionSet, ScenarioImage, max_elements, partition_set

DUAL_TOL = 1e-8
DUAL_MAX_ITER = 10_000
STATIONARITY_TOL = 1e-3
CONDITION_CAP = 1e10


@dataclass(frozen=True)
class SimplexWeights:
    """Dual multipliers over the (objective slot, cone row) pieces."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if np.any(v < -1e-12) or abs(float(v.sum()) - 1.0) > 1e-12:
            raise ValueError("weights must lie on the unit simplex")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)


@dataclass(frozen=True)
class SubproblemInstance:
    """Quadratic pieces of the scalarized model for one selection tuple.

    ``c`` has shape (K, n) and ``Q`` shape (K, n, n) with K = omega * q
    pieces.  Pieces whose aggregated curvature is indefinite or conditioned
    beyond ``CONDITION_CAP`` get a spectral ridge and are flagged through
    ``regularized``; afterwards every ``Q_k`` is symmetric positive definite.
    """

    c: np.ndarray
    Q: np.ndarray
    regularized: bool = False

    @property
    def n(self) -> int:
        return self.c.shape[1]

    @property
    def n_pieces(self) -> int:
        return self.c.shape[0]

    def values_at(self, p: np.ndarray) -> np.ndarray:
        """All piece values at one direction."""
        return self.c @ p + 0.5 * np.einsum("kij,i,j->k", self.Q, p, p)

    def gradients_at(self, p: np.ndarray) -> np.ndarray:
        """All piece gradients at one direction, stacked (K, n)."""
        return self.c + np.einsum("kij,j->ki", self.Q, p)

    @classmethod
    def build(cls, jacobians: np.ndarray, blocks: np.ndarray,
              cone: PolyhedralCone) -> "SubproblemInstance":
        """Assemble pieces from selected Jacobians and curvature blocks.

        Args:
            jacobians: (omega, n, m) Jacobian per selected scenario.
            blocks: (omega, m, n, n) curvature blocks per selected scenario.
            cone: ordering cone supplying the scalarization rows.
        """
        A = cone.rows                      # (q, m)
        scale = A @ cone.interior_point    # (q,)
        # c[j, i] = J_j a_i / (a_i . e);  Q[j, i] = sum_l a_il B_j^l / (a_i . e)
        c = np.einsum("jnl,il->jin", jacobians, A) / scale[None, :, None]
        Q = np.einsum("il,jlab->jiab", A, blocks) / scale[None, :, None, None]
        omega, q, n = c.shape[0], c.shape[1], c.shape[2]
        c = c.reshape(omega * q, n)
        Q = Q.reshape(omega * q, n, n)
        Q = 0.5 * (Q + np.swapaxes(Q, -1, -2))

        regularized = False
        eye = np.eye(n)
        for k in range(Q.shape[0]):
            w = np.linalg.eigvalsh(Q[k])
            wmax = float(w[-1])
            wmin = float(w[0])
            if wmax <= 0.0:
                Q[k] = max(1e-8, abs(wmax)) * eye
                regularized = True
                continue
            floor = wmax / CONDITION_CAP
            if wmin < floor:
                Q[k] += (floor - wmin) * eye
                regularized = True
        return cls(c=c, Q=Q, regularized=regularized)


@dataclass(frozen=True)
class DirectionSolution:
    """Certified minimizer of one fixed-selection subproblem."""

    p: np.ndarray
    value: float
    weights: SimplexWeights
    gap: float
    iterations: int


def _project_simplex(v: np.ndarray) -> np.ndarray:
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    rho = np.flatnonzero(u - css / np.arange(1, len(v) + 1) > 0.0)[-1]
    return np.maximum(v - css[rho] / (rho + 1.0), 0.0)


def _min_norm_weights(U: np.ndarray, max_iter: int = 200) -> np.ndarray:
    """Convex weights of the minimum-norm point of ``conv{rows of U}``.

    Wolfe's minimum-norm-point algorithm: grow a corral of vertices, solve
    the affine least-norm problem on it, and walk back to the feasible
    segment whenever a weight leaves the simplex.  Finite and exact up to
    rounding.
    """
    K = U.shape[0]
    j = int(np.argmin(np.einsum("kn,kn->k", U, U)))
    S = [j]
    w = np.array([1.0])
    z = U[j].copy()
    for _ in range(max_iter):
        dots = U @ z
        zz = float(z @ z)
        k = int(np.argmin(dots))
        if zz <= 1e-30 or dots[k] >= zz - 1e-12 * max(1.0, zz) or k in S:
            break
        S.append(k)
        w = np.append(w, 0.0)
        for _ in range(2 * K):
            V = U[S]
            s_len = len(S)
            M = np.zeros((s_len + 1, s_len + 1))
            M[0, 1:] = 1.0
            M[1:, 0] = 1.0
            M[1:, 1:] = V @ V.T
            rhs = np.zeros(s_len + 1)
            rhs[0] = 1.0
            try:
                v = np.linalg.solve(M, rhs)[1:]
            except np.linalg.LinAlgError:
                v = np.linalg.lstsq(M, rhs, rcond=None)[0][1:]
            if np.all(v > 1e-12):
                w = v
                break
            neg = v <= 1e-12
            denom = w[neg] - v[neg]
            good = denom > 1e-15
            theta = float(np.min(w[neg][good] / denom[good])) if good.any() else 0.0
            w = w + min(max(theta, 0.0), 1.0) * (v - w)
            w[w < 1e-12] = 0.0
            keep = w > 0.0
            if not keep.any():
                keep[int(np.argmax(v))] = True
                w[keep] = 1.0
            if keep.all():
                w = w / w.sum()
                break
            S = [S[i] for i in range(s_len) if keep[i]]
            w = w[keep]
            w = w / w.sum()
        z = w @ U[S]
    lam = np.zeros(K)
    lam[S] = w
    return lam


def _barrier_minmax(c: np.ndarray, Q: np.ndarray, tol: float):
    """Log-barrier solve of ``min_p max_k f_k(p)``.

    Returns ``(p, lam)`` with ``lam`` the normalized barrier multipliers;
    robust to piece families whose scales differ by many orders of
    magnitude, where simplex ascent creeps.
    """
    K, n = c.shape

    def values(p):
        return c @ p + 0.5 * np.einsum("kij,i,j->k", Q, p, p)

    p = np.zeros(n)
    t = float(np.max(values(p))) + 1.0
    mu = 1.0
    lam = np.full(K, 1.0 / K)
    for _ in range(40):
        for _ in range(60):
            f = values(p)
            r = t - f
            lam = mu / r
            u = c + np.einsum("kij,j->ki", Q, p)
            grad = np.concatenate([u.T @ lam, [1.0 - lam.sum()]])
            w = lam / r
            H = np.zeros((n + 1, n + 1))
            H[:n, :n] = np.einsum("k,kij->ij", lam, Q) + (u.T * w) @ u
            H[:n, n] = H[n, :n] = -(u.T @ w)
            H[n, n] = w.sum()
            try:
                d = np.linalg.solve(H, -grad)
            except np.linalg.LinAlgError:
                ridge = 1e-12 * (1.0 + float(np.abs(H).max()))
                d = np.linalg.solve(H + ridge * np.eye(n + 1), -grad)
            alpha = 1.0
            for _ in range(60):
                p2 = p + alpha * d[:n]
                t2 = t + alpha * d[n]
                if np.all(t2 - values(p2) > 0.0):
                    break
                alpha *= 0.5
            else:
                alpha = 0.0
            p = p + alpha * d[:n]
            t = t + alpha * d[n]
            if alpha == 0.0 or np.linalg.norm(grad) <= 1e-10 * max(1.0, abs(t)):
                break
        if mu <= 1e-3 * tol * max(1.0, abs(t)):
            break
        mu *= 0.1
    f = values(p)
    lam = mu / np.maximum(t - f, 1e-300)
    total = lam.sum()
    if not np.isfinite(total) or total <= 0.0:
        lam = np.full(K, 1.0 / K)
    else:
        lam = lam / total
    return p, lam


class _DualState:
    """Dual objective, inner minimizer and gradient at one multiplier."""

    __slots__ = ("lam", "p", "g", "f", "Qlam")

    def __init__(self, lam, c, Q):
        Qlam = np.einsum("k,kij->ij", lam, Q)
        clam = lam @ c
        p = -np.linalg.solve(Qlam, clam)
        self.lam = lam
        self.p = p
        self.g = float(0.5 * clam @ p)
        self.f = c @ p + 0.5 * np.einsum("kij,i,j->k", Q, p, p)
        self.Qlam = Qlam


def solve_fixed_beta(inst: SubproblemInstance, tol: float = DUAL_TOL,
                     max_iter: int = DUAL_MAX_ITER) -> DirectionSolution:
    """Certified solve of one fixed-selection min-max subproblem.

    Ascends the concave dual until the gap between the best primal point
    seen and the dual bound drops below ``tol * max(1, |g|)`` (the scale
    factor keeps the certificate meaningful on badly scaled models).

    Raises:
        NonconvergenceError: iteration cap reached; carries the best iterate.
        SubproblemError: the dual system became numerically singular.
    """
    c = inst.c
    Q = inst.Q
    K = inst.n_pieces
    n = inst.n

    best_primal = [np.inf, np.zeros(n)]

    def state(lam):
        try:
            st = _DualState(lam, c, Q)
        except np.linalg.LinAlgError as exc:
            raise SubproblemError("dual system is numerically singular") from exc
        primal = float(np.max(st.f))
        if primal < best_primal[0]:
            best_primal[0] = primal
            best_primal[1] = st.p
        return st

    def finish(st, iters):
        value, p = best_primal
        gap = value - st.g
        if value > 0.0:
            # p = 0 is always feasible with value 0, which is better here and
            # certified by the same dual bound
            p = np.zeros(n)
            value = 0.0
            gap = -st.g
        return DirectionSolution(
            p=p, value=float(value), weights=SimplexWeights(st.lam),
            gap=float(gap), iterations=iters,
        )

    def gap_of(st):
        return min(best_primal[0], 0.0) - st.g

    def try_fit(st):
        """Fit a certificate: minimum-norm convex combination of piece
        gradients vanishes at the primal optimum, which jumps the ascent
        across faces where the dual surface is flat."""
        U = inst.gradients_at(best_primal[1])
        fmax = float(np.max(st.f))
        out = None
        for which in ("tight", "all"):
            if which == "tight":
                idx = np.flatnonzero(st.f >= fmax - max(tol, 0.5 * (fmax - st.g)))
                if idx.size in (0, K):
                    continue
            else:
                idx = np.arange(K)
            w = _min_norm_weights(U[idx])
            total = w.sum()
            if total <= 0.0:
                continue
            lam_try = np.zeros(K)
            lam_try[idx] = w / total
            st_try = state(lam_try)
            if st_try.g > st.g and (out is None or st_try.g > out.g):
                out = st_try
        return out

    def try_newton(st, threshold):
        """Second-order ascent on the current face; the system is Jacobi
        equilibrated and solved with an escalating ridge until the step
        actually raises the dual."""
        gap = float(np.max(st.f)) - st.g
        active = (st.lam > 1e-12) | (st.f >= np.max(st.f) - max(threshold, 0.1 * gap))
        idx = np.flatnonzero(active)
        if idx.size < 2:
            return None
        U = c[idx] + np.einsum("kij,j->ki", Q[idx], st.p)
        try:
            W = np.linalg.solve(st.Qlam, U.T)
        except np.linalg.LinAlgError:
            return None
        H = -(U @ W)
        s = idx.size
        diag = np.sqrt(np.maximum(-np.diag(H), 1e-30))
        D = 1.0 / diag
        Hs = H * D[:, None] * D[None, :]
        for delta in (1e-12, 1e-8, 1e-4, 1e-1):
            M = np.zeros((s + 1, s + 1))
            M[:s, :s] = Hs - delta * (1.0 + np.abs(Hs).max()) * np.eye(s)
            M[:s, s] = D
            M[s, :s] = D
            rhs = np.concatenate([-st.f[idx] * D, [0.0]])
            try:
                d = np.linalg.solve(M, rhs)[:s] * D
            except np.linalg.LinAlgError:
                continue
            if not np.any(d != 0.0):
                continue
            dlam = np.zeros(K)
            dlam[idx] = d
            neg = dlam < 0.0
            alpha = 1.0
            if neg.any():
                alpha = min(1.0, float(np.min(-st.lam[neg] / dlam[neg])))
            for _ in range(20):
                if alpha <= 1e-18:
                    break
                lam_try = np.maximum(st.lam + alpha * dlam, 0.0)
                ssum = lam_try.sum()
                if ssum > 0.0:
                    lam_try = lam_try / ssum
                    st_try = state(lam_try)
                    if st_try.g > st.g:
                        return st_try
                alpha *= 0.5
        return None

    def try_barrier(st):
        p_ipm, lam_ipm = _barrier_minmax(c, Q, tol)
        primal = float(np.max(inst.values_at(p_ipm)))
        if primal < best_primal[0]:
            best_primal[0] = primal
            best_primal[1] = p_ipm
        st_try = state(lam_ipm)
        return st_try if st_try.g > st.g else None

    st = state(np.full(K, 1.0 / K))
    if K == 1:
        return finish(st, 0)

    step = 1.0
    barrier_used = False
    stalled = False
    iterations = 0
    while iterations < max_iter:
        iterations += 1
        threshold = tol * max(1.0, abs(st.g))
        if gap_of(st) <= threshold:
            return finish(st, iterations - 1)

        improved = False
        if iterations == 1 or iterations % 4 == 0:
            st_fit = try_fit(st)
            if st_fit is not None:
                st = st_fit
                improved = True

        if not improved:
            st_newton = try_newton(st, threshold)
            if st_newton is not None:
                st = st_newton
                improved = True

        if not improved:
            # projected-gradient ascent with step halving
            for _ in range(60):
                lam_try = _project_simplex(st.lam + step * st.f)
                if not np.any(lam_try != st.lam):
                    break
                st_try = state(lam_try)
                if st_try.g > st.g:
                    st = st_try
                    step *= 2.0
                    improved = True
                    break
                step *= 0.5

        if not improved or (iterations >= 150 and not barrier_used):
            if not barrier_used:
                barrier_used = True
                st_b = try_barrier(st)
                if st_b is not None:
                    st = st_b
                    improved = True
                elif gap_of(st) <= tol * max(1.0, abs(st.g)):
                    return finish(st, iterations)
            if not improved:
                if try_fit(st) is None:
                    stalled = True

        if stalled:
            break

    gap = gap_of(st)
    slack = tol * max(1.0, abs(st.g))
    if gap <= slack or (stalled and gap <= 64.0 * slack):
        return finish(st, iterations)
    sol = finish(st, iterations)
    raise NonconvergenceError(
        f"dual ascent stalled at gap {gap:.3e} (target {tol:.1e} relative)",
        p=sol.p, value=sol.value, weights=sol.weights, gap=sol.gap,
    )


@dataclass(frozen=True)
class Step2Result:
    """Winning selection tuple and certified direction at one iterate."""

    beta: tuple[int, ...]
    p: np.ndarray
    value: float
    weights: SimplexWeights
    gap: float
    regularized: bool
    per_beta_values: tuple[float, ...]


def solve_step2(problem, x, store: HessianStore, tol: float = DUAL_TOL,
                image: ScenarioImage | None = None,
                partition: PartitionSet | None = None,
                jacobians: np.ndarray | None = None) -> Step2Result:
    """Search the partition set for the best certified direction.

    Ties on the value are broken toward the lexicographically smallest
    tuple, so serial and parallel evaluation orders agree.
    """
    x = np.ravel(np.asarray(x, dtype=float))
    if image is None:
        image = max_elements(problem.evaluate_image(x), problem.cone)
    if partition is None:
        partition = partition_set(image)
    if jacobians is None:
        jacobians = problem.jacobian_stack(x)

    best: tuple[float, tuple[int, ...], DirectionSolution, bool] | None = None
    values = []
    for beta in partition:
        sel = list(beta)
        inst = SubproblemInstance.build(jacobians[sel], store.blocks[sel],
                                        problem.cone)
        sol = solve_fixed_beta(inst, tol=tol)
        values.append(sol.value)
        key = (sol.value, beta)
        if best is None or key < (best[0], best[1]):
            best = (sol.value, beta, sol, inst.regularized)

    value, beta, sol, regularized = best
    return Step2Result(
        beta=tuple(beta), p=sol.p, value=value, weights=sol.weights,
        gap=sol.gap, regularized=regularized,
        per_beta_values=tuple(values),
    )


def stationarity_value(problem, x, store: HessianStore,
                       tol: float = DUAL_TOL) -> float:
    """Minimum of the scalarized model; nonnegative only at stationary points."""
    return solve_step2(problem, x, store, tol=tol).value
