"""Discrete loop rectification in the state space of M_n(C).

A based loop of density matrices is contracted to the constant loop by
the action of explicit operator families: unitary eigenvector transport
(with a disk phase lift to keep linear interpolations outside the Gelfand
ideal), compression onto nested corner blocks, and a verifier that
certifies the resulting two-parameter sheet cell by cell.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
import scipy.linalg

from .linalg import eye
from .projective import elementary_transport
from .states import DensityState, act, basis_state
from .util import NumericalGateError

PURITY_THRESHOLD = 7.0 / 8.0
CONTINUATION_MIN_OVERLAP = 0.1
SAFETY_FLOOR = 1e-10
BOUNDARY_RADIUS = 1.0 - 1e-9
DEFAULT_MAX_STEP = 0.02
BASEPOINT_TOL = 1e-9


def projection_matrix(n: int, k: int) -> np.ndarray:
    """diag(1, ..., 1, 0, ..., 0) with k trailing zeros."""
    if not 0 <= k <= n - 1:
        raise ValueError(f"k={k} out of range for n={n}")
    return np.diag(np.array([1.0] * (n - k) + [0.0] * k)).astype(np.complex128)


@dataclass
class StateLoop:
    """A closed, based loop of states on M_n."""

    n: int
    samples: list  # list[DensityState], first == last

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("loops live on M_n with n >= 2")
        if len(self.samples) < 3:
            raise ValueError("a loop needs at least three samples")
        for s in self.samples:
            if not isinstance(s, DensityState) or s.dim != self.n:
                raise ValueError("loop samples must be states on M_n")
        base = basis_state(self.n)
        if _dist(self.samples[0], base) > BASEPOINT_TOL or _dist(self.samples[-1], base) > BASEPOINT_TOL:
            raise ValueError("loop must be based at the first-basis-vector state")
        if _dist(self.samples[0], self.samples[-1]) > BASEPOINT_TOL:
            raise ValueError("loop is not closed")

    @property
    def n_samples(self) -> int:
        return len(self.samples)

    @property
    def max_step(self) -> float:
        return max(
            _dist(a, b) for a, b in zip(self.samples, self.samples[1:])
        )


def _dist(a: DensityState, b: DensityState) -> float:
    return float(np.sum(np.linalg.svd(a.rho - b.rho, compute_uv=False)))


@dataclass
class HomotopySheet:
    """T x S grid of states: row 0 is the input loop, later rows are the
    successive deformations; meta records the operator families used."""

    n: int
    rows: list  # list of rows; each row is a list[DensityState] of equal length
    meta: list = field(default_factory=list)

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.rows), len(self.rows[0]))

    def as_array(self) -> np.ndarray:
        return np.array(
            [[s.rho for s in row] for row in self.rows], dtype=np.complex128
        )


class SafetyReport(NamedTuple):
    safe: bool
    min_value: float
    s_at_min: float


def interpolation_safe(a: np.ndarray, omega: DensityState, kind: str) -> SafetyReport:
    """Scan omega((sA + (1-s)1)† (sA + (1-s)1)) over a 101-point s grid.

    Projections with omega(P) > 0 are always safe; unitaries are unsafe
    only near omega(U) = -1 at s = 1/2.
    """
    a = np.asarray(a, dtype=np.complex128)
    n = omega.dim
    if kind == "unitary":
        if np.max(np.abs(a @ a.conj().T - eye(n))) > 1e-9:
            raise ValueError("not a unitary")
    elif kind == "projection":
        if np.max(np.abs(a @ a - a)) > 1e-9 or np.max(np.abs(a - a.conj().T)) > 1e-9:
            raise ValueError("not an orthogonal projection")
    else:
        raise ValueError("kind must be 'unitary' or 'projection'")
    best = np.inf
    s_best = 0.0
    for s in np.linspace(0.0, 1.0, 101):
        m = s * a + (1.0 - s) * eye(n)
        val = float(np.trace(omega.rho @ m.conj().T @ m).real)
        if val < best:
            best, s_best = val, float(s)
    return SafetyReport(best > SAFETY_FLOOR, best, s_best)


def _alignment_wedge(r: float) -> float:
    """Half-angle around +1 that lambda*gamma is confined to at radius r:
    unconstrained at the center, shrinking linearly to 0 on the boundary
    circle. Confinement keeps 1 + Re(lambda*gamma) >= 0.8 everywhere."""
    return np.pi * (1.0 - min(max(r, 0.0), 1.0))


def disk_phase_lift(gamma: np.ndarray) -> np.ndarray:
    """Continuous unit-scalar path lambda with lambda*gamma = 1 wherever
    gamma touches the boundary circle.

    Discrete chart rule: the product lambda*gamma is confined to a wedge
    around +1 that closes as |gamma| grows from the engage radius to the
    boundary. Deep inside the disk lambda is held; outside, it is rotated
    by the minimal amount that keeps the product inside the wedge, and is
    snapped to exact alignment when gamma touches the boundary. This
    keeps 1 + Re(lambda*gamma) uniformly positive, so linear unitary
    interpolations never approach the Gelfand ideal.
    """
    g = np.asarray(gamma, dtype=np.complex128).ravel()
    if g.shape[0] < 2:
        raise ValueError("need at least two samples")
    if np.max(np.abs(g)) > 1.0 + 1e-9:
        raise ValueError("path leaves the closed unit disk")
    steps = np.abs(np.diff(g))
    if steps.max(initial=0.0) >= 0.1:
        raise ValueError("path too coarsely sampled for the phase lift (step >= 0.1)")

    lam = np.ones(g.shape[0], dtype=np.complex128)
    for t in range(g.shape[0]):
        prev = lam[t - 1] if t > 0 else 1.0 + 0.0j
        w = g[t]
        r = abs(w)
        if r >= BOUNDARY_RADIUS:
            lam[t] = np.conj(w) / r
            continue
        if r < 1e-12:
            lam[t] = prev
            continue
        wedge = _alignment_wedge(r)
        ang = float(np.angle(prev * w))
        if abs(ang) <= wedge:
            lam[t] = prev
        else:
            lam[t] = prev * np.exp(-1j * (ang - np.sign(ang) * wedge))

    phase_steps = np.abs(np.angle(lam[1:] / lam[:-1]))
    if phase_steps.max(initial=0.0) >= np.pi:
        raise ValueError("phase lift produced a step >= pi; sampling too coarse")
    on_boundary = np.abs(g) >= BOUNDARY_RADIUS
    if on_boundary.any():
        defect = np.max(np.abs(lam[on_boundary] * g[on_boundary] - 1.0))
        if defect > 1e-8:
            raise RuntimeError(f"phase lift misaligned on the boundary: {defect:.2e}")
    return lam


def _top_eigenpair(rho: np.ndarray) -> tuple[float, np.ndarray]:
    evals, evecs = np.linalg.eigh(rho)
    return float(evals[-1]), evecs[:, -1]


def _pin_phase(v: np.ndarray) -> np.ndarray:
    k = int(np.argmax(np.abs(v)))
    ph = v[k] / abs(v[k])
    return v / ph


def _transport_unitaries(loop: StateLoop) -> list[np.ndarray]:
    """Stage 1: eigenvector transport on near-pure runs, geodesic bridges
    across non-pure gaps.

    On each maximal run of samples with top eigenvalue > 7/8 the top
    eigenvector is continued with positive-overlap phase alignment and
    sent to e_0 by an elementary transport. Inside a gap any unitary is
    admissible (a unitary cannot make a non-pure state pure), so the held
    endpoint unitary is rotated to the next run's initial transport along
    the unitary-group geodesic, spread over the gap interior.
    """
    n = loop.n
    t_count = loop.n_samples
    rhos = [s.rho for s in loop.samples]
    tops = [_top_eigenpair(r) for r in rhos]
    near_pure = [lam > PURITY_THRESHOLD for lam, _ in tops]
    if not (near_pure[0] and near_pure[-1]):
        raise ValueError("basepoint samples must be near-pure")

    e0 = np.zeros(n, dtype=np.complex128)
    e0[0] = 1.0
    unitaries: list = [None] * t_count
    t = 0
    prev_v = None
    while t < t_count:
        if not near_pure[t]:
            t += 1
            continue
        run_start = t
        while t < t_count and near_pure[t]:
            t += 1
        run = range(run_start, t)
        for i in run:
            _, v = tops[i]
            if i == run.start:
                v = e0.copy() if run_start == 0 else _pin_phase(v)
            else:
                ov = np.vdot(prev_v, v)
                if abs(ov) < CONTINUATION_MIN_OVERLAP:
                    raise NumericalGateError(
                        f"eigenvector continuation ambiguous at sample {i} "
                        f"(overlap {abs(ov):.3f})"
                    )
                v = v * (np.conj(ov) / abs(ov))
            prev_v = v
            unitaries[i] = elementary_transport(v, e0)

    # geodesic bridges across the gaps
    i = 0
    while i < t_count:
        if unitaries[i] is not None:
            i += 1
            continue
        gap_start = i
        while unitaries[i] is None:
            i += 1
        left, right = gap_start - 1, i
        d = unitaries[right] @ unitaries[left].conj().T
        k = scipy.linalg.logm(d)
        k = (k - k.conj().T) / 2
        span = right - left
        for j in range(gap_start, right):
            frac = (j - left) / span
            unitaries[j] = scipy.linalg.expm(frac * k) @ unitaries[left]
    return unitaries


def _interp_rows(mats, states, n_rows, fine_mult: int = 6):
    """Rows of the homotopy acting with s M_t + (1-s) 1 on each column.

    The s parameter is resampled per column at uniform trace-norm arc
    length (a fine pre-pass measures each column's motion), which keeps
    the sheet's step modulus proportional to the input modulus even where
    the interpolation moves unevenly in s.
    """
    t_count = len(states)
    n = states[0].dim
    ident = eye(n)
    f_count = max(n_rows * fine_mult, 48)
    s_fine = np.linspace(0.0, 1.0, f_count + 1)
    s_chosen = np.empty((t_count, n_rows))
    fractions = np.arange(1, n_rows + 1) / n_rows
    for t in range(t_count):
        m = mats[t]
        bs = s_fine[:, None, None] * m[None] + (1.0 - s_fine)[:, None, None] * ident[None]
        raw = bs @ states[t].rho[None] @ np.conj(np.swapaxes(bs, -1, -2))
        tr = np.einsum("fii->f", raw).real
        rho_s = raw / tr[:, None, None]
        arcs = np.concatenate(
            [[0.0], np.cumsum(_batched_trace_norm(rho_s[1:] - rho_s[:-1]))]
        )
        if arcs[-1] < 1e-13:
            s_chosen[t] = fractions
        else:
            s_chosen[t] = np.interp(fractions * arcs[-1], arcs, s_fine)
    rows = []
    for j in range(n_rows):
        row = []
        for t in range(t_count):
            s = s_chosen[t, j] if j < n_rows - 1 else 1.0
            row.append(act(s * mats[t] + (1.0 - s) * ident, states[t]))
        rows.append(row)
    return rows


def _rows_for(target_step: float, movement: float, minimum: int = 8) -> int:
    if movement <= 0:
        return minimum
    return max(minimum, int(np.ceil(movement / max(target_step, 1e-12))))


class RectifyResult(NamedTuple):
    sheet: HomotopySheet
    out_loop: StateLoop


def rectify_to_projection(
    loop: StateLoop, max_step: float = DEFAULT_MAX_STEP, target_row_step: float | None = None
) -> RectifyResult:
    """Deform a based loop so that every sample gives weight one to the
    corner projection P^n_1 (no weight on the last basis vector).

    Three stages: eigenvector-transport unitaries, a disk phase lift of
    t -> omega_t(U_t) so the unitary interpolation stays outside every
    Gelfand ideal, then the linear interpolations with s lambda_t U_t and
    with s P^n_1. Every interpolation is certified by interpolation_safe.
    """
    delta = loop.max_step
    if delta > max_step:
        raise ValueError(f"loop step {delta:.4f} exceeds the supported modulus {max_step}")
    n = loop.n
    t_count = loop.n_samples
    target = target_row_step if target_row_step is not None else 2.5 * max(delta, 1e-3)

    unitaries = _transport_unitaries(loop)
    gamma = np.array(
        [np.trace(loop.samples[t].rho @ unitaries[t]) for t in range(t_count)]
    )
    gamma = np.where(np.abs(gamma) > 1.0, gamma / np.abs(gamma), gamma)
    lam = disk_phase_lift(gamma)

    lifted = [lam[t] * unitaries[t] for t in range(t_count)]
    for t in range(t_count):
        rep = interpolation_safe(lifted[t] / lam[t], loop.samples[t], "unitary")
        # safety of the *lifted* interpolation: rescan with the phase folded in
        vals = _interp_values(lifted[t], loop.samples[t])
        if vals.min() <= SAFETY_FLOOR:
            raise NumericalGateError(
                f"unitary interpolation unsafe at sample {t} despite phase lift "
                f"(min {vals.min():.3e}, unlifted min {rep.min_value:.3e})"
            )

    chi = [act(lifted[t], loop.samples[t]) for t in range(t_count)]
    proj = projection_matrix(n, 1)
    for t in range(t_count):
        rep = interpolation_safe(proj, chi[t], "projection")
        if not rep.safe:
            raise NumericalGateError(f"projection interpolation unsafe at sample {t}")

    move_a = max(_dist(chi[t], loop.samples[t]) for t in range(t_count))
    rows_a = _rows_for(target, move_a)
    sheet_rows = [list(loop.samples)]
    sheet_rows += _interp_rows(lifted, loop.samples, rows_a)
    out_a = sheet_rows[-1]

    move_b = max(_dist(act(proj, out_a[t]), out_a[t]) for t in range(t_count))
    rows_b = _rows_for(target, move_b)
    sheet_rows += _interp_rows([proj] * t_count, out_a, rows_b)
    out_loop = StateLoop(n, sheet_rows[-1])
    meta = [
        {"stage": "unitary-interp", "rows": rows_a, "identity_at_s0": True},
        {"stage": "projection-interp", "rows": rows_b, "identity_at_s0": True},
    ]
    return RectifyResult(HomotopySheet(n, sheet_rows, meta), out_loop)


def _interp_values(a: np.ndarray, omega: DensityState) -> np.ndarray:
    n = omega.dim
    out = np.empty(101)
    for i, s in enumerate(np.linspace(0.0, 1.0, 101)):
        m = s * a + (1.0 - s) * eye(n)
        out[i] = float(np.trace(omega.rho @ m.conj().T @ m).real)
    return out


def _compress(state: DensityState, block: int) -> DensityState:
    rho = state.rho[:block, :block].copy()
    rho = rho / np.trace(rho).real
    return DensityState((rho + rho.conj().T) / 2)


def _embed(state: DensityState, n: int) -> DensityState:
    b = state.dim
    rho = np.zeros((n, n), dtype=np.complex128)
    rho[:b, :b] = state.rho
    return DensityState(rho)


def contract_loop(loop: StateLoop, max_step: float = DEFAULT_MAX_STEP) -> HomotopySheet:
    """Contract a based loop to the constant loop at the basepoint.

    Iterates rectification on the corner-block algebras: after level k the
    loop gives weight one to P^n_k, and the block homotopy is pushed
    forward by (1 - P) + (embedded block operator). At k = n-1 the loop is
    pinned to the basepoint.
    """
    n = loop.n
    delta = loop.max_step
    target = 2.5 * max(delta, 1e-3)
    sheet_rows = [list(loop.samples)]
    meta: list = []
    current = loop
    for k in range(1, n):
        block = n - k + 1  # current block algebra size
        block_loop = StateLoop(
            block, [_compress(s, block) for s in current.samples]
        ) if block < n else current
        res = rectify_to_projection(
            block_loop, max_step=max(max_step, block_loop.max_step * (1 + 1e-12)),
            target_row_step=target,
        )
        for row in res.sheet.rows[1:]:
            sheet_rows.append([_embed(s, n) for s in row])
        for m in res.sheet.meta:
            meta.append({**m, "level": k, "block": block})
        current = StateLoop(n, sheet_rows[-1])
    return HomotopySheet(n, sheet_rows, meta)


@dataclass
class VerifyReport:
    passed: bool
    violations: list
    max_cell_step: float
    shape: tuple[int, int]

    def summary(self) -> str:
        status = "pass" if self.passed else "fail"
        return (
            f"{status}: sheet {self.shape[0]}x{self.shape[1]}, "
            f"max step {self.max_cell_step:.5f}, {len(self.violations)} violation(s)"
        )


def verify_homotopy(sheet: HomotopySheet, input_loop: StateLoop, modulus: float) -> VerifyReport:
    """Certify a contraction sheet: every cell a valid state, row 0 equals
    the input, the basepoint columns constant, the final row constant at
    the basepoint, and all adjacent-cell steps within the modulus."""
    violations = []
    arr = sheet.as_array()
    s_dim, t_dim = arr.shape[0], arr.shape[1]
    n = sheet.n
    base = basis_state(n).rho

    herm = np.max(np.abs(arr - np.conj(np.swapaxes(arr, -1, -2))), axis=(-1, -2))
    for idx in np.argwhere(herm > 1e-8):
        violations.append(("non-hermitian", tuple(idx), float(herm[tuple(idx)]), 1e-8))
    traces = np.abs(np.einsum("stii->st", arr) - 1.0)
    for idx in np.argwhere(traces > 1e-8):
        violations.append(("trace", tuple(idx), float(traces[tuple(idx)]), 1e-8))
    eigs = np.linalg.eigvalsh((arr + np.conj(np.swapaxes(arr, -1, -2))) / 2)
    neg = -eigs.min(axis=-1)
    for idx in np.argwhere(neg > 1e-8):
        violations.append(("negative-eigenvalue", tuple(idx), float(neg[tuple(idx)]), 1e-8))

    in_arr = np.array([s.rho for s in input_loop.samples])
    row0 = _batched_trace_norm(arr[0] - in_arr)
    for idx in np.argwhere(row0 > 1e-10):
        violations.append(("row0-mismatch", (0, int(idx)), float(row0[idx]), 1e-10))

    for col, label in ((0, "left-column"), (t_dim - 1, "right-column")):
        dev = _batched_trace_norm(arr[:, col] - base[None])
        for idx in np.argwhere(dev > 1e-8):
            violations.append((label, (int(idx), col), float(dev[idx]), 1e-8))

    final_dev = _batched_trace_norm(arr[-1] - base[None])
    for idx in np.argwhere(final_dev > 1e-8):
        violations.append(("final-row", (s_dim - 1, int(idx)), float(final_dev[idx]), 1e-8))

    step_t = _batched_trace_norm(arr[:, 1:] - arr[:, :-1])
    step_s = _batched_trace_norm(arr[1:] - arr[:-1])
    max_step = float(max(step_t.max(initial=0.0), step_s.max(initial=0.0)))
    if max_step > modulus:
        worst = np.unravel_index(np.argmax(step_t), step_t.shape) if step_t.max(
            initial=0.0
        ) >= step_s.max(initial=0.0) else np.unravel_index(np.argmax(step_s), step_s.shape)
        violations.append(("step-modulus", tuple(int(x) for x in worst), max_step, modulus))

    return VerifyReport(
        passed=(len(violations) == 0),
        violations=violations,
        max_cell_step=max_step,
        shape=(s_dim, t_dim),
    )


def _batched_trace_norm(diff: np.ndarray) -> np.ndarray:
    return np.sum(np.linalg.svd(diff, compute_uv=False), axis=-1)


# --- bundled example loops -------------------------------------------------


def bundled_pure_loop(n_samples: int = 400) -> StateLoop:
    """n=2 loop of pure states along the real great circle
    cos(pi t) e_0 + sin(pi t) e_1; closes projectively at t = 1."""
    samples = []
    for t in np.linspace(0.0, 1.0, n_samples + 1):
        v = np.array([np.cos(np.pi * t), np.sin(np.pi * t)], dtype=np.complex128)
        samples.append(DensityState(np.outer(v, v.conj())))
    return StateLoop(2, samples)


def bundled_plateau_loop(n_samples: int = 900) -> StateLoop:
    """n=3 based loop that passes through a rank-2 plateau: purify out of
    the basepoint, melt into a mixed block, rotate the block, refreeze
    onto a rotated pure state and come home."""
    e = np.eye(3, dtype=np.complex128)

    def pure(v):
        v = v / np.linalg.norm(v)
        return np.outer(v, v.conj())

    def rho_at(t: float) -> np.ndarray:
        v1 = np.cos(0.4 * np.pi * t * 4) * e[0] + np.sin(0.4 * np.pi * t * 4) * e[1]
        if t < 0.25:
            return pure(v1)
        a = np.cos(0.4 * np.pi) * e[0] + np.sin(0.4 * np.pi) * e[1]
        b = -np.sin(0.4 * np.pi) * e[0] + np.cos(0.4 * np.pi) * e[1]
        mixed = 0.55 * pure(a) + 0.35 * pure(b) + 0.10 * pure(e[2])
        if t < 0.40:
            u = (t - 0.25) / 0.15
            return (1 - u) * pure(a) + u * mixed
        if t < 0.60:
            u = (t - 0.40) / 0.20
            th = 0.3 * np.pi * u
            r = np.eye(3, dtype=np.complex128)
            r[0, 0] = np.cos(th)
            r[0, 1] = -np.sin(th)
            r[1, 0] = np.sin(th)
            r[1, 1] = np.cos(th)
            return r @ mixed @ r.conj().T
        th = 0.3 * np.pi
        r = np.eye(3, dtype=np.complex128)
        r[0, 0] = np.cos(th)
        r[0, 1] = -np.sin(th)
        r[1, 0] = np.sin(th)
        r[1, 1] = np.cos(th)
        mixed_r = r @ mixed @ r.conj().T
        a_r = r @ a
        if t < 0.75:
            u = (t - 0.60) / 0.15
            return (1 - u) * mixed_r + u * pure(a_r)
        u = (t - 0.75) / 0.25
        # rotate a_r back to e_0 along the real circle through its (e0, e1) angle
        ang = np.arctan2(a_r[1].real, a_r[0].real)
        v = np.cos(ang * (1 - u)) * e[0] + np.sin(ang * (1 - u)) * e[1]
        return pure(v)

    samples = [DensityState(_snap(rho_at(t))) for t in np.linspace(0.0, 1.0, n_samples + 1)]
    return StateLoop(3, samples)


def random_based_loop(n: int = 3, seed: int = 7, n_samples: int = 700) -> StateLoop:
    """Seeded smooth based loop on M_n mixing rotation and partial
    depolarization; endpoints pinned to the basepoint."""
    rng = np.random.default_rng(seed)
    gens = []
    for _ in range(2):
        a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        gens.append((a + a.conj().T) / 2)
    c1, c2 = rng.uniform(0.3, 0.7, size=2)

    def rho_at(t: float) -> np.ndarray:
        h = c1 * np.sin(np.pi * t) * gens[0] + c2 * np.sin(2 * np.pi * t) * gens[1]
        u = scipy.linalg.expm(1j * h)
        mix = 0.18 * np.sin(np.pi * t) ** 2
        d = np.diag(np.array([1 - mix] + [mix / (n - 1)] * (n - 1)))
        return u @ d @ u.conj().T

    samples = [DensityState(_snap(rho_at(t))) for t in np.linspace(0.0, 1.0, n_samples + 1)]
    return StateLoop(n, samples)


def constant_loop(n: int = 2, n_samples: int = 32) -> StateLoop:
    base = basis_state(n)
    return StateLoop(n, [base] * (n_samples + 1))


def _snap(rho: np.ndarray) -> np.ndarray:
    rho = (rho + rho.conj().T) / 2
    return rho / np.trace(rho).real
