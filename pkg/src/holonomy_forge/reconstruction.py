"""Recovering the gauge potential and connection form from a holonomy map.

The central operation differentiates holonomies of frame-conjugated
straight-shift loops: with a reference frame psi and the straight segment
T from x to y,

    A_mu(x) = d/dy_mu  log H( psi[y]^{-1} o T o psi[x] )  at  y = x.

Derivatives are taken as central differences with one optional Richardson
extrapolation step (h and h/2), giving observed order ~4; the error
budget is explicit and owned by ``FdConfig``.  The same difference
quotient, applied to a general trivialized curve (a moving reference path
chi[i] plus a moving fiber value g(i)), evaluates the connection 1-form
on arbitrary tangent vectors; horizontality and frame covariance are then
checkable properties rather than axioms.

Curvature F_munu = d_mu A_nu - d_nu A_mu + [A_mu, A_nu] serves as the
computable gauge-covariant comparator between an input connection and its
round-trip reconstruction.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .lie_core import (
    AlgebraElement,
    FarFromIdentity,
    GroupElement,
    GroupSpec,
    exp_map,
    group_distance,
    log_map,
    project_to_algebra,
    project_to_group,
)
from .holonomy import (
    BasepointMismatch,
    ConnectionField,
    HolonomyMap,
    _abelian_line_integral,
    _integrate_transport,
    eval_holonomy,
    transport_along,
)
from .path_algebra import (
    LoopAtBase,
    PathFamily,
    PathNd,
    compose_paths,
    constant_path,
    contract,
    invert_path,
    random_polyline,
    reconstruction_loop,
    straight_segment,
    thin_reduce,
)

__all__ = [
    "StepTooLarge",
    "FdConfig",
    "PotentialField",
    "TrivializedCurve",
    "GridSpec",
    "RoundTripReport",
    "reconstruct_potential",
    "connection_form_action",
    "horizontal_transport",
    "transition_function",
    "gauge_transform_potential",
    "curvature",
    "round_trip_report",
    "potential_grid_csv",
    "parallel_map",
]


class StepTooLarge(ValueError):
    """Finite-difference step pushed a logarithm outside its trust region."""


@dataclass(frozen=True)
class FdConfig:
    """Finite-difference scheme: step, Richardson toggle, curvature step."""

    h: float = 1e-4
    richardson: bool = True
    curvature_h: float = 1e-3

    def __post_init__(self):
        if not 0.0 < self.h < 0.1:
            raise ValueError("h must lie in (0, 0.1)")
        if self.curvature_h < self.h:
            raise ValueError("curvature_h must be at least h")


def _thread_count() -> int:
    raw = os.environ.get("HOLONOMY_FORGE_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def parallel_map(fn, items):
    """Map honoring the HOLONOMY_FORGE_THREADS cap; order-preserving."""
    items = list(items)
    n = _thread_count()
    if n <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))


def _thin_loop(path: PathNd, basepoint) -> LoopAtBase:
    # Reduction keeps integrators away from degenerate zero-length pieces
    # (e.g. the constant frame path at the base point itself).
    return LoopAtBase(thin_reduce(path), basepoint)


def _log_for_difference(g: GroupElement) -> np.ndarray:
    """Logarithm guarded by the difference-quotient trust region.

    Difference quotients are only meaningful for near-identity arguments,
    independent of whether the group's own logarithm happens to extend
    further (it does for the positive reals).
    """
    ident = GroupElement.identity(g.spec)
    if group_distance(g, ident) >= 0.5:
        raise StepTooLarge(
            f"holonomy is {group_distance(g, ident):.3g} from the identity; reduce cfg.h"
        )
    try:
        return log_map(g).matrix
    except FarFromIdentity as exc:  # same trust radius, defensive
        raise StepTooLarge(f"reduce cfg.h: {exc}") from exc


def reconstruct_potential(
    h_map: HolonomyMap, psi: PathFamily, x, mu: int, cfg: FdConfig = FdConfig()
) -> AlgebraElement:
    """Gauge potential component A_mu(x) recovered from holonomies only.

    Central difference of log H over straight shifts of x along axis mu,
    with one Richardson step when configured.  Raises ``StepTooLarge`` if
    the holonomy of the difference loop leaves the logarithm trust region.
    """
    x = np.asarray(x, dtype=float)
    spec = h_map.spec
    step = np.zeros_like(x)
    step[mu] = 1.0

    def difference(h: float) -> np.ndarray:
        out = []
        for sign in (+1.0, -1.0):
            loop = reconstruction_loop(psi, x, x + sign * h * step)
            loop = _thin_loop(loop.path, loop.basepoint)
            out.append(_log_for_difference(eval_holonomy(h_map, loop)))
        return (out[0] - out[1]) / (2.0 * h)

    d = difference(cfg.h)
    if cfg.richardson:
        d = (4.0 * difference(cfg.h / 2.0) - d) / 3.0
    return AlgebraElement(spec, project_to_algebra(spec, d))


class PotentialField:
    """A gauge potential evaluatable at (point, direction).

    Either wraps a closed-form connection or reconstructs lazily from a
    holonomy map and frame, memoizing per (point, direction).  The memo is
    a plain dict; concurrent writes are benign because values are
    deterministic.
    """

    def __init__(self, dim: int, spec: GroupSpec, evaluator, label: str = ""):
        self.dim = dim
        self.spec = spec
        self._evaluator = evaluator
        self.label = label
        self._memo: dict = {}

    @classmethod
    def from_connection(cls, field: ConnectionField) -> "PotentialField":
        return cls(field.dim, field.spec, field.component, "closed-form")

    @classmethod
    def from_holonomy(
        cls, h_map: HolonomyMap, psi: PathFamily, cfg: FdConfig = FdConfig()
    ) -> "PotentialField":
        def evaluator(x, mu):
            return reconstruct_potential(h_map, psi, x, mu, cfg)

        return cls(h_map.field.dim, h_map.spec, evaluator, "reconstructed")

    def __call__(self, x, mu: int) -> AlgebraElement:
        x = np.asarray(x, dtype=float)
        key = (x.tobytes(), mu)
        hit = self._memo.get(key)
        if hit is None:
            hit = self._evaluator(x, mu)
            self._memo[key] = hit
        return hit

    def matrix(self, x, mu: int) -> np.ndarray:
        return self(x, mu).matrix

    def to_connection_field(self) -> ConnectionField:
        return ConnectionField(self.dim, self.spec, lambda x, mu: self(x, mu))


@dataclass(frozen=True, eq=False)
class TrivializedCurve:
    """A curve in the trivialized bundle: moving reference path + fiber value.

    ``chi(i)`` is a path from the base point to the moving foot point
    p(i) = chi(i)(1); ``g(i)`` the fiber value; ``base_curve`` realizes p
    as an explicit path so contractions of it can be formed.  The
    parameter interval must sit inside [0, 1] unless the foot point never
    moves (vertical curves), where contraction is trivial.
    """

    interval: tuple[float, float]
    chi: Callable[[float], PathNd]
    g: Callable[[float], GroupElement]
    base_curve: PathNd

    def __post_init__(self):
        lo, hi = self.interval
        if not lo < hi:
            raise ValueError("empty parameter interval")
        vertical = self.base_curve.is_constant()
        if not vertical and (lo < 0.0 or hi > 1.0):
            raise ValueError("moving curves need a parameter interval inside [0, 1]")
        anchor = self.chi(lo).point(0.0)
        for i in np.linspace(lo, hi, 5):
            ref_path = self.chi(float(i))
            if np.linalg.norm(ref_path.point(0.0) - anchor) > 1e-10 * (1.0 + np.max(np.abs(anchor))):
                raise ValueError("all chi(i) must start at the same base point")
            foot = ref_path.point(1.0)
            ref = self.base_curve.point(0.0 if vertical else float(i))
            if np.linalg.norm(foot - ref) > 1e-10 * (1.0 + np.max(np.abs(ref))):
                raise ValueError("chi(i) must end at the base curve point p(i)")

    @property
    def basepoint(self) -> np.ndarray:
        return self.chi(self.interval[0]).point(0.0)

    def loop_between(self, j: float, i: float) -> LoopAtBase:
        """The based loop chi(i)^{-1} o K(p,i) o K(p,j)^{-1} o chi(j)."""
        if self.base_curve.is_constant():
            ki = kj = self.base_curve
        else:
            ki, kj = contract(self.base_curve, i), contract(self.base_curve, j)
        path = compose_paths(invert_path(kj), self.chi(j))
        path = compose_paths(ki, path)
        path = compose_paths(invert_path(self.chi(i)), path)
        return _thin_loop(path, self.basepoint)

    @classmethod
    def vertical(cls, psi: PathFamily, x, g_of_i, halfwidth: float = 0.25) -> "TrivializedCurve":
        """Curve moving only in the fiber over a fixed point."""
        x = np.asarray(x, dtype=float)
        ref = psi[x]
        return cls((-halfwidth, halfwidth), lambda i: ref, g_of_i, constant_path(x))

    @classmethod
    def coordinate_shift(cls, psi: PathFamily, x, mu: int, spec: GroupSpec, span: float = 1.0) -> "TrivializedCurve":
        """Straight motion through x along axis mu with constant fiber value;
        the midpoint parameter 1/2 corresponds to x itself."""
        x = np.asarray(x, dtype=float)
        step = np.zeros_like(x)
        step[mu] = span
        base = straight_segment(x - 0.5 * step, x + 0.5 * step)
        ident = GroupElement.identity(spec)
        return cls((0.0, 1.0), lambda i: psi[base.point(i)], lambda i: ident, base)

    @classmethod
    def horizontal_lift(cls, h_map: HolonomyMap, psi: PathFamily, p: PathNd, g0: GroupElement) -> "TrivializedCurve":
        """The lift of p obtained by holonomy-only transport of g0."""
        return cls(
            (0.0, 1.0),
            lambda i: psi[p.point(i)],
            lambda i: horizontal_transport(h_map, psi, p, g0, i),
            p,
        )

    def right_translated(self, g0: GroupElement) -> "TrivializedCurve":
        """Same curve with fiber values multiplied by g0 on the right."""
        return TrivializedCurve(self.interval, self.chi, lambda i: self.g(i) @ g0, self.base_curve)


def connection_form_action(
    h_map: HolonomyMap, curve: TrivializedCurve, j: float, cfg: FdConfig = FdConfig()
) -> AlgebraElement:
    """Connection 1-form applied to the tangent of a trivialized curve at j.

    Central difference over i of log( g(j)^{-1} H(loop(j, i)) g(i) ); the
    argument is the identity at i = j, so the quotient lands in the
    algebra.
    """
    lo, hi = curve.interval
    if not lo < j < hi:
        raise ValueError("evaluation parameter must be interior to the curve interval")
    if j - cfg.h < lo or j + cfg.h > hi:
        raise StepTooLarge("cfg.h exceeds the distance from j to the interval ends")
    spec = h_map.spec
    gj_inv = curve.g(j).inverse().matrix

    def value(i: float) -> np.ndarray:
        hol = eval_holonomy(h_map, curve.loop_between(j, i))
        m = gj_inv @ hol.matrix @ curve.g(i).matrix
        return _log_for_difference(GroupElement(spec, project_to_group(spec, m)))

    def difference(h: float) -> np.ndarray:
        return (value(j + h) - value(j - h)) / (2.0 * h)

    d = difference(cfg.h)
    if cfg.richardson:
        d = (4.0 * difference(cfg.h / 2.0) - d) / 3.0
    return AlgebraElement(spec, project_to_algebra(spec, d))


def horizontal_transport(
    h_map: HolonomyMap, psi: PathFamily, p: PathNd, g0: GroupElement, i: float
) -> GroupElement:
    """Parallel transport of g0 along p expressed purely through holonomies.

    The transported value is H( (K(p,i) o psi[p(0)])^{-1} o psi[p(i)] ) g0;
    at i = 0 the loop is thin, so the initial value comes out exactly.
    """
    reach = compose_paths(contract(p, i), psi[p.point(0.0)])
    loop = compose_paths(invert_path(reach), psi[p.point(float(i))])
    hol = eval_holonomy(h_map, _thin_loop(loop, psi.basepoint))
    return hol @ g0


def transition_function(h_map: HolonomyMap, psi: PathFamily, psi2: PathFamily, x) -> GroupElement:
    """Frame-change value H( psi2[x]^{-1} o psi[x] ).

    Multiplying on the left by this value (and adding its logarithmic
    derivative) carries the psi-frame potential into the psi2-frame one;
    swapping the arguments yields the inverse element.
    """
    if np.linalg.norm(psi.basepoint - psi2.basepoint) > 1e-12 * (1.0 + np.max(np.abs(psi.basepoint))):
        raise BasepointMismatch("frames must share a base point")
    x = np.asarray(x, dtype=float)
    loop = compose_paths(invert_path(psi2[x]), psi[x])
    return eval_holonomy(h_map, _thin_loop(loop, psi.basepoint))


def gauge_transform_potential(
    A: PotentialField, gfield: Callable[[np.ndarray], GroupElement], x, mu: int, cfg: FdConfig = FdConfig()
) -> AlgebraElement:
    """Transform a potential by a group-valued field:
    g^{-1} A_mu g + g^{-1} d_mu g, the derivative by central difference."""
    x = np.asarray(x, dtype=float)
    step = np.zeros_like(x)
    step[mu] = 1.0
    g = gfield(x).matrix
    g_inv = gfield(x).inverse().matrix

    def dg(h: float) -> np.ndarray:
        plus = gfield(x + h * step).matrix
        minus = gfield(x - h * step).matrix
        if np.linalg.norm(plus - minus) > 1.0:
            raise StepTooLarge("gauge field varies too fast at the difference scale")
        return (plus - minus) / (2.0 * h)

    d = dg(cfg.h)
    if cfg.richardson:
        d = (4.0 * dg(cfg.h / 2.0) - d) / 3.0
    out = g_inv @ A.matrix(x, mu) @ g + g_inv @ d
    return AlgebraElement(A.spec, project_to_algebra(A.spec, out))


def curvature(A: PotentialField, x, mu: int, nu: int, cfg: FdConfig = FdConfig()) -> AlgebraElement:
    """Field strength F_munu = d_mu A_nu - d_nu A_mu + [A_mu, A_nu].

    Central differences with step ``cfg.curvature_h``; the formula is
    literally antisymmetric, so swapping (mu, nu) negates the value
    exactly.
    """
    x = np.asarray(x, dtype=float)
    ch = cfg.curvature_h
    e_mu = np.zeros_like(x)
    e_mu[mu] = 1.0
    e_nu = np.zeros_like(x)
    e_nu[nu] = 1.0
    d_mu_a_nu = (A.matrix(x + ch * e_mu, nu) - A.matrix(x - ch * e_mu, nu)) / (2.0 * ch)
    d_nu_a_mu = (A.matrix(x + ch * e_nu, mu) - A.matrix(x - ch * e_nu, mu)) / (2.0 * ch)
    a_mu = A.matrix(x, mu)
    a_nu = A.matrix(x, nu)
    f = d_mu_a_nu - d_nu_a_mu + a_mu @ a_nu - a_nu @ a_mu
    return AlgebraElement(A.spec, project_to_algebra(A.spec, f))


@dataclass(frozen=True)
class GridSpec:
    """Uniform lattice over a shared per-axis box."""

    lo: float
    hi: float
    resolution: int

    def __post_init__(self):
        if self.resolution < 2:
            raise ValueError("resolution must be at least 2")
        if not self.lo < self.hi:
            raise ValueError("empty box")

    def axis(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.resolution)

    def nodes(self, dim: int) -> list[np.ndarray]:
        axes = [self.axis()] * dim
        mesh = np.meshgrid(*axes, indexing="ij")
        return [np.array(pt) for pt in zip(*(m.ravel() for m in mesh))]

    def describe(self, dim: int) -> dict:
        return {"box": [self.lo, self.hi], "resolution": self.resolution, "dim": dim}


@dataclass(frozen=True)
class RoundTripReport:
    """Worst-case defects of a connection -> holonomy -> connection trip."""

    grid: dict
    max_curvature_defect: float
    max_gauge_defect: float
    max_transport_defect: float
    tolerances: dict
    failures: tuple = ()

    def to_json_dict(self) -> dict:
        return {
            "grid": self.grid,
            "max_curvature_defect": self.max_curvature_defect,
            "max_gauge_defect": self.max_gauge_defect,
            "max_transport_defect": self.max_transport_defect,
            "tolerances": dict(self.tolerances),
            "failures": [list(f) for f in self.failures],
        }

    def within(self) -> bool:
        checks = {
            "curvature": self.max_curvature_defect,
            "gauge": self.max_gauge_defect,
            "transport": self.max_transport_defect,
        }
        return not self.failures and all(
            checks[k] <= tol for k, tol in self.tolerances.items() if k in checks
        )


def _relating_gauge_field(A_in: ConnectionField, psi: PathFamily, steps: int):
    """The group-valued field carrying the input potential into its
    radial-frame reconstruction: transport of the identity along the
    frame path (closed-form quadrature in the abelian case)."""
    spec = A_in.spec
    memo: dict = {}

    def gfield(x) -> GroupElement:
        x = np.asarray(x, dtype=float)
        key = x.tobytes()
        hit = memo.get(key)
        if hit is None:
            path = psi[x]
            if spec.is_abelian:
                z = -_abelian_line_integral(A_in, path)
                hit = exp_map(AlgebraElement(spec, project_to_algebra(spec, np.array([[z]]))))
            else:
                u = _integrate_transport(A_in, path, steps)
                hit = GroupElement(spec, project_to_group(spec, u))
            memo[key] = hit
        return hit

    return gfield


def round_trip_report(
    A_in: ConnectionField,
    psi: PathFamily,
    grid: GridSpec,
    cfg: FdConfig = FdConfig(),
    *,
    steps_per_segment: int = 64,
    tolerances: dict | None = None,
    transport_paths: int = 10,
    transport_steps: int = 16,
    seed: int = 0,
) -> RoundTripReport:
    """Drive a connection through its holonomy map and back, and report
    curvature, gauge and transport defects over a grid.

    Curvature is compared entrywise for abelian groups and through
    conjugation-invariant norms otherwise.  The gauge defect compares the
    reconstruction against the explicitly transformed input; the transport
    defect compares holonomy-only transport with solving the transport
    equation in the reconstructed potential along sample paths.
    """
    tolerances = dict(tolerances or {})
    spec = A_in.spec
    dim = A_in.dim
    h_map = HolonomyMap.transport(A_in, psi.basepoint, steps_per_segment)
    A_rec = PotentialField.from_holonomy(h_map, psi, cfg)
    A_in_pf = PotentialField.from_connection(A_in)
    gfield = _relating_gauge_field(A_in, psi, steps_per_segment)
    nodes = grid.nodes(dim)
    failures: list[tuple] = []

    def node_defects(x):
        try:
            curv = 0.0
            for mu in range(dim):
                for nu in range(mu + 1, dim):
                    f_rec = curvature(A_rec, x, mu, nu, cfg).matrix
                    f_in = curvature(A_in_pf, x, mu, nu, cfg).matrix
                    if spec.is_abelian:
                        curv = max(curv, float(np.linalg.norm(f_rec - f_in)))
                    else:
                        curv = max(curv, abs(float(np.linalg.norm(f_rec)) - float(np.linalg.norm(f_in))))
            gauge = 0.0
            for mu in range(dim):
                expected = gauge_transform_potential(A_in_pf, gfield, x, mu, cfg)
                gauge = max(gauge, float(np.linalg.norm(A_rec.matrix(x, mu) - expected.matrix)))
            return curv, gauge, None
        except (ValueError, ArithmeticError) as exc:
            return 0.0, 0.0, (x.tolist(), type(exc).__name__, str(exc))

    results = parallel_map(node_defects, nodes)
    max_curv = max((r[0] for r in results), default=0.0)
    max_gauge = max((r[1] for r in results), default=0.0)
    failures.extend(r[2] for r in results if r[2] is not None)

    # Transport cross-check on sample paths; the reconstruction used to
    # drive the transport equation skips Richardson (its h^2 bias is far
    # below the comparison tolerance and it halves the holonomy count).
    A_drive = PotentialField.from_holonomy(
        h_map, psi, FdConfig(h=cfg.h, richardson=False, curvature_h=cfg.curvature_h)
    ).to_connection_field()
    rng = np.random.default_rng(seed)
    ident = GroupElement.identity(spec)
    span = 0.25 * (grid.hi - grid.lo)
    max_transport = 0.0
    for _ in range(transport_paths):
        start = rng.uniform(grid.lo + span, grid.hi - span, size=dim)
        p = random_polyline(rng, start, n_segments=2, radius=span)
        try:
            by_holonomy = horizontal_transport(h_map, psi, p, ident, 1.0)
            by_ode = transport_along(A_drive, p, ident, transport_steps)
            max_transport = max(max_transport, group_distance(by_holonomy, by_ode))
        except (ValueError, ArithmeticError) as exc:
            failures.append((start.tolist(), type(exc).__name__, str(exc)))
    return RoundTripReport(
        grid.describe(dim), max_curv, max_gauge, max_transport, tolerances, tuple(failures)
    )


def potential_grid_csv(pf: PotentialField, grid: GridSpec) -> str:
    """CSV dump of a potential over a grid.

    Header ``x1,..,xn,mu,re_0_0,im_0_0,..`` with row-major matrix entries;
    floats carry 17 significant digits.
    """
    dim = pf.dim
    d = pf.spec.matrix_dim
    cols = [f"x{k + 1}" for k in range(dim)] + ["mu"]
    for r in range(d):
        for c in range(d):
            cols += [f"re_{r}_{c}", f"im_{r}_{c}"]
    lines = [",".join(cols)]
    for x in grid.nodes(dim):
        for mu in range(dim):
            m = np.asarray(pf.matrix(x, mu), dtype=complex).reshape(-1)
            vals = [f"{v:.17g}" for v in x] + [str(mu)]
            for entry in m:
                vals += [f"{entry.real:.17g}", f"{entry.imag:.17g}"]
            lines.append(",".join(vals))
    return "\n".join(lines) + "\n"
