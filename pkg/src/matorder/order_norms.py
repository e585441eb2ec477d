"""Cone-induced order-unit seminorms and the induced pre-C*-norm.

The seminorm of a self-adjoint element is inf{r : r e +- a in C}, located
by bisection against the membership oracle.  The pre-C*-norm is the square
root of the seminorm of x^sharp x and is cross-checked against the direct
bisection of inf{r : r^2 e +- x^sharp x in C}.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _linalg as la
from .algebra import as_matrix
from .cones import AxiomCheck, ConeAuditReport, ConeOracle, Witness
from .errors import CertificationFailed, NotSelfAdjoint, NumericalStall, UnboundedAbove

DEFAULT_BISECT_TOL = 1e-10
DEFAULT_NULL_TOL = 1e-6
MAX_BISECT_ITER = 200


@dataclass(frozen=True)
class NormReport:
    """Bisection result: value with its bracket and work counters."""

    value: float
    bracket: tuple
    iterations: int
    oracle_calls: int


def _sharp_fn(cone: ConeOracle, involution, n: int):
    """An involution callable at level n: the cone's reference map, an
    InvolutionMap (extended entrywise to the right level), or a callable."""
    if involution is None:
        return lambda x: cone.sharp(n, x)
    if hasattr(involution, "apply"):
        blocks = cone.level_dim(n) // involution.algebra.ambient_dim
        return lambda x: involution.apply(x, level=blocks)
    return involution


class _Bisection:
    """Monotone-predicate bisection with doubling bracket search."""

    def __init__(self, pred, max_iter: int = MAX_BISECT_ITER):
        self.pred = pred
        self.calls = 0
        self.iterations = 0
        self.max_iter = max_iter

    def __call__(self, r: float) -> bool:
        self.calls += 1
        return self.pred(r)

    def bracket(self, upper0: float, doublings: int = 3) -> tuple:
        if self(0.0):
            return 0.0, 0.0
        hi = max(upper0, 1e-12)
        attempts = 0
        while not self(hi):
            attempts += 1
            if attempts > doublings:
                raise UnboundedAbove(
                    f"predicate still false at r = {hi:.6g} after {doublings} doublings"
                )
            hi *= 2.0
        return 0.0, hi

    def refine(self, lo: float, hi: float, stop) -> tuple:
        while hi - lo > stop(lo, hi):
            if self.iterations >= self.max_iter:
                raise NumericalStall(
                    f"bisection exceeded {self.max_iter} iterations "
                    f"(bracket [{lo:.6g}, {hi:.6g}])"
                )
            self.iterations += 1
            mid = 0.5 * (lo + hi)
            if self(mid):
                hi = mid
            else:
                lo = mid
        return lo, hi


def order_unit_seminorm(cone: ConeOracle, n: int, a, involution=None,
                        bisect_tol: float = DEFAULT_BISECT_TOL,
                        _sqrt_refine: bool = False) -> NormReport:
    """inf{r > 0 : r e_n + a in C_n and r e_n - a in C_n} by bisection.

    Requires a to be sharp-self-adjoint at level n.  The initial bracket is
    [0, 2 ||straighten(a)|| + 1]; three doublings are allowed before the
    element is declared unbounded (not dominated by the order unit).
    """
    a = as_matrix(a)
    sharp = _sharp_fn(cone, involution, n)
    if la.frob(sharp(a) - a) > 1e-8 * (1.0 + la.frob(a)):
        raise NotSelfAdjoint("order-unit seminorm needs a sharp-self-adjoint element")
    e = cone.unit(n)

    bis = _Bisection(lambda r: cone.member(n, r * e + a) and cone.member(n, r * e - a))
    upper0 = 2.0 * la.opnorm(cone.straighten(n, a)) + 1.0
    lo, hi = bis.bracket(upper0)
    lo, hi = bis.refine(lo, hi, lambda l, h: bisect_tol * (1.0 + 0.5 * (l + h)))
    if _sqrt_refine and hi > 0.0:
        # Tighten until sqrt(bracket) has width ~ bisect_tol, so the square
        # root of the midpoint is as accurate as a direct bisection in r.
        target = max(2.0 * np.sqrt(max(lo, 0.0)) * bisect_tol, bisect_tol ** 2)
        lo, hi = bis.refine(lo, hi, lambda l, h: target)
    value = 0.5 * (lo + hi)
    return NormReport(value, (lo, hi), bis.iterations, bis.calls)


def pre_cstar_norm(cone: ConeOracle, involution, n: int, x,
                   bisect_tol: float = DEFAULT_BISECT_TOL) -> NormReport:
    """sqrt of the seminorm of x^sharp x, cross-checked against the direct
    bisection of inf{r : r^2 e +- x^sharp x in C}; the two must agree to
    2 * bisect_tol (relative)."""
    x = as_matrix(x)
    sharp = _sharp_fn(cone, involution, n)
    z = sharp(x) @ x

    via_sqrt = order_unit_seminorm(cone, n, z, involution=involution,
                                   bisect_tol=bisect_tol, _sqrt_refine=True)
    value_sqrt = float(np.sqrt(via_sqrt.value))

    e = cone.unit(n)
    bis = _Bisection(
        lambda r: cone.member(n, r * r * e + z) and cone.member(n, r * r * e - z)
    )
    upper0 = np.sqrt(2.0 * la.opnorm(cone.straighten(n, z)) + 1.0)
    lo, hi = bis.bracket(upper0)
    lo, hi = bis.refine(lo, hi, lambda l, h: bisect_tol * (1.0 + 0.5 * (l + h)))
    value_direct = 0.5 * (lo + hi)

    if abs(value_sqrt - value_direct) > 2.0 * bisect_tol * (1.0 + value_direct):
        raise CertificationFailed(
            f"pre-C*-norm formulas disagree: sqrt path {value_sqrt:.17g}, "
            f"direct path {value_direct:.17g}"
        )
    bracket = (float(np.sqrt(max(via_sqrt.bracket[0], 0.0))),
               float(np.sqrt(max(via_sqrt.bracket[1], 0.0))))
    return NormReport(value_sqrt, bracket,
                      via_sqrt.iterations + bis.iterations,
                      via_sqrt.oracle_calls + bis.calls)


def null_space(cone: ConeOracle, involution, n: int,
               null_tol: float = DEFAULT_NULL_TOL,
               bisect_tol: float = DEFAULT_BISECT_TOL) -> np.ndarray:
    """Basis of {x : |x| <= null_tol} for the pre-C*-norm.

    Thresholds the norm on the orthonormal algebra basis, then verifies the
    span of small-norm directions on random combinations and drops it if a
    combination escapes.  Returns a (k, D, D) stack, possibly empty.
    """
    lvl = cone.level_algebra(n)
    small = []
    for b in lvl.basis:
        rep = pre_cstar_norm(cone, involution, n, b, bisect_tol=bisect_tol)
        if rep.value <= null_tol:
            small.append(b)
    if not small:
        dim = cone.level_dim(n)
        return np.zeros((0, dim, dim), dtype=complex)
    rng = np.random.default_rng(0)
    for _ in range(3):
        coeffs = la.random_complex(rng, len(small))
        coeffs /= np.linalg.norm(coeffs)
        comb = np.tensordot(coeffs, np.stack(small), axes=(0, 0))
        rep = pre_cstar_norm(cone, involution, n, comb, bisect_tol=bisect_tol)
        if rep.value > null_tol:
            # Span is not closed under combination: keep only directions
            # re-verified individually at a tightened threshold.
            small = [b for b in small
                     if pre_cstar_norm(cone, involution, n, b).value <= null_tol / 10]
            break
    if not small:
        dim = cone.level_dim(n)
        return np.zeros((0, dim, dim), dtype=complex)
    return np.stack(small)


def check_order_unit_archimedean(cone: ConeOracle, n: int = 1, samples: int = 20,
                                 seed: int = 0) -> ConeAuditReport:
    """Order-unit and Archimedean verdicts for random sharp-self-adjoint
    elements: r e + a enters the cone at r = seminorm(a) + tol, and
    membership at shifts r down to 1e-8 implies membership at the
    boundary within tol_psd."""
    rng = np.random.default_rng(seed)
    e = cone.unit(n)
    checks = []

    bad = None
    for _ in range(samples):
        a = cone.sample_span(n, rng)
        try:
            rep = order_unit_seminorm(cone, n, a)
        except UnboundedAbove:
            bad = Witness("order-unit", n, (), a, "seminorm bisection unbounded")
            break
        shifted = (rep.value + 1e-8 * (1.0 + rep.value)) * e + a
        if not cone.member(n, shifted):
            bad = Witness("order-unit", n, (), shifted,
                          "r e + a outside C at r = seminorm + tol")
            break
    checks.append(AxiomCheck("order-unit", "fail" if bad else "pass",
                             "r e + a in C at r = seminorm(a) + tol", bad))

    bad = None
    for _ in range(samples):
        a = cone.sample_span(n, rng)
        try:
            rep = order_unit_seminorm(cone, n, a)
        except UnboundedAbove:
            continue
        boundary = rep.value * e + a
        scale = 1.0 + cone.norm(n, boundary)
        shifts_ok = all(cone.member(n, r * scale * e + boundary)
                        for r in (1e-2, 1e-4, 1e-6, 1e-8))
        near = boundary + cone.tol_psd * scale * e
        if shifts_ok and not cone.member(n, near):
            bad = Witness("archimedean", n, (), near,
                          "shift memberships do not survive the r -> 0 limit")
            break
    checks.append(AxiomCheck("archimedean", "fail" if bad else "pass",
                             "membership closed along r -> 0 at the boundary", bad))

    return ConeAuditReport("order-unit-archimedean", (n,), samples, seed, checks)
