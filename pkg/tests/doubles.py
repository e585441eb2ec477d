"""Corrupted cone oracles used by the audit soundness (mutation) tests."""

import numpy as np

from matorder import _linalg as la
from matorder.cones import StandardCone
from matorder.errors import MembershipError


class AllHermitianCone(StandardCone):
    """Accepts every Hermitian element: the symmetric part is the whole
    Hermitian span, so pointedness must fail with witness +-e."""

    variant = "all-hermitian"

    def member(self, n, x):
        x = np.asarray(x, dtype=complex)
        lvl = self.level_algebra(n)
        coords = lvl.coords_of(x)
        residual = la.frob(x - lvl.synthesize(coords))
        if residual > lvl.structure_tol * (1.0 + la.frob(x)):
            raise MembershipError("element outside the amplified algebra", residual)
        return la.is_hermitian(x, self.tol_psd * (1.0 + la.opnorm(x)))

    def straighten(self, n, x):
        # No PSD constraint at all: the frame map is zero.
        return np.zeros_like(np.asarray(x, dtype=complex))


class ZeroedCornerCone(StandardCone):
    """PSD elements with the (0, 0) entry forced to zero: conjugation by a
    permutation moves mass into the corner and escapes the cone."""

    variant = "zeroed-corner"

    def member(self, n, x):
        if not super().member(n, x):
            return False
        x = np.asarray(x, dtype=complex)
        return abs(x[0, 0]) <= self.tol_psd * (1.0 + la.opnorm(x))

    def sample(self, n, rng):
        from matorder.algebra import random_element

        g = random_element(self.level_algebra(n), rng)
        g[:, 0] = 0.0
        return la.dagger(g) @ g


class ZeroCone(StandardCone):
    """The trivial cone {0}."""

    variant = "zero"

    def member(self, n, x):
        return la.frob(np.asarray(x, dtype=complex)) <= self.tol_psd

    def sample(self, n, rng):
        d = self.level_dim(n)
        return np.zeros((d, d), dtype=complex)

    def sample_span(self, n, rng):
        return self.sample(n, rng)
