"""Imaginary quadratic extensions F_q(T)(sqrt(D)) and their enumeration.

A field is given by a squarefree discriminant ``D`` of odd degree whose
leading coefficient is 1 or the distinguished non-square ``eps`` of F_q.
Odd degree is exactly the condition that the place at infinity ramifies
(odd characteristic), and the two leading coefficients pick one
representative from each class of ``D`` modulo squares of F_q.

Enumeration order is ``(deg D, leading class, coefficients)`` where
leading class 1 precedes ``eps`` and coefficients compare lexicographically
in constant-first order.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np
from sympy import factorint

from .algebra import poly as P
from .algebra.field import FiniteField, field_make
from .algebra.poly import Poly


class DiscriminantError(ValueError):
    pass


@dataclass(frozen=True)
class QuadraticField:
    """The function field of ``y^2 = D(T)`` over ``F_q``."""

    field: FiniteField
    disc: tuple[int, ...]
    genus: int

    @property
    def q(self) -> int:
        return self.field.order

    @property
    def degree(self) -> int:
        return len(self.disc) - 1

    @property
    def discriminant(self) -> Poly:
        return Poly(self.field, self.disc)

    def key(self) -> str:
        """Cache key ``q:<q>;D:<c_0,...,c_n>``."""
        return discriminant_key(self.field, self.disc)

    def twist(self) -> "QuadraticField":
        """The field of ``eps * D`` renormalised to a canonical leading coefficient."""
        F = self.field
        eps = F.nonsquare
        lc = self.disc[-1]
        # eps*D has leading class flipped; rescale by a square to land on {1, eps}
        target = 1 if lc == eps else eps
        c = F.mul(target, F.inv(F.mul(eps, lc)))
        return field_from_discriminant(F, P.scale(F, P.scale(F, self.disc, eps), c))

    def __repr__(self):
        return f"QuadraticField({self.key()}, genus={self.genus})"


def discriminant_key(F: FiniteField, disc: Sequence[int]) -> str:
    return f"q:{F.order};D:" + ",".join(F.format_element(c) for c in disc)


def parse_discriminant(F: FiniteField, text: str) -> tuple[int, ...]:
    """Parse ``c_0,c_1,...`` (digits joined by ``.`` for extension fields)."""
    try:
        return P.normalize([F.parse_element(t.strip()) for t in text.split(",") if t.strip()])
    except ValueError as exc:
        raise DiscriminantError(f"malformed discriminant {text!r}: {exc}") from None


def leading_classes(F: FiniteField) -> tuple[int, int]:
    return 1, F.nonsquare


def field_from_discriminant(F: FiniteField, D) -> QuadraticField:
    """Validate ``D`` and return the imaginary quadratic field it defines."""
    coeffs = D.coeffs if isinstance(D, Poly) else P.normalize(tuple(D))
    if not coeffs:
        raise DiscriminantError("zero discriminant")
    n = len(coeffs) - 1
    if n % 2 == 0:
        raise DiscriminantError(f"not imaginary: even degree {n}")
    if coeffs[-1] not in leading_classes(F):
        raise DiscriminantError("leading coefficient must be 1 or the distinguished non-square")
    if not P.is_squarefree(F, coeffs):
        raise DiscriminantError("discriminant is not squarefree")
    return QuadraticField(F, coeffs, (n - 1) // 2)


def parse_key(key: str, seed: int = 0) -> QuadraticField:
    """Inverse of :meth:`QuadraticField.key` for prime fields and ``l^d`` given by seed."""
    head, disc = key.split(";")
    q = int(head.split(":")[1])
    ((l, d),) = factorint(q).items()
    F = field_make(l, d, seed)
    return field_from_discriminant(F, parse_discriminant(F, disc.split(":")[1]))


def _check_max_deg(max_deg: int) -> None:
    if max_deg < 1 or max_deg % 2 == 0:
        raise DiscriminantError("max_deg must be odd and >= 1")


def enumerate_discriminants(F: FiniteField, max_deg: int) -> Iterator[QuadraticField]:
    """Every imaginary quadratic field with ``deg D <= max_deg``, in canonical order."""
    _check_max_deg(max_deg)
    for n in range(1, max_deg + 1, 2):
        for lc in leading_classes(F):
            for lower in itertools.product(range(F.order), repeat=n):
                coeffs = lower + (lc,)
                if n == 1 or P.is_squarefree(F, coeffs):
                    yield QuadraticField(F, coeffs, (n - 1) // 2)


# -- batch machinery used by sweeps ---------------------------------------


def block_coefficients(F: FiniteField, n: int, indices: np.ndarray) -> np.ndarray:
    """Lower coefficient codes ``(c_0..c_{n-1})`` for lexicographic indices."""
    q = F.order
    out = np.empty((len(indices), n), dtype=np.int64)
    rest = np.asarray(indices, dtype=np.int64)
    for i in range(n - 1, -1, -1):
        rest, out[:, i] = np.divmod(rest, q)
    return out


def block_indices(F: FiniteField, lower: np.ndarray) -> np.ndarray:
    q = F.order
    acc = np.zeros(lower.shape[0], dtype=np.int64)
    for i in range(lower.shape[1]):
        acc = acc * q + lower[:, i]
    return acc


def _affine_image(F: FiniteField, coeffs: tuple[int, ...], a: int, b: int, s2: int) -> tuple[int, ...]:
    # s2 * D(a*t + b) by Horner in t
    lin = P.normalize((b, a))
    acc: tuple[int, ...] = ()
    for c in reversed(coeffs):
        acc = P.add(F, P.mul(F, acc, lin), (c,) if c else ())
    return P.scale(F, acc, s2)


@dataclass(frozen=True)
class AffineAction:
    """Linear maps ``D -> s^2 D(at + b)`` restricted to one (degree, class) block.

    Each map is stored as an integer matrix over F_l acting on the digit
    vector of the lower coefficients, plus the constant contribution of the
    fixed leading coefficient and the leading class of the image.
    """

    n: int
    source_class: int
    matrices: tuple[np.ndarray, ...]
    offsets: tuple[np.ndarray, ...]
    target_classes: tuple[int, ...]


def affine_action(F: FiniteField, n: int, lc: int) -> AffineAction:
    d, l = F.degree, F.char
    mats, offs, targets = [], [], []
    eps = F.nonsquare
    for a in range(1, F.order):
        lead = F.mul(lc, F.pow(a, n))
        target = 1 if F.chi(lead) == 1 else eps
        s2 = F.mul(target, F.inv(lead))
        for b in range(F.order):
            base = _affine_image(F, (0,) * n + (lc,), a, b, s2)
            base = base + (0,) * (n + 1 - len(base))
            offset = np.array([dig for c in base[:n] for dig in F.digits(c)], dtype=np.int64)
            cols = []
            for i in range(n):
                for j in range(d):
                    unit = [0] * (n + 1)
                    unit[i] = l**j
                    img = _affine_image(F, tuple(unit), a, b, s2)
                    img = img + (0,) * (n + 1 - len(img))
                    cols.append([dig for c in img[:n] for dig in F.digits(c)])
            mats.append(np.array(cols, dtype=np.int64).T if cols else np.zeros((0, 0), dtype=np.int64))
            offs.append(offset)
            targets.append(0 if target == 1 else 1)
    return AffineAction(n, 0 if lc == 1 else 1, tuple(mats), tuple(offs), tuple(targets))


def canonical_keys(F: FiniteField, action: AffineAction, lower: np.ndarray) -> np.ndarray:
    """Orbit-minimal global key ``class * q^n + index`` for each row of ``lower``.

    Curves in one orbit are isomorphic, so they share L-polynomial and class
    group; sweeps compute those once per orbit.
    """
    d, l, q, n = F.degree, F.char, F.order, action.n
    N = lower.shape[0]
    if n == 0:
        return np.zeros(N, dtype=np.int64)
    # lower codes -> digit matrix (N, n*d)
    digits = np.empty((N, n * d), dtype=np.float64)
    for i in range(n):
        rest = lower[:, i]
        for j in range(d):
            rest, digits[:, i * d + j] = np.divmod(rest, l)
    weights = (l ** np.arange(d, dtype=np.int64)).astype(np.int64)
    qpow = q ** np.arange(n - 1, -1, -1, dtype=np.int64)
    best = np.full(N, np.iinfo(np.int64).max, dtype=np.int64)
    block = q**n
    for M, off, tgt in zip(action.matrices, action.offsets, action.target_classes):
        img = np.rint(digits @ M.T.astype(np.float64)).astype(np.int64)
        img = (img + off) % l
        codes = img.reshape(N, n, d) @ weights
        key = codes @ qpow + tgt * block
        np.minimum(best, key, out=best)
    return best
