"""Exact arithmetic in towers of quadratic extensions of Q.

A tower is built by adjoining square roots one at a time: level ``k`` adjoins
a formal ``r_k`` with ``r_k**2 == d_k`` where ``d_k`` lives in the tower made
of the first ``k`` levels.  Elements are stored as flat coefficient vectors
over the multiplicative basis ``prod_{k in mask} r_k`` indexed by a bit mask,
so ``Q(i)(sqrt3)(sqrt5)`` has the basis::

    1, i, sqrt3, i*sqrt3, sqrt5, i*sqrt5, sqrt15, i*sqrt15

>>> K = FieldTower.from_squares([-1, 3, 5])
>>> i, s3, s5 = K.gens()
>>> i * i
FieldElement('(-1)·1')
>>> str(s3 * s5)
'(1)·sqrt15'
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import cached_property
from numbers import Rational

import mpmath

__all__ = [
    "FieldTower",
    "FieldElement",
    "QQ",
    "TowerMismatchError",
    "ZeroDivisorError",
    "adjoin_sqrt",
    "complex_embed",
    "rational_sqrt",
    "as_element",
]


class TowerMismatchError(ValueError):
    """Raised when two elements live in towers with no canonical embedding."""


class ZeroDivisorError(ZeroDivisionError):
    """A nonzero element has vanishing norm at some level of its tower.

    This means the value adjoined at ``level`` was secretly a square.
    """

    def __init__(self, level, square):
        self.level = level
        self.square = square
        super().__init__(
            f"zero divisor at level {level}: adjoined value {square} is a square "
            "in the tower below it"
        )


def rational_sqrt(q):
    """Return the exact square root of a nonnegative rational, or None."""
    q = Fraction(q)
    if q < 0:
        return None
    n, d = q.numerator, q.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def _format_fraction(q):
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _parse_fraction(s):
    return Fraction(s)


class FieldTower:
    """An immutable tower ``Q(r_0)(r_1)...`` with ``r_k**2 = d_k``."""

    __slots__ = ("levels", "names", "__dict__")

    def __init__(self, levels=(), names=None):
        levels = tuple(levels)
        for k, d in enumerate(levels):
            if not isinstance(d, FieldElement):
                raise TypeError("tower levels must be FieldElements")
            if len(d.tower.levels) != k or d.tower.levels != levels[:k]:
                raise TowerMismatchError(f"level {k} value must live in the tower below it")
            if d.is_zero():
                raise ValueError(f"cannot adjoin the square root of 0 (level {k})")
        self.levels = levels
        if names is None:
            names = _default_names(levels)
        self.names = tuple(names)

    @classmethod
    def from_squares(cls, squares, names=None):
        """Build a tower adjoining ``sqrt(s)`` for each entry, bottom up.

        Entries may be rationals or FieldElements of the tower built so far.
        Perfect rational squares are rejected.
        """
        tower = QQ
        for k, s in enumerate(squares):
            d = tower.coerce(s)
            if d.is_rational() and rational_sqrt(d.to_rational()) is not None:
                raise ValueError(f"{d.to_rational()} is a rational square; nothing to adjoin")
            tower = FieldTower(tower.levels + (d,))
        if names is not None:
            tower = FieldTower(tower.levels, names)
        return tower

    # -- structure -----------------------------------------------------
    @property
    def depth(self):
        return len(self.levels)

    @property
    def degree(self):
        return 1 << len(self.levels)

    @cached_property
    def base(self):
        """The tower with the top level removed."""
        if not self.levels:
            raise ValueError("Q has no base tower")
        return FieldTower(self.levels[:-1], self.names[:-1])

    @cached_property
    def rational_levels(self):
        return all(d.is_rational() for d in self.levels)

    @cached_property
    def _table(self):
        # (mask1, mask2) -> (mask1 ^ mask2, prod of d_k over shared bits)
        squares = [d.to_rational() for d in self.levels]
        n = self.degree
        table = []
        for m1 in range(n):
            row = []
            for m2 in range(n):
                s = Fraction(1)
                shared = m1 & m2
                k = 0
                while shared:
                    if shared & 1:
                        s *= squares[k]
                    shared >>= 1
                    k += 1
                row.append((m1 ^ m2, s))
            table.append(row)
        return table

    def embeds_in(self, other):
        return self.levels == other.levels[: len(self.levels)]

    def __eq__(self, other):
        return isinstance(other, FieldTower) and self.levels == other.levels

    def __hash__(self):
        return hash(tuple(d.coeffs for d in self.levels))

    def __repr__(self):
        return f"FieldTower({self.squares_repr()})"

    def squares_repr(self):
        parts = []
        for d in self.levels:
            parts.append(_format_fraction(d.to_rational()) if d.is_rational() else f"({d})")
        return "[" + ", ".join(parts) + "]"

    # -- constructors ---------------------------------------------------
    def zero(self):
        return FieldElement(self, (Fraction(0),) * self.degree)

    def one(self):
        return self.coerce(1)

    def gen(self, k):
        """The adjoined root ``r_k`` as an element of this tower."""
        if not 0 <= k < self.depth:
            raise IndexError(k)
        c = [Fraction(0)] * self.degree
        c[1 << k] = Fraction(1)
        return FieldElement(self, tuple(c))

    def gens(self):
        return tuple(self.gen(k) for k in range(self.depth))

    def basis_element(self, mask):
        c = [Fraction(0)] * self.degree
        c[mask] = Fraction(1)
        return FieldElement(self, tuple(c))

    def element(self, coeffs):
        coeffs = tuple(Fraction(c) for c in coeffs)
        if len(coeffs) != self.degree:
            raise ValueError(f"expected {self.degree} coefficients, got {len(coeffs)}")
        return FieldElement(self, coeffs)

    def coerce(self, x):
        """Bring ``x`` (int, Fraction, or an element of a subtower) into this tower."""
        if isinstance(x, FieldElement):
            if x.tower == self:
                return x
            if x.tower.embeds_in(self):
                return FieldElement(self, x.coeffs + (Fraction(0),) * (self.degree - x.tower.degree))
            raise TowerMismatchError(f"{x.tower!r} does not embed in {self!r}")
        if isinstance(x, (int, Rational)):
            c = [Fraction(0)] * self.degree
            c[0] = Fraction(x)
            return FieldElement(self, tuple(c))
        raise TypeError(f"cannot coerce {type(x).__name__} into a field tower")

    __call__ = coerce

    @cached_property
    def omega(self):
        """Primitive cube root of unity (-1 + i*sqrt3)/2, if the tower has i and sqrt3."""
        found = {}
        for k, d in enumerate(self.levels):
            if d.is_rational():
                found.setdefault(d.to_rational(), self.gen(k))
        if -3 in found:
            return (found[-3] - 1) / 2
        if -1 in found and 3 in found:
            return (found[-1] * found[3] - 1) / 2
        raise ValueError(f"{self!r} does not contain a primitive cube root of unity")

    def basis_name(self, mask):
        if mask == 0:
            return "1"
        has_i = False
        radicand = 1
        others = []
        for k in range(self.depth):
            if not mask >> k & 1:
                continue
            name = self.names[k]
            if name == "i":
                if has_i:
                    others.append(name)
                has_i = True
            elif name.startswith("sqrt") and name[4:].isdigit():
                radicand *= int(name[4:])
            else:
                others.append(name)
        parts = []
        if has_i:
            parts.append("i")
        if radicand != 1:
            parts.append(f"sqrt{radicand}")
        parts.extend(others)
        return "*".join(parts)

    def parse(self, text):
        """Inverse of ``str(element)``; plain rationals like ``"-3/2"`` work too."""
        text = text.strip()
        if text == "0":
            return self.zero()
        names = {self.basis_name(m): m for m in range(self.degree)}
        coeffs = [Fraction(0)] * self.degree
        for term in text.split(" + "):
            term = term.strip()
            if "·" in term:
                c, b = term.split("·", 1)
                c = c.strip()
                if c.startswith("(") and c.endswith(")"):
                    c = c[1:-1]
                if b not in names:
                    raise ValueError(f"unknown basis element {b!r} in {self!r}")
                coeffs[names[b]] += Fraction(c)
            else:
                coeffs[0] += Fraction(term)
        return FieldElement(self, tuple(coeffs))

    # -- serialization --------------------------------------------------
    def to_json(self):
        out = []
        for d in self.levels:
            out.append(_format_fraction(d.to_rational()) if d.is_rational() else d.to_json())
        return out

    @classmethod
    def from_json(cls, data):
        tower = QQ
        for entry in data:
            if isinstance(entry, dict):
                d = FieldElement.from_json(entry)
                d = tower.coerce(d)
            else:
                d = tower.coerce(_parse_fraction(entry))
            tower = FieldTower(tower.levels + (d,))
        return tower


def _default_names(levels):
    names = []
    n_formal = sum(
        1
        for d in levels
        if not (d.is_rational() and (d.to_rational() == -1 or _is_posint(d.to_rational())))
    )
    formal_idx = 0
    for d in levels:
        q = d.to_rational() if d.is_rational() else None
        if q == -1:
            names.append("i")
        elif q is not None and _is_posint(q):
            names.append(f"sqrt{q.numerator}")
        else:
            names.append("delta" if n_formal == 1 else f"delta{formal_idx}")
            formal_idx += 1
    return names


def _is_posint(q):
    return q.denominator == 1 and q > 0


class FieldElement:
    """An immutable element of a :class:`FieldTower`."""

    __slots__ = ("tower", "coeffs")

    def __init__(self, tower, coeffs):
        self.tower = tower
        self.coeffs = coeffs

    # -- predicates -----------------------------------------------------
    def is_zero(self):
        return not any(self.coeffs)

    def is_rational(self):
        return not any(self.coeffs[1:])

    def to_rational(self):
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.coeffs[0]

    def support(self):
        """Number of nonzero basis coefficients (a cheap size measure)."""
        return sum(1 for c in self.coeffs if c)

    def height(self):
        return max((max(abs(c.numerator), c.denominator) for c in self.coeffs if c), default=0)

    # -- coercion helpers -----------------------------------------------
    def _pair(self, other):
        if isinstance(other, FieldElement):
            if other.tower == self.tower:
                return self, other
            if other.tower.embeds_in(self.tower):
                return self, self.tower.coerce(other)
            if self.tower.embeds_in(other.tower):
                return other.tower.coerce(self), other
            raise TowerMismatchError(f"no common tower for {self.tower!r} and {other.tower!r}")
        if isinstance(other, (int, Rational)):
            return self, self.tower.coerce(other)
        return None, None

    # -- arithmetic -----------------------------------------------------
    def __add__(self, other):
        a, b = self._pair(other)
        if a is None:
            return NotImplemented
        return FieldElement(a.tower, tuple(x + y for x, y in zip(a.coeffs, b.coeffs)))

    __radd__ = __add__

    def __sub__(self, other):
        a, b = self._pair(other)
        if a is None:
            return NotImplemented
        return FieldElement(a.tower, tuple(x - y for x, y in zip(a.coeffs, b.coeffs)))

    def __rsub__(self, other):
        a, b = self._pair(other)
        if a is None:
            return NotImplemented
        return FieldElement(a.tower, tuple(y - x for x, y in zip(a.coeffs, b.coeffs)))

    def __neg__(self):
        return FieldElement(self.tower, tuple(-x for x in self.coeffs))

    def __pos__(self):
        return self

    def __mul__(self, other):
        if isinstance(other, (int, Rational)):
            q = Fraction(other)
            return FieldElement(self.tower, tuple(x * q for x in self.coeffs))
        a, b = self._pair(other)
        if a is None:
            return NotImplemented
        tower = a.tower
        if tower.rational_levels:
            return FieldElement(tower, _mul_table(tower, a.coeffs, b.coeffs))
        return FieldElement(tower, _mul_rec(tower, a.coeffs, b.coeffs))

    __rmul__ = __mul__

    def mul_recursive(self, other):
        """Multiply by splitting off one level at a time (no basis table)."""
        a, b = self._pair(other)
        return FieldElement(a.tower, _mul_rec(a.tower, a.coeffs, b.coeffs))

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        return FieldElement(self.tower, _inv_rec(self.tower, self.coeffs))

    def __truediv__(self, other):
        if isinstance(other, (int, Rational)):
            q = Fraction(other)
            if q == 0:
                raise ZeroDivisionError("division by zero")
            return FieldElement(self.tower, tuple(x / q for x in self.coeffs))
        a, b = self._pair(other)
        if a is None:
            return NotImplemented
        return a * b.inverse()

    def __rtruediv__(self, other):
        a, b = self._pair(other)
        if a is None:
            return NotImplemented
        return b * a.inverse()

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result = self.tower.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- comparison -----------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, FieldElement):
            try:
                a, b = self._pair(other)
            except TowerMismatchError:
                return False
            return a.coeffs == b.coeffs
        if isinstance(other, (int, Rational)):
            return self.is_rational() and self.coeffs[0] == other
        return NotImplemented

    def __hash__(self):
        # elements equal across embedded towers must hash alike
        coeffs = self.coeffs
        n = len(coeffs)
        while n > 1 and not any(coeffs[n // 2 : n]):
            n //= 2
        if n == 1:
            return hash(coeffs[0])
        return hash(coeffs[:n])

    def __bool__(self):
        return not self.is_zero()

    # -- misc -----------------------------------------------------------
    def normalized(self):
        """Canonical form. Fractions are always reduced, so this is a copy."""
        return FieldElement(self.tower, tuple(Fraction(c) for c in self.coeffs))

    def sqrt(self):
        """Exact square root inside the tower when cheaply detectable, else None.

        Only rational elements are handled: the root is searched as
        ``q * b`` with ``b`` a basis element whose square is rational.
        """
        if not self.is_rational():
            return None
        value = self.to_rational()
        if value == 0:
            return self.tower.zero()
        if not self.tower.rational_levels:
            root = rational_sqrt(value)
            return None if root is None else self.tower.coerce(root)
        for mask in range(self.tower.degree):
            _, square = self.tower._table[mask][mask]
            q = rational_sqrt(value / square)
            if q is not None:
                return self.tower.basis_element(mask) * q
        return None

    def __str__(self):
        terms = []
        for mask, c in enumerate(self.coeffs):
            if c:
                terms.append(f"({_format_fraction(c)})·{self.tower.basis_name(mask)}")
        return " + ".join(terms) if terms else "0"

    def __repr__(self):
        return f"FieldElement('{self}')"

    def __complex__(self):
        return complex(complex_embed(self, 20))

    def to_json(self):
        return {"tower": self.tower.to_json(), "coeffs": [_format_fraction(c) for c in self.coeffs]}

    @classmethod
    def from_json(cls, data):
        tower = FieldTower.from_json(data["tower"])
        return tower.element([_parse_fraction(c) for c in data["coeffs"]])


QQ = FieldTower(())


def _mul_table(tower, a, b):
    n = tower.degree
    table = tower._table
    out = [0] * n
    for m1 in range(n):
        x = a[m1]
        if not x:
            continue
        row = table[m1]
        for m2 in range(n):
            y = b[m2]
            if not y:
                continue
            m, s = row[m2]
            out[m] += s * x * y
    return tuple(Fraction(c) for c in out)


def _mul_rec(tower, a, b):
    if tower.depth == 0:
        return (a[0] * b[0],)
    half = len(a) // 2
    base = tower.base
    a0, a1 = a[:half], a[half:]
    b0, b1 = b[:half], b[half:]
    d = tower.levels[-1].coeffs
    lo = _add(_mul_rec(base, a0, b0), _mul_rec(base, _mul_rec(base, a1, b1), d))
    hi = _add(_mul_rec(base, a0, b1), _mul_rec(base, a1, b0))
    return lo + hi


def _add(x, y):
    return tuple(p + q for p, q in zip(x, y))


def _inv_rec(tower, a):
    if tower.depth == 0:
        return (1 / a[0],)
    half = len(a) // 2
    base = tower.base
    a0, a1 = a[:half], a[half:]
    d = tower.levels[-1]
    mul = (lambda x, y: _mul_table(base, x, y)) if base.rational_levels else (
        lambda x, y: _mul_rec(base, x, y))
    norm = tuple(
        p - q for p, q in zip(mul(a0, a0), mul(mul(a1, a1), d.coeffs))
    )
    if not any(norm):
        raise ZeroDivisorError(tower.depth - 1, d)
    ninv = _inv_rec(base, norm)
    return mul(a0, ninv) + tuple(-c for c in mul(a1, ninv))


def as_element(x, tower=None):
    """Coerce ``x`` into ``tower`` (or Q when no tower is given)."""
    if tower is None:
        return x if isinstance(x, FieldElement) else QQ.coerce(x)
    return tower.coerce(x)


def adjoin_sqrt(tower, d, name=None):
    """Adjoin a square root of ``d`` to ``tower``.

    Returns ``(new_tower, root)``.  If ``d`` is a perfect rational square the
    adjunction is refused and ``(tower, exact_root)`` is returned instead.
    """
    d = tower.coerce(d)
    if d.is_zero():
        raise ValueError("cannot adjoin the square root of 0")
    if d.is_rational():
        root = rational_sqrt(d.to_rational())
        if root is not None:
            return tower, tower.coerce(root)
    new = FieldTower(tower.levels + (d,))
    if name is not None:
        new = FieldTower(new.levels, tower.names + (name,))
    return new, new.gen(new.depth - 1)


def complex_embed(x, precision=30, roots=None):
    """Approximate complex value of ``x`` under a fixed embedding.

    Each adjoined root maps to the principal square root of the embedded
    square (so i -> +i, sqrt3 -> +1.732...).  ``roots`` optionally gives a
    sign (+1/-1) per level to pick the other root.
    """
    if not isinstance(x, FieldElement):
        x = QQ.coerce(x)
    with mpmath.workdps(precision + 10):
        images = _root_images(x.tower, roots)
        total = mpmath.mpc(0)
        for mask, c in enumerate(x.coeffs):
            if not c:
                continue
            term = mpmath.mpf(c.numerator) / c.denominator
            k = 0
            m = mask
            while m:
                if m & 1:
                    term *= images[k]
                m >>= 1
                k += 1
            total += term
        return mpmath.mpc(total)


def _root_images(tower, roots):
    images = []
    for k, d in enumerate(tower.levels):
        sub_roots = roots[:k] if roots is not None else None
        r = mpmath.sqrt(complex_embed(d, mpmath.mp.dps, sub_roots))
        if roots is not None and roots[k] < 0:
            r = -r
        images.append(r)
    return images
