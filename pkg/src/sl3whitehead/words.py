"""Free-group words, free reduction and evaluation in matrix groups.

Words are never rewritten modulo relations: a relation "holds" for a
representation exactly when its matrix image is trivial.

>>> w = Word.parse("b^-1 a^3 b^-1 a^-1")
>>> str(w)
'b^-1 a^3 b^-1 a^-1'
>>> str(Word.parse("BaaaBA")) == str(w)
True
"""

from __future__ import annotations

import re

from .linalg import DimensionError, Matrix, projectively_equal

__all__ = [
    "Word",
    "MissingImageError",
    "evaluate",
    "translate",
    "commutator",
    "builtin_words",
    "projectively_equal",
]


class MissingImageError(KeyError):
    pass


_TOKEN = re.compile(r"\s*([A-Za-z])(?:\^\s*([+-]?\d+))?")


class Word:
    """A freely reduced word: a tuple of ``(generator, exponent)`` pairs."""

    __slots__ = ("letters",)

    def __init__(self, letters=()):
        self.letters = _reduce(tuple((g, int(e)) for g, e in letters))

    @classmethod
    def parse(cls, text):
        """Parse ``"b^-1 a^3"`` / ``"BaaaBA"`` style strings.

        Lowercase letters are generators, uppercase letters their inverses.
        """
        letters = []
        pos = 0
        text = text.strip()
        if text in ("", "1", "e"):
            return cls()
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m:
                raise ValueError(f"cannot parse word {text!r} at position {pos}")
            ch, exp = m.group(1), m.group(2)
            e = int(exp) if exp is not None else 1
            if ch.isupper():
                ch, e = ch.lower(), -e
            letters.append((ch, e))
            pos = m.end()
            while pos < len(text) and text[pos].isspace():
                pos += 1
        return cls(letters)

    @classmethod
    def gen(cls, name, exponent=1):
        return cls([(name, exponent)])

    def generators(self):
        return {g for g, _ in self.letters}

    def __mul__(self, other):
        if not isinstance(other, Word):
            return NotImplemented
        return Word(self.letters + other.letters)

    def inverse(self):
        return Word((g, -e) for g, e in reversed(self.letters))

    def __invert__(self):
        return self.inverse()

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** (-n)
        out = Word()
        for _ in range(n):
            out = out * self
        return out

    def __len__(self):
        return sum(abs(e) for _, e in self.letters)

    def __eq__(self, other):
        return isinstance(other, Word) and self.letters == other.letters

    def __hash__(self):
        return hash(self.letters)

    def __str__(self):
        if not self.letters:
            return "1"
        return " ".join(g if e == 1 else f"{g}^{e}" for g, e in self.letters)

    def __repr__(self):
        return f"Word.parse({str(self)!r})"

    def compact(self):
        """Single-letter string form, e.g. ``BaaaBA``."""
        out = []
        for g, e in self.letters:
            if len(g) != 1:
                raise ValueError("compact form needs single-letter generators")
            out.append((g if e > 0 else g.upper()) * abs(e))
        return "".join(out)


def _reduce(letters):
    stack = []
    for g, e in letters:
        if e == 0:
            continue
        if stack and stack[-1][0] == g:
            e += stack.pop()[1]
            if e == 0:
                continue
        stack.append((g, e))
    return tuple(stack)


def commutator(u, v):
    """``[u, v] = u v u^-1 v^-1``."""
    return u * v * u.inverse() * v.inverse()


def evaluate(word, images):
    """Image of ``word`` under the homomorphism ``generator -> images[generator]``."""
    if not images:
        raise MissingImageError("no generator images given")
    shapes = {m.shape for m in images.values()}
    if len(shapes) != 1:
        raise DimensionError(f"generator images have different shapes: {sorted(shapes)}")
    some = next(iter(images.values()))
    n = some.rows
    if some.rows != some.cols:
        raise DimensionError("generator images must be square")
    result = Matrix.identity(n, some.tower)
    inverses = {}
    for g, e in word.letters:
        if g not in images:
            raise MissingImageError(g)
        if e > 0:
            m = images[g]
        else:
            if g not in inverses:
                inverses[g] = images[g].inverse()
            m = inverses[g]
        result = result @ (m ** abs(e))
    return result


def translate(word, substitution):
    """Substitute a word for each generator and freely reduce."""
    out = []
    for g, e in word.letters:
        if g not in substitution:
            raise MissingImageError(g)
        image = substitution[g]
        if e < 0:
            image = image.inverse()
        out.extend(image.letters * abs(e))
    return Word(out)


def builtin_words():
    """Named words for the Whitehead link group in both presentations.

    ``a, b`` is the two-generator presentation with the single commutator
    relator; ``x, y`` the four-commutator one.  Peripheral words ``m1, l1``
    belong to the cusp of 0 and ``m2, l2`` to the cusp of infinity.
    """
    w = Word.parse
    a, b = w("a"), w("b")
    x, y = w("x"), w("y")
    s0 = commutator(a, b.inverse()) * w("a^-1 b^2 a^-3") * commutator(b, a)
    s_inf = w("b^-1 a^3 b^-1 a^-1")
    return {
        "relator_xy": commutator(x, y) * commutator(x, y.inverse())
        * commutator(x.inverse(), y.inverse()) * commutator(x.inverse(), y),
        "relator_ab": commutator(w("b a^-3 b^2"), w("a^-1 b")),
        "relator_ab_long": w("a b a^-3 b^2 a^-1 b^-1 a^3 b^-2"),
        "m1": w("a^-2 b"),
        "l1": w("a^-2 b a b^-2 a b"),
        "m2": w("b^-1 a"),
        "l2": w("b^-1 a b^-1 a b a^-3 b a"),
        "s0": s0,
        "s_inf": s_inf,
        "cusp0_gens": (w("a b^-1 a"), s0),
        "cuspinf_gens": (w("a b^-1"), s_inf),
        # (x, y) = (ab^-1, ab^-1a) and (a, b) = (x^-1y, x^-2y)
        "xy_to_ab": {"x": w("a b^-1"), "y": w("a b^-1 a")},
        "ab_to_xy": {"a": w("x^-1 y"), "b": w("x^-2 y")},
        # t2 in terms of x <-> u and y <-> w1
        "t2_xy": w("y^-1 x y^-1 x y x y^-1 x"),
    }
