"""Pairs of order-three matrices: trace coordinates, the discriminant and the
explicit parametrisation of the component of such pairs.

Given ``z = (tr AB, tr A^-1 B, tr A^-1 B^-1, tr A B^-1)`` and a square root
``delta`` of the discriminant, :func:`solve_parameters` produces ``a, b, c, d``
and :func:`build_pair` the normal form

    A = [[j, 0, 0], [j^2, 1, 0], [b + a, 2 j a, j^2]]
    B = [[j, 2 j^2 d, c + d], [0, 1, j], [0, 0, j^2]]

with ``j`` a primitive cube root of unity.  The two square roots give the two
characters over the same ``z``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .exactfield import FieldTower, adjoin_sqrt
from .linalg import Matrix, common_tower, is_regular_order_three, kernel_basis, parallel

__all__ = [
    "TraceCoordinates",
    "ParameterQuadruple",
    "SigmaReport",
    "DegenerateParametersError",
    "OMEGA_TOWER",
    "trace_map",
    "discriminant",
    "solve_parameters",
    "build_pair",
    "verify_sigma",
    "commutator_discriminant_check",
    "common_eigenvector",
    "eigenline_transversality",
    "sigma_left_sides",
    "a_formula",
]

# Q(i, sqrt3): the smallest tower used here that contains j = (-1 + i sqrt3)/2
OMEGA_TOWER = FieldTower.from_squares([-1, 3])


class DegenerateParametersError(ZeroDivisionError):
    def __init__(self, name, value):
        self.name, self.value = name, value
        super().__init__(f"denominator {name} vanishes ({value})")


@dataclass(frozen=True)
class TraceCoordinates:
    z1: object
    z2: object
    z3: object
    z4: object

    def as_tuple(self):
        return (self.z1, self.z2, self.z3, self.z4)

    def __iter__(self):
        return iter(self.as_tuple())

    @classmethod
    def of(cls, values, tower=None):
        values = list(values)
        if len(values) != 4:
            raise ValueError("need four trace coordinates")
        tower = tower or common_tower(values)
        return cls(*(tower.coerce(v) for v in values))

    @property
    def tower(self):
        return self.z1.tower


@dataclass(frozen=True)
class ParameterQuadruple:
    a: object
    b: object
    c: object
    d: object
    sign: int
    delta: object

    @property
    def tower(self):
        return self.a.tower

    @property
    def j(self):
        return self.tower.omega


def _working_tower(z):
    tower = common_tower(list(z))
    if _has_omega(tower):
        return tower
    if tower.embeds_in(OMEGA_TOWER):
        return OMEGA_TOWER
    raise ValueError(f"cannot find j in {tower!r}; pass trace coordinates in a tower containing it")


def _has_omega(tower):
    try:
        tower.omega
    except ValueError:
        return False
    return True


def trace_map(a, b):
    """``(tr A, tr B, tr AB, tr A^-1B, tr A^-1, tr B^-1, tr A^-1B^-1, tr AB^-1, tr[A,B])``."""
    for name, m in (("A", a), ("B", b)):
        if m.shape != (3, 3) or not m.det() == 1:
            raise ValueError(f"{name} must be a 3x3 matrix of determinant 1")
    ai, bi = a.inverse(), b.inverse()
    return (
        a.trace(), b.trace(), (a @ b).trace(), (ai @ b).trace(),
        ai.trace(), bi.trace(), (ai @ bi).trace(), (a @ bi).trace(),
        (a @ b @ ai @ bi).trace(),
    )


def discriminant(z):
    z1, z2, z3, z4 = z
    return (z1**2 * z3**2 - 2 * z1 * z2 * z3 * z4 + z2**2 * z4**2
            - 4 * z1**3 - 4 * z2**3 - 4 * z3**3 - 4 * z4**3
            + 18 * z1 * z3 + 18 * z2 * z4 - 27)


def _denominators(z, j):
    z1, z2, z3, z4 = z
    j2 = j * j
    return {
        "j z1 + z2 + j^2 z3 + z4 + 3": j * z1 + z2 + j2 * z3 + z4 + 3,
        "j^2 z1 + z2 + j z3 + z4 + 3": j2 * z1 + z2 + j * z3 + z4 + 3,
        "z1 + z2 + j^2 z3 + j^2 z4 + 3 j": z1 + z2 + j2 * z3 + j2 * z4 + 3 * j,
        "z1 + j z2 + j z3 + z4 + 3 j^2": z1 + j * z2 + j * z3 + z4 + 3 * j2,
    }


def a_formula(z, delta, j):
    """``a`` as a function of ``z``, ``delta`` and the cube root ``j``."""
    z1, z2, z3, z4 = z
    j2 = j * j
    return (z1 * z3 - z2 * z4 + 6 * j * z1 + 6 * j2 * z3 + 9 + delta) / (
        4 * (j * z1 + z2 + j2 * z3 + z4 + 3))


def _choose_delta(tower, disc, delta):
    if delta is not None:
        delta = common_tower([delta, disc]).coerce(delta)
        if not delta * delta == disc:
            raise ValueError(f"given delta does not square to the discriminant {disc}")
        return delta.tower, delta
    if disc.is_zero():
        return tower, tower.zero()
    root = disc.sqrt()
    if root is not None:
        return tower, root
    return adjoin_sqrt(tower, disc)


def solve_parameters(z, sign=1, delta=None, check=True):
    """The quadruple ``(a, b, c, d)`` for trace coordinates ``z``.

    ``sign`` picks ``+delta`` or ``-delta``.  Without an explicit ``delta``
    the square root is looked up in the working tower and adjoined formally
    when it is missing.  Vanishing denominators raise
    :class:`DegenerateParametersError` naming the denominator.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    z = tuple(z)
    tower = _working_tower(z)
    z = tuple(tower.coerce(v) for v in z)
    j = tower.omega
    dens = _denominators(z, j)
    for name, value in dens.items():
        if value.is_zero():
            raise DegenerateParametersError(name, value)
    disc = discriminant(z)
    tower, root = _choose_delta(tower, disc, delta)
    z = tuple(tower.coerce(v) for v in z)
    j = tower.coerce(j)
    j2 = j * j
    delta = root if sign == 1 else -root
    z1, z2, z3, z4 = z
    den_a, den_d, den_b, den_c = (tower.coerce(v) for v in dens.values())
    a = (z1 * z3 - z2 * z4 + 6 * j * z1 + 6 * j2 * z3 + 9 + delta) / (4 * den_a)
    d = (z1 * z3 - z2 * z4 + 6 * j2 * z1 + 6 * j * z3 + 9 - delta) / (4 * den_d)
    b = ((z1 - z2 - j2 * z3 + j2 * z4 + 3 * (j2 - 1)) / den_b * a
         + (j - 1) * den_c / den_b)
    c = ((z1 + j * z2 - j * z3 - z4 + 3 * (j - 1)) / den_c * d
         + (j2 - 1) * den_b / den_c)
    p = ParameterQuadruple(a, b, c, d, sign, delta)
    if check:
        report = verify_sigma(p, z)
        if not report.ok:
            raise AssertionError(f"parameters fail the defining system: {report}")
    return p


def build_pair(p):
    j = p.j
    j2 = j * j
    a, b, c, d = p.a, p.b, p.c, p.d
    zero, one = p.tower.zero(), p.tower.one()
    A = Matrix([[j, zero, zero], [j2, one, zero], [b + a, 2 * j * a, j2]])
    B = Matrix([[j, 2 * j2 * d, c + d], [zero, one, j], [zero, zero, j2]])
    return A, B


def sigma_left_sides(a, b, c, d, j):
    """Left sides of the four equations giving ``z1 .. z4``."""
    j2 = j * j
    return (
        (a + b) * (d + c) + 2 * a * j2 + 2 * j * d,
        (a - b) * (d + c) - 2 * a - 2 * d + 3,
        (a - b) * (d - c) + 2 * j * a + 2 * j2 * d,
        (a + b) * (d - c) - 2 * a - 2 * d + 3,
    )


def _sigma_prime(a, b, c, d, j, z):
    z1, z2, z3, z4 = z
    return (
        4 * a * d - 6 * a - 6 * d - (z1 + z2 + z3 + z4) + 6,
        4 * b * c + 2 * a + 2 * d - z1 + z2 - z3 + z4 - 6,
        2 * a * c + 2 * b * d - 4 * a * j + 4 * d * j - 2 * a + 2 * d - z1 + z3,
        2 * a * c - 2 * b * d - z2 + z4,
    )


def _quadratic_a(a, z, j):
    z1, z2, z3, z4 = z
    j2 = j * j
    const = (9 + 6 * j * z1 - 3 * z2 + 6 * j2 * z3 - 3 * z4
             + j2 * z1**2 + z2**2 + j * z3**2 + z4**2
             - j * z1 * z2 + 2 * z1 * z3 - j * z1 * z4 - j2 * z2 * z3 - z2 * z4 - j2 * z3 * z4)
    return (4 * (j * z1 + z2 + j2 * z3 + z4 + 3) * a**2
            - 2 * (6 * j * z1 + 6 * j2 * z3 + z1 * z3 - z2 * z4 + 9) * a + const)


@dataclass
class SigmaReport:
    sigma: tuple
    sigma_prime: tuple
    quadratic: object
    exchange_ok: bool

    @property
    def ok(self):
        return (all(r.is_zero() for r in self.sigma + self.sigma_prime)
                and self.quadratic.is_zero() and self.exchange_ok)

    def to_json(self):
        return {
            "sigma": [str(r) for r in self.sigma],
            "sigma_prime": [str(r) for r in self.sigma_prime],
            "quadratic": str(self.quadratic),
            "exchange_ok": self.exchange_ok,
            "ok": self.ok,
        }


def exchange_pattern(a, b, c, d, j):
    """Check the ``a <-> d, b <-> c, j <-> j^2`` symmetry of the left sides.

    It fixes the first and third left sides and swaps the second and fourth.
    """
    e1, e2, e3, e4 = sigma_left_sides(a, b, c, d, j)
    f1, f2, f3, f4 = sigma_left_sides(d, c, b, a, j * j)
    return f1 == e1 and f3 == e3 and f2 == e4 and f4 == e2


def verify_sigma(p, z):
    """Exact residuals of both defining systems and of the quadratic in ``a``."""
    tower = p.tower
    z = tuple(tower.coerce(v) for v in z)
    j = p.j
    left = sigma_left_sides(p.a, p.b, p.c, p.d, j)
    sigma = tuple(lhs - zi for lhs, zi in zip(left, z))
    prime = _sigma_prime(p.a, p.b, p.c, p.d, j, z)
    quad = _quadratic_a(p.a, z, j)
    return SigmaReport(sigma, prime, quad, exchange_pattern(p.a, p.b, p.c, p.d, j))


@dataclass
class CommutatorReport:
    t_plus: object
    t_minus: object
    discriminant: object

    @property
    def square_matches(self):
        return (self.t_plus - self.t_minus) ** 2 == self.discriminant

    @property
    def distinct_ok(self):
        if self.discriminant.is_zero():
            return self.t_plus == self.t_minus
        return not self.t_plus == self.t_minus

    @property
    def ok(self):
        return self.square_matches and self.distinct_ok

    def to_json(self):
        return {
            "t_plus": str(self.t_plus),
            "t_minus": str(self.t_minus),
            "discriminant": str(self.discriminant),
            "square_matches": self.square_matches,
            "distinct_ok": self.distinct_ok,
        }


def commutator_discriminant_check(z, delta=None):
    """Compare ``tr[A, B]`` for the two signs of ``delta`` with the discriminant."""
    plus = solve_parameters(z, 1, delta)
    minus = solve_parameters(z, -1, plus.delta)
    traces = []
    for p in (plus, minus):
        A, B = build_pair(p)
        traces.append((A @ B @ A.inverse() @ B.inverse()).trace())
    return CommutatorReport(traces[0], traces[1], discriminant(tuple(plus.tower.coerce(v) for v in z)))


def _eigenlines(m, j):
    lines = {}
    one = Matrix.identity(3, m.tower)
    for name, lam in (("1", m.tower.one()), ("j", j), ("j^2", j * j)):
        basis = kernel_basis(m - one * lam)
        if len(basis) != 1:
            raise ValueError(f"eigenvalue {name} has a {len(basis)}-dimensional eigenspace")
        lines[name] = basis[0]
    return lines


def common_eigenvector(a, b):
    """A common eigenvector of two regular order-three matrices, or None."""
    if a.tower != b.tower:
        tower = common_tower([a[0, 0], b[0, 0]])
        a, b = a.embed(tower), b.embed(tower)
    j = a.tower.omega
    for m in (a, b):
        if not is_regular_order_three(m):
            raise ValueError("matrices must be regular of order three")
    la, lb = _eigenlines(a, j), _eigenlines(b, j)
    for u in la.values():
        for v in lb.values():
            if parallel(u, v):
                return u
    return None


def eigenline_transversality(a, b):
    """True when the ``j^2`` eigenline of A differs from the ``j`` eigenline of B."""
    j = a.tower.omega
    return not parallel(_eigenlines(a, j)["j^2"], _eigenlines(b, j)["j"])


# -- floating point counterpart, for fast sweeps --------------------------------

def _numeric_pair(zc, sign, j, tol):
    import mpmath

    scale = max([1] + [abs(v) for v in zc])
    dens = _denominators(zc, j)
    for name, value in dens.items():
        if abs(value) <= tol * scale:
            raise DegenerateParametersError(name, mpmath.nstr(value, 6))
    disc = discriminant(zc)
    delta = sign * mpmath.sqrt(disc)
    z1, z2, z3, z4 = zc
    j2 = j * j
    den_a, den_d, den_b, den_c = dens.values()
    a = (z1 * z3 - z2 * z4 + 6 * j * z1 + 6 * j2 * z3 + 9 + delta) / (4 * den_a)
    d = (z1 * z3 - z2 * z4 + 6 * j2 * z1 + 6 * j * z3 + 9 - delta) / (4 * den_d)
    b = (z1 - z2 - j2 * z3 + j2 * z4 + 3 * (j2 - 1)) / den_b * a + (j - 1) * den_c / den_b
    c = (z1 + j * z2 - j * z3 - z4 + 3 * (j - 1)) / den_c * d + (j2 - 1) * den_b / den_c
    A = mpmath.matrix([[j, 0, 0], [j2, 1, 0], [b + a, 2 * j * a, j2]])
    B = mpmath.matrix([[j, 2 * j2 * d, c + d], [0, 1, j], [0, 0, j2]])
    Ai, Bi = A ** -1, B ** -1

    def tr(m):
        return m[0, 0] + m[1, 1] + m[2, 2]

    traces = [tr(A), tr(B), tr(A * B), tr(Ai * B), tr(Ai), tr(Bi), tr(Ai * Bi), tr(A * Bi),
              tr(A * B * Ai * Bi)]
    return {"delta": delta, "a": a, "b": b, "c": c, "d": d, "A": A, "B": B,
            "traces": traces, "discriminant": disc}


def numeric_sample(z, sign=1, dps=30, tol=1e-9):
    """Evaluate the parametrisation in complex floating point.

    Mirrors :func:`solve_parameters`, :func:`build_pair` and the checks with
    relative tolerance ``tol`` at ``dps`` digits.  Returns a dict of mpmath
    numbers and booleans; raises :class:`DegenerateParametersError` when a
    denominator is below the tolerance.
    """
    import mpmath

    def close(x, y):
        return abs(x - y) <= tol * max(1, abs(x), abs(y))

    with mpmath.workdps(dps):
        zc = [mpmath.mpc(mpmath.mpf(v.numerator) / v.denominator) if isinstance(v, Fraction)
              else mpmath.mpc(v) for v in z]
        j = mpmath.exp(2j * mpmath.pi / 3)
        out = _numeric_pair(zc, sign, j, tol)
        other = _numeric_pair(zc, -sign, j, tol)
        a, b, c, d = out["a"], out["b"], out["c"], out["d"]
        sigma = sigma_left_sides(a, b, c, d, j)
        prime = _sigma_prime(a, b, c, d, j, zc)
        target = [0, 0, zc[0], zc[1], 0, 0, zc[2], zc[3]]
        out["sigma_ok"] = (all(close(x, zi) for x, zi in zip(sigma, zc))
                           and all(close(r, 0) for r in prime)
                           and close(_quadratic_a(a, zc, j), 0)
                           and all(close(t, v) for t, v in zip(out["traces"], target)))
        t, u = out["traces"][8], other["traces"][8]
        disc = out["discriminant"]
        distinct = close(t, u) if close(disc, 0) else not close(t, u)
        out["commutator_ok"] = close((t - u) ** 2, disc) and distinct
        return out
