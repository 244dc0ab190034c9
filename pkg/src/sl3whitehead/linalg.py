"""Exact dense linear algebra over field towers.

Small matrices (2x2, 3x3) use closed formulas; anything bigger goes through
elimination.  Two independent elimination routes exist on purpose:
:func:`rank` is fraction-free (Bareiss) with full pivoting, while
:func:`kernel_basis` runs Gauss-Jordan to reduced row echelon form.  The tests
check ``rank + dim ker == cols`` to tie them together.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational

from .exactfield import QQ, FieldElement, TowerMismatchError

__all__ = [
    "Matrix",
    "DimensionError",
    "SingularMatrixError",
    "common_tower",
    "char_poly_3",
    "is_regular_order_three",
    "is_regular_unipotent",
    "rank",
    "rref",
    "kernel_basis",
    "projectively_equal",
    "parallel",
]


class DimensionError(ValueError):
    pass


class SingularMatrixError(ZeroDivisionError):
    pass


def common_tower(values):
    """Smallest tower among ``values`` that all the others embed into."""
    towers = {v.tower for v in values if isinstance(v, FieldElement)}
    best = QQ
    for t in towers:
        if best.embeds_in(t):
            best = t
        elif not t.embeds_in(best):
            raise TowerMismatchError(f"{best!r} and {t!r} have no common tower")
    return best


class Matrix:
    """Immutable dense matrix of FieldElements sharing one tower."""

    __slots__ = ("rows", "cols", "entries", "tower")

    def __init__(self, entries, tower=None):
        entries = [list(row) for row in entries]
        if not entries or not entries[0]:
            raise DimensionError("matrices must be nonempty")
        cols = len(entries[0])
        if any(len(row) != cols for row in entries):
            raise DimensionError("ragged rows")
        if tower is None:
            tower = common_tower(x for row in entries for x in row)
        self.tower = tower
        self.rows = len(entries)
        self.cols = cols
        self.entries = tuple(tuple(tower.coerce(x) for x in row) for row in entries)

    @classmethod
    def identity(cls, n, tower=QQ):
        one, zero = tower.one(), tower.zero()
        return cls([[one if i == j else zero for j in range(n)] for i in range(n)], tower)

    @classmethod
    def zeros(cls, rows, cols, tower=QQ):
        zero = tower.zero()
        return cls([[zero] * cols for _ in range(rows)], tower)

    @classmethod
    def diagonal(cls, values, tower=None):
        values = list(values)
        tower = tower or common_tower(values)
        n = len(values)
        return cls([[values[i] if i == j else 0 for j in range(n)] for i in range(n)], tower)

    # -- access ---------------------------------------------------------
    @property
    def shape(self):
        return self.rows, self.cols

    def is_square(self):
        return self.rows == self.cols

    def __getitem__(self, idx):
        i, j = idx
        return self.entries[i][j]

    def row(self, i):
        return self.entries[i]

    def col(self, j):
        return tuple(row[j] for row in self.entries)

    def transpose(self):
        return Matrix(zip(*self.entries), self.tower)

    def embed(self, tower):
        return Matrix(self.entries, tower)

    def map(self, fn):
        return Matrix([[fn(x) for x in row] for row in self.entries])

    # -- arithmetic -----------------------------------------------------
    def _coerce_pair(self, other):
        if self.tower == other.tower:
            return self, other
        if other.tower.embeds_in(self.tower):
            return self, other.embed(self.tower)
        if self.tower.embeds_in(other.tower):
            return self.embed(other.tower), other
        raise TowerMismatchError(f"{self.tower!r} vs {other.tower!r}")

    def __add__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        if self.shape != other.shape:
            raise DimensionError(f"cannot add {self.shape} and {other.shape}")
        a, b = self._coerce_pair(other)
        return Matrix([[x + y for x, y in zip(r, s)] for r, s in zip(a.entries, b.entries)], a.tower)

    def __sub__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        if self.shape != other.shape:
            raise DimensionError(f"cannot subtract {self.shape} and {other.shape}")
        a, b = self._coerce_pair(other)
        return Matrix([[x - y for x, y in zip(r, s)] for r, s in zip(a.entries, b.entries)], a.tower)

    def __neg__(self):
        return Matrix([[-x for x in row] for row in self.entries], self.tower)

    def __matmul__(self, other):
        if isinstance(other, Matrix):
            if self.cols != other.rows:
                raise DimensionError(f"cannot multiply {self.shape} by {other.shape}")
            a, b = self._coerce_pair(other)
            bcols = b.transpose().entries
            zero = a.tower.zero()
            out = []
            for row in a.entries:
                out.append([_dot(row, col, zero) for col in bcols])
            return Matrix(out, a.tower)
        if isinstance(other, (tuple, list)):
            return self.apply(other)
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, Matrix):
            return self @ other
        if isinstance(other, (int, Rational, FieldElement)):
            return Matrix([[x * other for x in row] for row in self.entries])
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, Rational, FieldElement)):
            return Matrix([[other * x for x in row] for row in self.entries])
        return NotImplemented

    def apply(self, vector):
        """Matrix times column vector (a sequence of field elements)."""
        if len(vector) != self.cols:
            raise DimensionError(f"vector of length {len(vector)} for {self.shape} matrix")
        zero = self.tower.zero()
        return tuple(_dot(row, vector, zero) for row in self.entries)

    def left_apply(self, covector):
        """Row vector times matrix."""
        if len(covector) != self.rows:
            raise DimensionError(f"covector of length {len(covector)} for {self.shape} matrix")
        zero = self.tower.zero()
        return tuple(_dot(covector, self.col(j), zero) for j in range(self.cols))

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        self._require_square("power")
        if n < 0:
            return self.inverse() ** (-n)
        result = Matrix.identity(self.rows, self.tower)
        base = self
        while n:
            if n & 1:
                result = result @ base
            base = base @ base
            n >>= 1
        return result

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and all(
            x == y for r, s in zip(self.entries, other.entries) for x, y in zip(r, s)
        )

    def __hash__(self):
        return hash(self.entries)

    def is_zero(self):
        return all(x.is_zero() for row in self.entries for x in row)

    def is_identity(self):
        return self == Matrix.identity(self.rows, self.tower) if self.is_square() else False

    # -- square-only ----------------------------------------------------
    def _require_square(self, what):
        if not self.is_square():
            raise DimensionError(f"{what} needs a square matrix, got {self.shape}")

    def trace(self):
        self._require_square("trace")
        total = self.tower.zero()
        for i in range(self.rows):
            total = total + self.entries[i][i]
        return total

    def det(self):
        self._require_square("det")
        e = self.entries
        n = self.rows
        if n == 1:
            return e[0][0]
        if n == 2:
            return e[0][0] * e[1][1] - e[0][1] * e[1][0]
        if n == 3:
            return (
                e[0][0] * (e[1][1] * e[2][2] - e[1][2] * e[2][1])
                - e[0][1] * (e[1][0] * e[2][2] - e[1][2] * e[2][0])
                + e[0][2] * (e[1][0] * e[2][1] - e[1][1] * e[2][0])
            )
        return _bareiss_det(self)

    def adjugate(self):
        self._require_square("adjugate")
        e = self.entries
        n = self.rows
        if n == 1:
            return Matrix([[1]], self.tower)
        if n == 2:
            return Matrix([[e[1][1], -e[0][1]], [-e[1][0], e[0][0]]], self.tower)
        if n == 3:
            def minor(i, j):
                r = [k for k in range(3) if k != i]
                c = [k for k in range(3) if k != j]
                return e[r[0]][c[0]] * e[r[1]][c[1]] - e[r[0]][c[1]] * e[r[1]][c[0]]

            return Matrix(
                [[minor(j, i) if (i + j) % 2 == 0 else -minor(j, i) for j in range(3)] for i in range(3)],
                self.tower,
            )
        raise DimensionError("adjugate is only implemented up to 3x3")

    def inverse(self):
        self._require_square("inverse")
        if self.rows <= 3:
            d = self.det()
            if d.is_zero():
                raise SingularMatrixError("matrix is singular")
            dinv = d.inverse()
            return Matrix([[x * dinv for x in row] for row in self.adjugate().entries], self.tower)
        return _gauss_jordan_inverse(self)

    # -- io -------------------------------------------------------------
    def __repr__(self):
        body = ",\n ".join("[" + ", ".join(str(x) for x in row) + "]" for row in self.entries)
        return f"Matrix([{body}])"

    def to_json(self):
        return {
            "rows": self.rows,
            "cols": self.cols,
            "entries": [[x.to_json() for x in row] for row in self.entries],
        }

    @classmethod
    def from_json(cls, data):
        entries = [[FieldElement.from_json(x) for x in row] for row in data["entries"]]
        m = cls(entries)
        if m.shape != (data["rows"], data["cols"]):
            raise DimensionError("declared shape does not match entries")
        return m


def _dot(xs, ys, zero):
    total = zero
    for x, y in zip(xs, ys):
        if x.is_zero() or y.is_zero():
            continue
        total = total + x * y
    return total


def _pivot_key(x):
    return (x.support(), x.height())


def _bareiss_det(m):
    a = [list(row) for row in m.entries]
    n = m.rows
    sign = 1
    prev = m.tower.one()
    for k in range(n - 1):
        if a[k][k].is_zero():
            swap = next((i for i in range(k + 1, n) if not a[i][k].is_zero()), None)
            if swap is None:
                return m.tower.zero()
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        p = a[k][k]
        prev_inv = prev.inverse()
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * p - a[i][k] * a[k][j]) * prev_inv
        prev = p
    return a[n - 1][n - 1] if sign == 1 else -a[n - 1][n - 1]


def _gauss_jordan_inverse(m):
    n = m.rows
    one, zero = m.tower.one(), m.tower.zero()
    aug = [list(row) + [one if i == j else zero for j in range(n)] for i, row in enumerate(m.entries)]
    for c in range(n):
        piv = min(
            (r for r in range(c, n) if not aug[r][c].is_zero()),
            key=lambda r: _pivot_key(aug[r][c]),
            default=None,
        )
        if piv is None:
            raise SingularMatrixError("matrix is singular")
        aug[c], aug[piv] = aug[piv], aug[c]
        inv = aug[c][c].inverse()
        aug[c] = [x * inv for x in aug[c]]
        for r in range(n):
            if r != c and not aug[r][c].is_zero():
                f = aug[r][c]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[c])]
    return Matrix([row[n:] for row in aug], m.tower)


def rank(m):
    """Rank by fraction-free elimination with full pivoting.

    The pivot is the nonzero entry with the fewest basis coefficients (then
    the smallest coefficient height), which keeps entries small when the
    matrix mixes integers and genuine number-field values.
    """
    a = [list(row) for row in m.entries]
    nrows, ncols = m.rows, m.cols
    prev_inv = None
    r = 0
    while r < min(nrows, ncols):
        best = None
        for i in range(r, nrows):
            row = a[i]
            for j in range(r, ncols):
                x = row[j]
                if not x.is_zero():
                    key = _pivot_key(x)
                    if best is None or key < best[0]:
                        best = (key, i, j)
        if best is None:
            break
        _, pi, pj = best
        a[r], a[pi] = a[pi], a[r]
        if pj != r:
            for row in a:
                row[r], row[pj] = row[pj], row[r]
        p = a[r][r]
        scale = p if prev_inv is None else p * prev_inv
        scale_is_one = scale == 1
        prow = a[r]
        for i in range(r + 1, nrows):
            row = a[i]
            f = row[r]
            if f.is_zero():
                if not scale_is_one:
                    for j in range(r + 1, ncols):
                        if not row[j].is_zero():
                            row[j] = row[j] * scale
                continue
            g = f if prev_inv is None else f * prev_inv
            for j in range(r + 1, ncols):
                x, y = row[j], prow[j]
                if y.is_zero():
                    if not x.is_zero() and not scale_is_one:
                        row[j] = x * scale
                elif x.is_zero():
                    row[j] = -(g * y)
                else:
                    row[j] = x * scale - g * y
            row[r] = row[r].tower.zero()
        prev_inv = p.inverse()
        r += 1
    return r


def rref(m):
    """Reduced row echelon form; returns (rows, pivot_columns)."""
    a = [list(row) for row in m.entries]
    nrows, ncols = m.rows, m.cols
    pivots = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        piv = min(
            (i for i in range(r, nrows) if not a[i][c].is_zero()),
            key=lambda i: _pivot_key(a[i][c]),
            default=None,
        )
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = a[r][c].inverse()
        prow = [x if x.is_zero() else x * inv for x in a[r]]
        a[r] = prow
        nz = [j for j in range(c, ncols) if not prow[j].is_zero()]
        for i in range(nrows):
            if i == r:
                continue
            f = a[i][c]
            if f.is_zero():
                continue
            row = a[i]
            for j in nz:
                row[j] = row[j] - f * prow[j]
        pivots.append(c)
        r += 1
    return a[:r], pivots


def kernel_basis(m):
    """Exact basis of the right nullspace, as tuples of field elements.

    The basis is canonical: it is the reduced row echelon form of the kernel,
    so every vector starts with a 1 and results do not depend on pivoting.
    """
    rows, pivots = rref(m)
    one, zero = m.tower.one(), m.tower.zero()
    free = [c for c in range(m.cols) if c not in set(pivots)]
    raw = []
    for f in free:
        v = [zero] * m.cols
        v[f] = one
        for row, pc in zip(rows, pivots):
            v[pc] = -row[f]
        raw.append(v)
    if not raw:
        return []
    canon, _ = rref(Matrix(raw, m.tower))
    return [tuple(v) for v in canon]


def char_poly_3(m):
    """Return ``(tr M, tr M^-1)`` for a 3x3 matrix of determinant 1.

    The characteristic polynomial is then X^3 - (tr M) X^2 + (tr M^-1) X - 1.
    """
    _require_det_one(m)
    # for det 1, tr M^-1 = tr adj(M) = sum of principal 2x2 minors
    return m.trace(), m.adjugate().trace()


def _require_det_one(m):
    if m.shape != (3, 3):
        raise DimensionError(f"expected a 3x3 matrix, got {m.shape}")
    if m.det() != 1:
        raise ValueError("matrix does not have determinant 1")


def is_regular_order_three(m):
    """True iff tr M = tr M^-1 = 0 (for det M = 1)."""
    t, tinv = char_poly_3(m)
    if not (t.is_zero() and tinv.is_zero()):
        return False
    ident = Matrix.identity(3, m.tower)
    assert m ** 3 == ident and m != ident, "Cayley-Hamilton violated"
    return True


def is_regular_unipotent(m):
    """True iff (M - I)^3 = 0 and (M - I)^2 != 0."""
    if m.shape != (3, 3):
        raise DimensionError(f"expected a 3x3 matrix, got {m.shape}")
    n = m - Matrix.identity(3, m.tower)
    n2 = n @ n
    return (n2 @ n).is_zero() and not n2.is_zero()


def parallel(u, v):
    """Whether two vectors span the same line (both assumed nonzero)."""
    k = next((i for i, x in enumerate(u) if not x.is_zero()), None)
    if k is None or v[k].is_zero():
        return False
    return all(x * v[k] == y * u[k] for x, y in zip(u, v))


def projectively_equal(m, n, roots_of_unity=None):
    """Whether ``m == c * n`` for a scalar ``c`` with ``c**dim == 1``.

    For 2x2 matrices this is equality up to sign, for 3x3 up to a cube root
    of unity (which must then exist in the tower).  An explicit list of
    allowed scalars may be passed instead.
    """
    if m.shape != n.shape:
        return False
    if roots_of_unity is None:
        if m.rows == 2:
            roots_of_unity = [1, -1]
        elif m.rows == 3:
            roots_of_unity = [1]
            tower = m.tower if n.tower.embeds_in(m.tower) else n.tower
            try:
                w = tower.omega
            except ValueError:
                pass
            else:
                roots_of_unity += [w, w * w]
        else:
            roots_of_unity = [1]
    return any(m == n * c for c in roots_of_unity)
