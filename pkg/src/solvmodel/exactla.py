"""Exact linear algebra over Q, over Laurent polynomials in one formal variable nu,
and over the fraction field of the latter.

Everything is immutable after construction and every operation is a pure function.
No floating point anywhere; rationals are stdlib Fractions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction


class NotNilpotentError(ValueError):
    pass


class NotASubspaceError(ValueError):
    pass


class SpecializationMismatchError(RuntimeError):
    """Generic rank over Q(nu) disagreed with a rational specialization."""


# ---------------------------------------------------------------------------
# Laurent polynomials in nu
# ---------------------------------------------------------------------------

def _as_fraction(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"cannot coerce {type(x).__name__} to Fraction")


class Laurent:
    """Laurent polynomial sum c_k nu^k with Fraction coefficients.

    Stored as a dict {exponent: coefficient} with no zero coefficients;
    the zero element has an empty dict.
    """

    __slots__ = ("c",)

    def __init__(self, coeffs=None):
        if coeffs is None:
            self.c = {}
        elif isinstance(coeffs, dict):
            self.c = {int(k): _as_fraction(v) for k, v in coeffs.items() if v != 0}
        else:
            q = _as_fraction(coeffs)
            self.c = {0: q} if q != 0 else {}

    @staticmethod
    def nu(k=1, coeff=1):
        return Laurent({k: Fraction(coeff)})

    @staticmethod
    def const(q):
        return Laurent(q)

    def is_zero(self):
        return not self.c

    def is_one(self):
        return self.c == {0: Fraction(1)}

    def monomial(self):
        """(exponent, coefficient) if this is a single term, else None."""
        if len(self.c) != 1:
            return None
        ((k, v),) = self.c.items()
        return (k, v)

    def min_exp(self):
        return min(self.c) if self.c else 0

    def max_exp(self):
        return max(self.c) if self.c else 0

    def evaluate(self, value):
        """Exact value at nu = value (a nonzero Fraction)."""
        v = _as_fraction(value)
        if v == 0:
            raise ZeroDivisionError("cannot specialize nu to 0")
        return sum((c * v ** k for k, c in self.c.items()), Fraction(0))

    def shift(self, k):
        return Laurent({e + k: c for e, c in self.c.items()})

    def __add__(self, other):
        other = _as_laurent(other)
        if other is NotImplemented:
            return NotImplemented
        out = dict(self.c)
        for k, v in other.c.items():
            s = out.get(k, Fraction(0)) + v
            if s == 0:
                out.pop(k, None)
            else:
                out[k] = s
        r = Laurent.__new__(Laurent)
        r.c = out
        return r

    __radd__ = __add__

    def __neg__(self):
        r = Laurent.__new__(Laurent)
        r.c = {k: -v for k, v in self.c.items()}
        return r

    def __sub__(self, other):
        other = _as_laurent(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = _as_laurent(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = _as_laurent(other)
        if other is NotImplemented:
            return NotImplemented
        out = {}
        for k1, v1 in self.c.items():
            for k2, v2 in other.c.items():
                k = k1 + k2
                s = out.get(k, Fraction(0)) + v1 * v2
                if s == 0:
                    out.pop(k, None)
                else:
                    out[k] = s
        r = Laurent.__new__(Laurent)
        r.c = out
        return r

    __rmul__ = __mul__

    def __pow__(self, n):
        if n < 0:
            m = self.monomial()
            if m is None:
                raise ValueError("negative powers only of monomials")
            k, v = m
            return Laurent({k * n: v ** n})
        out = Laurent(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        other = _as_laurent(other)
        if other is NotImplemented:
            return NotImplemented
        return self.c == other.c

    def __hash__(self):
        return hash(frozenset(self.c.items()))

    def __repr__(self):
        return f"Laurent({self.c!r})"

    def __str__(self):
        if not self.c:
            return "0"
        parts = []
        for k in sorted(self.c, reverse=True):
            v = self.c[k]
            if k == 0:
                parts.append(str(v))
            elif k == 1:
                parts.append(f"{v}*nu" if v != 1 else "nu")
            else:
                parts.append(f"{v}*nu^{k}" if v != 1 else f"nu^{k}")
        return " + ".join(parts)


def _as_laurent(x):
    if isinstance(x, Laurent):
        return x
    if isinstance(x, (int, Fraction)):
        return Laurent(x)
    return NotImplemented


def _laurent_to_poly(a: Laurent):
    """Write a = nu^shift * p(nu) with p(0) != 0; return (shift, coeff list of p, ascending)."""
    if a.is_zero():
        return 0, []
    lo, hi = a.min_exp(), a.max_exp()
    return lo, [a.c.get(k, Fraction(0)) for k in range(lo, hi + 1)]


def _poly_divmod(num, den):
    num = list(num)
    deg_d = len(den) - 1
    lead = den[-1]
    quot = [Fraction(0)] * max(0, len(num) - deg_d)
    for i in range(len(num) - 1, deg_d - 1, -1):
        q = num[i] / lead
        if q == 0:
            continue
        quot[i - deg_d] = q
        for j in range(deg_d + 1):
            num[i - deg_d + j] -= q * den[j]
    while num and num[-1] == 0:
        num.pop()
    return quot, num


def _poly_gcd(a, b):
    a = [c for c in a]
    b = [c for c in b]
    while b:
        _, r = _poly_divmod(a, b)
        a, b = b, r
    if not a:
        return a
    lead = a[-1]
    return [c / lead for c in a]  # monic


def laurent_divexact(a: Laurent, b: Laurent) -> Laurent:
    """Exact division a / b; raises if the division leaves a remainder."""
    if b.is_zero():
        raise ZeroDivisionError("division of Laurent polynomials by zero")
    if a.is_zero():
        return Laurent()
    sa, pa = _laurent_to_poly(a)
    sb, pb = _laurent_to_poly(b)
    quot, rem = _poly_divmod(pa, pb)
    if rem:
        raise ValueError("inexact Laurent division")
    return Laurent({sa - sb + i: c for i, c in enumerate(quot)})


def laurent_gcd(a: Laurent, b: Laurent) -> Laurent:
    """Monic gcd of the polynomial parts; units nu^k are ignored."""
    if a.is_zero():
        if b.is_zero():
            return Laurent()
        _, pb = _laurent_to_poly(b)
        lead = pb[-1]
        return Laurent({i: c / lead for i, c in enumerate(pb)})
    if b.is_zero():
        return laurent_gcd(b, a)
    _, pa = _laurent_to_poly(a)
    _, pb = _laurent_to_poly(b)
    g = _poly_gcd(pa, pb)
    return Laurent({i: c for i, c in enumerate(g)})


class LFrac:
    """Element of the fraction field Q(nu), reduced, with a monic denominator
    that is a genuine polynomial in nu with nonzero constant term (units are
    folded into the numerator)."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        if den is None:
            den = Laurent(1)
        num = _coerce_laurent(num)
        den = _coerce_laurent(den)
        if den.is_zero():
            raise ZeroDivisionError("LFrac with zero denominator")
        if num.is_zero():
            self.num, self.den = Laurent(), Laurent(1)
            return
        g = laurent_gcd(num, den)
        if not g.is_one() and not g.is_zero():
            num = laurent_divexact(num, g)
            den = laurent_divexact(den, g)
        shift = den.min_exp()
        den = den.shift(-shift)
        num = num.shift(-shift)
        lead = den.c[den.max_exp()]
        if lead != 1:
            inv = Fraction(1) / lead
            num = num * inv
            den = den * inv
        self.num, self.den = num, den

    def is_zero(self):
        return self.num.is_zero()

    def evaluate(self, value):
        return self.num.evaluate(value) / self.den.evaluate(value)

    def __add__(self, other):
        other = _as_lfrac(other)
        if other is NotImplemented:
            return NotImplemented
        return LFrac(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        r = LFrac.__new__(LFrac)
        r.num, r.den = -self.num, self.den
        return r

    def __sub__(self, other):
        other = _as_lfrac(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = _as_lfrac(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = _as_lfrac(other)
        if other is NotImplemented:
            return NotImplemented
        return LFrac(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _as_lfrac(other)
        if other is NotImplemented:
            return NotImplemented
        if other.is_zero():
            raise ZeroDivisionError("division by zero in Q(nu)")
        return LFrac(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        other = _as_lfrac(other)
        if other is NotImplemented:
            return NotImplemented
        return other / self

    def __eq__(self, other):
        other = _as_lfrac(other)
        if other is NotImplemented:
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __repr__(self):
        return f"LFrac({self.num}, {self.den})"

    def __str__(self):
        if self.den.is_one():
            return str(self.num)
        return f"({self.num})/({self.den})"


def _coerce_laurent(x) -> Laurent:
    if isinstance(x, Laurent):
        return x
    return Laurent(_as_fraction(x))


def _as_lfrac(x):
    if isinstance(x, LFrac):
        return x
    if isinstance(x, Laurent):
        return LFrac(x)
    if isinstance(x, (int, Fraction)):
        return LFrac(Laurent(x))
    return NotImplemented


# ---------------------------------------------------------------------------
# Matrices
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Matrix:
    """Dense matrix over one scalar domain (Fraction, Laurent or LFrac)."""

    rows: int
    cols: int
    data: tuple

    @staticmethod
    def from_rows(rows_list):
        rows = len(rows_list)
        cols = len(rows_list[0]) if rows else 0
        for r in rows_list:
            if len(r) != cols:
                raise ValueError("ragged rows")
        return Matrix(rows, cols, tuple(tuple(r) for r in rows_list))

    @staticmethod
    def identity(n, one=Fraction(1), zero=Fraction(0)):
        return Matrix(n, n, tuple(
            tuple(one if i == j else zero for j in range(n)) for i in range(n)))

    @staticmethod
    def zero(rows, cols, zero=Fraction(0)):
        return Matrix(rows, cols, tuple(tuple(zero for _ in range(cols)) for _ in range(rows)))

    def __getitem__(self, ij):
        i, j = ij
        return self.data[i][j]

    def row(self, i):
        return self.data[i]

    def col(self, j):
        return tuple(self.data[i][j] for i in range(self.rows))

    def transpose(self):
        return Matrix(self.cols, self.rows,
                      tuple(tuple(self.data[i][j] for i in range(self.rows))
                            for j in range(self.cols)))

    def __add__(self, other):
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")
        return Matrix(self.rows, self.cols, tuple(
            tuple(self.data[i][j] + other.data[i][j] for j in range(self.cols))
            for i in range(self.rows)))

    def __sub__(self, other):
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")
        return Matrix(self.rows, self.cols, tuple(
            tuple(self.data[i][j] - other.data[i][j] for j in range(self.cols))
            for i in range(self.rows)))

    def __mul__(self, other):
        if isinstance(other, Matrix):
            if self.cols != other.rows:
                raise ValueError("shape mismatch")
            ot = other.transpose()
            out = []
            for i in range(self.rows):
                ri = self.data[i]
                out.append(tuple(_dot(ri, ot.data[j]) for j in range(other.cols)))
            return Matrix(self.rows, other.cols, tuple(out))
        return Matrix(self.rows, self.cols, tuple(
            tuple(self.data[i][j] * other for j in range(self.cols))
            for i in range(self.rows)))

    def apply(self, vec):
        """Matrix times column vector (any scalar domain that multiplies with entries)."""
        if len(vec) != self.cols:
            raise ValueError("length mismatch")
        return [_dot(self.data[i], vec) for i in range(self.rows)]

    def power(self, n):
        if self.rows != self.cols:
            raise ValueError("power of a non-square matrix")
        result = Matrix.identity(self.rows, one=_one_like(self), zero=_zero_like(self))
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def map(self, f):
        return Matrix(self.rows, self.cols, tuple(
            tuple(f(x) for x in row) for row in self.data))

    def is_zero(self):
        return all(_is_zero(x) for row in self.data for x in row)


def _dot(u, v):
    acc = None
    for a, b in zip(u, v):
        if _is_zero(a) or _is_zero(b):
            continue
        term = a * b
        acc = term if acc is None else acc + term
    if acc is None:
        return _zero_of(u[0] if u else Fraction(0))
    return acc


def _is_zero(x):
    if isinstance(x, (Laurent, LFrac)):
        return x.is_zero()
    return x == 0


def _zero_of(sample):
    if isinstance(sample, Laurent):
        return Laurent()
    if isinstance(sample, LFrac):
        return LFrac(Laurent())
    return Fraction(0)


def _one_of(sample):
    if isinstance(sample, Laurent):
        return Laurent(1)
    if isinstance(sample, LFrac):
        return LFrac(Laurent(1))
    return Fraction(1)


def _zero_like(m: Matrix):
    return _zero_of(m.data[0][0]) if m.rows and m.cols else Fraction(0)


def _one_like(m: Matrix):
    return _one_of(m.data[0][0]) if m.rows and m.cols else Fraction(1)


def promote_to_field(m: Matrix) -> Matrix:
    """Laurent entries become LFrac; Fraction and LFrac pass through."""
    if m.rows == 0 or m.cols == 0:
        return m
    sample = m.data[0][0]
    if isinstance(sample, Laurent):
        return m.map(LFrac)
    return m


def specialize(m: Matrix, value) -> Matrix:
    """Evaluate a Laurent/LFrac matrix at nu = value, yielding a Fraction matrix."""
    def ev(x):
        if isinstance(x, (Laurent, LFrac)):
            return x.evaluate(value)
        return x
    return m.map(ev)


# ---------------------------------------------------------------------------
# Elimination
# ---------------------------------------------------------------------------

def rref(m: Matrix):
    """Reduced row echelon form over a field.

    Deterministic pivoting: first nonzero column, topmost candidate row.
    Returns (rank, pivot column tuple, R).
    """
    m = promote_to_field(m)
    if m.rows == 0 or m.cols == 0:
        return 0, (), m
    rows = [list(r) for r in m.data]
    nrows, ncols = m.rows, m.cols
    pivots = []
    pr = 0
    for pc in range(ncols):
        pivot_row = None
        for r in range(pr, nrows):
            if not _is_zero(rows[r][pc]):
                pivot_row = r
                break
        if pivot_row is None:
            continue
        rows[pr], rows[pivot_row] = rows[pivot_row], rows[pr]
        pv = rows[pr][pc]
        if not (pv == _one_of(pv)):
            inv = _one_of(pv) / pv
            rows[pr] = [x * inv for x in rows[pr]]
        for r in range(nrows):
            if r == pr:
                continue
            f = rows[r][pc]
            if _is_zero(f):
                continue
            prow = rows[pr]
            rows[r] = [x - f * y for x, y in zip(rows[r], prow)]
        pivots.append(pc)
        pr += 1
        if pr == nrows:
            break
    return pr, tuple(pivots), Matrix.from_rows(rows)


def rank(m: Matrix) -> int:
    return rref(m)[0]


def kernel_basis(m: Matrix):
    """Canonical basis (echelon form) of the right null space."""
    if m.cols == 0:
        return []
    if m.rows == 0:
        vecs = []
        one = Fraction(1)
        zero = Fraction(0)
        for j in range(m.cols):
            vecs.append([one if k == j else zero for k in range(m.cols)])
        return vecs
    r, pivots, R = rref(m)
    pivset = set(pivots)
    free = [j for j in range(m.cols) if j not in pivset]
    one = _one_like(R)
    zero = _zero_like(R)
    vecs = []
    for fcol in free:
        v = [zero] * m.cols
        v[fcol] = one
        for i, pc in enumerate(pivots):
            v[pc] = -R.data[i][fcol]
        vecs.append(v)
    if not vecs:
        return []
    _, _, canon = rref(Matrix.from_rows(vecs))
    return [list(row) for row in canon.data if not all(_is_zero(x) for x in row)]


@dataclass(frozen=True)
class SubspaceBasis:
    """Subspace stored as reduced-echelon row vectors for canonical comparison."""

    ambient: int
    vectors: tuple

    @property
    def dim(self):
        return len(self.vectors)

    def contains(self, vec):
        return _is_zero_vec(reduce_against(list(vec), [list(v) for v in self.vectors]))


def _is_zero_vec(v):
    return all(_is_zero(x) for x in v)


def subspace_from_vectors(ambient, vecs) -> SubspaceBasis:
    if not vecs:
        return SubspaceBasis(ambient, ())
    _, _, R = rref(Matrix.from_rows(vecs))
    rows = tuple(tuple(r) for r in R.data if not all(_is_zero(x) for x in r))
    return SubspaceBasis(ambient, rows)


def reduce_against(vec, echelon_rows):
    """Reduce vec modulo echelon rows (each with leading 1); returns the residue."""
    v = list(vec)
    for row in echelon_rows:
        lead = next((j for j, x in enumerate(row) if not _is_zero(x)), None)
        if lead is None:
            continue
        f = v[lead]
        if _is_zero(f):
            continue
        v = [x - f * y for x, y in zip(v, row)]
    return v


def quotient_complement(ambient: SubspaceBasis, sub: SubspaceBasis) -> SubspaceBasis:
    """Complement C of sub inside ambient, chosen greedily over the ambient's
    echelon basis vectors in index order, so ambient = sub + C (direct)."""
    if ambient.ambient != sub.ambient:
        raise NotASubspaceError("ambient dimensions differ")
    joint = list(sub.vectors) + list(ambient.vectors)
    if joint:
        joint_rank = rank(Matrix.from_rows(joint))
    else:
        joint_rank = 0
    if joint_rank != ambient.dim:
        raise NotASubspaceError("sub is not contained in ambient")
    stack = [list(v) for v in sub.vectors]
    chosen = []
    current = subspace_from_vectors(ambient.ambient, stack).vectors if stack else ()
    eche = [list(v) for v in current]
    for v in ambient.vectors:
        residue = reduce_against(list(v), eche)
        if not _is_zero_vec(residue):
            chosen.append(list(v))
            lead = next(j for j, x in enumerate(residue) if not _is_zero(x))
            inv = _one_of(residue[lead]) / residue[lead]
            eche.append([x * inv for x in residue])
    return subspace_from_vectors(ambient.ambient, chosen) if chosen else SubspaceBasis(ambient.ambient, ())


def generalized_eigenspace(m: Matrix, lam, power=None) -> SubspaceBasis:
    """Kernel of (M - lam I)^power; power defaults to the dimension.

    Kernel dimensions are monotone in the power and stabilize, so the
    computation stops early once stable (the result equals the full power).
    """
    if m.rows != m.cols:
        raise ValueError("square matrix required")
    n = m.rows
    if n == 0:
        return SubspaceBasis(0, ())
    one = _one_like(m)
    lam_scaled = one * lam
    shifted = m - Matrix.identity(n, one=lam_scaled, zero=_zero_like(m))
    if power is not None:
        target = shifted.power(power) if power > 1 else shifted
        return subspace_from_vectors(n, kernel_basis(target))
    cur = shifted
    prev_dim = len(kernel_basis(cur))
    steps = 1
    while steps < n:
        nxt = cur * shifted
        dim = len(kernel_basis(nxt))
        steps += 1
        if dim == prev_dim:
            return subspace_from_vectors(n, kernel_basis(cur))
        cur, prev_dim = nxt, dim
    return subspace_from_vectors(n, kernel_basis(cur))


def char_poly(m: Matrix):
    """Characteristic polynomial coefficients, ascending, via Faddeev-LeVerrier."""
    if m.rows != m.cols:
        raise ValueError("square matrix required")
    n = m.rows
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    M = Matrix.identity(n)
    for k in range(1, n + 1):
        M = m * M
        tr = sum((M.data[i][i] for i in range(n)), Fraction(0))
        c = -tr / k
        coeffs[n - k] = c
        M = M + Matrix.identity(n) * c
    return coeffs


def _divisors(n):
    n = abs(n)
    out = set()
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.add(d)
            out.add(n // d)
        d += 1
    return sorted(out)


def rational_eigenvalues(m: Matrix):
    """All eigenvalues with multiplicity if the characteristic polynomial splits
    over Q; None when it does not (no claim is made in that case)."""
    coeffs = char_poly(m)
    denom_lcm = 1
    for c in coeffs:
        denom_lcm = denom_lcm * c.denominator // math.gcd(denom_lcm, c.denominator)
    ints = [int(c * denom_lcm) for c in coeffs]
    roots = []
    # strip zero roots first
    while ints and ints[0] == 0:
        roots.append(Fraction(0))
        ints = ints[1:]
    while len(ints) > 1:
        lead = ints[-1]
        const = ints[0]
        found = None
        for p in _divisors(const):
            for q in _divisors(lead):
                for cand in (Fraction(p, q), Fraction(-p, q)):
                    val = Fraction(0)
                    for c in reversed(ints):
                        val = val * cand + c
                    if val == 0:
                        found = cand
                        break
                if found is not None:
                    break
            if found is not None:
                break
        if found is None:
            return None
        roots.append(found)
        # deflate by (x - found), rescaling to integer coefficients
        new = [Fraction(c) for c in ints]
        quot = [Fraction(0)] * (len(new) - 1)
        rem = list(new)
        for i in range(len(new) - 1, 0, -1):
            q = rem[i]
            quot[i - 1] = q
            rem[i] = Fraction(0)
            rem[i - 1] += q * found
        lcm2 = 1
        for c in quot:
            lcm2 = lcm2 * c.denominator // math.gcd(lcm2, c.denominator)
        ints = [int(c * lcm2) for c in quot]
        while len(ints) > 1 and ints[-1] == 0:
            ints.pop()
    tally = {}
    for r in roots:
        tally[r] = tally.get(r, 0) + 1
    return sorted(tally.items())


def exp_nilpotent(m: Matrix) -> Matrix:
    """Exact exponential of a nilpotent rational matrix (finite series)."""
    if m.rows != m.cols:
        raise ValueError("square matrix required")
    n = m.rows
    if n == 0:
        return m
    if not m.power(n).is_zero():
        raise NotNilpotentError("matrix is not nilpotent")
    result = Matrix.identity(n)
    term = Matrix.identity(n)
    for k in range(1, n):
        term = term * m
        result = result + term * Fraction(1, math.factorial(k))
    return result


# ---------------------------------------------------------------------------
# Fraction-free elimination and specialization cross-checks
# ---------------------------------------------------------------------------

def rank_bareiss(m: Matrix) -> int:
    """Rank of a Laurent (or Fraction) matrix by fraction-free Bareiss elimination."""
    if m.rows == 0 or m.cols == 0:
        return 0
    sample = m.data[0][0]
    if isinstance(sample, LFrac):
        raise TypeError("Bareiss elimination expects a domain, not the fraction field")
    if isinstance(sample, Fraction) or isinstance(sample, int):
        rows = [[Laurent(x) for x in row] for row in m.data]
    else:
        rows = [list(row) for row in m.data]
    nrows, ncols = len(rows), len(rows[0])
    prev = Laurent(1)
    r = 0
    for c in range(ncols):
        pivot_row = None
        for i in range(r, nrows):
            if not rows[i][c].is_zero():
                pivot_row = i
                break
        if pivot_row is None:
            continue
        rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
        pv = rows[r][c]
        for i in range(r + 1, nrows):
            fi = rows[i][c]
            new_row = []
            for j in range(ncols):
                val = rows[r][c] * rows[i][j] - fi * rows[r][j]
                if not prev.is_one():
                    val = laurent_divexact(val, prev)
                new_row.append(val)
            rows[i] = new_row
        prev = pv
        r += 1
        if r == nrows:
            break
    return r


SPECIALIZATION_POINTS = (Fraction(2), Fraction(3))


def checked_rank(m: Matrix) -> int:
    """Rank over Q(nu) cross-checked against the specializations nu -> 2 and 3.

    A disagreement aborts loudly; it is never absorbed.
    """
    generic = rank(promote_to_field(m))
    for point in SPECIALIZATION_POINTS:
        special = rank(specialize(m, point))
        if special != generic:
            raise SpecializationMismatchError(
                f"rank {generic} over Q(nu) but {special} at nu={point}")
    return generic


def checked_kernel(m: Matrix):
    """Kernel over Q(nu) whose dimension is cross-checked at nu -> 2 and 3."""
    vecs = kernel_basis(promote_to_field(m))
    generic = len(vecs)
    for point in SPECIALIZATION_POINTS:
        special = len(kernel_basis(specialize(m, point)))
        if special != generic:
            raise SpecializationMismatchError(
                f"kernel dimension {generic} over Q(nu) but {special} at nu={point}")
    return vecs


# ---------------------------------------------------------------------------
# Precomputed solver for repeated solves against a fixed rational matrix
# ---------------------------------------------------------------------------

class LinearSolver:
    """Solves A x = v for a fixed Fraction matrix A with independent columns.

    The elimination transform is precomputed once; right-hand sides may have
    Fraction or Laurent entries (the transform is rational either way).
    """

    def __init__(self, a: Matrix):
        self.cols = a.cols
        self.rows = a.rows
        aug = [list(a.data[i]) + [Fraction(1) if j == i else Fraction(0) for j in range(a.rows)]
               for i in range(a.rows)]
        r, pivots, R = rref(Matrix.from_rows(aug)) if a.rows else (0, (), a)
        if a.rows == 0:
            self.rank = 0
            self.pivots = ()
            self.transform = []
            return
        struct_pivots = [p for p in pivots if p < a.cols]
        if len(struct_pivots) != a.cols:
            raise ValueError("columns are not independent")
        self.rank = len(struct_pivots)
        self.pivots = tuple(struct_pivots)
        self.transform = [list(R.data[i][a.cols:]) for i in range(a.rows)]
        self._r_struct = [list(R.data[i][:a.cols]) for i in range(a.rows)]

    def solve(self, v):
        """Unique solution x, or None when v is outside the column span."""
        if len(v) != self.rows:
            raise ValueError("length mismatch")
        w = []
        for row in self.transform:
            w.append(_dot(row, v))
        x = [None] * self.cols
        for i in range(self.rank):
            lead = next((j for j, val in enumerate(self._r_struct[i]) if not _is_zero(val)), None)
            x[lead] = w[i]
        for i in range(self.rank, self.rows):
            if not _is_zero(w[i]):
                return None
        zero = _zero_of(v[0]) if v else Fraction(0)
        return [zero if xi is None else xi for xi in x]
