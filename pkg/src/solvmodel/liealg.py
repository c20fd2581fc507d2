"""Lie algebras over exact rationals: validation, structural predicates,
Chevalley-Eilenberg complexes, semidirect splittings with weight extraction,
and the named constructions used throughout the test corpus."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .exactla import Matrix, SubspaceBasis, subspace_from_vectors
from .gca import AlgebraElement, Differential, FreeCGA, GeneratorDecl, check_d_squared


class NotAnIdealError(ValueError):
    pass


class NotNilpotentIdealError(ValueError):
    pass


class NotDiagonalError(ValueError):
    pass


class NotADerivationError(ValueError):
    pass


class InvalidLieAlgebraError(ValueError):
    def __init__(self, report):
        super().__init__(str(report))
        self.report = report


CERTIFIED = "Certified"
UNDETERMINED = "Undetermined"


@dataclass(frozen=True)
class ValidationReport:
    antisymmetry_violations: tuple
    jacobi_violations: tuple

    @property
    def ok(self):
        return not self.antisymmetry_violations and not self.jacobi_violations

    def __str__(self):
        if self.ok:
            return "valid"
        bits = []
        if self.antisymmetry_violations:
            bits.append(f"antisymmetry violated at {list(self.antisymmetry_violations)[:5]}")
        if self.jacobi_violations:
            bits.append(f"Jacobi violated at triples {[t for t, _ in self.jacobi_violations][:5]}")
        return "; ".join(bits)


class LieAlgebra:
    """Finite-dimensional Lie algebra given by a full structure-constant table
    c[i][j][k] (the coefficient of e_k in [e_i, e_j]); both orientations are
    stored so that antisymmetry is validated, never assumed."""

    def __init__(self, names, c, name="lie-algebra"):
        self.names = tuple(names)
        self.dim = len(self.names)
        self.name = name
        self.c = tuple(tuple(tuple(Fraction(x) for x in row) for row in plane) for plane in c)
        if len(self.c) != self.dim or any(len(p) != self.dim for p in self.c) or \
                any(len(r) != self.dim for p in self.c for r in p):
            raise ValueError("structure constant table has wrong shape")

    # -- brackets ----------------------------------------------------------

    def bracket_basis(self, i, j):
        """[e_i, e_j] as a coordinate vector."""
        return list(self.c[i][j])

    def bracket(self, u, v):
        out = [Fraction(0)] * self.dim
        for i, ui in enumerate(u):
            if ui == 0:
                continue
            for j, vj in enumerate(v):
                if vj == 0:
                    continue
                for k in range(self.dim):
                    ck = self.c[i][j][k]
                    if ck != 0:
                        out[k] += ui * vj * ck
        return out

    def ad_basis(self, i) -> Matrix:
        """Matrix of ad e_i (columns are images of basis vectors)."""
        rows = [[self.c[i][j][k] for j in range(self.dim)] for k in range(self.dim)]
        return Matrix.from_rows(rows) if self.dim else Matrix(0, 0, ())

    def ad_vector(self, coords) -> Matrix:
        rows = [[sum((Fraction(coords[i]) * self.c[i][j][k] for i in range(self.dim)),
                     Fraction(0))
                 for j in range(self.dim)] for k in range(self.dim)]
        return Matrix.from_rows(rows) if self.dim else Matrix(0, 0, ())

    # -- validation and predicates ------------------------------------------

    def validate(self) -> ValidationReport:
        anti = []
        for i in range(self.dim):
            for j in range(i, self.dim):
                for k in range(self.dim):
                    if self.c[i][j][k] != -self.c[j][i][k]:
                        anti.append((i, j, k))
        jac = []
        for i in range(self.dim):
            for j in range(i + 1, self.dim):
                for k in range(j + 1, self.dim):
                    ei = [Fraction(int(t == i)) for t in range(self.dim)]
                    ej = [Fraction(int(t == j)) for t in range(self.dim)]
                    ek = [Fraction(int(t == k)) for t in range(self.dim)]
                    residual = [a + b + c for a, b, c in zip(
                        self.bracket(ei, self.bracket(ej, ek)),
                        self.bracket(ej, self.bracket(ek, ei)),
                        self.bracket(ek, self.bracket(ei, ej)))]
                    if any(x != 0 for x in residual):
                        jac.append(((i, j, k), tuple(residual)))
        return ValidationReport(tuple(anti), tuple(jac))

    def require_valid(self):
        report = self.validate()
        if not report.ok:
            raise InvalidLieAlgebraError(report)

    def _bracket_span(self, a: SubspaceBasis, b: SubspaceBasis) -> SubspaceBasis:
        vecs = []
        for u in a.vectors:
            for v in b.vectors:
                w = self.bracket(list(u), list(v))
                if any(x != 0 for x in w):
                    vecs.append(w)
        return subspace_from_vectors(self.dim, vecs)

    def _full_space(self) -> SubspaceBasis:
        vecs = [[Fraction(int(i == j)) for j in range(self.dim)] for i in range(self.dim)]
        return subspace_from_vectors(self.dim, vecs)

    def is_nilpotent(self) -> bool:
        cur = self._full_space()
        full = self._full_space()
        while True:
            nxt = self._bracket_span(full, cur)
            if nxt.dim == 0:
                return True
            if nxt.dim == cur.dim:
                return False
            cur = nxt

    def is_solvable(self) -> bool:
        cur = self._full_space()
        while True:
            nxt = self._bracket_span(cur, cur)
            if nxt.dim == 0:
                return True
            if nxt.dim == cur.dim:
                return False
            cur = nxt

    def is_unimodular(self) -> bool:
        for i in range(self.dim):
            m = self.ad_basis(i)
            tr = sum((m.data[t][t] for t in range(self.dim)), Fraction(0))
            if tr != 0:
                return False
        return True

    def subalgebra(self, indices, name=None):
        """Restriction to a bracket-closed subset of basis vectors."""
        idx = list(indices)
        pos = {g: p for p, g in enumerate(idx)}
        n = len(idx)
        c = [[[Fraction(0)] * n for _ in range(n)] for _ in range(n)]
        for a, i in enumerate(idx):
            for b, j in enumerate(idx):
                for k in range(self.dim):
                    v = self.c[i][j][k]
                    if v == 0:
                        continue
                    if k not in pos:
                        raise NotAnIdealError(
                            f"[{self.names[i]},{self.names[j]}] leaves the span")
                    c[a][b][pos[k]] += v
        return LieAlgebra([self.names[i] for i in idx], c,
                          name=name or f"{self.name}-sub")


@dataclass(frozen=True)
class SplittingSpec:
    """One-dimensional complement generator plus the nilradical basis order."""

    s_index: int
    nilradical_indices: tuple

    @staticmethod
    def for_algebra(g: LieAlgebra, s) -> "SplittingSpec":
        s_index = g.names.index(s) if isinstance(s, str) else int(s)
        rest = tuple(i for i in range(g.dim) if i != s_index)
        return SplittingSpec(s_index, rest)


@dataclass(frozen=True)
class WeightVector:
    """Diagonal of ad S on the nilradical basis; only produced when the action
    is exactly diagonal there."""

    weights: tuple
    s_acts_trivially: bool = False


def verify_splitting(g: LieAlgebra, spec: SplittingSpec) -> WeightVector:
    """Check the semidirect data and extract the diagonal weights of ad S.

    The nilradical span must be a nilpotent ideal and ad S must be literally
    diagonal on the supplied basis; the weight sum is checked against
    unimodularity of the ambient algebra.
    """
    g.require_valid()
    nil = list(spec.nilradical_indices)
    if sorted(nil + [spec.s_index]) != list(range(g.dim)):
        raise ValueError("splitting does not cover the basis")
    nilset = set(nil)
    # ideal: brackets of anything with nilradical vectors stay in the span
    for i in range(g.dim):
        for j in nil:
            for k in range(g.dim):
                if g.c[i][j][k] != 0 and k not in nilset:
                    raise NotAnIdealError(
                        f"[{g.names[i]},{g.names[j]}] has a component outside the nilradical")
    sub = g.subalgebra(nil)
    if not sub.is_nilpotent():
        raise NotNilpotentIdealError("nilradical span is not nilpotent")
    weights = []
    for j in nil:
        img = g.bracket_basis(spec.s_index, j)
        for k in range(g.dim):
            if k != j and img[k] != 0:
                raise NotDiagonalError(
                    f"ad {g.names[spec.s_index]} is not diagonal at {g.names[j]}")
        weights.append(img[j])
    if g.is_unimodular() and sum(weights) != 0:
        raise NotDiagonalError("weight sum contradicts unimodularity")
    return WeightVector(tuple(weights), s_acts_trivially=all(w == 0 for w in weights))


def completely_solvable_certificate(g: LieAlgebra, spec: SplittingSpec | None = None) -> str:
    """CERTIFIED when a rational diagonal splitting over a nilpotent ideal exists
    (or the algebra itself is nilpotent); UNDETERMINED otherwise. Never refutes."""
    report = g.validate()
    if not report.ok:
        return UNDETERMINED
    if spec is None:
        return CERTIFIED if g.is_nilpotent() else UNDETERMINED
    try:
        verify_splitting(g, spec)
    except (NotAnIdealError, NotNilpotentIdealError, NotDiagonalError, ValueError):
        return UNDETERMINED
    return CERTIFIED


# ---------------------------------------------------------------------------
# Chevalley-Eilenberg complex
# ---------------------------------------------------------------------------

def dual_names(g: LieAlgebra):
    out = [n.lower() for n in g.names]
    if len(set(out)) != len(out):
        out = [f"x{i + 1}" for i in range(g.dim)]
    return out


def ce_complex(g: LieAlgebra, cutoff=None):
    """The dual complex (Lambda g*, delta) with delta x_k = sum_{i<j} c[i][j][k] x_i x_j.

    d^2 = 0 is re-verified; it fails exactly when Jacobi does.
    """
    g.require_valid()
    algebra, d = ce_complex_unchecked(g, cutoff)
    bad = check_d_squared(algebra, d)
    if bad:
        raise InvalidLieAlgebraError(f"d^2 != 0 at {[n for n, _ in bad]}")
    return algebra, d


def ce_complex_unchecked(g: LieAlgebra, cutoff=None):
    """CE data without validation; used to confirm that d^2 = 0 tracks Jacobi."""
    # one spare degree so cohomology at the top degree sees its (empty) successor
    cutoff = g.dim + 1 if cutoff is None else cutoff
    names = dual_names(g)
    gens = [GeneratorDecl(nm, 1) for nm in names]
    algebra = FreeCGA(gens, cutoff=cutoff, domain="Q")
    images = {}
    for k in range(g.dim):
        terms = {}
        for i in range(g.dim):
            for j in range(i + 1, g.dim):
                coeff = g.c[i][j][k]
                if coeff != 0:
                    terms[((i, 1), (j, 1))] = coeff
        if terms:
            images[names[k]] = AlgebraElement(algebra, terms)
    return algebra, Differential(algebra, images)


# ---------------------------------------------------------------------------
# Constructors
# ---------------------------------------------------------------------------

def _empty_table(n):
    return [[[Fraction(0)] * n for _ in range(n)] for _ in range(n)]


def _set_bracket(c, i, j, terms):
    for k, v in terms.items():
        c[i][j][k] = Fraction(v)
        c[j][i][k] = -Fraction(v)


def heisenberg3() -> LieAlgebra:
    """Three-dimensional Heisenberg algebra [X1, Y1] = Z1."""
    c = _empty_table(3)
    _set_bracket(c, 0, 1, {2: 1})
    return LieAlgebra(["X1", "Y1", "Z1"], c, name="heisenberg3")


def abelian(k) -> LieAlgebra:
    return LieAlgebra([f"E{i + 1}" for i in range(k)], _empty_table(k), name=f"abelian_{k}")


def direct_sum(g: LieAlgebra, h: LieAlgebra, name=None) -> LieAlgebra:
    n, m = g.dim, h.dim
    names = list(g.names) + [nm if nm not in g.names else f"{nm}'" for nm in h.names]
    c = _empty_table(n + m)
    for i in range(n):
        for j in range(n):
            for k in range(n):
                c[i][j][k] = g.c[i][j][k]
    for i in range(m):
        for j in range(m):
            for k in range(m):
                c[n + i][n + j][n + k] = h.c[i][j][k]
    return LieAlgebra(names, c, name=name or f"{g.name}+{h.name}")


def semidirect_by_weights(weights, n: LieAlgebra, s_name="S", name=None) -> LieAlgebra:
    """Adjoin a generator S acting diagonally on n with the given weights.

    The diagonal action must be a derivation of n: whenever c[i][j][k] != 0,
    w_i + w_j must equal w_k.
    """
    weights = [Fraction(w) for w in weights]
    if len(weights) != n.dim:
        raise ValueError("one weight per nilradical basis vector")
    for i in range(n.dim):
        for j in range(n.dim):
            for k in range(n.dim):
                if n.c[i][j][k] != 0 and weights[i] + weights[j] != weights[k]:
                    raise NotADerivationError(
                        f"weights are not a derivation at ({i},{j},{k})")
    dim = n.dim + 1
    c = _empty_table(dim)
    for i in range(n.dim):
        for j in range(n.dim):
            for k in range(n.dim):
                c[i + 1][j + 1][k + 1] = n.c[i][j][k]
    for j in range(n.dim):
        _set_bracket(c, 0, j + 1, {j + 1: weights[j]})
    return LieAlgebra([s_name] + list(n.names), c, name=name or f"R|x{n.name}")


def bg_nilradical() -> LieAlgebra:
    """Seven-dimensional nilradical: a central line plus two Heisenberg factors."""
    line = abelian(1)
    line = LieAlgebra(["T"], line.c, name="center-line")
    h1 = heisenberg3()
    h2 = LieAlgebra(["X2", "Y2", "Z2"], heisenberg3().c, name="heisenberg3'")
    return direct_sum(direct_sum(line, h1, name="pre"), h2, name="bg-nilradical")


BG_WEIGHTS = (Fraction(0), Fraction(1), Fraction(-2), Fraction(-1),
              Fraction(-1), Fraction(2), Fraction(1))


def benson_gordon() -> LieAlgebra:
    """The eight-dimensional completely solvable algebra with brackets
    [X1,Y1]=Z1, [X2,Y2]=Z2, [S,X1]=X1, [S,X2]=-X2, [S,Y1]=-2Y1, [S,Y2]=2Y2,
    [S,Z1]=-Z1, [S,Z2]=Z2."""
    g = semidirect_by_weights(BG_WEIGHTS, bg_nilradical(), name="benson_gordon")
    return g
