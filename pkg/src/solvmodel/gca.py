"""Free graded-commutative algebras with derivations.

Monomial bases per degree, Koszul-signed multiplication, differentials
extended by the graded Leibniz rule, morphisms, and cohomology rings with
cup products and canonical representatives.

Monomials are sorted tuples of (generator index, exponent); odd generators
square to zero. The monomial basis of each degree is listed in lexicographic
order of the exploded generator-index tuple, and every canonical choice
(representatives, complements) is made relative to that order, so results
are reproducible bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .exactla import (
    Fraction as _F,  # noqa: F401  (re-export convenience)
    Laurent,
    LinearSolver,
    Matrix,
    kernel_basis,
    rank,
    reduce_against,
    rref,
    _is_zero,
)


class CutoffExceededError(ValueError):
    pass


class MixedAlgebrasError(ValueError):
    pass


class DifferentialNotSquareZeroError(ValueError):
    pass


class NotAChainMapError(ValueError):
    def __init__(self, generator, defect):
        super().__init__(f"not a chain map at generator {generator}")
        self.generator = generator
        self.defect = defect


@dataclass(frozen=True)
class GeneratorDecl:
    """A free generator: degree >= 1, optional lower (stage) degree for bigraded models."""

    name: str
    degree: int
    lower: int = 0


class FreeCGA:
    """Free graded-commutative algebra on finitely many generators.

    domain is "Q" (Fraction coefficients) or "QNU" (Laurent polynomials in nu).
    The degree cutoff is mandatory; monomials are only ever enumerated up to it.
    """

    def __init__(self, generators, cutoff, domain="Q"):
        gens = list(generators)
        names = [g.name for g in gens]
        if len(set(names)) != len(names):
            raise ValueError("generator names must be unique")
        for g in gens:
            if g.degree < 1:
                raise ValueError(f"generator {g.name} has degree < 1")
        if domain not in ("Q", "QNU"):
            raise ValueError(f"unknown scalar domain {domain!r}")
        self.generators = tuple(gens)
        self.cutoff = cutoff
        self.domain = domain
        self._index = {g.name: i for i, g in enumerate(gens)}
        self._basis_cache = {}

    # -- scalars ----------------------------------------------------------

    def zero_scalar(self):
        return Laurent() if self.domain == "QNU" else Fraction(0)

    def one_scalar(self):
        return Laurent(1) if self.domain == "QNU" else Fraction(1)

    def coerce(self, c):
        if self.domain == "QNU":
            if isinstance(c, Laurent):
                return c
            return Laurent(c)
        if isinstance(c, Laurent):
            raise MixedAlgebrasError("Laurent scalar in a Q-algebra")
        if isinstance(c, Fraction):
            return c
        return Fraction(c)

    # -- generators and monomials -----------------------------------------

    def gen_index(self, name):
        return self._index[name]

    def degree_of_gen(self, i):
        return self.generators[i].degree

    def is_odd(self, i):
        return self.generators[i].degree % 2 == 1

    def monomial_degree(self, mono):
        return sum(self.generators[i].degree * e for i, e in mono)

    def monomial_lower(self, mono):
        return sum(self.generators[i].lower * e for i, e in mono)

    def monomial_name(self, mono):
        if not mono:
            return "1"
        parts = []
        for i, e in mono:
            nm = self.generators[i].name
            parts.append(nm if e == 1 else f"{nm}^{e}")
        return "*".join(parts)

    def monomial_basis(self, n):
        """All degree-n monomials, lexicographic in the exploded index tuple."""
        if n > self.cutoff:
            raise CutoffExceededError(f"degree {n} beyond cutoff {self.cutoff}")
        if n in self._basis_cache:
            return self._basis_cache[n]
        out = []

        def rec(start, remaining, acc):
            if remaining == 0:
                out.append(tuple(acc))
                return
            for i in range(start, len(self.generators)):
                d = self.generators[i].degree
                if d > remaining:
                    continue
                max_e = 1 if self.is_odd(i) else remaining // d
                for e in range(1, max_e + 1):
                    if remaining - d * e >= 0:
                        acc.append((i, e))
                        rec(i + 1, remaining - d * e, acc)
                        acc.pop()

        if n == 0:
            out.append(())
        else:
            rec(0, n, [])
        out.sort(key=lambda m: self._explode(m))
        self._basis_cache[n] = out
        return out

    def _explode(self, mono):
        seq = []
        for i, e in mono:
            seq.extend([i] * e)
        return tuple(seq)

    def basis_index(self, n):
        basis = self.monomial_basis(n)
        return {m: k for k, m in enumerate(basis)}

    # -- elements ----------------------------------------------------------

    def element(self, terms=None):
        return AlgebraElement(self, dict(terms or {}))

    def zero(self):
        return AlgebraElement(self, {})

    def one(self):
        return AlgebraElement(self, {(): self.one_scalar()})

    def gen(self, name):
        i = self._index[name]
        return AlgebraElement(self, {((i, 1),): self.one_scalar()})

    def from_coords(self, n, coords):
        basis = self.monomial_basis(n)
        terms = {}
        for m, c in zip(basis, coords):
            if not _is_zero(c):
                terms[m] = self.coerce(c)
        return AlgebraElement(self, terms)

    def mul_monomials(self, m1, m2):
        """Product of two monomials: (monomial, sign) or None when it vanishes."""
        odd1 = [i for i, e in m1 if self.is_odd(i)]
        odd2 = [i for i, e in m2 if self.is_odd(i)]
        if set(odd1) & set(odd2):
            return None
        inversions = 0
        for b in odd2:
            for a in odd1:
                if a > b:
                    inversions += 1
        factors = dict(m1)
        for i, e in m2:
            factors[i] = factors.get(i, 0) + e
        mono = tuple(sorted(factors.items()))
        return mono, (-1) ** inversions

    def laurent_twin(self):
        """The same algebra with Laurent scalars."""
        if self.domain == "QNU":
            return self
        return FreeCGA(self.generators, self.cutoff, domain="QNU")


class AlgebraElement:
    """Finite sum of monomials with nonzero coefficients from the algebra's domain."""

    __slots__ = ("algebra", "terms")

    def __init__(self, algebra, terms):
        self.algebra = algebra
        self.terms = {m: c for m, c in terms.items() if not _is_zero(c)}

    def is_zero(self):
        return not self.terms

    def degrees(self):
        return sorted({self.algebra.monomial_degree(m) for m in self.terms})

    def degree(self):
        """Degree of a homogeneous element (error when mixed)."""
        ds = self.degrees()
        if not ds:
            return None
        if len(ds) > 1:
            raise ValueError("inhomogeneous element")
        return ds[0]

    def homogeneous_part(self, n):
        alg = self.algebra
        return AlgebraElement(alg, {m: c for m, c in self.terms.items()
                                    if alg.monomial_degree(m) == n})

    def coords(self, n):
        basis = self.algebra.monomial_basis(n)
        idx = {m: k for k, m in enumerate(basis)}
        out = [self.algebra.zero_scalar()] * len(basis)
        for m, c in self.terms.items():
            if self.algebra.monomial_degree(m) == n:
                out[idx[m]] = c
        return out

    def _check_same(self, other):
        if self.algebra is not other.algebra:
            raise MixedAlgebrasError("elements of different algebras")

    def __add__(self, other):
        self._check_same(other)
        terms = dict(self.terms)
        for m, c in other.terms.items():
            s = terms.get(m, self.algebra.zero_scalar()) + c
            if _is_zero(s):
                terms.pop(m, None)
            else:
                terms[m] = s
        return AlgebraElement(self.algebra, terms)

    def __neg__(self):
        return AlgebraElement(self.algebra, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, AlgebraElement):
            c = self.algebra.coerce(other)
            return AlgebraElement(self.algebra, {m: v * c for m, v in self.terms.items()})
        self._check_same(other)
        alg = self.algebra
        terms = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                hit = alg.mul_monomials(m1, m2)
                if hit is None:
                    continue
                mono, sign = hit
                val = c1 * c2 if sign == 1 else -(c1 * c2)
                s = terms.get(mono, alg.zero_scalar()) + val
                if _is_zero(s):
                    terms.pop(mono, None)
                else:
                    terms[mono] = s
        return AlgebraElement(alg, terms)

    def __rmul__(self, scalar):
        c = self.algebra.coerce(scalar)
        return AlgebraElement(self.algebra, {m: c * v for m, v in self.terms.items()})

    def __eq__(self, other):
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return self.algebra is other.algebra and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def promote(self, target_algebra):
        """Reinterpret in an algebra with the same generators (e.g. Q -> QNU)."""
        return AlgebraElement(target_algebra,
                              {m: target_algebra.coerce(c) for m, c in self.terms.items()})

    def __repr__(self):
        if not self.terms:
            return "0"
        alg = self.algebra
        parts = []
        for m in sorted(self.terms, key=alg._explode):
            parts.append(f"({self.terms[m]})*{alg.monomial_name(m)}")
        return " + ".join(parts)


class Differential:
    """Degree +1 derivation given on generators, extended by the graded Leibniz rule."""

    def __init__(self, algebra: FreeCGA, images: dict):
        self.algebra = algebra
        self.images = {}
        for name, img in images.items():
            i = algebra.gen_index(name)
            if img is not None and not img.is_zero():
                d = img.degree()
                if d != algebra.degree_of_gen(i) + 1:
                    raise ValueError(f"d({name}) must have degree {algebra.degree_of_gen(i) + 1}")
                self.images[i] = img
        self._matrix_cache = {}

    def of_gen(self, i):
        return self.images.get(i, self.algebra.zero())

    def apply(self, el: AlgebraElement) -> AlgebraElement:
        alg = self.algebra
        if el.algebra is not alg:
            raise MixedAlgebrasError("element from a different algebra")
        total = alg.zero()
        for mono, coeff in el.terms.items():
            total = total + coeff * self._d_monomial(mono)
        return total

    def _d_monomial(self, mono):
        alg = self.algebra
        total = alg.zero()
        prefix_degree = 0
        for pos, (i, e) in enumerate(mono):
            di = self.images.get(i)
            gdeg = alg.degree_of_gen(i)
            if di is not None:
                sign = (-1) ** prefix_degree
                term = _leibniz_term(alg, mono[:pos], (i, e), mono[pos + 1:], di)
                total = total + (alg.coerce(sign * e)) * term
            prefix_degree += gdeg * e
        return total

    def matrix(self, n) -> Matrix:
        """Matrix of d: degree n -> n+1, columns indexed by the degree-n basis."""
        if n in self._matrix_cache:
            return self._matrix_cache[n]
        alg = self.algebra
        src = alg.monomial_basis(n)
        tgt = alg.monomial_basis(n + 1)
        tgt_idx = {m: k for k, m in enumerate(tgt)}
        zero = alg.zero_scalar()
        cols = []
        for m in src:
            img = self._d_monomial(m)
            col = [zero] * len(tgt)
            for mm, c in img.terms.items():
                col[tgt_idx[mm]] = c
            cols.append(col)
        rows = [[cols[j][i] for j in range(len(src))] for i in range(len(tgt))]
        mat = Matrix.from_rows(rows) if tgt or src else Matrix(0, 0, ())
        if not tgt:
            mat = Matrix(0, len(src), ())
        self._matrix_cache[n] = mat
        return mat


def _leibniz_term(alg, before, reduced_factor, after, d_image):
    """(before) * d(g) * g^{e-1} * (after); only even generators carry e > 1,
    so placing d(g) left of the leftover power introduces no sign."""
    i, e = reduced_factor
    left = AlgebraElement(alg, {tuple(before): alg.one_scalar()})
    right_mono = ((i, e - 1),) if e > 1 else ()
    right = AlgebraElement(alg, {tuple(right_mono) + tuple(after): alg.one_scalar()})
    return left * d_image * right


def check_d_squared(algebra: FreeCGA, d: Differential):
    """d(d(g)) for every generator with degree + 2 <= cutoff; empty list iff d^2 = 0."""
    violations = []
    for i, g in enumerate(algebra.generators):
        if g.degree + 2 > algebra.cutoff:
            continue
        img = d.of_gen(i)
        if img.is_zero():
            continue
        dd = d.apply(img)
        if not dd.is_zero():
            violations.append((g.name, dd))
    return violations


class DgaMorphism:
    """Multiplicative degree-0 map between free CGAs, given on generators."""

    def __init__(self, source: FreeCGA, target: FreeCGA, images: dict):
        self.source = source
        self.target = target
        self.images = {}
        for name, img in images.items():
            i = source.gen_index(name)
            if img.algebra is not target:
                raise MixedAlgebrasError("image lies outside the target algebra")
            if not img.is_zero() and img.degree() != source.degree_of_gen(i):
                raise ValueError(f"image of {name} must preserve degree")
            self.images[i] = img
        for i in range(len(source.generators)):
            if i not in self.images:
                raise ValueError(f"missing image for generator {source.generators[i].name}")

    def apply(self, el: AlgebraElement) -> AlgebraElement:
        if el.algebra is not self.source:
            raise MixedAlgebrasError("element from a different algebra")
        tgt = self.target
        total = tgt.zero()
        for mono, coeff in el.terms.items():
            prod = tgt.one()
            for i, e in mono:
                img = self.images[i]
                for _ in range(e):
                    prod = prod * img
                    if prod.is_zero():
                        break
                if prod.is_zero():
                    break
            total = total + tgt.coerce(coeff) * prod
        return total

    def check_chain_map(self, d_src: Differential, d_tgt: Differential, max_degree=None):
        """Raise NotAChainMap unless phi(d g) = d(phi g) for all generators in range."""
        limit = max_degree if max_degree is not None else self.source.cutoff - 1
        for i, g in enumerate(self.source.generators):
            if g.degree + 1 > limit + 1:
                continue
            lhs = self.apply(d_src.of_gen(i))
            rhs = d_tgt.apply(self.images[i])
            if lhs - rhs != self.target.zero():
                raise NotAChainMapError(g.name, lhs - rhs)

    def compose(self, inner: "DgaMorphism") -> "DgaMorphism":
        """self after inner."""
        if inner.target is not self.source:
            raise MixedAlgebrasError("composition mismatch")
        images = {}
        for i, g in enumerate(inner.source.generators):
            images[g.name] = self.apply(inner.images[i])
        return DgaMorphism(inner.source, self.target, images)


# ---------------------------------------------------------------------------
# Cohomology
# ---------------------------------------------------------------------------

class CohomologyRing:
    """Cohomology of (A, d) up to max_degree with canonical representatives.

    Representatives per degree come from extending the echelon basis of the
    coboundary space by kernel vectors in the canonical monomial order; the
    cup-product table is reduced modulo coboundaries by exact linear solves.
    """

    def __init__(self, algebra: FreeCGA, d: Differential, max_degree: int):
        if algebra.domain != "Q":
            raise ValueError("cohomology rings are computed over Q")
        if max_degree + 1 > algebra.cutoff:
            raise CutoffExceededError("need monomials one degree beyond max_degree")
        bad = check_d_squared(algebra, d)
        if bad:
            raise DifferentialNotSquareZeroError(
                f"d^2 != 0 at generators {[name for name, _ in bad]}")
        self.algebra = algebra
        self.d = d
        self.max_degree = max_degree
        self._degree_data = {}
        self._product_cache = {}
        self._twin_differentials = {}

    def _data(self, n):
        if n in self._degree_data:
            return self._degree_data[n]
        alg = self.algebra
        if n > self.max_degree or n < 0:
            raise CutoffExceededError(f"degree {n} beyond computed range")
        basis = alg.monomial_basis(n)
        dn = self.d.matrix(n)
        cocycles = kernel_basis(dn) if len(basis) else []
        if n > 0:
            dprev = self.d.matrix(n - 1)
            image_vecs = [list(dprev.col(j)) for j in range(dprev.cols)]
            image_vecs = [v for v in image_vecs if not all(_is_zero(x) for x in v)]
        else:
            image_vecs = []
        if image_vecs:
            _, _, R = rref(Matrix.from_rows(image_vecs))
            image_echelon = [list(r) for r in R.data if not all(_is_zero(x) for x in r)]
        else:
            image_echelon = []
        reps = []
        eche = [list(r) for r in image_echelon]
        for v in cocycles:
            residue = reduce_against(v, eche)
            if not all(_is_zero(x) for x in residue):
                lead = next(j for j, x in enumerate(residue) if not _is_zero(x))
                scaled = [x / residue[lead] for x in residue]
                reps.append(scaled)
                eche.append(scaled)
        rep_elements = [alg.from_coords(n, v) for v in reps]
        solver = None
        if reps or image_echelon:
            cols = [list(v) for v in reps] + [list(v) for v in image_echelon]
            colmat = Matrix.from_rows(cols).transpose()
            solver = LinearSolver(colmat)
        data = {
            "basis": basis,
            "betti": len(reps),
            "reps": reps,
            "rep_elements": rep_elements,
            "image_echelon": image_echelon,
            "solver": solver,
        }
        self._degree_data[n] = data
        return data

    def betti(self, n):
        return self._data(n)["betti"]

    def betti_list(self):
        return [self.betti(n) for n in range(self.max_degree + 1)]

    def representatives(self, n):
        return list(self._data(n)["rep_elements"])

    def representative_coords(self, n):
        return [list(v) for v in self._data(n)["reps"]]

    def class_coordinates(self, el: AlgebraElement, check_cocycle=True):
        """Coordinates of [el] in the canonical representative basis of its degree.

        Accepts elements over Q or over Laurent scalars (same generator set).
        """
        n = el.degree()
        if n is None:
            return []
        data = self._data(n)
        if check_cocycle:
            if el.algebra is self.algebra:
                img = self.d.apply(el)
            else:
                key = id(el.algebra)
                if key not in self._twin_differentials:
                    self._twin_differentials[key] = Differential(
                        el.algebra,
                        {g.name: self.d.of_gen(i).promote(el.algebra)
                         for i, g in enumerate(self.algebra.generators)})
                img = self._twin_differentials[key].apply(el)
            if not img.is_zero():
                raise ValueError("not a cocycle")
        vec = el.coords(n)
        if data["solver"] is None:
            if all(_is_zero(x) for x in vec):
                return []
            raise ValueError("nonzero cocycle in a degree with trivial cohomology")
        sol = data["solver"].solve(vec)
        if sol is None:
            raise ValueError("cocycle failed to reduce against representatives")
        return sol[:data["betti"]]

    def cup_product(self, deg_i, idx_i, deg_j, idx_j):
        """Coordinates of [rep_i][rep_j] in degree deg_i + deg_j (cached)."""
        key = (deg_i, idx_i, deg_j, idx_j)
        if key in self._product_cache:
            return self._product_cache[key]
        n = deg_i + deg_j
        if n > self.max_degree:
            raise CutoffExceededError("product degree beyond computed range")
        a = self._data(deg_i)["rep_elements"][idx_i]
        b = self._data(deg_j)["rep_elements"][idx_j]
        coords = self.class_coordinates(a * b, check_cocycle=False)
        self._product_cache[key] = coords
        return coords


def convolve(b1, b2):
    """Degreewise dimension convolution (Kunneth count for tensor products)."""
    out = [0] * (len(b1) + len(b2) - 1)
    for i, x in enumerate(b1):
        for j, y in enumerate(b2):
            out[i + j] += x * y
    return out


def induced_map_on_cohomology(phi: DgaMorphism, d_src: Differential, d_tgt: Differential,
                              h_src: CohomologyRing, h_tgt: CohomologyRing, max_degree):
    """Per-degree matrices of the induced map on cohomology, in the canonical
    representative bases (column j = image of source class j)."""
    phi.check_chain_map(d_src, d_tgt, max_degree)
    mats = []
    for n in range(max_degree + 1):
        cols = []
        for rep in h_src.representatives(n):
            img = phi.apply(rep)
            cols.append(h_tgt.class_coordinates(img, check_cocycle=False))
        nrows = h_tgt.betti(n)
        rows = [[cols[j][i] for j in range(len(cols))] for i in range(nrows)]
        if cols and nrows:
            mats.append(Matrix.from_rows(rows))
        else:
            mats.append(Matrix(nrows, len(cols), tuple(tuple(r) for r in rows)))
    return mats
