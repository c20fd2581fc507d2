"""Fiber side of the lattice audit: the weight-times-unipotent action on the
nilradical's dual complex, its induced matrices on cohomology, triangularity
certificates, the maximal nilpotent submodule, and its presentation by
generators and relations."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .exactla import (
    Laurent,
    LinearSolver,
    Matrix,
    checked_kernel,
    exp_nilpotent,
    kernel_basis,
    reduce_against,
    _is_zero,
)
from .gca import (
    AlgebraElement,
    CohomologyRing,
    Differential,
    DgaMorphism,
    FreeCGA,
    GeneratorDecl,
)
from .liealg import LieAlgebra, WeightVector, ce_complex


class NotTriangularError(ValueError):
    def __init__(self, degree, row, col):
        super().__init__(f"induced matrix not triangular at degree {degree}, entry ({row},{col})")
        self.degree = degree
        self.row = row
        self.col = col


class InsufficientCutoffError(ValueError):
    pass


class SubmoduleClosureError(RuntimeError):
    pass


@dataclass(frozen=True)
class FiberActionSpec:
    """Diagonal weights from a verified splitting plus an optional unipotent
    twist parameter R (coordinates in the nilradical basis, default zero)."""

    weights: tuple
    twist: tuple = None

    @staticmethod
    def make(weights: WeightVector | tuple, twist=None):
        w = tuple(weights.weights) if isinstance(weights, WeightVector) else tuple(weights)
        return FiberActionSpec(w, tuple(twist) if twist is not None else None)


@dataclass
class BasisClass:
    """One entry of the ordered product basis of H*(n): a named cochain product
    with its weight and its coordinates in the canonical representative basis."""

    name: str
    degree: int
    weight: Fraction
    element: object          # cocycle in the rational CE algebra
    coords: list             # coordinates in canonical representatives
    from_products: bool = True


class FiberAction:
    """The automorphism eta of (Lambda n*, delta) over Laurent scalars together
    with its induced per-degree matrices on cohomology, written in the ordered
    product basis."""

    def __init__(self, n: LieAlgebra, spec: FiberActionSpec, basis_plan=None, max_degree=None):
        self.n = n
        self.spec = spec
        self.max_degree = n.dim if max_degree is None else max_degree
        self.algebra, self.d = ce_complex(n)
        self.cohomology = CohomologyRing(self.algebra, self.d, self.max_degree)
        self.weights = tuple(Fraction(w) for w in spec.weights)
        if len(self.weights) != n.dim:
            raise ValueError("one weight per basis vector of the fiber algebra")
        twist = spec.twist if spec.twist is not None else tuple(Fraction(0) for _ in range(n.dim))
        if len(twist) != n.dim:
            raise ValueError("twist must be a coordinate vector in the fiber algebra")
        self.twist = tuple(Fraction(t) for t in twist)
        self._build_eta()
        self.basis = _product_basis(self.cohomology, self.weights, self.max_degree, basis_plan)
        self._basis_solvers = {}
        self._matrices = {}

    # -- the automorphism ---------------------------------------------------

    def _build_eta(self):
        n = self.n
        ad_r = n.ad_vector(self.twist)
        alpha = exp_nilpotent(ad_r)  # raises NotNilpotentError for a bad twist
        self.alpha_matrix = alpha
        self.laurent_algebra = self.algebra.laurent_twin()
        la = self.laurent_algebra
        names = [g.name for g in self.algebra.generators]
        images = {}
        for i in range(n.dim):
            terms = {}
            for j in range(n.dim):
                a = alpha.data[i][j]
                if a == 0:
                    continue
                w = self.weights[j]
                if w.denominator != 1:
                    raise ValueError("weights must be integers to exponentiate formally")
                terms[((j, 1),)] = Laurent({int(w): a})
            images[names[i]] = AlgebraElement(la, terms)
        self.eta = DgaMorphism(la, la, images)
        d_laurent = Differential(
            la, {g.name: self.d.of_gen(i).promote(la)
                 for i, g in enumerate(self.algebra.generators)})
        self.d_laurent = d_laurent
        self.eta.check_chain_map(d_laurent, d_laurent)

    # -- induced matrices in the ordered basis --------------------------------

    def _solver(self, k):
        if k not in self._basis_solvers:
            cols = [bc.coords for bc in self.basis[k]]
            mat = Matrix.from_rows(cols).transpose() if cols else Matrix(0, 0, ())
            self._basis_solvers[k] = LinearSolver(mat) if cols else None
        return self._basis_solvers[k]

    def induced_matrix(self, k) -> Matrix:
        """Matrix of the induced map on H^k: column j holds the coordinates of
        the image of basis class j in the ordered product basis."""
        if k in self._matrices:
            return self._matrices[k]
        classes = self.basis[k]
        solver = self._solver(k)
        cols = []
        for bc in classes:
            img = self.eta.apply(bc.element.promote(self.laurent_algebra))
            canon = self.cohomology.class_coordinates(img, check_cocycle=False)
            coords = solver.solve(canon)
            if coords is None:
                raise SubmoduleClosureError("image left the span of the basis")
            cols.append(coords)
        rows = [[cols[j][i] for j in range(len(cols))] for i in range(len(cols))]
        m = Matrix.from_rows(rows) if cols else Matrix(0, 0, ())
        self._matrices[k] = m
        return m


def _product_basis(H: CohomologyRing, weights, max_degree, plan=None):
    """Ordered basis of H* by products of indecomposable classes.

    Degrees listed in an explicit plan are taken verbatim; higher degrees are
    filled greedily with products (indecomposable of maximal degree) x (already
    ordered class of lower degree), ties broken by listing order. Generator
    weights are summed to give each class its weight.
    """
    alg = H.algebra
    gen_weight = {i: Fraction(weights[i]) for i in range(len(alg.generators))}

    def monomial_weight(mono):
        return sum((gen_weight[i] * e for i, e in mono), Fraction(0))

    def element_weight(el):
        ws = {monomial_weight(m) for m in el.terms}
        if len(ws) != 1:
            raise ValueError("basis class is not weight-homogeneous")
        return ws.pop()

    def class_from_monomial(gen_names):
        el = alg.one()
        for nm in gen_names:
            el = el * alg.gen(nm)
        return el

    basis = {0: [BasisClass("1", 0, Fraction(0), alg.one(),
                            H.class_coordinates(alg.one(), check_cocycle=False),
                            from_products=False)]}
    plan = plan or {}
    echelons = {}

    def try_add(k, name, el, eche, out):
        coords = H.class_coordinates(el, check_cocycle=True)
        residue = reduce_against(list(coords), eche)
        if all(_is_zero(x) for x in residue):
            return False
        lead = next(j for j, x in enumerate(residue) if not _is_zero(x))
        eche.append([x / residue[lead] for x in residue])
        out.append(BasisClass(name, k, element_weight(el), el, list(coords)))
        return True

    # explicitly planned degrees
    for k in sorted(plan):
        out, eche = [], []
        for gen_names in plan[k]:
            el = class_from_monomial(gen_names)
            name = "[" + "".join(gen_names) + "]"
            if not try_add(k, name, el, eche, out):
                raise ValueError(f"planned class {name} is dependent or exact")
        if len(out) != H.betti(k):
            raise ValueError(f"plan for degree {k} does not span H^{k}")
        basis[k] = out
        echelons[k] = eche

    # remaining degrees, lowest first
    for k in range(1, max_degree + 1):
        if k in basis:
            continue
        target = H.betti(k)
        out, eche = [], []
        if target == 0:
            basis[k] = out
            continue
        # canonical representatives seed degree 1 (no products available)
        if k == 1:
            for idx, rep in enumerate(H.representatives(1)):
                nm = "[" + "+".join(alg.monomial_name(m) for m in sorted(rep.terms, key=alg._explode)) + "]"
                try_add(1, nm, rep, eche, out)
            basis[1] = out
            continue
        indec = _indecomposables(H, basis, k)
        for m in sorted(indec, reverse=True):
            for p_name, p_el in indec[m]:
                lower = basis.get(k - m, [])
                for q in lower:
                    if len(out) == target:
                        break
                    candidate = p_el * q.element
                    if candidate.is_zero():
                        continue
                    name = p_name + (q.name if q.degree > 0 else "")
                    try_add(k, name, candidate, eche, out)
                if len(out) == target:
                    break
            if len(out) == target:
                break
        if len(out) < target:
            # leftovers are genuinely new indecomposable classes
            for rep in H.representatives(k):
                if len(out) == target:
                    break
                nm = "[" + "+".join(alg.monomial_name(m) for m in sorted(rep.terms, key=alg._explode)) + "]"
                try_add(k, nm, rep, eche, out)
        if len(out) != target:
            raise ValueError(f"could not complete the degree-{k} basis")
        basis[k] = out
    return basis


def _indecomposables(H: CohomologyRing, basis, upto):
    """Ordered basis entries of each degree < upto that are not products,
    as (name, element) pairs keyed by degree."""
    out = {}
    for m in range(1, upto):
        if m not in basis or not basis[m]:
            continue
        prod_eche = []
        for a in range(1, m):
            b = m - a
            for p in basis.get(a, []):
                for q in basis.get(b, []):
                    el = p.element * q.element
                    if el.is_zero():
                        continue
                    coords = H.class_coordinates(el, check_cocycle=False)
                    residue = reduce_against(list(coords), prod_eche)
                    if not all(_is_zero(x) for x in residue):
                        lead = next(j for j, x in enumerate(residue) if not _is_zero(x))
                        prod_eche.append([x / residue[lead] for x in residue])
        entries = []
        for bc in basis[m]:
            residue = reduce_against(list(bc.coords), prod_eche)
            if not all(_is_zero(x) for x in residue):
                entries.append((bc.name, bc.element))
                lead = next(j for j, x in enumerate(residue) if not _is_zero(x))
                prod_eche.append([x / residue[lead] for x in residue])
        if entries:
            out[m] = entries
    return out


def bg_basis_plan():
    """Listing order for degrees 1 and 2 of the seven-dimensional nilradical:
    the central dual generator first, then the two Heisenberg blocks in their
    published listing order, with central products trailing."""
    return {
        1: [("t",), ("x1",), ("y1",), ("x2",), ("y2",)],
        2: [("x1", "z1"), ("y1", "z1"), ("x1", "x2"), ("x1", "y2"),
            ("y1", "x2"), ("y1", "y2"), ("x2", "z2"), ("y2", "z2"),
            ("t", "x1"), ("t", "y1"), ("t", "x2"), ("t", "y2")],
    }


# ---------------------------------------------------------------------------
# Triangularity certificate
# ---------------------------------------------------------------------------

@dataclass
class TriangularCertificate:
    """Per degree: the ordered class names, the verified matrix (columns are
    images, entries below the diagonal all zero) and the Laurent diagonal."""

    order: dict
    matrices: dict
    diagonals: dict
    weights: dict

    def diagonal_is_weight_monomial(self):
        for k, diag in self.diagonals.items():
            for idx, entry in enumerate(diag):
                w = self.weights[k][idx]
                mono = entry.monomial()
                if mono is None or mono[1] != 1 or mono[0] != w:
                    return False
        return True


def certify_triangular(action: FiberAction) -> TriangularCertificate:
    """Verify that every induced matrix is upper triangular in the ordered
    product basis (column convention: the image of class j involves classes
    i <= j only) and extract the diagonal."""
    order, matrices, diagonals, weights = {}, {}, {}, {}
    for k in range(action.max_degree + 1):
        m = action.induced_matrix(k)
        size = len(action.basis[k])
        for i in range(size):
            for j in range(size):
                if i > j and not _is_zero(m.data[i][j]):
                    raise NotTriangularError(k, i, j)
        order[k] = [bc.name for bc in action.basis[k]]
        matrices[k] = m
        diagonals[k] = [m.data[i][i] for i in range(size)]
        weights[k] = [int(bc.weight) if bc.weight.denominator == 1 else bc.weight
                      for bc in action.basis[k]]
    return TriangularCertificate(order, matrices, diagonals, weights)


# ---------------------------------------------------------------------------
# Maximal nilpotent submodule
# ---------------------------------------------------------------------------

@dataclass
class NilpotentSubmodule:
    """Per degree: the basis of the largest submodule on which the action is
    unipotent (coordinates in the ordered product basis), plus the induced
    product table."""

    action: FiberAction
    basis_coords: dict       # degree -> list of coordinate vectors
    basis_names: dict        # degree -> display names
    diag_one_positions: dict
    product_table: dict      # (deg_i, idx_i, deg_j, idx_j) -> coords in U basis

    def dims(self):
        return [len(self.basis_coords.get(k, []))
                for k in range(self.action.max_degree + 1)]


def max_nilpotent_submodule(action: FiberAction, cert: TriangularCertificate) -> NilpotentSubmodule:
    """Per degree, the generalized eigenvalue-1 eigenspace of the induced matrix
    over Q(nu), with ranks cross-checked at nu -> 2, 3; closure of the result
    under cup products is verified exactly."""
    H = action.cohomology
    basis_coords, basis_names, diag_positions = {}, {}, {}
    for k in range(action.max_degree + 1):
        m = action.induced_matrix(k)
        size = len(action.basis[k])
        if size == 0:
            basis_coords[k], basis_names[k], diag_positions[k] = [], [], []
            continue
        one = Laurent(1)
        shifted = m - Matrix.identity(size, one=one, zero=Laurent())
        power = shifted
        vecs = checked_kernel(power)
        for _ in range(size - 1):
            nxt = power * shifted
            vecs_next = checked_kernel(nxt)
            if len(vecs_next) == len(vecs):
                break
            power, vecs = nxt, vecs_next
        coords = [_defrac(v) for v in vecs]
        basis_coords[k] = coords
        diag_positions[k] = [i for i, d in enumerate(cert.diagonals[k]) if d.is_one()]
        if len(coords) != len(diag_positions[k]):
            raise SubmoduleClosureError(
                f"degree {k}: eigenspace dimension {len(coords)} does not match "
                f"the {len(diag_positions[k])} unit diagonal entries")
        names = []
        for v in coords:
            support = [i for i, x in enumerate(v) if not _is_zero(x)]
            if len(support) == 1 and v[support[0]] == Fraction(1):
                names.append(action.basis[k][support[0]].name)
            else:
                names.append("+".join(action.basis[k][i].name for i in support))
        basis_names[k] = names
    table = _product_table(action, basis_coords)
    return NilpotentSubmodule(action, basis_coords, basis_names, diag_positions, table)


def _defrac(vec):
    """Clear fraction-field denominators; pipeline vectors come out rational."""
    out = []
    for x in vec:
        if hasattr(x, "num") and hasattr(x, "den"):
            if not x.den.is_one():
                return list(vec)
            mono = x.num.monomial()
            if mono is not None and mono[0] == 0:
                out.append(mono[1])
            elif x.num.is_zero():
                out.append(Fraction(0))
            else:
                out.append(x.num)
        else:
            out.append(x)
    return out


def _product_table(action: FiberAction, basis_coords):
    """Cup products of submodule basis classes, expanded back in the submodule
    basis; a product escaping the span is a closure failure and aborts."""
    H = action.cohomology
    table = {}
    max_degree = action.max_degree
    solvers = {}
    for k, coords in basis_coords.items():
        if coords:
            solvers[k] = LinearSolver(Matrix.from_rows(coords).transpose())
    for di, ci in sorted(basis_coords.items()):
        for ii, vi in enumerate(ci):
            ei = _combine(action, di, vi)
            for dj, cj in sorted(basis_coords.items()):
                if di + dj > max_degree:
                    continue
                for jj, vj in enumerate(cj):
                    ej = _combine(action, dj, vj)
                    prod = ei * ej
                    if prod.is_zero():
                        table[(di, ii, dj, jj)] = [Fraction(0)] * len(basis_coords.get(di + dj, []))
                        continue
                    canon = H.class_coordinates(prod, check_cocycle=False)
                    target = basis_coords.get(di + dj, [])
                    if all(_is_zero(x) for x in canon):
                        table[(di, ii, dj, jj)] = [Fraction(0)] * len(target)
                        continue
                    in_basis = action._solver(di + dj).solve(canon)
                    if in_basis is None:
                        raise SubmoduleClosureError("product left the cohomology basis span")
                    solver = solvers.get(di + dj)
                    sol = solver.solve(in_basis) if solver else None
                    if sol is None:
                        raise SubmoduleClosureError(
                            f"product of degree ({di},{dj}) classes left the submodule")
                    table[(di, ii, dj, jj)] = sol
    return table


def _combine(action: FiberAction, degree, coords):
    """Coordinate vector in the ordered product basis back to a cochain."""
    el = action.algebra.zero()
    for i, x in enumerate(coords):
        if not _is_zero(x):
            el = el + x * action.basis[degree][i].element
    return el


# ---------------------------------------------------------------------------
# Presentation by generators and relations
# ---------------------------------------------------------------------------

@dataclass
class AlgebraPresentation:
    """Indecomposables of the submodule per degree plus, per degree, a basis of
    the kernel of the free cover on those generators."""

    generator_names: dict      # degree -> list of names
    generator_indices: dict    # degree -> list of U-basis indices (by coords)
    generator_coords: dict     # degree -> list of coordinate vectors in U basis
    relations: dict            # degree -> list of free-cover elements
    free_cover: object         # FreeCGA on the generators
    cover_map: dict            # free-cover monomial -> U coords (per degree)
    decomposable_span: dict    # degree -> echelon rows of (U+ . U+)

    def generator_counts(self):
        return {k: len(v) for k, v in self.generator_names.items() if v}

    def relation_counts(self):
        return {k: len(v) for k, v in self.relations.items() if v}


def presentation(U: NilpotentSubmodule, cutoff=None) -> AlgebraPresentation:
    action = U.action
    cutoff = action.max_degree if cutoff is None else cutoff
    dims = U.dims()
    # indecomposables: complement of the span of positive-degree products
    gen_names, gen_coords, gen_indices, dec_span = {}, {}, {}, {}
    for k in range(1, cutoff + 1):
        nk = dims[k] if k < len(dims) else 0
        if nk == 0:
            gen_names[k], gen_coords[k], gen_indices[k] = [], [], []
            dec_span[k] = []
            continue
        eche = []
        for a in range(1, k):
            b = k - a
            for ia in range(dims[a] if a < len(dims) else 0):
                for ib in range(dims[b] if b < len(dims) else 0):
                    v = U.product_table.get((a, ia, b, ib))
                    if v is None or all(_is_zero(x) for x in v):
                        continue
                    residue = reduce_against(list(v), eche)
                    if not all(_is_zero(x) for x in residue):
                        lead = next(j for j, x in enumerate(residue) if not _is_zero(x))
                        eche.append([x / residue[lead] for x in residue])
        dec_span[k] = [list(r) for r in eche]
        names, coords, indices = [], [], []
        for i in range(nk):
            unit = [Fraction(1) if t == i else Fraction(0) for t in range(nk)]
            residue = reduce_against(list(unit), eche)
            if not all(_is_zero(x) for x in residue):
                names.append(U.basis_names[k][i])
                coords.append(unit)
                indices.append(i)
                lead = next(j for j, x in enumerate(residue) if not _is_zero(x))
                eche.append([x / residue[lead] for x in residue])
        gen_names[k], gen_coords[k], gen_indices[k] = names, coords, indices

    decls = []
    gen_site = []
    for k in sorted(gen_names):
        for pos, nm in enumerate(gen_names[k]):
            decls.append(GeneratorDecl(f"g{len(decls)}", k))
            gen_site.append((k, gen_indices[k][pos]))
    cover = FreeCGA(decls, cutoff=cutoff, domain="Q")

    # evaluate free-cover monomials in U
    def eval_monomial(mono):
        deg = cover.monomial_degree(mono)
        acc_deg, acc = 0, None
        for gi, e in mono:
            for _ in range(e):
                site_deg, site_idx = gen_site[gi]
                if acc is None:
                    acc_deg, acc = site_deg, [
                        Fraction(1) if t == site_idx else Fraction(0)
                        for t in range(dims[site_deg])]
                else:
                    acc = _mult_coords(U, acc_deg, acc, site_deg, site_idx)
                    acc_deg = acc_deg + site_deg
                    if all(_is_zero(x) for x in acc):
                        return acc_deg, acc
        return (acc_deg, acc) if acc is not None else (0, [Fraction(1)])

    cover_map = {}
    relations = {}
    for k in range(1, cutoff + 1):
        basis = cover.monomial_basis(k)
        nk = dims[k] if k < len(dims) else 0
        cols = []
        for mono in basis:
            _, v = eval_monomial(mono)
            v = v if v is not None else []
            v = list(v) + [Fraction(0)] * (nk - len(v))
            cover_map[mono] = v
            cols.append(v[:nk])
        if not basis:
            relations[k] = []
            continue
        rows = [[cols[j][i] for j in range(len(basis))] for i in range(nk)]
        mat = Matrix.from_rows(rows) if nk else Matrix(0, len(basis), ())
        kern = kernel_basis(mat)
        relations[k] = [cover.from_coords(k, v) for v in kern]
    return AlgebraPresentation(gen_names, gen_indices, gen_coords, relations,
                               cover, cover_map, dec_span)


def _mult_coords(U: NilpotentSubmodule, deg_a, coords_a, deg_b, idx_b):
    """(sum coords_a . basis_a) * basis_b, in U coordinates."""
    target = len(U.basis_coords.get(deg_a + deg_b, []))
    out = [Fraction(0)] * target
    for ia, x in enumerate(coords_a):
        if _is_zero(x):
            continue
        v = U.product_table.get((deg_a, ia, deg_b, idx_b))
        if v is None:
            continue
        for t in range(target):
            out[t] += x * v[t]
    return out


# ---------------------------------------------------------------------------
# Star-list audit
# ---------------------------------------------------------------------------

CLAIMED_STAR_CLASSES = (
    ("x1", "z1"),
    ("x1", "x2"),
    ("y1", "y2"),
    ("x2", "z2"),
    ("y1", "z1", "y2", "z2"),
    ("x1", "y1", "z1", "y2"),
    ("y1", "x2", "y2", "z2"),
)


@dataclass
class StarListAudit:
    """Computed diagonal-1 classes against the claimed seven-entry list."""

    computed: list            # (degree, name, central_free: bool)
    matched: list             # (claimed name, computed name)
    extra_computed: list      # computed central-free entries with no claimed match
    missing_claimed: list     # claimed entries not found (expected empty)

    @property
    def symmetric_difference(self):
        return list(self.extra_computed) + list(self.missing_claimed)


def audit_star_list(action: FiberAction, cert: TriangularCertificate,
                    claimed=CLAIMED_STAR_CLASSES, central_gen="t") -> StarListAudit:
    """Classes with diagonal entry identically 1, in positive degree, compared
    with the claimed list by exact proportionality of class coordinates.

    Entries containing the central dual generator are reported but matched
    separately (the claimed list concerns the complementary block)."""
    H = action.cohomology
    alg = action.algebra
    central = alg.gen_index(central_gen) if central_gen in [g.name for g in alg.generators] else None
    computed = []
    computed_vecs = []
    for k in range(1, action.max_degree + 1):
        diag = cert.diagonals[k]
        for i, d in enumerate(diag):
            if d.is_one():
                bc = action.basis[k][i]
                central_free = central is None or all(
                    central not in [g for g, _ in m] for m in bc.element.terms)
                computed.append((k, bc.name, central_free))
                computed_vecs.append((k, i, bc, central_free))
    matched, missing = [], []
    used = set()
    for gen_names in claimed:
        el = alg.one()
        for nm in gen_names:
            el = el * alg.gen(nm)
        k = el.degree()
        coords = H.class_coordinates(el, check_cocycle=True)
        hit = None
        for (kk, i, bc, _free) in computed_vecs:
            if kk != k or (kk, i) in used:
                continue
            if _proportional(coords, bc.coords):
                hit = (kk, i, bc)
                break
        label = "[" + "".join(gen_names) + "]"
        if hit is None:
            missing.append(label)
        else:
            used.add((hit[0], hit[1]))
            matched.append((label, hit[2].name))
    extra = [(k, bc.name) for (k, i, bc, free) in computed_vecs
             if (k, i) not in used and free]
    return StarListAudit(computed, matched, extra, missing)


def _proportional(u, v):
    pivot = None
    for a, b in zip(u, v):
        az, bz = _is_zero(a), _is_zero(b)
        if az != bz:
            return False
        if not az:
            ratio = a / b
            if pivot is None:
                pivot = ratio
            elif ratio != pivot:
                return False
    return pivot is not None
