"""Deformations as lifted complexes, with independent flatness verification.

A family of 1-cochains indexed by the basis of a pointed algebra R defines
maps of R-matrix free modules; it is an actual complex (d compose d = 0) iff
for every basis element Z and homological index m the structure-constant
weighted sum of matrix products

    sum over pairs (X', X'') with coefficient of Z in X'*X''
        of  alpha(X'')_{m+1} * alpha(X')_m

vanishes.  This file recomputes that condition from raw structure constants
only, making it an independent cross-check of the order-by-order engine.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import NotACocycle, ShapeMismatch, ValidationError
from .linalg import solve_sparse
from .matrix_ring import (GeneratorTable, Monomial, build_quotient, label_sort_key,
                          label_type)
from .yoneda import Cochain, Mat, is_cocycle, multiply, zero_mat


def curvature(algebra, system, bundle):
    """Per-basis-label components of d*d for the lifted differential.

    ``system`` maps basis labels to degree-1 cochains (missing labels count
    as zero; idempotent labels must carry the resolution differentials).
    Returns a dict label -> degree-2 Cochain, omitting zero entries.
    """
    items = []
    for label, phi in system.items():
        if label not in algebra.index:
            continue
        if phi.degree != 1 or phi.type != label_type(label):
            raise ShapeMismatch("cochain for %r has degree %d type %s"
                                % (label, phi.degree, phi.type))
        if not phi.is_zero():
            items.append((algebra.index[label], label, phi))
    acc = {}
    ncomp = bundle.mmax - 1
    for ia, la, ca in items:
        for ib, lb, cb in items:
            if label_type(la)[1] != label_type(lb)[0]:
                continue
            coords = algebra.product(ia, ib)
            if not coords:
                continue
            terms = [cb.mats[m + 1].mul(ca.mats[m]) for m in range(ncomp)]
            if all(t.is_zero() for t in terms):
                continue
            for zidx, coeff in coords.items():
                zlabel = algebra.basis[zidx]
                if zlabel not in acc:
                    zi, zj = label_type(zlabel)
                    acc[zlabel] = [zero_mat(bundle.res(zj).rank(m + 2),
                                            bundle.res(zi).rank(m))
                                   for m in range(ncomp)]
                slot = acc[zlabel]
                for m in range(ncomp):
                    if not terms[m].is_zero():
                        slot[m] = slot[m].add(terms[m].scale(coeff))
    out = {}
    for zlabel, mats in acc.items():
        if any(not m.is_zero() for m in mats):
            zi, zj = label_type(zlabel)
            out[zlabel] = Cochain(bundle, 2, zi, zj, mats)
    return out


class LiftedComplex:
    """A candidate M-free complex over a pointed algebra.

    The idempotent labels must carry the resolution differentials; other
    labels carry arbitrary type-matched 1-cochains (missing means zero).
    """

    def __init__(self, algebra, bundle, cochains):
        self.algebra = algebra
        self.bundle = bundle
        self.cochains = {}
        for i in range(1, algebra.p + 1):
            e = Monomial.idempotent(i)
            want = bundle.differential_cochain(i)
            got = cochains.get(e)
            if got is not None and got != want:
                raise ValidationError("idempotent e%d must carry the resolution "
                                      "differentials" % i)
            self.cochains[e] = want
        for label, phi in cochains.items():
            if isinstance(label, Monomial) and label.degree == 0:
                continue
            if phi.degree != 1 or phi.type != label_type(label):
                raise ShapeMismatch("cochain for %r mistyped" % (label,))
            self.cochains[label] = phi

    def system(self):
        return dict(self.cochains)


def verify_lifted_complex(complex_):
    """Check the flatness condition; returns (ok, first_failure_or_None)."""
    curv = curvature(complex_.algebra, complex_.system(), complex_.bundle)
    if not curv:
        return True, None
    failures = sorted(curv, key=label_sort_key)
    z = failures[0]
    m = next(m for m, mat in enumerate(curv[z].mats) if not mat.is_zero())
    return False, (z, m)


def test_algebra_deformation(cocycle, bundle, p=None):
    """Lifted complex over the one-arrow test algebra defined by a 1-cocycle.

    The test algebra for the pair (a, b) is the free matrix ring on a single
    generator of that type modulo the square of its radical; flatness is
    equivalent to the cocycle condition, checked up front.
    """
    if cocycle.degree != 1:
        raise ShapeMismatch("test-algebra deformations take 1-cochains")
    if not is_cocycle(cocycle):
        raise NotACocycle("test-algebra deformations need a cocycle")
    p = p or bundle.p
    a, b = cocycle.type
    table = GeneratorTable(p, {(a, b): 1})
    algebra = build_quotient(table, [], 2)
    eps = Monomial.from_arrows([(a, b, 1)])
    return LiftedComplex(algebra, bundle, {eps: cocycle})


# the name follows the operation it implements; it is not a test case
test_algebra_deformation.__test__ = False


def equivalence_check(c1, c2, degree_bound=4, retry_step=2, max_bound=12):
    """Search for an M-free isomorphism over R intertwining two complexes.

    The unknown is a family of degree-0 cochains q(X) over the radical
    basis, extended by the identity on idempotents; the chain-map condition
    is a linear system solved with bounded-degree entries.  A True answer is
    exact; False certifies no intertwiner with entries up to max_bound.
    """
    if c1.algebra is not c2.algebra and c1.algebra.basis != c2.algebra.basis:
        raise ValidationError("complexes live over different algebras")
    algebra = c1.algebra
    bundle = c1.bundle
    pres = bundle.pres
    mmax = bundle.mmax
    sys1 = c1.system()
    sys2 = c2.system()
    unknown_labels = [lab for lab in algebra.basis
                      if not (isinstance(lab, Monomial) and lab.degree == 0)]
    bound = degree_bound
    while True:
        words = pres.normal_words(bound)
        equations = {}

        def emit(eq_key, var_key, coeff):
            row = equations.setdefault(eq_key, [{}, Fraction(0)])
            cur = row[0].get(var_key, Fraction(0)) + coeff
            if cur:
                row[0][var_key] = cur
            else:
                row[0].pop(var_key, None)

        def emit_rhs(eq_key, value):
            row = equations.setdefault(eq_key, [{}, Fraction(0)])
            row[1] += value

        for zidx, zlabel in enumerate(algebra.basis):
            zi, zj = label_type(zlabel)
            for aidx, alabel in enumerate(algebra.basis):
                for bidx, blabel in enumerate(algebra.basis):
                    coeff_map = algebra.product(aidx, bidx)
                    coeff = coeff_map.get(zidx)
                    if not coeff:
                        continue
                    # term alpha1(X'')_m * q(X')_m  minus  q(X'')_{m+1} * alpha2(X')_m
                    ai, at = label_type(alabel)
                    ti, tj = label_type(blabel)
                    a_id = isinstance(alabel, Monomial) and alabel.degree == 0
                    b_id = isinstance(blabel, Monomial) and blabel.degree == 0
                    phi1 = sys1.get(blabel)
                    phi2 = sys2.get(alabel)
                    for m in range(mmax):
                        rows_out = bundle.res(zj).rank(m + 1)
                        cols_out = bundle.res(zi).rank(m)
                        if rows_out == 0 or cols_out == 0:
                            continue
                        # alpha1(b)_m * q(a)_m
                        if phi1 is not None and not phi1.mats[m].is_zero():
                            if a_id:
                                for (r, t), v in phi1.mats[m].entries.items():
                                    for w, cf in v.terms.items():
                                        emit_rhs((zidx, m, r, t, w), -coeff * cf)
                            else:
                                for (r, t), v in phi1.mats[m].entries.items():
                                    for c in range(cols_out):
                                        for w in words:
                                            prod = multiply(v, pres.element({w: 1}))
                                            for w2, cf in prod.terms.items():
                                                emit((zidx, m, r, c, w2),
                                                     ("q", aidx, m, t, c, w),
                                                     coeff * cf)
                        # - q(b)_{m+1} * alpha2(a)_m
                        if phi2 is not None and not phi2.mats[m].is_zero():
                            if b_id:
                                for (t, c), v in phi2.mats[m].entries.items():
                                    for w, cf in v.terms.items():
                                        emit_rhs((zidx, m, t, c, w), coeff * cf)
                            else:
                                for (t, c), v in phi2.mats[m].entries.items():
                                    for r in range(bundle.res(zj).rank(m + 1)):
                                        for w in words:
                                            prod = multiply(pres.element({w: 1}), v)
                                            for w2, cf in prod.terms.items():
                                                emit((zidx, m, r, c, w2),
                                                     ("q", bidx, m + 1, r, t, w),
                                                     -coeff * cf)
        system = []
        for key in sorted(equations):
            coeffs, rhs = equations[key]
            if coeffs or rhs:
                system.append((coeffs, rhs))
        sol = solve_sparse(system)
        if sol is not None and _verify_intertwiner(c1, c2, sol, unknown_labels):
            return True
        if bound >= max_bound:
            return False
        bound = min(bound + retry_step, max_bound)


def _verify_intertwiner(c1, c2, sol, unknown_labels):
    bundle = c1.bundle
    algebra = c1.algebra
    pres = bundle.pres
    mmax = bundle.mmax
    qmats = {}
    for lab in unknown_labels:
        li, lj = label_type(lab)
        lidx = algebra.index[lab]
        mats = []
        for m in range(mmax + 1):
            entries = {}
            for var, cf in sol.items():
                if var[0] == "q" and var[1] == lidx and var[2] == m:
                    _, _, _, r, c, w = var
                    cur = entries.get((r, c), pres.zero())
                    entries[(r, c)] = cur + pres.element({w: cf})
            mats.append(Mat(bundle.res(lj).rank(m), bundle.res(li).rank(m), entries))
        qmats[lab] = mats

    def qmat(label, m):
        if isinstance(label, Monomial) and label.degree == 0:
            rank = bundle.res(label.i).rank(m)
            return Mat(rank, rank, {(t, t): pres.one() for t in range(rank)})
        return qmats[label][m]

    sys1 = c1.system()
    sys2 = c2.system()
    for zidx, zlabel in enumerate(algebra.basis):
        zi, zj = label_type(zlabel)
        for m in range(mmax):
            total = zero_mat(bundle.res(zj).rank(m + 1), bundle.res(zi).rank(m))
            for aidx, alabel in enumerate(algebra.basis):
                for bidx, blabel in enumerate(algebra.basis):
                    coeff = algebra.product(aidx, bidx).get(zidx)
                    if not coeff:
                        continue
                    phi1 = sys1.get(blabel)
                    if phi1 is not None:
                        total = total.add(
                            phi1.mats[m].mul(qmat(alabel, m)).scale(coeff))
                    phi2 = sys2.get(alabel)
                    if phi2 is not None:
                        total = total.add(
                            qmat(blabel, m + 1).mul(phi2.mats[m]).scale(-coeff))
            if not total.is_zero():
                return False
    return True
