"""Canonical JSON reports, text presentation, diffing, and re-verification.

Reports are deterministic: object keys are sorted, ordered data lives in
lists following the fixed monomial enumeration, and scalars are printed in
lowest terms.  Two runs on identical input produce byte-identical files.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .algebra import format_scalar
from .errors import SchemaMismatch
from .matrix_ring import (Monomial, build_quotient, format_monomial,
                          format_poly, format_tag, monomials_of_degree,
                          parse_monomial)
from .presets import cochain_from_json, cochain_to_json

SCHEMA_REPORT = "ncdef-report/1"


def ext_tables(computer, p, degree_bound=None):
    ext1 = [[computer.ext_dimension(i, j, 1, degree_bound)
             for j in range(1, p + 1)] for i in range(1, p + 1)]
    ext2 = [[computer.ext_dimension(i, j, 2, degree_bound)
             for j in range(1, p + 1)] for i in range(1, p + 1)]
    return {"ext1": ext1, "ext2": ext2}


def _products_json(state, order, products):
    table = state.table
    out = []
    for x in monomials_of_degree(table, order):
        if x not in products and x not in state.basis_chain.get(order, []):
            continue
        value = products.get(x, {})
        out.append({
            "monomial": format_monomial(x, table),
            "value": {format_tag(t, table): format_scalar(c)
                      for t, c in sorted(value.items())},
        })
    return out


def relations_json(state):
    table = state.table
    out = []
    for tag, f in state.relations().items():
        out.append({
            "name": format_tag(tag, table),
            "type": [tag.i, tag.j],
            "terms": [{"monomial": [list(a) for a in m.arrows],
                       "coeff": format_scalar(c)}
                      for m, c in sorted(f.terms.items(),
                                         key=lambda mc: mc[0].key(),
                                         reverse=True)],
            "text": format_poly(f, table),
        })
    return out


def build_report(problem, state, tables, checker_block):
    table = state.table
    versal = {}
    for label in state.algebra.monomial_basis():
        phi = state.system.get(label)
        if phi is None or phi.is_zero():
            continue
        versal[format_monomial(label, table)] = cochain_to_json(phi)
    generators = [format_monomial(Monomial.from_arrows([a]), table)
                  for a in table.all_arrows()]
    orders = {str(n): _products_json(state, n, prods)
              for n, prods in sorted(state.products_log.items())}
    stabilized_at = state.max_relation_degree() or 2
    return {
        "schema": SCHEMA_REPORT,
        "problem": problem.to_json(),
        "ext_table": tables,
        "generators": generators,
        "orders": orders,
        "relations": relations_json(state),
        "basis": {str(d): [format_monomial(m, table) for m in mons]
                  for d, mons in sorted(state.basis_chain.items())},
        "versal_family": versal,
        "stabilized": state.stabilized,
        "stabilized_at": stabilized_at if state.stabilized else None,
        "final_order": state.order,
        "certificate": state.certificate,
        "checker": checker_block,
    }


def canonical_json(report):
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def text_presentation(problem, state, tables):
    table = state.table
    lines = []
    lines.append("hull computation: %s" % problem.name)
    lines.append("")
    lines.append("ext^1 dimensions (entry [i][j] = dim Ext^1(M_i, M_j)):")
    for row in tables["ext1"]:
        lines.append("  " + " ".join(str(v) for v in row))
    lines.append("ext^2 dimensions:")
    for row in tables["ext2"]:
        lines.append("  " + " ".join(str(v) for v in row))
    lines.append("")
    gens = [format_monomial(Monomial.from_arrows([a]), table)
            for a in table.all_arrows()]
    lines.append("generators: %s" % (", ".join(gens) if gens else "(none)"))
    rels = state.relations()
    if rels:
        lines.append("relations:")
        for tag, f in rels.items():
            lines.append("  %s: %s" % (format_tag(tag, table),
                                       format_poly(f, table)))
    else:
        lines.append("relations: (none; the hull is the free formal matrix ring)")
    lines.append("")
    if state.stabilized:
        cert = state.certificate or {}
        lines.append("stabilized at order %d (d.d verified zero up to degree %s)"
                     % (state.max_relation_degree() or 2,
                        cert.get("verified_cutoff")))
    else:
        lines.append("NOT stabilized within the order cap (order reached: %d)"
                     % state.order)
    orders = sorted(state.products_log)
    for n in orders:
        nonzero = {x: v for x, v in state.products_log[n].items() if v}
        lines.append("order %d massey products: %d monomials, %d nonzero"
                     % (n, len(state.products_log[n]), len(nonzero)))
        for x, v in sorted(nonzero.items(), key=lambda kv: kv[0].key()):
            parts = " + ".join("%s*%s" % (format_scalar(c), format_tag(t, table))
                               for t, c in sorted(v.items()))
            lines.append("  <%s> = %s" % (format_monomial(x, table), parts))
    return "\n".join(lines) + "\n"


def diff_reports(a, b):
    """Field-level structural diff; empty iff canonical forms are identical."""
    if a.get("schema") != b.get("schema"):
        raise SchemaMismatch("schemas %r and %r differ"
                             % (a.get("schema"), b.get("schema")))
    out = []

    def walk(path, va, vb):
        if isinstance(va, dict) and isinstance(vb, dict):
            for key in sorted(set(va) | set(vb)):
                walk(path + "/" + str(key), va.get(key), vb.get(key))
        elif isinstance(va, list) and isinstance(vb, list):
            if len(va) != len(vb):
                out.append({"path": path + "/#length", "a": len(va), "b": len(vb)})
            for k, (ia, ib) in enumerate(zip(va, vb)):
                walk(path + "/" + str(k), ia, ib)
        elif va != vb:
            out.append({"path": path, "a": va, "b": vb})

    walk("", a, b)
    return out


def verify_report(report, problem=None):
    """Re-check a saved report: relations, versal family, certificate.

    Rebuilds the truncated hull from the stored relations, reads the stored
    versal family back into cochains, and re-runs the flatness check from
    scratch.  Returns (ok, list of messages).
    """
    from .checker import LiftedComplex, verify_lifted_complex
    from .presets import problem_from_json
    from .matrix_ring import GeneratorTable, MatricPoly

    if report.get("schema") != SCHEMA_REPORT:
        raise SchemaMismatch("not a %s document" % SCHEMA_REPORT)
    messages = []
    if problem is None:
        problem = problem_from_json(report["problem"])
    bundle = problem.bundle
    p = bundle.p
    ext1 = report["ext_table"]["ext1"]
    ext2 = report["ext_table"]["ext2"]
    table = GeneratorTable(
        p,
        {(i + 1, j + 1): ext1[i][j] for i in range(p) for j in range(p)},
        {(i + 1, j + 1): ext2[i][j] for i in range(p) for j in range(p)},
    )
    relations = []
    for rel in report["relations"]:
        ti, tj = rel["type"]
        terms = {}
        for term in rel["terms"]:
            mono = Monomial.from_arrows([tuple(a) for a in term["monomial"]])
            terms[mono] = Fraction(term["coeff"])
        relations.append(MatricPoly((ti, tj), terms))
    cert = report.get("certificate") or {}
    cutoff = int(cert.get("verified_cutoff") or
                 (max((f.max_degree() for f in relations), default=2) + 2))
    algebra = build_quotient(table, relations, cutoff + 1)
    cochains = {}
    for name, data in report["versal_family"].items():
        mono = parse_monomial(name, p)
        cochains[mono] = cochain_from_json(bundle, data)
    missing = [format_monomial(m) for m in cochains if m not in algebra.index]
    if missing:
        messages.append("versal monomials not in the rebuilt basis: %s"
                        % ", ".join(missing))
        return False, messages
    lifted = LiftedComplex(algebra, bundle, cochains)
    ok, failure = verify_lifted_complex(lifted)
    if not ok:
        messages.append("flatness fails at %r" % (failure,))
        return False, messages
    messages.append("versal family verifies over the rebuilt quotient "
                    "(cutoff %d)" % cutoff)
    if report.get("stabilized") and not cert.get("reduces_to_zero", True):
        messages.append("certificate contradicts the stabilized flag")
        return False, messages
    return True, messages


# ---------------------------------------------------------------------------
# change-of-basis search for comparing relation sets

def match_up_to_rescaling(rels_a, rels_b, arrows):
    """Diagonal rescalings carrying relation set b onto relation set a.

    Searches scalars lambda per degree-1 generator and mu per relation with
    mu * (rescaled b-relation) = a-relation, where rescaling multiplies each
    monomial coefficient by the product of its arrows' lambdas.  Returns
    (lambda dict, mu dict) or None; any returned answer is re-verified.
    """
    if set(rels_a) != set(rels_b):
        return None
    equations = []
    base_info = {}
    for tag in sorted(rels_a, key=lambda t: (t.i, t.j, t.l)):
        fa, fb = rels_a[tag], rels_b[tag]
        if set(fa.terms) != set(fb.terms):
            return None
        monos = sorted(fa.terms, key=Monomial.key)
        base = monos[0]
        base_ratio = fa.terms[base] / fb.terms[base]
        base_info[tag] = (base, base_ratio)
        for x in monos[1:]:
            ratio = (fa.terms[x] / fb.terms[x]) / base_ratio
            exps = {}
            for a in x.arrows:
                exps[a] = exps.get(a, 0) + 1
            for a in base.arrows:
                exps[a] = exps.get(a, 0) - 1
            exps = {k: v for k, v in exps.items() if v}
            equations.append((exps, ratio))
    rows = []
    for exps, rhs in equations:
        exps = dict(exps)
        for pexps, prhs, pvar in rows:
            e = exps.get(pvar, 0)
            if e:
                q, r = divmod(e, pexps[pvar])
                if r:
                    return None
                for k, v in pexps.items():
                    exps[k] = exps.get(k, 0) - q * v
                exps = {k: v for k, v in exps.items() if v}
                rhs = rhs / prhs ** q
        if not exps:
            if rhs != 1:
                return None
            continue
        pivot = None
        for k in sorted(exps):
            if abs(exps[k]) == 1:
                pivot = k
                break
        if pivot is None:
            return None
        if exps[pivot] == -1:
            exps = {k: -v for k, v in exps.items()}
            rhs = 1 / rhs
        rows.append((exps, rhs, pivot))
    lam = {a: Fraction(1) for a in arrows}
    for exps, rhs, pivot in reversed(rows):
        value = rhs
        for k, v in exps.items():
            if k != pivot:
                value = value / lam[k] ** v
        lam[pivot] = value
    mu = {}
    for tag, (base, base_ratio) in base_info.items():
        scale = Fraction(1)
        for a in base.arrows:
            scale *= lam[a]
        mu[tag] = base_ratio / scale
    # verify: mu * rescale(b) == a
    for tag in rels_a:
        fa, fb = rels_a[tag], rels_b[tag]
        for x, c in fb.terms.items():
            scale = mu[tag]
            for a in x.arrows:
                scale *= lam[a]
            if c * scale != fa.terms[x]:
                return None
    return lam, mu
