"""Associative algebras presented by generators and a rewriting system.

An algebra element is kept as a sparse map from normal-form words to exact
rational coefficients.  A word is normal when no adjacent generator pair is
the left side of a rewrite rule; every rule rewrites a length-2 word into a
linear combination of words of no larger degree, so exhaustive rewriting
terminates for the shipped presets (a step budget guards user presentations).

The built-in preset ``weyl2`` is the second Weyl algebra k[x,y]<Dx,Dy> with
[Dx,x] = [Dy,y] = 1, generators ordered x < y < Dx < Dy so that normal words
are the nondecreasing (PBW) ones.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .errors import DegreeOverflow, StepBudgetExceeded, UnsupportedIdeal, ValidationError

Word = tuple  # tuple of generator names

DEFAULT_STEP_BUDGET = 10**6


class AlgebraPresentation:
    """Generators, rewrite rules and degree weights of an algebra."""

    def __init__(self, generators, rules, weights=None, step_budget=DEFAULT_STEP_BUDGET,
                 name=None):
        self.generators = list(generators)
        if len(set(self.generators)) != len(self.generators):
            raise ValidationError("duplicate generator names")
        self.gen_index = {g: k for k, g in enumerate(self.generators)}
        self.weights = dict(weights) if weights else {g: 1 for g in self.generators}
        for g in self.generators:
            w = self.weights.setdefault(g, 1)
            if not isinstance(w, int) or w < 0:
                raise ValidationError("generator weights must be nonnegative integers")
        self.step_budget = step_budget
        self.name = name
        self.rules = {}
        for lhs, rhs in rules:
            lhs = tuple(lhs)
            if len(lhs) != 2 or any(g not in self.gen_index for g in lhs):
                raise ValidationError("rule left sides must be two-generator words")
            terms = [(tuple(w), Fraction(c)) for w, c in rhs]
            lhs_deg = self.word_degree(lhs)
            for w, _ in terms:
                if any(g not in self.gen_index for g in w):
                    raise ValidationError("rule right side uses unknown generator")
                if self.word_degree(w) > lhs_deg:
                    raise ValidationError("rule right side has larger degree than left side")
            self.rules[lhs] = terms
        self._nf_cache = {}
        self._word_cache = {}

    def word_degree(self, word):
        return sum(self.weights[g] for g in word)

    def word_key(self, word):
        return (self.word_degree(word), tuple(self.gen_index[g] for g in word))

    def zero(self):
        return AlgebraElement(self, {})

    def one(self):
        return AlgebraElement(self, {(): Fraction(1)})

    def gen(self, name):
        if name not in self.gen_index:
            raise ValidationError("unknown generator %r" % name)
        return AlgebraElement(self, {(name,): Fraction(1)})

    def element(self, terms):
        out = {}
        for w, c in terms.items():
            c = Fraction(c)
            if c:
                out[tuple(w)] = c
        return AlgebraElement(self, out)

    def is_normal(self, word):
        return all((word[k], word[k + 1]) not in self.rules for k in range(len(word) - 1))

    def normal_words(self, max_degree):
        """All normal words of degree <= max_degree, in (degree, lex) order."""
        key = max_degree
        if key in self._word_cache:
            return self._word_cache[key]
        by_degree = {0: [()]}
        frontier = [()]
        # weight-0 generators would make degree layers infinite
        if any(self.weights[g] == 0 for g in self.generators):
            raise ValidationError("normal word enumeration needs positive weights")
        deg = 0
        words = [()]
        while frontier:
            new = []
            for w in frontier:
                for g in self.generators:
                    if w and (w[-1], g) in self.rules:
                        continue
                    w2 = w + (g,)
                    if self.word_degree(w2) <= max_degree:
                        new.append(w2)
            frontier = new
            words.extend(new)
            deg += 1
            if deg > max_degree:
                break
        words.sort(key=self.word_key)
        self._word_cache[key] = words
        return words

    def parse(self, text):
        return parse_element(self, text)

    def to_json(self):
        return {
            "generators": list(self.generators),
            "rules": sorted(
                ["*".join(lhs), format_terms(self, dict(rhs))]
                for lhs, rhs in self.rules.items()
            ),
            "weights": dict(self.weights),
        }

    @staticmethod
    def from_json(data):
        rules = []
        probe = AlgebraPresentation(data["generators"], [], data.get("weights"))
        for lhs_text, rhs_text in data.get("rules", []):
            lhs = tuple(lhs_text.split("*"))
            rhs_elem = parse_element(probe, rhs_text, allow_reducible=True)
            rules.append((lhs, list(rhs_elem.terms.items())))
        return AlgebraPresentation(data["generators"], rules, data.get("weights"))


class AlgebraElement:
    """Sparse normal-form linear combination of words; immutable by convention."""

    __slots__ = ("pres", "terms")

    def __init__(self, pres, terms):
        self.pres = pres
        self.terms = terms

    def is_zero(self):
        return not self.terms

    def degree(self):
        if not self.terms:
            return -1
        return max(self.pres.word_degree(w) for w in self.terms)

    def coefficient(self, word):
        return self.terms.get(tuple(word), Fraction(0))

    def __eq__(self, other):
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return self.pres is other.pres and self.terms == other.terms

    def __add__(self, other):
        self._check(other)
        out = dict(self.terms)
        for w, c in other.terms.items():
            s = out.get(w, Fraction(0)) + c
            if s:
                out[w] = s
            else:
                out.pop(w, None)
        return AlgebraElement(self.pres, out)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return AlgebraElement(self.pres, {w: -c for w, c in self.terms.items()})

    def scale(self, c):
        c = Fraction(c)
        if not c:
            return self.pres.zero()
        return AlgebraElement(self.pres, {w: c * v for w, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return multiply(self, other)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __repr__(self):
        return "<%s>" % format_element(self)

    def _check(self, other):
        if self.pres is not other.pres:
            raise ValidationError("elements from different presentations")


def normal_form(word, pres):
    """Rewrite a word exhaustively to its normal-form element.

    Reduction picks the leftmost reducible pair each step; the result is
    order-independent for the shipped confluent presets (see the overlap
    test in the suite).
    """
    word = tuple(word)
    for g in word:
        if g not in pres.gen_index:
            raise ValidationError("unknown generator %r" % g)
    cached = pres._nf_cache.get(word)
    if cached is not None:
        return AlgebraElement(pres, dict(cached))
    result = {}
    stack = [(word, Fraction(1))]
    steps = 0
    while stack:
        w, c = stack.pop()
        for k in range(len(w) - 1):
            rhs = pres.rules.get((w[k], w[k + 1]))
            if rhs is not None:
                steps += 1
                if steps > pres.step_budget:
                    raise StepBudgetExceeded(
                        "rewriting exceeded %d steps" % pres.step_budget)
                for rw, rc in rhs:
                    stack.append((w[:k] + rw + w[k + 2:], c * rc))
                break
        else:
            s = result.get(w, Fraction(0)) + c
            if s:
                result[w] = s
            else:
                result.pop(w, None)
    if len(pres._nf_cache) < 200000:
        pres._nf_cache[word] = dict(result)
    return AlgebraElement(pres, result)


def multiply(a, b):
    """Product of two elements, bilinear over word concatenation."""
    a._check(b)
    pres = a.pres
    out = pres.zero()
    for wa, ca in a.terms.items():
        for wb, cb in b.terms.items():
            out = out + normal_form(wa + wb, pres).scale(ca * cb)
    return out


def expand_to_basis(a, degree_bound):
    """Coefficient vector of ``a`` over the ordered normal-word basis.

    Indexing follows ``normal_words(degree_bound)``; raises DegreeOverflow
    when ``a`` has a word above the bound.
    """
    pres = a.pres
    if a.degree() > degree_bound:
        raise DegreeOverflow("element of degree %d above bound %d"
                             % (a.degree(), degree_bound))
    words = pres.normal_words(degree_bound)
    index = {w: k for k, w in enumerate(words)}
    vec = [Fraction(0)] * len(words)
    for w, c in a.terms.items():
        vec[index[w]] = c
    return vec


def element_from_vector(pres, vec, degree_bound):
    words = pres.normal_words(degree_bound)
    return pres.element({w: c for w, c in zip(words, vec) if c})


def _linked_pairs(pres):
    """Generator pairs whose rewrite rule is not a pure transposition."""
    pairs = []
    for (a, b), rhs in pres.rules.items():
        if rhs != [((b, a), Fraction(1))]:
            pairs.append(frozenset((a, b)))
    return pairs


class QuotientModule:
    """Cyclic left module A / (A*g1 + ... + A*gk) for generator ideals.

    Classes are represented by elements whose words avoid the ideal
    generators entirely; reduction repeatedly trades a word containing some
    g for the lower-degree correction terms of ``(word/g) * g``.  This is a
    well-defined linear section exactly for ideals in the supported class
    (no two generators linked by an inhomogeneous rule), which covers the
    shipped presets.
    """

    def __init__(self, pres, ideal_gens, name=None):
        self.pres = pres
        self.name = name
        self.ideal_gens = tuple(ideal_gens)
        for g in self.ideal_gens:
            if g not in pres.gen_index:
                raise UnsupportedIdeal("ideal generator %r is not an algebra generator" % g)
        gens = set(self.ideal_gens)
        for pair in _linked_pairs(pres):
            if pair <= gens:
                raise UnsupportedIdeal(
                    "generators %s are linked by an inhomogeneous relation" % sorted(pair))
        self._gen_set = gens
        self._basis_cache = {}

    def reduce(self, a):
        """Canonical representative of ``a`` modulo the left ideal."""
        if a.pres is not self.pres:
            raise ValidationError("element from a different presentation")
        pres = self.pres
        terms = dict(a.terms)
        while True:
            reducible = [w for w in terms if any(g in self._gen_set for g in w)]
            if not reducible:
                break
            w = max(reducible, key=pres.word_key)
            c = terms.pop(w)
            g = next(gg for gg in reversed(w) if gg in self._gen_set)
            k = len(w) - 1 - w[::-1].index(g)
            v = w[:k] + w[k + 1:]
            # w == nf(v*g) - corrections, so w ~ -corrections mod A*g
            correction = normal_form(v + (g,), pres) - pres.element({w: 1})
            for w2, c2 in correction.terms.items():
                s = terms.get(w2, Fraction(0)) - c * c2
                if s:
                    terms[w2] = s
                else:
                    terms.pop(w2, None)
        return AlgebraElement(pres, terms)

    def basis_words(self, max_degree):
        """Normal words avoiding the ideal generators, up to max_degree."""
        if max_degree not in self._basis_cache:
            self._basis_cache[max_degree] = [
                w for w in self.pres.normal_words(max_degree)
                if not any(g in self._gen_set for g in w)
            ]
        return self._basis_cache[max_degree]

    def act(self, a, rep):
        """Left action of a on a class representative, reduced."""
        return self.reduce(multiply(a, rep))


def quotient_normal_form(a, ideal_gens):
    return QuotientModule(a.pres, ideal_gens).reduce(a)


# ---------------------------------------------------------------------------
# parsing / formatting

_TOKEN = re.compile(r"\s*(?:(\d+/\d+|\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\^)|(\*)|(\+)|(-))")


def parse_element(pres, text, allow_reducible=False):
    """Parse '2/3*x^2*Dy - x + 1' style expressions into an element."""
    pos = 0
    tokens = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            if text[pos:].strip():
                raise ValidationError("cannot parse element %r at position %d" % (text, pos))
            break
        pos = m.end()
        tokens.append(m)
    result = pres.zero()
    sign = Fraction(1)
    coeff = None
    word = []
    have_term = False

    def flush():
        nonlocal result, sign, coeff, word, have_term
        if not have_term:
            raise ValidationError("empty term in %r" % text)
        c = sign * (coeff if coeff is not None else Fraction(1))
        if allow_reducible:
            result = result + pres.element({tuple(word): Fraction(1)}).scale(c)
        else:
            result = result + normal_form(word, pres).scale(c)
        sign, coeff, word, have_term = Fraction(1), None, [], False

    i = 0
    while i < len(tokens):
        num, name, caret, star, plus, minus = tokens[i].groups()
        if plus or minus:
            if have_term:
                flush()
            if minus:
                sign = -sign
        elif num:
            c = Fraction(num)
            coeff = c if coeff is None else coeff * c
            have_term = True
        elif name:
            power = 1
            if i + 2 < len(tokens) and tokens[i + 1].groups()[2]:
                nxt = tokens[i + 2].groups()[0]
                if nxt is None:
                    raise ValidationError("expected exponent in %r" % text)
                power = int(Fraction(nxt))
                i += 2
            word.extend([name] * power)
            have_term = True
        i += 1
    if have_term:
        flush()
    elif sign != 1 or coeff is not None:
        raise ValidationError("dangling sign in %r" % text)
    return result


def format_scalar(c):
    c = Fraction(c)
    if c.denominator == 1:
        return str(c.numerator)
    return "%d/%d" % (c.numerator, c.denominator)


def _format_word(word):
    if not word:
        return "1"
    parts = []
    k = 0
    while k < len(word):
        j = k
        while j < len(word) and word[j] == word[k]:
            j += 1
        parts.append(word[k] if j - k == 1 else "%s^%d" % (word[k], j - k))
        k = j
    return "*".join(parts)


def format_terms(pres, terms):
    if not terms:
        return "0"
    items = sorted(terms.items(), key=lambda wc: pres.word_key(wc[0]), reverse=True)
    out = []
    for w, c in items:
        mag = format_scalar(abs(c))
        body = _format_word(w)
        if body == "1":
            piece = mag
        elif mag == "1":
            piece = body
        else:
            piece = "%s*%s" % (mag, body)
        if not out:
            out.append(piece if c > 0 else "-" + piece)
        else:
            out.append(("+ " if c > 0 else "- ") + piece)
    return " ".join(out)


def format_element(a):
    return format_terms(a.pres, a.terms)


# ---------------------------------------------------------------------------
# presets

def _commutation_rules(order, brackets):
    """Rules sorting generators into `order`, with [a,b] = c constants."""
    rules = []
    idx = {g: k for k, g in enumerate(order)}
    for a in order:
        for b in order:
            if idx[a] > idx[b]:
                # a*b -> b*a + [a,b]
                rhs = [((b, a), Fraction(1))]
                c = brackets.get((a, b), 0)
                if c:
                    rhs.append(((), Fraction(c)))
                rules.append(((a, b), rhs))
    return rules


def preset_presentation(name):
    if name == "weyl2":
        gens = ["x", "y", "Dx", "Dy"]
        return AlgebraPresentation(
            gens,
            _commutation_rules(gens, {("Dx", "x"): 1, ("Dy", "y"): 1}),
            name="weyl2",
        )
    if name == "weyl1":
        gens = ["x", "Dx"]
        return AlgebraPresentation(
            gens, _commutation_rules(gens, {("Dx", "x"): 1}), name="weyl1")
    if name == "poly1":
        return AlgebraPresentation(["x"], [], name="poly1")
    raise ValidationError("unknown algebra preset %r" % name)
