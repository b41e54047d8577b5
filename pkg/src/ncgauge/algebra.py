"""Presented graded *-algebras with normal-form rewriting.

Words are tuples of generator indices; an Element is a finite map from
normal-form words to exact Scalars.  A Presentation owns the generators,
the oriented rewrite rules, and a memo table of word normal forms, and is
immutable after construction.
"""

from __future__ import annotations

import os
from fractions import Fraction

from .scalars import Scalar, S_ONE, S_I, S_S, S_LAM, S_PIHAT, GaussQ

DEFAULT_STEP_BUDGET = 10 ** 6


class StepBudgetExceeded(RuntimeError):
    """Rewriting exceeded the configured step budget (badly oriented rules)."""


class UnknownIdentifier(ValueError):
    pass


class ParseError(ValueError):
    def __init__(self, message, position):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class Generator:
    __slots__ = ("name", "degree", "weight", "star_name", "star_sign", "invertible")

    def __init__(self, name, degree, weight, star_name, star_sign=1, invertible=False):
        self.name = name
        self.degree = degree
        self.weight = weight
        self.star_name = star_name
        self.star_sign = star_sign
        self.invertible = invertible

    def __repr__(self):
        return f"Generator({self.name!r}, deg={self.degree}, wt={self.weight})"


def _step_budget_default():
    env = os.environ.get("NCGAUGE_STEP_BUDGET")
    if env:
        try:
            return int(env)
        except ValueError:
            pass
    return DEFAULT_STEP_BUDGET


class Presentation:
    """Generators plus oriented, bidegree-preserving rewrite rules."""

    def __init__(self, name, generators, rules=None, step_budget=None):
        self.name = name
        self.gens = tuple(generators)
        self.index = {g.name: i for i, g in enumerate(self.gens)}
        if len(self.index) != len(self.gens):
            raise ValueError("duplicate generator names")
        self.star_index = tuple(self.index[g.star_name] for g in self.gens)
        self.step_budget = step_budget if step_budget is not None else _step_budget_default()
        self._rules = []
        self._rules_by_first = {}
        self._nf_memo = {}
        self._max_lhs = 1
        for lhs, rhs in (rules or ()):
            self.add_rule(lhs, rhs)

    # construction-time only; presentations are frozen once published
    def add_rule(self, lhs, rhs):
        lhs = tuple(self.index[x] if isinstance(x, str) else x for x in lhs)
        rhs_terms = rhs.terms if isinstance(rhs, Element) else dict(rhs)
        ld, lw = self.word_bidegree(lhs)
        for w in rhs_terms:
            if self.word_bidegree(w) != (ld, lw):
                raise ValueError(
                    f"rule {self.word_str(lhs)} -> ... does not preserve bidegree")
        self._rules.append((lhs, rhs_terms))
        self._rules_by_first.setdefault(lhs[0], []).append((lhs, rhs_terms))
        self._max_lhs = max(self._max_lhs, len(lhs))
        self._nf_memo.clear()

    @property
    def rules(self):
        return tuple(self._rules)

    def gen_index(self, name):
        try:
            return self.index[name]
        except KeyError:
            raise UnknownIdentifier(f"unknown generator {name!r} in {self.name}")

    def word_bidegree(self, word):
        d = w = 0
        for i in word:
            g = self.gens[i]
            d += g.degree
            w += g.weight
        return d, w

    def word_str(self, word):
        if not word:
            return "1"
        parts = []
        run_name, run = None, 0
        for i in word:
            n = self.gens[i].name
            if n == run_name:
                run += 1
            else:
                if run_name is not None:
                    parts.append((run_name, run))
                run_name, run = n, 1
        parts.append((run_name, run))
        out = []
        for n, k in parts:
            disp = n[:-1] + "^*" if n.endswith("*") else n
            if k > 1:
                disp = (f"({disp})^{k}" if disp.endswith("^*") else f"{disp}^{k}")
            out.append(disp)
        return "*".join(out)

    # ------------------------------------------------------------------
    # rewriting
    # ------------------------------------------------------------------
    def _find_redex(self, word):
        by_first = self._rules_by_first
        n = len(word)
        for i in range(n):
            cands = by_first.get(word[i])
            if not cands:
                continue
            for lhs, rhs in cands:
                if word[i:i + len(lhs)] == lhs:
                    return i, lhs, rhs
        return None

    def normal_form_word(self, word):
        """Normal form of a single word as a {word: Scalar} dict.

        Every intermediate word is memoized, so overlapping rewriting
        subproblems (a^k a*^k expansions and the like) stay polynomial.
        """
        word = tuple(word)
        memo = self._nf_memo
        hit = memo.get(word)
        if hit is not None:
            return hit
        budget = self.step_budget
        steps = 0
        stack = [word]
        redex_cache = {}
        while stack:
            w = stack[-1]
            if w in memo:
                stack.pop()
                continue
            red = redex_cache.get(w)
            if red is None:
                red = redex_cache[w] = (self._find_redex(w) or False)
            if red is False:
                memo[w] = {w: S_ONE}
                stack.pop()
                continue
            i, lhs, rhs = red
            head, tail = w[:i], w[i + len(lhs):]
            children = [(head + rw + tail, rc) for rw, rc in rhs.items()]
            missing = [ch for ch, _ in children if ch not in memo]
            if missing:
                steps += len(missing)
                if steps > budget:
                    raise StepBudgetExceeded(
                        f"normal form of {self.word_str(word)} exceeded "
                        f"{budget} rewriting steps")
                stack.extend(missing)
                continue
            out = {}
            for ch, rc in children:
                _accumulate(out, memo[ch], rc)
            memo[w] = out
            stack.pop()
        return memo[word]

    # ------------------------------------------------------------------
    # element constructors
    # ------------------------------------------------------------------
    def zero(self):
        return Element(self, {})

    def one(self):
        return Element(self, {(): S_ONE})

    def gen(self, name):
        return self.element_from_word((self.gen_index(name),))

    def scalar(self, c):
        c = c if isinstance(c, Scalar) else Scalar(c)
        return Element(self, {(): c} if not c.is_zero() else {})

    def element_from_word(self, word, coeff=S_ONE):
        nf = self.normal_form_word(word)
        return Element(self, {w: c * coeff for w, c in nf.items()})

    def element(self, terms):
        """Element from a raw {word: Scalar} map, normalizing every word."""
        out = {}
        for w, c in terms.items():
            for nw, nc in self.normal_form_word(tuple(w)).items():
                _accumulate_one(out, nw, nc * c)
        return Element(self, out)

    # ------------------------------------------------------------------
    # hygiene checks
    # ------------------------------------------------------------------
    def star_closure_report(self):
        """Check that the star of every rule is derivable: nf(lhs*) == nf(rhs*)."""
        failures = []
        for lhs, rhs in self._rules:
            left = self.element_from_word(lhs).star()
            right = Element(self, dict(rhs)).star()
            if left != right:
                failures.append(self.word_str(lhs))
        return failures


def _accumulate(out, terms, coeff):
    for w, c in terms.items():
        _accumulate_one(out, w, c * coeff)


def _accumulate_one(out, w, c):
    prev = out.get(w)
    if prev is None:
        if not c.is_zero():
            out[w] = c
    else:
        s = prev + c
        if s.is_zero():
            del out[w]
        else:
            out[w] = s


class Element:
    """Normal-form noncommutative polynomial over a presentation."""

    __slots__ = ("pres", "terms")

    def __init__(self, pres, terms):
        self.pres = pres
        self.terms = terms

    # -- queries -----------------------------------------------------------
    def is_zero(self):
        return not self.terms

    def bidegrees(self):
        return {self.pres.word_bidegree(w) for w in self.terms}

    def grade_components(self):
        """Split into bihomogeneous parts: list of (degree, weight, Element)."""
        buckets = {}
        for w, c in self.terms.items():
            buckets.setdefault(self.pres.word_bidegree(w), {})[w] = c
        return [(d, k, Element(self.pres, t))
                for (d, k), t in sorted(buckets.items())]

    def weight_component(self, k):
        return Element(self.pres, {w: c for w, c in self.terms.items()
                                   if self.pres.word_bidegree(w)[1] == k})

    def degree_component(self, d):
        return Element(self.pres, {w: c for w, c in self.terms.items()
                                   if self.pres.word_bidegree(w)[0] == d})

    def coefficient(self, word):
        return self.terms.get(tuple(word), Scalar(0))

    def scalar_part(self):
        return self.terms.get((), Scalar(0))

    # -- algebra ------------------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        _accumulate(out, other.terms, S_ONE)
        return Element(self.pres, out)

    def __radd__(self, other):
        return self.__add__(other)

    def __neg__(self):
        return Element(self.pres, {w: -c for w, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (Scalar, int, Fraction)):
            c = other if isinstance(other, Scalar) else Scalar(other)
            if c.is_zero():
                return Element(self.pres, {})
            return Element(self.pres, {w: v * c for w, v in self.terms.items()})
        other = self._coerce(other)
        pres = self.pres
        out = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                nf = pres.normal_form_word(w1 + w2)
                _accumulate(out, nf, c1 * c2)
        return Element(pres, out)

    def __rmul__(self, other):
        if isinstance(other, (Scalar, int, Fraction)):
            return self.__mul__(other)
        return self._coerce(other).__mul__(self)

    def __truediv__(self, other):
        if isinstance(other, (Scalar, int, Fraction)):
            c = other if isinstance(other, Scalar) else Scalar(other)
            return self.__mul__(S_ONE / c)
        raise TypeError("can only divide an Element by a Scalar")

    def __pow__(self, k):
        if k < 0:
            raise ValueError("negative powers only via inverse generators")
        out = self.pres.one()
        for _ in range(k):
            out = out * self
        return out

    def star(self):
        pres = self.pres
        gens, star_ix = pres.gens, pres.star_index
        out = {}
        for w, c in self.terms.items():
            sign = 1
            degsum = 0
            # (g1...gn)* = (-1)^{sum_{i<j} d_i d_j} gn* ... g1*
            for i in w:
                d = gens[i].degree
                sign = -sign if (d % 2) and (degsum % 2) else sign
                degsum += d
                if gens[i].star_sign < 0:
                    sign = -sign
            sw = tuple(star_ix[i] for i in reversed(w))
            coeff = c.conj() if sign > 0 else -c.conj()
            for nw, nc in pres.normal_form_word(sw).items():
                _accumulate_one(out, nw, nc * coeff)
        return Element(pres, out)

    def _coerce(self, other):
        if isinstance(other, Element):
            if other.pres is not self.pres:
                raise ValueError("elements live over different presentations")
            return other
        if isinstance(other, (int, Fraction, Scalar)):
            return self.pres.scalar(other)
        raise TypeError(f"cannot combine Element with {type(other)!r}")

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, Scalar)):
            other = self.pres.scalar(other)
        if not isinstance(other, Element):
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self):
        return hash((id(self.pres), frozenset(self.terms)))

    # -- output ---------------------------------------------------------------
    def render(self):
        if not self.terms:
            return "0"
        keys = sorted(self.terms,
                      key=lambda w: (self.pres.word_bidegree(w), len(w), w))
        parts = []
        for w in keys:
            c = self.terms[w]
            cs = c.render()
            ws = self.pres.word_str(w)
            if ws == "1":
                t = cs if _atomic(cs) else f"({cs})"
            elif cs == "1":
                t = ws
            elif cs == "-1":
                t = f"-{ws}"
            else:
                t = f"{cs}*{ws}" if _atomic(cs) else f"({cs})*{ws}"
            parts.append(t)
        out = parts[0]
        for t in parts[1:]:
            out += t if t.startswith("-") else "+" + t
        return out

    def __repr__(self):
        return self.render()


def _atomic(cs):
    """True when a rendered scalar needs no parentheses inside a product."""
    if cs.startswith("-"):
        cs = cs[1:]
    return "+" not in cs and "-" not in cs


# ---------------------------------------------------------------------------
# expression parser
# ---------------------------------------------------------------------------

_PARAMS = {"s": S_S, "lambda": S_LAM, "pi2": S_PIHAT, "i": S_I}


class _Tokens:
    def __init__(self, text):
        self.text = text
        self.pos = 0

    def peek(self):
        t = self.text
        n = len(t)
        p = self.pos
        while p < n and t[p].isspace():
            p += 1
        self.pos = p
        if p >= n:
            return None, p
        ch = t[p]
        if ch.isdigit():
            q = p
            while q < n and t[q].isdigit():
                q += 1
            return ("num", t[p:q], q), p
        if ch.isalpha() or ch == "_":
            q = p
            while q < n and (t[q].isalnum() or t[q] == "_"):
                q += 1
            return ("name", t[p:q], q), p
        return ("op", ch, p + 1), p

    def next(self):
        tok, _ = self.peek()
        if tok is not None:
            self.pos = tok[2]
        return tok


def parse_element(text, pres):
    """Parse an expression over ``pres`` and return its normal form.

    Grammar: sums of products of powers; ``*`` or juxtaposition for
    products, ``^n`` for integer powers (negative only on invertible
    generators), postfix ``^*`` for the star, ``/`` inside numeric
    literals only.
    """
    toks = _Tokens(text)
    expr = _parse_sum(toks, pres)
    tok, pos = toks.peek()
    if tok is not None:
        raise ParseError(f"unexpected {tok[1]!r}", pos)
    return expr


def _parse_sum(toks, pres):
    out = _parse_product(toks, pres)
    while True:
        tok, _ = toks.peek()
        if tok and tok[0] == "op" and tok[1] in "+-":
            toks.next()
            rhs = _parse_product(toks, pres)
            out = out + rhs if tok[1] == "+" else out - rhs
        else:
            return out


def _starts_factor(tok):
    return tok is not None and (tok[0] in ("num", "name")
                                or (tok[0] == "op" and tok[1] == "("))


def _parse_product(toks, pres):
    sign = 1
    while True:
        tok, _ = toks.peek()
        if tok and tok[0] == "op" and tok[1] in "+-":
            toks.next()
            if tok[1] == "-":
                sign = -sign
        else:
            break
    out = _parse_power(toks, pres)
    while True:
        tok, _ = toks.peek()
        if tok and tok[0] == "op" and tok[1] == "*":
            toks.next()
            out = out * _parse_power(toks, pres)
        elif _starts_factor(tok):
            out = out * _parse_power(toks, pres)
        else:
            break
    return out if sign > 0 else -out


def _parse_power(toks, pres):
    base, base_gen = _parse_atom(toks, pres)
    while True:
        tok, _ = toks.peek()
        if not (tok and tok[0] == "op" and tok[1] == "^"):
            return base
        toks.next()
        tok, pos = toks.peek()
        if tok and tok[0] == "op" and tok[1] == "*":
            toks.next()
            base = base.star()
            base_gen = None
            continue
        neg = False
        if tok and tok[0] == "op" and tok[1] == "-":
            toks.next()
            neg = True
            tok, pos = toks.peek()
        if not (tok and tok[0] == "num"):
            raise ParseError("expected integer exponent or '*' after '^'", pos)
        toks.next()
        k = int(tok[1])
        if neg:
            if base_gen is None or not base_gen.invertible:
                raise ParseError("negative power of a non-invertible factor", pos)
            inv = pres.gen(base_gen.star_name)
            base = inv ** k
        else:
            base = base ** k
        base_gen = None


def _parse_atom(toks, pres):
    tok, pos = toks.peek()
    if tok is None:
        raise ParseError("unexpected end of input", pos)
    kind, val, _ = tok
    if kind == "num":
        toks.next()
        nxt, _ = toks.peek()
        if nxt and nxt[0] == "op" and nxt[1] == "/":
            toks.next()
            den, dpos = toks.peek()
            if not (den and den[0] == "num"):
                raise ParseError("expected denominator digits", dpos)
            toks.next()
            return pres.scalar(Scalar.from_fraction(Fraction(int(val), int(den[1])))), None
        return pres.scalar(Scalar.from_fraction(Fraction(int(val)))), None
    if kind == "name":
        toks.next()
        if val in _PARAMS:
            return pres.scalar(_PARAMS[val]), None
        if val in pres.index:
            g = pres.gens[pres.index[val]]
            return pres.gen(val), g
        raise UnknownIdentifier(f"unknown identifier {val!r} at position {pos}")
    if kind == "op" and val == "(":
        toks.next()
        inner = _parse_sum(toks, pres)
        tok, pos2 = toks.peek()
        if not (tok and tok[0] == "op" and tok[1] == ")"):
            raise ParseError("expected ')'", pos2)
        toks.next()
        return inner, None
    raise ParseError(f"unexpected {val!r}", pos)


# ---------------------------------------------------------------------------
# local confluence
# ---------------------------------------------------------------------------

class ConfluenceReport:
    def __init__(self, presentation_name, checked, unresolved):
        self.presentation = presentation_name
        self.checked = checked
        self.unresolved = unresolved

    @property
    def ok(self):
        return not self.unresolved

    def __repr__(self):
        state = "confluent" if self.ok else f"{len(self.unresolved)} unresolved"
        return (f"ConfluenceReport({self.presentation}: {self.checked} overlaps, "
                f"{state})")


def check_local_confluence(pres, max_total_degree):
    """Resolve all overlap/containment ambiguities up to the word-length bound.

    Every critical word is rewritten via both competing rule applications
    and the two results are reduced to normal form and compared; a step
    budget blow-up counts as unresolved.
    """
    if max_total_degree < 2:
        raise ValueError("max_total_degree must be >= 2")
    rules = pres.rules
    checked = 0
    unresolved = []
    seen = set()
    for i1, (l1, r1) in enumerate(rules):
        for i2, (l2, r2) in enumerate(rules):
            # suffix of l1 == prefix of l2 (nontrivial overlap)
            for k in range(1, min(len(l1), len(l2))):
                if l1[len(l1) - k:] != l2[:k]:
                    continue
                word = l1 + l2[k:]
                if len(word) > max_total_degree or (word, i1, i2) in seen:
                    continue
                seen.add((word, i1, i2))
                checked += 1
                a = _apply_rule_at(pres, word, 0, l1, r1)
                b = _apply_rule_at(pres, word, len(l1) - k, l2, r2)
                _compare_resolutions(pres, word, i1, i2, a, b, unresolved)
            # l2 contained strictly inside l1
            if i1 != i2 and len(l2) < len(l1):
                for p in range(len(l1) - len(l2) + 1):
                    if l1[p:p + len(l2)] != l2:
                        continue
                    word = l1
                    if len(word) > max_total_degree or (word, i1, -i2 - 1) in seen:
                        continue
                    seen.add((word, i1, -i2 - 1))
                    checked += 1
                    a = _apply_rule_at(pres, word, 0, l1, r1)
                    b = _apply_rule_at(pres, word, p, l2, r2)
                    _compare_resolutions(pres, word, i1, i2, a, b, unresolved)
    return ConfluenceReport(pres.name, checked, unresolved)


def _apply_rule_at(pres, word, i, lhs, rhs):
    head, tail = word[:i], word[i + len(lhs):]
    try:
        out = {}
        for rw, rc in rhs.items():
            for nw, nc in pres.normal_form_word(head + rw + tail).items():
                _accumulate_one(out, nw, nc * rc)
        return Element(pres, out)
    except StepBudgetExceeded:
        return None


def _compare_resolutions(pres, word, i1, i2, a, b, unresolved):
    if a is None or b is None:
        unresolved.append({"word": pres.word_str(word), "rules": (i1, i2),
                           "reason": "step budget exhausted"})
    elif (a - b).is_zero() is False:
        unresolved.append({"word": pres.word_str(word), "rules": (i1, i2),
                           "reason": "distinct normal forms",
                           "left": a.render(), "right": b.render()})
