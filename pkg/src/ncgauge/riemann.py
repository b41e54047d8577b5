"""Riemannian structure: Hodge operators, states, L2 data, and the
lift/restrict pair for total geometries.

Hodge operators are stored on the free left-module frame of cotangent
words and extended by left linearity; the modular right-multiplication
rule is then a verified identity, not an input.  States are exact
Kronecker functionals on the torus and numeric-rational Haar values on
quantum SU(2).
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from .algebra import Element, _accumulate_one
from .calculus import (Calculus, ModularSymbol, NoFrame, spectral_frame,
                       modular_apply, q_integer)
from .scalars import Scalar, GaussQ, S_ONE, S_I, S_Q, S_PIHAT, q_power


class GeometryError(ValueError):
    pass


class NotConformal(GeometryError):
    def __init__(self, witness):
        super().__init__(f"no single conformal factor works; witness {witness}")
        self.witness = witness


class BasicMismatch(GeometryError):
    pass


class FrameCoverageGap(GeometryError):
    pass


# ---------------------------------------------------------------------------
# Hodge operators
# ---------------------------------------------------------------------------

def form_frame_words(calc: Calculus):
    """Normal-form products of the cotangent generators, all degrees."""
    pres = calc.pres
    form_gens = [i for i, g in enumerate(pres.gens) if g.degree == 1]
    words = {(): S_ONE}
    out = [()]
    frontier = [()]
    while frontier:
        new = []
        for w in frontier:
            for i in form_gens:
                nf = pres.normal_form_word(w + (i,))
                if len(nf) != 1:
                    continue
                (word, _), = nf.items()
                if word and word not in words and len(word) == len(w) + 1:
                    words[word] = S_ONE
                    new.append(word)
                    out.append(word)
        frontier = new
    return sorted(out, key=lambda w: (len(w), w))


def split_word(calc: Calculus, word):
    """Split a normal word into its algebra prefix and form suffix."""
    gens = calc.pres.gens
    cut = len(word)
    for i, ix in enumerate(word):
        if gens[ix].degree > 0:
            cut = i
            break
    return word[:cut], word[cut:]


class HodgeOperator:
    """Frame table star: form word -> Element, extended left-linearly."""

    def __init__(self, calc: Calculus, table, total=False,
                 delta_ver: ModularSymbol = None, delta_hor: ModularSymbol = None):
        self.calc = calc
        self.table = {tuple(k): v for k, v in table.items()}
        self.total = total
        self.delta_ver = delta_ver
        self.delta_hor = delta_hor
        self._inverse = None

    @property
    def top_degree(self):
        return self.calc.base_dim + (1 if self.total else 0)

    def apply(self, x: Element) -> Element:
        calc = self.calc
        pres = calc.pres
        out = {}
        for w, c in x.terms.items():
            prefix, form = split_word(calc, w)
            img = self.table.get(form)
            if img is None:
                raise FrameCoverageGap(
                    f"form {pres.word_str(form)} is outside the Hodge frame")
            piece = pres.element_from_word(prefix) * img
            for nw, nc in piece.terms.items():
                _accumulate_one(out, nw, nc * c)
        return Element(pres, out)

    def apply_inverse(self, x: Element) -> Element:
        out = self.calc.pres.zero()
        for d, _, part in x.grade_components():
            sign = self._sign_for_inverse(d)
            out = out + self.apply(part) * Scalar(sign)
        return out

    def _sign_for_inverse(self, m: int) -> int:
        # star^{-1}|_m = sign(top - m) * star|_m where sign(k) is the
        # involution sign of star^2 on degree k
        n = self.top_degree
        k = n - m
        if self.total:
            s = k * (n - k)
        else:
            s = k * (n - k)
        return -1 if s % 2 else 1

    def involution_sign(self, m: int) -> int:
        n = self.top_degree
        s = m * (n - m)
        return -1 if s % 2 else 1


def hodge_su2_base(calc: Calculus) -> HodgeOperator:
    """star_q of the canonical Kahler geometry on quantum CP^1 (ex:hopf6)."""
    pres = calc.pres
    ep, em = pres.index["ep"], pres.index["em"]
    one = pres.one()
    table = {(): pres.element_from_word((ep, em)) * S_I,
             (ep,): pres.element_from_word((ep,)) * S_I,
             (em,): pres.element_from_word((em,)) * (-S_I),
             (ep, em): one * (-S_I)}
    return HodgeOperator(calc, table)


def hodge_torus(calc: Calculus) -> HodgeOperator:
    pres = calc.pres
    e1, e2 = pres.index["e1"], pres.index["e2"]
    table = {(): pres.element_from_word((e1, e2)),
             (e1,): pres.element_from_word((e2,)),
             (e2,): pres.element_from_word((e1,)) * Scalar(-1),
             (e1, e2): pres.one()}
    return HodgeOperator(calc, table)


# ---------------------------------------------------------------------------
# states
# ---------------------------------------------------------------------------

class State:
    """Linear functional on degree-0 normal words.

    kronecker: tau(word) = delta_{word, 1}, exact (the torus trace and
    its crossed-product induction).  haar: numeric-rational values from
    the coproduct-invariance linear system at rational q.
    """

    def __init__(self, flavor, values=None, q=None):
        self.flavor = flavor
        self.values = values or {}
        self.q = q

    def value(self, x: Element) -> Scalar:
        if self.flavor == "kronecker":
            return x.terms.get((), Scalar(0))
        total = Scalar(0)
        for w, c in x.terms.items():
            if x.pres.word_bidegree(w)[0] != 0:
                raise GeometryError("state applied to a form of positive degree")
            h = self.values.get(w)
            if h is None and self.flavor == "haar-closed":
                h = self.values[w] = _haar_closed_value(x.pres, w, self.q)
            if h is None:
                if x.pres.word_bidegree(w)[1] != 0:
                    h = Fraction(0)  # off weight zero the Haar state vanishes
                else:
                    raise GeometryError(
                        f"Haar window too small for {x.pres.word_str(w)}")
            if h == 0:
                continue
            total = total + _eval_q_scalar(c, self.q) * Scalar.from_fraction(h)
        return total


def _eval_q_scalar(c: Scalar, q: Fraction) -> Scalar:
    """Exact evaluation at s^2 = q; pihat stays formal, lambda and odd
    s powers are rejected."""
    def ev(p):
        out = {}
        for (a, b, cc), v in p.items():
            if b or a % 2:
                raise GeometryError("scalar is not an integer q-power expression")
            key = (0, 0, cc)
            add = v * GaussQ(q ** (a // 2))
            prev = out.get(key)
            s = add if prev is None else prev + add
            if s:
                out[key] = s
            elif prev is not None:
                del out[key]
        return out

    return Scalar(ev(c.num), ev(c.den))


def _eval_q(c: Scalar, q: Fraction) -> GaussQ:
    """Exact evaluation at s^2 = q for lambda- and pihat-free even scalars."""
    val = _eval_q_scalar(c, q)
    out = val.num.get((0, 0, 0), GaussQ(0))
    if set(val.num) - {(0, 0, 0)} or set(val.den) != {(0, 0, 0)}:
        raise GeometryError("scalar is not an integer q-power expression")
    return out / val.den[(0, 0, 0)]


def _haar_closed_value(pres, word, q) -> Fraction:
    """h on a PBW word: nonzero only on (c c*)^m, with value 1/[m+1]_{q^2}.

    The pattern is a window-verified consequence of the invariance system
    (tests re-derive it from the system at small caps)."""
    names = [pres.gens[i].name for i in word]
    m = names.count("c")
    if names != ["c"] * m + ["c*"] * m:
        return Fraction(0)
    q2 = q * q
    return (1 - q2) / (1 - q2 ** (m + 1))


def haar_state_closed(q_numeric) -> State:
    q = Fraction(q_numeric)
    if not (0 < q < 1):
        raise ValueError("q must be a rational in (0, 1)")
    return State("haar-closed", values={}, q=q)


SU2_COPRODUCT = {
    "a": ((("a",), ("a",), S_ONE), (("c*",), ("c",), -S_Q)),
    "a*": ((("a*",), ("a*",), S_ONE), (("c",), ("c*",), -S_Q)),
    "c": ((("c",), ("a",), S_ONE), (("a*",), ("c",), S_ONE)),
    "c*": ((("c*",), ("a*",), S_ONE), (("a",), ("c*",), S_ONE)),
}


def _pbw_words(pres, degree_cap):
    """All PBW normal words of total degree <= cap over oq-su2 letters."""
    a, as_, c, cs = (pres.index[n] for n in ("a", "a*", "c", "c*"))
    out = []
    for total in range(degree_cap + 1):
        for i in range(total + 1):
            for m in range(total - i + 1):
                n = total - i - m
                out.append((a,) * i + (c,) * m + (cs,) * n)
                if i > 0:
                    out.append((as_,) * i + (c,) * m + (cs,) * n)
    return sorted(set(out), key=lambda w: (len(w), w))


def _tensor_mul(pres, x, y, q):
    out = {}
    for (l1, r1), c1 in x.items():
        for (l2, r2), c2 in y.items():
            left = pres.normal_form_word(l1 + l2)
            right = pres.normal_form_word(r1 + r2)
            for lw, lc in left.items():
                for rw, rc in right.items():
                    key = (lw, rw)
                    coeff = _eval_q(lc * rc, q) * (c1 * c2)
                    prev = out.get(key)
                    s = coeff if prev is None else prev + coeff
                    if s:
                        out[key] = s
                    elif prev is not None:
                        del out[key]
    return out


def coproduct_tensor(pres, word, q):
    """Delta(word) in the exact tensor-square at numeric rational q."""
    out = {((), ()): GaussQ(1)}
    for ix in word:
        name = pres.gens[ix].name
        legs = {}
        for lw, rw, coef in SU2_COPRODUCT[name]:
            key = (tuple(pres.index[n] for n in lw),
                   tuple(pres.index[n] for n in rw))
            legs[key] = _eval_q(coef, q)
        out = _tensor_mul(pres, out, legs, q)
    return out


def validate_coproduct(pres, q) -> bool:
    """Homomorphism property of the imported coproduct on every relation."""
    for lhs, rhs in pres.rules:
        left = coproduct_tensor(pres, lhs, q)
        right = {}
        for w, c in rhs.items():
            cw = _eval_q(c, q)
            for key, v in coproduct_tensor(pres, w, q).items():
                prev = right.get(key, GaussQ(0))
                s = prev + v * cw
                if s:
                    right[key] = s
                elif key in right:
                    del right[key]
        if left != right:
            return False
    return True


def haar_state(pres, q_numeric, degree_cap=4) -> State:
    """Woronowicz's Haar state, pinned by (id (x) h)Delta = h(.)1.

    Solved exactly over Q at rational q; raises on a singular system
    (degree cap too small).
    """
    q = Fraction(q_numeric)
    if not (0 < q < 1):
        raise ValueError("q must be a rational in (0, 1)")
    if not validate_coproduct(pres, q):
        raise GeometryError("coproduct fails the homomorphism check")
    words = _pbw_words(pres, degree_cap)
    index = {w: i for i, w in enumerate(words)}
    rows = []
    rhs = []
    unit = index[()]
    for x in words:
        delta = coproduct_tensor(pres, x, q)
        by_left = {}
        for (lw, rw), c in delta.items():
            by_left.setdefault(lw, []).append((rw, c))
        for lw, legs in by_left.items():
            row = [Fraction(0)] * len(words)
            ok = True
            for rw, c in legs:
                j = index.get(rw)
                if j is None:
                    ok = False
                    break
                if c.im:
                    raise GeometryError("unexpected imaginary coproduct weight")
                row[j] += c.re
            if not ok:
                continue  # equation leaves the window; skip it
            if lw == ():
                j = index[x]
                row[j] -= 1
                rows.append(row)
                rhs.append(Fraction(0))
            else:
                rows.append(row)
                rhs.append(Fraction(0))
    row = [Fraction(0)] * len(words)
    row[unit] = Fraction(1)
    rows.append(row)
    rhs.append(Fraction(1))
    sol = _solve_exact(rows, rhs)
    if sol is None:
        raise GeometryError("singular Haar system; increase the degree cap")
    values = {w: sol[i] for w, i in index.items()}
    return State("haar", values=values, q=q)


def _solve_exact(rows, rhs):
    m, n = len(rows), len(rows[0])
    aug = [row[:] + [rhs[i]] for i, row in enumerate(rows)]
    pivots = []
    r = 0
    for col in range(n):
        piv = next((i for i in range(r, m) if aug[i][col] != 0), None)
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        pr = aug[r]
        inv = 1 / pr[col]
        aug[r] = [v * inv for v in pr]
        for i in range(m):
            if i != r and aug[i][col] != 0:
                f = aug[i][col]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[r])]
        pivots.append(col)
        r += 1
        if r == m:
            break
    for i in range(r, m):
        if aug[i][n] != 0:
            return None  # inconsistent
    if len(pivots) < n:
        return None  # underdetermined
    sol = [Fraction(0)] * n
    for i, col in enumerate(pivots):
        sol[col] = aug[i][n]
    return sol


# ---------------------------------------------------------------------------
# geometries
# ---------------------------------------------------------------------------

class Geometry:
    def __init__(self, name, calc: Calculus, hodge: HodgeOperator, state: State):
        self.name = name
        self.calc = calc
        self.hodge = hodge
        self.state = state

    def star(self, x):
        return self.hodge.apply(x)

    def star_inv(self, x):
        return self.hodge.apply_inverse(x)


def hodge_apply(geom: Geometry, x: Element) -> Element:
    return geom.hodge.apply(x)


def inverse_metric(geom: Geometry, omega: Element, eta: Element) -> Element:
    return geom.hodge.apply(omega.star() * geom.hodge.apply(eta))


def inner_product(geom: Geometry, omega: Element, eta: Element) -> Scalar:
    g = inverse_metric(geom, omega, eta)
    zero_part = Element(geom.calc.pres,
                        {w: c for w, c in g.terms.items()
                         if geom.calc.pres.word_bidegree(w)[0] == 0})
    return geom.state.value(zero_part)


def parity(calc: Calculus, x: Element) -> Element:
    out = calc.pres.zero()
    for d, _, part in x.grade_components():
        out = out + (part if d % 2 == 0 else -part)
    return out


def codifferential(geom: Geometry, omega: Element) -> Element:
    """d* = star^{-1} d star gamma, the formal adjoint at the L2 level."""
    return geom.star_inv(geom.calc.d(geom.star(parity(geom.calc, omega))))


# ---------------------------------------------------------------------------
# conformality and the lift
# ---------------------------------------------------------------------------

def _scalar_ratio(x: Element, y: Element):
    """r with x = y*r, or None."""
    if y.is_zero():
        return None if not x.is_zero() else Scalar(0)
    ratio = None
    for w, c in y.terms.items():
        xc = x.terms.get(w)
        if xc is None:
            return None
        r = xc / c
        if ratio is None:
            ratio = r
        elif ratio != r:
            return None
    if x != y * ratio:
        return None
    return ratio


def conformal_factor(calc: Calculus, base_hodge: HodgeOperator):
    """Solve the conformal equation for mu(1) against the weight-1 frame.

    star_B(alpha) p must equal (left-moved coefficients) mu^{N-2k} across
    every base frame form alpha of degree k and frame element p; returns
    the ModularSymbol with value mu(1) or raises NotConformal.
    """
    try:
        frame = spectral_frame(calc, 1)
    except NoFrame:
        raise NotConformal("no weight-1 frame")
    n = calc.base_dim
    base_forms = [w for w in base_hodge.table
                  if calc.pres.word_bidegree(w)[1] == 0]
    constraints = {}
    for alpha_word in base_forms:
        k = calc.pres.word_bidegree(alpha_word)[0]
        alpha = calc.pres.element_from_word(alpha_word)
        power = n - 2 * k
        for p in frame.basis:
            lhs = base_hodge.apply(alpha) * p
            rhs = base_hodge.apply(alpha * p)
            r = _scalar_ratio(lhs, rhs)
            if r is None:
                raise NotConformal((calc.pres.word_str(alpha_word), p.render(), k))
            if power == 0:
                if r != S_ONE:
                    raise NotConformal((calc.pres.word_str(alpha_word),
                                        p.render(), k))
                continue
            known = constraints.get(power)
            if known is None:
                constraints[power] = r
            elif known != r:
                raise NotConformal(("inconsistent ratios", power))
    mu = None
    for power in sorted(constraints, key=abs, reverse=True):
        cand = _root(constraints[power], power)
        if cand is None:
            raise NotConformal(("no positive root", power))
        if mu is None:
            mu = cand
        elif mu != cand:
            raise NotConformal(("degree mismatch", power))
    if mu is None:
        mu = S_ONE
    return ModularSymbol(mu, label=f"conformal[{mu.render()}]")


def _root(r: Scalar, power: int):
    """Positive |power|-th root of a positive monomial scalar."""
    target = r if power > 0 else S_ONE / r
    k = abs(power)
    out = target
    # k is 2 or N for the in-scope geometries; iterate square roots for 2^j
    if k == 1:
        return out
    if k == 2:
        return out.sqrt_monomial()
    if k == 4:
        half = out.sqrt_monomial()
        return None if half is None else half.sqrt_monomial()
    return None


def lift_geometry(base: Geometry, calc_total: Calculus) -> Geometry:
    """The unique total Riemannian geometry lifting (star_B, tau_B).

    Delta_ver = Lambda_kappa, Delta_hor has the conformal-factor symbol;
    the total Hodge table is built from eq:totalstara/b through the
    weight decomposition by frames.
    """
    if calc_total.theta is None or calc_total.kappa is None:
        raise BasicMismatch("target calculus carries no connection data")
    base_table_total = {}
    for w, img in base.hodge.table.items():
        base_table_total[_move_word(base.calc, calc_total, w)] = \
            _move_element(base.calc, calc_total, img)
    base_hodge_total = HodgeOperator(calc_total, base_table_total)
    mu = conformal_factor(calc_total, base_hodge_total)
    kappa = calc_total.kappa
    delta_ver = ModularSymbol(S_ONE / kappa, label="Lambda[kappa]")
    delta_hor = mu
    theta = calc_total.theta
    pres = calc_total.pres

    theta_ix = calc_total._theta_index()
    ((tword, tcoeff),) = tuple(theta.terms.items())

    def star_total(x: Element) -> Element:
        out = pres.zero()
        for w, c in x.terms.items():
            prefix, form = split_word(calc_total, w)
            p = pres.element_from_word(prefix, c)
            if form and form[0] == theta_ix:
                hor_form = pres.element_from_word(form[1:])
                kf = pres.word_bidegree(form[1:])[1]
                frame = spectral_frame(calc_total, kf)
                acc = pres.zero()
                for e in frame.basis:
                    beta = e.star() * hor_form
                    acc = acc + e * base_hodge_total.apply(beta) * (kappa ** (-kf))
                out = out + p * acc * (S_ONE / tcoeff)
            else:
                felem = pres.element_from_word(form)
                kf = pres.word_bidegree(form)[1]
                deg = pres.word_bidegree(form)[0]
                frame = spectral_frame(calc_total, kf)
                acc = pres.zero()
                for e in frame.basis:
                    beta = e.star() * felem
                    acc = acc + e * theta * base_hodge_total.apply(beta)
                sign = Scalar(-1 if deg % 2 else 1)
                out = out + p * acc * sign
        return out

    table = {}
    for w in form_frame_words(calc_total):
        table[w] = star_total(pres.element_from_word(w))
    hodge = HodgeOperator(calc_total, table, total=True,
                          delta_ver=delta_ver, delta_hor=delta_hor)
    state = base.state  # induced state: tau_B of the invariant part
    return Geometry(f"lift[{base.name}]", calc_total, hodge, state)


def _move_word(src: Calculus, dst: Calculus, w):
    return tuple(dst.pres.index[src.pres.gens[i].name] for i in w)


def _move_element(src: Calculus, dst: Calculus, x: Element) -> Element:
    return dst.pres.element({_move_word(src, dst, w): c
                             for w, c in x.terms.items()})


def restrict_geometry(total: Geometry, base_calc: Calculus) -> Geometry:
    """star_B(beta) := star_P(theta beta) on basic forms, pushed back to the
    base calculus; nonzero-weight frame words restrict through the weight
    decomposition (the table stores the left-linear ambient extension)."""
    calc_total = total.calc
    theta = calc_total.theta
    theta_ix = calc_total._theta_index()
    pres = calc_total.pres
    table = {}
    for w in total.hodge.table:
        if theta_ix in w:
            continue
        f = pres.element_from_word(w)
        kf = pres.word_bidegree(w)[1]
        frame = spectral_frame(calc_total, kf)
        image = pres.zero()
        for e in frame.basis:
            image = image + e * total.star(theta * (e.star() * f))
        table[_move_word(calc_total, base_calc, w)] = \
            _move_back(calc_total, base_calc, image)
    return Geometry(f"restrict[{total.name}]", base_calc,
                    HodgeOperator(base_calc, table), total.state)


def _move_back(src: Calculus, dst: Calculus, x: Element) -> Element:
    out = {}
    for w, c in x.terms.items():
        try:
            nw = tuple(dst.pres.index[src.pres.gens[i].name] for i in w)
        except KeyError:
            raise BasicMismatch(
                f"image {src.pres.word_str(w)} does not restrict to the base")
        out[nw] = c
    return dst.pres.element(out)


# ---------------------------------------------------------------------------
# weight-0 state value of the su2 geometry at numeric q
# ---------------------------------------------------------------------------

def su2_base_geometry(calc, q_numeric=None, degree_cap=4) -> Geometry:
    hodge = hodge_su2_base(calc)
    if q_numeric is None:
        state = State("kronecker")  # formal placeholder; numeric work resolves it
    else:
        state = haar_state(calc.pres, q_numeric, degree_cap)
    return Geometry("su2-base", calc, hodge, state)


def torus_base_geometry(calc) -> Geometry:
    return Geometry("torus-base", calc, hodge_torus(calc), State("kronecker"))


# ---------------------------------------------------------------------------
# modular-Hodge identity suite
# ---------------------------------------------------------------------------

def bidegree_split(calc: Calculus, x: Element):
    """Split into (j, k) components: j vertical degree, k horizontal degree."""
    theta_ix = calc._theta_index()
    pres = calc.pres
    buckets = {}
    for w, c in x.terms.items():
        d = pres.word_bidegree(w)[0]
        j = 1 if (theta_ix is not None and theta_ix in w) else 0
        buckets.setdefault((j, d - j), {})[w] = c
    return [(jk, Element(pres, t)) for jk, t in sorted(buckets.items())]


def apply_modular_power(geom: Geometry, x: Element, hor_pow: int, ver_pow: int):
    out = geom.calc.pres.zero()
    dh, dv = geom.hodge.delta_hor, geom.hodge.delta_ver
    for _, w, part in x.grade_components():
        factor = (dh(w) ** hor_pow) * (dv(w) ** ver_pow)
        out = out + part * factor
    return out


def _total_degree(calc: Calculus, w):
    return calc.pres.word_bidegree(w)[0]


def random_form(calc: Calculus, rng, form_word, length=2):
    from .calculus import random_element
    coeff = random_element(calc, rng, weight=None, length=length, terms=2)
    return coeff * calc.pres.element_from_word(form_word)


def modular_hodge_report(total_geom: Geometry, rng, pairs=100):
    """All eight modular-Hodge identities, exactly, on frame forms and
    seeded random pairs (eq:totalhodgeswap/inv/right/star/lift/sym plus
    orthogonality and modular symmetry of the inverse metric)."""
    from .calculus import CalcCheck, CalcReport, random_element
    calc = total_geom.calc
    pres = calc.pres
    hodge = total_geom.hodge
    n = calc.base_dim
    theta = calc.theta
    frame_words = form_frame_words(calc)
    checks = []

    # swap + involution on the full frame
    ok_swap, ok_inv, wit = True, True, None
    for w in frame_words:
        x = pres.element_from_word(w)
        sx = hodge.apply(x)
        jk = bidegree_split(calc, x)[0][0]
        for (j2, k2), _part in bidegree_split(calc, sx):
            if (j2, k2) != (1 - jk[0], n - jk[1]):
                ok_swap, wit = False, pres.word_str(w)
        m = jk[0] + jk[1]
        sign = Scalar(-1 if (m * (n + 1 - m)) % 2 else 1)
        if hodge.apply(sx) != x * sign:
            ok_inv, wit = False, pres.word_str(w)
    checks.append(CalcCheck("totalhodgeswap", ok_swap, wit))
    checks.append(CalcCheck("totalhodgeinv", ok_inv, wit))

    # the remaining identities on frame forms with random coefficients
    names = ("totalhodgeright", "totalhodgestar", "totalhodgelift",
             "totalhodgesym", "totalorthogonality", "totalmodularsymmetry")
    status = {nm: (True, None) for nm in names}

    def fail(nm, w):
        status[nm] = (False, w)

    count = 0
    while count < pairs:
        fw = frame_words[rng.randrange(len(frame_words))]
        x = random_form(calc, rng, fw)
        if x.is_zero():
            continue
        count += 1
        (j, k), _ = bidegree_split(calc, x)[0]
        p = random_element(calc, rng, length=2, terms=2)
        # right rule
        lhs = hodge.apply(x * p)
        rhs = hodge.apply(x) * apply_modular_power(total_geom, p,
                                                   2 * k - n, 2 * j - 1)
        if lhs != rhs:
            fail("totalhodgeright", pres.word_str(fw))
        # star rule
        lhs = hodge.apply(x).star()
        rhs = hodge.apply(apply_modular_power(total_geom, x,
                                              2 * k - n, 2 * j - 1).star())
        if lhs != rhs:
            fail("totalhodgestar", pres.word_str(fw))
        # lift rule (j = 0 forms)
        if j == 0:
            sign = Scalar(-1 if (n - k) % 2 else 1)
            if hodge.apply(x) != hodge.apply(x * theta) * theta * sign:
                fail("totalhodgelift", pres.word_str(fw))
        # symmetry
        y = random_form(calc, rng, fw)
        lhs = x * hodge.apply(y)
        rhs = hodge.apply_inverse(x) * apply_modular_power(total_geom, y,
                                                           2 * k - n, 2 * j - 1)
        if lhs != rhs:
            fail("totalhodgesym", pres.word_str(fw))
        # inverse metric: orthogonality across random pairs of one total
        # degree (cross terms only cancel degree by degree)
        m = j + k
        same_degree = [w for w in frame_words
                       if sum(1 for _ in w) and _total_degree(calc, w) == m] \
            or [fw]
        fw2 = same_degree[rng.randrange(len(same_degree))]
        mixed1 = x + random_form(calc, rng, fw2)
        mixed2 = y + random_form(calc, rng, fw2)
        g_all = inverse_metric(total_geom, mixed1, mixed2)
        g_split = (inverse_metric(total_geom,
                                  calc.vertical_projection(mixed1),
                                  calc.vertical_projection(mixed2))
                   + inverse_metric(total_geom,
                                    mixed1 - calc.vertical_projection(mixed1),
                                    mixed2 - calc.vertical_projection(mixed2)))
        if g_all != g_split:
            fail("totalorthogonality", pres.word_str(fw2))
        # modular symmetry (same bidegree pair); with the symbol convention
        # Delta(omega) = omega mu(weight) the identity carries the inverse
        # modular powers (see the decisions ledger)
        g12 = inverse_metric(total_geom, x, y)
        g21 = inverse_metric(total_geom, y, x)
        if g12.star() != apply_modular_power(total_geom, g21, -2 * k, -2 * j):
            fail("totalmodularsymmetry", pres.word_str(fw))
    for nm in names:
        ok, wit = status[nm]
        checks.append(CalcCheck(nm, ok, wit))
    return CalcReport(f"{total_geom.name}:modular-hodge", checks)


def base_hodge_report(geom: Geometry):
    """eq:hodge1 and eq:hodge2 for a base Hodge operator, on frame forms."""
    from .calculus import CalcCheck, CalcReport
    calc = geom.calc
    pres = calc.pres
    n = geom.hodge.top_degree
    checks = []
    ok1 = ok2 = True
    wit = None
    words = [w for w in form_frame_words(calc) if w in geom.hodge.table]
    for w in words:
        x = pres.element_from_word(w)
        k = pres.word_bidegree(w)[0]
        sx = geom.star(x)
        if any(d != n - k for d, _, _ in sx.grade_components()):
            ok1, wit = False, pres.word_str(w)
        sign = Scalar(-1 if (k * (n - k)) % 2 else 1)
        if geom.star(sx) != x * sign:
            ok1, wit = False, pres.word_str(w)
        for w2 in words:
            if pres.word_bidegree(w2)[0] != k:
                continue
            y = pres.element_from_word(w2)
            if x * geom.star(y) != geom.star_inv(x) * y:
                ok2, wit = False, (pres.word_str(w), pres.word_str(w2))
    checks.append(CalcCheck("hodge1", ok1, wit))
    checks.append(CalcCheck("hodge2", ok2, wit))
    return CalcReport(f"{geom.name}:base-hodge", checks)


def divergence_report(geom: Geometry, top_minus_one_sample):
    """tau(star(d(omega))) = 0 on a spanning sample of top-minus-one forms."""
    from .calculus import CalcCheck, CalcReport
    ok, wit = True, None
    for omega in top_minus_one_sample:
        val = geom.state.value(geom.star(geom.calc.d(omega)).degree_component(0))
        if not val.is_zero():
            ok, wit = False, omega.render()
            break
    return CalcReport(f"{geom.name}:divergence",
                      [CalcCheck("tau-star-d-vanishes", ok, wit)])
