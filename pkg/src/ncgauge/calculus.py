"""Differential structure on presented algebras.

A Calculus couples a Presentation with a differential table (one image per
generator, extended by the graded Leibniz rule), the bundle metadata
(space dimension, vertical deformation parameter, connection form), and
the weight-1 frame when the scenario is a quantum principal circle bundle.

The operations here cover the bundle-theoretic layer: frames for every
winding number, Frohlich automorphisms, curvature cocycles, the
Chevalley-Eilenberg vertical extension, and the total/horizontal round
trip between calculi with connection and horizontal calculi.
"""

from __future__ import annotations

import itertools

from .algebra import Element, Presentation, Generator, _accumulate_one
from .scalars import Scalar, S_ONE, S_I, S_PIHAT


class CalculusError(ValueError):
    pass


class NoFrame(CalculusError):
    pass


class NotCentral(CalculusError):
    pass


class NoSolution(CalculusError):
    pass


class Inconsistent(CalculusError):
    pass


class NotEigenvector(CalculusError):
    pass


class WrongKappa(CalculusError):
    pass


FLAT = "flat"


def q_integer(k: int, t) -> Scalar:
    """The deformed integer [k]_t = (1 - t^k)/(1 - t), exactly.

    Computed as the geometric sum so the result stays a Laurent
    polynomial; t = 1 takes the limit branch [k]_1 = k.
    """
    t = t if isinstance(t, Scalar) else Scalar(t)
    if t.is_zero():
        raise ValueError("t must be invertible")
    if t == Scalar(1):
        return Scalar(k)
    if k >= 0:
        out = Scalar(0)
        power = S_ONE
        for _ in range(k):
            out = out + power
            power = power * t
        return out
    out = Scalar(0)
    tinv = S_ONE / t
    power = tinv
    for _ in range(-k):
        out = out - power
        power = power * tinv
    return out


class Frame:
    """Weight-k frame: basis (sum e e* = 1) and strict cobasis (sum eps* eps = 1)."""

    def __init__(self, weight, basis, cobasis):
        self.weight = weight
        self.basis = tuple(basis)
        self.cobasis = tuple(cobasis)

    def verify(self):
        pres = self.basis[0].pres if self.basis else None
        one = pres.one()
        lhs = pres.zero()
        for e in self.basis:
            lhs = lhs + e * e.star()
        rhs = pres.zero()
        for eps in self.cobasis:
            rhs = rhs + eps.star() * eps
        return lhs == one, rhs == one


class Calculus:
    """A presentation with differential table and bundle metadata.

    kind is "exterior" (d^2 = 0 holds) or "horizontal" (d^2 is right
    multiplication by the curvature cocycle).  base_dim is the dimension
    N of the base calculus; total calculi have top degree N + 1.
    """

    def __init__(self, name, pres, d_table, base_dim, kind="exterior",
                 frame1=None, kappa=None, theta=None, base_weight_only=False):
        self.name = name
        self.pres = pres
        self.d_table = {k: v for k, v in d_table.items()}
        self.base_dim = base_dim
        self.kind = kind
        self.frame1 = frame1
        self.kappa = kappa
        self.theta = theta
        self.base_weight_only = base_weight_only
        self._d_memo = {}

    # ------------------------------------------------------------------
    def d(self, x: Element) -> Element:
        """Graded Leibniz extension of the generator table."""
        pres = self.pres
        out = {}
        for w, c in x.terms.items():
            for nw, nc in self._d_word(w).items():
                _accumulate_one(out, nw, nc * c)
        return Element(pres, out)

    def _d_word(self, w):
        memo = self._d_memo
        hit = memo.get(w)
        if hit is not None:
            return hit
        pres = self.pres
        gens = pres.gens
        out = {}
        sign_deg = 0
        for i, gi in enumerate(w):
            img = self.d_table.get(gens[gi].name)
            if img is not None and not img.is_zero():
                head = pres.element_from_word(w[:i])
                tail = pres.element_from_word(w[i + 1:])
                piece = head * img * tail
                coeff = S_ONE if sign_deg % 2 == 0 else -S_ONE
                for nw, nc in piece.terms.items():
                    _accumulate_one(out, nw, nc * coeff)
            sign_deg += gens[gi].degree
        memo[w] = out
        return out

    def basic_element(self, x: Element) -> bool:
        """True when x lies in the base calculus (weight 0, no vertical letter)."""
        theta_ix = self._theta_index()
        for w in x.terms:
            if self.pres.word_bidegree(w)[1] != 0:
                return False
            if theta_ix is not None and theta_ix in w:
                return False
        return True

    def _theta_index(self):
        if self.theta is None:
            return None
        ((word, _),) = tuple(self.theta.terms.items())
        return word[0]

    def vertical_projection(self, x: Element) -> Element:
        """The connection: kill every word containing the vertical letter."""
        ix = self._theta_index()
        if ix is None:
            raise CalculusError(f"{self.name} carries no vertical data")
        return Element(self.pres,
                       {w: c for w, c in x.terms.items() if ix not in w})

    # ------------------------------------------------------------------
    def window_words(self, degree_bound, weight_bound, length_bound=None):
        """Deterministic spanning sample of normal words for window checks."""
        pres = self.pres
        n = len(pres.gens)
        length_bound = length_bound if length_bound is not None else degree_bound
        words = [()]
        frontier = [()]
        for _ in range(length_bound):
            new = []
            for w in frontier:
                for g in range(n):
                    cand = w + (g,)
                    d, k = pres.word_bidegree(cand)
                    if d > degree_bound or abs(k) > weight_bound:
                        continue
                    if pres._find_redex(cand) is not None:
                        continue
                    new.append(cand)
            words.extend(new)
            frontier = new
        # pure powers push the weight window even when length_bound is small
        for g in range(n):
            gen = pres.gens[g]
            if gen.degree == 0 and gen.weight != 0:
                for k in range(length_bound + 1, weight_bound + 1):
                    cand = (g,) * k
                    if pres._find_redex(cand) is None:
                        words.append(cand)
        return words


class CalcCheck:
    def __init__(self, name, ok, witness=None):
        self.name = name
        self.ok = ok
        self.witness = witness

    def __repr__(self):
        return f"CalcCheck({self.name}: {'pass' if self.ok else 'FAIL'})"


class CalcReport:
    def __init__(self, calculus_name, checks):
        self.calculus = calculus_name
        self.checks = checks

    @property
    def ok(self):
        return all(c.ok for c in self.checks)

    def failures(self):
        return [c for c in self.checks if not c.ok]

    def __repr__(self):
        return f"CalcReport({self.calculus}: {'pass' if self.ok else 'FAIL'})"


def differential(calc: Calculus, x: Element) -> Element:
    return calc.d(x)


def check_calculus(calc: Calculus, degree_bound=2, weight_bound=2) -> CalcReport:
    """Verify d^2, star compatibility, and Leibniz consistency on relations.

    Exterior calculi must have d^2 = 0 on the whole sampled window; for a
    horizontal calculus d^2 must be right multiplication by i F(weight),
    which reduces to d^2 = 0 exactly on the basic part.
    """
    if degree_bound < 2 or weight_bound < 2:
        raise ValueError("bounds must be >= 2")
    pres = calc.pres
    checks = []

    for g in pres.gens:
        x = pres.gen(g.name)
        lhs = calc.d(x.star())
        rhs = calc.d(x).star()
        checks.append(CalcCheck(f"d-star-compat[{g.name}]", lhs == rhs,
                                None if lhs == rhs else (lhs - rhs).render()))

    for lhs_word, rhs_terms in pres.rules:
        left = calc.d(pres.element_from_word(lhs_word))
        right = calc.d(Element(pres, dict(rhs_terms)))
        ok = left == right
        checks.append(CalcCheck(f"leibniz[{pres.word_str(lhs_word)}]", ok,
                                None if ok else (left - right).render()))

    curvature = {}
    if calc.kind == "horizontal":
        try:
            f1 = curvature_cocycle(calc, 1)
            curvature[1] = f1
        except CalculusError as exc:
            checks.append(CalcCheck("curvature-solve", False, str(exc)))
            curvature = None

    words = calc.window_words(degree_bound, weight_bound,
                              length_bound=min(degree_bound + 1, 3))
    bad = []
    for w in words:
        x = pres.element_from_word(w)
        dd = calc.d(calc.d(x))
        if calc.kind == "exterior":
            if not dd.is_zero():
                bad.append(pres.word_str(w))
        else:
            k = pres.word_bidegree(w)[1]
            if curvature is None:
                continue
            if k not in curvature:
                try:
                    curvature[k] = curvature_cocycle(calc, k)
                except CalculusError:
                    curvature[k] = None
            fk = curvature[k]
            if fk is None:
                if not dd.is_zero():
                    bad.append(pres.word_str(w))
            elif dd != x * (fk * S_I):
                bad.append(pres.word_str(w))
    label = "d-squared" if calc.kind == "exterior" else "d-squared-curvature"
    checks.append(CalcCheck(label, not bad, bad[:4] or None))

    star_bad = pres.star_closure_report()
    checks.append(CalcCheck("rules-star-closed", not star_bad, star_bad or None))
    return CalcReport(calc.name, checks)


# ---------------------------------------------------------------------------
# frames and line bimodules
# ---------------------------------------------------------------------------

def spectral_frame(calc: Calculus, k: int) -> Frame:
    """Frame of the winding-number-k spectral subspace, from the weight-1 frame.

    Higher frames are the k-fold products; negative weights star the
    opposite family.
    """
    pres = calc.pres
    if k == 0:
        return Frame(0, [pres.one()], [pres.one()])
    if calc.frame1 is None:
        raise NoFrame(f"{calc.name} supplies no weight-1 frame")
    e1, eps1 = calc.frame1
    n = abs(k)
    basis_products = [_product(pres, combo)
                      for combo in itertools.product(e1, repeat=n)]
    cobasis_products = [_product(pres, combo)
                        for combo in itertools.product(eps1, repeat=n)]
    if k > 0:
        return Frame(k, basis_products, cobasis_products)
    return Frame(k, [p.star() for p in cobasis_products],
                 [p.star() for p in basis_products])


def _product(pres, elements):
    out = pres.one()
    for e in elements:
        out = out * e
    return out


def line_bimodule_report(calc: Calculus, k: int, samples=(), rng=None) -> CalcReport:
    """Exact frame identities plus inner-product axioms on frame elements."""
    frame = spectral_frame(calc, k)
    pres = calc.pres
    checks = []
    b_ok, c_ok = frame.verify()
    checks.append(CalcCheck(f"frame-basis-identity[k={k}]", b_ok))
    checks.append(CalcCheck(f"frame-cobasis-identity[k={k}]", c_ok))

    pool = list(samples) or list(frame.basis)
    if rng is not None:
        pool = pool + [random_element(calc, rng, weight=k, length=max(2, abs(k)))
                       for _ in range(3)]
    ok = True
    witness = None
    for p in pool:
        recon = pres.zero()
        for e in frame.basis:
            recon = recon + e * (e.star() * p)
        if recon != p:
            ok = False
            witness = p.render()
            break
    checks.append(CalcCheck(f"frame-reconstruction[k={k}]", ok, witness))

    # imprimitivity instances on frame elements: <x, b y> = <b* x, y> and
    # <xbar, ybar> z = x <y, z>
    imp = True
    b = frame.basis[0] * frame.basis[0].star()  # a degree-0 sample coefficient
    for x in frame.basis[:2]:
        for y in frame.cobasis[:2]:
            if x.star() * (b * y) != (b.star() * x).star() * y:
                imp = False
            for z in frame.basis[:2]:
                if (x * y.star()) * z != x * (y.star() * z):
                    imp = False
    checks.append(CalcCheck(f"imprimitivity-instances[k={k}]", imp))
    return CalcReport(f"{calc.name}:line-bimodule", checks)


def bimodule_connection_report(calc: Calculus, k: int, rng=None) -> CalcReport:
    """Braiding, right Leibniz, and Hermitian-connection identities at weight k.

    All identities are realized inside the horizontal calculus through the
    frame isomorphism; each one is checked exactly on frame elements and,
    when an rng is supplied, on random window elements.
    """
    pres = calc.pres
    frame = spectral_frame(calc, k)
    checks = []
    one_forms = [pres.element_from_word((i,)) for i, g in enumerate(pres.gens)
                 if g.degree == 1]

    ok, witness = True, None
    for beta in one_forms:
        for p in frame.basis:
            target = beta * p
            recon = pres.zero()
            for e in frame.basis:
                recon = recon + e * (e.star() * target)
            if recon != target:
                ok, witness = False, (beta.render(), p.render())
    checks.append(CalcCheck(f"braiding-well-defined[k={k}]", ok, witness))

    ok = True
    for alpha in one_forms[:2]:
        for beta in one_forms[:2]:
            for p in frame.basis[:2]:
                if alpha * (beta * p) != (alpha * beta) * p:
                    ok = False
    checks.append(CalcCheck(f"braiding-associativity[k={k}]", ok))

    samples = list(frame.basis)
    if rng is not None:
        samples += [random_element(calc, rng, weight=k, length=max(2, abs(k) + 1))
                    for _ in range(4)]
    zero_wt = [pres.one()] + [pres.gen(g.name) * pres.gen(g.name).star()
                              for g in pres.gens if g.degree == 0][:2]
    ok, witness = True, None
    for p in samples:
        for b in zero_wt:
            lhs = calc.d(p * b)
            rhs = calc.d(p) * b + p * calc.d(b)
            if lhs != rhs:
                ok, witness = False, p.render()
    checks.append(CalcCheck(f"right-leibniz[k={k}]", ok, witness))

    ok, witness = True, None
    for p in samples[:3]:
        for q in samples[:3]:
            inner = p.star() * q
            lhs = calc.d(inner)
            rhs = calc.d(p).star() * q + p.star() * calc.d(q)
            if lhs != rhs:
                ok, witness = False, (p.render(), q.render())
    checks.append(CalcCheck(f"hermitian-connection[k={k}]", ok, witness))
    return CalcReport(f"{calc.name}:connection[k={k}]", checks)


# ---------------------------------------------------------------------------
# Frohlich automorphism and curvature
# ---------------------------------------------------------------------------

def base_spanning_words(calc: Calculus, length=3):
    """Normal words of weight 0 and form degree <= 1 without the vertical
    letter: they generate the base calculus Omega_B as an algebra (the
    invariant subalgebra is generated by invariant words of bounded length,
    and d(B) sits in degree 1)."""
    pres = calc.pres
    theta_ix = calc._theta_index()
    out = []
    frontier = [()]
    for _ in range(length):
        new = []
        for w in frontier:
            for i in range(len(pres.gens)):
                if i == theta_ix:
                    continue
                cand = w + (i,)
                d, k = pres.word_bidegree(cand)
                if d > 1 or abs(k) > length:
                    continue
                if pres._find_redex(cand) is not None:
                    continue
                new.append(cand)
                if k == 0:
                    out.append(cand)
        frontier = new
    return out


def is_graded_central(calc: Calculus, beta: Element) -> bool:
    """Graded centrality in the base calculus: beta supercommutes with a
    generating set of weight-0 words."""
    pres = calc.pres
    comps = beta.grade_components()
    for w in base_spanning_words(calc):
        x = pres.element_from_word(w)
        n = pres.word_bidegree(w)[0]
        for d, _, part in comps:
            sign = -1 if (d % 2) and (n % 2) else 1
            if part * x != (x * part) * Scalar(sign):
                return False
    return True


def frohlich_apply(calc: Calculus, j: int, beta: Element) -> Element:
    """Phi-hat^j(beta), solved against the weight-1 frame.

    Phi-hat(beta) = sum_i e_i beta e_i*; the inverse uses the cobasis.
    Raises NotCentral when beta is not graded central, NoSolution when
    the result fails to be central (broken frame).
    """
    if not is_graded_central(calc, beta):
        raise NotCentral("argument is not graded central")
    if j == 0:
        return beta
    frame = spectral_frame(calc, 1)
    out = beta
    for _ in range(abs(j)):
        acc = calc.pres.zero()
        if j > 0:
            for e in frame.basis:
                acc = acc + e * out * e.star()
        else:
            for eps in frame.cobasis:
                acc = acc + eps.star() * out * eps
        out = acc
    if not is_graded_central(calc, out):
        raise NoSolution("Frohlich image failed centrality; frame is broken")
    return out


def curvature_cocycle(calc: Calculus, k: int) -> Element:
    """The curvature 1-cocycle value F(k), solved from d^2 on a weight-k frame.

    d_hor^2(p) = p . i F(k) for p of weight k; the solution is verified to
    be central, self-adjoint, closed, and consistent on every frame
    element.
    """
    pres = calc.pres
    if k == 0:
        return pres.zero()
    frame = spectral_frame(calc, k)
    acc = pres.zero()
    for eps in frame.cobasis:
        acc = acc + eps.star() * calc.d(calc.d(eps))
    f = acc * (-S_I)
    target = f * S_I
    for eps in frame.cobasis:
        if calc.d(calc.d(eps)) != eps * target:
            raise Inconsistent(
                f"d^2 is not right multiplication by a single 2-form at k={k}")
    for e in frame.basis:
        if calc.d(calc.d(e)) != e * target:
            raise Inconsistent(
                f"d^2 inconsistent between basis and cobasis at k={k}")
    if not is_graded_central(calc, f):
        raise Inconsistent("curvature is not central")
    if f.star() != f:
        raise Inconsistent("curvature is not self-adjoint")
    if not calc.d(f).is_zero():
        raise Inconsistent("curvature is not closed")
    return f


def vertical_parameter(calc: Calculus):
    """Eigenvalue kappa with Phi-hat(F(1)) = kappa F(1), or FLAT."""
    f1 = curvature_cocycle(calc, 1)
    if f1.is_zero():
        return FLAT
    image = frohlich_apply(calc, 1, f1)
    kappa = None
    for w, c in f1.terms.items():
        ic = image.terms.get(w)
        if ic is None:
            raise NotEigenvector("Phi-hat(F(1)) is not proportional to F(1)")
        ratio = ic / c
        if kappa is None:
            kappa = ratio
        elif kappa != ratio:
            raise NotEigenvector("Phi-hat(F(1)) is not proportional to F(1)")
    if image != f1 * kappa:
        raise NotEigenvector("Phi-hat(F(1)) is not proportional to F(1)")
    return kappa


# ---------------------------------------------------------------------------
# modular symbols
# ---------------------------------------------------------------------------

class ModularSymbol:
    """Weight cocycle mu: Z -> positive central scalars; Lambda_t is mu(1)=1/t."""

    def __init__(self, mu1: Scalar, label=None):
        self.mu1 = mu1 if isinstance(mu1, Scalar) else Scalar(mu1)
        self.label = label

    @staticmethod
    def scale(t) -> "ModularSymbol":
        t = t if isinstance(t, Scalar) else Scalar(t)
        return ModularSymbol(S_ONE / t, label=f"Lambda[{t.render()}]")

    def __call__(self, j: int) -> Scalar:
        return self.mu1 ** j

    def __eq__(self, other):
        return isinstance(other, ModularSymbol) and self.mu1 == other.mu1

    def __repr__(self):
        return self.label or f"ModularSymbol(mu1={self.mu1.render()})"


def modular_apply(mu: ModularSymbol, x: Element) -> Element:
    out = x.pres.zero()
    for _, k, part in x.grade_components():
        out = out + part * mu(k)
    return out


# ---------------------------------------------------------------------------
# Chevalley-Eilenberg extension and the total/horizontal round trip
# ---------------------------------------------------------------------------

VERTICAL_GEN = "ek"


def ce_extension(calc: Calculus, kappa, vertical_name=VERTICAL_GEN,
                 curvature_correction=None, name=None) -> Calculus:
    """Adjoin the self-adjoint vertical 1-form e_kappa with the deformed
    commutation relations and the vertical differential term.

    With curvature_correction = None this is the plain CE_kappa functor
    (d(e_kappa) = 0); the total reconstruction passes -kappa/(2 pi) F(1).
    """
    kappa = kappa if isinstance(kappa, Scalar) else Scalar(kappa)
    pres = calc.pres
    gens = list(pres.gens) + [Generator(vertical_name, 1, 0, vertical_name, 1)]
    out = Presentation(name or f"CE[{calc.name}]", gens,
                       step_budget=pres.step_budget)
    ek = out.index[vertical_name]
    for lhs, rhs in pres.rules:
        out.add_rule(lhs, {w: c for w, c in rhs.items()})
    out.add_rule((ek, ek), {})
    for i, g in enumerate(pres.gens):
        # e_k omega = (-1)^n kappa^{-weight} omega e_k; orient so that the
        # vertical letter moves right past algebra letters and left past
        # form letters (normal words: algebra prefix, e_k, then forms)
        if g.degree == 0:
            out.add_rule((ek, i), {(i, ek): kappa ** (-g.weight)})
        else:
            coeff = kappa ** g.weight
            if g.degree % 2:
                coeff = -coeff
            out.add_rule((i, ek), {(ek, i): coeff})

    d_table = {}
    ek_elem = out.element_from_word((ek,))
    for g in pres.gens:
        old = calc.d_table.get(g.name, pres.zero())
        moved = Element(out, {w: c for w, c in old.terms.items()})
        qk = q_integer(g.weight, kappa)
        vertical = ek_elem * out.element_from_word(
            (out.index[g.name],)) * (S_PIHAT * S_I * qk)
        d_table[g.name] = vertical + moved
    if curvature_correction is None:
        d_table[vertical_name] = out.zero()
    else:
        corr = Element(out, {w: c for w, c in curvature_correction.terms.items()})
        d_table[vertical_name] = corr * (-(kappa / S_PIHAT))

    frame1 = None
    if calc.frame1 is not None:
        lift = lambda els: tuple(Element(out, dict(e.terms)) for e in els)
        frame1 = (lift(calc.frame1[0]), lift(calc.frame1[1]))
    return Calculus(name or f"CE[{calc.name}]", out, d_table,
                    base_dim=calc.base_dim, kind="exterior", frame1=frame1,
                    kappa=kappa, theta=ek_elem)


def tot(calc_hor: Calculus, kappa) -> Calculus:
    """Total reconstruction: CE_kappa extension with the curvature-corrected
    differential; errors with WrongKappa when the eigenvalue disagrees."""
    kappa = kappa if isinstance(kappa, Scalar) else Scalar(kappa)
    vp = vertical_parameter(calc_hor)
    if vp is not FLAT and vp != kappa:
        raise WrongKappa(
            f"vertical parameter of {calc_hor.name} is {vp.render()}, "
            f"not {kappa.render()}")
    f1 = curvature_cocycle(calc_hor, 1)
    total = ce_extension(calc_hor, kappa, curvature_correction=f1,
                         name=f"Tot[{calc_hor.name}]")
    return total


def hor(calc_total: Calculus) -> Calculus:
    """Extract the horizontal calculus: drop the vertical letter from the
    presentation and project the differential table."""
    if calc_total.theta is None:
        raise CalculusError("not a total calculus")
    ix = calc_total._theta_index()
    pres = calc_total.pres
    keep = [i for i in range(len(pres.gens)) if i != ix]
    remap = {old: new for new, old in enumerate(keep)}
    gens = [pres.gens[i] for i in keep]
    out = Presentation(f"Hor[{calc_total.name}]", gens,
                       step_budget=pres.step_budget)
    for lhs, rhs in pres.rules:
        if ix in lhs or any(ix in w for w in rhs):
            continue
        out.add_rule(tuple(remap[i] for i in lhs),
                     {tuple(remap[i] for i in w): c for w, c in rhs.items()})
    d_table = {}
    for i in keep:
        g = pres.gens[i]
        img = calc_total.vertical_projection(
            calc_total.d_table.get(g.name, pres.zero()))
        d_table[g.name] = Element(out, {tuple(remap[j] for j in w): c
                                        for w, c in img.terms.items()})
    frame1 = None
    if calc_total.frame1 is not None:
        move = lambda els: tuple(
            Element(out, {tuple(remap[j] for j in w): c
                          for w, c in e.terms.items()}) for e in els)
        frame1 = (move(calc_total.frame1[0]), move(calc_total.frame1[1]))
    return Calculus(f"Hor[{calc_total.name}]", out, d_table,
                    base_dim=calc_total.base_dim, kind="horizontal",
                    frame1=frame1)


def connection_data(calc_total: Calculus):
    """Extract (theta, F_Pi) and re-derive kappa from the eigenvalue equation."""
    if calc_total.theta is None:
        raise CalculusError("not a total calculus")
    theta = calc_total.theta
    f_pi = -calc_total.d(theta)
    if not calc_total.basic_element(f_pi):
        raise Inconsistent("curvature 2-form of theta is not basic")
    return theta, f_pi


def connection_report(calc_total: Calculus, weights=range(-3, 4), rng=None) -> CalcReport:
    """Axioms for the connection 1-form: self-adjointness, nilpotency,
    eq:conncent against every generator, and eq:connection on frames."""
    theta = calc_total.theta
    kappa = calc_total.kappa
    pres = calc_total.pres
    checks = [CalcCheck("theta-self-adjoint", theta.star() == theta),
              CalcCheck("theta-squared-zero", (theta * theta).is_zero())]
    ok, witness = True, None
    for i, g in enumerate(pres.gens):
        x = pres.element_from_word((i,))
        sign = Scalar(-1 if g.degree % 2 else 1)
        lhs = theta * x
        rhs = x * theta * (sign * kappa ** (-g.weight))
        if lhs != rhs:
            ok, witness = False, g.name
    checks.append(CalcCheck("conncent-generators", ok, witness))

    ok, witness = True, None
    for k in weights:
        if k == 0:
            continue
        try:
            frame = spectral_frame(calc_total, k)
        except NoFrame:
            continue
        coeff = S_PIHAT * S_I * q_integer(k, kappa) * kappa ** (-k)
        for p in frame.basis:
            lhs = calc_total.d(p) - calc_total.vertical_projection(calc_total.d(p))
            rhs = p * theta * coeff
            if lhs != rhs:
                ok, witness = False, f"k={k}:{p.render()}"
    checks.append(CalcCheck("connection-equation-frames", ok, witness))
    return CalcReport(f"{calc_total.name}:connection-form", checks)


# ---------------------------------------------------------------------------
# randomness helpers (seeded, for property sweeps)
# ---------------------------------------------------------------------------

def random_element(calc: Calculus, rng, weight=None, length=3, terms=2,
                   degree=0) -> Element:
    """Seeded random element: sum of random words of the requested bidegree."""
    pres = calc.pres
    pool_deg0 = [i for i, g in enumerate(pres.gens) if g.degree == 0]
    pool_deg1 = [i for i, g in enumerate(pres.gens) if g.degree == 1]
    out = pres.zero()
    attempts = 0
    found = 0
    while found < terms and attempts < 400:
        attempts += 1
        wlen = rng.randrange(0, length + 1)
        word = tuple(rng.choice(pool_deg0) for _ in range(wlen))
        for _ in range(degree):
            word = word + (rng.choice(pool_deg1),)
        d, k = pres.word_bidegree(word)
        if weight is not None and k != weight:
            continue
        coeff = Scalar(rng.randrange(-3, 4))
        if coeff.is_zero():
            coeff = S_ONE
        out = out + pres.element_from_word(word, coeff)
        found += 1
    return out
