"""Built-in presentations and calculi for the in-scope geometries.

Scenario ids: oq-su2, omega-q-su2-hor, omega-q-su2-total, podles-cp1,
nc-torus, torus-crossed-product.  Scalar parameters stay formal (q = s^2,
the torus unit lam, pihat = 2*pi); numeric work specializes later.
"""

from __future__ import annotations

from .algebra import Element, Generator, Presentation, parse_element
from .calculus import Calculus, q_integer
from .scalars import Scalar, S_ONE, S_I, S_Q, S_LAM, S_PIHAT, q_power

SCENARIOS = ("oq-su2", "omega-q-su2-hor", "omega-q-su2-total", "podles-cp1",
             "nc-torus", "torus-crossed-product")

_QI = S_Q ** -1  # q^-1


def _su2_algebra_gens():
    return [Generator("a", 0, 1, "a*"), Generator("a*", 0, -1, "a"),
            Generator("c", 0, 1, "c*"), Generator("c*", 0, -1, "c")]


def _su2_algebra_rules(pres):
    a, as_, c, cs = (pres.index[n] for n in ("a", "a*", "c", "c*"))
    one = S_ONE
    pres.add_rule((c, a), {(a, c): _QI})
    pres.add_rule((cs, a), {(a, cs): _QI})
    pres.add_rule((c, as_), {(as_, c): S_Q})
    pres.add_rule((cs, as_), {(as_, cs): S_Q})
    pres.add_rule((cs, c), {(c, cs): one})
    pres.add_rule((as_, a), {(): one, (c, cs): -one})
    pres.add_rule((a, as_), {(): one, (c, cs): -S_Q * S_Q})


def presentation_oq_su2() -> Presentation:
    pres = Presentation("oq-su2", _su2_algebra_gens())
    _su2_algebra_rules(pres)
    return pres


def _add_su2_horizontal(pres):
    """Adjoin e+ and e- with the q-commutation and Grassmann relations."""
    for name, wt, star in (("ep", 2, "em"), ("em", -2, "ep")):
        pres.gens = pres.gens + (Generator(name, 1, wt, star, star_sign=-1),)
        pres.index[name] = len(pres.gens) - 1
    pres.star_index = tuple(pres.index[g.star_name] for g in pres.gens)
    ep, em = pres.index["ep"], pres.index["em"]
    for e in (ep, em):
        for n, coeff in (("a", _QI), ("a*", S_Q), ("c", _QI), ("c*", S_Q)):
            x = pres.index[n]
            pres.add_rule((e, x), {(x, e): coeff})
    pres.add_rule((ep, ep), {})
    pres.add_rule((em, em), {})
    pres.add_rule((em, ep), {(ep, em): -q_power(-2)})


def presentation_su2_hor(name="omega-q-su2-hor") -> Presentation:
    pres = Presentation(name, _su2_algebra_gens())
    _su2_algebra_rules(pres)
    _add_su2_horizontal(pres)
    return pres


def presentation_su2_total() -> Presentation:
    """The 3-dimensional calculus, with e0 ordered first among the forms."""
    pres = Presentation("omega-q-su2-total", _su2_algebra_gens())
    _su2_algebra_rules(pres)
    pres.gens = pres.gens + (Generator("e0", 1, 0, "e0", star_sign=-1),)
    pres.index["e0"] = len(pres.gens) - 1
    pres.star_index = tuple(pres.index[g.star_name] for g in pres.gens)
    _add_su2_horizontal(pres)
    e0, ep, em = (pres.index[n] for n in ("e0", "ep", "em"))
    for n, coeff in (("a", q_power(-2)), ("a*", q_power(2)),
                     ("c", q_power(-2)), ("c*", q_power(2))):
        # e0 x = q^{-2 wt} x e0, oriented so algebra letters come first
        pres.add_rule((e0, pres.index[n]), {(pres.index[n], e0): coeff})
    pres.add_rule((e0, e0), {})
    pres.add_rule((ep, e0), {(e0, ep): -q_power(4)})
    pres.add_rule((em, e0), {(e0, em): -q_power(-4)})
    return pres


def _su2_frame1(pres):
    a = pres.gen("a")
    c = pres.gen("c")
    return ((a, c * S_Q), (a, c))


def _su2_hor_d_table(pres):
    g = pres.gen
    return {"a": g("c*") * g("ep") * (-S_Q),
            "a*": g("c") * g("em"),
            "c": g("a*") * g("ep"),
            "c*": g("a") * g("em") * (-_QI),
            "ep": pres.zero(),
            "em": pres.zero()}


def calculus_su2_hor(name="omega-q-su2-hor") -> Calculus:
    pres = presentation_su2_hor(name)
    return Calculus(name, pres, _su2_hor_d_table(pres), base_dim=2,
                    kind="horizontal", frame1=_su2_frame1(pres))


def calculus_podles() -> Calculus:
    """Podles 2D calculus, realized as the weight-0 part of the horizontal
    SU(2) calculus (its own 1-forms are not free, so the ambient frame
    picture is the engine's working coordinates)."""
    calc = calculus_su2_hor(name="podles-cp1")
    calc.base_weight_only = True
    return calc


def calculus_su2_total() -> Calculus:
    pres = presentation_su2_total()
    g = pres.gen
    d = _su2_hor_d_table(pres)
    # vertical terms: d(x) += [wt]_{q^-2} x e0 for the algebra letters,
    # d(e+/-) = -[+-2]_{q^-2} e^{+-} e0, d(e0) = q^-2 e+ e-
    q2inv = q_power(-2)
    for n in ("a", "a*", "c", "c*"):
        wt = pres.gens[pres.index[n]].weight
        d[n] = d[n] + g(n) * g("e0") * q_integer(wt, q2inv)
    d["ep"] = g("ep") * g("e0") * (-q_integer(2, q2inv))
    d["em"] = g("em") * g("e0") * (-q_integer(-2, q2inv))
    d["e0"] = g("ep") * g("em") * q2inv
    theta = g("e0") * (S_Q * S_Q / S_PIHAT) * (-S_I)   # e_kappa = -i q^2/(2 pi) e0
    return Calculus("omega-q-su2-total", pres, d, base_dim=2, kind="exterior",
                    frame1=_su2_frame1(pres), kappa=S_Q * S_Q, theta=theta)


# ---------------------------------------------------------------------------
# noncommutative torus
# ---------------------------------------------------------------------------

def _torus_gens(weighted=False):
    return [Generator("u", 0, 0, "u*", invertible=True),
            Generator("u*", 0, 0, "u", invertible=True),
            Generator("v", 0, 0, "v*", invertible=True),
            Generator("v*", 0, 0, "v", invertible=True),
            Generator("e1", 1, 0, "e1"),
            Generator("e2", 1, 0, "e2")]


def _torus_rules(pres):
    u, us, v, vs, e1, e2 = (pres.index[n] for n in ("u", "u*", "v", "v*", "e1", "e2"))
    lam, lami = S_LAM, S_ONE / S_LAM
    pres.add_rule((u, us), {(): S_ONE})
    pres.add_rule((us, u), {(): S_ONE})
    pres.add_rule((v, vs), {(): S_ONE})
    pres.add_rule((vs, v), {(): S_ONE})
    pres.add_rule((v, u), {(u, v): lam})
    pres.add_rule((v, us), {(us, v): lami})
    pres.add_rule((vs, u), {(u, vs): lami})
    pres.add_rule((vs, us), {(us, vs): lam})
    for e in (e1, e2):
        for x in (u, us, v, vs):
            pres.add_rule((e, x), {(x, e): S_ONE})
    pres.add_rule((e1, e1), {})
    pres.add_rule((e2, e2), {})
    pres.add_rule((e2, e1), {(e1, e2): -S_ONE})


def presentation_nc_torus() -> Presentation:
    pres = Presentation("nc-torus", _torus_gens())
    _torus_rules(pres)
    return pres


def calculus_nc_torus() -> Calculus:
    pres = presentation_nc_torus()
    g = pres.gen
    two_pi_i = S_PIHAT * S_I
    d = {"u": g("u") * g("e1") * two_pi_i,
         "u*": g("u*") * g("e1") * (-two_pi_i),
         "v": g("v") * g("e2") * two_pi_i,
         "v*": g("v*") * g("e2") * (-two_pi_i),
         "e1": pres.zero(), "e2": pres.zero()}
    return Calculus("nc-torus", pres, d, base_dim=2, kind="exterior")


# ---------------------------------------------------------------------------
# crossed products by extended diffeomorphisms of the torus
# ---------------------------------------------------------------------------

PHI_PRESETS = {
    "id": {"u": "u", "v": "v", "e1": "e1", "e2": "e2"},
    # the SL(2,Z) quarter-turn: U -> V, V -> U*, e1 -> e2, e2 -> -e1
    "flip": {"u": "v", "v": "u^*", "e1": "e2", "e2": "-e1"},
}


class AutomorphismError(ValueError):
    pass


def _build_phi(base: Presentation, images: dict):
    """Extend generator images to a star-compatible map name -> Element."""
    full = {}
    for name, expr in images.items():
        full[name] = parse_element(expr, base) if isinstance(expr, str) else expr
    for name in images:
        star_name = base.gens[base.index[name]].star_name
        if star_name not in full:
            full[star_name] = full[name].star()
    for g in base.gens:
        if g.name not in full:
            raise AutomorphismError(f"phi image missing for generator {g.name}")
    return full


def apply_map(images: dict, x: Element, target: Presentation) -> Element:
    out = target.zero()
    for w, c in x.terms.items():
        term = target.scalar(c)
        for i in w:
            term = term * images[x.pres.gens[i].name]
        out = out + term
    return out


def _check_phi(base: Presentation, phi: dict):
    for lhs, rhs in base.rules:
        left = apply_map(phi, base.element_from_word(lhs), base)
        right = apply_map(phi, Element(base, dict(rhs)), base)
        if left != right:
            raise AutomorphismError(
                f"phi fails on relation {base.word_str(lhs)}")
    for g in base.gens:
        if apply_map(phi, base.gen(g.name).star(), base) != phi[g.name].star():
            raise AutomorphismError(f"phi is not star-preserving at {g.name}")


def _invert_phi(base: Presentation, phi: dict):
    """Invert a generator-image automorphism whose images are signed monomials."""
    inv = {}
    for g in base.gens:
        img = phi[g.name]
        if len(img.terms) != 1:
            raise AutomorphismError(
                "phi images must be monomial words for builtin inversion")
        (word, coeff), = img.terms.items()
        if len(word) != 1:
            raise AutomorphismError(
                "phi images must be single letters for builtin inversion")
        inv[base.gens[word[0]].name] = base.gen(g.name) * (S_ONE / coeff)
    for g in base.gens:
        if g.name not in inv:
            raise AutomorphismError("phi is not invertible on generators")
    return inv


def presentation_torus_crossed(phi_images=None) -> Presentation:
    """Adjoin the weight-1 unitary U_phi implementing the automorphism."""
    base = presentation_nc_torus()
    phi = _build_phi(base, phi_images or PHI_PRESETS["id"])
    _check_phi(base, phi)
    phi_inv = _invert_phi(base, phi)

    gens = list(base.gens) + [Generator("w", 0, 1, "w*", invertible=True),
                              Generator("w*", 0, -1, "w", invertible=True)]
    pres = Presentation("torus-crossed-product", gens,
                        step_budget=base.step_budget)
    for lhs, rhs in base.rules:
        pres.add_rule(lhs, {w: c for w, c in rhs.items()})
    w, ws = pres.index["w"], pres.index["w*"]
    pres.add_rule((w, ws), {(): S_ONE})
    pres.add_rule((ws, w), {(): S_ONE})
    for i, g in enumerate(base.gens):
        img_inv = phi_inv[g.name]
        pres.add_rule((i, w), {(w,) + word: c for word, c in img_inv.terms.items()})
        img = phi[g.name]
        pres.add_rule((i, ws), {(ws,) + word: c for word, c in img.terms.items()})
    pres.phi = {n: Element(pres, {wd: c for wd, c in e.terms.items()})
                for n, e in phi.items()}
    pres.phi_inv = {n: Element(pres, {wd: c for wd, c in e.terms.items()})
                    for n, e in phi_inv.items()}
    return pres


def calculus_torus_crossed(phi_images=None, omega="0") -> Calculus:
    """Horizontal crossed-product calculus d(U_phi) = i omega U_phi."""
    pres = presentation_torus_crossed(phi_images)
    base = calculus_nc_torus()
    om = parse_element(omega, pres) if isinstance(omega, str) else omega
    if om.star() != om or (not om.is_zero() and om.bidegrees() != {(1, 0)}):
        raise AutomorphismError("omega must be a self-adjoint 1-form")
    g = pres.gen
    d = {}
    for name in ("u", "u*", "v", "v*", "e1", "e2"):
        img = base.d_table[name]
        d[name] = Element(pres, {wd: c for wd, c in img.terms.items()})
    d["w"] = (om * g("w")) * S_I
    d["w*"] = (g("w*") * om) * (-S_I)
    frame1 = ((g("w"),), (g("w"),))
    return Calculus("torus-crossed-product", pres, d, base_dim=2,
                    kind="horizontal", frame1=frame1)


# ---------------------------------------------------------------------------
# circle algebra (for the CE example on O(U(1)))
# ---------------------------------------------------------------------------

def calculus_circle() -> Calculus:
    gens = [Generator("z", 0, 1, "z*", invertible=True),
            Generator("z*", 0, -1, "z", invertible=True)]
    pres = Presentation("circle", gens)
    z, zs = pres.index["z"], pres.index["z*"]
    pres.add_rule((z, zs), {(): S_ONE})
    pres.add_rule((zs, z), {(): S_ONE})
    return Calculus("circle", pres, {"z": pres.zero(), "z*": pres.zero()},
                    base_dim=0, kind="horizontal",
                    frame1=((pres.gen("z"),), (pres.gen("z"),)))


# ---------------------------------------------------------------------------
# registry
# ---------------------------------------------------------------------------

def builtin_presentation(name, params=None) -> Presentation:
    params = params or {}
    if name == "oq-su2":
        return presentation_oq_su2()
    if name in ("omega-q-su2-hor", "podles-cp1"):
        return presentation_su2_hor(name)
    if name == "omega-q-su2-total":
        return presentation_su2_total()
    if name == "nc-torus":
        return presentation_nc_torus()
    if name == "torus-crossed-product":
        phi = params.get("phi", "id")
        if isinstance(phi, str):
            phi = PHI_PRESETS[phi]
        return presentation_torus_crossed(phi)
    raise ValueError(f"unknown scenario {name!r}")


def builtin_calculus(name, params=None) -> Calculus:
    params = params or {}
    if name in ("omega-q-su2-hor",):
        return calculus_su2_hor()
    if name == "podles-cp1":
        return calculus_podles()
    if name == "omega-q-su2-total":
        return calculus_su2_total()
    if name == "nc-torus":
        return calculus_nc_torus()
    if name == "torus-crossed-product":
        phi = params.get("phi", "id")
        if isinstance(phi, str):
            phi = PHI_PRESETS[phi]
        return calculus_torus_crossed(phi, params.get("omega", "0"))
    if name == "circle":
        return calculus_circle()
    raise ValueError(f"unknown scenario calculus {name!r}")
