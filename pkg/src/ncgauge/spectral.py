"""Finite numeric models: weight/degree truncations with exact Gram
assembly, matrices for multiplication/differential/Dirac operators,
projectability diagnostics, modular twists, and the twisted Lipschitz
seminorms with the quantum-SU(2) comparison.

All symbolic preprocessing is exact; numbers appear only when a Scalar is
specialized at the numeric parameters.  Operator identities are asserted
on interior columns, i.e. basis vectors whose symbolic images stay inside
the window, so truncation edges never produce spurious failures.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction

import numpy as np

from .algebra import Element
from .calculus import Calculus, ModularSymbol, q_integer, spectral_frame
from .riemann import (Geometry, HodgeOperator, State, split_word,
                      form_frame_words, parity, haar_state_closed)
from .scalars import Scalar

DEFAULT_SEED = 0x5EED


class TruncationError(ValueError):
    pass


class NumericContext:
    """Numeric specialization map: s -> sqrt(q), lam -> exp(2 pi i theta),
    pihat -> 2 pi."""

    def __init__(self, q=Fraction(1, 2), theta=Fraction(5, 17)):
        self.q = Fraction(q)
        self.theta = Fraction(theta)
        self.s_val = math.sqrt(float(self.q))
        self.lam_val = cmath.exp(2j * math.pi * float(self.theta))
        self.pihat_val = 2.0 * math.pi

    def scal(self, c: Scalar) -> complex:
        return c.specialize(self.s_val, self.lam_val, self.pihat_val)

    def q_float(self) -> float:
        return float(self.q)


class SpecOp:
    """A numeric operator on the truncation with its interior column mask."""

    __slots__ = ("name", "mat", "mask")

    def __init__(self, name, mat, mask=None):
        self.name = name
        self.mat = mat
        self.mask = (np.ones(mat.shape[1], dtype=bool)
                     if mask is None else mask)

    def compose(self, other, name=None):
        mat = self.mat @ other.mat
        bad = ~self.mask
        touched = (np.abs(other.mat[bad, :]) > 1e-14).any(axis=0) if bad.any() \
            else np.zeros(other.mat.shape[1], dtype=bool)
        mask = other.mask & ~touched
        return SpecOp(name or f"{self.name}*{other.name}", mat, mask)

    def __add__(self, other):
        return SpecOp(f"{self.name}+{other.name}", self.mat + other.mat,
                      self.mask & other.mask)

    def __sub__(self, other):
        return SpecOp(f"{self.name}-{other.name}", self.mat - other.mat,
                      self.mask & other.mask)

    def scale(self, c):
        return SpecOp(self.name, c * self.mat, self.mask)

    def commutator(self, other):
        return self.compose(other) - other.compose(self)


def op_norm(mat) -> float:
    if mat.size == 0:
        return 0.0
    return float(np.linalg.norm(mat, 2))


class Truncation:
    """Orthonormalized window with block-diagonal Gram.

    keys are (sector, word) pairs; sectors carry tensor-leg data (form
    words for Hodge-de Rham windows, spinor legs for Dirac windows) and
    words are normal algebra words.  The Gram matrix is assembled exactly
    from the state and specialized once.
    """

    def __init__(self, name, keys, block_key, extent, ip, ctx, bounds):
        self.name = name
        self.keys = list(keys)
        self.index = {k: i for i, k in enumerate(self.keys)}
        self.ctx = ctx
        self.bounds = bounds
        self._extent = extent
        self.block_key = block_key
        self.blocks = {}
        for i, k in enumerate(self.keys):
            self.blocks.setdefault(block_key(k), []).append(i)
        n = len(self.keys)
        self.gram = np.zeros((n, n), dtype=complex)
        for ids in self.blocks.values():
            for a, i in enumerate(ids):
                for j in ids[a:]:
                    v = ip(self.keys[i], self.keys[j])
                    self.gram[i, j] = v
                    self.gram[j, i] = v.conjugate()
        diag = np.real(np.diag(self.gram)).copy()
        if (diag <= 0).any():
            raise TruncationError("Gram has a nonpositive diagonal entry")
        scale = 1.0 / np.sqrt(diag)
        normalized = self.gram * scale[:, None] * scale[None, :]
        self.min_gram_eig = float("inf")
        self.T = np.zeros((n, n), dtype=complex)
        self.Tinv = np.zeros((n, n), dtype=complex)
        for ids in self.blocks.values():
            sub = normalized[np.ix_(ids, ids)]
            eigs, vecs = np.linalg.eigh(sub)
            self.min_gram_eig = min(self.min_gram_eig, float(eigs[0]))
            if eigs[0] <= 1e-10:
                raise TruncationError(
                    f"Gram block is not positive definite (min eig {eigs[0]:g})")
            # Loewdin orthonormalization: T = G^{-1/2} is the best-conditioned
            # transform with T* G T = 1
            t = (vecs * (eigs ** -0.5)[None, :]) @ vecs.conj().T
            tinv = (vecs * (eigs ** 0.5)[None, :]) @ vecs.conj().T
            # fold the unit-norm rescaling of the raw basis into the maps
            self.T[np.ix_(ids, ids)] = scale[ids][:, None] * t
            self.Tinv[np.ix_(ids, ids)] = tinv * (1.0 / scale[ids])[None, :]

    # ------------------------------------------------------------------
    def in_window(self, key) -> bool:
        if key in self.index:
            return True
        e = self._extent(key)
        return all(a <= b for a, b in zip(e, self.bounds)) and False

    def matrix_of(self, op, name) -> SpecOp:
        """Assemble the on-basis matrix of a symbolic key-level operator.

        op(key) returns {key: Scalar}; a column is interior when the whole
        symbolic image stays inside the window.
        """
        n = len(self.keys)
        raw = np.zeros((n, n), dtype=complex)
        mask = np.ones(n, dtype=bool)
        for j, key in enumerate(self.keys):
            for tk, c in op(key).items():
                i = self.index.get(tk)
                if i is None:
                    mask[j] = False
                    continue
                raw[i, j] += self.ctx.scal(c)
        return SpecOp(name, self.Tinv @ raw @ self.T, mask)

    def diagonal_of(self, fn, name) -> SpecOp:
        vals = np.array([fn(k) for k in self.keys], dtype=complex)
        return SpecOp(name, np.diag(vals))

    def weights(self):
        return np.array([self.block_key(k)[0] for k in self.keys])

    def interior_ids(self, margin):
        out = []
        for i, k in enumerate(self.keys):
            e = self._extent(k)
            if all(a + m <= b for a, m, b in zip(e, margin, self.bounds)):
                out.append(i)
        return np.array(out, dtype=int)


# ---------------------------------------------------------------------------
# algebra window enumerators
# ---------------------------------------------------------------------------

def su2_words(pres, weight, cap):
    """PBW words of the given weight with c-degree m+n <= cap."""
    a, as_, c, cs = (pres.index[n] for n in ("a", "a*", "c", "c*"))
    out = []
    for m in range(cap + 1):
        for n in range(cap - m + 1):
            i = weight - m + n
            word = ((a,) * i if i >= 0 else (as_,) * (-i)) + (c,) * m + (cs,) * n
            out.append(word)
    return out


def su2_extent(pres, word):
    cdeg = sum(1 for i in word if pres.gens[i].name in ("c", "c*", "e0", "ek"))
    # form letters other than the vertical one shift the weight, so the
    # weight bound is the only other extent component
    wt = pres.word_bidegree(word)[1]
    cdeg = sum(1 for i in word if pres.gens[i].name in ("c", "c*"))
    return (abs(wt), cdeg)


def torus_words(pres, kmax_u, kmax_v, w_power=None):
    u, us, v, vs = (pres.index[n] for n in ("u", "u*", "v", "v*"))
    out = []
    head = ()
    if w_power is not None and w_power != 0:
        w, ws = pres.index["w"], pres.index["w*"]
        head = (w,) * w_power if w_power > 0 else (ws,) * (-w_power)
    for m in range(-kmax_u, kmax_u + 1):
        for n in range(-kmax_v, kmax_v + 1):
            word = head + ((u,) * m if m >= 0 else (us,) * (-m)) \
                + ((v,) * n if n >= 0 else (vs,) * (-n))
            out.append(word)
    return out


def torus_extent(pres, word):
    names = [pres.gens[i].name for i in word]
    w = abs(sum(1 if n == "w" else -1 if n == "w*" else 0 for n in names))
    m = abs(sum(1 if n == "u" else -1 if n == "u*" else 0 for n in names))
    n = abs(sum(1 if n == "v" else -1 if n == "v*" else 0 for n in names))
    return (w, max(m, n))


def algebra_words(pres, J, L):
    """Scenario-aware window enumeration keyed by total U(1) weight."""
    if "a" in pres.index:
        return {j: su2_words(pres, j, L) for j in range(-J, J + 1)}
    if "w" in pres.index:
        return {j: torus_words(pres, L, L, w_power=j) for j in range(-J, J + 1)}
    return {0: torus_words(pres, J, L)}


def algebra_extent(pres, word):
    if "a" in pres.index:
        return su2_extent(pres, word)
    return torus_extent(pres, word)


# ---------------------------------------------------------------------------
# Hodge-de Rham truncation
# ---------------------------------------------------------------------------

def truncate(geom: Geometry, J: int, L: int, ctx: NumericContext) -> Truncation:
    """Orthonormalized window of the geometry's form module.

    Basis keys are (form word, algebra word); the Gram matrix comes from
    <x f, y f> = tau applied to the top coefficient of (x f)* star(y f),
    assembled exactly.
    """
    calc = geom.calc
    pres = calc.pres
    sectors = [w for w in form_frame_words(calc) if w in geom.hodge.table]
    top = max(sectors, key=len)
    c_top_elem = geom.hodge.table[top]
    c_top = c_top_elem.terms.get((), Scalar(0))
    star_cache = {f: geom.hodge.table[f] for f in sectors}
    fstar_cache = {f: pres.element_from_word(f).star() for f in sectors}
    by_weight = algebra_words(pres, J, L)

    keys = []
    for f in sectors:
        wf = pres.word_bidegree(f)[1]
        for j in sorted(by_weight):
            if abs(j + wf) > J:
                continue
            for w in by_weight[j]:
                keys.append((f, w))

    elem_cache = {}

    def elem(word):
        e = elem_cache.get(word)
        if e is None:
            e = pres.element_from_word(word)
            elem_cache[word] = e
        return e

    star_alg_cache = {}

    def ip(k1, k2):
        f, x = k1
        f2, y = k2
        if f != f2:
            return 0j
        sx = star_alg_cache.get(x)
        if sx is None:
            sx = elem(x).star()
            star_alg_cache[x] = sx
        u = fstar_cache[f] * (sx * elem(y)) * star_cache[f]
        p_top = {}
        for w, c in u.terms.items():
            prefix, form = split_word(calc, w)
            if form == top:
                p_top[prefix] = c
        if not p_top:
            return 0j
        # multiply by the top-form constant first so the 2*pi factors
        # cancel exactly before the state evaluates at rational q
        val = geom.state.value(Element(pres, p_top) * c_top)
        return ctx.scal(val)

    def block_key(key):
        f, w = key
        return (pres.word_bidegree(f + w)[1], f)

    def extent(key):
        f, w = key
        ew, ec = algebra_extent(pres, w)
        return (abs(pres.word_bidegree(f + w)[1]), ec)

    return Truncation(f"trunc[{geom.name}]", keys, block_key, extent, ip,
                      ctx, (J, L))


def element_op(trunc: Truncation, geom: Geometry, fn):
    """Lift a symbolic Element -> Element map to a key-level operator."""
    calc = geom.calc
    pres = calc.pres

    def op(key):
        f, w = key
        img = fn(pres.element_from_word(w + f))
        out = {}
        for word, c in img.terms.items():
            prefix, form = split_word(calc, word)
            tk = (form, prefix)
            out[tk] = out.get(tk, Scalar(0)) + c
        return out

    return op


def left_mult_matrix(trunc, geom, p: Element, name=None) -> SpecOp:
    return trunc.matrix_of(element_op(trunc, geom, lambda x: p * x),
                           name or f"pi[{p.render()}]")


def d_matrix(trunc, geom) -> SpecOp:
    return trunc.matrix_of(element_op(trunc, geom, geom.calc.d), "d")


def dstar_matrix(trunc, geom) -> SpecOp:
    from .riemann import codifferential
    return trunc.matrix_of(
        element_op(trunc, geom, lambda x: codifferential(geom, x)), "d*")


def pi_d_matrix(trunc, geom, omega: Element, name=None) -> SpecOp:
    """Represented 1-form of the Hodge-de Rham representation:
    pi_D(omega) eta = i omega eta + i star^-1(omega star(gamma eta))."""
    from .scalars import S_I

    def fn(eta):
        first = omega * eta
        second = geom.star_inv(omega * geom.star(parity(geom.calc, eta)))
        return (first + second) * S_I

    return trunc.matrix_of(element_op(trunc, geom, fn),
                           name or f"piD[{omega.render()}]")


def lambda_matrix(trunc, t: float, name=None) -> SpecOp:
    ws = trunc.weights()
    return SpecOp(name or f"Lambda[{t}]",
                  np.diag(np.power(float(t), -ws.astype(float))))


def partial_kappa_matrix(trunc, kappa: float) -> SpecOp:
    ws = trunc.weights()
    vals = np.array([2j * math.pi * _q_int_f(int(j), kappa) for j in ws])
    return SpecOp("partial_kappa", np.diag(vals))


def _q_int_f(k: int, t: float) -> float:
    if abs(t - 1.0) < 1e-15:
        return float(k)
    return (1.0 - t ** k) / (1.0 - t)


def projection_matrix(trunc, geom) -> SpecOp:
    theta_ix = geom.calc._theta_index()
    vals = np.array([0.0 if theta_ix in f else 1.0 for f, _ in trunc.keys],
                    dtype=complex)
    return SpecOp("Pi", np.diag(vals))


def modular_symbol_matrix(trunc, symbol: ModularSymbol, ctx, name=None) -> SpecOp:
    ws = trunc.weights()
    vals = np.array([ctx.scal(symbol(-int(j))) for j in ws])
    return SpecOp(name or "N", np.diag(vals))


# ---------------------------------------------------------------------------
# commutator representations
# ---------------------------------------------------------------------------

class CommutatorRep:
    """A truncated commutator representation.

    pi(element) and pi_D(one-form) produce SpecOps; D and Gamma are fixed
    matrices.  kappa is the numeric vertical parameter when the
    representation is projectable.
    """

    def __init__(self, name, trunc, pi, pi_D, D, Gamma=None, kappa=None,
                 d_alg=None, extra=None):
        self.name = name
        self.trunc = trunc
        self.pi = pi
        self.pi_D = pi_D
        self.D = D
        self.Gamma = Gamma
        self.kappa = kappa
        self.d_alg = d_alg      # symbolic differential on the algebra
        self.extra = extra or {}

    def horizontal_dirac(self) -> SpecOp:
        g = self.Gamma
        return (self.D + g.compose(self.D).compose(g)).scale(0.5)

    def remainder(self) -> SpecOp:
        g = self.Gamma
        dv = (self.D - g.compose(self.D).compose(g)).scale(0.5)
        theta = self.extra["pi_theta"]
        pk = self.extra["partial_kappa"]
        return dv + theta.compose(pk).scale(1j)


def hodge_de_rham_rep(geom: Geometry, trunc: Truncation) -> CommutatorRep:
    """(Omega_P, pi, d + d*, 2 Pi - 1) at the truncation."""
    calc = geom.calc
    md = d_matrix(trunc, geom)
    mds = dstar_matrix(trunc, geom)
    D = SpecOp("D", md.mat + mds.mat, md.mask & mds.mask)
    total = calc.theta is not None
    Gamma = None
    kappa = None
    extra = {}
    if total:
        P = projection_matrix(trunc, geom)
        Gamma = SpecOp("Gamma", 2 * P.mat - np.eye(len(trunc.keys)))
        kappa = abs(trunc.ctx.scal(calc.kappa))
        extra["pi_theta"] = pi_d_matrix(trunc, geom, calc.theta, "piD[theta]")
        extra["partial_kappa"] = partial_kappa_matrix(trunc, kappa)
        extra["Pi"] = P
    pi = lambda p, name=None: left_mult_matrix(trunc, geom, p, name)
    pi_D = lambda w, name=None: pi_d_matrix(trunc, geom, w, name)
    return CommutatorRep(f"hdr[{geom.name}]", trunc, pi, pi_D, D, Gamma,
                         kappa, d_alg=calc.d, extra=extra)


def z_formula_op(geom: Geometry, trunc: Truncation) -> SpecOp:
    """The curvature remainder formula, assembled symbolically:
    Z(p1 a1 + p2 theta a2) = -p2 F_Pi a2 - p1 theta star_B^-1(F_Pi star_B(a1))."""
    calc = geom.calc
    pres = calc.pres
    theta = calc.theta
    ((tword, tcoeff),) = tuple(theta.terms.items())
    theta_ix = tword[0]
    kappa = calc.kappa
    f_pi = -calc.d(theta)
    base_table = {w: img for w, img in geom.hodge.table.items()
                  if theta_ix not in w and theta_ix not in
                  set().union(*[set(ww) for ww in img.terms] or [set()])}
    # the restricted base Hodge operator on vertical-free frame words
    from .riemann import restrict_geometry
    base_words = [w for w in geom.hodge.table if theta_ix not in w]
    base_on_total = {}
    for w in base_words:
        f = pres.element_from_word(w)
        kf = pres.word_bidegree(w)[1]
        frame = spectral_frame(calc, kf)
        img = pres.zero()
        for e in frame.basis:
            img = img + e * geom.star(theta * (e.star() * f))
        base_on_total[w] = img
    base_hodge = HodgeOperator(calc, base_on_total)

    def fn(x: Element) -> Element:
        out = pres.zero()
        for w, c in x.terms.items():
            prefix, form = split_word(calc, w)
            p = pres.element_from_word(prefix, c)
            if form and form[0] == theta_ix:
                h = pres.element_from_word(form[1:])
                kf = pres.word_bidegree(form[1:])[1]
                frame = spectral_frame(calc, kf)
                for e in frame.basis:
                    beta = e.star() * h
                    out = out - (p * e * f_pi * beta
                                 * (kappa ** (-kf)) * (Scalar(1) / tcoeff))
            else:
                h = pres.element_from_word(form)
                kf = pres.word_bidegree(form)[1]
                frame = spectral_frame(calc, kf)
                for e in frame.basis:
                    beta = e.star() * h
                    out = out - p * e * theta * base_hodge.apply_inverse(
                        f_pi * base_hodge.apply(beta))
        return out

    return trunc.matrix_of(element_op(trunc, geom, fn), "Z-formula")


def projectability_report(rep: CommutatorRep, geom: Geometry, tol=1e-9):
    """pi_D(theta)^2 = Lambda_kappa^2, Gamma anticommutation, D_hor
    supercommutation, and Z against the curvature remainder formula."""
    import numpy as _np
    trunc = rep.trunc
    out = {}
    pt = rep.extra["pi_theta"]
    lk2 = lambda_matrix(trunc, rep.kappa).compose(lambda_matrix(trunc, rep.kappa))
    sq = pt.compose(pt)
    ids = _np.where(sq.mask)[0]
    out["theta_squared"] = float(_np.abs(sq.mat[:, ids] - lk2.mat[:, ids]).max())
    anti = rep.Gamma.compose(pt) + pt.compose(rep.Gamma)
    out["gamma_anticommute"] = float(
        _np.abs(anti.mat[:, _np.where(anti.mask)[0]]).max())
    dh = rep.horizontal_dirac()
    sup = dh.compose(pt) + pt.compose(dh)
    ids = trunc.interior_ids((1, 2))
    ids = ids[sup.mask[ids]]
    out["dhor_supercommute"] = float(_np.abs(sup.mat[:, ids]).max())
    Z = rep.remainder()
    Zf = z_formula_op(geom, trunc)
    ids = trunc.interior_ids((3, 2))
    ids = ids[Z.mask[ids] & Zf.mask[ids]]
    out["z_vs_formula"] = float(_np.abs(Z.mat[:, ids] - Zf.mat[:, ids]).max())
    out["ok"] = all(v < tol for k, v in out.items() if k != "ok")
    return out


def commutator_residual(rep: CommutatorRep, b: Element, margin=(3, 3)) -> float:
    """max interior-column defect of i[D, pi(b)] - pi_D(d b)."""
    pb = rep.pi(b)
    comm = rep.D.commutator(pb).scale(1j)
    target = rep.pi_D(rep.d_alg(b))
    diff = comm - target
    ids = rep.trunc.interior_ids(margin)
    ids = ids[diff.mask[ids]]
    if ids.size == 0:
        raise TruncationError("interior too small for the residual check")
    return float(np.abs(diff.mat[:, ids]).max())


# ---------------------------------------------------------------------------
# spin Dirac representations on quantum CP^1 / SU(2)
# ---------------------------------------------------------------------------

def partial_pm(calc_hor: Calculus, sign: int, x: Element) -> Element:
    """The twisted derivations of the horizontal SU(2) calculus:
    d_pm(xy) = d_pm(x) y q^{-wt(y)} + x d_pm(y)."""
    pres = calc_hor.pres
    table = {"a": pres.gen("c*") * (-Scalar({(2, 0, 0): _GQ1()})),
             "a*": pres.zero(), "c": pres.gen("a*"), "c*": pres.zero()} \
        if sign > 0 else \
        {"a": pres.zero(), "a*": pres.gen("c"), "c": pres.zero(),
         "c*": pres.gen("a") * (-Scalar({(-2, 0, 0): _GQ1()}))}
    out = {}
    from .algebra import _accumulate_one
    for w, c in x.terms.items():
        for i, gi in enumerate(w):
            img = table.get(pres.gens[gi].name)
            if img is None or img.is_zero():
                continue
            rest = w[i + 1:]
            wt_rest = pres.word_bidegree(rest)[1]
            piece = (pres.element_from_word(w[:i]) * img
                     * pres.element_from_word(rest)
                     * Scalar({(-2 * wt_rest, 0, 0): _GQ1()}))
            for nw, nc in piece.terms.items():
                _accumulate_one(out, nw, nc * c)
    return Element(pres, out)


def _GQ1():
    from .scalars import GQ_ONE
    return GQ_ONE


def spin_dirac_cp1(calc_hor: Calculus, J, L, ctx) -> CommutatorRep:
    """Majid's spin Dirac operator D_q = ((0, q^-1 d_+), (q d_-, 0)) on
    S_{q,+} (+) S_{q,-} = O_{-1} (+) O_{+1} (ex:hopf8 verbatim)."""
    pres = calc_hor.pres
    trunc = _spin_cp1_truncation(pres, J, L, ctx)

    def dirac(key):
        tag, w = key
        x = pres.element_from_word(w)
        if tag == "-":
            img = partial_pm(calc_hor, +1, x)
            return {("+", nw): c * q_power_scalar(-1)
                    for nw, c in img.terms.items()}
        img = partial_pm(calc_hor, -1, x)
        return {("-", nw): c * q_power_scalar(1) for nw, c in img.terms.items()}

    D = trunc.matrix_of(dirac, "D_q")
    Gamma = SpecOp("Gamma", np.diag(np.array(
        [1.0 if k[0] == "+" else -1.0 for k in trunc.keys], dtype=complex)))

    def pi(p: Element, name=None):
        def op(key):
            tag, w = key
            img = p * pres.element_from_word(w)
            return {(tag, nw): c for nw, c in img.terms.items()}
        return trunc.matrix_of(op, name or f"pi[{p.render()}]")

    def pi_D(omega: Element, name=None):
        # omega = x ep + y em acts by ((0, i q^-2 pi(x)), (i q^2 pi(y), 0))
        ep, em = pres.index["ep"], pres.index["em"]
        xs, ys = {}, {}
        for w, c in omega.terms.items():
            prefix, form = split_word(calc_hor, w)
            if form == (ep,):
                xs[prefix] = c
            elif form == (em,):
                ys[prefix] = c
            elif form:
                raise TruncationError("1-form outside the horizontal frame")
        x_el, y_el = Element(pres, xs), Element(pres, ys)

        def op(key):
            tag, w = key
            out = {}
            if tag == "-" and not x_el.is_zero():
                img = x_el * pres.element_from_word(w)
                for nw, c in img.terms.items():
                    out[("+", nw)] = c * q_power_scalar(-2) * _i_scalar()
            if tag == "+" and not y_el.is_zero():
                img = y_el * pres.element_from_word(w)
                for nw, c in img.terms.items():
                    out[("-", nw)] = c * q_power_scalar(2) * _i_scalar()
            return out
        return trunc.matrix_of(op, name or "piD")

    return CommutatorRep("spin-dirac-cp1", trunc, pi, pi_D, D, Gamma,
                         d_alg=lambda b: _horizontal_d(calc_hor, b),
                         extra={})


def _horizontal_d(calc_hor, b):
    return calc_hor.d(b)


def _spin_cp1_truncation(pres, J, L, ctx):
    state = haar_state_closed(ctx.q)
    keys = []
    for tag, sub_wt in (("+", -1), ("-", +1)):
        for w in su2_words(pres, sub_wt, L):
            keys.append((tag, w))
        # deeper weight windows are not needed: the subspaces are single
        # spectral subspaces, but we keep c-degree growth inside L
    elem_cache = {}

    def elem(word):
        e = elem_cache.get(word)
        if e is None:
            e = pres.element_from_word(word)
            elem_cache[word] = e
        return e

    def ip(k1, k2):
        if k1[0] != k2[0]:
            return 0j
        return ctx.scal(state.value(
            (elem(k1[1]).star() * elem(k2[1])).degree_component(0)))

    def block_key(key):
        return (pres.word_bidegree(key[1])[1], key[0])

    def extent(key):
        return su2_extent(pres, key[1])

    return Truncation("spin-cp1", keys, block_key, extent, ip, ctx, (J, L))


def q_power_scalar(k):
    return Scalar({(2 * k, 0, 0): _GQ1()})


def _i_scalar():
    from .scalars import S_I
    return S_I


def lifted_dirac_su2(calc_total: Calculus, calc_hor: Calculus, J, L,
                     ctx) -> CommutatorRep:
    """The lifted Dirac operator on C^2 (x) C^2 (x) O_q(SU(2)) (ex:hopf10
    verbatim): D_ver = i sigma^2 Lambda_{q^2} partial_{q^2}, D_hor built
    from q d_- and q d_+ on the spinor legs, Gamma = sigma^3."""
    pres = calc_hor.pres
    legs = [(v, s) for v in (0, 1) for s in (0, 1)]  # s = 0 carries charge +1
    state = haar_state_closed(ctx.q)
    keys = []
    for v, s in legs:
        offset = 1 if s == 0 else -1
        for j in range(-J, J + 1):
            for w in su2_words(pres, j - offset, L):
                keys.append(((v, s), w))
    keys = list(dict.fromkeys(keys))
    elem_cache = {}

    def elem(word):
        e = elem_cache.get(word)
        if e is None:
            e = pres.element_from_word(word)
            elem_cache[word] = e
        return e

    def ip(k1, k2):
        if k1[0] != k2[0]:
            return 0j
        return ctx.scal(state.value(
            (elem(k1[1]).star() * elem(k2[1])).degree_component(0)))

    def total_weight(key):
        (v, s), w = key
        return pres.word_bidegree(w)[1] + (1 if s == 0 else -1)

    def block_key(key):
        return (total_weight(key), key[0])

    def extent(key):
        (v, s), w = key
        _, ec = su2_extent(pres, w)
        return (abs(total_weight(key)), ec)

    trunc = Truncation("spin-su2", keys, block_key, extent, ip, ctx, (J, L))
    qf = ctx.q_float()
    kappa = qf * qf

    n = len(trunc.keys)
    ver = np.zeros((n, n), dtype=complex)
    for j, key in enumerate(trunc.keys):
        (v, s), w = key
        jp = total_weight(key)
        f = (kappa ** (-jp)) * 2j * math.pi * _q_int_f(jp, kappa)
        tk = ((1 - v, s), w)
        i = trunc.index[tk]
        # i sigma^2: |0> -> -|1>,  |1> -> +|0>
        ver[i, j] = -f if v == 0 else f
    D_ver = SpecOp("D_ver", trunc.Tinv @ ver @ trunc.T)

    def dhor(key):
        (v, s), w = key
        sign = Scalar(1 if v == 0 else -1)
        x = elem(w)
        if s == 0:
            img = partial_pm(calc_hor, -1, x) * q_power_scalar(1) * sign
            return {((v, 1), nw): c for nw, c in img.terms.items()}
        img = partial_pm(calc_hor, +1, x) * q_power_scalar(1) * sign
        return {((v, 0), nw): c for nw, c in img.terms.items()}

    D_hor = trunc.matrix_of(dhor, "D_hor")
    D = SpecOp("D", D_ver.mat + D_hor.mat, D_ver.mask & D_hor.mask)
    Gamma = SpecOp("Gamma", np.diag(np.array(
        [1.0 if k[0][0] == 0 else -1.0 for k in trunc.keys], dtype=complex)))

    lam_kappa = np.array([kappa ** (-total_weight(k)) for k in trunc.keys])
    theta_mat = np.zeros((n, n), dtype=complex)
    for j, key in enumerate(trunc.keys):
        (v, s), w = key
        i = trunc.index[((1 - v, s), w)]
        # -Lambda_kappa sigma^2: |0> -> -i Lk |1>, |1> -> +i Lk |0>
        theta_mat[i, j] = (-1j if v == 0 else 1j) * lam_kappa[j]
    pi_theta = SpecOp("piD[theta]", trunc.Tinv @ theta_mat @ trunc.T)

    def pi(p: Element, name=None):
        if p.pres is not pres:
            p = Element(pres, {_strip_to_hor(calc_total, pres, w): c
                               for w, c in p.terms.items()})

        def op(key):
            leg, w = key
            img = p * elem(w)
            return {(leg, nw): c for nw, c in img.terms.items()}
        return trunc.matrix_of(op, name or f"pi[{p.render()}]")

    def pi_e(sign):
        # pi_D(e^+/-) = i q (sigma^3 (x) raise/lower) Lambda_q^{(3)}
        def op(key):
            (v, s), w = key
            if sign > 0 and s != 1:
                return {}
            if sign < 0 and s != 0:
                return {}
            wt = pres.word_bidegree(w)[1]
            coeff = (_i_scalar() * q_power_scalar(1)
                     * q_power_scalar(-wt) * Scalar(1 if v == 0 else -1))
            return {((v, 1 - s), w): coeff}
        return trunc.matrix_of(op, f"piD[e{'p' if sign > 0 else 'm'}]")

    pi_ep, pi_em = pi_e(+1), pi_e(-1)

    theta_total = calc_total.theta
    ((tword, tcoeff),) = tuple(theta_total.terms.items())
    theta_ix = tword[0]
    ep_t = calc_total.pres.index["ep"]
    em_t = calc_total.pres.index["em"]

    def pi_D(omega: Element, name=None):
        """Decompose a total 1-form into P theta + x e+ + y e- and
        represent each part."""
        acc = None
        parts = {"theta": {}, "ep": {}, "em": {}}
        for w, c in omega.terms.items():
            prefix, form = split_word(calc_total, w)
            if form == (theta_ix,):
                parts["theta"][prefix] = c / tcoeff
            elif form == (ep_t,):
                parts["ep"][prefix] = c
            elif form == (em_t,):
                parts["em"][prefix] = c
            elif form:
                raise TruncationError("not a 1-form in the frame")
        for tag, mat_op in (("theta", pi_theta), ("ep", pi_ep), ("em", pi_em)):
            terms = parts[tag]
            if not terms:
                continue
            p = Element(pres, {_strip_to_hor(calc_total, pres, w): c
                               for w, c in terms.items()})
            piece = pi(p).compose(mat_op)
            acc = piece if acc is None else acc + piece
        if acc is None:
            acc = SpecOp(name or "piD[0]", np.zeros((n, n), dtype=complex))
        acc.name = name or "piD"
        return acc

    extra = {"pi_theta": pi_theta, "partial_kappa": partial_kappa_matrix(trunc, kappa),
             "pi_ep": pi_ep, "pi_em": pi_em, "D_ver": D_ver, "D_hor": D_hor}
    return CommutatorRep("lifted-dirac-su2", trunc, pi, pi_D, D, Gamma,
                         kappa=kappa, d_alg=calc_total.d, extra=extra)


def _strip_to_hor(calc_total, pres_hor, word):
    return tuple(pres_hor.index[calc_total.pres.gens[i].name] for i in word)


# ---------------------------------------------------------------------------
# twists and the no-go phenomenon
# ---------------------------------------------------------------------------

def block_norm_table(rep: CommutatorRep, op: SpecOp, t: float, jmax: int):
    """Per-weight norms of Lambda_t op Lambda_t restricted to weight blocks."""
    trunc = rep.trunc
    ws = trunc.weights()
    table = {}
    for j in range(-jmax, jmax + 1):
        cols = np.where((ws == j) & op.mask)[0]
        if cols.size == 0:
            continue
        sub = op.mat[:, cols]
        rows = np.where(np.abs(sub).max(axis=1) > 1e-13)[0]
        if rows.size == 0:
            table[j] = 0.0
            continue
        jp = ws[rows]
        scale_rows = np.power(t, -jp.astype(float))
        scale_cols = np.power(t, -float(j)) * np.ones(cols.size)
        sub = (scale_rows[:, None] * sub[rows, :]) * scale_cols[None, :]
        table[j] = op_norm(sub)
    return table


def twist_growth(rep: CommutatorRep, t: float, eta: Element, jmax: int):
    return block_norm_table(rep, rep.pi_D(eta), t, jmax)


def commutation_factor(calc: Calculus, eta: Element):
    """The scalar t with eta p = Lambda_t(p) eta; None when no single
    scaling law exists (the hypothesis of the no-go theorem fails)."""
    pres = calc.pres
    t_val = None
    for i, g in enumerate(pres.gens):
        if g.degree != 0 or g.weight == 0:
            continue
        x = pres.element_from_word((i,))
        lhs = eta * x
        rhs = x * eta
        from .riemann import _scalar_ratio
        r = _scalar_ratio(lhs, rhs)
        if r is None:
            return None
        # r = t^{-weight}
        if g.weight > 0:
            cand = (Scalar(1) / r) if g.weight == 1 else None
            if cand is None:
                root = r
                cand = Scalar(1) / root
                for _ in range(g.weight - 1):
                    sm = cand.sqrt_monomial()
                    if sm is None:
                        return None
                cand = (Scalar(1) / r).sqrt_monomial() if g.weight == 2 else cand
        else:
            cand = r if g.weight == -1 else (
                r.sqrt_monomial() if g.weight == -2 else None)
        if cand is None:
            return None
        if t_val is None:
            t_val = cand
        elif t_val != cand:
            return None
    return t_val


def flatness(table, rel_tol=1e-6):
    vals = [v for v in table.values() if v > 1e-300]
    if not vals:
        return True, 0.0
    spread = max(vals) / min(vals) - 1.0
    return spread <= rel_tol, spread


def twist_report(rep: CommutatorRep, etas, jmax, samples=(1.0,)):
    """For each named 1-form find the unique flattening Lambda_t and record
    the growth of every other sampled t."""
    out = {}
    for name, eta, calc in etas:
        tc = commutation_factor(calc, eta)
        entry = {"eta": name}
        if tc is None:
            entry["status"] = "no-scaling-law"
            out[name] = entry
            continue
        tc_f = abs(rep.trunc.ctx.scal(tc))
        t_star = tc_f ** -0.5
        flat_tab = twist_growth(rep, t_star, eta, jmax)
        is_flat, spread = flatness(flat_tab)
        entry.update(t_star=t_star, flat=is_flat, spread=spread)
        growth = {}
        for t in samples:
            if abs(t - t_star) < 1e-12:
                continue
            tab = twist_growth(rep, t, eta, jmax)
            vals = [v for v in tab.values() if v > 0]
            growth[t] = (max(vals) / min(vals)) if vals else 0.0
        entry["other_growth"] = growth
        out[name] = entry
    return out


# ---------------------------------------------------------------------------
# seminorms and the Kaad-Kyed comparison
# ---------------------------------------------------------------------------

class ModularPair:
    """A modular symmetry N (diagonal per weight) with its automorphism nu."""

    def __init__(self, nu: ModularSymbol, label=None):
        self.nu = nu
        self.label = label or f"pair[{nu!r}]"

    def N_matrix(self, trunc) -> SpecOp:
        ws = trunc.weights()
        vals = np.array([trunc.ctx.scal(self.nu.mu1 ** (-int(j))) for j in ws])
        return SpecOp("N", np.diag(vals))

    def apply(self, x: Element, inverse=False) -> Element:
        out = x.pres.zero()
        for _, j, part in x.grade_components():
            factor = self.nu.mu1 ** (-j if inverse else j)
            out = out + part * factor
        return out


def algebra_norm(rep: CommutatorRep, x: Element, margin=(2, 2)) -> float:
    """Truncated operator norm of pi(x) on interior columns (a certified
    lower bound of the C*-norm)."""
    op = rep.pi(x)
    ids = rep.trunc.interior_ids(margin)
    ids = ids[op.mask[ids]]
    if ids.size == 0:
        raise TruncationError("window too small for a norm estimate")
    return op_norm(op.mat[:, ids])


def seminorms(rep: CommutatorRep, vertical: ModularPair, horizontal: ModularPair,
              p: Element, calc_total: Calculus, margin=(2, 2)):
    """{ ||p||_tau, L_tau(p) } per the twisted-seminorm construction."""
    nv, nh = vertical, horizontal
    norm = lambda x: algebra_norm(rep, x, margin)
    p_tau = max(norm(nv.apply(p)) + norm(nh.apply(p)),
                norm(nv.apply(p, inverse=True)) + norm(nh.apply(p, inverse=True)))
    dp = calc_total.d(p)
    vert = dp - calc_total.vertical_projection(dp)
    horz = calc_total.vertical_projection(dp)
    Nv = nv.N_matrix(rep.trunc)
    Nh = nh.N_matrix(rep.trunc)
    total = Nv.compose(rep.pi_D(vert)).compose(Nv) \
        + Nh.compose(rep.pi_D(horz)).compose(Nh)
    ids = rep.trunc.interior_ids(margin)
    ids = ids[total.mask[ids]]
    l_tau = op_norm(total.mat[:, ids])
    return {"norm_tau": p_tau, "L_tau": l_tau}


def algebra_truncation(pres, J, L, ctx) -> Truncation:
    """Plain GNS(h_q) window of the SU(2) algebra (single leg)."""
    state = haar_state_closed(ctx.q)
    keys = []
    for j in range(-J, J + 1):
        for w in su2_words(pres, j, L):
            keys.append((None, w))
    elem_cache = {}

    def elem(word):
        e = elem_cache.get(word)
        if e is None:
            e = pres.element_from_word(word)
            elem_cache[word] = e
        return e

    def ip(k1, k2):
        return ctx.scal(state.value(
            (elem(k1[1]).star() * elem(k2[1])).degree_component(0)))

    block_key = lambda key: (pres.word_bidegree(key[1])[1], None)
    extent = lambda key: su2_extent(pres, key[1])
    tr = Truncation("gns", keys, block_key, extent, ip, ctx, (J, L))
    tr._elem = elem
    return tr


def gns_left_mult(trunc: Truncation, p: Element, name=None) -> SpecOp:
    pres = p.pres

    def op(key):
        img = p * trunc._elem(key[1])
        return {(None, w): c for w, c in img.terms.items()}

    return trunc.matrix_of(op, name or f"pi[{p.render()}]")


def gns_norm(trunc: Truncation, x: Element, margin=(2, 2)) -> float:
    o = gns_left_mult(trunc, x)
    ids = trunc.interior_ids(margin)
    ids = ids[o.mask[ids]]
    if ids.size == 0:
        raise TruncationError("window too small for a norm estimate")
    return op_norm(o.mat[:, ids])


def partial_t_element(calc, x: Element, t: Scalar) -> Element:
    """partial_t = (+) 2 pi i [j]_t on weight-j components (symbolic)."""
    from .scalars import S_PIHAT, S_I
    out = x.pres.zero()
    for _, j, part in x.grade_components():
        out = out + part * (S_PIHAT * S_I * q_integer(j, t))
    return out


def _two_by_two_norm(atrunc, entries, margin, scale_diag=None):
    """Operator norm of a 2x2 matrix of algebra elements on the doubled
    GNS window, interior columns only; scale_diag multiplies the diagonal
    entries by (-i k, +i k)."""
    ops = [[gns_left_mult(atrunc, entries[0][0]),
            gns_left_mult(atrunc, entries[0][1])],
           [gns_left_mult(atrunc, entries[1][0]),
            gns_left_mult(atrunc, entries[1][1])]]
    mask = ops[0][0].mask & ops[0][1].mask & ops[1][0].mask & ops[1][1].mask
    ids = atrunc.interior_ids(margin)
    ids = ids[mask[ids]]
    mats = [[c.mat for c in row] for row in ops]
    if scale_diag is not None:
        mats[0][0] = -1j * scale_diag * mats[0][0]
        mats[1][1] = -1j * scale_diag * mats[1][1]
    big = np.block(mats)
    n = mats[0][0].shape[1]
    cols = np.concatenate([ids, n + ids])
    return op_norm(big[:, cols])


def kaad_kyed_compare(atrunc: Truncation, p: Element, calc_hor: Calculus,
                      margin=(2, 2)):
    """Norm and seminorm comparison with the quantum-metric construction,
    with both sides of every inequality on the same GNS truncation.

    L_tau is realized as ||d'_tot(p)|| (the even-part reduction of the
    twisted seminorm); L_{q^2,q} = ||d_{q^2,q}(p)|| with the canonical
    constant K_t = 1/(2 pi (1 + 1/t)) at t = q^2.
    """
    from .scalars import S_Q, S_ONE
    q = S_Q
    q2 = q * q
    lam_q = ModularPair(ModularSymbol(S_ONE / q))
    lam_qh = ModularPair(ModularSymbol(Scalar({(-1, 0, 0): _GQ1()})))

    def norm(x):
        return gns_norm(atrunc, x, margin)

    norm_kk = max(norm(lam_q.apply(p)) + norm(lam_qh.apply(p)),
                  norm(lam_q.apply(p, inverse=True))
                  + norm(lam_qh.apply(p, inverse=True)))

    dq2 = partial_t_element(calc_hor, p, q2)
    a11 = _apply_lambda(dq2, 1)                  # Lambda_q o partial_{q^2}
    a12 = -_apply_lambda_half(partial_pm(calc_hor, +1, p))
    a21 = _apply_lambda_half(partial_pm(calc_hor, -1, p))

    # d'_tot has the untwisted diagonal (+Lambda_q d_{q^2}, -...), d_{q^2,q}
    # rescales it by -+ i K_{q^2} and flips the a21 sign
    l_prime = _two_by_two_norm(atrunc, ((a11, a12), (a21, -a11)), margin)
    qf = atrunc.ctx.q_float()
    kq2 = 1.0 / (2.0 * math.pi * (1.0 + 1.0 / (qf * qf)))
    l_kk = _two_by_two_norm(atrunc, ((a11, a12), (-a21, -a11)), margin,
                            scale_diag=kq2)
    lo = l_prime / (1.0 + 1.0 / kq2)
    hi = (1.0 + kq2) * l_prime
    return {"norm_tau": norm_kk, "L_prime": l_prime, "L_kk": l_kk,
            "K_q2": kq2,
            "sandwich_ok": (lo <= l_kk + 1e-12) and (l_kk <= hi + 1e-12)}


def _apply_lambda(x: Element, power: int) -> Element:
    """Lambda_q^power: weight-j component scaled by q^{-j power}."""
    out = x.pres.zero()
    for _, j, part in x.grade_components():
        out = out + part * Scalar({(-2 * j * power, 0, 0): _GQ1()})
    return out


def _apply_lambda_half(x: Element) -> Element:
    """Lambda_{q^{-1/2}}: weight-j component scaled by q^{j/2} = s^j."""
    out = x.pres.zero()
    for _, j, part in x.grade_components():
        out = out + part * Scalar({(j, 0, 0): _GQ1()})
    return out


def leibniz_check(rep, vertical, horizontal, p1, p2, calc_total, margin=(2, 2)):
    s1 = seminorms(rep, vertical, horizontal, p1, calc_total, margin)
    s2 = seminorms(rep, vertical, horizontal, p2, calc_total, margin)
    s12 = seminorms(rep, vertical, horizontal, p1 * p2, calc_total, margin)
    lhs = s12["L_tau"]
    rhs = s1["L_tau"] * s2["norm_tau"] + s1["norm_tau"] * s2["L_tau"]
    return {"lhs": lhs, "rhs": rhs, "holds": lhs <= rhs + 1e-12,
            "slack": rhs - lhs}


# ---------------------------------------------------------------------------
# export
# ---------------------------------------------------------------------------

def export_dense(mat: np.ndarray, path):
    """Dense text format: header "rows cols complex128", then row-major
    lines of re im pairs."""
    rows, cols = mat.shape
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{rows} {cols} complex128\n")
        for i in range(rows):
            fh.write(" ".join(f"{mat[i, j].real:.17g} {mat[i, j].imag:.17g}"
                              for j in range(cols)))
            fh.write("\n")
