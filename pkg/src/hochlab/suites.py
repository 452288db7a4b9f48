"""Property suites behind the command line.

Every randomized check is a pair of functions: ``sample(rng, cfg)`` draws
one instance and returns it as a JSON payload, and ``evaluate(payload)``
re-decodes the payload, runs the exact computation and returns ``None``
when the identity holds or a short description of the defect otherwise.
A failing payload is therefore a self-contained, re-checkable witness.
Exhaustive checks enumerate their payloads instead of sampling them.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Dict, Iterable, List, Optional

from . import dgla as D
from . import generators as G
from . import obstruction as O
from . import starprod as S
from .exactalg import HbarSeries, MultiPoly, format_poly, monomials_up_to, parse_poly
from .hochschild import (CyclicChain, HochChain, PolyDiffCochain, chain_boundary, chain_boundary_solve,
                         chain_from_json, chain_to_json, coboundary_solve, cochain_from_json, cochain_to_json,
                         connes_B, contraction_I, cup, cyclic_differential, format_chain, format_cochain,
                         gerstenhaber_bracket, hoch_differential, lie_derivative_L, mu_bracket_sign)
from .polyvec import (ExtForm, PolyVector, _perm_sign, contraction_i, de_rham_d, format_graded, formality_f1,
                      graded_from_json, graded_to_json, hkr, lie_derivative_l, schouten_bracket, wedge)

SUITE_NAMES = ("identities", "calculus", "dgla", "star", "obstruction")


def _sign(n: int) -> int:
    return -1 if n % 2 else 1


# -- configuration --------------------------------------------------------------------


class ConfigError(ValueError):
    """Invalid run configuration (reported before any computation)."""


@dataclass
class RunConfig:
    dim: int = 2
    theta: Optional[List[List[str]]] = None
    hbar_order: int = 6
    u_order: int = 3
    coeff_degree: int = 3
    derivative_order: int = 3
    chain_degree: int = 3
    obstruction_D: int = 5
    obstruction_Dpairs: int = 7
    seed: int = 0
    suite: str = "all"
    format: str = "text"
    scale: float = 1.0

    FIELDS = ("dim", "theta", "hbar_order", "u_order", "coeff_degree", "derivative_order", "chain_degree",
              "obstruction_D", "obstruction_Dpairs", "seed", "suite", "format", "scale")

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        unknown = set(data) - set(cls.FIELDS)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        cfg = cls(**data)
        cfg.validate()
        return cfg

    def validate(self) -> None:
        ints = ("dim", "hbar_order", "u_order", "coeff_degree", "derivative_order", "chain_degree",
                "obstruction_D", "obstruction_Dpairs", "seed")
        for name in ints:
            v = getattr(self, name)
            if not isinstance(v, int) or isinstance(v, bool):
                raise ConfigError(f"{name} must be an integer")
        if self.dim < 1:
            raise ConfigError("dim must be positive")
        for name in ("hbar_order", "u_order", "coeff_degree", "derivative_order", "chain_degree"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")
        if self.obstruction_D < 3:
            raise ConfigError("obstruction_D must be >= 3")
        if not 2 <= self.obstruction_Dpairs <= self.obstruction_D + 2:
            raise ConfigError("obstruction_Dpairs must lie in [2, obstruction_D + 2]")
        if self.suite not in SUITE_NAMES + ("all",):
            raise ConfigError(f"unknown suite {self.suite!r}")
        if self.format not in ("text", "json"):
            raise ConfigError("format must be 'text' or 'json'")
        if not isinstance(self.scale, (int, float)) or self.scale <= 0:
            raise ConfigError("scale must be a positive number")
        if self.theta is not None:
            try:
                th = S.check_theta(self.theta)
            except (S.NotAntisymmetricError, ValueError, TypeError, ZeroDivisionError) as exc:
                raise ConfigError(f"bad theta: {exc}") from None
            if len(th) != self.dim:
                raise ConfigError(f"theta is {len(th)}x{len(th)} but dim is {self.dim}")
            self.theta = [[str(v) for v in row] for row in th]

    def star_theta(self):
        """theta used by the star suite: the configured one, else canonical 2D."""
        if self.theta is not None:
            return S.check_theta(self.theta)
        return S.canonical_theta(2)

    def echo(self) -> dict:
        return {name: getattr(self, name) for name in self.FIELDS}

    def count(self, base: int) -> int:
        return max(1, int(round(base * self.scale)))


# -- check registry ----------------------------------------------------------------------


@dataclass(frozen=True)
class Check:
    suite: str
    name: str
    evaluate: Callable[[dict], Optional[str]]
    sample: Optional[Callable[[random.Random, RunConfig], dict]] = None
    instances: int = 0
    enumerate: Optional[Callable[[RunConfig], Iterable[dict]]] = None
    # checks producing an always-attached witness (certificates)
    certify: Optional[Callable[[RunConfig], "CheckResult"]] = None


@dataclass
class CheckResult:
    check: str
    status: str
    instances: int
    elapsed: Optional[float] = None
    witness: Optional[dict] = None
    detail: Optional[str] = None

    def to_json(self) -> dict:
        out = {"check": self.check, "status": self.status, "instances": self.instances, "elapsed": self.elapsed}
        if self.detail is not None:
            out["detail"] = self.detail
        out["witness"] = self.witness
        return out


REGISTRY: Dict[str, Check] = {}


def _register(check: Check) -> Check:
    REGISTRY[f"{check.suite}/{check.name}"] = check
    return check


def random_check(suite: str, name: str, instances: int):
    def deco(factory):
        sample, evaluate = factory()
        return _register(Check(suite, name, evaluate, sample=sample, instances=instances))
    return deco


def _safe_evaluate(check: Check, payload: dict) -> Optional[str]:
    try:
        return check.evaluate(payload)
    except Exception as exc:  # a crash is a failure with the payload as witness
        return f"{type(exc).__name__}: {exc}"


def run_check(check: Check, cfg: RunConfig, clock=None) -> CheckResult:
    start = clock() if clock else None
    if check.certify is not None:
        res = check.certify(cfg)
    else:
        if check.enumerate is not None:
            payloads = check.enumerate(cfg)
        else:
            rng = random.Random(f"{cfg.seed}:{check.suite}/{check.name}")
            payloads = (check.sample(rng, cfg) for _ in range(cfg.count(check.instances)))
        n = 0
        res = None
        for payload in payloads:
            n += 1
            defect = _safe_evaluate(check, payload)
            if defect is not None:
                res = CheckResult(check.name, "FAIL", n, witness={"payload": payload, "defect": defect})
                break
        if res is None:
            res = CheckResult(check.name, "PASS", n)
    if clock:
        res.elapsed = round(clock() - start, 3)
    return res


def checks_for(suite: str) -> List[Check]:
    return [c for key, c in REGISTRY.items() if c.suite == suite]


# -- payload helpers --------------------------------------------------------------------------


def _poly_json(p: MultiPoly) -> dict:
    return {"dim": p.dim, "poly": format_poly(p)}


def _poly_from(d: dict) -> MultiPoly:
    return parse_poly(d["poly"], int(d["dim"]))


def _series_json(s: HbarSeries) -> list:
    return [cochain_to_json(c) for c in s]


def _series_from(data: list) -> HbarSeries:
    return HbarSeries([cochain_from_json(c) for c in data], len(data) - 1)


def _pv_series_json(s: HbarSeries) -> list:
    return [graded_to_json(c) for c in s]


def _pv_series_from(data: list) -> HbarSeries:
    return HbarSeries([graded_from_json(c) for c in data], len(data) - 1)


def _nonzero(x, fmt=str) -> Optional[str]:
    return None if x.is_zero() else f"nonzero defect: {fmt(x)}"


def _series_nonzero(s: HbarSeries, fmt=format_cochain) -> Optional[str]:
    for k, c in enumerate(s):
        if not c.is_zero():
            return f"nonzero defect at hbar^{k}: {fmt(c)}"
    return None


def _calc_dim(cfg: RunConfig) -> int:
    return max(cfg.dim, 3)


# -- identities ----------------------------------------------------------------------------


@random_check("identities", "hoch_differential_squared", 200)
def _():
    def sample(rng, cfg):
        return {"P": cochain_to_json(G.cochain(rng, cfg.dim, rng.randint(0, 3), cfg.coeff_degree,
                                                cfg.derivative_order))}

    def evaluate(p):
        P = cochain_from_json(p["P"])
        return _nonzero(hoch_differential(hoch_differential(P)), format_cochain)
    return sample, evaluate


@random_check("identities", "differential_is_mu_bracket", 50)
def _():
    def sample(rng, cfg):
        return {"P": cochain_to_json(G.cochain(rng, cfg.dim, rng.randint(0, 3), cfg.coeff_degree,
                                                cfg.derivative_order))}

    def evaluate(p):
        P = cochain_from_json(p["P"])
        mu = PolyDiffCochain.mu(P.dim)
        return _nonzero(hoch_differential(P) - gerstenhaber_bracket(mu, P).scale(mu_bracket_sign(P.arity)),
                        format_cochain)
    return sample, evaluate


def _chain_sample(max_arity):
    def sample(rng, cfg):
        return {"c": chain_to_json(G.chain(rng, cfg.dim, rng.randint(0, max_arity), cfg.chain_degree))}
    return sample


@random_check("identities", "chain_boundary_squared", 200)
def _():
    return _chain_sample(5), lambda p: _nonzero(chain_boundary(chain_boundary(chain_from_json(p["c"]))), format_chain)


@random_check("identities", "connes_B_squared", 200)
def _():
    return _chain_sample(4), lambda p: _nonzero(connes_B(connes_B(chain_from_json(p["c"]))), format_chain)


@random_check("identities", "boundary_B_anticommute", 200)
def _():
    def evaluate(p):
        c = chain_from_json(p["c"])
        return _nonzero(chain_boundary(connes_B(c)) + connes_B(chain_boundary(c)), format_chain)
    return _chain_sample(4), evaluate


@random_check("identities", "negative_cyclic_differential_squared", 200)
def _():
    def sample(rng, cfg):
        coeffs = [[chain_to_json(G.chain(rng, cfg.dim, rng.randint(0, 3), cfg.chain_degree))]
                  for _ in range(cfg.u_order + 1)]
        return {"u_order": cfg.u_order, "coeffs": coeffs}

    def evaluate(p):
        chains = [[chain_from_json(c) for c in cs] for cs in p["coeffs"]]
        dim = chains[0][0].dim
        c = CyclicChain(dim, int(p["u_order"]), chains)
        dd = cyclic_differential(cyclic_differential(c))
        return None if dd.is_zero() else f"nonzero defect: {dd!r}"
    return sample, evaluate


def _lbrack_sample(rng, cfg):
    return {"Q1": cochain_to_json(G.cochain(rng, cfg.dim, rng.randint(0, 3), 2, 2, 2)),
            "Q2": cochain_to_json(G.cochain(rng, cfg.dim, rng.randint(0, 3), 2, 2, 2)),
            "c": chain_to_json(G.chain(rng, cfg.dim, rng.randint(0, 4), 2, 2))}


@random_check("identities", "lie_derivative_bracket", 100)
def _():
    def evaluate(p):
        Q1, Q2, c = cochain_from_json(p["Q1"]), cochain_from_json(p["Q2"]), chain_from_json(p["c"])
        L = lie_derivative_L
        s = _sign((Q1.arity + 1) * (Q2.arity + 1))
        lhs = L(Q1, L(Q2, c)) - L(Q2, L(Q1, c)).scale(s)
        return _nonzero(lhs - L(gerstenhaber_bracket(Q1, Q2), c), format_chain)
    return _lbrack_sample, evaluate


@random_check("identities", "B_L_compatibility", 100)
def _():
    def sample(rng, cfg):
        return {"P": cochain_to_json(G.cochain(rng, cfg.dim, rng.randint(1, 3), 2, 2, 2, normalized=True)),
                "c": chain_to_json(G.chain(rng, cfg.dim, rng.randint(0, 4), 2, 2))}

    def evaluate(p):
        P, c = cochain_from_json(p["P"]), chain_from_json(p["c"])
        v = connes_B(lie_derivative_L(P, c)) - lie_derivative_L(P, connes_B(c)).scale(_sign(P.arity + 1))
        return _nonzero(v, format_chain)
    return sample, evaluate


@random_check("identities", "gerstenhaber_jacobi", 50)
def _():
    def sample(rng, cfg):
        return {k: cochain_to_json(G.cochain(rng, cfg.dim, rng.randint(0, 2), 2, 2, 2)) for k in "abc"}

    def evaluate(p):
        a, b, c = (cochain_from_json(p[k]) for k in "abc")
        br = gerstenhaber_bracket
        s = _sign((a.arity - 1) * (b.arity - 1))
        return _nonzero(br(a, br(b, c)) - br(br(a, b), c) - br(b, br(a, c)).scale(s), format_cochain)
    return sample, evaluate


@random_check("identities", "cup_associativity", 50)
def _():
    def sample(rng, cfg):
        return {k: cochain_to_json(G.cochain(rng, cfg.dim, rng.randint(0, 2), 2, 2, 2)) for k in "abc"}

    def evaluate(p):
        a, b, c = (cochain_from_json(p[k]) for k in "abc")
        return _nonzero(cup(cup(a, b), c) - cup(a, cup(b, c)), format_cochain)
    return sample, evaluate


# -- calculus ------------------------------------------------------------------------------------


def _pv_triple(rng, cfg):
    d = _calc_dim(cfg)
    out = {k: graded_to_json(G.polyvector(rng, d, rng.randint(0, 3))) for k in "abc"}
    out["w"] = graded_to_json(G.form(rng, d, rng.randint(0, 3)))
    return out


def _pv(p, *keys):
    return [graded_from_json(p[k]) for k in keys]


@random_check("calculus", "schouten_antisymmetry", 100)
def _():
    def evaluate(p):
        a, b = _pv(p, "a", "b")
        s = _sign((a.degree - 1) * (b.degree - 1))
        return _nonzero(schouten_bracket(a, b) + schouten_bracket(b, a).scale(s), format_graded)
    return _pv_triple, evaluate


@random_check("calculus", "schouten_jacobi", 100)
def _():
    def evaluate(p):
        a, b, c = _pv(p, "a", "b", "c")
        br = schouten_bracket
        s = _sign((a.degree - 1) * (b.degree - 1))
        return _nonzero(br(a, br(b, c)) - br(br(a, b), c) - br(b, br(a, c)).scale(s), format_graded)
    return _pv_triple, evaluate


@random_check("calculus", "wedge_graded_commutative", 100)
def _():
    def evaluate(p):
        a, b = _pv(p, "a", "b")
        return _nonzero(wedge(a, b) - wedge(b, a).scale(_sign(a.degree * b.degree)), format_graded)
    return _pv_triple, evaluate


@random_check("calculus", "wedge_associative", 100)
def _():
    def evaluate(p):
        a, b, c = _pv(p, "a", "b", "c")
        return _nonzero(wedge(wedge(a, b), c) - wedge(a, wedge(b, c)), format_graded)
    return _pv_triple, evaluate


@random_check("calculus", "schouten_leibniz", 100)
def _():
    def evaluate(p):
        a, b, c = _pv(p, "a", "b", "c")
        br = schouten_bracket
        rhs = wedge(br(a, b), c) + wedge(b, br(a, c)).scale(_sign(b.degree * (a.degree + 1)))
        return _nonzero(br(a, wedge(b, c)) - rhs, format_graded)
    return _pv_triple, evaluate


@random_check("calculus", "contraction_lie_bracket", 100)
def _():
    def evaluate(p):
        a, b = _pv(p, "a", "b")
        (w,) = _pv(p, "w")
        lhs = (contraction_i(a, lie_derivative_l(b, w))
               - lie_derivative_l(b, contraction_i(a, w)).scale(_sign(a.degree * (b.degree + 1))))
        return _nonzero(lhs - contraction_i(schouten_bracket(a, b), w), format_graded)
    return _pv_triple, evaluate


@random_check("calculus", "lie_derivative_of_wedge", 100)
def _():
    def evaluate(p):
        a, b = _pv(p, "a", "b")
        (w,) = _pv(p, "w")
        rhs = lie_derivative_l(a, contraction_i(b, w)) + contraction_i(a, lie_derivative_l(b, w)).scale(_sign(a.degree))
        return _nonzero(lie_derivative_l(wedge(a, b), w) - rhs, format_graded)
    return _pv_triple, evaluate


@random_check("calculus", "cartan_formula", 100)
def _():
    def evaluate(p):
        (a,) = _pv(p, "a")
        (w,) = _pv(p, "w")
        rhs = de_rham_d(contraction_i(a, w)) - contraction_i(a, de_rham_d(w)).scale(_sign(a.degree))
        return _nonzero(lie_derivative_l(a, w) - rhs, format_graded)
    return _pv_triple, evaluate


@random_check("calculus", "de_rham_squared", 100)
def _():
    def evaluate(p):
        (w,) = _pv(p, "w")
        return _nonzero(de_rham_d(de_rham_d(w)), format_graded)
    return _pv_triple, evaluate


@random_check("calculus", "hkr_cocycle", 100)
def _():
    def sample(rng, cfg):
        d = _calc_dim(cfg)
        return {"g": graded_to_json(G.polyvector(rng, d, rng.randint(0, 3), 3))}

    return sample, lambda p: _nonzero(hoch_differential(hkr(graded_from_json(p["g"]))), format_cochain)


def f1_f2_defect(a: PolyVector, b: PolyVector) -> PolyDiffCochain:
    """F1([a,b]_SN) - [F1 a, F1 b]_G, which must be a Hochschild coboundary."""
    return formality_f1(schouten_bracket(a, b)) - gerstenhaber_bracket(formality_f1(a), formality_f1(b))


def solve_f2(a: PolyVector, b: PolyVector):
    """Return (F2, defect text): F2 with dF2 = F1[a,b] - [F1 a, F1 b]."""
    Y = f1_f2_defect(a, b)
    if Y.is_zero():
        return PolyDiffCochain.zero(Y.dim, max(Y.arity - 1, 0)), None
    if Y.arity == 0:
        return None, f"nonzero function-valued defect {format_cochain(Y)}"
    res = coboundary_solve(Y)
    if not res.solvable:
        return None, f"not a coboundary within bounds: {format_cochain(Y)}"
    if hoch_differential(res.solution) != Y:
        return None, "solver returned a wrong primitive"
    return res.solution, None


@random_check("calculus", "f1_f2_exactness", 20)
def _():
    def sample(rng, cfg):
        d = _calc_dim(cfg)
        return {k: graded_to_json(G.polyvector(rng, d, rng.randint(0, 2), 2)) for k in "ab"}

    def evaluate(p):
        a, b = _pv(p, "a", "b")
        return solve_f2(a, b)[1]
    return sample, evaluate


def _alternating_cycle(rng, dim: int, m: int, degree: int) -> HochChain:
    """sum_sigma sgn(sigma) f0 (x) f_sigma(1) ... plus a random boundary: a Hochschild cycle."""
    fs = [G.poly(rng, dim, degree, 2) for _ in range(m + 1)]
    out = HochChain.zero(dim, m)
    for p in itertools.permutations(range(m)):
        out = out + HochChain.from_tensors(dim, [(_perm_sign(p), [fs[0]] + [fs[1 + i] for i in p])])
    return out + chain_boundary(G.chain(rng, dim, m + 1, degree, 2))


@random_check("calculus", "cartan_homotopy", 20)
def _():
    def sample(rng, cfg):
        d = 2
        k = rng.randint(0, 2)
        m = rng.randint(0, 3)
        # the exhaustive boundary search grows fast with arity and degree
        return {"g": graded_to_json(G.polyvector(rng, d, k, 1 if k == 0 else 2)),
                "c": chain_to_json(_alternating_cycle(rng, d, m, 1 if m == 3 else 2))}

    def evaluate(p):
        P = hkr(graded_from_json(p["g"]))
        c = chain_from_json(p["c"])
        if not chain_boundary(c).is_zero():
            return "input is not a cycle"
        k = P.arity
        Y = (connes_B(contraction_I(P, c)) - contraction_I(P, connes_B(c)).scale(_sign(k))
             - lie_derivative_L(P, c).scale(_sign(k + 1)))
        if Y.is_zero():
            return None
        return None if chain_boundary_solve(Y) is not None else f"not a boundary: {format_chain(Y)}"
    return sample, evaluate


def _cocycle_for(rng, dim: int, k: int) -> PolyDiffCochain:
    g = hkr(G.polyvector(rng, dim, k, 1))
    if k >= 1:
        g = g + hoch_differential(G.cochain(rng, dim, k - 1, 0, 2, 2, normalized=True))
    return g


@random_check("calculus", "gerstenhaber_leibniz_homotopy", 20)
def _():
    def sample(rng, cfg):
        return {k: cochain_to_json(_cocycle_for(rng, 2, rng.randint(1, 2))) for k in ("P", "Q1", "Q2")}

    def evaluate(p):
        P, Q1, Q2 = (cochain_from_json(p[k]) for k in ("P", "Q1", "Q2"))
        for name, X in (("P", P), ("Q1", Q1), ("Q2", Q2)):
            if not hoch_differential(X).is_zero():
                return f"{name} is not a cocycle"
        br = gerstenhaber_bracket
        Y = br(P, cup(Q1, Q2)) - cup(br(P, Q1), Q2) - cup(Q1, br(P, Q2)).scale(_sign(Q1.arity * (P.arity + 1)))
        if Y.is_zero():
            return None
        return None if coboundary_solve(Y, check_cocycle=False).solvable else f"not exact: {format_cochain(Y)}"
    return sample, evaluate


# -- dgla -----------------------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _moyal(order: int, dim: int = 2) -> S.StarProduct:
    return S.moyal_weyl(S.canonical_theta(dim), order)


def _zero_series(dim: int, arity: int, order: int) -> List[PolyDiffCochain]:
    return [PolyDiffCochain.zero(dim, arity) for _ in range(order + 1)]


def _random_gauge(rng, dim: int, order: int) -> HbarSeries:
    return HbarSeries([PolyDiffCochain.zero(dim, 1)] + [G.cochain(rng, dim, 1, 2, 2, 2) for _ in range(order)], order)


@random_check("dgla", "mc_iff_associative", 20)
def _():
    def sample(rng, cfg):
        N = 3
        s = _moyal(N)
        if rng.random() < 0.5:
            s = S.gauge_star(s, _random_gauge(rng, 2, N))
        Pi = list(s.Pi)
        if rng.random() < 0.7:
            k = rng.randint(1, N)
            Pi[k] = Pi[k] + G.cochain(rng, 2, 2, 1, 2, 2)
        return {"star": S.star_to_json(S.StarProduct(2, N, HbarSeries(Pi, N)))}

    def evaluate(p):
        s = S.star_from_json(p["star"])
        mc = D.mc_defect(D.hochschild_dgla(s.dim), s.Pi)
        assoc = S.associativity_defect(s)
        for k in range(s.order + 1):
            if mc[k].is_zero() != assoc[k].is_zero():
                return f"MC and associativity defects disagree at hbar^{k}"
        return None
    return sample, evaluate


@random_check("dgla", "gauge_preserves_mc", 20)
def _():
    def sample(rng, cfg):
        N = 3
        return {"alpha": _series_json(_moyal(N).Pi), "xi": _series_json(_random_gauge(rng, 2, N))}

    def evaluate(p):
        alpha, xi = _series_from(p["alpha"]), _series_from(p["xi"])
        H = D.hochschild_dgla(alpha[0].dim)
        if not D.is_maurer_cartan(H, alpha):
            return "input is not Maurer-Cartan"
        return _series_nonzero(D.mc_defect(H, D.gauge_action(H, xi, alpha)))
    return sample, evaluate


@random_check("dgla", "gauge_composition_bch", 5)
def _():
    def sample(rng, cfg):
        N = 3
        return {"alpha": _series_json(_moyal(N).Pi), "xi": _series_json(_random_gauge(rng, 2, N)),
                "eta": _series_json(_random_gauge(rng, 2, N))}

    def evaluate(p):
        alpha, xi, eta = (_series_from(p[k]) for k in ("alpha", "xi", "eta"))
        H = D.hochschild_dgla(alpha[0].dim)
        two = D.gauge_action(H, eta, D.gauge_action(H, xi, alpha))
        return _series_nonzero(two - D.gauge_action(H, D.bch(H, xi, eta), alpha))
    return sample, evaluate


@random_check("dgla", "twist_by_moyal_squares_to_zero", 10)
def _():
    def sample(rng, cfg):
        N = 3
        a = rng.randint(0, 2)
        v = HbarSeries([G.cochain(rng, 2, a, 2, 2, 2) for _ in range(N + 1)], N)
        return {"alpha": _series_json(_moyal(N).Pi), "v": _series_json(v)}

    def evaluate(p):
        alpha, v = _series_from(p["alpha"]), _series_from(p["v"])
        T = D.twist_differential(D.hochschild_dgla(alpha[0].dim), alpha)
        return _series_nonzero(T.differential(T.differential(v)))
    return sample, evaluate


@random_check("dgla", "twist_by_poisson_squares_to_zero", 20)
def _():
    def sample(rng, cfg):
        pi = PolyVector(2, 2, {(0, 1): G.poly(rng, 2, 3, 3)})
        v = G.polyvector(rng, 2, rng.randint(0, 2), 3)
        return {"pi": graded_to_json(pi), "v": graded_to_json(v)}

    def evaluate(p):
        pi, v = _pv(p, "pi", "v")
        V = D.polyvector_gla(pi.dim)
        if not D.is_maurer_cartan(V, pi):
            return "pi is not Poisson"
        T = D.twist_differential(V, pi)
        return _nonzero(T.differential(T.differential(v)), format_graded)
    return sample, evaluate


def _ce_words(elements):
    for n in range(1, 4):
        for combo in itertools.combinations_with_replacement(range(len(elements)), n):
            yield D.CeWord(tuple(elements[i] for i in combo))


@random_check("dgla", "ce_coderivation_polyvector", 50)
def _():
    def sample(rng, cfg):
        return {"elements": [graded_to_json(G.polyvector(rng, 2, rng.randint(0, 2), 1)) for _ in range(3)]}

    def evaluate(p):
        els = [graded_from_json(e) for e in p["elements"]]
        V = D.polyvector_gla(els[0].dim)
        for w in _ce_words(els):
            if not D.ce_square(V, w).is_zero():
                return "Q^2 != 0 on a word"
            if D.coderivation_defect(V, w):
                return "Q is not a coderivation on a word"
        return None
    return sample, evaluate


@random_check("dgla", "ce_coderivation_hochschild", 10)
def _():
    def sample(rng, cfg):
        return {"elements": [cochain_to_json(G.cochain(rng, 2, rng.randint(0, 2), 1, 1, 1)) for _ in range(2)]}

    def evaluate(p):
        els = [cochain_from_json(e) for e in p["elements"]]
        H = D.hochschild_dgla(els[0].dim)
        for w in _ce_words(els):
            if not D.ce_square(H, w).is_zero():
                return "Q^2 != 0 on a word"
            if D.coderivation_defect(H, w):
                return "Q is not a coderivation on a word"
        return None
    return sample, evaluate


@random_check("dgla", "hochschild_dgla_axioms", 30)
def _():
    def sample(rng, cfg):
        return {k: cochain_to_json(G.cochain(rng, cfg.dim, rng.randint(0, 2), 2, 2, 2)) for k in "abc"}

    def evaluate(p):
        a, b, c = (cochain_from_json(p[k]) for k in "abc")
        H = D.hochschild_dgla(a.dim)
        for name, v in (("jacobi", D.jacobi_defect(H, a, b, c)), ("antisymmetry", D.antisymmetry_defect(H, a, b)),
                        ("derivation", D.derivation_defect(H, a, b))):
            if not v.is_zero():
                return f"{name} defect {format_cochain(v)}"
        return None
    return sample, evaluate


@random_check("dgla", "gauge_equals_intertwiner", 5)
def _():
    def sample(rng, cfg):
        return {"xi": _series_json(_random_gauge(rng, 2, 3))}

    def evaluate(p):
        xi = _series_from(p["xi"])
        s = _moyal(3)
        a = S.gauge_star(s, xi)
        b = S.apply_equivalence(S.gauge_to_equivalence(xi, 2), s)
        if a != b:
            return "gauge transform differs from the exp(-xi) push-forward"
        return None if S.is_associative(b) else "transformed product is not associative"
    return sample, evaluate


# -- star -------------------------------------------------------------------------------------------


def _star_assoc_certify(label: str, theta_fn):
    def certify(cfg):
        theta = theta_fn(cfg)
        s = S.moyal_weyl(theta, cfg.hbar_order)
        defect = S.associativity_defect(s)
        bad = _series_nonzero(defect)
        if bad is None:
            return CheckResult(label, "PASS", 1)
        return CheckResult(label, "FAIL", 1, detail=bad,
                           witness={"payload": {"theta": [[str(v) for v in r] for r in theta],
                                                "order": cfg.hbar_order}, "defect": bad})
    return certify


def _eval_moyal_assoc(p):
    s = S.moyal_weyl(p["theta"], int(p["order"]))
    return _series_nonzero(S.associativity_defect(s))


_register(Check("star", "moyal_associativity", _eval_moyal_assoc,
                certify=_star_assoc_certify("moyal_associativity", lambda cfg: cfg.star_theta())))
_register(Check("star", "moyal_associativity_random_theta_d4", _eval_moyal_assoc,
                certify=_star_assoc_certify(
                    "moyal_associativity_random_theta_d4",
                    lambda cfg: G.antisymmetric_matrix(random.Random(f"{cfg.seed}:theta4"), 4))))


def _monomial_pairs(max_total: int, dim: int = 2):
    monos = sorted(monomials_up_to(dim, max_total - 1, 1))
    for a, b in itertools.combinations_with_replacement(monos, 2):
        if sum(a) + sum(b) <= max_total:
            yield a, b


def _weyl_lie_enum(cfg):
    for a, b in _monomial_pairs(8):
        yield {"a": list(a), "b": list(b)}


def _weyl_lie_eval(p):
    a, b = MultiPoly.monomial(tuple(p["a"])), MultiPoly.monomial(tuple(p["b"]))
    comm = S.commutator_expansion(_moyal(4), a, b)
    expect = [MultiPoly.zero(2), O.raw_poisson_bracket(S.canonical_theta(2), a, b), MultiPoly.zero(2),
              O.vey_cocycle_2d(a, b), MultiPoly.zero(2)]
    for k in range(5):
        if comm[k] != expect[k]:
            return f"hbar^{k}: got {comm[k]}, expected {expect[k]}"
    return None


_register(Check("star", "weyl_lie_expansion", _weyl_lie_eval, enumerate=_weyl_lie_enum))


def _spot_certify(cfg):
    s = _moyal(4)
    x, y = MultiPoly.var(2, 0), MultiPoly.var(2, 1)
    c1 = S.commutator_expansion(s, x, y)
    c3 = S.commutator_expansion(s, x ** 3, y ** 3)
    ok = (c1[1] == MultiPoly.constant(2, 1) and all(c1[k].is_zero() for k in (0, 2, 3, 4))
          and c3[3] == MultiPoly.constant(2, Fraction(3, 2)) and c3[1] == (x * x * y * y).scale(9))
    values = {"[x,y]": [str(c) for c in c1], "[x^3,y^3]": [str(c) for c in c3]}
    return CheckResult("moyal_spot_values", "PASS" if ok else "FAIL", 1,
                       detail=None if ok else f"got {values}")


_register(Check("star", "moyal_spot_values", lambda p: None, certify=_spot_certify))


@random_check("star", "equivalence_preserves_associativity", 5)
def _():
    def sample(rng, cfg):
        N = 3
        T = HbarSeries([PolyDiffCochain.identity(2)] + [G.cochain(rng, 2, 1, 2, 2, 2) for _ in range(N)], N)
        return {"T": _series_json(T)}

    def evaluate(p):
        T = _series_from(p["T"])
        s = _moyal(3)
        t = S.apply_equivalence(S.EquivalenceSeries(2, 3, T), s)
        if not S.is_associative(t):
            return "transformed product is not associative"
        if S.antisymmetric_part(t.Pi[1]) != S.antisymmetric_part(s.Pi[1]):
            return "antisymmetric part of Pi_1 changed"
        return None
    return sample, evaluate


@random_check("star", "formal_poisson_jacobi", 10)
def _():
    def sample(rng, cfg):
        th = G.antisymmetric_matrix(rng, 4)
        return {"theta": [[str(v) for v in r] for r in th]}

    def evaluate(p):
        pi = S.theta_bivector(p["theta"])
        return _nonzero(schouten_bracket(pi, pi), format_graded)
    return sample, evaluate


# -- obstruction ---------------------------------------------------------------------------------------


def _pairs_enum(max_total):
    def enum(cfg):
        for a, b in _monomial_pairs(max_total):
            yield {"a": list(a), "b": list(b)}
    return enum


def _vey_anti_eval(p):
    a, b = MultiPoly.monomial(tuple(p["a"])), MultiPoly.monomial(tuple(p["b"]))
    th = S.canonical_theta(2)
    v = O.raw_vey_cocycle(th, a, b) + O.raw_vey_cocycle(th, b, a)
    return None if v.is_zero() else f"V(a,b) + V(b,a) = {v}"


def _vey_forms_eval(p):
    a, b = MultiPoly.monomial(tuple(p["a"])), MultiPoly.monomial(tuple(p["b"]))
    g, t = O.raw_vey_cocycle(S.canonical_theta(2), a, b), O.vey_cocycle_2d(a, b)
    return None if g == t else f"general {g} != two-dimensional {t}"


def _triples_enum(cfg):
    monos = sorted(monomials_up_to(2, 7, 1))
    for a, b, c in itertools.combinations_with_replacement(monos, 3):
        if sum(a) + sum(b) + sum(c) <= 9:
            yield {"a": list(a), "b": list(b), "c": list(c)}


def _ce2_eval(p):
    a, b, c = (MultiPoly.monomial(tuple(p[k])) for k in "abc")
    v = O.ce2_cocycle_defect(S.canonical_theta(2), a, b, c)
    return None if v.is_zero() else f"defect {v}"


_register(Check("obstruction", "vey_antisymmetry", _vey_anti_eval, enumerate=_pairs_enum(9)))
_register(Check("obstruction", "vey_general_matches_2d", _vey_forms_eval, enumerate=_pairs_enum(8)))
_register(Check("obstruction", "vey_ce2_cocycle", _ce2_eval, enumerate=_triples_enum))


def _certificate_certify(cfg):
    sys = O.build_coboundary_system(S.canonical_theta(2), cfg.obstruction_D, cfg.obstruction_Dpairs)
    cert = O.solve_or_certify(sys)
    witness = cert.to_json()
    if cert.infeasible and cert.verify():
        return CheckResult("non_formality_certificate", "PASS", 1, witness=witness,
                           detail=f"infeasible with a {len(cert.combination)}-row witness")
    detail = "the Vey coboundary system is solvable at these bounds"
    if not cert.verify():
        detail = "solver output failed re-verification"
    return CheckResult("non_formality_certificate", "FAIL", 1, witness=None, detail=detail)


def _replay_certify(cfg):
    tr = O.reproduce_paper_contradiction(D=max(cfg.obstruction_D, 5), Dpairs=max(cfg.obstruction_Dpairs, 7))
    ok = tr.contradiction and tr.consistent and tr.solver_status == "infeasible"
    detail = (f"x-coefficient of P(x^3*y^2): {tr.x_coefficient_raz} (raz) vs {tr.x_coefficient_dva} (dva)")
    return CheckResult("elimination_replay", "PASS" if ok else "FAIL", len(tr.steps), detail=detail)


@random_check("obstruction", "negative_control_coboundary", 5)
def _():
    def sample(rng, cfg):
        P0 = O.random_table(rng, 2, cfg.obstruction_D, 8)
        return {"D": cfg.obstruction_D, "Dpairs": cfg.obstruction_Dpairs, "P0": P0.to_json()}

    def evaluate(p):
        D_, Dp = int(p["D"]), int(p["Dpairs"])
        th = S.canonical_theta(2)
        P0 = O.LinearMapTable(2, D_, {})
        for m, v in p["P0"].items():
            (e,) = parse_poly(m, 2).terms
            P0.entries[e] = parse_poly(v, 2)
        coc = lambda a, b: O.coboundary(th, P0, a, b)
        cert = O.solve_or_certify(O.build_coboundary_system(th, D_, Dp, cocycle=coc))
        if cert.infeasible:
            return "coboundary right-hand side reported infeasible"
        return None if cert.verify(coc) else "returned map does not solve the system"
    return sample, evaluate


def _low_bounds_certify(cfg):
    cert = O.solve_or_certify(O.build_coboundary_system(S.canonical_theta(2), 3, 4))
    ok = cert.status == "solvable" and cert.verify()
    return CheckResult("low_bounds_solvable", "PASS" if ok else "FAIL", 1, detail=f"D=3, Dpairs=4: {cert.status}")


def _monotone_certify(cfg):
    th = S.canonical_theta(2)
    D_, Dp = cfg.obstruction_D, cfg.obstruction_Dpairs
    cert = O.solve_or_certify(O.build_coboundary_system(th, D_, Dp))
    if not cert.infeasible:
        return CheckResult("monotonicity", "PASS", 0, detail="no obstruction at these bounds; nothing to transport")
    bigger = O.build_coboundary_system(th, D_ + 1, Dp + 1)
    ok = O.embed_witness(cert, bigger) is not None and O.solve_or_certify(bigger).infeasible
    return CheckResult("monotonicity", "PASS" if ok else "FAIL", 1,
                       detail=f"witness transported to D={D_ + 1}, Dpairs={Dp + 1}")


def _empty_certify(cfg):
    sys = O.LinearSystem(S.canonical_theta(2), 3, 2, [], [], [])
    cert = O.solve_or_certify(sys)
    ok = cert.status == "solvable" and not cert.table.entries
    return CheckResult("empty_system", "PASS" if ok else "FAIL", 1)


for _name, _fn in (("non_formality_certificate", _certificate_certify), ("elimination_replay", _replay_certify),
                   ("low_bounds_solvable", _low_bounds_certify), ("monotonicity", _monotone_certify),
                   ("empty_system", _empty_certify)):
    _register(Check("obstruction", _name, lambda p: None, certify=_fn))


# -- running and re-verification ---------------------------------------------------------------------


REPORT_SCHEMA = "hochlab-report/1"


def run_suites(cfg: RunConfig, clock=None) -> List[dict]:
    names = SUITE_NAMES if cfg.suite == "all" else (cfg.suite,)
    out = []
    for name in names:
        results = [run_check(c, cfg, clock) for c in checks_for(name)]
        status = "PASS" if all(r.status == "PASS" for r in results) else "FAIL"
        out.append({"suite": name, "status": status, "checks": [r.to_json() for r in results]})
    return out


def verify_report(report: dict) -> List[dict]:
    """Re-validate every witness in a report.

    Failure witnesses are re-evaluated and must still fail; infeasibility
    certificates are re-checked by substitution.  Returns one entry per
    witness with ``ok`` set accordingly.
    """
    out = []
    for suite in report.get("suites", []):
        for chk in suite.get("checks", []):
            w = chk.get("witness")
            if not w:
                continue
            key = f"{suite['suite']}/{chk['check']}"
            if w.get("status") == "infeasible":
                ok = O.verify_certificate_json(w)
                kind = "infeasibility certificate"
            elif "payload" in w:
                check = REGISTRY.get(key)
                ok = check is not None and _safe_evaluate(check, w["payload"]) is not None
                kind = "counterexample"
            else:
                ok, kind = False, "unrecognised witness"
            out.append({"check": key, "kind": kind, "ok": bool(ok)})
    return out
