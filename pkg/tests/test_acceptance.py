"""Acceptance criteria 1-11, at the stated instance counts, tolerances (exact) and time limits."""
import itertools
import json
import random
import shutil
import subprocess
import sys
import time
from fractions import Fraction
from math import comb, factorial

from hochlab import dgla as D
from hochlab import generators as G
from hochlab import obstruction as O
from hochlab import starprod as S
from hochlab import suites
from hochlab.exactalg import MultiPoly, monomials_up_to
from hochlab.hochschild import coboundary_solve, gerstenhaber_bracket, hoch_differential
from hochlab.polyvec import PolyVector, graded_from_json, hkr, schouten_bracket
from hochlab.suites import REGISTRY, RunConfig, run_check

CFG = RunConfig()


def run_named(*names, expected=None):
    """Run registry checks under the default config; all must pass. Returns elapsed seconds."""
    start = time.perf_counter()
    for name in names:
        res = run_check(REGISTRY[name], CFG)
        assert res.status == "PASS", (name, res.detail, res.witness)
        if expected and name in expected:
            assert res.instances == expected[name], (name, res.instances)
    return time.perf_counter() - start


def sampled(name, n=None):
    """Replay the payloads a random check draws under the default config."""
    check = REGISTRY[name]
    rng = random.Random(f"{CFG.seed}:{check.suite}/{check.name}")
    return [check.sample(rng, CFG) for _ in range(n or CFG.count(check.instances))]


# 1. Complex axioms -----------------------------------------------------------------------------


def test_criterion_1_complex_axioms():
    names = {"identities/hoch_differential_squared": 200, "identities/chain_boundary_squared": 200,
             "identities/connes_B_squared": 200, "identities/boundary_B_anticommute": 200,
             "identities/negative_cyclic_differential_squared": 200}
    elapsed = run_named(*names, expected=names)
    assert elapsed < 30
    # the instances span the stated ranges
    arities = {p["P"]["arity"] for p in sampled("identities/hoch_differential_squared")}
    assert arities == {0, 1, 2, 3}
    chain_arities = {p["c"]["arity"] for p in sampled("identities/chain_boundary_squared")}
    assert chain_arities == set(range(6))
    assert {p["u_order"] for p in sampled("identities/negative_cyclic_differential_squared", 3)} == {3}


# 2. Module identities ----------------------------------------------------------------------------


def test_criterion_2_module_identities():
    names = {"identities/lie_derivative_bracket": 100, "identities/B_L_compatibility": 100}
    run_named(*names, expected=names)
    # non-vacuity: the Lie derivatives involved are not all zero
    from hochlab.hochschild import chain_from_json, cochain_from_json, lie_derivative_L
    nonzero = sum(not lie_derivative_L(cochain_from_json(p["P"]), chain_from_json(p["c"])).is_zero()
                  for p in sampled("identities/B_L_compatibility"))
    assert nonzero >= 50


# 3. Gerstenhaber / calculus axioms ----------------------------------------------------------------


def test_criterion_3_calculus_axioms():
    names = {f"calculus/{n}": 100 for n in (
        "schouten_antisymmetry", "schouten_jacobi", "wedge_graded_commutative", "wedge_associative",
        "schouten_leibniz", "contraction_lie_bracket", "lie_derivative_of_wedge", "cartan_formula",
        "de_rham_squared")}
    run_named(*names, expected=names)
    degrees = {p[k]["degree"] for p in sampled("calculus/schouten_leibniz") for k in "abc"}
    assert degrees == {0, 1, 2, 3}


# 4. HKR and F1/F2 -----------------------------------------------------------------------------------


def test_criterion_4_hkr_cocycle_exhaustive():
    d = 3
    for k in range(4):
        for axes in itertools.combinations(range(d), k):
            for e in monomials_up_to(d, 2):
                g = PolyVector(d, k, {axes: MultiPoly.monomial(e)})
                assert hoch_differential(hkr(g)).is_zero()
    run_named("calculus/hkr_cocycle", expected={"calculus/hkr_cocycle": 100})


def test_criterion_4_f1_f2_each_solve_under_5s():
    payloads = sampled("calculus/f1_f2_exactness")
    assert len(payloads) == 20
    nontrivial = 0
    for p in payloads:
        a, b = (graded_from_json(p[k]) for k in "ab")
        assert a.degree <= 2 and b.degree <= 2 and a.max_coeff_degree() <= 2 and b.max_coeff_degree() <= 2
        start = time.perf_counter()
        F2, err = suites.solve_f2(a, b)
        assert time.perf_counter() - start < 5
        assert err is None
        Y = suites.f1_f2_defect(a, b)
        assert hoch_differential(F2) == Y
        nontrivial += not Y.is_zero()
    assert nontrivial >= 5


def test_criterion_4_literal_hkr_needs_the_sign():
    """With the literal HKR map the defect is exact for vector fields but not for (bivector, function)."""
    rng = random.Random(4)
    for _ in range(5):
        a, b = G.polyvector(rng, 2, 1, 2), G.polyvector(rng, 2, 1, 2)
        Y = hkr(schouten_bracket(a, b)) - gerstenhaber_bracket(hkr(a), hkr(b))
        assert coboundary_solve(Y).solvable
    pi = PolyVector.basis(2, 0, 1)
    f = PolyVector.function(MultiPoly.var(2, 0) * MultiPoly.var(2, 1))
    Y = hkr(schouten_bracket(pi, f)) - gerstenhaber_bracket(hkr(pi), hkr(f))
    assert Y.arity == 1 and not Y.is_zero()  # a nonzero vector field is never a coboundary
    assert not coboundary_solve(Y).solvable


# 5. Moyal associativity -------------------------------------------------------------------------------


def test_criterion_5_moyal_associativity():
    assert CFG.hbar_order == 6
    elapsed = run_named("star/moyal_associativity", "star/moyal_associativity_random_theta_d4")
    assert elapsed < 60
    theta4 = G.antisymmetric_matrix(random.Random(f"{CFG.seed}:theta4"), 4)
    assert all(theta4[i][j] != 0 for i in range(4) for j in range(4) if i != j)


# 6. MC <=> associativity ------------------------------------------------------------------------------


def test_criterion_6_mc_iff_associative():
    run_named("dgla/mc_iff_associative", expected={"dgla/mc_iff_associative": 20})
    assoc_orders = []
    for p in sampled("dgla/mc_iff_associative"):
        s = S.star_from_json(p["star"])
        assert s.order == 3
        defect = S.associativity_defect(s)
        assoc_orders.append(tuple(c.is_zero() for c in defect))
    # both associative and non-associative series occur, so the "iff" is exercised both ways
    assert any(all(z) for z in assoc_orders)
    assert any(not all(z) for z in assoc_orders)


# 7. Commutator expansion --------------------------------------------------------------------------------


def independent_moyal(a: MultiPoly, b: MultiPoly, order: int):
    """a*b for the canonical 2D bracket from the exponential formula, written out directly."""
    out = []
    for k in range(order + 1):
        term = MultiPoly.zero(2)
        for j in range(k + 1):
            da = a.diff_multi((k - j, j))
            db = b.diff_multi((j, k - j))
            term = term + (da * db).scale(Fraction((-1) ** j * comb(k, j), 2 ** k * factorial(k)))
        out.append(term)
    return out


def test_criterion_7_weyl_lie_expansion():
    n = sum(1 for _ in suites._weyl_lie_enum(CFG))
    elapsed = run_named("star/weyl_lie_expansion", "star/moyal_spot_values",
                        expected={"star/weyl_lie_expansion": n})
    assert elapsed < 60
    assert n == sum(1 for a, b in itertools.combinations_with_replacement(monomials_up_to(2, 7, 1), 2)
                    if sum(a) + sum(b) <= 8)
    x, y = MultiPoly.var(2, 0), MultiPoly.var(2, 1)
    for a, b, expect in ((x, y, {1: MultiPoly.constant(2, 1)}),
                         (x ** 3, y ** 3, {1: (x * x * y * y).scale(9), 3: MultiPoly.constant(2, Fraction(3, 2))})):
        ab, ba = independent_moyal(a, b, 4), independent_moyal(b, a, 4)
        comm = [p - q for p, q in zip(ab, ba)]
        for k in range(5):
            assert comm[k] == expect.get(k, MultiPoly.zero(2))
        assert list(S.commutator_expansion(S.moyal_weyl(S.canonical_theta(2), 4), a, b)) == comm


# 8. Vey cocycle -------------------------------------------------------------------------------------------


def test_criterion_8_vey_cocycle():
    n_triples = sum(1 for _ in suites._triples_enum(CFG))
    n_pairs = sum(1 for _ in suites._pairs_enum(8)(CFG))
    run_named("obstruction/vey_ce2_cocycle", "obstruction/vey_general_matches_2d",
              expected={"obstruction/vey_ce2_cocycle": n_triples, "obstruction/vey_general_matches_2d": n_pairs})
    assert n_triples == sum(1 for t in itertools.combinations_with_replacement(monomials_up_to(2, 7, 1), 3)
                            if sum(map(sum, t)) <= 9)


# 9. Non-formality certificate ---------------------------------------------------------------------------------


def test_criterion_9_non_formality():
    start = time.perf_counter()
    th = S.canonical_theta(2)
    system = O.build_coboundary_system(th, 5, 7)
    cert = O.solve_or_certify(system)
    assert cert.status == "infeasible"
    assert cert.verify()
    assert O.verify_certificate_json(json.loads(json.dumps(cert.to_json())))
    # no gauge-fixing rows enter the generic system
    assert all(p[0] != "gauge" for p in system.provenance)

    tr = O.reproduce_paper_contradiction(th)
    assert tr.solver_status == "infeasible"
    assert tr.contradiction and tr.consistent
    assert tr.x_coefficient_raz == Fraction(1, 2)
    assert tr.x_coefficient_dva == Fraction(-3, 10)
    assert abs(tr.x_coefficient_dva) == Fraction(3, 10)
    steps = {s.name: s for s in tr.steps}
    raz, dva = steps["raz: a=x^4,b=y^3"], steps["dva: a=x^3*y,b=x*y^2"]
    assert raz.in_row_space and dva.in_row_space
    assert "12*P(x^3*y^2)" in raz.constraints[0] and "36*c0" in raz.constraints[0]
    assert "5*P(x^3*y^2)" in dva.constraints[0] and "15*c0" in dva.constraints[0]
    assert raz.printed_form_in_row_space is False and dva.printed_form_in_row_space is False

    res = run_check(REGISTRY["obstruction/negative_control_coboundary"], CFG)
    assert res.status == "PASS" and res.instances == 5
    assert time.perf_counter() - start < 60


# 10. Gauge machinery ---------------------------------------------------------------------------------------------


def test_criterion_10_gauge_machinery():
    names = {"dgla/gauge_preserves_mc": 20, "dgla/twist_by_moyal_squares_to_zero": 10,
             "dgla/twist_by_poisson_squares_to_zero": 20, "dgla/ce_coderivation_polyvector": 50}
    run_named(*names, expected=names)
    # non-vacuity: the gauge action moves Moyal, and the Poisson twists are nontrivial
    H = D.hochschild_dgla(2)
    moved = 0
    for p in sampled("dgla/gauge_preserves_mc", 5):
        alpha, xi = suites._series_from(p["alpha"]), suites._series_from(p["xi"])
        assert alpha.order == 3
        moved += D.gauge_action(H, xi, alpha) != alpha
    assert moved == 5
    nontrivial = 0
    for p in sampled("dgla/twist_by_poisson_squares_to_zero"):
        pi, v = suites._pv(p, "pi", "v")
        nontrivial += not schouten_bracket(pi, v).is_zero()
    assert nontrivial >= 10
    words = list(suites._ce_words(list(range(3))))
    assert {len(w.factors) for w in words} == {1, 2, 3}


# 11. Determinism and witness re-verification ---------------------------------------------------------------------


def _hochlab_cmd():
    exe = shutil.which("hochlab")
    return [exe] if exe else [sys.executable, "-m", "hochlab.cli"]


def test_criterion_11_determinism(tmp_path):
    outs = []
    for i in range(2):
        path = tmp_path / f"all{i}.json"
        proc = subprocess.run(_hochlab_cmd() + ["all", "--format", "json", "--out", str(path)],
                              capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
    report = json.loads(outs[0])
    assert report["status"] == "PASS"
    obstruction = next(s for s in report["suites"] if s["suite"] == "obstruction")
    witnesses = [c for c in obstruction["checks"] if c["witness"]]
    assert any(c["check"] == "non_formality_certificate" for c in witnesses)
    proc = subprocess.run(_hochlab_cmd() + ["verify-witness", str(tmp_path / "all0.json")],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stdout
    n = sum(1 for s in report["suites"] for c in s["checks"] if c["witness"])
    assert f"{n}/{n} witnesses re-verified" in proc.stdout
