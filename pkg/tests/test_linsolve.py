from fractions import Fraction

from hochlab.linsolve import RowEchelon, combine, solve, verify_solution, verify_witness


def row(coeffs, rhs):
    return ({k: Fraction(v) for k, v in coeffs.items()}, Fraction(rhs))


def test_solvable_system_solution_checks():
    rows = [row({"a": 1, "b": 1}, 3), row({"a": 1, "b": -1}, 1), row({"c": 2}, 5)]
    res = solve(rows)
    assert res.solvable
    assert res.solution["a"] == 2 and res.solution["b"] == 1 and res.solution["c"] == Fraction(5, 2)
    assert verify_solution(rows, res.solution)


def test_infeasible_system_has_verifiable_witness():
    rows = [row({"a": 1, "b": 1}, 1), row({"b": 1, "c": 1}, 1), row({"a": 1, "c": -1}, 1),
            row({"d": 1}, 7)]
    res = solve(rows)
    assert not res.solvable
    assert verify_witness(rows, res.witness)
    coeffs, rhs = combine(rows, res.witness)
    assert not coeffs and rhs == 1
    # the independent component does not enter the certificate
    assert 3 not in res.witness


def test_tampered_witness_rejected():
    rows = [row({"a": 1}, 1), row({"a": 1}, 2)]
    res = solve(rows)
    assert not res.solvable
    bad = dict(res.witness)
    bad[0] = bad[0] * 2
    assert not verify_witness(rows, bad)


def test_empty_and_zero_rows():
    assert solve([]).solvable
    assert solve([row({}, 0)]).solvable
    res = solve([row({}, 3)])
    assert not res.solvable and verify_witness([row({}, 3)], res.witness)


def test_row_echelon_membership():
    ech = RowEchelon()
    assert ech.add({"x": Fraction(1), "y": Fraction(2)}, 1, tag=0)
    assert ech.add({"y": Fraction(1)}, 0, tag=1)
    assert ech.contains({"x": Fraction(3), "y": Fraction(1)}, 3)
    assert not ech.contains({"x": Fraction(1)}, 0)
    assert not ech.add({"x": Fraction(2), "y": Fraction(4)}, 2, tag=2)  # dependent
    assert ech.contradiction is None
    ech.add({"x": Fraction(1)}, 5, tag=3)
    assert ech.contradiction is not None
