"""Why F1 carries a sign: HKR intertwines the brackets only up to coboundaries and a degree sign."""
from hochlab.exactalg import parse_poly
from hochlab.hochschild import coboundary_solve, format_cochain, gerstenhaber_bracket, hoch_differential
from hochlab.polyvec import PolyVector, formality_f1, hkr, schouten_bracket


def defect(F, a, b):
    return F(schouten_bracket(a, b)) - gerstenhaber_bracket(F(a), F(b))


def main() -> None:
    pi = PolyVector.basis(2, 0, 1)
    f = PolyVector.function(parse_poly("x1*x2", 2))
    v = PolyVector(2, 1, {(0,): parse_poly("x2^2", 2)})
    for name, F in (("hkr", hkr), ("F1 = eps(k) hkr", formality_f1)):
        print(f"with {name}:")
        for label, a, b in (("(pi, f)", pi, f), ("(pi, v)", pi, v)):
            Y = defect(F, a, b)
            res = coboundary_solve(Y) if Y.arity >= 1 and not Y.is_zero() else None
            if Y.is_zero():
                verdict = "zero"
            elif res is not None and res.solvable:
                assert hoch_differential(res.solution) == Y
                verdict = f"coboundary of {format_cochain(res.solution)}"
            else:
                verdict = "NOT a coboundary"
            print(f"  {label}: defect {format_cochain(Y)} -> {verdict}")


if __name__ == "__main__":
    main()
