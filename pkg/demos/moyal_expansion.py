"""Moyal-Weyl products in two variables and the hbar^3 term of the commutator (the Vey cocycle)."""
from hochlab.exactalg import MultiPoly, parse_poly
from hochlab.obstruction import raw_poisson_bracket, vey_cocycle_2d
from hochlab.starprod import associativity_defect, canonical_theta, commutator_expansion, moyal_weyl, star_multiply


def show(label, series):
    terms = [f"({c})*h^{k}" for k, c in enumerate(series) if not c.is_zero()]
    print(f"{label} = {' + '.join(terms) or '0'}")


def main() -> None:
    theta = canonical_theta(2)
    s = moyal_weyl(theta, 4)
    x, y = parse_poly("x1", 2), parse_poly("x2", 2)
    show("x*y", star_multiply(s, x, y))
    show("y*x", star_multiply(s, y, x))
    show("x^2*y^2", star_multiply(s, x ** 2, y ** 2))
    for a, b in ((x, y), (x ** 3, y ** 3), (x ** 2 * y, x * y ** 2)):
        comm = commutator_expansion(s, a, b)
        show(f"[{a},{b}]", comm)
        assert comm[1] == raw_poisson_bracket(theta, a, b)
        assert comm[3] == vey_cocycle_2d(a, b)
    print("Moyal associative to hbar^4:", all(c.is_zero() for c in associativity_defect(s)))
    trunc = s.truncated_to(1)
    defect = associativity_defect(trunc)
    print("first-order truncation: associativity defect first appears at hbar^"
          f"{next(k for k, c in enumerate(defect) if not c.is_zero())}")


if __name__ == "__main__":
    main()
