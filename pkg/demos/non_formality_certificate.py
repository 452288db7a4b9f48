"""Build the Vey coboundary system in two variables, certify it infeasible, and re-check the witness.

Run: python demos/non_formality_certificate.py [D] [Dpairs]
"""
import json
import sys

from hochlab import obstruction as O
from hochlab.starprod import canonical_theta


def main(D: int = 5, Dpairs: int = 7) -> None:
    system = O.build_coboundary_system(canonical_theta(2), D, Dpairs)
    print(f"D={D}, Dpairs={Dpairs}: {len(system.unknowns)} unknowns, {len(system.rows)} rows")
    cert = O.solve_or_certify(system)
    print("status:", cert.status)
    if not cert.infeasible:
        print("a solution exists at these bounds; first table entries:")
        for mono, value in list(cert.table.to_json().items())[:5]:
            print(f"  P({mono}) = {value}")
        return
    data = cert.to_json()
    print("witness (rows combined with these weights give 0 = 1):")
    for row, weight in zip(data["witness"]["rows"], data["witness"]["combination"]):
        print(f"  {weight:>6} x pair {row['pair']} at monomial {row['target_monomial']}: "
              f"{row['coeffs']} = {row['rhs']}")
    # the certificate is checkable from its JSON form alone
    print("re-verified from JSON:", O.verify_certificate_json(json.loads(json.dumps(data))))
    bigger = O.build_coboundary_system(canonical_theta(2), D + 1, Dpairs + 1)
    print(f"witness embeds into D={D + 1}, Dpairs={Dpairs + 1}:", O.embed_witness(cert, bigger) is not None)


if __name__ == "__main__":
    main(*(int(a) for a in sys.argv[1:3]))
