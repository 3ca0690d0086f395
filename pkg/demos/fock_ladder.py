"""Build a truncated bosonic Fock space and exercise the ladder operators.

The script enumerates the occupation basis for a small one-particle space,
builds creation/annihilation operators for a normalized mode vector, and
checks the canonical commutation relation on the subspace safely below the
truncation level, where no amplitude has been cut off.
"""

import numpy as np

from fockdyn import FockBasis, annihilator, basis_lines, creator, number_operator


def main() -> None:
    dim_h, n_max = 2, 4
    basis = FockBasis(dim_h, n_max)
    print(f"one-particle dimension {dim_h}, truncation {n_max}, "
          f"Fock dimension {basis.size}")
    print()
    print("first few basis states (graded, then lexicographic):")
    for line in basis_lines(basis)[:6]:
        print(" ", line)
    print()

    rng = np.random.default_rng(7)
    f = rng.standard_normal(dim_h) + 1j * rng.standard_normal(dim_h)
    f /= np.linalg.norm(f)
    a = annihilator(basis, f)
    a_dag = creator(basis, f)
    n_op = number_operator(basis)

    # [a(F), a(F)*] = ||F||^2 on states that cannot reach the truncation edge
    comm = (a.matrix @ a_dag.matrix - a_dag.matrix @ a.matrix).toarray()
    safe = basis.totals <= n_max - 1
    block = comm[np.ix_(safe, safe)]
    defect = np.abs(block - np.eye(safe.sum())).max()
    print(f"commutator defect below truncation: {defect:.3e}")

    # a(F)* raises the total occupation by exactly one
    vac = basis.vacuum()
    one = a_dag.matrix @ vac
    lifted = n_op.matrix @ one
    print(f"occupation of a(F)*|vac>: {np.vdot(one, lifted).real:.6f} "
          f"(norm {np.linalg.norm(one):.6f})")

    # the annihilator bound ||a(F) psi|| <= ||F|| ||N^(1/2) psi|| on a random state
    psi = rng.standard_normal(basis.size) + 1j * rng.standard_normal(basis.size)
    lhs = np.linalg.norm(a.matrix @ psi)
    rhs = np.linalg.norm(np.sqrt(basis.totals) * psi)
    print(f"ladder bound: {lhs:.6f} <= {rhs:.6f} "
          f"(slack {rhs - lhs:.3e})")


if __name__ == "__main__":
    main()
