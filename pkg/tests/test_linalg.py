from fractions import Fraction

from ncdef.linalg import Echelon, kernel_basis, solve_sparse, vec_add
from ncdef.matrix_ring import AlgebraMap, divisor_truncation, parse_monomial


def F(n, d=1):
    return Fraction(n, d)


def test_echelon_rank_and_reduce():
    ech = Echelon(priority=lambda c: c)
    assert ech.add({0: F(2), 1: F(2)}) is not None
    assert ech.add({0: F(1), 1: F(1)}) is None
    assert ech.add({1: F(1)}) is not None
    assert ech.rank == 2
    assert ech.reduce({0: F(3), 1: F(5)}) == {}


def test_echelon_priority_steers_pivot():
    ech = Echelon(priority=lambda c: -c)  # prefer small column labels
    pivot = ech.add({0: F(1), 5: F(7)})
    assert pivot == 0


def test_solve_sparse_consistent():
    # x + y = 3, x - y = 1
    sol = solve_sparse([({"x": F(1), "y": F(1)}, F(3)),
                        ({"x": F(1), "y": F(-1)}, F(1))])
    assert sol == {"x": F(2), "y": F(1)}


def test_solve_sparse_underdetermined_free_vars_zero():
    sol = solve_sparse([({"x": F(1), "y": F(2)}, F(4))])
    assert sol is not None
    assert sol.get("x", F(0)) + 2 * sol.get("y", F(0)) == F(4)


def test_solve_sparse_inconsistent():
    assert solve_sparse([({"x": F(1)}, F(1)), ({"x": F(1)}, F(2))]) is None


def test_kernel_basis():
    vectors = [{0: F(1)}, {0: F(2)}, {1: F(1)}, {0: F(1), 1: F(1)}]
    kernel = kernel_basis(vectors, tags=["a", "b", "c", "d"])
    assert len(kernel) == 2
    for combo in kernel:
        total = {}
        names = {"a": vectors[0], "b": vectors[1], "c": vectors[2],
                 "d": vectors[3]}
        for tag, coeff in combo.items():
            total = vec_add(total, names[tag], coeff)
        assert total == {}


def test_divisor_truncation_small_kernel():
    # the inclusion-of-x variant surjects onto the plain divisor algebra
    # with a one-dimensional kernel spanned by x, killed by the radical
    x = parse_monomial("x12*x24", 4)
    S = divisor_truncation(x, 4)
    R = divisor_truncation(x, 4, include_self=True)
    assert R.dim == S.dim + 1
    images = {label: ({S.index[label]: F(1)} if label in S.index else {})
              for label in R.basis}
    u = AlgebraMap(R, S, images)
    kernel = u.kernel()
    assert len(kernel) == 1
    (vec,) = kernel
    assert set(vec) == {R.index[x]}
    for r in R.radical_indices():
        unit = {r: F(1)}
        assert R.mult_coords(unit, vec) == {}
        assert R.mult_coords(vec, unit) == {}
