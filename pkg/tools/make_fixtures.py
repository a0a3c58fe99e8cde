"""Regenerate the fixture corpus under fixtures/.

Problem files describe the optimization problems of the example corpus;
matrix files carry the published 4-decimal (2-decimal for the large ones)
optimal moment matrices, so extraction tests do not depend on which point
of the optimal face the internal solver lands on.

Run from the repository root:  python3 tools/make_fixtures.py
"""

import os

import numpy as np

from momentopt.moment import MomentMatrix, MomentSequence, moment_matrix
from momentopt.poly import Polynomial
from momentopt.serialize import ProblemFile, dump_json, matrix_to_dict, problem_to_dict

HERE = os.path.dirname(os.path.abspath(__file__))
OUT = os.path.join(HERE, "..", "fixtures")


def var(n, i):
    return Polynomial.variable(n, i)


def const(n, c):
    return Polynomial.constant(n, c)


def box(lo, hi, x, n):
    return [x - const(n, lo), const(n, hi) - x]


def write_problem(name, pf):
    dump_json(problem_to_dict(pf), os.path.join(OUT, name + ".json"))


def write_matrix(name, n, order, entries):
    entries = np.asarray(entries, dtype=float)
    entries = (entries + entries.T) / 2.0
    M = MomentMatrix(n, order, entries)
    dump_json(matrix_to_dict(M), os.path.join(OUT, name + ".json"))


def problems():
    # min -12 x1 - 7 x2 + x2^2  s.t.  -2 x1^4 + 2 - x2 = 0, 0 <= x1 <= 2, 0 <= x2 <= 3
    n = 2
    x1, x2 = var(n, 0), var(n, 1)
    obj = const(n, -12) * x1 + const(n, -7) * x2 + x2 * x2
    eq = const(n, -2) * x1 * x1 * x1 * x1 + const(n, 2) - x2
    write_problem("porfavor", ProblemFile(n, obj, tuple(box(0, 2, x1, n) + box(0, 3, x2, n)), (eq,)))

    # Motzkin polynomial on the box [-2, 2]^2
    obj = (x1 * x1 * x1 * x1 * x2 * x2 + x1 * x1 * x2 * x2 * x2 * x2
           + const(n, -3) * x1 * x1 * x2 * x2 + const(n, 1))
    write_problem("amigo", ProblemFile(n, obj, tuple(box(-2, 2, x1, n) + box(-2, 2, x2, n)), ()))

    # x1^2 x2^2 (x1^2 + x2^2 - 1), unconstrained
    obj = x1 * x1 * x2 * x2 * (x1 * x1 + x2 * x2 - const(n, 1))
    write_problem("madrugada_problem", ProblemFile(n, obj, (), ()))

    # min -x1 - x2 on a nonconvex set cut out by two quartics and a box
    obj = const(n, -1) * x1 - x2
    g1 = (const(n, 2) * x1 ** 4 - const(n, 8) * x1 ** 3 + const(n, 8) * x1 ** 2
          + const(n, 2) - x2)
    g2 = (const(n, 4) * x1 ** 4 - const(n, 32) * x1 ** 3 + const(n, 88) * x1 ** 2
          - const(n, 96) * x1 + const(n, 36) - x2)
    cons = [g1, g2] + box(0, 3, x1, n) + box(0, 4, x2, n)
    write_problem("nonconvex", ProblemFile(n, obj, tuple(cons), ()))

    # min -(x1-1)^2 - (x1-x2)^2 - (x2-3)^2  s.t. each square <= 1
    d1, d2, d3 = x1 - const(n, 1), x1 - x2, x2 - const(n, 3)
    obj = const(n, -1) * (d1 * d1 + d2 * d2 + d3 * d3)
    cons = [const(n, 1) - d1 * d1, const(n, 1) - d2 * d2, const(n, 1) - d3 * d3]
    write_problem("flatcase_problem", ProblemFile(n, obj, tuple(cons), ()))

    # Rosenbrock-type objective in three variables on the box [-2.048, 2.048]^3
    n = 3
    y1, y2, y3 = var(n, 0), var(n, 1), var(n, 2)
    r1, r2 = y2 - y1 * y1, y3 - y2 * y2
    obj = (const(n, 100) * (r1 * r1 + r2 * r2)
           + (y1 - const(n, 1)) ** 2 + (y2 - const(n, 1)) ** 2)
    cons = box(-2.048, 2.048, y1, n) + box(-2.048, 2.048, y2, n) + box(-2.048, 2.048, y3, n)
    write_problem("rosenbrock", ProblemFile(n, obj, tuple(cons), ()))

    # one-variable sanity problems
    n = 1
    x = var(n, 0)
    write_problem("minx2", ProblemFile(n, x * x, (), ()))
    write_problem("minxm1sq", ProblemFile(n, (x - const(n, 1)) ** 2, (), ()))


def matrices():
    # quadrature form 1/4 (ev(0,0) + ev(1,0) + ev(-1,0) + ev(0,1)), exact moments
    y = MomentSequence.from_points([(0, 0), (1, 0), (-1, 0), (0, 1)], [0.25] * 4, 4)
    dump_json(matrix_to_dict(moment_matrix(y, 2)), os.path.join(OUT, "elprimero.json"))

    # Curto-Fialkow style integer matrix with quadrature on degree <= 3 only
    write_matrix("cf3", 2, 2, [
        [1, 1, 1, 2, 0, 3],
        [1, 2, 0, 4, 0, 0],
        [1, 0, 3, 0, 0, 9],
        [2, 4, 0, 9, 0, 0],
        [0, 0, 0, 0, 0, 0],
        [3, 0, 9, 0, 0, 28],
    ])

    write_matrix("porfavor_matrix", 2, 2, [
        [1.0000, 0.7175, 1.4698, 0.5149, 1.0547, 2.1604],
        [0.7175, 0.5149, 1.0547, 0.3694, 0.7568, 1.5502],
        [1.4698, 1.0547, 2.1604, 0.7568, 1.5502, 3.1755],
        [0.5149, 0.3694, 0.7568, 0.2651, 0.5430, 1.1123],
        [1.0547, 0.7568, 1.5502, 0.5430, 1.1123, 2.2785],
        [2.1604, 1.5502, 3.1755, 1.1123, 2.2785, 8.7737],
    ])

    write_matrix("flatcase", 2, 2, [
        [1.0000, 1.4241, 2.1137, 2.2723, 3.0755, 4.5683],
        [1.4241, 2.2723, 3.0755, 3.9688, 4.9993, 6.8330],
        [2.1137, 3.0755, 4.5683, 4.9993, 6.8330, 10.1595],
        [2.2723, 3.9688, 4.9993, 7.3617, 8.8468, 11.3625],
        [3.0755, 4.9993, 6.8330, 8.8468, 11.3625, 15.7120],
        [4.5683, 6.8330, 10.1595, 11.3625, 15.7120, 23.3879],
    ])

    write_matrix("nonconvex_k4", 2, 2, [
        [1.0000, 3.0000, 4.0000, 9.0000, 12.0000, 16.0000],
        [3.0000, 9.0000, 12.0000, 27.0000, 36.0000, 48.0000],
        [4.0000, 12.0000, 16.0000, 36.0000, 48.0000, 64.0000],
        [9.0000, 27.0000, 36.0000, 107.6075, 109.0814, 176.3211],
        [12.0000, 36.0000, 48.0000, 109.0814, 176.3211, 194.9661],
        [16.0000, 48.0000, 64.0000, 176.3211, 194.9661, 368.5439],
    ])

    write_matrix("nonconvex_k5", 2, 2, [
        [1.00, 2.67, 4.00, 8.00, 10.67, 16.00],
        [2.67, 8.00, 10.67, 24.00, 32.00, 42.67],
        [4.00, 10.67, 16.00, 32.00, 42.67, 64.00],
        [8.00, 24.00, 32.00, 72.00, 96.00, 128.00],
        [10.67, 32.00, 42.67, 96.00, 128.00, 170.67],
        [16.00, 42.67, 64.00, 128.00, 170.67, 256.00],
    ])

    write_matrix("nonconvex_k6", 2, 3, [
        [1.00, 2.67, 4.00, 8.00, 10.67, 16.00, 24.00, 32.00, 42.67, 64.00],
        [2.67, 8.00, 10.67, 24.00, 32.00, 42.67, 72.00, 96.00, 128.00, 170.67],
        [4.00, 10.67, 16.00, 32.00, 42.67, 64.00, 96.00, 128.00, 170.67, 256.00],
        [8.00, 24.00, 32.00, 72.00, 96.00, 128.00, 216.00, 288.00, 384.00, 512.00],
        [10.67, 32.00, 42.67, 96.00, 128.00, 170.67, 288.00, 384.00, 512.00, 682.66],
        [16.00, 42.67, 64.00, 128.00, 170.67, 256.00, 384.00, 512.00, 682.66, 1024.00],
        [24.00, 72.00, 96.00, 216.00, 288.00, 384.00, 204299.70, 870.25, 19035.69, 1583.15],
        [32.00, 96.00, 128.00, 288.00, 384.00, 512.00, 870.25, 19035.69, 1583.15, 18023.54],
        [42.67, 128.00, 170.67, 384.00, 512.00, 682.66, 19035.69, 1583.15, 18023.54, 2822.34],
        [64.00, 170.67, 256.00, 512.00, 682.66, 1024.00, 1583.15, 18023.54, 2822.34, 58336.42],
    ])

    write_matrix("nonconvex_k7", 2, 3, [
        [1.00, 2.33, 3.18, 5.43, 7.40, 10.10, 12.64, 17.25, 23.53, 32.11],
        [2.33, 5.43, 7.40, 12.64, 17.25, 23.53, 29.45, 40.18, 54.82, 74.80],
        [3.18, 7.40, 10.10, 17.25, 23.53, 32.11, 40.18, 54.82, 74.80, 102.07],
        [5.43, 12.64, 17.25, 29.45, 40.18, 54.82, 68.60, 93.60, 127.72, 174.26],
        [7.40, 17.25, 23.53, 40.18, 54.82, 74.80, 93.60, 127.72, 174.26, 237.77],
        [10.10, 23.53, 32.11, 54.82, 74.80, 102.07, 127.72, 174.26, 237.77, 324.42],
        [12.64, 29.45, 40.18, 68.60, 93.60, 127.72, 159.81, 218.05, 297.51, 405.94],
        [17.25, 40.18, 54.82, 93.60, 127.72, 174.26, 218.05, 297.51, 405.94, 553.88],
        [23.53, 54.82, 74.80, 127.72, 174.26, 237.77, 297.51, 405.94, 553.88, 755.74],
        [32.11, 74.80, 102.07, 174.26, 237.77, 324.42, 405.94, 553.88, 755.74, 1031.16],
    ])

    M = np.ones((10, 10))
    M[9, 9] = 5.6502
    write_matrix("rosenbrock_k4", 3, 2, M)
    M = np.ones((10, 10))
    M[9, 9] = 1.0014
    write_matrix("rosenbrock_k5", 3, 2, M)

    C = np.array([
        [5.2880, 0.9994, 0.9994, 2.4826, 0.9989, 2.4744, 0.9988, 1.0004, 1.0020, 1.0001],
        [0.9994, 2.4826, 0.9989, 0.9988, 1.0004, 1.0020, 2.4832, 1.0010, 1.6671, 1.0007],
        [0.9994, 0.9989, 2.4744, 1.0004, 1.0020, 1.0001, 1.0010, 1.6671, 1.0007, 2.4638],
        [2.4826, 0.9988, 1.0004, 2.4832, 1.0010, 1.6671, 0.9983, 1.0007, 1.0015, 1.0001],
        [0.9989, 1.0004, 1.0020, 1.0010, 1.6671, 1.0007, 1.0007, 1.0015, 1.0001, 1.0016],
        [2.4744, 1.0020, 1.0001, 1.6671, 1.0007, 2.4638, 1.0015, 1.0001, 1.0016, 0.9912],
        [0.9988, 2.4832, 1.0010, 0.9983, 1.0007, 1.0015, 5.2883, 1.0071, 2.4669, 1.0072],
        [1.0004, 1.0010, 1.6671, 1.0007, 1.0015, 1.0001, 1.0071, 2.4669, 1.0072, 2.4579],
        [1.0020, 1.6671, 1.0007, 1.0015, 1.0001, 1.0016, 2.4669, 1.0072, 2.4579, 1.0040],
        [1.0001, 1.0007, 2.4638, 1.0001, 1.0016, 0.9912, 1.0072, 2.4579, 1.0040, 14.6604],
    ])
    A = np.ones((10, 10))
    B = np.ones((10, 10))
    write_matrix("rosenbrock_k6", 3, 3, np.block([[A, B], [B.T, C]]))

    # Motzkin box problem, order 4 solution assembled from its printed blocks
    A = np.array([
        [1.0000, -0.0005, -0.0004, 1.0000, -0.0000, 1.0000, -0.0005, -0.0004, -0.0005, -0.0004],
        [-0.0005, 1.0000, -0.0000, -0.0005, -0.0004, -0.0005, 1.0000, -0.0000, 1.0000, -0.0000],
        [-0.0004, -0.0000, 1.0000, -0.0004, -0.0005, -0.0004, -0.0000, 1.0000, -0.0000, 1.0000],
        [1.0000, -0.0005, -0.0004, 1.0000, -0.0000, 1.0000, -0.0005, -0.0004, -0.0005, -0.0004],
        [-0.0000, -0.0004, -0.0005, -0.0000, 1.0000, -0.0000, -0.0004, -0.0005, -0.0004, -0.0005],
        [1.0000, -0.0005, -0.0004, 1.0000, -0.0000, 1.0000, -0.0005, -0.0004, -0.0005, -0.0004],
        [-0.0005, 1.0000, -0.0000, -0.0005, -0.0004, -0.0005, 1.0001, -0.0000, 1.0001, -0.0000],
        [-0.0004, -0.0000, 1.0000, -0.0004, -0.0005, -0.0004, -0.0000, 1.0001, -0.0000, 1.0001],
        [-0.0005, 1.0000, -0.0000, -0.0005, -0.0004, -0.0005, 1.0001, -0.0000, 1.0001, -0.0000],
        [-0.0004, -0.0000, 1.0000, -0.0004, -0.0005, -0.0004, -0.0000, 1.0001, -0.0000, 1.0001],
    ])
    W = np.zeros((10, 5))
    W[0] = [1, 0, 1, 0, 1]
    W[4] = [0, 1, 0, 1, 0]
    C = np.array([
        [6.4115, -0.0000, 2.0768, -0.0000, 1.7719],
        [-0.0000, 2.0768, -0.0000, 1.7719, -0.0000],
        [2.0768, -0.0000, 1.7719, -0.0000, 2.0768],
        [-0.0000, 1.7719, -0.0000, 2.0768, -0.0000],
        [1.7719, -0.0000, 2.0768, -0.0000, 6.4115],
    ])
    B = A @ W
    write_matrix("amigo_matrix", 2, 4, np.block([[A, B], [B.T, C]]))

    left = np.array([
        [1.00, 0.00, 0.00, 62.12, -0.00, 62.12, 0.00, 0.00, 0.00, 0.00],
        [0.00, 62.12, -0.00, 0.00, 0.00, 0.00, 9666.23, -0.00, 8.33, -0.00],
        [0.00, -0.00, 62.12, 0.00, 0.00, 0.00, -0.00, 8.33, -0.00, 9666.23],
        [62.12, 0.00, 0.00, 9666.23, -0.00, 8.33, 0.00, -0.00, 0.00, 0.00],
        [-0.00, 0.00, 0.00, -0.00, 8.33, -0.00, -0.00, 0.00, 0.00, -0.00],
        [62.12, 0.00, 0.00, 8.33, -0.00, 9666.23, 0.00, 0.00, -0.00, 0.00],
        [0.00, 9666.23, -0.00, 0.00, -0.00, 0.00, 3150633.17, -0.00, 2.27, 0.00],
        [0.00, -0.00, 8.33, -0.00, 0.00, 0.00, -0.00, 2.27, 0.00, 2.27],
        [0.00, 8.33, -0.00, 0.00, 0.00, -0.00, 2.27, 0.00, 2.27, -0.00],
        [0.00, -0.00, 9666.23, 0.00, -0.00, 0.00, 0.00, 2.27, -0.00, 3150630.69],
        [9666.23, 0.00, -0.00, 3150633.17, -0.00, 2.27, 0.42, -0.00, -0.00, 0.00],
        [-0.00, -0.00, 0.00, -0.00, 2.27, 0.00, -0.00, -0.00, 0.00, 0.00],
        [8.33, 0.00, 0.00, 2.27, 0.00, 2.27, -0.00, 0.00, 0.00, -0.00],
        [-0.00, 0.00, -0.00, 0.00, 2.27, -0.00, 0.00, 0.00, -0.00, -0.00],
        [9666.23, -0.00, 0.00, 2.27, -0.00, 3150630.69, 0.00, -0.00, -0.00, 0.33],
    ])
    right = np.array([
        [9666.23, -0.00, 8.33, -0.00, 9666.23],
        [0.00, -0.00, 0.00, 0.00, -0.00],
        [-0.00, 0.00, 0.00, -0.00, 0.00],
        [3150633.17, -0.00, 2.27, 0.00, 2.27],
        [-0.00, 2.27, 0.00, 2.27, -0.00],
        [2.27, 0.00, 2.27, -0.00, 3150630.69],
        [0.42, -0.00, -0.00, 0.00, 0.00],
        [-0.00, -0.00, 0.00, 0.00, -0.00],
        [-0.00, 0.00, 0.00, -0.00, -0.00],
        [0.00, 0.00, -0.00, -0.00, 0.33],
        [2466755083.36, -43.48, 169698627.89, -6.08, 134568970.57],
        [-43.48, 169698627.89, -6.08, 134568970.57, 15.08],
        [169698627.89, -6.08, 134568970.57, 15.08, 169698562.66],
        [-6.08, 134568970.57, 15.08, 169698562.66, 25.61],
        [134568970.57, 15.08, 169698562.66, 25.61, 2466752654.76],
    ])
    write_matrix("madrugada", 2, 4, np.hstack([left, right]))


def main():
    os.makedirs(OUT, exist_ok=True)
    problems()
    matrices()
    print(f"fixtures written to {os.path.normpath(OUT)}")


if __name__ == "__main__":
    main()
