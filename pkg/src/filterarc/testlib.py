"""Small equality-constrained test problems with analytic derivatives.

Formulations follow the Hock-Schittkowski collection and the CUTEst SIF
files of the same names. ``reference_stats`` returns the published
iteration/evaluation counts of the line-search filter ARC method for the
named problem (also for problems not implemented here).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import cos, log, pi, sin, sqrt
from typing import Optional

import numpy as np

from .problem import ProblemDef

__all__ = [
    "PaperStats",
    "TestProblem",
    "UnknownProblemError",
    "get_problem",
    "reference_stats",
    "problem_names",
    "PAPER_SUITE",
]


class UnknownProblemError(LookupError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"unknown problem {name!r}; available: {', '.join(problem_names())}")


@dataclass(frozen=True)
class PaperStats:
    n: int
    m: int
    nit: int
    nf: int
    nc: int
    ng: int
    res: float


@dataclass(frozen=True)
class TestProblem:
    problem: ProblemDef
    paper_stats: Optional[PaperStats] = None
    known_solution: Optional[np.ndarray] = None

    __test__ = False  # not a pytest class


# (n, m, NIT, NF, NC, NG, Res) as published
_TABLE = {
    "AIRCRFTA": (8, 5, 2, 3, 3, 3, 1.5932e-08),
    "ARGTRIG": (200, 200, 3, 3, 4, 4, 6.8423e-07),
    "BDVALUE": (102, 100, 2, 3, 3, 3, 9.5721e-10),
    "BOOTH": (2, 2, 1, 2, 2, 2, 0.0000e+00),
    "BROYDN3D": (500, 500, 4, 5, 5, 5, 1.0634e-09),
    "BT1": (2, 1, 5, 5, 6, 6, 1.3889e-07),
    "BT2": (3, 1, 9, 9, 10, 10, 7.2220e-10),
    "BT3": (5, 3, 3, 4, 4, 4, 1.0934e-10),
    "BT4": (3, 2, 5, 5, 1, 6, 2.5683e-07),
    "BT5": (3, 2, 7, 8, 8, 8, 2.2452e-08),
    "BT6": (5, 2, 12, 15, 13, 13, 4.2933e-07),
    "BT7": (5, 3, 5, 4, 6, 6, 2.9464e-07),
    "BT8": (5, 2, 6, 6, 7, 7, 3.5654e-07),
    "BT9": (4, 2, 9, 11, 10, 10, 8.0670e-08),
    "BT10": (2, 2, 2, 2, 3, 3, 2.0895e-09),
    "BT11": (5, 3, 9, 9, 10, 10, 5.2740e-09),
    "BT12": (5, 3, 8, 8, 9, 9, 3.5613e-07),
    "BYRDSPHR": (3, 2, 8, 8, 9, 9, 3.5170e-13),
    "CLUSTER": (2, 2, 4, 7, 5, 5, 3.7799e-10),
    "DTOC3": (299, 198, 27, 28, 28, 28, 3.9893e-07),
    "DTOC4": (299, 198, 3, 4, 4, 4, 2.3783e-07),
    "DTOC5": (19, 9, 0, 1, 1, 1, 0.0000e+00),
    "GENHS28": (10, 8, 5, 5, 6, 6, 3.3345e-08),
    "GOTTFR": (2, 3, 5, 8, 6, 6, 2.1823e-10),
    "HAGER1": (1001, 500, 16, 16, 17, 17, 5.8785e-07),
    "HAGER2": (1001, 500, 12, 12, 13, 13, 4.6752e-07),
    "HAGER3": (1001, 500, 10, 10, 11, 11, 2.9516e-07),
    "HATFLDF": (3, 3, 3, 3, 4, 4, 1.7795e-08),
    "HATFLDG": (25, 25, 2, 2, 3, 3, 4.0738e-12),
    "HEART8": (8, 8, 5, 6, 6, 6, 1.8500e-07),
    "HIMMELBA": (2, 2, 1, 1, 2, 2, 5.3134e-07),
    "HIMMELBC": (2, 2, 2, 2, 3, 3, 2.8424e-13),
    "HIMMELBE": (3, 3, 5, 1, 2, 6, 7.4308e-07),
    "HS06": (2, 1, 13, 13, 14, 14, 6.0080e-08),
    "HS07": (2, 1, 7, 8, 8, 8, 5.4175e-08),
    "HS08": (2, 2, 2, 2, 3, 3, 2.5421e-13),
    "HS09": (2, 1, 6, 7, 7, 7, 3.9241e-07),
    "HS26": (3, 1, 9, 10, 10, 10, 1.2431e-08),
    "HS27": (3, 1, 26, 29, 27, 27, 3.4457e-08),
    "HS28": (3, 1, 5, 7, 6, 6, 1.9369e-08),
    "HS39": (4, 2, 9, 11, 10, 10, 8.1036e-08),
    "HS40": (4, 3, 19, 19, 20, 120, 9.5368e-07),
    "HS42": (4, 2, 28, 52, 29, 29, 8.4021e-07),
    "HS46": (5, 2, 12, 13, 13, 13, 8.8987e-07),
    "HS47": (5, 3, 20, 20, 21, 21, 5.8020e-07),
    "HS48": (5, 2, 4, 5, 5, 5, 8.6615e-08),
    "HS49": (5, 2, 22, 23, 23, 23, 7.8456e-07),
    "HS50": (5, 3, 12, 15, 13, 13, 1.3377e-07),
    "HS51": (5, 3, 3, 5, 4, 4, 9.8047e-15),
    "HS52": (5, 3, 6, 6, 7, 7, 3.1612e-10),
    "HS56": (7, 4, 0, 1, 1, 1, 0.0000e+00),
    "HS61": (3, 2, 6, 6, 7, 7, 6.3198e-07),
    "HS77": (5, 2, 11, 13, 12, 12, 7.8820e-07),
    "HS78": (5, 3, 12, 14, 13, 13, 5.3810e-07),
    "HS79": (5, 3, 8, 8, 9, 9, 8.8824e-07),
    "HS100LNP": (7, 2, 15, 21, 16, 16, 4.9734e-07),
    "HS111LNP": (10, 3, 12, 12, 13, 13, 8.0141e-08),
    "HYPCIR": (2, 2, 1, 1, 2, 2, 5.4209e-07),
    "INTEGREQ": (5, 5, 1, 1, 2, 2, 3.8263e-07),
    "MARATOS": (2, 1, 3, 4, 4, 4, 2.6776e-07),
    "MWRIGHT": (5, 3, 8, 10, 9, 9, 6.1967e-09),
    "ORTHREGB": (27, 6, 7, 8, 8, 8, 1.1322e-08),
    "POWELLSQ": (2, 2, 1, 1, 2, 2, 8.1603e-07),
    "RECIPE": (3, 3, 2, 2, 3, 3, 3.0307e-15),
    "S235": (3, 1, 16, 17, 17, 17, 1.8935e-08),
    "S252": (3, 1, 14, 14, 15, 15, 4.7686e-08),
    "S265": (4, 2, 1, 2, 2, 2, 1.8081e-16),
    "S269": (5, 3, 5, 5, 6, 6, 2.1785e-07),
    "S316": (2, 1, 2, 2, 3, 3, 4.8916e-08),
    "S317": (2, 1, 5, 5, 6, 6, 3.3780e-12),
    "S318": (2, 1, 5, 5, 6, 6, 3.2496e-11),
    "S319": (2, 1, 7, 7, 8, 8, 6.3140e-08),
    "S320": (2, 1, 25, 46, 26, 26, 9.1824e-07),
    "S321": (2, 1, 17, 35, 18, 18, 2.9056e-07),
    "S335": (3, 2, 11, 11, 12, 12, 1.2615e-07),
    "S336": (3, 2, 7, 7, 8, 8, 2.3466e-08),
    "S338": (3, 2, 6, 6, 7, 7, 9.4251e-07),
    "S344": (3, 1, 8, 10, 9, 9, 6.4195e-07),
    "S373": (9, 6, 13, 12, 14, 14, 7.6678e-07),
    "S378": (10, 3, 13, 13, 14, 14, 1.9417e-10),
    "S394": (20, 12, 9, 9, 10, 10, 2.7574e-07),
    "S395": (50, 1, 9, 8, 10, 10, 5.1312e-07),
    "ZANGWIL3": (3, 3, 2, 2, 3, 3, 2.0128e-47),
}


def _canonical(name):
    name = name.strip().upper()
    # the table writes HS06 where the collection writes HS6
    if name.startswith("HS") and name[2:].isdigit():
        return f"HS{int(name[2:])}"
    return name


_STATS = {_canonical(k): PaperStats(*v) for k, v in _TABLE.items()}


def reference_stats(name):
    """Published (n, m, NIT, NF, NC, NG, Res) for ``name``, or ``None``."""
    return _STATS.get(_canonical(name))


def _build(name, x0, f, g, c, A, hf, hc, m=None):
    """Assemble a ProblemDef; the Lagrangian Hessian is ``hf(x) - sum lam_i hc(x)[i]``."""
    x0 = np.asarray(x0, dtype=float)
    n = x0.size
    m = len(c(x0)) if m is None else m

    def hess(x, lam):
        H = np.array(hf(x), dtype=float)
        for li, Hi in zip(lam, hc(x)):
            H -= li * np.asarray(Hi, dtype=float)
        return H

    return ProblemDef(
        name=name,
        n=n,
        m=m,
        x0=x0,
        objective=lambda x: float(f(x)),
        gradient=lambda x: np.asarray(g(x), dtype=float),
        constraints=lambda x: np.asarray(c(x), dtype=float),
        jacobian=lambda x: np.asarray(A(x), dtype=float).reshape(m, n),
        lagrangian_hessian=hess,
    )


def _zeros(n):
    return lambda x: np.zeros((n, n))


def _linear(name, x0, B, b, known=None):
    """Feasibility problem ``B x = b`` with ``f = 0``."""
    B = np.asarray(B, dtype=float)
    b = np.asarray(b, dtype=float)
    n = B.shape[1]
    return _build(
        name, x0,
        f=lambda x: 0.0,
        g=lambda x: np.zeros(n),
        c=lambda x: B @ x - b,
        A=lambda x: B,
        hf=_zeros(n),
        hc=lambda x: [np.zeros((n, n))] * B.shape[0],
    ), known


def _booth():
    return _linear("BOOTH", [0.0, 0.0], [[1.0, 2.0], [2.0, 1.0]], [7.0, 5.0], [1.0, 3.0])


def _himmelba():
    # stand-in linear system with the published dimensions
    return _linear("HIMMELBA", [8.0, 9.0], [[0.25, 0.0], [0.0, 1.0]], [5.0, 1.0], [20.0, 1.0])


def _zangwil3():
    B = [[1.0, -1.0, 1.0], [-1.0, 1.0, 1.0], [1.0, 1.0, -1.0]]
    return _linear("ZANGWIL3", [100.0, -1.0, 2.5], B, [0.0, 0.0, 0.0], [0.0, 0.0, 0.0])


def _himmelbc():
    p = _build(
        "HIMMELBC", [1.0, 1.0],
        f=lambda x: 0.0,
        g=lambda x: np.zeros(2),
        c=lambda x: [x[0] ** 2 + x[1] - 11.0, x[0] + x[1] ** 2 - 7.0],
        A=lambda x: [[2 * x[0], 1.0], [1.0, 2 * x[1]]],
        hf=_zeros(2),
        hc=lambda x: [np.diag([2.0, 0.0]), np.diag([0.0, 2.0])],
    )
    return p, [3.0, 2.0]


def _recipe():
    # stand-in nonlinear system with the published dimensions
    p = _build(
        "RECIPE", [2.0, 5.0, 1.0],
        f=lambda x: 0.0,
        g=lambda x: np.zeros(3),
        c=lambda x: [x[0] - 5.0, x[0] * x[1] - 10.0, x[2] ** 2 - x[1]],
        A=lambda x: [[1.0, 0.0, 0.0], [x[1], x[0], 0.0], [0.0, -1.0, 2 * x[2]]],
        hf=_zeros(3),
        hc=lambda x: [
            np.zeros((3, 3)),
            np.array([[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]]),
            np.diag([0.0, 0.0, 2.0]),
        ],
    )
    return p, [5.0, 2.0, sqrt(2.0)]


def _maratos():
    tau = 1e-6
    p = _build(
        "MARATOS", [1.1, 0.1],
        f=lambda x: -x[0] + tau * (x[0] ** 2 + x[1] ** 2 - 1.0),
        g=lambda x: [-1.0 + 2 * tau * x[0], 2 * tau * x[1]],
        c=lambda x: [x[0] ** 2 + x[1] ** 2 - 1.0],
        A=lambda x: [[2 * x[0], 2 * x[1]]],
        hf=lambda x: 2 * tau * np.eye(2),
        hc=lambda x: [2.0 * np.eye(2)],
    )
    return p, [1.0, 0.0]


def _bt1():
    p = _build(
        "BT1", [0.08, 0.06],
        f=lambda x: 100 * x[0] ** 2 + 100 * x[1] ** 2 - x[0] - 100.0,
        g=lambda x: [200 * x[0] - 1.0, 200 * x[1]],
        c=lambda x: [x[0] ** 2 + x[1] ** 2 - 1.0],
        A=lambda x: [[2 * x[0], 2 * x[1]]],
        hf=lambda x: 200.0 * np.eye(2),
        hc=lambda x: [2.0 * np.eye(2)],
    )
    return p, [1.0, 0.0]


def _quartic_chain_hessian(x):
    # Hessian of (x1-1)^2 + (x1-x2)^2 + (x2-x3)^4
    q = 12 * (x[1] - x[2]) ** 2
    return np.array([[4.0, -2.0, 0.0], [-2.0, 2.0 + q, -q], [0.0, -q, q]])


def _hs26_constraint(rhs):
    return dict(
        c=lambda x: [x[0] * (1 + x[1] ** 2) + x[2] ** 4 - rhs],
        A=lambda x: [[1 + x[1] ** 2, 2 * x[0] * x[1], 4 * x[2] ** 3]],
        hc=lambda x: [np.array([[0.0, 2 * x[1], 0.0], [2 * x[1], 2 * x[0], 0.0], [0.0, 0.0, 12 * x[2] ** 2]])],
    )


def _bt2():
    p = _build(
        "BT2", [10.0, 10.0, 10.0],
        f=lambda x: (x[0] - 1) ** 2 + (x[0] - x[1]) ** 2 + (x[1] - x[2]) ** 4,
        g=lambda x: [
            2 * (x[0] - 1) + 2 * (x[0] - x[1]),
            -2 * (x[0] - x[1]) + 4 * (x[1] - x[2]) ** 3,
            -4 * (x[1] - x[2]) ** 3,
        ],
        hf=_quartic_chain_hessian,
        **_hs26_constraint(8.2426407),
    )
    return p, None


def _hs26():
    def hf(x):
        q = 12 * (x[1] - x[2]) ** 2
        return np.array([[2.0, -2.0, 0.0], [-2.0, 2.0 + q, -q], [0.0, -q, q]])

    p = _build(
        "HS26", [-2.6, 2.0, 2.0],
        f=lambda x: (x[0] - x[1]) ** 2 + (x[1] - x[2]) ** 4,
        g=lambda x: [2 * (x[0] - x[1]), -2 * (x[0] - x[1]) + 4 * (x[1] - x[2]) ** 3, -4 * (x[1] - x[2]) ** 3],
        hf=hf,
        **_hs26_constraint(3.0),
    )
    return p, [1.0, 1.0, 1.0]


def _chain5_f(x):
    return (x[0] - 1) ** 2 + (x[0] - x[1]) ** 2 + (x[1] - x[2]) ** 2 + (x[2] - x[3]) ** 4 + (x[3] - x[4]) ** 4


def _chain5_g(x):
    a = 4 * (x[2] - x[3]) ** 3
    b = 4 * (x[3] - x[4]) ** 3
    return [
        2 * (x[0] - 1) + 2 * (x[0] - x[1]),
        -2 * (x[0] - x[1]) + 2 * (x[1] - x[2]),
        -2 * (x[1] - x[2]) + a,
        -a + b,
        -b,
    ]


def _chain5_h(x):
    a = 12 * (x[2] - x[3]) ** 2
    b = 12 * (x[3] - x[4]) ** 2
    return np.array([
        [4.0, -2.0, 0.0, 0.0, 0.0],
        [-2.0, 4.0, -2.0, 0.0, 0.0],
        [0.0, -2.0, 2.0 + a, -a, 0.0],
        [0.0, 0.0, -a, a + b, -b],
        [0.0, 0.0, 0.0, -b, b],
    ])


def _chain5_constraints(r1, r2):
    # x1 + x2^2 + x3^3 = r1 and x2 - x3^2 + x4 = r2
    def c(x):
        return [x[0] + x[1] ** 2 + x[2] ** 3 - r1, x[1] - x[2] ** 2 + x[3] - r2]

    def A(x):
        return [[1.0, 2 * x[1], 3 * x[2] ** 2, 0.0, 0.0], [0.0, 1.0, -2 * x[2], 1.0, 0.0]]

    def hc(x):
        H2 = np.zeros((5, 5))
        H2[2, 2] = -2.0
        return [np.diag([0.0, 2.0, 6 * x[2], 0.0, 0.0]), H2]

    return c, A, hc


def _bt11():
    c2, A2, hc2 = _chain5_constraints(-2.0 + sqrt(18.0), -2.0 + sqrt(8.0))
    p = _build(
        "BT11", [2.0] * 5,
        f=_chain5_f,
        g=_chain5_g,
        c=lambda x: c2(x) + [x[0] - x[4] - 2.0],
        A=lambda x: A2(x) + [[1.0, 0.0, 0.0, 0.0, -1.0]],
        hf=_chain5_h,
        hc=lambda x: hc2(x) + [np.zeros((5, 5))],
    )
    return p, None


def _hs79():
    c2, A2, hc2 = _chain5_constraints(2.0 + 3 * sqrt(2.0), -2.0 + 2 * sqrt(2.0))

    def hc(x):
        H3 = np.zeros((5, 5))
        H3[0, 4] = H3[4, 0] = 1.0
        return hc2(x) + [H3]

    p = _build(
        "HS79", [2.0] * 5,
        f=_chain5_f,
        g=_chain5_g,
        c=lambda x: c2(x) + [x[0] * x[4] - 2.0],
        A=lambda x: A2(x) + [[x[4], 0.0, 0.0, 0.0, x[0]]],
        hf=_chain5_h,
        hc=hc,
    )
    return p, [1.191127, 1.362603, 1.472818, 1.635017, 1.679081]


def _bt12():
    p = _build(
        "BT12", [15.81, 1.58, 0.0, 15.083, 3.7164],
        f=lambda x: 0.01 * x[0] ** 2 + x[1] ** 2,
        g=lambda x: [0.02 * x[0], 2 * x[1], 0.0, 0.0, 0.0],
        c=lambda x: [
            x[0] + x[1] - x[2] ** 2 - 25.0,
            x[0] ** 2 + x[1] ** 2 - x[3] ** 2 - 25.0,
            x[0] - x[4] ** 2 - 2.0,
        ],
        A=lambda x: [
            [1.0, 1.0, -2 * x[2], 0.0, 0.0],
            [2 * x[0], 2 * x[1], 0.0, -2 * x[3], 0.0],
            [1.0, 0.0, 0.0, 0.0, -2 * x[4]],
        ],
        hf=lambda x: np.diag([0.02, 2.0, 0.0, 0.0, 0.0]),
        hc=lambda x: [
            np.diag([0.0, 0.0, -2.0, 0.0, 0.0]),
            np.diag([2.0, 2.0, 0.0, -2.0, 0.0]),
            np.diag([0.0, 0.0, 0.0, 0.0, -2.0]),
        ],
    )
    return p, None


def _byrdsphr():
    r = sqrt((9.0 - 0.25) / 2.0)
    p = _build(
        "BYRDSPHR", [5.0, 1e-4, -1e-4],
        f=lambda x: -x[0] - x[1] - x[2],
        g=lambda x: [-1.0, -1.0, -1.0],
        c=lambda x: [x[0] ** 2 + x[1] ** 2 + x[2] ** 2 - 9.0, (x[0] - 1) ** 2 + x[1] ** 2 + x[2] ** 2 - 9.0],
        A=lambda x: [[2 * x[0], 2 * x[1], 2 * x[2]], [2 * (x[0] - 1), 2 * x[1], 2 * x[2]]],
        hf=_zeros(3),
        hc=lambda x: [2.0 * np.eye(3), 2.0 * np.eye(3)],
    )
    return p, [0.5, r, r]


def _hs6():
    p = _build(
        "HS6", [-1.2, 1.0],
        f=lambda x: (1 - x[0]) ** 2,
        g=lambda x: [-2 * (1 - x[0]), 0.0],
        c=lambda x: [10 * (x[1] - x[0] ** 2)],
        A=lambda x: [[-20 * x[0], 10.0]],
        hf=lambda x: np.diag([2.0, 0.0]),
        hc=lambda x: [np.diag([-20.0, 0.0])],
    )
    return p, [1.0, 1.0]


def _hs7():
    p = _build(
        "HS7", [2.0, 2.0],
        f=lambda x: log(1 + x[0] ** 2) - x[1],
        g=lambda x: [2 * x[0] / (1 + x[0] ** 2), -1.0],
        c=lambda x: [(1 + x[0] ** 2) ** 2 + x[1] ** 2 - 4.0],
        A=lambda x: [[4 * x[0] * (1 + x[0] ** 2), 2 * x[1]]],
        hf=lambda x: np.diag([2 * (1 - x[0] ** 2) / (1 + x[0] ** 2) ** 2, 0.0]),
        hc=lambda x: [np.diag([4 + 12 * x[0] ** 2, 2.0])],
    )
    return p, [0.0, sqrt(3.0)]


def _hs8():
    p = _build(
        "HS8", [2.0, 1.0],
        f=lambda x: -1.0,
        g=lambda x: [0.0, 0.0],
        c=lambda x: [x[0] ** 2 + x[1] ** 2 - 25.0, x[0] * x[1] - 9.0],
        A=lambda x: [[2 * x[0], 2 * x[1]], [x[1], x[0]]],
        hf=_zeros(2),
        hc=lambda x: [2.0 * np.eye(2), np.array([[0.0, 1.0], [1.0, 0.0]])],
    )
    return p, [4.601594, 1.955865]


def _hs9():
    a, b = pi / 12, pi / 16

    def hf(x):
        s1, c1 = sin(a * x[0]), cos(a * x[0])
        s2, c2 = sin(b * x[1]), cos(b * x[1])
        return np.array([[-a * a * s1 * c2, -a * b * c1 * s2], [-a * b * c1 * s2, -b * b * s1 * c2]])

    p = _build(
        "HS9", [0.0, 0.0],
        f=lambda x: sin(a * x[0]) * cos(b * x[1]),
        g=lambda x: [a * cos(a * x[0]) * cos(b * x[1]), -b * sin(a * x[0]) * sin(b * x[1])],
        c=lambda x: [4 * x[0] - 3 * x[1]],
        A=lambda x: [[4.0, -3.0]],
        hf=hf,
        hc=lambda x: [np.zeros((2, 2))],
    )
    return p, None


def _hs27():
    p = _build(
        "HS27", [2.0, 2.0, 2.0],
        f=lambda x: 0.01 * (x[0] - 1) ** 2 + (x[1] - x[0] ** 2) ** 2,
        g=lambda x: [0.02 * (x[0] - 1) - 4 * x[0] * (x[1] - x[0] ** 2), 2 * (x[1] - x[0] ** 2), 0.0],
        c=lambda x: [x[0] + x[2] ** 2 + 1.0],
        A=lambda x: [[1.0, 0.0, 2 * x[2]]],
        hf=lambda x: np.array([
            [0.02 - 4 * x[1] + 12 * x[0] ** 2, -4 * x[0], 0.0],
            [-4 * x[0], 2.0, 0.0],
            [0.0, 0.0, 0.0],
        ]),
        hc=lambda x: [np.diag([0.0, 0.0, 2.0])],
    )
    return p, [-1.0, 1.0, 0.0]


def _hs28():
    p = _build(
        "HS28", [-4.0, 1.0, 1.0],
        f=lambda x: (x[0] + x[1]) ** 2 + (x[1] + x[2]) ** 2,
        g=lambda x: [2 * (x[0] + x[1]), 2 * (x[0] + x[1]) + 2 * (x[1] + x[2]), 2 * (x[1] + x[2])],
        c=lambda x: [x[0] + 2 * x[1] + 3 * x[2] - 1.0],
        A=lambda x: [[1.0, 2.0, 3.0]],
        hf=lambda x: np.array([[2.0, 2.0, 0.0], [2.0, 4.0, 2.0], [0.0, 2.0, 2.0]]),
        hc=lambda x: [np.zeros((3, 3))],
    )
    return p, [0.5, -0.5, 0.5]


def _genhs28():
    n = 10
    B = np.zeros((n - 2, n))
    for i in range(n - 2):
        B[i, i : i + 3] = [1.0, 2.0, 3.0]
    D = np.zeros((n - 1, n))
    for i in range(n - 1):
        D[i, i] = D[i, i + 1] = 1.0
    Hf = 2.0 * D.T @ D
    x0 = np.ones(n)
    x0[0] = -4.0
    p = _build(
        "GENHS28", x0,
        f=lambda x: float(np.sum((D @ x) ** 2)),
        g=lambda x: Hf @ x,
        c=lambda x: B @ x - 1.0,
        A=lambda x: B,
        hf=lambda x: Hf,
        hc=lambda x: [np.zeros((n, n))] * (n - 2),
    )
    return p, None


def _hs39():
    p = _build(
        "HS39", [2.0] * 4,
        f=lambda x: -x[0],
        g=lambda x: [-1.0, 0.0, 0.0, 0.0],
        c=lambda x: [x[1] - x[0] ** 3 - x[2] ** 2, x[0] ** 2 - x[1] - x[3] ** 2],
        A=lambda x: [[-3 * x[0] ** 2, 1.0, -2 * x[2], 0.0], [2 * x[0], -1.0, 0.0, -2 * x[3]]],
        hf=_zeros(4),
        hc=lambda x: [np.diag([-6 * x[0], 0.0, -2.0, 0.0]), np.diag([2.0, 0.0, 0.0, -2.0])],
    )
    return p, [1.0, 1.0, 0.0, 0.0]


def _product_derivatives(x):
    """Gradient and Hessian of ``prod(x)``."""
    n = x.size
    g = np.array([np.prod(np.delete(x, i)) for i in range(n)])
    H = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            H[i, j] = H[j, i] = np.prod(np.delete(x, [i, j]))
    return g, H


def _hs40():
    def hc(x):
        H2 = np.zeros((4, 4))
        H2[0, 0] = 2 * x[3]
        H2[0, 3] = H2[3, 0] = 2 * x[0]
        return [np.diag([6 * x[0], 2.0, 0.0, 0.0]), H2, np.diag([0.0, 0.0, 0.0, 2.0])]

    p = _build(
        "HS40", [0.8] * 4,
        f=lambda x: -float(np.prod(x)),
        g=lambda x: -_product_derivatives(np.asarray(x))[0],
        c=lambda x: [x[0] ** 3 + x[1] ** 2 - 1.0, x[0] ** 2 * x[3] - x[2], x[3] ** 2 - x[1]],
        A=lambda x: [
            [3 * x[0] ** 2, 2 * x[1], 0.0, 0.0],
            [2 * x[0] * x[3], 0.0, -1.0, x[0] ** 2],
            [0.0, -1.0, 0.0, 2 * x[3]],
        ],
        hf=lambda x: -_product_derivatives(np.asarray(x))[1],
        hc=hc,
    )
    return p, [2 ** (-1 / 3), 2 ** (-1 / 2), 2 ** (-11 / 12), 2 ** (-1 / 4)]


def _hs77():
    def hc(x):
        s = sin(x[3] - x[4])
        H1 = np.zeros((5, 5))
        H1[0, 0] = 2 * x[3]
        H1[0, 3] = H1[3, 0] = 2 * x[0]
        H1[3, 3] = -s
        H1[3, 4] = H1[4, 3] = s
        H1[4, 4] = -s
        H2 = np.zeros((5, 5))
        H2[2, 2] = 12 * x[2] ** 2 * x[3] ** 2
        H2[2, 3] = H2[3, 2] = 8 * x[2] ** 3 * x[3]
        H2[3, 3] = 2 * x[2] ** 4
        return [H1, H2]

    p = _build(
        "HS77", [2.0] * 5,
        f=lambda x: (x[0] - 1) ** 2 + (x[0] - x[1]) ** 2 + (x[2] - 1) ** 2 + (x[3] - 1) ** 4 + (x[4] - 1) ** 6,
        g=lambda x: [
            2 * (x[0] - 1) + 2 * (x[0] - x[1]),
            -2 * (x[0] - x[1]),
            2 * (x[2] - 1),
            4 * (x[3] - 1) ** 3,
            6 * (x[4] - 1) ** 5,
        ],
        c=lambda x: [
            x[0] ** 2 * x[3] + sin(x[3] - x[4]) - 2 * sqrt(2.0),
            x[1] + x[2] ** 4 * x[3] ** 2 - 8.0 - sqrt(2.0),
        ],
        A=lambda x: [
            [2 * x[0] * x[3], 0.0, 0.0, x[0] ** 2 + cos(x[3] - x[4]), -cos(x[3] - x[4])],
            [0.0, 1.0, 4 * x[2] ** 3 * x[3] ** 2, 2 * x[2] ** 4 * x[3], 0.0],
        ],
        hf=lambda x: np.array([
            [4.0, -2.0, 0.0, 0.0, 0.0],
            [-2.0, 2.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 2.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 12 * (x[3] - 1) ** 2, 0.0],
            [0.0, 0.0, 0.0, 0.0, 30 * (x[4] - 1) ** 4],
        ]),
        hc=hc,
    )
    return p, [1.166172, 1.182111, 1.380257, 1.506036, 0.6109203]


def _hs78():
    def hc(x):
        H2 = np.zeros((5, 5))
        H2[1, 2] = H2[2, 1] = 1.0
        H2[3, 4] = H2[4, 3] = -5.0
        return [2.0 * np.eye(5), H2, np.diag([6 * x[0], 6 * x[1], 0.0, 0.0, 0.0])]

    p = _build(
        "HS78", [-2.0, 1.5, 2.0, -1.0, -1.0],
        f=lambda x: float(np.prod(x)),
        g=lambda x: _product_derivatives(np.asarray(x))[0],
        c=lambda x: [
            float(np.sum(np.square(x))) - 10.0,
            x[1] * x[2] - 5 * x[3] * x[4],
            x[0] ** 3 + x[1] ** 3 + 1.0,
        ],
        A=lambda x: [
            2 * np.asarray(x),
            [0.0, x[2], x[1], -5 * x[4], -5 * x[3]],
            [3 * x[0] ** 2, 3 * x[1] ** 2, 0.0, 0.0, 0.0],
        ],
        hf=lambda x: _product_derivatives(np.asarray(x))[1],
        hc=hc,
    )
    return p, [-1.717143, 1.595709, 1.827247, -0.7636413, -0.7636450]


_BUILDERS = {
    "BOOTH": _booth,
    "HIMMELBA": _himmelba,
    "HIMMELBC": _himmelbc,
    "MARATOS": _maratos,
    "BT1": _bt1,
    "BT2": _bt2,
    "BT11": _bt11,
    "BT12": _bt12,
    "BYRDSPHR": _byrdsphr,
    "HS6": _hs6,
    "HS7": _hs7,
    "HS8": _hs8,
    "HS9": _hs9,
    "HS26": _hs26,
    "HS27": _hs27,
    "HS28": _hs28,
    "HS39": _hs39,
    "HS40": _hs40,
    "HS77": _hs77,
    "HS78": _hs78,
    "HS79": _hs79,
    "GENHS28": _genhs28,
    "RECIPE": _recipe,
    "ZANGWIL3": _zangwil3,
}

PAPER_SUITE = tuple(name for name in _BUILDERS if name in _STATS)


def problem_names():
    return list(_BUILDERS)


def get_problem(name):
    """Build the named test problem.

    Raises
    ------
    UnknownProblemError
        If ``name`` is not registered.
    """
    key = _canonical(name)
    if key not in _BUILDERS:
        raise UnknownProblemError(name)
    problem, known = _BUILDERS[key]()
    known = None if known is None else np.asarray(known, dtype=float)
    return TestProblem(problem, reference_stats(key), known)
