"""Independent verification routines behind the `oracle` CLI subcommand.

Each check re-derives its expected answers from scratch (numerical
quadrature, subset enumeration, random sampling) rather than reusing the
production code paths it is judging.
"""

import itertools
from dataclasses import dataclass

import numpy as np

from .admission import AdmissionProblem, ConstraintSet, ilp_admit, required_power
from .beamforming import nullsteer, orthonormal_null_basis
from .interference import interference_basis, interference_basis_quadrature


@dataclass
class OracleReport:
    name: str
    passed: bool
    detail: str


def check_interference_basis(
    seed: int = 0,
    cases: int = 50,
    m_values=(8, 32, 128),
    nodes: int = 64,
    tol: float = 1e-10,
) -> OracleReport:
    """Closed-form interval average vs Gauss-Legendre quadrature."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    worst_eig = 0.0
    for _ in range(cases):
        m = int(rng.choice(m_values))
        lim = 1.0 - 1.0 / m
        phi_hat = rng.uniform(-lim, lim)
        closed = interference_basis(phi_hat, m)
        quad = interference_basis_quadrature(phi_hat, m, nodes=nodes)
        err = float(np.abs(closed.matrix - quad.matrix).max())
        worst = max(worst, err)
        if not np.all(closed.matrix.diagonal() == 1.0):
            return OracleReport("interference-basis", False, "diagonal not exactly 1")
        min_eig = float(np.linalg.eigvalsh(closed.matrix).min())
        worst_eig = min(worst_eig, min_eig / m)
        if err > tol or min_eig < -1e-10 * m:
            return OracleReport(
                "interference-basis", False,
                f"m={m} phi_hat={phi_hat:.6f}: quadrature gap {err:.3e}, "
                f"min eig {min_eig:.3e}",
            )
    return OracleReport(
        "interference-basis", True,
        f"{cases} cases: max quadrature gap {worst:.3e}, "
        f"min scaled eigenvalue {worst_eig:.3e}",
    )


def random_problem(rng: np.random.Generator, num_ue=None) -> AdmissionProblem:
    """Random selection instance spanning loose and tight budget regimes."""
    k = int(num_ue) if num_ue is not None else int(rng.integers(2, 13))
    gamma = 10.0 ** rng.uniform(-3, 0, size=k)
    gamma[rng.random(k) < 0.1] = 0.0  # a few unservable UEs
    constraints = ConstraintSet(
        p0=10.0 ** rng.uniform(0, 3),
        i0=10.0 ** rng.uniform(-4, -1),
        r0=float(rng.uniform(0.5, 3.0)),
        sigma_w_sq=1.0,
    )
    return AdmissionProblem(
        gamma=gamma,
        g1=rng.uniform(0, 0.05, size=k),
        g2=rng.uniform(0, 0.05, size=k),
        alpha_hat_sq=10.0 ** rng.uniform(-4, -2, size=2),
        constraints=constraints,
        ue_phi=rng.uniform(-1, 1, size=k),
        pu_phi_hat=rng.uniform(-1, 1, size=2),
    )


def exhaustive_admit_count(problem: AdmissionProblem) -> int:
    """Largest feasible selection by plain subset enumeration."""
    c = problem.constraints
    k = problem.num_ue
    p = [required_power(g, c) for g in problem.gamma]
    a1, a2 = problem.alpha_hat_sq
    for size in range(k, -1, -1):
        for combo in itertools.combinations(range(k), size):
            if any(not np.isfinite(p[i]) for i in combo):
                continue
            tot_p = sum(p[i] for i in combo)
            tot_1 = a1 * sum(p[i] * problem.g1[i] for i in combo)
            tot_2 = a2 * sum(p[i] * problem.g2[i] for i in combo)
            if tot_p <= c.p0 and tot_1 <= c.i0 and tot_2 <= c.i0:
                return size
    return 0


def check_ilp_exact(seed: int = 0, instances: int = 200, max_k: int = 12) -> OracleReport:
    """Selection solver vs subset enumeration, plus exhaustive/B&B agreement."""
    rng = np.random.default_rng(seed)
    for i in range(instances):
        problem = random_problem(rng, num_ue=int(rng.integers(2, max_k + 1)))
        expected = exhaustive_admit_count(problem)
        via_enum = ilp_admit(problem, exhaustive_limit=max_k + 1)
        via_bnb = ilp_admit(problem, exhaustive_limit=0)
        if via_enum.admitted_count != expected:
            return OracleReport(
                "ilp-exactness", False,
                f"instance {i}: solver {via_enum.admitted_count} vs oracle {expected}",
            )
        if not np.array_equal(via_enum.s, via_bnb.s):
            return OracleReport(
                "ilp-exactness", False,
                f"instance {i}: exhaustive and branch-and-bound selections differ",
            )
    return OracleReport(
        "ilp-exactness", True, f"{instances} instances matched subset enumeration"
    )


def check_nullsteer_optimality(
    seed: int = 0,
    instances: int = 50,
    samples: int = 1000,
    m: int = 16,
    num_nulls: int = 3,
    slack: float = 1e-9,
) -> OracleReport:
    """Projection beam vs random unit vectors satisfying the same nulls."""
    rng = np.random.default_rng(seed)
    margin = np.inf
    for i in range(instances):
        target = _complex_gaussian(rng, m)
        nulls = [_complex_gaussian(rng, m) for _ in range(num_nulls)]
        w = nullsteer(target, nulls)
        gain = abs(np.vdot(target, w))
        q = orthonormal_null_basis(nulls)
        trials = _complex_gaussian(rng, (samples, m))
        trials = trials - (trials @ q.conj()) @ q.T
        trials /= np.linalg.norm(trials, axis=1, keepdims=True)
        rival = np.abs(trials @ target.conj()).max()
        margin = min(margin, gain - rival)
        if rival > gain + slack:
            return OracleReport(
                "nullsteer-optimality", False,
                f"instance {i}: sampled vector beat the projection beam by "
                f"{rival - gain:.3e}",
            )
    return OracleReport(
        "nullsteer-optimality", True,
        f"{instances} instances x {samples} samples, min margin {margin:.3e}",
    )


def _complex_gaussian(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def run_all(seed: int = 0):
    return [
        check_interference_basis(seed),
        check_ilp_exact(seed),
        check_nullsteer_optimality(seed),
    ]
