"""Power allocation, interference control, and exact 0-1 user selection.

All powers are linear mW. Three solvers share one problem form:

* equal_power - split the budget evenly, drop the lowest-rate UE until the
  rate floor holds, then run interference drops;
* equal_rate - give each UE exactly the power for the rate floor, drop the
  most expensive UE until the budget holds, then interference drops;
* ilp - exact maximization of the admitted count with powers pinned at the
  rate-floor requirement, via exhaustive search or branch-and-bound.
"""

import math
from dataclasses import dataclass

import numpy as np

from .beamforming import BeamformerSet
from .geometry import ChannelSet, steering_vector

UNSERVABLE = math.inf

# Relative slack applied to the selection solver's feasibility tests only:
# any set the (exact-comparison) heuristics accept must stay feasible here
# regardless of summation order.
_REL_SLACK = 1e-12


class CapacityError(RuntimeError):
    """Instance too large for the enabled selection-solver paths."""


@dataclass(frozen=True)
class ConstraintSet:
    """Budgets in linear mW; r0 in bits/s/Hz."""

    p0: float          # total transmit power budget
    i0: float          # per-PU interference threshold
    r0: float          # minimum per-UE rate
    sigma_w_sq: float  # receiver noise power

    def __post_init__(self):
        for name in ("p0", "i0", "r0", "sigma_w_sq"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")


@dataclass
class AdmissionProblem:
    """Scalar couplings of one trial, as consumed by the allocators."""

    gamma: np.ndarray         # (K,) effective gains
    g1: np.ndarray            # (K,) leaked-power coupling toward PU-1
    g2: np.ndarray            # (K,) same toward PU-2
    alpha_hat_sq: np.ndarray  # (2,) squared BS->PU attenuation estimates
    constraints: ConstraintSet
    ue_phi: np.ndarray        # (K,) true UE angular sines at the BS
    pu_phi_hat: np.ndarray    # (2,) estimated PU angular sines at the BS

    def __post_init__(self):
        self.gamma = np.asarray(self.gamma, dtype=float)
        self.g1 = np.asarray(self.g1, dtype=float)
        self.g2 = np.asarray(self.g2, dtype=float)
        self.alpha_hat_sq = np.asarray(self.alpha_hat_sq, dtype=float)
        self.ue_phi = np.asarray(self.ue_phi, dtype=float)
        self.pu_phi_hat = np.asarray(self.pu_phi_hat, dtype=float)
        k = self.gamma.shape[0]
        if not (self.g1.shape == self.g2.shape == self.ue_phi.shape == (k,)):
            raise ValueError("per-UE arrays must share one length")
        if self.alpha_hat_sq.shape != (2,) or self.pu_phi_hat.shape != (2,):
            raise ValueError("expected exactly two PU links")
        for name in ("gamma", "g1", "g2", "alpha_hat_sq"):
            if np.any(getattr(self, name) < 0):
                raise ValueError(f"{name} must be nonnegative")

    @property
    def num_ue(self) -> int:
        return self.gamma.shape[0]


@dataclass
class AdmissionResult:
    s: np.ndarray                 # (K,) selection flags in {0, 1}
    p: np.ndarray                 # (K,) powers, mW; zero where s == 0
    rates: np.ndarray             # (K,) achieved rates at the final powers
    est_interference: np.ndarray  # (2,) estimated interference at each PU
    admitted_count: int


def required_power(gamma_k: float, constraints: ConstraintSet) -> float:
    """Minimum power meeting the rate floor; UNSERVABLE for zero gain."""
    if gamma_k <= 0:
        return UNSERVABLE
    return constraints.sigma_w_sq * (2.0 ** constraints.r0 - 1.0) / gamma_k


def achieved_rate(p_k: float, gamma_k: float, sigma_w_sq: float) -> float:
    if p_k < 0:
        raise ValueError("power must be nonnegative")
    return math.log2(1.0 + p_k * gamma_k / sigma_w_sq)


def estimated_interference(
    problem: AdmissionProblem, mask: np.ndarray, p: np.ndarray
) -> np.ndarray:
    """Constraint left-hand sides at both PUs for the given selection."""
    active = np.where(mask, p, 0.0)
    return problem.alpha_hat_sq * np.array(
        [float(active @ problem.g1), float(active @ problem.g2)]
    )


def _finalize(problem: AdmissionProblem, mask: np.ndarray, p: np.ndarray) -> AdmissionResult:
    c = problem.constraints
    p_out = np.where(mask, p, 0.0)
    rates = np.array(
        [achieved_rate(p_out[i], problem.gamma[i], c.sigma_w_sq) for i in range(problem.num_ue)]
    )
    return AdmissionResult(
        s=mask.astype(int),
        p=p_out,
        rates=rates,
        est_interference=estimated_interference(problem, mask, p_out),
        admitted_count=int(mask.sum()),
    )


def _interference_drops(
    problem: AdmissionProblem, mask: np.ndarray, p: np.ndarray
) -> np.ndarray:
    """Drop UEs angularly closest to a violated PU until both budgets hold.

    Powers are left untouched; each drop only lowers both left-hand sides,
    so the loop ends after at most K drops.
    """
    c = problem.constraints
    mask = mask.copy()
    while True:
        changed = False
        for j in (0, 1):
            while mask.any():
                lhs = estimated_interference(problem, mask, p)[j]
                if lhs <= c.i0:
                    break
                dist = np.where(
                    mask, np.abs(problem.ue_phi - problem.pu_phi_hat[j]), np.inf
                )
                mask[int(np.argmin(dist))] = False
                changed = True
        if not changed:
            return mask


def interference_control(result: AdmissionResult, problem: AdmissionProblem) -> AdmissionResult:
    """Re-apply the interference drop rule to an already-allocated result."""
    mask = result.s.astype(bool)
    mask = _interference_drops(problem, mask, result.p)
    return _finalize(problem, mask, result.p)


def _equal_power_core(problem: AdmissionProblem, mask: np.ndarray):
    """Even split of the budget with min-rate drops; returns (mask, share)."""
    c = problem.constraints
    share = 0.0
    while mask.any():
        share = c.p0 / int(mask.sum())
        rates = np.where(
            mask, np.log2(1.0 + share * problem.gamma / c.sigma_w_sq), np.inf
        )
        worst = int(np.argmin(rates))
        if rates[worst] >= c.r0:
            break
        mask[worst] = False
    return mask, share


def equal_power_allocate(
    problem: AdmissionProblem, redistribute_after_interference: bool = False
) -> AdmissionResult:
    """Even power split, min-rate drops, then interference drops.

    Power freed by interference drops is deliberately left unused: a
    re-split would raise every survivor's power and could re-violate the
    budget just satisfied. Set redistribute_after_interference to loop
    re-split / rate drops / interference drops until stable instead.
    """
    mask = np.ones(problem.num_ue, dtype=bool)
    mask, share = _equal_power_core(problem, mask)
    p = np.full(problem.num_ue, share if mask.any() else 0.0)
    new_mask = _interference_drops(problem, mask, p)
    if redistribute_after_interference:
        while new_mask.sum() != mask.sum():
            mask, share = _equal_power_core(problem, new_mask)
            p = np.full(problem.num_ue, share if mask.any() else 0.0)
            new_mask = _interference_drops(problem, mask, p)
    return _finalize(problem, new_mask, p)


def equal_rate_allocate(problem: AdmissionProblem) -> AdmissionResult:
    """Rate-floor powers, max-power drops to fit the budget, then
    interference drops. Every survivor ends exactly at the rate floor."""
    c = problem.constraints
    p = np.array([required_power(g, c) for g in problem.gamma])
    mask = np.ones(problem.num_ue, dtype=bool)
    while mask.any() and float(np.sum(np.where(mask, p, 0.0))) > c.p0:
        costly = np.where(mask, p, -np.inf)
        mask[int(np.argmax(costly))] = False
    mask = _interference_drops(problem, mask, p)
    return _finalize(problem, mask, p)


def ilp_admit(
    problem: AdmissionProblem,
    exhaustive_limit: int = 16,
    branch_and_bound: bool = True,
) -> AdmissionResult:
    """Exact maximizer of the admitted count at rate-floor powers.

    Ties resolve to minimum total power, then to the lexicographically
    smallest tuple of selected indices. When nothing fits, the empty
    selection is returned.
    """
    c = problem.constraints
    k = problem.num_ue
    p = np.array([required_power(g, c) for g in problem.gamma])

    p0_lim = c.p0 * (1.0 + _REL_SLACK)
    i0_lim = c.i0 * (1.0 + _REL_SLACK)
    finite = np.isfinite(p)
    w1 = np.full(k, np.inf)
    w2 = np.full(k, np.inf)
    w1[finite] = problem.alpha_hat_sq[0] * p[finite] * problem.g1[finite]
    w2[finite] = problem.alpha_hat_sq[1] * p[finite] * problem.g2[finite]
    eligible = finite & (p <= p0_lim) & (w1 <= i0_lim) & (w2 <= i0_lim)
    idx = np.flatnonzero(eligible)

    mask = np.zeros(k, dtype=bool)
    if idx.size:
        if idx.size <= exhaustive_limit:
            chosen = _exhaustive_select(p[idx], w1[idx], w2[idx], p0_lim, i0_lim)
        elif branch_and_bound:
            chosen = _branch_and_bound_select(p[idx], w1[idx], w2[idx], p0_lim, i0_lim)
        else:
            raise CapacityError(
                f"{idx.size} candidates exceed exhaustive_limit={exhaustive_limit} "
                "and branch-and-bound is disabled"
            )
        mask[idx[list(chosen)]] = True
    return _finalize(problem, mask, p)


def _exhaustive_select(p, w1, w2, p0_lim, i0_lim):
    """Enumerate all 2^n selections; n is small by construction."""
    n = len(p)
    codes = np.arange(1 << n, dtype=np.int64)
    sel = ((codes[:, None] >> np.arange(n)) & 1).astype(float)
    totals = sel @ np.column_stack([p, w1, w2])
    feasible = (
        (totals[:, 0] <= p0_lim) & (totals[:, 1] <= i0_lim) & (totals[:, 2] <= i0_lim)
    )
    counts = sel.sum(axis=1)
    best_count = counts[feasible].max()  # the empty set is always feasible
    cand = np.flatnonzero(feasible & (counts == best_count))
    power = totals[cand, 0]
    cand = cand[power == power.min()]
    return min(tuple(np.flatnonzero(sel[c])) for c in cand)


def _branch_and_bound_select(p, w1, w2, p0_lim, i0_lim):
    """Depth-first include-first search with the remaining-count bound.

    Incumbents are re-scored with the same vectorized sums as the
    exhaustive path so both paths pick identical selections.
    """
    n = len(p)
    best = {"count": 0, "power": 0.0, "sel": ()}

    def consider(count, chosen):
        arr = np.zeros(n)
        arr[list(chosen)] = 1.0
        tp = float(arr @ p)
        if tp > p0_lim or float(arr @ w1) > i0_lim or float(arr @ w2) > i0_lim:
            return
        if (
            count > best["count"]
            or (count == best["count"] and tp < best["power"])
            or (count == best["count"] and tp == best["power"] and chosen < best["sel"])
        ):
            best.update(count=count, power=tp, sel=chosen)

    def dfs(i, count, psum, s1, s2, chosen):
        remaining = n - i
        if count + remaining < best["count"]:
            return
        if count + remaining == best["count"] and psum > best["power"]:
            return
        if i == n:
            consider(count, chosen)
            return
        if psum + p[i] <= p0_lim and s1 + w1[i] <= i0_lim and s2 + w2[i] <= i0_lim:
            dfs(i + 1, count + 1, psum + p[i], s1 + w1[i], s2 + w2[i], chosen + (i,))
        dfs(i + 1, count, psum, s1, s2, chosen)

    dfs(0, 0, 0.0, 0.0, 0.0, ())
    return best["sel"]


def true_interference(
    result: AdmissionResult, channels: ChannelSet, beamformers: BeamformerSet
) -> np.ndarray:
    """Interference actually received at each PU, from true angles and
    attenuations (reporting metric; the constraints use estimates)."""
    out = np.zeros(2)
    active = result.s.astype(bool)
    if not active.any():
        return out
    for j, link in enumerate(channels.sp_links):
        a = steering_vector(channels.m_bs, link.phi)
        leak = np.abs(beamformers.v[active] @ a.conj()) ** 2
        out[j] = link.alpha ** 2 * float(result.p[active] @ leak)
    return out
