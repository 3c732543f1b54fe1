"""Brute-force reference implementations the tests check qbench against.

Everything here is rebuilt from explicit small matrices and scalar
formulas and deliberately shares no internals with the package, so a
disagreement between the two routes flags an error in one of them.
Basis order is little endian: index = 2*q1 + q0.
"""

from __future__ import annotations

import numpy as np

from qbench.circuits import (
    Cnot,
    Measure,
    PreparationParams,
    Reset,
    SingleU,
    random_preparation,
)

SQRT3 = np.sqrt(3.0)
TRIPLE_THETA = 2.0 * np.arccos(1.0 / SQRT3)

#: (t1, t2) of the seven projector states, keyed like ProjectionProbabilities
SETTINGS = {
    "p012": (TRIPLE_THETA, np.pi / 2.0),
    "p01": (np.pi / 2.0, 0.0),
    "p12": (np.pi, np.pi / 2.0),
    "p20": (np.pi / 2.0, np.pi),
    "p0": (0.0, 0.0),
    "p1": (np.pi, 0.0),
    "p2": (np.pi, np.pi),
}

LEVELS = (0, 1, 3)


def u2(theta: float, phi: float, lam: float) -> np.ndarray:
    c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
    return np.array(
        [[c, -np.exp(1j * lam) * s], [np.exp(1j * phi) * s, np.exp(1j * (phi + lam)) * c]],
        dtype=complex,
    )


def ry(theta: float) -> np.ndarray:
    return u2(theta, 0.0, 0.0)


def phase_gate(lam: float) -> np.ndarray:
    return u2(0.0, 0.0, lam)


def on_q0(u: np.ndarray) -> np.ndarray:
    # qubit 0 is the low index bit, so it sits on the right kron factor
    return np.kron(np.eye(2, dtype=complex), u)


def on_q1(u: np.ndarray) -> np.ndarray:
    return np.kron(u, np.eye(2, dtype=complex))


def controlled_on_q0(u: np.ndarray) -> np.ndarray:
    """u on qubit 1, applied only where qubit 0 (the low bit) is 1."""
    m = np.eye(4, dtype=complex)
    m[1, 1], m[1, 3] = u[0, 0], u[0, 1]
    m[3, 1], m[3, 3] = u[1, 0], u[1, 1]
    return m


def controlled_on_q1(u: np.ndarray) -> np.ndarray:
    """u on qubit 0, applied only where qubit 1 (the high bit) is 1."""
    m = np.eye(4, dtype=complex)
    m[2, 2], m[2, 3] = u[0, 0], u[0, 1]
    m[3, 2], m[3, 3] = u[1, 0], u[1, 1]
    return m


def prep_unitary(theta1: float, theta2: float, phi1: float = 0.0, phi2: float = 0.0) -> np.ndarray:
    m = on_q0(ry(theta1))
    m = on_q0(phase_gate(phi1)) @ m
    m = controlled_on_q0(ry(theta2)) @ m
    m = controlled_on_q0(phase_gate(phi2)) @ m
    return m


def state_of(params: PreparationParams) -> np.ndarray:
    e0 = np.zeros(4, dtype=complex)
    e0[0] = 1.0
    return prep_unitary(params.theta1, params.theta2, params.phi1, params.phi2) @ e0


def plan_unitary(plan) -> np.ndarray:
    """Multiply out a plan's gates with this module's own embeddings.

    Leading resets are skipped (they act on |00> as the identity in the
    plans under test); measures terminate the product.
    """
    m = np.eye(4, dtype=complex)
    for instr in plan.instructions:
        kind = instr.kind
        if isinstance(kind, Reset):
            if not np.allclose(m, np.eye(4)):
                raise ValueError("reset after a non-trivial gate")
            continue
        if isinstance(kind, Measure):
            break
        if isinstance(kind, SingleU):
            u = u2(kind.theta, kind.phi, kind.lam)
            m = (on_q0(u) if kind.qubit == 0 else on_q1(u)) @ m
        elif isinstance(kind, Cnot):
            x = np.array([[0, 1], [1, 0]], dtype=complex)
            cx = controlled_on_q0(x) if kind.control == 0 else controlled_on_q1(x)
            m = cx @ m
        else:
            raise ValueError(f"unexpected instruction {kind!r}")
    return m


def outcome_dist(psi: np.ndarray, t1: float, t2: float) -> np.ndarray:
    """True outcome distribution of the (t1, t2) projection circuit."""
    amps = prep_unitary(t1, t2).conj().T @ psi
    return np.abs(amps) ** 2


def apply_confusion(q: np.ndarray, p: float) -> np.ndarray:
    m = np.array([[1.0 - p, p], [p, 1.0 - p]])
    return q @ np.kron(m, m)  # rows true, cols observed; same index layout


def seven_probs(psi: np.ndarray, p: float = 0.0) -> dict[str, float]:
    """Observed P(00) of the seven settings under symmetric confusion p."""
    out = {}
    for name, (t1, t2) in SETTINGS.items():
        q = outcome_dist(psi, t1, t2)
        out[name] = float(apply_confusion(q, p)[0])
    return out


def gamma_ref(p_ij: float, p_i: float, p_j: float) -> float:
    return (2.0 * p_ij - p_i - p_j) / (2.0 * np.sqrt(p_i * p_j))


def metrics_of(pp: dict[str, float]) -> tuple[float, float, tuple[float, float, float]]:
    """(kappa, F, gammas) from the seven observed probabilities."""
    g01 = gamma_ref(pp["p01"], pp["p0"], pp["p1"])
    g12 = gamma_ref(pp["p12"], pp["p1"], pp["p2"])
    g20 = gamma_ref(pp["p20"], pp["p2"], pp["p0"])
    f = g01**2 + g12**2 + g20**2 - 2.0 * g01 * g12 * g20
    k = (
        3.0 * pp["p012"]
        - 2.0 * (pp["p01"] + pp["p12"] + pp["p20"])
        + pp["p0"] + pp["p1"] + pp["p2"]
    )
    return k, f, (g01, g12, g20)


def f_of_readout(params: PreparationParams, p: float) -> float:
    return metrics_of(seven_probs(state_of(params), p))[1]


def kappa_n_ref(x) -> float:
    """Direct term-by-term evaluation of the n-path identity residual."""
    x = [complex(v) for v in x]
    n = len(x)
    total = abs(sum(x)) ** 2
    pairs = sum(abs(x[i] + x[j]) ** 2 for i in range(n) for j in range(i + 1, n))
    singles = sum(abs(v) ** 2 for v in x)
    return total - pairs + (n - 2) * singles


def threshold_ref(
    params: PreparationParams, resolution: float = 1e-3, lo: float = 0.5, hi: float = 1.0
) -> float | None:
    """First upward crossing of F = 1 on a fine grid over (lo, hi).

    Plain dense scan at double the requested resolution; no bisection, so
    it shares no search structure with the package implementation.
    """
    ps = np.arange(lo + resolution, hi - resolution / 2.0, resolution / 2.0)
    prev = f_of_readout(params, float(ps[0]))
    for p in ps[1:]:
        cur = f_of_readout(params, float(p))
        if prev < 1.0 <= cur:
            return float(p)
        prev = cur
    return None


def floored_preparation(
    rng: np.random.Generator, floor: float = 0.05
) -> PreparationParams:
    """Random preparation redrawn until every level modulus is >= floor."""
    while True:
        params = random_preparation(rng)
        psi = state_of(params)
        if min(abs(psi[i]) for i in LEVELS) >= floor:
            return params


def quadratic_residual(xs, ys) -> float:
    """Max |residual| of the best least-squares quadratic through (xs, ys)."""
    coeffs = np.polyfit(np.asarray(xs, dtype=float), np.asarray(ys, dtype=float), 2)
    return float(np.max(np.abs(np.polyval(coeffs, xs) - ys)))
