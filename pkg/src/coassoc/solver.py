"""ADMM solver for the adversarial similarity/dissimilarity program.

The program couples two symmetric matrix variables through the inner
product tr(S*^T D*), regularizes each by a Laplacian smoothness term, and
pins the entries on the supports of the observed similarity S and
dissimilarity D while keeping everything inside [0, 1]. Splitting
variables E and F absorb the box/symmetry/support constraints so that
every subproblem has a closed-form solution:

  S* <- (2L + g1 I)^-1 (g1 E - D* - Lam)
  E  <- Proj_support( clamp( sym(S* + Lam/g1), 0, 1 ) )
  D* <- (2L + g2 I)^-1 (g2 F - S* - Gam)
  F  <- Proj_support( clamp( sym(D* + Gam/g2), 0, 1 ) )
  Lam += g1 (S* - E);  Gam += g2 (D* - F);  g grows by rho up to gamma_max

Each sweep uses the latest value of every other variable. Convergence is
declared when the squared relative change of all four primal variables
falls below ``epsilon``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.linalg

from .core import SymMatrix
from .errors import ConfigError, NumericError


@dataclass(frozen=True)
class SolverConfig:
    """ADMM hyperparameters; defaults follow the standard schedule
    (penalties start at 1, grow by 1.1 per sweep, cap at 1e6)."""

    rho: float = 1.1
    gamma_max: float = 1e6
    epsilon: float = 1e-3
    max_iters: int = 200
    gamma_init: float = 1.0
    use_s_manifold: bool = True
    use_d_manifold: bool = True
    d_update_uses_original_s: bool = False
    validate: bool = False

    def __post_init__(self):
        if self.rho <= 1.0:
            raise ConfigError(f"rho must exceed 1, got {self.rho}")
        if self.epsilon <= 0.0:
            raise ConfigError(f"epsilon must be positive, got {self.epsilon}")
        if self.gamma_init <= 0.0 or self.gamma_max < self.gamma_init:
            raise ConfigError("need 0 < gamma_init <= gamma_max")
        if self.max_iters < 1:
            raise ConfigError("max_iters must be >= 1")


@dataclass
class SolverState:
    """Mutable ADMM iterates plus the per-iteration residual history."""

    s_star: np.ndarray
    d_star: np.ndarray
    e: np.ndarray
    f: np.ndarray
    lambda_mult: np.ndarray
    gamma_mult: np.ndarray
    gamma1: float
    gamma2: float
    iteration: int = 0
    residuals: list = field(default_factory=list)

    @classmethod
    def zeros(cls, n: int, gamma_init: float = 1.0) -> "SolverState":
        return cls(
            s_star=np.zeros((n, n)),
            d_star=np.zeros((n, n)),
            e=np.zeros((n, n)),
            f=np.zeros((n, n)),
            lambda_mult=np.zeros((n, n)),
            gamma_mult=np.zeros((n, n)),
            gamma1=gamma_init,
            gamma2=gamma_init,
        )


@dataclass(frozen=True)
class IterationStats:
    iteration: int
    sigma_s: float
    sigma_d: float
    sigma_e: float
    sigma_f: float
    gap_s: float
    gap_d: float
    gamma1: float
    gamma2: float

    FIELDS = ("iteration", "sigma_s", "sigma_d", "sigma_e", "sigma_f",
              "gap_s", "gap_d", "gamma1", "gamma2")

    def row(self) -> str:
        return "\t".join(
            str(self.iteration) if name == "iteration" else f"{getattr(self, name):.9e}"
            for name in self.FIELDS
        )


@dataclass
class SolverTrace:
    """Residual history of one solve, dumpable as tab-separated text."""

    rows: list[IterationStats]
    converged: bool
    n: int
    state: "SolverState | None" = None

    @property
    def iterations(self) -> int:
        return len(self.rows)

    @property
    def final(self) -> IterationStats:
        return self.rows[-1]

    def dump(self, path) -> None:
        lines = ["\t".join(IterationStats.FIELDS)]
        lines.extend(stat.row() for stat in self.rows)
        lines.append(f"# converged={self.converged}")
        Path(path).write_text("\n".join(lines) + "\n")


def _sigma(new: np.ndarray, old: np.ndarray) -> float:
    """Squared relative change; a variable whose RMS entry change is below
    1e-8 counts as stationary (otherwise a matrix decaying geometrically
    to exact zero never settles in relative terms), and motion away from
    an all-zero iterate counts as infinite."""
    num = float(np.sum((new - old) ** 2))
    if num <= 1e-16 * new.size:
        return 0.0
    den = float(np.sum(old**2))
    if den < 1e-30:
        return np.inf
    return num / den


def _factorize(laplacian: np.ndarray, gamma: float):
    system = 2.0 * laplacian
    system.flat[:: system.shape[0] + 1] += gamma
    try:
        return scipy.linalg.cho_factor(system, lower=True, overwrite_a=True, check_finite=False)
    except scipy.linalg.LinAlgError as exc:
        raise NumericError(f"Cholesky factorization failed: {exc}") from exc


def _spd_solve(laplacian: np.ndarray | None, gamma: float, rhs: np.ndarray, factor=None) -> np.ndarray:
    """Solve (2 L + gamma I) X = rhs; L=None means the manifold term is off."""
    if laplacian is None:
        return rhs / gamma
    if factor is None:
        factor = _factorize(laplacian, gamma)
    return scipy.linalg.cho_solve(factor, rhs, check_finite=False)


class _FactorCache:
    """Reuse the Cholesky factor of 2L + gamma I while gamma is unchanged
    (the penalty freezes at gamma_max, so late iterations share one)."""

    def __init__(self, laplacian: np.ndarray | None):
        self.laplacian = laplacian
        self.gamma = None
        self.factor = None

    def get(self, gamma: float):
        if self.laplacian is None:
            return None
        if self.factor is None or gamma != self.gamma:
            self.factor = _factorize(self.laplacian, gamma)
            self.gamma = gamma
        return self.factor


def update_s_star(state: SolverState, laplacian: np.ndarray | None, factor=None) -> np.ndarray:
    """Closed-form minimizer of the similarity block."""
    rhs = state.gamma1 * state.e
    rhs -= state.d_star
    rhs -= state.lambda_mult
    return _spd_solve(laplacian, state.gamma1, rhs, factor=factor)


def update_e(state: SolverState, s_support: np.ndarray, s_values: np.ndarray) -> np.ndarray:
    """Symmetrize, clamp to [0, 1], then overwrite the observed entries."""
    p = state.lambda_mult / state.gamma1
    p += state.s_star
    e = p + p.T
    e *= 0.5
    np.clip(e, 0.0, 1.0, out=e)
    e[s_support] = s_values[s_support]
    return e


def update_d_star(
    state: SolverState,
    laplacian: np.ndarray | None,
    s_latest: np.ndarray,
    factor=None,
) -> np.ndarray:
    """Closed-form minimizer of the dissimilarity block; ``s_latest`` is
    the similarity iterate the cross term couples against."""
    rhs = state.gamma2 * state.f
    rhs -= s_latest
    rhs -= state.gamma_mult
    return _spd_solve(laplacian, state.gamma2, rhs, factor=factor)


def update_f(state: SolverState, d_support: np.ndarray, d_values: np.ndarray) -> np.ndarray:
    """Mirror of :func:`update_e` for the dissimilarity block."""
    q = state.gamma_mult / state.gamma2
    q += state.d_star
    f = q + q.T
    f *= 0.5
    np.clip(f, 0.0, 1.0, out=f)
    f[d_support] = d_values[d_support]
    return f


def update_multipliers(state: SolverState, cfg: SolverConfig) -> tuple[np.ndarray, np.ndarray]:
    """Dual ascent on both constraints, then grow the penalties."""
    step = state.s_star - state.e
    step *= state.gamma1
    state.lambda_mult += step
    step = state.d_star - state.f
    step *= state.gamma2
    state.gamma_mult += step
    state.gamma1 = min(cfg.rho * state.gamma1, cfg.gamma_max)
    state.gamma2 = min(cfg.rho * state.gamma2, cfg.gamma_max)
    return state.lambda_mult, state.gamma_mult


def augmented_lagrangian(
    state: SolverState,
    laplacian_s: np.ndarray | None,
    laplacian_d: np.ndarray | None,
) -> float:
    """Value of the augmented Lagrangian at the state's iterates."""
    val = float(np.sum(state.s_star * state.d_star))
    if laplacian_s is not None:
        val += float(np.sum(state.s_star * (laplacian_s @ state.s_star)))
    if laplacian_d is not None:
        val += float(np.sum(state.d_star * (laplacian_d @ state.d_star)))
    gap_s = state.s_star - state.e
    gap_d = state.d_star - state.f
    val += float(np.sum(state.lambda_mult * gap_s)) + state.gamma1 / 2.0 * float(np.sum(gap_s**2))
    val += float(np.sum(state.gamma_mult * gap_d)) + state.gamma2 / 2.0 * float(np.sum(gap_d**2))
    return val


def _check_split_invariants(x: np.ndarray, support: np.ndarray, values: np.ndarray, tag: str):
    if x.min() < 0.0 or x.max() > 1.0:
        raise NumericError(f"{tag} left the [0, 1] box")
    if not np.array_equal(x, x.T):
        raise NumericError(f"{tag} lost symmetry")
    if not np.array_equal(x[support], values[support]):
        raise NumericError(f"{tag} drifted off the observed entries")


def solve(
    s: SymMatrix | np.ndarray,
    d: SymMatrix | np.ndarray,
    laplacian: np.ndarray,
    cfg: SolverConfig | None = None,
) -> tuple[SymMatrix, SymMatrix, SolverTrace]:
    """Run the ADMM sweep until all four relative changes drop below
    ``cfg.epsilon`` or ``cfg.max_iters`` is hit.

    Supports are read from the nonzero entries of ``s`` and ``d``; all
    iterates start at zero. On hitting the iteration cap the last iterates
    are returned with ``trace.converged`` False. NaN/Inf anywhere raises
    :class:`NumericError`.
    """
    cfg = cfg or SolverConfig()
    s_dense = s.to_dense() if isinstance(s, SymMatrix) else np.asarray(s, dtype=np.float64)
    d_dense = d.to_dense() if isinstance(d, SymMatrix) else np.asarray(d, dtype=np.float64)
    lap = np.asarray(laplacian, dtype=np.float64)
    n = s_dense.shape[0]
    if s_dense.shape != (n, n) or d_dense.shape != (n, n) or lap.shape != (n, n):
        raise ConfigError("s, d, and laplacian must all be n-by-n")

    s_support = s_dense != 0.0
    d_support = d_dense != 0.0
    lap_s = lap if cfg.use_s_manifold else None
    lap_d = lap if cfg.use_d_manifold else None

    state = SolverState.zeros(n, gamma_init=cfg.gamma_init)
    cache_s = _FactorCache(lap_s)
    cache_d = cache_s if lap_d is lap_s else _FactorCache(lap_d)
    converged = False
    for it in range(1, cfg.max_iters + 1):
        prev = (state.s_star, state.d_star, state.e, state.f)
        # the zero-initialized E/F are infeasible until the first sweep
        # projects them, so the descent property only holds from sweep 2
        check_descent = cfg.validate and not cfg.d_update_uses_original_s and it > 1
        if check_descent:
            lagr_before = augmented_lagrangian(state, lap_s, lap_d)

        state.s_star = update_s_star(state, lap_s, factor=cache_s.get(state.gamma1))
        state.e = update_e(state, s_support, s_dense)
        s_latest = s_dense if cfg.d_update_uses_original_s else state.s_star
        state.d_star = update_d_star(state, lap_d, s_latest, factor=cache_d.get(state.gamma2))
        state.f = update_f(state, d_support, d_dense)

        if cfg.validate:
            _check_split_invariants(state.e, s_support, s_dense, "E")
            _check_split_invariants(state.f, d_support, d_dense, "F")
            if check_descent:
                lagr_after = augmented_lagrangian(state, lap_s, lap_d)
                nu = min(1.0, state.gamma1, state.gamma2)
                step_sq = sum(float(np.sum((new - old) ** 2))
                              for new, old in zip((state.s_star, state.d_star, state.e, state.f), prev))
                slack = 1e-8 * (abs(lagr_before) + abs(lagr_after) + 1.0)
                if lagr_before - lagr_after < 0.5 * nu * step_sq - slack:
                    raise NumericError(
                        f"Lagrangian rose across sweep {it}: "
                        f"{lagr_before:.6e} -> {lagr_after:.6e}"
                    )

        update_multipliers(state, cfg)
        state.iteration = it

        stats = IterationStats(
            iteration=it,
            sigma_s=_sigma(state.s_star, prev[0]),
            sigma_d=_sigma(state.d_star, prev[1]),
            sigma_e=_sigma(state.e, prev[2]),
            sigma_f=_sigma(state.f, prev[3]),
            gap_s=float(np.linalg.norm(state.s_star - state.e)),
            gap_d=float(np.linalg.norm(state.d_star - state.f)),
            gamma1=state.gamma1,
            gamma2=state.gamma2,
        )
        state.residuals.append(stats)
        if not all(np.isfinite(v) or v == np.inf
                   for v in (stats.sigma_s, stats.sigma_d, stats.sigma_e, stats.sigma_f)):
            raise NumericError(f"NaN in iterates at iteration {it}")
        if not (np.isfinite(stats.gap_s) and np.isfinite(stats.gap_d)):
            raise NumericError(f"NaN/Inf feasibility gap at iteration {it}")
        if max(stats.sigma_s, stats.sigma_d, stats.sigma_e, stats.sigma_f) <= cfg.epsilon:
            converged = True
            break

    trace = SolverTrace(rows=list(state.residuals), converged=converged, n=n, state=state)
    s_star = SymMatrix.from_dense((state.s_star + state.s_star.T) / 2.0)
    d_star = SymMatrix.from_dense((state.d_star + state.d_star.T) / 2.0)
    return s_star, d_star, trace
