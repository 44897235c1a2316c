"""
Diagnósticos de cola: pendiente log-log, planitud de u^β·Ψ̂, Hill y KS
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from .errors import DegenerateInputError

logger = logging.getLogger(__name__)

SLOPE_TOLERANCE = 0.15
FLATNESS_MAX = 3.0
HILL_EXPONENTS = (0.5, 0.6, 0.7)


def _grid_and_values(u_grid: Sequence[float], psi_values: Sequence[float]) -> Tuple[np.ndarray, np.ndarray]:
    u = np.asarray(u_grid, dtype=float)
    p = np.asarray(psi_values, dtype=float)
    if u.shape != p.shape or u.ndim != 1:
        raise DegenerateInputError("La rejilla de u y los valores de Ψ̂ deben ser vectores del mismo largo")
    if u.size < 3:
        raise DegenerateInputError("Se necesitan al menos 3 puntos de u", n=int(u.size))
    if np.any(np.diff(u) <= 0.0) or np.any(u <= 0.0):
        raise DegenerateInputError("La rejilla de u debe ser positiva y estrictamente creciente")
    if np.any(p <= 0.0):
        zeros = [float(x) for x in u[p <= 0.0]]
        raise DegenerateInputError(
            "Hay probabilidades nulas: recortar la rejilla de u a los puntos con Ψ̂ > 0", u_zero=zeros
        )
    return u, p


def loglog_slope(u_grid: Sequence[float], psi_values: Sequence[float]) -> Tuple[float, float]:
    """Mínimos cuadrados de ln Ψ̂ sobre ln u: (pendiente, error estándar)"""
    u, p = _grid_and_values(u_grid, psi_values)
    fit = stats.linregress(np.log(u), np.log(p))
    return float(fit.slope), float(fit.stderr)


def flatness(u_grid: Sequence[float], psi_values: Sequence[float], beta: float) -> float:
    """max/min de u^β·Ψ̂(u) en la rejilla"""
    u, p = _grid_and_values(u_grid, psi_values)
    scaled = u**beta * p
    return float(scaled.max() / scaled.min())


def hill_estimator(samples: Sequence[float], k: int) -> float:
    """Estimador de Hill sobre los k mayores estadísticos de orden de la parte positiva"""
    x = np.asarray(samples, dtype=float)
    x = x[x > 0.0]
    if k < 2:
        raise DegenerateInputError("k debe ser >= 2", k=k)
    if k >= x.size:
        raise DegenerateInputError(
            f"k = {k} >= número de muestras positivas ({x.size})", k=k, n_positive=int(x.size)
        )
    top = np.sort(x)[::-1][: k + 1]
    spacings = np.log(top[:k]) - math.log(top[k])
    mean = float(spacings.mean())
    if mean <= 0.0:
        raise DegenerateInputError("Muestras constantes en la cola: espaciamientos logarítmicos nulos")
    return 1.0 / mean


def default_hill_k(n: int, exponent: float = 0.6) -> int:
    return int(math.floor(n**exponent))


def hill_sensitivity(samples: Sequence[float]) -> Dict[str, float]:
    """α̂(k) para k = ⌊n^{0.5}⌋, ⌊n^{0.6}⌋, ⌊n^{0.7}⌋ con n muestras positivas"""
    x = np.asarray(samples, dtype=float)
    n_pos = int((x > 0.0).sum())
    out: Dict[str, float] = {}
    for e in HILL_EXPONENTS:
        k = default_hill_k(n_pos, e)
        try:
            out[f"n^{e}"] = hill_estimator(x, k)
        except DegenerateInputError:
            logger.warning("Hill no disponible con k = %d (n positivas = %d)", k, n_pos)
    return out


def ks_two_sample(a: Sequence[float], b: Sequence[float]) -> Tuple[float, float]:
    """Estadístico de Kolmogorov-Smirnov de dos muestras y p-valor asintótico"""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.size == 0 or b.size == 0:
        raise DegenerateInputError("Muestra vacía en KS", n_a=int(a.size), n_b=int(b.size))
    res = stats.ks_2samp(a, b, method="asymp")
    return float(res.statistic), float(res.pvalue)


# ==============================================================================
# Reporte de cola
# ==============================================================================


@dataclass(frozen=True)
class SeriesDiagnostics:
    slope: float
    slope_stderr: float
    flatness: float
    slope_ok: bool
    flatness_ok: bool

    @property
    def passed(self) -> bool:
        return self.slope_ok and self.flatness_ok


@dataclass(frozen=True)
class TailReport:
    u_grid: Tuple[float, ...]
    p_low: Tuple[float, ...]
    p_high: Tuple[float, ...]
    beta: float
    low: SeriesDiagnostics
    high: SeriesDiagnostics
    hill: Optional[float] = None
    hill_k: Optional[int] = None
    hill_sensitivity: Dict[str, float] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.low.passed and self.high.passed

    def to_dict(self) -> Dict[str, Any]:
        return {
            "u_grid": list(self.u_grid),
            "p_low": list(self.p_low),
            "p_high": list(self.p_high),
            "beta": self.beta,
            "low": {**vars(self.low), "passed": self.low.passed},
            "high": {**vars(self.high), "passed": self.high.passed},
            "hill": self.hill,
            "hill_k": self.hill_k,
            "hill_sensitivity": self.hill_sensitivity,
            "passed": self.passed,
        }


def _series(u_grid, values, beta, slope_tol, flatness_max) -> SeriesDiagnostics:
    slope, se = loglog_slope(u_grid, values)
    ratio = flatness(u_grid, values, beta)
    return SeriesDiagnostics(
        slope=slope,
        slope_stderr=se,
        flatness=ratio,
        slope_ok=abs(slope + beta) <= slope_tol,
        flatness_ok=ratio <= flatness_max,
    )


def tail_report(
    u_grid: Sequence[float],
    p_low: Sequence[float],
    p_high: Sequence[float],
    beta: float,
    samples: Optional[Sequence[float]] = None,
    slope_tol: float = SLOPE_TOLERANCE,
    flatness_max: float = FLATNESS_MAX,
) -> TailReport:
    """Diagnóstico de decaimiento u^{−β}; el veredicto exige que p_low y p_high pasen"""
    hill = hill_k = None
    sensitivity: Dict[str, float] = {}
    if samples is not None:
        n_pos = int((np.asarray(samples) > 0.0).sum())
        hill_k = default_hill_k(n_pos)
        hill = hill_estimator(samples, hill_k)
        sensitivity = hill_sensitivity(samples)
    return TailReport(
        u_grid=tuple(float(u) for u in u_grid),
        p_low=tuple(float(p) for p in p_low),
        p_high=tuple(float(p) for p in p_high),
        beta=beta,
        low=_series(u_grid, p_low, beta, slope_tol, flatness_max),
        high=_series(u_grid, p_high, beta, slope_tol, flatness_max),
        hill=hill,
        hill_k=hill_k,
        hill_sensitivity=sensitivity,
    )
