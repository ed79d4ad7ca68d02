"""
Monte Carlo evaluation of unitary matrix integrals
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import qr

from app.config import DEFAULT_SAMPLES, DEFAULT_SEED, STAT_FLOOR, STAT_SIGMAS, THREADS
from app.models import CoefficientCheck, MCEstimate
from app.services.datum_service import VLDatum
from app.services.series_service import TruncSeries, power_product

logger = logging.getLogger(__name__)

MomentSpec = Sequence[Tuple[int, int, int]]


class ComplexSeries:
    """Truncated series with complex double coefficients"""

    __slots__ = ("order", "coeffs")

    def __init__(self, coeffs, order: int):
        values = np.zeros(order + 1, dtype=complex)
        coeffs = np.asarray(coeffs, dtype=complex)[: order + 1]
        values[: len(coeffs)] = coeffs
        self.order = order
        self.coeffs = values

    @classmethod
    def one(cls, order: int) -> "ComplexSeries":
        return cls([1.0], order)

    @classmethod
    def exp(cls, log_coeffs: np.ndarray, order: int) -> "ComplexSeries":
        """exp(sum_{m>=1} a_m t^m) by m h_m = sum_k k a_k h_{m-k}"""
        a = np.zeros(order + 1, dtype=complex)
        a[: min(len(log_coeffs), order + 1)] = log_coeffs[: order + 1]
        if a[0] != 0:
            raise ValueError("exp needs a zero constant term")
        weighted = a * np.arange(order + 1)
        h = np.zeros(order + 1, dtype=complex)
        h[0] = 1.0
        for m in range(1, order + 1):
            h[m] = np.dot(weighted[1: m + 1], h[m - 1:: -1][: m]) / m
        return cls(h, order)

    def __mul__(self, other: "ComplexSeries") -> "ComplexSeries":
        if other.order != self.order:
            raise ValueError(f"order mismatch: {self.order} vs {other.order}")
        return ComplexSeries(np.convolve(self.coeffs, other.coeffs)[: self.order + 1], self.order)

    def inverse(self) -> "ComplexSeries":
        a = self.coeffs
        if a[0] == 0:
            raise ValueError("constant term 0 is not invertible")
        b = np.zeros(self.order + 1, dtype=complex)
        b[0] = 1 / a[0]
        for n in range(1, self.order + 1):
            b[n] = -np.dot(a[1: n + 1], b[n - 1:: -1][:n]) / a[0]
        return ComplexSeries(b, self.order)

    def __pow__(self, exponent: int) -> "ComplexSeries":
        base = self if exponent >= 0 else self.inverse()
        result = ComplexSeries.one(self.order)
        for _ in range(abs(exponent)):
            result = result * base
        return result

    def __repr__(self) -> str:
        return f"ComplexSeries({self.coeffs.tolist()}, order={self.order})"


def haar_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """QR of a complex Ginibre matrix with the phases of R's diagonal divided out"""
    if d < 1:
        raise ValueError(f"unitary dimension must be positive, got {d}")
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = qr(z)
    diagonal = np.diag(r)
    return q * (diagonal / np.abs(diagonal))


def ds_exact(spec: MomentSpec) -> int:
    """prod_s s^m_s m_s! when every m_s = n_s, else 0"""
    value = 1
    for s, m, n in spec:
        if m != n:
            return 0
        value *= s ** m * math.factorial(m)
    return value


def ds_threshold(spec: MomentSpec) -> int:
    return sum(s * max(m, n) for s, m, n in spec)


def _trace_powers(g: np.ndarray, K: int) -> np.ndarray:
    """Tr(g^k) for k = 0..K from the eigenvalues"""
    eigenvalues = np.linalg.eigvals(g)
    return np.array([np.sum(eigenvalues ** k) for k in range(K + 1)])


def _charges(d: VLDatum, N: int) -> np.ndarray:
    """c[r, i, j] = dim V_ij[r] - dim L_ij[r]"""
    c = np.zeros((N + 1, d.dim_I, d.dim_I), dtype=np.int64)
    for i in range(d.dim_I):
        for j in range(d.dim_I):
            for r in range(1, min(N, d.max_weight) + 1):
                v = d.dimsV[i][j][r] if r < len(d.dimsV[i][j]) else 0
                ell = d.dimsL[i][j][r] if r < len(d.dimsL[i][j]) else 0
                c[r, i, j] = v - ell
    return c


def integrand_series(datum: VLDatum, g: Sequence[np.ndarray], N: int) -> ComplexSeries:
    """
    prod_{r,i,j} det(1 - t^r g_i^dual (x) g_j)^(-c^r_ij), through
    log det = -sum_k t^rk conj(Tr g_i^k) Tr g_j^k / k.
    """
    if len(g) != datum.dim_I:
        raise ValueError(f"need {datum.dim_I} unitaries, got {len(g)}")
    c = _charges(datum, N)
    traces = np.array([_trace_powers(x, N) for x in g])
    log_coeffs = np.zeros(N + 1, dtype=complex)
    for r in range(1, N + 1):
        if not c[r].any():
            continue
        for k in range(1, N // r + 1):
            pk = traces[:, k]
            log_coeffs[r * k] += (np.conj(pk) @ c[r] @ pk) / k
    return ComplexSeries.exp(log_coeffs, N)


def dense_integrand_series(datum: VLDatum, g: Sequence[np.ndarray], N: int) -> ComplexSeries:
    """Same integrand from the characteristic polynomials of the dense operators conj(g_i) (x) g_j"""
    c = _charges(datum, N)
    result = ComplexSeries.one(N)
    for r in range(1, N + 1):
        for i in range(datum.dim_I):
            for j in range(datum.dim_I):
                if not c[r, i, j]:
                    continue
                operator = np.kron(np.conj(g[i]), g[j])
                # det(1 - x M) has the characteristic coefficients in reverse order
                charpoly = np.poly(np.linalg.eigvals(operator))
                factor = np.zeros(N + 1, dtype=complex)
                for power, coeff in enumerate(charpoly):
                    if power * r <= N:
                        factor[power * r] = coeff
                result = result * ComplexSeries(factor, N) ** int(-c[r, i, j])
    return result


def torus_exact(datum: VLDatum, N: int) -> TruncSeries:
    """The d = 1 integral for a single vertex: the integrand does not depend on the phase"""
    if datum.dim_I != 1:
        raise ValueError("torus oracle is implemented for one vertex")
    c = _charges(datum, N)
    return power_product({r: -int(c[r, 0, 0]) for r in range(1, N + 1) if c[r, 0, 0]}, N)


def compare_to_target(estimate: MCEstimate, target: Sequence[float], sigmas: float = STAT_SIGMAS,
                      floor: float = STAT_FLOOR) -> List[CoefficientCheck]:
    """Pass when |mean - target| <= sigmas * stderr + floor"""
    checks = []
    for k, (mean, err, goal) in enumerate(zip(estimate.mean, estimate.stderr, target)):
        gap = abs(mean - goal)
        distance = gap / err if err > 0 else None
        checks.append(CoefficientCheck(index=k, target=float(goal), mean=mean, sigmas=distance,
                                       passed=gap <= sigmas * err + floor))
    return checks


class RandmatService:
    def __init__(self, threads: Optional[int] = None):
        self.threads = THREADS if threads is None else threads

    def _sample(self, fn, samples: int, seed: int) -> np.ndarray:
        """Row s is fn(rng_s) with rng_s from the s-th spawned seed, independent of the thread count"""
        streams = np.random.SeedSequence(seed).spawn(samples)
        with ThreadPoolExecutor(max_workers=self.threads) as pool:
            rows = list(pool.map(lambda ss: fn(np.random.default_rng(ss)), streams))
        return np.array(rows)

    def _estimate(self, rows: np.ndarray, samples: int, seed: int, dims: Sequence[int],
                  notes: Sequence[str] = ()) -> MCEstimate:
        mean = rows.mean(axis=0)
        stderr = rows.std(axis=0, ddof=1) / np.sqrt(samples)
        return MCEstimate(
            mean=tuple(float(x) for x in mean.real),
            mean_imag=tuple(float(x) for x in mean.imag),
            stderr=tuple(float(x) for x in np.atleast_1d(stderr)),
            samples=samples,
            seed=seed,
            dims=tuple(dims),
            notes=tuple(notes),
        )

    def ds_moment(self, d: int, spec: MomentSpec, samples: int = DEFAULT_SAMPLES,
                  seed: int = DEFAULT_SEED) -> MCEstimate:
        """E[prod_s (Tr u^s)^m_s conj(Tr u^s)^n_s] over Haar u in U(d)"""
        if samples < 2:
            raise ValueError("need at least 2 samples")
        notes = []
        threshold = ds_threshold(spec)
        if d < threshold:
            note = f"d = {d} is below the stable range d >= {threshold}; exact moment values may not apply"
            logger.warning(f"⚠️ {note}")
            notes.append(note)
        top = max([s for s, _, _ in spec] + [1])

        def moment(rng: np.random.Generator) -> List[complex]:
            traces = _trace_powers(haar_unitary(d, rng), top)
            value = complex(1)
            for s, m, n in spec:
                value *= traces[s] ** m * np.conj(traces[s]) ** n
            return [value]

        logger.info(f"🔄 sampling {samples} unitaries of size {d}")
        return self._estimate(self._sample(moment, samples, seed), samples, seed, (d,), notes)

    def mc_matrix_integral(self, datum: VLDatum, dims: Sequence[int], N: int, samples: int = DEFAULT_SAMPLES,
                           seed: int = DEFAULT_SEED, divide_lambda: bool = False) -> MCEstimate:
        """Coefficientwise Haar average of integrand_series; optionally divided by lambda(L°)"""
        if len(dims) != datum.dim_I:
            raise ValueError(f"dimension vector needs {datum.dim_I} entries, got {len(dims)}")
        if samples < 2:
            raise ValueError("need at least 2 samples")
        scale = None
        if divide_lambda:
            lam = power_product({r: x for r, x in enumerate(datum.m) if r and x}, N)
            scale = ComplexSeries(list(lam.inverse().coeffs), N)

        def sample(rng: np.random.Generator) -> np.ndarray:
            series = integrand_series(datum, [haar_unitary(d, rng) for d in dims], N)
            if scale is not None:
                series = series * scale
            return series.coeffs

        logger.info(f"🔄 matrix integral: dims={list(dims)}, order={N}, samples={samples}, seed={seed}")
        estimate = self._estimate(self._sample(sample, samples, seed), samples, seed, dims)
        worst = max(abs(x) for x in estimate.mean_imag)
        if worst > 1e-6 + STAT_SIGMAS * max(estimate.stderr):
            logger.warning(f"⚠️ imaginary parts of the means reach {worst:.3g}")
        logger.info(f"✅ matrix integral estimate: {[round(x, 4) for x in estimate.mean]}")
        return estimate


# Global service instance
randmat_service = RandmatService()
