"""
Error-matrix and phase-space types.

Every matrix uses the (q_1, ..., q_N, p_1, ..., p_N) quadrature ordering.
Noise coefficients are exact sympy Rationals so that propagated matrices can be
compared by equality rather than with a tolerance.
"""

from dataclasses import dataclass

import numpy as np
import sympy as sp
from pydantic import BaseModel, ConfigDict, PositiveFloat

from gkpthreshold.core.config import settings
from gkpthreshold.core.exceptions import ContractViolation, require

# Display symbols for the ancilla spike variance and the cluster squeezing variance
DELTA = sp.Symbol("δ", nonnegative=True)
EPSILON = sp.Symbol("ε", nonnegative=True)


class NoiseModel(BaseModel):
    """Numeric values of δ (ancilla spike variance) and ε (cluster squeezing variance)."""

    model_config = ConfigDict(frozen=True)

    delta: PositiveFloat
    epsilon: PositiveFloat

    @classmethod
    def from_sigma2(cls, sigma2: float) -> "NoiseModel":
        """The main-text convention δ = ε = σ²."""
        return cls(delta=sigma2, epsilon=sigma2)

    @property
    def is_symmetric(self) -> bool:
        return self.delta == self.epsilon

    @property
    def sigma2(self) -> float:
        if not self.is_symmetric:
            raise ContractViolation(
                "sigma2 is only defined when delta == epsilon",
                {"delta": self.delta, "epsilon": self.epsilon},
            )
        return self.delta


def _linear_coefficients(expr) -> tuple:
    expr = sp.expand(sp.sympify(expr))
    d = expr.coeff(DELTA)
    e = expr.coeff(EPSILON)
    rest = sp.simplify(expr - d * DELTA - e * EPSILON)
    if rest != 0 or d.free_symbols or e.free_symbols:
        raise ContractViolation(f"not a linear combination of δ and ε: {expr}")
    if not (d.is_rational and e.is_rational):
        raise ContractViolation(f"coefficients must be rational: {expr}")
    return sp.Rational(d), sp.Rational(e)


@dataclass(frozen=True)
class NoiseTerm:
    """An exact combination ``delta*δ + epsilon*ε``."""

    delta: sp.Rational
    epsilon: sp.Rational

    def __post_init__(self):
        object.__setattr__(self, "delta", sp.Rational(self.delta))
        object.__setattr__(self, "epsilon", sp.Rational(self.epsilon))

    @classmethod
    def from_expr(cls, expr) -> "NoiseTerm":
        return cls(*_linear_coefficients(expr))

    def __add__(self, other: "NoiseTerm") -> "NoiseTerm":
        return NoiseTerm(self.delta + other.delta, self.epsilon + other.epsilon)

    def at(self, noise: NoiseModel) -> float:
        return float(self.delta) * noise.delta + float(self.epsilon) * noise.epsilon

    def multiple_of_sigma2(self) -> int:
        """n such that the term equals n·σ² when δ = ε = σ²."""
        n = self.delta + self.epsilon
        if not n.is_integer:
            raise ContractViolation(f"{self} is not an integer multiple of sigma^2")
        return int(n)

    def as_expr(self):
        return self.delta * DELTA + self.epsilon * EPSILON

    def __str__(self) -> str:
        return str(self.as_expr())


def _as_rational_matrix(m) -> sp.ImmutableMatrix:
    return sp.ImmutableMatrix(m).applyfunc(sp.nsimplify)


@dataclass(frozen=True)
class SymbolicCovariance:
    """Error matrix η = coeff_delta·δ + coeff_epsilon·ε with exact rational coefficients."""

    coeff_delta: sp.ImmutableMatrix
    coeff_epsilon: sp.ImmutableMatrix

    def __post_init__(self):
        object.__setattr__(self, "coeff_delta", _as_rational_matrix(self.coeff_delta))
        object.__setattr__(self, "coeff_epsilon", _as_rational_matrix(self.coeff_epsilon))
        d, e = self.coeff_delta, self.coeff_epsilon
        require(d.shape == e.shape, "coefficient matrices differ in shape", delta=d.shape, epsilon=e.shape)
        require(d.shape[0] == d.shape[1] and d.shape[0] in (2, 4), "error matrix must be 2x2 or 4x4", shape=d.shape)
        require(d == d.T and e == e.T, "error matrix must be symmetric")

    # constructors

    @classmethod
    def zero(cls, dim: int) -> "SymbolicCovariance":
        z = sp.zeros(dim, dim)
        return cls(z, z)

    @classmethod
    def from_expr(cls, rows) -> "SymbolicCovariance":
        """Build from a nested list (or sympy Matrix) of expressions in DELTA and EPSILON."""
        m = sp.Matrix(rows)
        coeffs = [[_linear_coefficients(m[i, j]) for j in range(m.cols)] for i in range(m.rows)]
        d = sp.Matrix(m.rows, m.cols, lambda i, j: coeffs[i][j][0])
        e = sp.Matrix(m.rows, m.cols, lambda i, j: coeffs[i][j][1])
        return cls(d, e)

    @classmethod
    def diag(cls, *terms) -> "SymbolicCovariance":
        return cls.from_expr(sp.diag(*terms))

    # algebra

    @property
    def dim(self) -> int:
        return self.coeff_delta.shape[0]

    @property
    def modes(self) -> int:
        return self.dim // 2

    def __add__(self, other: "SymbolicCovariance") -> "SymbolicCovariance":
        require(self.dim == other.dim, "dimension mismatch", left=self.dim, right=other.dim)
        return SymbolicCovariance(self.coeff_delta + other.coeff_delta, self.coeff_epsilon + other.coeff_epsilon)

    def conjugate(self, s: "SymplecticMap") -> "SymbolicCovariance":
        """S η Sᵀ."""
        require(s.dim == self.dim, "dimension mismatch", eta=self.dim, map=s.dim)
        m = s.entries
        return SymbolicCovariance(m * self.coeff_delta * m.T, m * self.coeff_epsilon * m.T)

    def sandwich(self, projector: sp.Matrix) -> "SymbolicCovariance":
        """Π η Π for a symmetric projector Π."""
        return SymbolicCovariance(projector * self.coeff_delta * projector, projector * self.coeff_epsilon * projector)

    def entry(self, i: int, j: int) -> NoiseTerm:
        return NoiseTerm(self.coeff_delta[i, j], self.coeff_epsilon[i, j])

    def qq(self, mode: int = 0) -> NoiseTerm:
        """Position variance of ``mode``."""
        return self.entry(mode, mode)

    # views

    def at(self, noise: NoiseModel) -> np.ndarray:
        d = np.array(self.coeff_delta.tolist(), dtype=float)
        e = np.array(self.coeff_epsilon.tolist(), dtype=float)
        return d * noise.delta + e * noise.epsilon

    def as_expr(self) -> sp.ImmutableMatrix:
        return sp.ImmutableMatrix(self.coeff_delta * DELTA + self.coeff_epsilon * EPSILON)

    def is_psd(self, noise: NoiseModel, tol: float = settings.FLOAT_TOL) -> bool:
        return bool(np.linalg.eigvalsh(self.at(noise)).min() >= -tol)

    def __str__(self) -> str:
        return sp.sstr(self.as_expr().tolist())


def symplectic_form(n: int) -> np.ndarray:
    """Ω for n modes in (q..., p...) ordering."""
    return np.block(
        [
            [np.zeros((n, n)), np.identity(n)],
            [-np.identity(n), np.zeros((n, n))],
        ]
    )


@dataclass(frozen=True)
class SymplecticMap:
    """Linear phase-space action of a Gaussian unitary, kept exact."""

    entries: sp.ImmutableMatrix

    def __post_init__(self):
        object.__setattr__(self, "entries", _as_rational_matrix(self.entries))
        rows, cols = self.entries.shape
        require(rows == cols and rows % 2 == 0, "symplectic map must be square with even dimension", shape=self.entries.shape)
        require(self.is_symplectic(), "matrix does not preserve the symplectic form", entries=str(self.entries.tolist()))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def numeric(self) -> np.ndarray:
        return np.array(self.entries.tolist(), dtype=float)

    def is_symplectic(self, tol: float = settings.FLOAT_TOL) -> bool:
        s = self.numeric()
        omega = symplectic_form(self.dim // 2)
        return bool(np.allclose(s @ omega @ s.T, omega, rtol=0.0, atol=tol))

    def __matmul__(self, other: "SymplecticMap") -> "SymplecticMap":
        require(self.dim == other.dim, "dimension mismatch", left=self.dim, right=other.dim)
        return SymplecticMap(self.entries * other.entries)
