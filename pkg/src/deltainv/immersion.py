"""Gradient-graph immersions realizing a prescribed cubic tensor.

Any fully symmetric a_{ABC} arises as the second fundamental form of an
explicit Lagrangian immersion of a neighborhood of the origin into C^n:
take the cubic potential f(x) = (1/6) sum a_{ABC} x_A x_B x_C and map

    F(x) = (x_1 + i f_{x_1}, ..., x_n + i f_{x_n}),

identified with R^2n as (x, grad f).  The induced metric is
g = I + (Hess f)^2, the image is Lagrangian for the standard complex
structure J(u, v) = (-v, u), and the pairing of the normal part of the
second derivatives of F with J F_* e_C recovers f_{x_A x_B x_C} = a_{ABC}
at every point where the metric is nonsingular.

This module recomputes that second fundamental form by independent
numerical differential geometry (metric, Christoffel symbols, tangential
projection) so the identity can be checked rather than assumed.  All
derivatives are exact polynomial expressions; an optional finite-difference
path re-derives them from evaluations of F alone.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, SingularMetric
from .tensors import CubicForm

FD_STEP = 1e-4
ROUNDTRIP_COND_LIMIT = 1e6
SECOND_FORM_COND_LIMIT = 1e12


@dataclass(frozen=True)
class CubicPotential:
    """The cubic polynomial f(x) = (1/6) sum a_{ABC} x_A x_B x_C."""

    n: int
    coefficients: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.coefficients, dtype=float)
        if arr.shape != (self.n, self.n, self.n):
            raise DimensionMismatch(
                f"coefficients must be ({self.n},)*3, got {arr.shape}"
            )
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "coefficients", arr)

    def value(self, x) -> float:
        x = self._point(x)
        return float(np.einsum("abc,a,b,c->", self.coefficients, x, x, x)) / 6.0

    def gradient(self, x) -> np.ndarray:
        x = self._point(x)
        return 0.5 * np.einsum("jbc,b,c->j", self.coefficients, x, x)

    def hessian(self, x) -> np.ndarray:
        x = self._point(x)
        return self.coefficients @ x

    def third_derivatives(self) -> np.ndarray:
        """Constant third partials; exactly the coefficient tensor."""
        return self.coefficients.copy()

    def _point(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n,):
            raise DimensionMismatch(f"point must have shape ({self.n},), got {x.shape}")
        return x


def potential_from_tensor(a: CubicForm) -> CubicPotential:
    """Potential whose third partials reproduce the tensor exactly."""
    return CubicPotential(a.n, a.dense())


@dataclass(frozen=True)
class ImmersionPoint:
    """The immersion data at one point: position, tangents, induced metric."""

    x: np.ndarray
    position: np.ndarray      # F(x) in R^2n, ordered (x, grad f)
    tangents: np.ndarray      # (2n, n), column A is F_* e_A
    metric: np.ndarray        # (n, n), g = I + Hess^2


def _apply_j(vectors: np.ndarray) -> np.ndarray:
    """The standard complex structure (u, v) -> (-v, u), columnwise."""
    n = vectors.shape[0] // 2
    return np.vstack([-vectors[n:], vectors[:n]])


def immerse(f: CubicPotential, x) -> ImmersionPoint:
    x = f._point(x)
    hess = f.hessian(x)
    n = f.n
    tangents = np.vstack([np.eye(n), hess])
    metric = np.eye(n) + hess @ hess
    return ImmersionPoint(
        x=x,
        position=np.concatenate([x, f.gradient(x)]),
        tangents=tangents,
        metric=metric,
    )


def lagrangian_check(f: CubicPotential, x) -> float:
    """Largest pairing of a tangent with the J-image of another tangent.

    Identically zero for gradient graphs; the numeric value guards the
    implementation, not the mathematics.
    """
    point = immerse(f, x)
    jt = _apply_j(point.tangents)
    return float(np.max(np.abs(point.tangents.T @ jt)))


# ---------------------------------------------------------------------------
# Derivatives of F, exact and finite-difference
# ---------------------------------------------------------------------------


def _exact_f_derivatives(f: CubicPotential, x):
    """(tangents (2n, n), second derivatives (2n, n, n)) from polynomials."""
    n = f.n
    hess = f.hessian(x)
    tangents = np.vstack([np.eye(n), hess])
    second = np.zeros((2 * n, n, n))
    second[n:] = f.coefficients  # f_{x_j x_A x_B} in slot j
    return tangents, second


def _position(f: CubicPotential, x):
    return np.concatenate([x, f.gradient(x)])


def _richardson_tangents(f: CubicPotential, x, step: float):
    n = f.n
    out = np.zeros((2 * n, n))
    for a in range(n):
        e = np.zeros(n)
        e[a] = 1.0

        def central(h):
            return (_position(f, x + h * e) - _position(f, x - h * e)) / (2 * h)

        out[:, a] = (4.0 * central(step / 2) - central(step)) / 3.0
    return out


def _richardson_second(f: CubicPotential, x, step: float):
    n = f.n
    out = np.zeros((2 * n, n, n))

    def second_aa(a, h):
        e = np.zeros(n)
        e[a] = h
        return (_position(f, x + e) - 2.0 * _position(f, x) + _position(f, x - e)) / h**2

    def second_ab(a, b, h):
        ea = np.zeros(n)
        ea[a] = h
        eb = np.zeros(n)
        eb[b] = h
        return (
            _position(f, x + ea + eb)
            - _position(f, x + ea - eb)
            - _position(f, x - ea + eb)
            + _position(f, x - ea - eb)
        ) / (4 * h**2)

    for a in range(n):
        val = (4.0 * second_aa(a, step / 2) - second_aa(a, step)) / 3.0
        out[:, a, a] = val
        for b in range(a + 1, n):
            val = (4.0 * second_ab(a, b, step / 2) - second_ab(a, b, step)) / 3.0
            out[:, a, b] = val
            out[:, b, a] = val
    return out


def _metric_derivative(f: CubicPotential, x):
    """dg[C, A, B] = sum_j (f_{jAC} hess_{jB} + hess_{jA} f_{jBC}), exact."""
    hess = f.hessian(x)
    T = f.coefficients
    first = np.einsum("jac,jb->cab", T, hess)
    return first + first.transpose(0, 2, 1)


def _fd_metric_derivative(f: CubicPotential, x, step: float):
    n = f.n

    def metric_at(y):
        hess = f.hessian(y)
        return np.eye(n) + hess @ hess

    dg = np.zeros((n, n, n))
    for c in range(n):
        e = np.zeros(n)
        e[c] = 1.0

        def central(h):
            return (metric_at(x + h * e) - metric_at(x - h * e)) / (2 * h)

        dg[c] = (4.0 * central(step / 2) - central(step)) / 3.0
    return dg


def second_fundamental_form_numeric(
    f: CubicPotential, x, fd: bool = False, step: float = FD_STEP
) -> np.ndarray:
    """Recover <h(e_A, e_B), J F_* e_C> by the full geometric pipeline.

    Computes second derivatives of F, removes the tangential part with the
    Christoffel symbols of the induced metric, and pairs the normal rest
    with J F_* e_C.  The components refer to the coordinate frame F_* e_C,
    which is orthonormal only where the Hessian of f vanishes (in
    particular at the origin).

    With ``fd=True`` every derivative is taken by Richardson-extrapolated
    central differences of F instead of the exact polynomial formulas.
    """
    x = f._point(x)
    if fd:
        tangents = _richardson_tangents(f, x, step)
        second = _richardson_second(f, x, step)
        metric = tangents.T @ tangents
        dg = _fd_metric_derivative(f, x, step)
    else:
        tangents, second = _exact_f_derivatives(f, x)
        metric = np.eye(f.n) + f.hessian(x) @ f.hessian(x)
        dg = _metric_derivative(f, x)

    cond = float(np.linalg.cond(metric))
    if not np.isfinite(cond) or cond > SECOND_FORM_COND_LIMIT:
        raise SingularMetric(f"induced metric condition number {cond:.3e}")
    ginv = np.linalg.inv(metric)

    # Gamma^E_{AB} = (1/2) g^{ED} (dg[A,D,B] + dg[B,D,A] - dg[D,A,B])
    brackets = 0.5 * (
        dg.transpose(1, 0, 2) + dg.transpose(2, 0, 1) - dg
    )  # indexed [D, A, B] after: brackets[d, a, b]
    gamma = np.einsum("ed,dab->eab", ginv, brackets)

    tangential = np.einsum("ie,eab->iab", tangents, gamma)
    normal = second - tangential
    jt = _apply_j(tangents)
    return np.einsum("iab,ic->abc", normal, jt)


def lemma1_roundtrip(a: CubicForm, x=None, fd: bool = False) -> float:
    """Largest deviation between the recovered form and the target tensor.

    Zero in exact arithmetic at every point; the contract is 1e-8 at the
    origin and 1e-6 on the ball of radius 0.25 for moderate tensors.
    Raises SingularMetric when the induced metric is too ill-conditioned
    for the comparison to be meaningful.
    """
    f = potential_from_tensor(a)
    x = np.zeros(a.n) if x is None else f._point(x)
    metric = np.eye(a.n) + f.hessian(x) @ f.hessian(x)
    cond = float(np.linalg.cond(metric))
    if not np.isfinite(cond) or cond > ROUNDTRIP_COND_LIMIT:
        raise SingularMetric(f"induced metric condition number {cond:.3e}")
    recovered = second_fundamental_form_numeric(f, x, fd=fd)
    return float(np.max(np.abs(recovered - a.dense_view)))
