"""Schoenberg coefficient sequences on the d-sphere.

A nonnegative summable weight sequence (a_n) defines the isotropic kernel

    k(x) = c · Σ_n a_n P̃_n^λ(x),      x = ⟨p, q⟩ ∈ [−1, 1],

which is exactly the class of isotropic positive definite functions on the
sphere. This module synthesizes kernels from stored (truncated) sequences,
recovers coefficients of black-box functions by Gauss quadrature, and
certifies positive definiteness with a coefficient check backed by an
independent Gram-eigenvalue oracle.
"""

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DomainError,
    EvaluationError,
    NegativeCoefficientError,
    NormalizationError,
    ZeroMassError,
)
from .gegenbauer import GegenbauerBasis, eval_sequence, norm_squared, quadrature

NORMALIZATION_TOL = 1e-12

DEFAULT_COEFF_TOL = 1e-8
DEFAULT_GRAM_TRIALS = 5
CERTIFY_GRAM_POINTS = 25

PD = "PD"
NOT_PD = "NotPD"
INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class SchoenbergSequence:
    """Truncated sequence (a_0..a_N) with Σ a_n = 1 and overall scale c.

    Construction through `make_sequence` normalizes the mass into `scale_c`,
    so the stored coefficients always form a convex combination.
    """

    coeffs: np.ndarray
    scale_c: float
    basis: GegenbauerBasis

    def __post_init__(self):
        arr = np.array(self.coeffs, dtype=float, copy=True)
        if arr.ndim != 1 or arr.size == 0:
            raise DomainError("coeffs must be a nonempty 1-D array")
        if not np.all(np.isfinite(arr)):
            raise DomainError("coeffs must be finite")
        _check_nonnegative(arr)
        if abs(arr.sum() - 1.0) > NORMALIZATION_TOL:
            raise NormalizationError(
                f"stored coefficients must sum to 1 within {NORMALIZATION_TOL}, got {arr.sum()!r}"
            )
        if not (math.isfinite(self.scale_c) and self.scale_c > 0):
            raise DomainError(f"scale_c must be a positive real, got {self.scale_c}")
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)

    @property
    def truncation(self) -> int:
        """Largest retained degree N."""
        return self.coeffs.size - 1


def _check_nonnegative(arr: np.ndarray):
    flat = arr.reshape(-1)
    bad = np.flatnonzero(flat < 0)
    if bad.size:
        i = int(bad[0])
        index = i if arr.ndim == 1 else np.unravel_index(i, arr.shape)
        raise NegativeCoefficientError(index, float(flat[i]))


def make_sequence(coeffs, basis: GegenbauerBasis, normalize: bool = False) -> SchoenbergSequence:
    """Validate a coefficient vector into a SchoenbergSequence.

    With `normalize` the vector is rescaled to unit mass and the original
    total is stored as `scale_c`; otherwise the input must already sum to 1.
    """
    arr = np.asarray(coeffs, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise DomainError("coeffs must be a nonempty 1-D array")
    if not np.all(np.isfinite(arr)):
        raise DomainError("coeffs must be finite")
    _check_nonnegative(arr)
    total = float(arr.sum())
    if total == 0.0:
        raise ZeroMassError("all coefficients are zero")
    if normalize:
        return SchoenbergSequence(coeffs=arr / total, scale_c=total, basis=basis)
    return SchoenbergSequence(coeffs=arr, scale_c=1.0, basis=basis)


def kernel_eval(seq: SchoenbergSequence, x):
    """k(x) = c · Σ_n a_n P̃_n(x). Scalar in, float out; arrays broadcast."""
    table = eval_sequence(seq.basis, seq.truncation, x)
    value = seq.scale_c * np.tensordot(seq.coeffs, table, axes=1)
    return float(value) if np.ndim(value) == 0 else value


def recover_coefficients(g, basis: GegenbauerBasis, n_max: int, quad_order: int) -> np.ndarray:
    """Fourier-Gegenbauer coefficients â_n of g for n = 0..n_max.

    â_n = (1/h_n) Σ_i w_i g(x_i) P̃_n(x_i) with a Gauss rule of the given
    order; exact for polynomial g of degree ≤ n_max when
    quad_order ≥ n_max + 1.
    """
    if quad_order < n_max + 1:
        raise DomainError(f"quad_order must be at least n_max+1 = {n_max + 1}, got {quad_order}")
    rule = quadrature(basis.lam, quad_order)
    values = np.empty(rule.order)
    for i, node in enumerate(rule.nodes):
        try:
            values[i] = g(node)
        except Exception as exc:  # noqa: BLE001 - attribute the failing node
            raise EvaluationError(node, exc) from exc
    if not np.all(np.isfinite(values)):
        bad = rule.nodes[~np.isfinite(values)][0]
        raise EvaluationError(bad, "non-finite function value")
    table = eval_sequence(basis, n_max, rule.nodes)
    norms = np.array([norm_squared(basis, n) for n in range(n_max + 1)])
    return table @ (rule.weights * values) / norms


@dataclass(frozen=True)
class PDCertificate:
    """Outcome of positive-definiteness certification.

    `witness` is None for PD/Inconclusive verdicts; for NotPD it holds either
    {"kind": "coefficient", "index", "value"} or
    {"kind": "eigenvalue", "gram_size", "eigenvalue", "seed", "trial"}.
    """

    verdict: str
    coefficients: np.ndarray
    min_coefficient: float
    min_coefficient_index: int
    tail_mass: float
    coeff_tol: float
    eig_tol: float
    gram_trials: int
    gram_points: int
    min_gram_eigenvalue: float | None
    witness: dict | None
    seed: int

    def to_dict(self) -> dict:
        """JSON-ready representation."""
        return {
            "verdict": self.verdict,
            "coefficients": [float(a) for a in self.coefficients],
            "min_coefficient": self.min_coefficient,
            "min_coefficient_index": self.min_coefficient_index,
            "tail_mass": self.tail_mass,
            "coeff_tol": self.coeff_tol,
            "eig_tol": self.eig_tol,
            "gram_trials": self.gram_trials,
            "gram_points": self.gram_points,
            "min_gram_eigenvalue": self.min_gram_eigenvalue,
            "witness": self.witness,
            "seed": self.seed,
        }


def certify(
    g,
    basis: GegenbauerBasis,
    n_max: int = 30,
    coeff_tol: float = DEFAULT_COEFF_TOL,
    eig_tol: float | None = None,
    gram_trials: int = DEFAULT_GRAM_TRIALS,
    seed: int = 0,
) -> PDCertificate:
    """Certify whether g is an isotropic positive definite function on S^d.

    A coefficient â_n < −coeff_tol or a Gram matrix on a random point set
    with an eigenvalue < −eig_tol yields NotPD with a concrete witness.
    Otherwise the verdict is PD when the recovered coefficient mass beyond
    degree n_max/2 is below coeff_tol (the truncation saw the whole
    function), else Inconclusive. `eig_tol` defaults to 1e−8 times the Gram
    dimension. Trial point-set seeds are derived from `seed` through
    numpy's SeedSequence, so results are reproducible.
    """
    # fields depends on this module for Gram dispatch, hence the local import.
    from .fields import geodesic_cosine, min_eigenvalue, uniform_sphere_points

    if n_max < 0:
        raise DomainError("n_max must be nonnegative")
    if coeff_tol <= 0:
        raise DomainError("coeff_tol must be positive")
    if eig_tol is None:
        eig_tol = 1e-8 * CERTIFY_GRAM_POINTS
    if eig_tol <= 0:
        raise DomainError("eig_tol must be positive")

    quad_order = max(64, 2 * (n_max + 1))
    ahat = recover_coefficients(g, basis, n_max, quad_order)
    i_min = int(np.argmin(ahat))
    a_min = float(ahat[i_min])
    tail = float(np.sum(np.abs(ahat[np.arange(ahat.size) > n_max / 2])))

    def _certificate(verdict, min_eig, witness):
        return PDCertificate(
            verdict=verdict,
            coefficients=ahat,
            min_coefficient=a_min,
            min_coefficient_index=i_min,
            tail_mass=tail,
            coeff_tol=coeff_tol,
            eig_tol=eig_tol,
            gram_trials=gram_trials,
            gram_points=CERTIFY_GRAM_POINTS,
            min_gram_eigenvalue=min_eig,
            witness=witness,
            seed=seed,
        )

    if a_min < -coeff_tol:
        return _certificate(NOT_PD, None, {"kind": "coefficient", "index": i_min, "value": a_min})

    trial_seeds = np.random.SeedSequence(seed).generate_state(max(gram_trials, 1))
    min_eig = math.inf
    for trial in range(gram_trials):
        trial_seed = int(trial_seeds[trial])
        pts = uniform_sphere_points(basis.dimension, CERTIFY_GRAM_POINTS, trial_seed)
        n = CERTIFY_GRAM_POINTS
        gmat = np.empty((n, n))
        for i in range(n):
            for j in range(i, n):
                c = geodesic_cosine(pts.points[i], pts.points[j])
                try:
                    gmat[i, j] = g(c)
                except Exception as exc:  # noqa: BLE001
                    raise EvaluationError(c, exc) from exc
                gmat[j, i] = gmat[i, j]
        eig = min_eigenvalue(gmat)
        min_eig = min(min_eig, eig)
        if eig < -eig_tol:
            witness = {
                "kind": "eigenvalue",
                "gram_size": n,
                "eigenvalue": eig,
                "seed": trial_seed,
                "trial": trial,
            }
            return _certificate(NOT_PD, eig, witness)

    reported_eig = None if gram_trials < 1 else min_eig
    if tail <= coeff_tol:
        return _certificate(PD, reported_eig, None)
    return _certificate(INCONCLUSIVE, reported_eig, None)


def multiquadric_kernel(delta: float, lam: float, x):
    """Closed form (1−δ)^{2λ} (1−2δx+δ²)^{−λ} of the multiquadric family."""
    x = np.asarray(x, dtype=float)
    value = (1.0 - delta) ** (2.0 * lam) / (1.0 - 2.0 * delta * x + delta * delta) ** lam
    return float(value) if value.ndim == 0 else value


def multiquadric_sequence(delta: float, basis: GegenbauerBasis, n_max: int) -> SchoenbergSequence:
    """Truncated multiquadric sequence a_n ∝ δ^n C_n^λ(1), renormalized.

    The synthesized kernel converges to `multiquadric_kernel` as n_max grows
    (geometric tail δ^{n_max}); the Gegenbauer generating function makes this
    family an analytic oracle for coefficient recovery. Requires λ > 0.
    """
    if not 0.0 < delta < 1.0:
        raise DomainError(f"delta must lie in (0, 1), got {delta}")
    lam = basis.lam
    if lam <= 0:
        raise DomainError("multiquadric sequence requires lam > 0 (d >= 2)")
    terms = np.empty(n_max + 1)
    terms[0] = 1.0
    for n in range(1, n_max + 1):
        terms[n] = terms[n - 1] * delta * (n + 2.0 * lam - 1.0) / n
    seq = make_sequence(terms, basis, normalize=True)
    return dataclasses.replace(seq, scale_c=1.0)
