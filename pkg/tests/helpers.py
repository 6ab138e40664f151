"""Shared constructors for randomized kernels and point sets."""

import numpy as np

from spherecov import (
    GegenbauerBasis,
    make_ps_kernel,
    make_sequence,
    make_st_kernel,
)
from spherecov.spacetime import (
    exponential,
    gaussian,
    point_mass_at_zero,
    stable,
    triangle_sinc,
)


def random_sequence(rng, basis, n_max):
    """A unit-variance SchoenbergSequence with strictly positive weights."""
    raw = rng.uniform(0.05, 1.0, n_max + 1)
    return make_sequence(raw / raw.sum(), basis)


def random_charfn(rng):
    pick = rng.integers(0, 5)
    if pick == 0:
        return gaussian(float(rng.uniform(0.2, 2.0)))
    if pick == 1:
        return exponential(float(rng.uniform(0.2, 2.0)))
    if pick == 2:
        return stable(float(rng.uniform(0.2, 2.0)), float(rng.uniform(0.3, 2.0)))
    if pick == 3:
        return triangle_sinc(float(rng.uniform(0.2, 3.0)))
    return point_mass_at_zero()


def random_st_kernel(rng, basis, n_max):
    raw = rng.uniform(0.05, 1.0, n_max + 1)
    weights = raw / raw.sum()
    return make_st_kernel([(w, random_charfn(rng)) for w in weights], basis)


def random_ps_kernel(rng, basis1, basis2, m_max, n_max):
    raw = rng.uniform(0.05, 1.0, (m_max + 1, n_max + 1))
    return make_ps_kernel(raw / raw.sum(), basis1, basis2)


def random_rank_one_matrix(rng, m_max, n_max):
    b = rng.uniform(0.05, 1.0, m_max + 1)
    c = rng.uniform(0.05, 1.0, n_max + 1)
    matrix = np.outer(b, c)
    return matrix / matrix.sum()


def random_higher_rank_matrix(rng, m_max, n_max):
    """A matrix with a 2x2 minor bounded away from zero after normalization."""
    matrix = random_rank_one_matrix(rng, m_max, n_max)
    i, j = rng.integers(0, m_max), rng.integers(0, n_max)
    matrix[i, j] += matrix.max() * float(rng.uniform(0.5, 1.0))
    return matrix / matrix.sum()


def basis_for_dimension(d):
    return GegenbauerBasis.from_dimension(d)
