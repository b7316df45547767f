"""Floating-point oracles: finite-difference application of operators.

Everything here works on numpy arrays of sample points and never looks at the
symbolic composition rules, so agreement with the exact kernel is evidence.
"""

from __future__ import annotations

import logging
from fractions import Fraction
from math import comb
from typing import Callable, Mapping, Union

import numpy as np

from schrodinger import DEFAULT_SEED, SAMPLE_VALUES
from schrodinger.diffop import DiffOp
from schrodinger.ring import ExpArg, Monomial, RingElement

Field = Callable[[np.ndarray, np.ndarray], np.ndarray]
NumericOp = Callable[[Field], Field]
Env = Mapping[str, Fraction]


def _monomial_value(mono: Monomial, env: Env) -> float:
    value = 1.0
    for name, exp in mono.powers:
        if name not in env:
            raise KeyError(f"no sample value for symbol '{name}'")
        value *= float(Fraction(env[name]) ** exp)
    return value


def evaluate(element: RingElement, env: Env, t: np.ndarray, x: np.ndarray) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    x = np.asarray(x, dtype=float)
    total = np.zeros(np.broadcast(t, x).shape)
    for term in element.terms:
        exponent = np.zeros_like(total)
        for coeff, mono, base in term.exp.entries:
            rate = float(coeff) * _monomial_value(mono, env)
            exponent = exponent + rate * (t if base == "t" else x**2)
        scale = float(term.coeff) * _monomial_value(term.mono, env)
        total = total + scale * t**term.tdeg * x**term.xdeg * np.exp(exponent)
    return total


def stencil(order: int, h: float) -> list[tuple[float, float]]:
    """Central (offset, weight) pairs for the order-th derivative, second-order accurate."""
    return [
        ((order / 2 - k) * h, (-1) ** k * comb(order, k) / h**order)
        for k in range(order + 1)
    ]


def numeric_op(P: DiffOp, env: Env = SAMPLE_VALUES, h: float = 1e-3) -> NumericOp:
    def act(f: Field) -> Field:
        def g(t, x):
            total = 0.0
            for dt, dx, coeff in P.entries:
                derivative = 0.0
                for st, wt in stencil(dt, h):
                    for sx, wx in stencil(dx, h):
                        derivative = derivative + wt * wx * f(t + st, x + sx)
                total = total + evaluate(coeff, env, t, x) * derivative
            return total

        return g

    return act


def numeric_compose(*ops: Union[DiffOp, NumericOp], env: Env = SAMPLE_VALUES, h: float = 1e-3) -> NumericOp:
    """Right-to-left nesting of operators, each applied by finite differences."""
    resolved = [numeric_op(op, env, h) if isinstance(op, DiffOp) else op for op in ops]

    def act(f: Field) -> Field:
        for op in reversed(resolved):
            f = op(f)
        return f

    return act


def numeric_bracket(A: DiffOp, B: DiffOp, env: Env = SAMPLE_VALUES, h: float = 1e-3) -> NumericOp:
    ab = numeric_compose(A, B, env=env, h=h)
    ba = numeric_compose(B, A, env=env, h=h)

    def act(f: Field) -> Field:
        return lambda t, x: ab(f)(t, x) - ba(f)(t, x)

    return act


def sample_points(samples: int, seed: int = DEFAULT_SEED) -> tuple[np.ndarray, np.ndarray]:
    rng = np.random.default_rng(seed)
    return rng.uniform(-1.0, 1.0, samples), rng.uniform(-2.0, 2.0, samples)


def residual(
    psi: RingElement,
    omega: DiffOp,
    samples: int = 20,
    seed: int = DEFAULT_SEED,
    env: Env = SAMPLE_VALUES,
    h: float = 1e-3,
) -> float:
    """max |omega psi| / max(|psi|, 1) over random points with |t| <= 1, |x| <= 2."""
    t, x = sample_points(samples, seed)

    def f(tt, xx):
        return evaluate(psi, env, tt, xx)

    values = np.abs(numeric_op(omega, env, h)(f)(t, x)) / np.maximum(np.abs(f(t, x)), 1.0)
    worst = float(np.max(values))
    logging.debug(f"[numeric] residual over {samples} samples (seed {seed}): {worst:.3e}")
    return worst


def trial_functions() -> list[RingElement]:
    """t^i x^j exp(x^2/8) for i, j in 0..2."""
    gauss = RingElement.exponential(ExpArg.build([(Fraction(1, 8), Monomial(), "x2")]))
    return [
        RingElement.var("t", i) * RingElement.var("x", j) * gauss
        for i in range(3)
        for j in range(3)
    ]


def spot_check(
    lhs: Union[DiffOp, NumericOp],
    rhs: Union[DiffOp, NumericOp],
    samples: int = 20,
    seed: int = DEFAULT_SEED,
    env: Env = SAMPLE_VALUES,
    h: float = 1e-2,
) -> float:
    """Largest relative disagreement of two operators on the test functions."""
    left = numeric_op(lhs, env, h) if isinstance(lhs, DiffOp) else lhs
    right = numeric_op(rhs, env, h) if isinstance(rhs, DiffOp) else rhs
    t, x = sample_points(samples, seed)
    worst = 0.0
    for psi in trial_functions():

        def f(tt, xx, psi=psi):
            return evaluate(psi, env, tt, xx)

        a = left(f)(t, x)
        b = right(f)(t, x)
        scale = np.maximum(np.maximum(np.abs(a), np.abs(b)), 1.0)
        worst = max(worst, float(np.max(np.abs(a - b) / scale)))
    logging.debug(f"[numeric] spot check disagreement {worst:.3e}")
    return worst
