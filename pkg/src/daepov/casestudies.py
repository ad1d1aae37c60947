"""Bundled example systems used by the docs, CLI configs, and test suite."""

from __future__ import annotations

from .simulate import GaussianWhite, SourceSignalSpec
from .sysmodel import ALGEBRAIC, DIFFERENCE, Equation, LtiDaeSystem


def two_tank() -> tuple[LtiDaeSystem, list[SourceSignalSpec]]:
    """Two non-interacting tanks in series driven by an inflow.

    Levels respond to the inflow with first-order lags:
    ``h1[k] = 0.659 h1[k-1] + 0.6815 F0[k-1]`` and
    ``h2[k] = 0.7168 h2[k-1] + 0.1772 h1[k-1]``. The inflow ``F0`` is the
    only pure source.
    """
    system = LtiDaeSystem(
        variables=("F0", "h1", "h2"),
        equations=(
            Equation(DIFFERENCE, output=1, terms=((1, 0, 1.0), (1, 1, -0.659), (0, 1, -0.6815))),
            Equation(DIFFERENCE, output=2, terms=((2, 0, 1.0), (2, 1, -0.7168), (1, 1, -0.1772))),
        ),
    )
    sources = [SourceSignalSpec(variable=0, signal=GaussianWhite(0.0, 1.0))]
    return system, sources


def rc_circuit() -> tuple[LtiDaeSystem, list[SourceSignalSpec]]:
    """Series RC circuit (R=50, C=1, dt=1) driven by a voltage source.

    Discrete dynamics ``X[k] = 0.9802 X[k-1] + 0.0198 U[k-1]`` for the
    capacitor voltage, with instantaneous laws ``V = U - X`` (resistor drop)
    and ``i = 0.02 V``. The source voltage ``U`` drives everything, but it is
    algebraically tied to ``V`` and ``i``, so any of the three is a
    plausible source from data alone.
    """
    system = LtiDaeSystem(
        variables=("U", "V", "X", "i"),
        equations=(
            Equation(DIFFERENCE, output=2, terms=((2, 0, 1.0), (2, 1, -0.9802), (0, 1, -0.0198))),
            Equation(ALGEBRAIC, output=1, terms=((0, 0, 1.0), (1, 0, -1.0), (2, 0, -1.0))),
            Equation(ALGEBRAIC, output=3, terms=((3, 0, 1.0), (1, 0, -0.02))),
        ),
    )
    sources = [SourceSignalSpec(variable=0, signal=GaussianWhite(0.0, 1.0))]
    return system, sources


def feedback_example(gain: float = 2.0) -> tuple[LtiDaeSystem, list[SourceSignalSpec]]:
    """Two first-order loops plus a proportional feedback law on the first input.

    ``y1[k] = 0.5 y1[k-1] + 2 u1[k-1]``,
    ``y2[k] = 0.8 y2[k-1] + 1.2 u1[k-1] + u2[k-1]``, and
    ``u1[k] = gain * (r1[k] - y1[k])``. The reference ``r1`` and the second
    input ``u2`` are the pure sources; ``u1`` is algebraically tied to ``r1``.

    With the textbook ``gain=2`` the closed loop is unstable (pole -3.5), so
    that variant is only useful for the noise-free rank oracle; pass a gain
    below 0.75 to get a simulatable system with the same admissibility
    structure.
    """
    system = LtiDaeSystem(
        variables=("y1", "y2", "u1", "u2", "r1"),
        equations=(
            Equation(DIFFERENCE, output=0, terms=((0, 0, 1.0), (0, 1, -0.5), (2, 1, -2.0))),
            Equation(
                DIFFERENCE,
                output=1,
                terms=((1, 0, 1.0), (1, 1, -0.8), (2, 1, -1.2), (3, 1, -1.0)),
            ),
            Equation(
                ALGEBRAIC,
                output=2,
                terms=((2, 0, 1.0), (4, 0, -float(gain)), (0, 0, float(gain))),
            ),
        ),
    )
    sources = [
        SourceSignalSpec(variable=3, signal=GaussianWhite(0.0, 1.0)),
        SourceSignalSpec(variable=4, signal=GaussianWhite(0.0, 1.0)),
    ]
    return system, sources
