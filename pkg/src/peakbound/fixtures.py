"""Built-in example models.

Parameterized fixtures are generated by functions; a JSON copy of each at its
default parameters ships in ``peakbound/models/``.
"""
from __future__ import annotations

from importlib import resources
from typing import Callable, Dict

from .io import Model, parse_model


def identity2() -> Model:
    return Model(family=[[[1.0, 0.0], [0.0, 1.0]]], name="identity2",
                 description="identity; every line is invariant")


def shear() -> Model:
    return Model(family=[[[1.0, 1.0], [0.0, 1.0]]], name="shear",
                 description="unipotent shear; the first axis is invariant and powers grow linearly")


def mixtures_sym_half() -> Model:
    return Model(base=[[0.0, 0.5], [0.5, 0.0]], mixtures=True, name="mixtures_sym_half",
                 description="mixtures of a symmetric contraction with zero diagonal",
                 perturbation=[[0.3, -0.2], [0.1, 0.25]])


def rot2() -> Model:
    return Model(family=[[[0.0, -2.0], [2.0, 0.0]]], name="rot2", norm="l2",
                 description="quarter turn scaled by 2; every nonzero state doubles each step")


def shear_rot() -> Model:
    return Model(family=[[[1.0, 1.0], [0.0, 1.0]], [[0.0, -1.0], [1.0, 0.0]]], name="shear_rot",
                 description="shear together with a quarter turn; quasi-controllable and unstable",
                 perturbation=[[[0.0, 0.0], [0.0, -1.0]], [[0.0, 0.0], [0.0, 0.0]]])


def e0(a: float = 0.5, eps: float = 0.1) -> Model:
    """Two-state loop closed with the deadbeat gain ``(-2a, -(a^2 + eps^2)/eps)``.

    The closed-loop matrix is nilpotent and has an entry of size ``a^2/eps``.
    """
    if eps == 0:
        raise ValueError("eps must be nonzero")
    b = [-2.0 * a, -(a * a + eps * eps) / eps]
    A = [[a, eps], [eps, a]]
    closed = [[A[0][0] + b[0], A[0][1]], [A[1][0] + b[1], A[1][1]]]
    return Model(family=[closed], name="E0", parameters={"a": a, "eps": eps, "b": b},
                 description="deadbeat closed loop of [[a, eps], [eps, a]] fed back through the first state")


def limexp(m: int = 2) -> Model:
    r = 1.0 - 1.0 / m
    return Model(family=[[[r, 1.0], [0.0, r]]], name="limexp", parameters={"m": m},
                 description="[[1-1/m, 1], [0, 1-1/m]]; stable for each m, peak grows with m")


def unbounded(m: int = 2) -> Model:
    r = 1.0 - 1.0 / (m * m)
    return Model(family=[[[r, 1.0 / m], [0.0, r]]], name="unbounded", parameters={"m": m},
                 description="[[1-1/m^2, 1/m], [0, 1-1/m^2]]; stable for each m, peaks not uniformly bounded")


def circle_demo() -> Model:
    return Model(base=[[0.0, 0.0], [0.0, 0.0]], feedback={"b": [1.0, 0.0], "c": [0.5, 0.0], "gamma": 1.0},
                 name="circle_demo", description="feedback pair around the zero matrix")


BUILDERS: Dict[str, Callable[..., Model]] = {
    "identity2": identity2,
    "shear": shear,
    "mixtures_sym_half": mixtures_sym_half,
    "rot2": rot2,
    "shear_rot": shear_rot,
    "E0": e0,
    "limexp": limexp,
    "unbounded": unbounded,
    "circle_demo": circle_demo,
}


def names() -> list:
    return sorted(BUILDERS)


def build(name: str, **params) -> Model:
    try:
        fn = BUILDERS[name]
    except KeyError:
        raise KeyError(f"unknown fixture {name!r}; available: {', '.join(names())}") from None
    return fn(**{k: v for k, v in params.items() if v is not None})


def shipped(name: str) -> Model:
    """The JSON copy bundled with the package."""
    text = resources.files("peakbound").joinpath("models", f"{name}.json").read_text("utf-8")
    return parse_model(text)
