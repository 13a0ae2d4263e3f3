"""Bundled example circuits with their source/sink annotations.

Five designs ship with the package:

``lookup``        one-cycle lookup table; constant-time with no assumptions.
``sbox4``         four instances of a masked lookup module; exercises the
                  modular (summary-based) analysis path.
``pipeline``      fetch/decode fragment with a hazard stall; variable-time
                  until the program counter is assumed public.
``pipeline_mod``  the same pipeline with the decode stage factored into a
                  child module; flattens to identical net names.
``mixer``         stall-gated accumulator whose branch reads balanced
                  operands; verifies without making the branch selector
                  public.
"""

from __future__ import annotations

from importlib import resources

from ..ast import Annotations, Program
from ..elaborate import ElaboratedDesign, elaborate
from ..parser import parse_annotations, parse_program

FIXTURES = ("lookup", "sbox4", "pipeline", "pipeline_mod", "mixer")


def fixture_source(name: str) -> str:
    if name not in FIXTURES:
        raise KeyError(f"unknown fixture {name!r}; have {FIXTURES}")
    return resources.files(__name__).joinpath(f"{name}.v").read_text()


def fixture_annotation_text(name: str) -> str:
    if name not in FIXTURES:
        raise KeyError(f"unknown fixture {name!r}; have {FIXTURES}")
    return resources.files(__name__).joinpath(f"{name}.ann").read_text()


def fixture_program(name: str) -> Program:
    return parse_program(fixture_source(name))


def load_fixture(name: str, inline: bool = True) -> tuple[ElaboratedDesign, Annotations]:
    design = elaborate(fixture_program(name), inline=inline)
    ann = parse_annotations(fixture_annotation_text(name))
    return design, ann
