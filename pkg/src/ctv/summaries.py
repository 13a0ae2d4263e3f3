"""Module summaries: per-output timing contracts over a module's ports.

A summary clause says, per output port, which inputs must carry equal
liveness bits (``ct``) and which must additionally be value-equal in both
runs (``pub``) for the output's liveness bits to provably agree.  A separate
row records when the output's *value* is provably equal given public inputs
(and, for registered outputs, flushed state).  Verification and dependency
analysis substitute these clauses for instantiated module bodies.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class SummaryClause:
    """Timing contract for one output port.

    ``ct_inputs`` always lists every input with a dependency path to the
    output; ``pub_inputs`` is the minimal subset that must also be public.
    ``provable`` is False when no premise over the ports suffices.
    """

    ct_inputs: tuple[str, ...]
    pub_inputs: tuple[str, ...]
    provable: bool = True
    gives_pub: bool = False
    pub_premise_inputs: tuple[str, ...] = ()
    pub_requires_flush: bool = False

    def render(self, output: str) -> str:
        parts = [f"ct({p})" for p in self.ct_inputs if p not in self.pub_inputs]
        parts += [f"pub({p})" for p in self.pub_inputs]
        premise = " & ".join(parts) if parts else "true"
        conclusion = f"ct({output})"
        if self.gives_pub and set(self.pub_premise_inputs) <= set(self.pub_inputs):
            conclusion += f" & pub({output})"
        if not self.provable:
            return f"no premise over ports proves ct({output})"
        return f"{premise} => {conclusion}"


@dataclass
class ModuleSummary:
    """All output clauses of one module."""

    module: str
    clauses: dict[str, SummaryClause] = field(default_factory=dict)

    def render(self) -> list[str]:
        return [self.clauses[o].render(o) for o in sorted(self.clauses)]
