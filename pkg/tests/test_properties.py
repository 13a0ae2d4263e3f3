from __future__ import annotations

import random
from dataclasses import replace

from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from ctv.ast import Annotations, AssumptionSet
from ctv.elaborate import elaborate
from ctv.fixtures import fixture_program, load_fixture
from ctv.parser import parse_program, pretty_print
from ctv.sim import initial_configuration, run_pair, step
from ctv.verify import color_equivalence, infer

COMMON = settings(max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow])


def permuted_design(name: str, seed: int):
    """Reparse a fixture with shuffled net declarations and process order."""
    rng = random.Random(seed)
    program = fixture_program(name)
    module = program.top_module
    nets = list(module.nets)
    processes = list(module.processes)
    rng.shuffle(nets)
    rng.shuffle(processes)
    shuffled = replace(module, nets=tuple(nets), processes=tuple(processes))
    text = pretty_print(replace(program, modules=(shuffled,)))
    return elaborate(parse_program(text))


@given(seed=st.integers(0, 10_000))
@COMMON
def test_fixpoint_confluence_under_declaration_permutation(seed):
    for name in ("pipeline", "mixer"):
        base_design, ann = load_fixture(name)
        base = infer(base_design, ann)
        permuted = infer(permuted_design(name, seed), ann)
        assert permuted.vartime_map == base.vartime_map
        assert permuted.secret_map == base.secret_map
        assert permuted.final_state.ct_set == base.final_state.ct_set
        assert permuted.final_state.pub_set == base.final_state.pub_set


@given(
    extra_public=st.sets(st.sampled_from(["IF_pc", "IF_inst", "ID_rt", "Stall"])),
    extra_flush=st.sets(st.sampled_from(["ID_instr", "EX_rt", "IF_inst"])),
)
@COMMON
def test_assumption_monotonicity(extra_public, extra_flush):
    design, ann = load_fixture("pipeline")
    base = infer(design, ann)
    richer = Annotations(
        sources=ann.sources,
        sinks=ann.sinks,
        assumptions=AssumptionSet(
            flush=frozenset(extra_flush), public=frozenset(extra_public)
        ),
    )
    grown = infer(design, richer)
    assert base.final_state.ct_set <= grown.final_state.ct_set
    assert base.final_state.pub_set <= grown.final_state.pub_set


def _streams(values, net, n):
    padded = list(values) + [0] * n
    return [{net: padded[i]} for i in range(n)]


@given(
    left=st.lists(st.integers(0, 3), max_size=32),
    right=st.lists(st.integers(0, 3), max_size=32),
    t=st.integers(1, 6),
)
@COMMON
def test_inline_and_modular_elaborations_are_bisimilar(left, right, t):
    program = fixture_program("pipeline_mod")
    inline = elaborate(program, inline=True)
    modular = elaborate(program, inline=False)
    original, ann = load_fixture("pipeline")
    n = 32
    args = (
        ann.sources,
        ann.sinks,
        t,
        n,
        _streams(left, "IF_pc", n),
        _streams(right, "IF_pc", n),
    )
    traces = [run_pair(d, *args) for d in (inline, modular, original)]
    shared = sorted(original.flat_tables.order)
    for a, b in ((traces[0], traces[1]), (traces[0], traces[2])):
        for ca, cb in zip(a.configs, b.configs):
            for net in shared:
                assert ca.store_l[net] == cb.store_l[net]
                assert ca.live_l[net] == cb.live_l[net]
                assert ca.store_r[net] == cb.store_r[net]
                assert ca.live_r[net] == cb.live_r[net]


@given(
    left=st.lists(st.integers(0, 3), max_size=10),
    right=st.lists(st.integers(0, 3), max_size=10),
    t=st.integers(1, 6),
)
@COMMON
def test_left_run_is_independent_of_right_run(left, right, t):
    design, ann = load_fixture("pipeline")
    n = 8
    ls = _streams(left, "IF_pc", n)
    rs = _streams(right, "IF_pc", n)
    paired = run_pair(design, ann.sources, ann.sinks, t, n, ls, rs)
    solo = run_pair(design, ann.sources, ann.sinks, t, n, ls, [dict(r) for r in ls])
    for cp, cs in zip(paired.configs, solo.configs):
        assert cp.store_l == cs.store_l
        assert cp.live_l == cs.live_l


@given(
    values=st.tuples(st.integers(0, 3), st.integers(0, 3)),
    flip=st.sampled_from(["IF_pc", "IF_inst", "ID_instr", "ID_rt", "Stall", "EX_rt"]),
    t=st.integers(1, 4),
)
@COMMON
def test_taint_monotonicity_within_a_cycle(values, flip, t):
    design, ann = load_fixture("pipeline")
    vl, vr = values
    cfg = initial_configuration(design, ann.sources, t, {"IF_pc": vl}, {"IF_pc": vr})
    cfg = step(cfg, design, {"IF_pc": vl}, {"IF_pc": vr})
    boosted_live = dict(cfg.live_l)
    boosted_live[flip] = True
    boosted = replace(cfg, live_l=boosted_live)
    base_next = step(cfg, design, {"IF_pc": vl}, {"IF_pc": vr})
    boosted_next = step(boosted, design, {"IF_pc": vl}, {"IF_pc": vr})
    for net in design.flat_tables.order:
        assert boosted_next.live_l[net] >= base_next.live_l[net]


@given(
    ins=st.lists(st.integers(0, 15), max_size=10),
    conds=st.lists(st.integers(0, 1), max_size=10),
    stalls=st.lists(st.integers(0, 1), max_size=10),
    t=st.integers(1, 6),
)
@COMMON
def test_color_equivalence_is_sound_on_the_simulator(ins, conds, stalls, t):
    design, ann = load_fixture("mixer")
    classes = color_equivalence(design.flat_tables, ann.sources)
    n = 8
    pad = lambda xs, hi: (list(xs) + [0] * n)[:n]
    streams = [
        {"in": a, "cond": c, "stall": s}
        for a, c, s in zip(pad(ins, 15), pad(conds, 1), pad(stalls, 1))
    ]
    trace = run_pair(
        design, ann.sources, ann.sinks, t, n, streams, [dict(r) for r in streams]
    )
    for cls in classes:
        members = sorted(cls)
        for cfg in trace.configs:
            for live in (cfg.live_l, cfg.live_r):
                assert len({live[m] for m in members}) == 1


def test_parse_print_parse_is_identity_on_permutations():
    for seed in range(5):
        design = permuted_design("pipeline", seed)
        text = pretty_print(design.program)
        assert parse_program(text) == design.program


def test_inline_and_modular_agree_on_every_fixture():
    """Both elaborations denote the same transition system (32 cycles)."""
    from ctv.fixtures import FIXTURES

    n = 32
    for name in FIXTURES:
        program = fixture_program(name)
        inline = elaborate(program, inline=True)
        modular = elaborate(program, inline=False)
        _, ann = load_fixture(name)
        inputs = inline.flat_tables.inputs
        widths = inline.flat_tables.widths

        def stream(salt: int) -> list[dict[str, int]]:
            return [
                {
                    net: (cycle * 7 + salt * 13 + j * 31) & ((1 << widths[net]) - 1)
                    for j, net in enumerate(inputs)
                }
                for cycle in range(n)
            ]

        ta = run_pair(inline, ann.sources, ann.sinks, 2, n, stream(1), stream(2))
        tb = run_pair(modular, ann.sources, ann.sinks, 2, n, stream(1), stream(2))
        top_nets = set(program.top_module.net_names) & set(inline.flat_tables.order)
        for ca, cb in zip(ta.configs, tb.configs):
            for net in top_nets:
                assert ca.store_l[net] == cb.store_l[net], (name, net)
                assert ca.live_l[net] == cb.live_l[net]
                assert ca.store_r[net] == cb.store_r[net]
                assert ca.live_r[net] == cb.live_r[net]


def test_public_assumptions_always_survive():
    design, ann = load_fixture("pipeline")
    richer = Annotations(
        sources=ann.sources,
        sinks=ann.sinks,
        assumptions=AssumptionSet(public=frozenset({"IF_pc", "Stall"})),
    )
    artifact = infer(design, richer)
    assert richer.assumptions.public <= artifact.final_state.pub_set
