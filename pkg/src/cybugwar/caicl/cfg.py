"""Control-flow graph over instruction indices.

Nodes are instruction indices. Edges carry a `kind` attribute:
fallthrough, jump, call, continuation, return, taken. A node whose
execution can end the program has the node attribute `halts=True`.

`return` edges over-approximate: a Return may resume after any Gosub in
the program, so reachability computed on this graph is conservative.
"""

from __future__ import annotations

from typing import Iterable

import networkx as nx

from .program import Command, Gosub, Goto, If, Instruction, Op, Program


def _successors(program: Program, index: int, instr: Instruction, continuations: list[int]) -> Iterable[tuple[int | None, str]]:
    """Yield (target, kind); target None means the program halts."""
    n = len(program)
    nxt = index + 1 if index + 1 < n else None

    if isinstance(instr, Goto):
        target = program.labels.get(instr.label)
        # Undefined label: executes as a no-op.
        yield (target, "jump") if target is not None else (nxt, "fallthrough")
        return
    if isinstance(instr, Gosub):
        target = program.labels.get(instr.label)
        if target is not None:
            yield target, "call"
            yield nxt, "continuation"
        else:
            yield nxt, "fallthrough"
        return
    if isinstance(instr, Command) and instr.op is Op.RETURN:
        for c in continuations:
            yield c, "return"
        # Empty call stack.
        yield None, "return"
        return
    yield nxt, "fallthrough"


def build_cfg(program: Program) -> nx.MultiDiGraph:
    g = nx.MultiDiGraph(name=program.name)
    n = len(program)
    g.add_nodes_from(range(n), halts=False)

    # Return-continuations: the index after every Gosub that has a target.
    continuations = sorted(
        {
            i + 1
            for i, instr in enumerate(program.instructions)
            if isinstance(body := (instr.body if isinstance(instr, If) else instr), Gosub)
            and body.label in program.labels
            and i + 1 < n
        }
    )

    for index, instr in enumerate(program.instructions):
        if isinstance(instr, If):
            for target, kind in _successors(program, index, instr.body, continuations):
                if kind == "continuation":
                    # Same target as the fallthrough edge below.
                    continue
                taken_kind = "taken" if kind == "fallthrough" else kind
                if target is None:
                    g.nodes[index]["halts"] = True
                else:
                    g.add_edge(index, target, kind=taken_kind)
            if index + 1 < n:
                g.add_edge(index, index + 1, kind="fallthrough")
            else:
                g.nodes[index]["halts"] = True
            continue
        for target, kind in _successors(program, index, instr, continuations):
            if target is None:
                g.nodes[index]["halts"] = True
            else:
                g.add_edge(index, target, kind=kind)
    return g


def reachable(cfg: nx.MultiDiGraph) -> set[int]:
    if cfg.number_of_nodes() == 0:
        return set()
    return {0} | nx.descendants(cfg, 0)


def unreachable(cfg: nx.MultiDiGraph) -> set[int]:
    return set(cfg.nodes) - reachable(cfg)
