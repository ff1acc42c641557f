from __future__ import annotations

import networkx as nx

from .cfg import build_cfg, reachable
from .diagnostics import Diagnostic, SourceSpan, sort_key
from .program import Command, Gosub, Goto, If, Instruction, Op, Program, jump_label

# Edges that stay inside one subroutine body.
_BODY_EDGES = frozenset({"fallthrough", "jump", "taken", "continuation"})


def _is_return(instr: Instruction) -> bool:
    body = instr.body if isinstance(instr, If) else instr
    return isinstance(body, Command) and body.op is Op.RETURN


def _is_acting(instr: Instruction) -> bool:
    body = instr.body if isinstance(instr, If) else instr
    return isinstance(body, Command) and body.op.acting


def _ends_block(instr: Instruction) -> bool:
    return isinstance(instr, Goto) or (isinstance(instr, Command) and instr.op is Op.RETURN)


def _unreachable_regions(program: Program, dead: set[int]) -> list[list[int]]:
    """Group dead indices into runs, split at labels and after unconditional jumps."""
    targets = set(program.labels.values())
    regions: list[list[int]] = []
    prev = None
    for index in sorted(dead):
        starts_new = (
            prev is None
            or index != prev + 1
            or index in targets
            or _ends_block(program.instructions[prev])
        )
        if starts_new:
            regions.append([index])
        else:
            regions[-1].append(index)
        prev = index
    return regions


def _missing_returns(program: Program, cfg: nx.MultiDiGraph) -> list[Diagnostic]:
    body_view = nx.subgraph_view(cfg, filter_edge=lambda u, v, k: cfg.edges[u, v, k]["kind"] in _BODY_EDGES)
    called = sorted(
        {
            instr_label
            for instr in program.instructions
            if isinstance(body := (instr.body if isinstance(instr, If) else instr), Gosub)
            and (instr_label := body.label) in program.labels
        }
    )
    out: list[Diagnostic] = []
    for label in called:
        entry = program.labels[label]
        body = {entry} | nx.descendants(body_view, entry)
        returns = any(_is_return(program.instructions[i]) for i in body)
        falls_off = any(cfg.nodes[i]["halts"] and not _is_return(program.instructions[i]) for i in body)
        text = program.label_text.get(label, label)
        span = program.label_spans.get(label, program.statements[entry].span)
        if not returns:
            out.append(Diagnostic("warning", "missing-return", span, f"subroutine '{text}' never reaches 'return'"))
        elif falls_off:
            out.append(
                Diagnostic("warning", "missing-return", span, f"subroutine '{text}' can run off the program end without 'return'")
            )
    return out


def lint(program: Program) -> list[Diagnostic]:
    """Static findings over a parsed program. Pure; never raises for bad scripts."""
    out: list[Diagnostic] = []
    n = len(program)
    cfg = build_cfg(program)
    live = reachable(cfg)
    dead = set(range(n)) - live

    for region in _unreachable_regions(program, dead):
        first = program.statements[region[0]].span
        last = program.statements[region[-1]].span
        out.append(
            Diagnostic(
                "warning",
                "unreachable-code",
                first,
                f"unreachable code: {len(region)} instruction(s), lines {first.line}-{last.line}",
            )
        )

    used: set[str] = set()
    for stmt in program.statements:
        label = jump_label(stmt.instruction)
        if label is None:
            continue
        used.add(label)
        if label not in program.labels:
            body = stmt.instruction.body if isinstance(stmt.instruction, If) else stmt.instruction
            text = body.text if isinstance(body, (Goto, Gosub)) and body.text else label
            out.append(Diagnostic("warning", "undefined-label", stmt.span, f"label '{text}' is not defined"))

    for label, index in sorted(program.labels.items(), key=lambda kv: kv[1]):
        if label not in used:
            span = program.label_spans.get(label, program.statements[index].span)
            out.append(
                Diagnostic("info", "unused-label", span, f"label '{program.label_text.get(label, label)}' is never used")
            )

    out.extend(_missing_returns(program, cfg))

    if n and not any(_is_acting(program.instructions[i]) for i in live):
        out.append(Diagnostic("info", "no-action", SourceSpan(program.statements[0].span.line), "program never performs an action"))

    return sorted(out, key=sort_key)
