from collections import deque

from cybugwar.caicl import build_cfg, lint, parse, reachable, unreachable
from cybugwar.caicl.program import Command, Gosub, Goto, If, Op


def oracle_reachable(program) -> set[int]:
    """Plain BFS over instruction successors, written independently of cfg.py."""
    n = len(program)
    labels = program.labels
    instrs = program.instructions
    conts = {i + 1 for i, ins in enumerate(instrs) for b in [ins.body if isinstance(ins, If) else ins]
             if isinstance(b, Gosub) and b.label in labels and i + 1 < n}

    def succ(i):
        ins = instrs[i]
        out = set()
        body = ins
        if isinstance(ins, If):
            out.add(i + 1)
            body = ins.body
        if isinstance(body, Goto):
            out.add(labels.get(body.label, i + 1))
        elif isinstance(body, Gosub):
            if body.label in labels:
                out.add(labels[body.label])
            out.add(i + 1)
        elif isinstance(body, Command) and body.op is Op.RETURN:
            out |= conts
        else:
            out.add(i + 1)
        return {j for j in out if j < n}

    if n == 0:
        return set()
    seen = {0}
    queue = deque([0])
    while queue:
        for j in succ(queue.popleft()):
            if j not in seen:
                seen.add(j)
                queue.append(j)
    return seen


def test_ghazu_reachability_matches_oracle(ghazu_source):
    p = parse(ghazu_source).program
    cfg = build_cfg(p)
    assert reachable(cfg) == oracle_reachable(p) == set(range(11))
    assert unreachable(cfg) == set(range(11, 35))


def test_ghazu_unreachable_regions(ghazu_source):
    p = parse(ghazu_source).program
    findings = [d for d in lint(p) if d.code == "unreachable-code"]
    assert len(findings) >= 2
    lines = ghazu_source.split("\n")
    lower = lines.index("lower shield") + 1
    self_destruct = lines.index("self destruct") + 1
    # One region covers the tail of the Suiside block.
    tail = [d for d in findings if d.span.line <= lower and f"-{self_destruct + 1}" in d.message]
    assert tail, [d.message for d in findings]
    assert all(d.severity == "warning" for d in findings)


def test_ghazu_region_split():
    from cybugwar.caicl.lint import _unreachable_regions
    from cybugwar.bots import builtin_source

    p = parse(builtin_source("ghazu_corpus")).program
    regions = _unreachable_regions(p, set(range(11, 35)))
    assert [(r[0], r[-1]) for r in regions] == [(11, 13), (14, 14), (15, 18), (19, 26), (27, 29), (30, 30), (31, 34)]


def test_ghazu_lint_has_no_errors(ghazu_source):
    p = parse(ghazu_source).program
    assert all(d.severity != "error" for d in lint(p))


def test_if_gosub_has_two_edges():
    p = parse("if bump barrier then gosub S\nturn left\nS:\nreturn\n").program
    cfg = build_cfg(p)
    kinds = sorted(k for _, _, k in cfg.out_edges(0, data="kind"))
    assert kinds == ["call", "fallthrough"]


def test_return_edges_and_halts():
    p = parse("gosub S\nturn left\nS:\nreturn\n").program
    cfg = build_cfg(p)
    assert cfg.has_edge(2, 1)
    assert cfg.nodes[2]["halts"]
    assert reachable(cfg) == {0, 1, 2}


def test_undefined_goto_is_a_fallthrough():
    p = parse("goto Nowhere\nturn left\n").program
    cfg = build_cfg(p)
    assert reachable(cfg) == {0, 1}
    codes = [d.code for d in lint(p)]
    assert "undefined-label" in codes
    assert "unreachable-code" not in codes


def test_unused_label_is_info():
    p = parse("Spare:\nturn left\n").program
    found = [(d.code, d.severity) for d in lint(p)]
    assert ("unused-label", "info") in found


def test_missing_return():
    p = parse("L:\ngosub Sub\ngoto L\nSub:\nturn left\ngoto L\n").program
    found = [d for d in lint(p) if d.code == "missing-return"]
    assert len(found) == 1
    assert "Sub" in found[0].message


def test_subroutine_with_return_is_clean():
    p = parse("L:\ngosub Sub\ngoto L\nSub:\nturn left\nreturn\n").program
    assert not [d for d in lint(p) if d.code == "missing-return"]


def test_no_action():
    p = parse("name Lazy\nL:\ngoto L\n").program
    assert [d.code for d in lint(p)] == ["no-action"]


def test_idle_builtin_lints_to_no_action():
    from cybugwar.bots import builtin_bot

    assert [d.code for d in lint(builtin_bot("idle"))] == ["no-action"]


def test_ghazu_spec_is_fully_reachable():
    from cybugwar.bots import builtin_bot

    p = builtin_bot("ghazu_spec")
    assert unreachable(build_cfg(p)) == set()
    assert not [d for d in lint(p) if d.severity != "info"]


def test_lint_is_sorted():
    p = parse("goto B\nturn left\nA:\nturn right\nB:\ngoto B\n").program
    diags = lint(p)
    assert diags == sorted(diags, key=lambda d: (d.span.line, d.span.column_start, d.code, d.message))
