"""Bypass recursion: upper bounds on dim SHI(H, gamma) with replayable certificates.

Every internal node of a recursion tree applies one bypass move along an arc
meeting gamma three times on the boundary of a meridian disk; the value of
the node is at most the sum of the values of its two outputs.  Leaves are
systems in which every disk meets gamma at most twice, worth at most 1.

Systems are kept in canonical form throughout, so a move ``(disk, position)``
recorded in a certificate means the same thing whenever it is replayed.

Strategies:

* ``greedy``: the disk with the most intersections, then the position whose
  outputs have the least total potential.
* ``beam``: the ``beam_width`` best moves by a one-ply score, each searched
  recursively.
* ``exhaustive``: every move, with memoisation on canonical keys and
  branch-and-bound pruning.  Past ``depth_cap`` it falls back to greedy.

The one-ply score and the pruning use a lower bound for each system: the
torsion norm (see :mod:`khibound.torsion`) when ``lower_bound="torsion"``.
That bound only steers and prunes the search; the returned value is always
certified by the tree itself.

Determinism: the moves at the root are scored and then evaluated
independently of each other (each with a fresh memo table), in a fixed order;
the winner is the smallest value, ties going to the earlier move.  Any number
of workers therefore produces the same certificate.  Node budgets apply per
root move.  A time budget, when hit, makes the result depend on timing and is
flagged in the certificate.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

from .errors import CertificateMismatch, InvalidInput, KhiError
from .suture_model import (BypassArc, CurveSystem, VanishingRuleSet, bypass, firing_rule,
                           is_base_case, is_minimal, leaf_value)
from .suture_model import memo_key as _memo_key

CERT_HEADER = "khibound-certificate 1"
STRATEGIES = ("greedy", "beam", "exhaustive")


@dataclass(frozen=True)
class SearchConfig:
    strategy: str = "exhaustive"
    beam_width: int = 3
    depth_cap: int | None = None
    rules: VanishingRuleSet = field(default_factory=VanishingRuleSet)
    node_budget: int = 10**6
    time_budget: float = 600.0
    memo: bool = True
    seed: int = 0
    lower_bound: str = "torsion"  # or "none"
    workers: int = 1  # not part of the certificate

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise InvalidInput(f"unknown strategy {self.strategy!r}")
        if self.node_budget <= 0 or self.time_budget <= 0:
            raise InvalidInput("budgets must be positive")
        if self.beam_width <= 0:
            raise InvalidInput("beam width must be positive")
        if self.depth_cap is not None and self.depth_cap < 0:
            raise InvalidInput("depth cap must be non-negative")
        if self.lower_bound not in ("torsion", "none"):
            raise InvalidInput(f"unknown lower bound {self.lower_bound!r}")
        if self.workers < 1:
            raise InvalidInput("workers must be at least 1")

    def snapshot(self) -> str:
        depth = "-" if self.depth_cap is None else str(self.depth_cap)
        rules = ",".join(self.rules.names()) or "-"
        return (f"strategy={self.strategy} beam={self.beam_width} depth={depth} rules={rules} "
                f"nodes={self.node_budget} time={self.time_budget:g} memo={int(self.memo)} "
                f"seed={self.seed} lb={self.lower_bound}")

    @classmethod
    def parse_snapshot(cls, text: str) -> "SearchConfig":
        kv = dict(item.split("=", 1) for item in text.split())
        try:
            return cls(
                strategy=kv["strategy"],
                beam_width=int(kv["beam"]),
                depth_cap=None if kv["depth"] == "-" else int(kv["depth"]),
                rules=VanishingRuleSet.from_names([] if kv["rules"] == "-" else kv["rules"].split(",")),
                node_budget=int(kv["nodes"]),
                time_budget=float(kv["time"]),
                memo=kv["memo"] == "1",
                seed=int(kv["seed"]),
                lower_bound=kv["lb"],
            )
        except (KeyError, ValueError) as exc:
            raise InvalidInput(f"bad config line: {exc}") from exc


# ------------------------------------------------------------------ trees

@dataclass(frozen=True)
class Leaf:
    counts: tuple[int, ...]
    value: int
    rule: str | None = None


@dataclass(frozen=True)
class Move:
    disk: int
    position: int
    side: int
    left: "Node"  # the output with the first hexagon matching
    right: "Node"


Node = Leaf | Move


def tree_value(t: Node) -> int:
    if isinstance(t, Leaf):
        return t.value
    return tree_value(t.left) + tree_value(t.right)


def tree_rules(t: Node) -> set[str]:
    if isinstance(t, Leaf):
        return {t.rule} if t.rule else set()
    return tree_rules(t.left) | tree_rules(t.right)


def tree_size(t: Node) -> tuple[int, int]:
    """(internal nodes, leaves)"""
    if isinstance(t, Leaf):
        return 0, 1
    a, b = tree_size(t.left), tree_size(t.right)
    return a[0] + b[0] + 1, a[1] + b[1]


def _tree_lines(t: Node, out: list[str]):
    stack = [t]
    while stack:
        x = stack.pop()
        if isinstance(x, Leaf):
            counts = ",".join(map(str, x.counts)) or "-"
            out.append(f"leaf {counts} {x.value} {x.rule or '-'}")
        else:
            out.append(f"move {x.disk} {x.position} {x.side}")
            stack.append(x.right)
            stack.append(x.left)


def _parse_tree(lines: list[str], pos: int) -> tuple[Node, int]:
    # iterative preorder parse
    root_holder: list = []
    stack: list[list] = []  # [disk, position, side, children]
    while True:
        if pos >= len(lines):
            raise CertificateMismatch("truncated tree")
        parts = lines[pos].split()
        pos += 1
        if parts[0] == "leaf" and len(parts) == 4:
            counts = () if parts[1] == "-" else tuple(int(x) for x in parts[1].split(","))
            node: Node = Leaf(counts, int(parts[2]), None if parts[3] == "-" else parts[3])
        elif parts[0] == "move" and len(parts) == 4:
            stack.append([int(parts[1]), int(parts[2]), int(parts[3]), []])
            continue
        else:
            raise CertificateMismatch(f"bad tree line {lines[pos - 1]!r}")
        while True:
            if not stack:
                root_holder.append(node)
                return root_holder[0], pos
            stack[-1][3].append(node)
            if len(stack[-1][3]) < 2:
                break
            d, p, s, (a, b) = stack.pop()
            node = Move(d, p, s, a, b)


# ------------------------------------------------------------------ certificate

@dataclass
class BoundCertificate:
    tree: Node
    bound: int
    rules_used: tuple[str, ...]
    config: SearchConfig
    system: CurveSystem
    budget_exhausted: bool = False
    knot: str = "-"
    pd_hash: str = "-"
    construction: str = "-"

    def to_text(self) -> str:
        lines = [
            CERT_HEADER,
            f"knot {self.knot}",
            f"pd-hash {self.pd_hash}",
            f"construction {self.construction}",
            f"config {self.config.snapshot()}",
            f"rules-used {','.join(self.rules_used) or '-'}",
            f"budget-exhausted {int(self.budget_exhausted)}",
            f"bound {self.bound}",
            "system",
        ]
        lines += self.system.serialize().splitlines()
        lines.append("tree")
        _tree_lines(self.tree, lines)
        lines.append("end")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "BoundCertificate":
        lines = text.splitlines()
        try:
            if lines[0] != CERT_HEADER:
                raise CertificateMismatch("not a certificate (bad header)")
            fields = {}
            k = 1
            while lines[k] != "system":
                name, _, rest = lines[k].partition(" ")
                fields[name] = rest
                k += 1
            k += 1
            end = lines.index("end", k)
            system = CurveSystem.deserialize("\n".join(lines[k:end + 1]))
            k = end + 1
            if lines[k] != "tree":
                raise CertificateMismatch("missing tree")
            tree, k = _parse_tree(lines, k + 1)
            if lines[k] != "end":
                raise CertificateMismatch("trailing data after tree")
            rules = fields["rules-used"]
            return cls(
                tree=tree,
                bound=int(fields["bound"]),
                rules_used=() if rules == "-" else tuple(rules.split(",")),
                config=SearchConfig.parse_snapshot(fields["config"]),
                system=system,
                budget_exhausted=fields["budget-exhausted"] == "1",
                knot=fields.get("knot", "-"),
                pd_hash=fields.get("pd-hash", "-"),
                construction=fields.get("construction", "-"),
            )
        except CertificateMismatch:
            raise
        except (IndexError, KeyError, ValueError, KhiError) as exc:
            raise CertificateMismatch(f"unreadable certificate: {exc}") from exc


# ------------------------------------------------------------------ search

def memo_key(cs: CurveSystem) -> tuple:
    return _memo_key(cs)


def potential(cs: CurveSystem) -> int:
    return sum(max(n - 2, 0) for n in cs.counts)


@dataclass
class Stats:
    nodes: int = 0
    bypasses: int = 0
    exhausted: bool = False
    timed_out: bool = False


class _Search:
    def __init__(self, cfg: SearchConfig, deadline: float):
        self.cfg = cfg
        self.deadline = deadline
        self.stats = Stats()
        self.memo: dict = {}
        self.greedy_memo: dict = {}
        self.lb_memo: dict = {}

    # -- helpers

    def lb(self, cs: CurveSystem) -> int:
        if self.cfg.lower_bound == "none":
            return 0
        k = cs.key()
        v = self.lb_memo.get(k)
        if v is None:
            from .torsion import torsion_norm
            v = torsion_norm(cs)
            self.lb_memo[k] = v
        return v

    def over_budget(self) -> bool:
        if self.stats.nodes >= self.cfg.node_budget:
            self.stats.exhausted = True
        elif time.monotonic() > self.deadline:
            self.stats.exhausted = self.stats.timed_out = True
        return self.stats.exhausted

    def leaf(self, cs: CurveSystem) -> Leaf:
        rule = firing_rule(cs, self.cfg.rules)
        return Leaf(tuple(cs.counts), leaf_value(cs, self.cfg.rules), rule)

    def moves(self, cs: CurveSystem, disks=None) -> list[tuple[BypassArc, CurveSystem, CurveSystem]]:
        """All moves on ``disks`` (default: every disk meeting gamma 3+ times),
        dropping moves whose outputs repeat an earlier move's."""
        out = []
        seen = set()
        for i, n in enumerate(cs.counts):
            if n < 3 or (disks is not None and i not in disks):
                continue
            for j in range(n):
                arc = BypassArc(i, j, 0)
                a, b = bypass(cs, arc)
                self.stats.bypasses += 1
                pair = (a.key(), b.key())
                if pair in seen:
                    continue
                seen.add(pair)
                out.append((arc, a, b))
        return out

    def ranked(self, cs: CurveSystem) -> list[tuple[tuple, BypassArc, CurveSystem, CurveSystem]]:
        out = []
        for arc, a, b in self.moves(cs):
            score = (self.lb(a) + self.lb(b), potential(a) + potential(b), arc.disk, arc.position)
            out.append((score, arc, a, b))
        out.sort(key=lambda t: t[0])
        return out

    # -- greedy

    def greedy(self, cs: CurveSystem) -> Node:
        k = cs.key()
        if self.cfg.memo and k in self.greedy_memo:
            return self.greedy_memo[k]
        self.stats.nodes += 1
        if is_base_case(cs):
            t: Node = self.leaf(cs)
        else:
            n = max(cs.counts)
            i = cs.counts.index(n)
            best = None
            for arc, a, b in self.moves(cs, {i}):
                score = (potential(a) + potential(b), arc.position, arc.side)
                if best is None or score < best[0]:
                    best = (score, arc, a, b)
            _, arc, a, b = best
            t = Move(arc.disk, arc.position, arc.side, self.greedy(a), self.greedy(b))
        if self.cfg.memo:
            self.greedy_memo[k] = t
        return t

    # -- beam / exhaustive

    def search(self, cs: CurveSystem, depth: int = 0) -> Node:
        k = cs.key()
        if self.cfg.memo and k in self.memo:
            return self.memo[k]
        if is_base_case(cs):
            self.stats.nodes += 1
            t: Node = self.leaf(cs)
        elif self.over_budget() or (self.cfg.depth_cap is not None and depth >= self.cfg.depth_cap):
            t = self.greedy(cs)
        elif self.cfg.rules.v0 and 0 in cs.counts:
            # every leaf below keeps a disk missing gamma, so any tree is optimal
            t = self.greedy(cs)
        else:
            self.stats.nodes += 1
            t = self._expand(cs, depth)
        if self.cfg.memo:
            self.memo[k] = t
        return t

    def _expand(self, cs: CurveSystem, depth: int) -> Node:
        floor = self.lb(cs)
        cands = self.ranked(cs)
        if self.cfg.strategy == "beam":
            cands = cands[: self.cfg.beam_width]
        best: Node | None = None
        best_v = None
        for (lb_sum, *_), arc, a, b in cands:
            if best_v is not None and lb_sum >= best_v:
                continue
            ta = self.search(a, depth + 1)
            va = tree_value(ta)
            if best_v is not None and va + self.lb(b) >= best_v:
                continue
            tb = self.search(b, depth + 1)
            v = va + tree_value(tb)
            if best_v is None or v < best_v:
                best, best_v = Move(arc.disk, arc.position, arc.side, ta, tb), v
            if best_v <= floor:
                break
        return best


def _evaluate_root_move(args) -> tuple[Node, Stats]:
    cs_text, arc, cfg, deadline = args
    cs = CurveSystem.deserialize(cs_text)
    s = _Search(cfg, deadline)
    a, b = bypass(cs, arc)
    ta = s.search(a, 1)
    tb = s.search(b, 1)
    return Move(arc.disk, arc.position, arc.side, ta, tb), s.stats


@dataclass
class SearchReport:
    stats: Stats
    root_moves: int
    evaluated: int
    seconds: float


def upper_bound(cs: CurveSystem, cfg: SearchConfig = SearchConfig(), floor: int = 0,
                **meta) -> tuple[int, BoundCertificate]:
    """Smallest bound found within budget, with its certificate.

    ``floor`` is a known lower bound (for a knot, the Alexander bound); the
    root search stops as soon as it is reached.  ``meta`` fills the
    certificate's knot, pd_hash and construction fields.
    """
    bound, cert, _ = upper_bound_report(cs, cfg, floor, **meta)
    return bound, cert


def upper_bound_report(cs: CurveSystem, cfg: SearchConfig = SearchConfig(), floor: int = 0,
                       **meta) -> tuple[int, BoundCertificate, SearchReport]:
    if not is_minimal(cs):
        raise InvalidInput("upper_bound needs a system in minimal position")
    t0 = time.monotonic()
    deadline = t0 + cfg.time_budget
    cs = cs.canonical()
    s = _Search(cfg, deadline)
    evaluated = n_root = 0
    if is_base_case(cs):
        tree: Node = s.leaf(cs)
        stats = s.stats
    elif cfg.strategy == "greedy" or (cfg.rules.v0 and 0 in cs.counts):
        tree = s.greedy(cs)
        stats = s.stats
    else:
        floor = max(floor, s.lb(cs))
        cands = s.ranked(cs)
        if cfg.strategy == "beam":
            cands = cands[: cfg.beam_width]
        n_root = len(cands)
        text = cs.serialize()
        jobs = [(text, arc, cfg, deadline) for _, arc, _, _ in cands]
        results: list[tuple[Node, Stats]] = []
        pool = ProcessPoolExecutor(cfg.workers) if cfg.workers > 1 else None
        try:
            batch = cfg.workers
            for start in range(0, len(jobs), batch):
                chunk = jobs[start:start + batch]
                if pool is None:
                    results += [_evaluate_root_move(j) for j in chunk]
                else:
                    results += list(pool.map(_evaluate_root_move, chunk))
                if min(tree_value(t) for t, _ in results) <= floor:
                    break
        finally:
            if pool is not None:
                pool.shutdown()
        evaluated = len(results)
        tree = min((t for t, _ in results), key=tree_value)  # first minimum wins
        stats = Stats(
            nodes=s.stats.nodes + sum(st.nodes for _, st in results),
            bypasses=s.stats.bypasses + sum(st.bypasses for _, st in results),
            exhausted=any(st.exhausted for _, st in results),
            timed_out=any(st.timed_out for _, st in results),
        )
    bound = tree_value(tree)
    cert = BoundCertificate(
        tree=tree,
        bound=bound,
        rules_used=tuple(sorted(tree_rules(tree))),
        config=cfg,
        system=cs,
        budget_exhausted=stats.exhausted,
        **meta,
    )
    report = SearchReport(stats, n_root, evaluated, time.monotonic() - t0)
    return bound, cert, report


# ------------------------------------------------------------------ replay

def replay(cert: BoundCertificate, cs: CurveSystem) -> int:
    """Re-execute the certificate's moves on ``cs`` and return the bound.

    Raises :class:`CertificateMismatch` if ``cs`` is not the certified system
    (up to isomorphism), a move is inapplicable or fails to lower the
    intersection counts, a leaf is not a base case, or a leaf value or the
    total disagrees with the record.
    """
    if cs.key() != cert.system.key():
        raise CertificateMismatch("certificate was issued for a different system")
    rules = cert.config.rules
    total = 0
    fired = set()
    stack = [(cs.canonical(), cert.tree)]
    while stack:
        sys_, node = stack.pop()
        if isinstance(node, Leaf):
            if not is_base_case(sys_):
                raise CertificateMismatch(f"leaf at counts {list(sys_.counts)} is not a base case")
            if tuple(sys_.counts) != node.counts:
                raise CertificateMismatch(f"leaf counts {node.counts} differ from {tuple(sys_.counts)}")
            rule = firing_rule(sys_, rules)
            v = leaf_value(sys_, rules)
            if v != node.value or rule != node.rule:
                raise CertificateMismatch(f"leaf value {node.value} recorded, {v} recomputed")
            if rule:
                fired.add(rule)
            total += v
            continue
        try:
            a, b = bypass(sys_, BypassArc(node.disk, node.position, node.side))
        except KhiError as exc:
            raise CertificateMismatch(f"move ({node.disk}, {node.position}) inapplicable: {exc}") from exc
        s0 = sum(sys_.counts)
        if sum(a.counts) >= s0 or sum(b.counts) >= s0:
            raise CertificateMismatch("move does not lower the intersection count")
        stack.append((b, node.right))
        stack.append((a, node.left))
    if total != cert.bound:
        raise CertificateMismatch(f"recomputed bound {total}, certificate says {cert.bound}")
    if tuple(sorted(fired)) != tuple(cert.rules_used):
        raise CertificateMismatch("vanishing rules used differ from the record")
    return total


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get("KHIBOUND_WORKERS", "1")))
    except ValueError:
        return 1


def with_workers(cfg: SearchConfig, workers: int) -> SearchConfig:
    return replace(cfg, workers=workers)
