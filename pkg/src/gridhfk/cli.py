"""Command-line front end for the grid knot invariant calculator.

One invocation takes a knot — a braid word or a grid file — computes the
bigraded invariant table over Z or Z/2 with the requested pipeline, runs
the configured consistency checks, and prints either a human-readable
report or a machine-readable one that parses back losslessly.

The genus and fibered modes avoid the full table: the stabilization factor
in the computed homology only shifts gradings down, so both invariants are
read off the highest nonzero Alexander slice alone.
"""

from __future__ import annotations

import argparse
import re
import sys
from dataclasses import dataclass

from .errors import CrosscheckFailed, GridHfkError, MultiComponent
from .gridkit import (
    GridDiagram,
    LaurentPoly,
    alexander_polynomial,
    component_count,
    parse_braid,
    parse_grid_text,
)
from .reducer import (
    HFKTable,
    hfk_cells,
    hfk_ovals,
    hfk_paths,
    make_table,
    top_invariants,
)
from .simplifier import minimize

#: the dual-pipeline crosscheck defaults to on up to this grid size; above
#: it the rectangle complex (n! generators) dominates the whole run time
CROSSCHECK_SIZE_LIMIT = 7

MACHINE_HEADER = "# gridhfk machine-format 1"


@dataclass
class RunConfig:
    """One invocation's worth of choices; mirrors the command-line flags."""

    braid: tuple[int, ...] | None = None
    grid_path: str | None = None
    coeff: str = "z"  # z | z2
    mode: str = "hfk"  # hfk | genus | fibered | torsion
    strategy: str = "fast"  # fast | faithful | paths
    simplify_budget: int = 20000
    skip: str = "none"  # none | auto
    crosscheck: bool | None = None  # None: on iff the minimized grid is small
    fmt: str = "text"  # text | machine

    def input_label(self) -> str:
        if self.braid is not None:
            return "braid " + " ".join(str(a) for a in self.braid)
        return f"grid {self.grid_path}"

    def validate(self) -> None:
        if (self.braid is None) == (self.grid_path is None):
            raise ValueError(
                "exactly one of a braid word or a grid file is required"
            )
        allowed = (
            ("coeff", self.coeff, ("z", "z2")),
            ("mode", self.mode, ("hfk", "genus", "fibered", "torsion")),
            ("strategy", self.strategy, ("fast", "faithful", "paths")),
            ("skip", self.skip, ("none", "auto")),
            ("format", self.fmt, ("text", "machine")),
        )
        for name, value, options in allowed:
            if value not in options:
                raise ValueError(
                    f"{name} must be one of {', '.join(options)}; got {value!r}"
                )
        if self.simplify_budget < 0:
            raise ValueError("simplify budget must be nonnegative")
        if self.mode == "torsion" and self.coeff != "z":
            raise ValueError(
                "torsion reporting requires integer coefficients (--coeff z)"
            )


@dataclass
class RunResult:
    """Everything a finished run knows, ready for rendering."""

    config: RunConfig
    input_size: int
    grid: GridDiagram
    pipeline: str
    ring: str
    table: HFKTable | None
    genus: int
    fibered: bool
    torsion_free: bool | None
    checks: tuple[str, ...]
    warnings: tuple[str, ...]


def parse_braid_word(text: str) -> tuple[int, ...]:
    """Letters from a string like ``"1 1 1"`` or ``"1,-2,1,-2"``."""
    tokens = [tok for tok in re.split(r"[\s,]+", text.strip()) if tok]
    if not tokens:
        raise ValueError("empty braid word")
    try:
        return tuple(int(tok) for tok in tokens)
    except ValueError:
        raise ValueError(f"braid letters must be integers: {text!r}") from None


def _load(cfg: RunConfig) -> GridDiagram:
    if cfg.braid is not None:
        return parse_braid(cfg.braid)
    assert cfg.grid_path is not None
    with open(cfg.grid_path, encoding="utf-8") as handle:
        g = parse_grid_text(handle.read())
    pieces = component_count(g)
    if pieces != 1:
        raise MultiComponent(
            f"the grid traces {pieces} closed curves; only knots are supported"
        )
    return g


def _table_euler(table: HFKTable) -> LaurentPoly:
    """Graded Euler characteristic of the table as a Laurent polynomial."""
    coeffs: dict[int, int] = {}
    for (a, m), (rank, _) in table.groups.items():
        if rank:
            coeffs[a] = coeffs.get(a, 0) + (rank if m % 2 == 0 else -rank)
    return LaurentPoly(coeffs)


def run(cfg: RunConfig) -> RunResult:
    """Parse, simplify, compute, verify; raises on any failed check."""
    cfg.validate()
    g_in = _load(cfg)
    g = minimize(g_in, cfg.simplify_budget)
    ring = "Z" if cfg.coeff == "z" else "Z2"
    crosscheck = (
        cfg.crosscheck
        if cfg.crosscheck is not None
        else g.n <= CROSSCHECK_SIZE_LIMIT
    )
    checks: list[str] = []

    if cfg.mode in ("genus", "fibered"):
        genus, fibered = top_invariants(g, ring)
        pipeline = "ovals-top-slice"
        if crosscheck:
            reference = hfk_cells(g, ring).table
            if (reference.genus, reference.fibered) != (genus, fibered):
                raise CrosscheckFailed(
                    "top-slice scan and rectangle pipeline disagree: "
                    f"({genus}, {fibered}) vs "
                    f"({reference.genus}, {reference.fibered})"
                )
            checks.append("crosscheck against rectangle pipeline: ok")
        return RunResult(
            config=cfg,
            input_size=g_in.n,
            grid=g,
            pipeline=pipeline,
            ring=ring,
            table=None,
            genus=genus,
            fibered=fibered,
            torsion_free=None,
            checks=tuple(checks),
            warnings=(),
        )

    if cfg.strategy == "paths":
        report = hfk_paths(g, ring, skip=cfg.skip)
    else:
        report = hfk_ovals(g, ring, mode=cfg.strategy, skip=cfg.skip)
    table = report.table

    euler = _table_euler(table)
    delta = alexander_polynomial(g)
    if euler != delta:
        raise CrosscheckFailed(
            "graded Euler characteristic differs from the determinant "
            f"polynomial: {euler!r} vs {delta!r}"
        )
    checks.append("Euler characteristic against determinant: ok")

    if crosscheck:
        reference = hfk_cells(g, ring).table
        if reference != table:
            raise CrosscheckFailed(
                "oval and rectangle pipelines disagree: "
                f"{table.groups} vs {reference.groups}"
            )
        checks.append("crosscheck against rectangle pipeline: ok")

    return RunResult(
        config=cfg,
        input_size=g_in.n,
        grid=g,
        pipeline=report.pipeline,
        ring=ring,
        table=table,
        genus=table.genus,
        fibered=table.fibered,
        torsion_free=table.torsion_free,
        checks=tuple(checks),
        warnings=report.warnings,
    )


# --------------------------------------------------------------------------
# rendering


def _group_text(rank: int, torsion: tuple[int, ...], ring: str) -> str:
    parts: list[str] = []
    base = "Z" if ring == "Z" else "Z2"
    if rank == 1:
        parts.append(base)
    elif rank > 1:
        parts.append(f"{base}^{rank}")
    parts.extend(f"Z/{t}" for t in torsion)
    return " + ".join(parts) if parts else "0"


def _table_rows(table: HFKTable) -> list[str]:
    wa = max(len(str(a)) for a, _ in table.groups)
    wm = max(len(str(m)) for _, m in table.groups)
    rows = []
    for (a, m), (rank, torsion) in sorted(table.groups.items()):
        rows.append(
            f"  ({a:>{wa}}, {m:>{wm}}): {_group_text(rank, torsion, table.ring)}"
        )
    return rows


def _yesno(flag: bool) -> str:
    return "yes" if flag else "no"


def _emit_text(result: RunResult) -> str:
    cfg = result.config
    lines = [
        f"input: {cfg.input_label()}",
        f"grid size: {result.grid.n} (input {result.input_size}), "
        f"pipeline {result.pipeline}, coefficients {result.ring}",
    ]
    for message in result.warnings:
        lines.append(f"warning: {message}")
    table = result.table
    if cfg.mode == "genus":
        lines.append(f"genus: {result.genus}")
    elif cfg.mode == "fibered":
        lines.append(f"fibered: {_yesno(result.fibered)}")
    elif cfg.mode == "torsion":
        assert table is not None
        lines.append(f"torsion-free: {_yesno(bool(result.torsion_free))}")
        torsion_rows = [
            f"  ({a}, {m}): " + " + ".join(f"Z/{t}" for t in torsion)
            for (a, m), (_, torsion) in sorted(table.groups.items())
            if torsion
        ]
        if torsion_rows:
            lines.append("torsion summands:")
            lines.extend(torsion_rows)
    else:
        assert table is not None
        lines.extend(_table_rows(table))
        lines.append(f"total rank: {table.total_rank()}")
        lines.append(f"genus: {table.genus}")
        lines.append(f"fibered: {_yesno(table.fibered)}")
        if result.ring == "Z":
            lines.append(f"torsion-free: {_yesno(table.torsion_free)}")
    for check in result.checks:
        lines.append(f"check: {check}")
    return "\n".join(lines)


def _emit_machine(result: RunResult) -> str:
    cfg = result.config
    lines = [
        MACHINE_HEADER,
        f"# input: {cfg.input_label()}",
        f"# n: {result.grid.n}",
        f"# pipeline: {result.pipeline}",
        f"# ring: {result.ring}",
        f"# mode: {cfg.mode}",
    ]
    if cfg.mode == "genus":
        lines.append(f"genus {result.genus}")
    elif cfg.mode == "fibered":
        lines.append(f"fibered {str(result.fibered).lower()}")
    elif cfg.mode == "torsion":
        assert result.table is not None
        lines.append(f"torsion-free {str(result.torsion_free).lower()}")
        for (a, m), (rank, torsion) in sorted(result.table.groups.items()):
            if torsion:
                lines.append(
                    f"{a} {m} {rank} " + " ".join(str(t) for t in torsion)
                )
    else:
        assert result.table is not None
        for (a, m), (rank, torsion) in sorted(result.table.groups.items()):
            record = f"{a} {m} {rank}"
            if torsion:
                record += " " + " ".join(str(t) for t in torsion)
            lines.append(record)
    return "\n".join(lines)


def emit_report(result: RunResult) -> str:
    """Render a finished run in the configured output format."""
    if result.config.fmt == "machine":
        return _emit_machine(result)
    return _emit_text(result)


def parse_machine(text: str) -> HFKTable:
    """Rebuild the invariant table from machine-format ``hfk`` output.

    Inverse of the machine rendering: reads the ring from the header and
    one ``a m rank [factors...]`` record per line, then rebuilds the table
    (including genus, fiberedness, and the torsion flag) from the groups.
    """
    ring: str | None = None
    groups: dict[tuple[int, int], tuple[int, tuple[int, ...]]] = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            head, _, value = line[1:].partition(":")
            key = head.strip()
            if key == "ring":
                ring = value.strip()
            elif key == "mode" and value.strip() != "hfk":
                raise ValueError(
                    f"only hfk-mode output parses to a table; got {value.strip()!r}"
                )
            continue
        fields = line.split()
        if len(fields) < 3:
            raise ValueError(f"malformed record: {line!r}")
        try:
            numbers = [int(tok) for tok in fields]
        except ValueError:
            raise ValueError(f"malformed record: {line!r}") from None
        a, m, rank = numbers[:3]
        torsion = tuple(numbers[3:])
        if (a, m) in groups:
            raise ValueError(f"duplicate record for grading ({a}, {m})")
        groups[(a, m)] = (rank, torsion)
    if ring not in ("Z", "Z2"):
        raise ValueError("missing or unrecognized ring header")
    if not groups:
        raise ValueError("no records found")
    return make_table({(2 * a, m): grp for (a, m), grp in groups.items()}, ring)


# --------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gridhfk",
        description=(
            "Compute the bigraded knot invariant table of a knot presented "
            "as a braid word or a grid diagram."
        ),
    )
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument(
        "--braid",
        metavar="WORD",
        help='braid word, e.g. "1 1 1" (negative letters are inverses)',
    )
    source.add_argument(
        "--grid",
        metavar="FILE",
        help="grid file: a size line, then 'X: ...' and 'O: ...' row lists",
    )
    parser.add_argument(
        "--coeff",
        choices=("z", "z2"),
        default="z",
        help="coefficient ring: integers or the two-element field",
    )
    parser.add_argument(
        "--mode",
        choices=("hfk", "genus", "fibered", "torsion"),
        default="hfk",
        help="full table, or a single derived invariant",
    )
    parser.add_argument(
        "--strategy",
        choices=("fast", "faithful", "paths"),
        default="fast",
        help=(
            "fast: per-slice greedy reduction; faithful: scheduled "
            "retraction with survivor checks; paths: lazy cancellation-path "
            "rows of the small complex"
        ),
    )
    parser.add_argument(
        "--simplify-budget",
        type=int,
        default=20000,
        metavar="N",
        help="search-node budget for grid-size minimization (0 disables)",
    )
    parser.add_argument(
        "--skip",
        choices=("none", "auto"),
        default="none",
        help="auto: skip the largest Alexander slices and reconstruct them",
    )
    parser.add_argument(
        "--crosscheck",
        choices=("on", "off"),
        default=None,
        help=(
            "also run the independent rectangle pipeline and compare "
            f"(default: on up to grid size {CROSSCHECK_SIZE_LIMIT})"
        ),
    )
    parser.add_argument(
        "--format",
        dest="fmt",
        choices=("text", "machine"),
        default="text",
        help="human-readable report or line-delimited records",
    )
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        braid=parse_braid_word(args.braid) if args.braid is not None else None,
        grid_path=args.grid,
        coeff=args.coeff,
        mode=args.mode,
        strategy=args.strategy,
        simplify_budget=args.simplify_budget,
        skip=args.skip,
        crosscheck=None if args.crosscheck is None else args.crosscheck == "on",
        fmt=args.fmt,
    )


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        result = run(config_from_args(args))
        print(emit_report(result))
    except (GridHfkError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
