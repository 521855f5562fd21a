"""``idemsum`` command line: enum, decompose, survey, verify, open-question.

Every command writes one JSON report (UTF-8, fixed key order) that embeds
the run configuration.  Exit codes: 0 positive or complete, 1 verified
negative or failed verification, 2 error or incomplete run.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import re
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from . import theorems
from .decompose import K_CAP, DecompQuery, decide, open_question_z4, survey
from .enumeration import DEFAULT_BRUTE_CAP, SummandKind, default_workers, pool_for
from .errors import IdemsumError
from .matrix import INDEX_BITS, parse_matrix
from .ring import parse_ring

COMMANDS = ("enum", "decompose", "survey", "verify", "open-question")
STRATEGIES = ("auto", "brute", "lifted", "bijection")

EXIT_OK, EXIT_NEGATIVE, EXIT_ERROR = 0, 1, 2


@dataclass(frozen=True)
class RunConfig:
    command: str
    ring: Optional[str] = None
    n: Optional[int] = None
    kind: str = "idempotent"
    k: int = 3
    k_max: int = 3
    target: Optional[list] = None
    prune: bool = True
    strategy: str = "auto"
    brute_cap: int = DEFAULT_BRUTE_CAP
    index_bits: int = INDEX_BITS
    budget: Optional[float] = None
    resume_from: int = 0
    out: Optional[str] = None
    csv: Optional[str] = None
    workers: int = 1
    theorem: Optional[str] = None
    all: bool = False
    profile: str = "quick"

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - names
        if unknown:
            raise ValueError(f"unknown config keys {sorted(unknown)}")
        cfg = cls(**d)
        cfg.validate()
        return cfg

    def validate(self):
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")
        for name in ("brute_cap", "index_bits", "workers"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.budget is not None and self.budget <= 0:
            raise ValueError("budget must be positive")
        if self.resume_from < 0:
            raise ValueError("resume-from must be nonnegative")
        if not 1 <= self.k <= K_CAP or not 1 <= self.k_max <= K_CAP:
            raise ValueError(f"k must be in 1..{K_CAP}")
        SummandKind.parse(self.kind)
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if self.command in ("enum", "decompose", "survey"):
            if self.ring is None or self.n is None:
                raise ValueError(f"{self.command} needs --ring and --n")
            R = parse_ring(self.ring)
            if self.command == "decompose":
                if self.target is None:
                    raise ValueError("decompose needs --target")
                M = parse_matrix(R, self.target)
                if M.n != self.n:
                    raise ValueError(f"target is {M.n}x{M.n} but --n is {self.n}")
        if self.command == "open-question" and self.n is None:
            raise ValueError("open-question needs --n")
        if self.command == "verify":
            if not self.all and self.theorem is None:
                raise ValueError("verify needs --theorem or --all")
            if self.theorem is not None:
                theorems.resolve(self.theorem)
            if self.profile not in theorems.PROFILES:
                raise ValueError(f"profile must be one of {theorems.PROFILES}")


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="idemsum", description="Sums of idempotent or involutive matrices over finite commutative rings.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, *, target=False, k=False, kmax=False):
        sp.add_argument("--ring", required=True, help="ring spec, e.g. Z4, F2^2, Z2xZ3")
        sp.add_argument("--n", type=int, required=True, help="matrix dimension")
        sp.add_argument("--kind", default="idempotent", choices=[k.value for k in SummandKind])
        sp.add_argument("--strategy", default="auto", choices=STRATEGIES)
        sp.add_argument("--brute-cap", type=int, default=DEFAULT_BRUTE_CAP)
        if k:
            sp.add_argument("--k", type=int, default=3)
        if kmax:
            sp.add_argument("--kmax", type=int, default=3, dest="k_max")
        if target:
            sp.add_argument("--target", required=True, help='matrix literal, e.g. "[[1,1],[1,0]]"')
        if k or kmax:
            sp.add_argument("--no-prune", action="store_false", dest="prune")

    def output(sp):
        sp.add_argument("--out", help="write the JSON report here instead of stdout")
        sp.add_argument("--workers", type=int, default=None, help="worker threads (default IDEMSUM_WORKERS or 1)")

    common(sub.add_parser("enum", help="list the idempotent or involutive matrices"))
    output(sub.choices["enum"])
    common(sub.add_parser("decompose", help="decide whether a matrix is a sum of k summands"), target=True, k=True)
    output(sub.choices["decompose"])
    sv = sub.add_parser("survey", help="least k for every matrix of M_n(R)")
    common(sv, kmax=True)
    output(sv)
    sv.add_argument("--csv", help="also write the census table as CSV")
    sv.add_argument("--budget", type=float, help="time budget in seconds")
    sv.add_argument("--resume-from", type=int, default=0, help="first matrix index to scan")
    vf = sub.add_parser("verify", help="run theorem verifiers")
    group = vf.add_mutually_exclusive_group(required=True)
    group.add_argument("--theorem")
    group.add_argument("--all", action="store_true")
    vf.add_argument("--profile", default="quick", choices=theorems.PROFILES)
    output(vf)
    oq = sub.add_parser("open-question", help="three-idempotent census of M_n(Z4)")
    oq.add_argument("--n", type=int, required=True)
    oq.add_argument("--budget", type=float)
    output(oq)
    return p


def parse_args(argv: Optional[Sequence[str]] = None) -> RunConfig:
    """Parse and validate; invalid input exits with argparse's usage error (status 2)."""
    parser = _build_parser()
    ns = vars(parser.parse_args(argv))
    if ns.get("workers") is None:
        ns["workers"] = default_workers()
    if ns.get("target") is not None:
        try:
            ns["target"] = json.loads(ns["target"])
        except json.JSONDecodeError:
            parser.error(f"malformed matrix literal {ns['target']!r}")
    try:
        return RunConfig.from_dict(ns)
    except (ValueError, KeyError, IdemsumError) as exc:
        parser.error(str(exc))


_INT_LIST = re.compile(r"\[(?:\s*-?\d+,?)+\s*\]")
_MATRIX = re.compile(r"\[(?:\s*\[[-\d,]*\],?)+\s*\]")


def _dump(report: dict) -> str:
    """Indented JSON with integer lists and matrices kept on one line."""
    text = json.dumps(report, indent=2, ensure_ascii=False)
    text = _INT_LIST.sub(lambda m: re.sub(r"\s+", "", m.group(0)), text)
    text = _MATRIX.sub(lambda m: re.sub(r"\s+", "", m.group(0)), text)
    return text + "\n"


def _run_enum(cfg: RunConfig):
    R = parse_ring(cfg.ring)
    kw = {"cap": cfg.brute_cap} if cfg.strategy == "brute" else {}
    pool = pool_for(R, cfg.n, cfg.kind, cfg.strategy, **kw)
    body = {
        "ring": R.spec,
        "n": cfg.n,
        "kind": pool.kind.value,
        "strategy": pool.strategy,
        "count": len(pool),
        "elements": [m.rows() for m in pool.matrices()],
    }
    return body, EXIT_OK


def _run_decompose(cfg: RunConfig):
    R = parse_ring(cfg.ring)
    target = parse_matrix(R, cfg.target)
    query = DecompQuery(target, cfg.kind, cfg.k, prune=None if cfg.prune else frozenset())
    d = decide(query, strategy=cfg.strategy, workers=cfg.workers)
    body = {
        "decomposable": d.decomposable,
        "witness": [m.rows() for m in d.witness.summands] if d.witness else None,
        "pruned": d.pruned,
        "prune_reason": d.prune_reason,
        "checked": d.checked,
    }
    return body, EXIT_OK if d.decomposable else EXIT_NEGATIVE


def _census_rows(report) -> list[list]:
    rows = [["k", "minimal", "cumulative", "exact"]]
    for k in range(1, report.k_max + 1):
        rows.append([k, report.minimal_k[k], report.counts[k], report.exact_counts[k]])
    rows.append(["none", report.minimal_k[0], "", ""])
    return rows


def _write_csv(path: str, report):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        csv.writer(fh).writerows(_census_rows(report))


def _run_survey(cfg: RunConfig):
    R = parse_ring(cfg.ring)
    report = survey(
        R,
        cfg.n,
        cfg.kind,
        cfg.k_max,
        prune=cfg.prune,
        start=cfg.resume_from,
        budget=cfg.budget,
        workers=cfg.workers,
        strategy=cfg.strategy,
    )
    if cfg.csv:
        _write_csv(cfg.csv, report)
    return report.to_dict(), EXIT_OK if report.complete else EXIT_ERROR


def _run_open_question(cfg: RunConfig):
    report = open_question_z4(cfg.n, cfg.budget, workers=cfg.workers)
    return report.to_dict(), EXIT_OK if report.covers_space else EXIT_ERROR


def _run_verify(cfg: RunConfig):
    ids = list(theorems.VERIFIERS) if cfg.all else [theorems.resolve(cfg.theorem)]
    results = [theorems.verify(t, cfg.profile) for t in ids]
    body = {
        "profile": cfg.profile,
        "passed": sum(r.passed for r in results),
        "failed": sum(not r.passed for r in results),
        "results": [r.to_dict() for r in results],
    }
    return body, EXIT_OK if all(r.passed for r in results) else EXIT_NEGATIVE


_DISPATCH = {
    "enum": _run_enum,
    "decompose": _run_decompose,
    "survey": _run_survey,
    "verify": _run_verify,
    "open-question": _run_open_question,
}


def execute(cfg: RunConfig, stdout=None) -> int:
    """Run one configured command, emit its report and return the exit code."""
    stdout = stdout or sys.stdout
    t0 = time.monotonic()
    try:
        body, code = _DISPATCH[cfg.command](cfg)
    except (IdemsumError, ValueError, KeyError, OSError) as exc:
        body, code = {"error": f"{type(exc).__name__}: {exc}"}, EXIT_ERROR
    report = {"command": cfg.command, "config": cfg.to_dict(), **body, "elapsed_s": round(time.monotonic() - t0, 3)}
    text = _dump(report)
    if cfg.out:
        try:
            Path(cfg.out).write_text(text, encoding="utf-8")
        except OSError as exc:
            print(f"idemsum: cannot write {cfg.out}: {exc}", file=sys.stderr)
            return EXIT_ERROR
    else:
        stdout.write(text)
    return code


def main(argv: Optional[Sequence[str]] = None) -> int:
    return execute(parse_args(argv))


if __name__ == "__main__":
    sys.exit(main())
