"""Plain-text tables and JSON documents for test results.

JSON documents number attributes from 1, like the text partitions.
"""

from __future__ import annotations

import json
import string
from collections.abc import Sequence

from astrid.anonymize import AnonymityReport
from astrid.data import Partition, validate_partition
from astrid.search import GroupingLadder, LadderEntry
from astrid.significance import RewardEstimate, TestReport

LADDER_FORMAT = "astrid.ladder/1"
TEST_FORMAT = "astrid.test/1"
ANON_FORMAT = "astrid.anonymity/1"


def _letters(i: int) -> str:
    # A..Z, then AA, AB, ... for groupings with more than 26 groups
    out = ""
    i += 1
    while i:
        i, r = divmod(i - 1, 26)
        out = string.ascii_uppercase[r] + out
    return out


def partition_to_json(p: Partition) -> list[list[int]]:
    return [[j + 1 for j in g] for g in p.groups]


def partition_from_json(groups: Sequence[Sequence[int]]) -> Partition:
    m = sum(len(g) for g in groups)
    return validate_partition([[j - 1 for j in g] for g in groups], m)


def summary_to_json(s: RewardEstimate) -> dict:
    return {"mean": s.mean, "min": s.min, "max": s.max, "sd": s.sd, "replicates": s.replicates}


def report_to_json(r: TestReport) -> dict:
    return {
        "partition": partition_to_json(r.partition),
        "baseline_accuracy": r.baseline_accuracy,
        "permuted_accuracies": list(r.permuted_accuracies),
        "R": r.R,
        "p_value": r.p_value,
        "alpha": r.alpha,
        "rejected": r.rejected,
    }


def report_from_json(doc: dict) -> TestReport:
    return TestReport(
        partition_from_json(doc["partition"]),
        float(doc["baseline_accuracy"]),
        tuple(float(a) for a in doc["permuted_accuracies"]),
        float(doc["p_value"]),
        float(doc["alpha"]),
        bool(doc["rejected"]),
    )


def ladder_to_json(ladder: GroupingLadder, column_names: Sequence[str] | None = None) -> dict:
    entries = []
    for e in ladder.entries:
        entries.append({
            "k": e.k,
            "partition": partition_to_json(e.partition),
            "summary": None if e.summary is None else summary_to_json(e.summary),
            "report": None if e.report is None else report_to_json(e.report),
        })
    doc = {
        "format": LADDER_FORMAT,
        "m": ladder.m,
        "ordering": [j + 1 for j in ladder.ordering],
        "boundary_rewards": list(ladder.boundary_rewards),
        "baseline_accuracy": ladder.baseline_accuracy,
        "oracle_calls": ladder.oracle_calls,
        "selected_k": ladder.selected_k,
        "entries": entries,
    }
    if column_names is not None:
        doc["columns"] = list(column_names)
    return doc


def ladder_from_json(doc: dict) -> GroupingLadder:
    if doc.get("format") != LADDER_FORMAT:
        raise ValueError(f"not a {LADDER_FORMAT} document")
    entries = []
    for e in doc["entries"]:
        report = None if e["report"] is None else report_from_json(e["report"])
        summary = None if report is None else report.summary()
        entries.append(LadderEntry(int(e["k"]), partition_from_json(e["partition"]), summary, report))
    return GroupingLadder(
        tuple(j - 1 for j in doc["ordering"]),
        tuple(float(t) for t in doc["boundary_rewards"]),
        tuple(entries),
        doc["baseline_accuracy"],
        int(doc["oracle_calls"]),
        doc["selected_k"],
    )


def anonymity_to_json(r: AnonymityReport) -> dict:
    return {
        "format": ANON_FORMAT,
        "partition": partition_to_json(r.partition),
        "replicates": r.replicates,
        "unique_original_rows": r.unique_original_rows,
        "intact_rows": list(r.intact_rows),
        "p_anon": r.p_anon,
    }


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _fmt(x: float | None) -> str:
    return "" if x is None else f"{x:.3f}"


def group_cells(partition: Partition, ordering: Sequence[int]) -> list[str]:
    """One cell per column in ``ordering``; same letter = same group."""
    owner = partition.group_of()
    letters: dict[int, str] = {}
    cells = []
    for pos, j in enumerate(ordering):
        g = owner[j]
        if g not in letters:
            letters[g] = _letters(len(letters))
        first = pos == 0 or owner[ordering[pos - 1]] != g
        last = pos == len(ordering) - 1 or owner[ordering[pos + 1]] != g
        cells.append(("(" if first else "") + letters[g] + (")" if last else ""))
    return cells


def render_ladder(ladder: GroupingLadder, column_names: Sequence[str]) -> str:
    names = [column_names[j] for j in ladder.ordering]
    head = ["", "k", "acc_ave", "acc_min", "acc_max", "sd", "p"] + names
    rows = []
    for e in ladder.entries:
        s = e.summary
        mark = "*" if e.k == ladder.selected_k else ""
        if s is None:
            stats = [_fmt(ladder.baseline_accuracy), "", "", "", ""]
        else:
            stats = [_fmt(s.mean), _fmt(s.min), _fmt(s.max), _fmt(s.sd), _fmt(e.p_value)]
        rows.append([mark, str(e.k)] + stats + group_cells(e.partition, ladder.ordering))
    widths = [max(len(r[i]) for r in [head] + rows) for i in range(len(head))]
    lines = ["  ".join(c.rjust(w) for c, w in zip(r, widths)).rstrip() for r in [head] + rows]
    if ladder.selected_k is not None:
        chosen = ladder.entry(ladder.selected_k).partition
        lines.append("")
        lines.append(f"selected k = {ladder.selected_k}: S = {_named(chosen, column_names)}")
    last = ladder.entries[-1]
    if last.report is not None:
        lines.append(f"all-singleton test (p_OG) = {_fmt(last.p_value)}")
    return "\n".join(lines) + "\n"


def _named(p: Partition, column_names: Sequence[str]) -> str:
    return "{" + ", ".join("{" + ", ".join(column_names[j] for j in g) + "}" for g in p.groups) + "}"


def render_test(r: TestReport, column_names: Sequence[str]) -> str:
    s = r.summary()
    verdict = "rejected" if r.rejected else "not rejected"
    return (
        f"partition      {_named(r.partition, column_names)}\n"
        f"baseline acc   {_fmt(r.baseline_accuracy)}\n"
        f"permuted acc   mean {_fmt(s.mean)}  min {_fmt(s.min)}  max {_fmt(s.max)}  sd {_fmt(s.sd)}  (R = {r.R})\n"
        f"p-value        {_fmt(r.p_value)}\n"
        f"decision       {verdict} at alpha = {r.alpha:g}\n"
    )


def render_anonymity(r: AnonymityReport) -> str:
    return (
        f"unique original rows  {r.unique_original_rows}\n"
        f"replicates            {r.replicates}\n"
        f"mean intact rows      {sum(r.intact_rows) / r.replicates:.2f}\n"
        f"P_anon                {r.p_anon:.4f}\n"
    )
