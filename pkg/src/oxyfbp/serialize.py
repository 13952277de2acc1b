"""CSV/JSON emission for trajectories, profiles and comparison reports."""

from __future__ import annotations

import csv
import io
import json

from .model import Method, State, Termination, Trajectory
from .reference import ComparisonReport

SIG = 12


def fmt(x: float) -> str:
    return format(float(x), f".{SIG}g")


def _num(x: float):
    # JSON keeps the same 12 significant digits as the CSV path.
    return float(fmt(x))


def trajectory_to_csv(traj: Trajectory) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "s", "a"])
    for p in traj.samples:
        w.writerow([fmt(p.t), fmt(p.s), fmt(p.a)])
    return buf.getvalue()


def trajectory_from_csv(text: str, method: Method = Method.DEG6,
                        termination: Termination = Termination.HORIZON_REACHED) -> Trajectory:
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames != ["t", "s", "a"]:
        raise ValueError(f"expected header t,s,a, got {reader.fieldnames}")
    samples = tuple(State(float(r["t"]), float(r["s"]), float(r["a"])) for r in reader)
    return Trajectory(method, samples, termination)


def trajectory_to_dict(traj: Trajectory) -> dict:
    doc = {
        "method": traj.method.value,
        "termination": traj.termination.value,
        "samples": [{"t": _num(p.t), "s": _num(p.s), "a": _num(p.a)} for p in traj.samples],
    }
    if traj.event is not None:
        ev = traj.event
        doc["event"] = {
            "kind": ev.kind.value,
            "t": _num(ev.t_event),
            "s": _num(ev.state.s),
            "a": _num(ev.state.a),
        }
    if traj.extinction_estimate is not None:
        doc["extinction_time_estimate"] = _num(traj.extinction_estimate)
    return doc


def trajectory_to_json(traj: Trajectory) -> str:
    return json.dumps(trajectory_to_dict(traj), indent=1) + "\n"


def profiles_to_csv(profiles) -> str:
    """``profiles`` is a sequence of ``(state, x, u)``; one ``x,u`` block per time."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for i, (st, xs, us) in enumerate(profiles):
        if i:
            buf.write("\n")
        buf.write(f"# t={fmt(st.t)} s={fmt(st.s)} a={fmt(st.a)}\n")
        w.writerow(["x", "u"])
        for x, u in zip(xs, us):
            w.writerow([fmt(x), fmt(u)])
    return buf.getvalue()


def parse_profile_blocks(text: str) -> list[tuple[float, list[tuple[float, float]]]]:
    blocks = []
    for chunk in text.strip("\n").split("\n\n"):
        lines = chunk.splitlines()
        t = float(lines[0].split()[1].split("=")[1])
        rows = [tuple(map(float, ln.split(","))) for ln in lines[2:]]
        blocks.append((t, rows))
    return blocks


def profiles_to_json(method: Method, profiles) -> str:
    doc = {
        "method": method.value,
        "profiles": [
            {"t": _num(st.t), "s": _num(st.s), "a": _num(st.a),
             "x": [_num(v) for v in xs], "u": [_num(v) for v in us]}
            for st, xs, us in profiles
        ],
    }
    return json.dumps(doc, indent=1) + "\n"


def report_to_csv(report: ComparisonReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "reference", "computed", "abs_error", "tolerance", "status"])
    for r in report.rows:
        status = "pass" if r.ok else "FAIL"
        if not r.graded:
            status = "info"
        if r.computed is None:
            status = "missing"
        w.writerow([
            fmt(r.t), fmt(r.reference),
            "" if r.computed is None else fmt(r.computed),
            "" if r.abs_error is None else fmt(r.abs_error),
            "" if r.tolerance is None else fmt(r.tolerance),
            status,
        ])
    return buf.getvalue()


def report_to_json(report: ComparisonReport, method: Method) -> str:
    doc = {
        "method": method.value,
        "table": report.table,
        "column": report.column.value,
        "rows": [
            {"t": r.t, "reference": r.reference,
             "computed": None if r.computed is None else _num(r.computed),
             "abs_error": None if r.abs_error is None else _num(r.abs_error),
             "tolerance": r.tolerance, "ok": r.ok, "graded": r.graded}
            for r in report.rows
        ],
        "max_abs_error": _num(report.max_abs_error),
        "rows_within_tolerance": report.rows_within_tolerance,
        "graded_rows": report.graded_rows,
        "truncated": report.truncated,
        "passed": report.passed,
    }
    return json.dumps(doc, indent=1) + "\n"
