"""Timing reports for the codecs and the call path.

Two report producers (`bench_serialize`, `bench_calls`) return plain
report Values; `render_report` writes the same numbers as CSV and
renders bar charts next to them.  matplotlib is imported lazily so the
library itself never pays for it.
"""

import csv
import logging
import os
import time

from .codec import parse_json, dump_json
from .cbor import dump_cbor, load_cbor
from .errors import IoError
from .value import Value
from .functions import wrap, arg

log = logging.getLogger(__name__)

_MS = 1e6  # ns per ms


def _best_of(fn, repeat):
    best = None
    for _ in range(repeat):
        t0 = time.perf_counter_ns()
        out = fn()
        dt = time.perf_counter_ns() - t0
        if best is None or dt < best[0]:
            best = (dt, out)
    return best


def bench_serialize(paths, repeat=3):
    """Per-file parse/dump timings, milliseconds, plus output sizes.

    Returns an Array report Value; one row per input file.  Missing
    files raise IoError before any timing runs.
    """
    for p in paths:
        if not os.path.isfile(p):
            raise IoError(f"no such file: {p}")
    rows = []
    for p in paths:
        with open(p, "rb") as f:
            raw = f.read()
        t_parse, v = _best_of(lambda: parse_json(raw), repeat)
        t_dump, js = _best_of(lambda: dump_json(v), repeat)
        t_cbor, cb = _best_of(lambda: dump_cbor(v), repeat)
        t_load, _ = _best_of(lambda: load_cbor(cb), repeat)
        rows.append(Value({
            "file": os.path.basename(p),
            "bytes": len(raw),
            "parse_ms": t_parse / _MS,
            "dump_json_ms": t_dump / _MS,
            "dump_cbor_ms": t_cbor / _MS,
            "load_cbor_ms": t_load / _MS,
            "json_bytes": len(js.encode("utf-8")),
            "cbor_bytes": len(cb),
        }))
        log.info("bench %s: parse %.2f ms, dump %.2f ms",
                 os.path.basename(p), t_parse / _MS, t_dump / _MS)
    return Value(rows)


def bench_calls(n=1_000_000):
    """Dynamic-invoke overhead against a direct call of the same body.

    Times n calls of a two-integer add through the full dispatch path
    and through a plain host function, reporting ns/call and the ratio.
    """
    n = int(n)
    if n <= 0:
        raise ValueError("call count must be positive")

    def add(a, b):
        return a + b

    dyn = wrap(add, arg("a", type=int), arg("b", type=int), name="add")
    assert dyn(1, 2).to_python() == 3

    r = range(n)
    t0 = time.perf_counter_ns()
    for _ in r:
        add(1, 2)
    direct_ns = (time.perf_counter_ns() - t0) / n

    t0 = time.perf_counter_ns()
    for _ in r:
        dyn(1, 2)
    dynamic_ns = (time.perf_counter_ns() - t0) / n

    return Value({
        "calls": n,
        "direct_ns": direct_ns,
        "dynamic_ns": dynamic_ns,
        "ratio": dynamic_ns / direct_ns if direct_ns else 0.0,
    })


_SERIALIZE_COLS = ["file", "bytes", "parse_ms", "dump_json_ms",
                   "dump_cbor_ms", "load_cbor_ms", "json_bytes", "cbor_bytes"]
_CALL_COLS = ["calls", "direct_ns", "dynamic_ns", "ratio"]


def _fmt(x):
    if isinstance(x, float):
        return f"{x:.3f}"
    return str(x)


def serialize_csv_rows(report):
    yield _SERIALIZE_COLS
    for row in report.to_python():
        yield [_fmt(row[c]) for c in _SERIALIZE_COLS]


def calls_csv_rows(report):
    yield _CALL_COLS
    row = report.to_python()
    yield [_fmt(row[c]) for c in _CALL_COLS]


def render_report(out_dir, serialize_report=None, calls_report=None):
    """Write CSV files and PNG charts under out_dir.

    Returns the list of files written.  Chart rendering uses the Agg
    backend so it works headless.
    """
    os.makedirs(out_dir, exist_ok=True)
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    written = []

    def write_csv(name, rows):
        path = os.path.join(out_dir, name)
        with open(path, "w", newline="") as f:
            csv.writer(f).writerows(rows)
        written.append(path)

    if serialize_report is not None and len(serialize_report):
        write_csv("serialize.csv", serialize_csv_rows(serialize_report))
        rows = serialize_report.to_python()
        names = [r["file"] for r in rows]
        metrics = ["parse_ms", "dump_json_ms", "dump_cbor_ms", "load_cbor_ms"]
        fig, ax = plt.subplots(figsize=(8, 4.5))
        width = 0.2
        for i, m in enumerate(metrics):
            xs = [j + (i - 1.5) * width for j in range(len(names))]
            ax.bar(xs, [r[m] for r in rows], width, label=m)
        ax.set_xticks(range(len(names)))
        ax.set_xticklabels(names, rotation=15, ha="right")
        ax.set_ylabel("milliseconds")
        ax.set_title("codec timings per corpus file")
        ax.legend()
        fig.tight_layout()
        path = os.path.join(out_dir, "serialize.png")
        fig.savefig(path, dpi=110)
        plt.close(fig)
        written.append(path)

        fig, ax = plt.subplots(figsize=(6, 4))
        xs = range(len(names))
        ax.bar([x - 0.18 for x in xs], [r["json_bytes"] for r in rows],
               0.36, label="json")
        ax.bar([x + 0.18 for x in xs], [r["cbor_bytes"] for r in rows],
               0.36, label="cbor")
        ax.set_xticks(list(xs))
        ax.set_xticklabels(names, rotation=15, ha="right")
        ax.set_ylabel("encoded bytes")
        ax.set_title("encoded size, json vs cbor")
        ax.legend()
        fig.tight_layout()
        path = os.path.join(out_dir, "sizes.png")
        fig.savefig(path, dpi=110)
        plt.close(fig)
        written.append(path)

    if calls_report is not None:
        write_csv("calls.csv", calls_csv_rows(calls_report))
        row = calls_report.to_python()
        fig, ax = plt.subplots(figsize=(5, 4))
        ax.bar(["direct", "dynamic"], [row["direct_ns"], row["dynamic_ns"]],
               color=["#777777", "#3465a4"])
        ax.set_ylabel("ns per call")
        ax.set_title(f"call overhead, {row['calls']} calls "
                     f"({row['ratio']:.1f}x)")
        fig.tight_layout()
        path = os.path.join(out_dir, "calls.png")
        fig.savefig(path, dpi=110)
        plt.close(fig)
        written.append(path)

    return written
