"""Dataset ingestion, stream replay, run/sweep execution and report emission.

Config files are flat `key = value` text ('#' comments). Documented keys:

    algorithm   threshold | threshold-known-tau | extension |
                extension-known-tau | randomized
    dataset     hard:k=3;h=9 | cut:PATH | cut-directed:PATH | coverage:PATH
    k           capacity (integer)
    epsilon     accuracy in (0, 1]
    alpha       offline approximation factor (defaults to the offline's own)
    offline     brute-force | random-greedy | plain-greedy
    p           solution count override (threshold) / increment (extension)
    seed        integer seed (randomized algorithms, shuffled orders)
    order       file | shuffle(SEED)
    limit       optional stream prefix length
    derivative_mode  exact | sampled      (extension variants)
    samples     sample count for sampled derivatives
    tau         known estimate of the optimum (known-tau variants only)
    rounding    pipage | swap             (extension variants)
    compute_opt true | false (default true; skipped when over the brute cap)
    audit       optional path for the line-delimited accept/reject log

Reports are JSON objects with stable key order; sweeps emit CSV.
"""

import csv
import io
import json
import math
import os
import time
from itertools import product

from ._util import rng_from
from .errors import InputError
from .extension_stream import run_extension, run_extension_with_guesses
from .offline import BRUTE_FORCE_CAP, _subset_count, brute_force, make_offline
from .oracles import (load_coverage, load_edge_list, make_hard_instance)
from .randomized_stream import run_randomized_with_guesses
from .threshold_stream import Config, run_full, run_simplified

ALGORITHMS = ("threshold", "threshold-known-tau", "extension",
              "extension-known-tau", "randomized")

REPORT_FIELDS = ("algorithm", "config", "final_value", "opt_value", "ratio",
                 "peak_stored_elements", "oracle_calls",
                 "max_marginals_per_element", "wall_time_sec", "seed",
                 "invariant_violations", "solution")


def parse_config(text: str) -> dict:
    """Flat key-value config; later assignments win."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InputError(f"config line {lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def serialize_config(config: dict) -> str:
    return "".join(f"{key} = {config[key]}\n" for key in sorted(config))


def load_config(path) -> dict:
    with open(path) as fh:
        return parse_config(fh.read())


def build_oracle(dataset: str, base_dir="."):
    """Instantiate the oracle named by a dataset string."""
    if dataset.startswith("hard:"):
        params = {}
        for part in dataset[len("hard:"):].split(";"):
            if "=" not in part:
                raise InputError(f"malformed hard-instance spec {dataset!r}")
            key, value = part.split("=", 1)
            params[key.strip()] = int(value)
        if set(params) != {"k", "h"}:
            raise InputError(f"hard instance needs k= and h=, got {dataset!r}")
        return make_hard_instance(params["k"], params["h"])
    if dataset.startswith("cut:"):
        return load_edge_list(os.path.join(base_dir, dataset[len("cut:"):]))
    if dataset.startswith("cut-directed:"):
        return load_edge_list(os.path.join(base_dir, dataset[len("cut-directed:"):]),
                              directed=True)
    if dataset.startswith("coverage:"):
        return load_coverage(os.path.join(base_dir, dataset[len("coverage:"):]))
    raise InputError(f"unknown dataset {dataset!r}; use hard:/cut:/cut-directed:/coverage:")


def build_stream(n: int, order: str, limit=None) -> list:
    """Element order for one run; shuffle(seed) is a seeded permutation."""
    if order == "file" or order == "":
        stream = list(range(n))
    elif order.startswith("shuffle(") and order.endswith(")"):
        seed = int(order[len("shuffle("):-1])
        stream = [int(e) for e in rng_from(seed).permutation(n)]
    else:
        raise InputError(f"unknown stream order {order!r}; use file or shuffle(SEED)")
    if limit is not None:
        stream = stream[: int(limit)]
    return stream


def _get(config, key, cast, default=None, required=False):
    if key not in config or config[key] == "":
        if required:
            raise InputError(f"config key {key!r} is required for this algorithm")
        return default
    try:
        return cast(config[key])
    except ValueError:
        raise InputError(f"config key {key!r} has malformed value {config[key]!r}")


def _bool(text: str) -> bool:
    if text.lower() in ("true", "1", "yes"):
        return True
    if text.lower() in ("false", "0", "no"):
        return False
    raise ValueError(text)


def run(config: dict, base_dir=".", out_path=None) -> dict:
    """Execute one algorithm on one stream and return (optionally write) a report."""
    algorithm = _get(config, "algorithm", str, required=True)
    if algorithm not in ALGORITHMS:
        raise InputError(f"unknown algorithm {algorithm!r}; choose from {ALGORITHMS}")
    dataset = _get(config, "dataset", str, required=True)
    oracle = build_oracle(dataset, base_dir)
    k = _get(config, "k", int, required=True)
    if k < 1:
        raise InputError(f"k must be >= 1, got {k}")
    epsilon = _get(config, "epsilon", float, default=0.2)
    seed = _get(config, "seed", int, default=0)
    offline_name = _get(config, "offline", str, default="brute-force")
    offline, offline_alpha = make_offline(offline_name, seed=seed)
    alpha = _get(config, "alpha", float, default=offline_alpha)
    order = _get(config, "order", str, default="file")
    limit = _get(config, "limit", int)
    stream = build_stream(oracle.n, order, limit)
    audit_path = _get(config, "audit", str)

    start = time.perf_counter()
    if algorithm == "threshold":
        cfg = Config(epsilon=epsilon, alpha=alpha, p=_get(config, "p", int))
        solution, _, stats = run_full(oracle, stream, k, cfg, offline)
    elif algorithm == "threshold-known-tau":
        tau = _get(config, "tau", float, required=True)
        cfg = Config(epsilon=epsilon, alpha=alpha, p=_get(config, "p", int))
        solution, _, stats = run_simplified(oracle, stream, k, tau, cfg, offline)
    elif algorithm == "extension":
        solution, _, stats = run_extension_with_guesses(
            oracle, stream, k, epsilon, alpha=alpha, offline=offline,
            derivative_mode=_get(config, "derivative_mode", str),
            samples=_get(config, "samples", int), seed=seed,
            rounding_mode=_get(config, "rounding", str, default="pipage"))
    elif algorithm == "extension-known-tau":
        tau = _get(config, "tau", float, required=True)
        solution, _, stats = run_extension(
            oracle, stream, k, tau, p=_get(config, "p", float, default=epsilon / 2),
            alpha=alpha, offline=offline,
            derivative_mode=_get(config, "derivative_mode", str),
            samples=_get(config, "samples", int), seed=seed,
            rounding_mode=_get(config, "rounding", str, default="pipage"))
    else:  # randomized
        solution, _, stats = run_randomized_with_guesses(
            oracle, stream, k, epsilon, alpha=alpha, offline=offline, seed=seed)
    wall = time.perf_counter() - start

    final_value = oracle.evaluate(solution)
    opt_value = None
    ratio = None
    if _get(config, "compute_opt", _bool, default=True):
        if _subset_count(len(stream), k) <= BRUTE_FORCE_CAP:
            opt_value = oracle.evaluate(brute_force(oracle, stream, k).set)
            ratio = final_value / opt_value if opt_value > 0 else 1.0

    if audit_path:
        _write_audit(audit_path, stats.audit)

    report = {
        "algorithm": algorithm,
        "config": {key: config[key] for key in sorted(config)},
        "final_value": final_value,
        "opt_value": opt_value,
        "ratio": ratio,
        "peak_stored_elements": stats.peak_stored,
        "oracle_calls": oracle.calls,
        "max_marginals_per_element": stats.max_marginals_per_element,
        "wall_time_sec": wall,
        "seed": seed,
        "invariant_violations": stats.violations,
        "solution": [int(e) for e in solution],
    }
    if out_path:
        write_report(report, out_path)
    return report


def report_json(report: dict) -> str:
    ordered = {key: report[key] for key in REPORT_FIELDS}
    return json.dumps(ordered, indent=2, sort_keys=False)


def write_report(report: dict, path):
    tmp = f"{path}.tmp"
    with open(tmp, "w") as fh:
        fh.write(report_json(report) + "\n")
    os.replace(tmp, path)  # atomic per-run write


def _write_audit(path, records):
    tmp = f"{path}.tmp"
    with open(tmp, "w") as fh:
        for rec in records:
            fields = " ".join(f"{key}={rec[key]}" for key in rec)
            fh.write(fields + "\n")
    os.replace(tmp, path)


SWEEP_GRID_KEYS = ("algorithm", "epsilon", "k", "seed", "dataset")
SWEEP_COLUMNS = ("algorithm", "dataset", "k", "epsilon", "seed", "final_value",
                 "opt_value", "ratio", "peak_stored_elements", "oracle_calls",
                 "max_marginals_per_element", "invariant_violations",
                 "value_mean", "value_sigma")


def sweep(config: dict, base_dir=".", out_path=None) -> list:
    """Cartesian product over comma-separated grid keys; CSV rows + summaries."""
    grids = {}
    for key in SWEEP_GRID_KEYS:
        if key in config:
            grids[key] = [v.strip() for v in config[key].split(",")]
    fixed = {key: v for key, v in config.items() if key not in grids}
    rows = []
    combos = list(product(*grids.values()))
    names = list(grids)
    for combo in combos:
        run_config = dict(fixed)
        run_config.update(dict(zip(names, combo)))
        report = run(run_config, base_dir=base_dir)
        row = {col: report.get(col, report["config"].get(col, ""))
               for col in SWEEP_COLUMNS}
        row["value_mean"] = ""
        row["value_sigma"] = ""
        rows.append(row)
    rows.extend(_seed_summaries(rows))
    if out_path:
        tmp = f"{out_path}.tmp"
        with open(tmp, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=SWEEP_COLUMNS)
            writer.writeheader()
            writer.writerows(rows)
        os.replace(tmp, out_path)
    return rows


def _seed_summaries(rows):
    """mean/sigma summary rows per configuration group with multiple seeds."""
    groups = {}
    for row in rows:
        key = (row["algorithm"], row["dataset"], row["k"], row["epsilon"])
        groups.setdefault(key, []).append(row)
    summaries = []
    for key, group in groups.items():
        if len(group) < 2 or len({r["seed"] for r in group}) < 2:
            continue
        values = [float(r["final_value"]) for r in group]
        mean = sum(values) / len(values)
        var = sum((v - mean) ** 2 for v in values) / (len(values) - 1)
        summary = dict.fromkeys(SWEEP_COLUMNS, "")
        summary.update({"algorithm": key[0], "dataset": key[1], "k": key[2],
                        "epsilon": key[3], "seed": "summary",
                        "value_mean": mean, "value_sigma": math.sqrt(var)})
        summaries.append(summary)
    return summaries


def sweep_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=SWEEP_COLUMNS)
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def opt(dataset: str, k: int, base_dir=".") -> dict:
    """Exact brute-force optimum for a dataset, used by the acceptance checks."""
    oracle = build_oracle(dataset, base_dir)
    result = brute_force(oracle, range(oracle.n), k)
    return {"dataset": dataset, "k": k,
            "opt_value": oracle.evaluate(result.set),
            "opt_set": [int(e) for e in result.set]}
