"""Seeded Monte-Carlo sweeps and their CSV output.

Every (cell, seed) pair is one unit of work: its channels are drawn from
counter-derived substreams of the master seed, every scheme runs on that one
realization, and the rows come back in a fixed order.  Units share nothing,
so the table does not depend on the number of workers.
"""

import csv
import logging
import math
import os
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .channel import ArrayGeometry, fingerprint, generate_channels, scenario_rng
from .config import ConfigError
from .evaluation import PipelineCache, SchemeKind, run_scheme, xhaus_subsets

log = logging.getLogger(__name__)

SEED_ENV = "LDMCAST_MASTER_SEED"
RANDOM_PURPOSE = 0

PER_SEED_FIELDS = ("scenario_id", "seed", "scheme", "metric", "K", "K_prime", "N_tx", "N_rx", "L_rx",
                   "min_unicast_sinr", "unicast_se", "min_multicast_sinr", "feasible",
                   "ccp_iterations", "runtime_ms")
GROUP_FIELDS = ("scenario_id", "scheme", "metric", "K", "K_prime", "N_tx", "N_rx", "L_rx")
STAT_FIELDS = ("min_unicast_sinr", "unicast_se", "min_multicast_sinr", "ccp_iterations", "runtime_ms")
AGGREGATE_FIELDS = GROUP_FIELDS + ("n_seeds", "n_feasible", "feasibility_rate") + tuple(
    f"{kind}_{name}" for name in STAT_FIELDS for kind in ("mean", "std"))


def master_seed_from_env(cfg, environ=None):
    """Apply the ``LDMCAST_MASTER_SEED`` override, if set."""
    environ = os.environ if environ is None else environ
    raw = environ.get(SEED_ENV)
    if raw is None or raw.strip() == "":
        return cfg
    try:
        return cfg.with_(master_seed=int(raw))
    except ValueError:
        raise ConfigError(f"{SEED_ENV} must be an integer, got {raw!r}", "master_seed") from None


@dataclass
class ResultTable:
    """Per-seed rows in (cell, seed, scheme) order.

    ``fingerprints`` maps ``(scenario_id, seed)`` to the hash of the channel
    realization every scheme in that pair consumed.
    """

    rows: list = field(default_factory=list)
    fingerprints: dict = field(default_factory=dict)

    def select(self, scenario_id=None, scheme=None, metric=None):
        return [r for r in self.rows
                if (scenario_id is None or r["scenario_id"] == scenario_id)
                and (scheme is None or r["scheme"] == scheme)
                and (metric is None or r["metric"] == metric)]

    def aggregate(self):
        return aggregate_rows(self.rows)


def _scheme_columns(scheme):
    if scheme.tag == "BEAMWAVE":
        return "BEAMWAVE", scheme.metric
    if scheme.tag == "TDM":
        return f"TDM-{scheme.t_u:g}", scheme.metric
    return scheme.tag, ""


def _run_unit(unit):
    scenario_id, cfg, seed, labels, timing = unit
    geom = ArrayGeometry(cfg.n_tx, cfg.n_rx)
    channels = generate_channels(cfg.master_seed, seed, cfg.k, geom, cfg.paths, cfg.aoa_range, cfg.aod_range)
    fp = fingerprint(channels)
    cache = PipelineCache(channels, cfg)
    rows = []
    for label in labels:
        scheme = SchemeKind.parse(label)
        res = run_scheme(channels, cfg, scheme, scenario_rng(cfg.master_seed, seed, RANDOM_PURPOSE), cache)
        name, metric = _scheme_columns(scheme)
        mc = res.multicast_sinrs
        rows.append(dict(
            scenario_id=scenario_id, seed=seed, scheme=name, metric=metric,
            K=cfg.k, K_prime=cfg.k_prime, N_tx=cfg.n_tx, N_rx=cfg.n_rx, L_rx=cfg.l_rx,
            min_unicast_sinr=float(res.min_unicast_sinr), unicast_se=float(res.unicast_se),
            min_multicast_sinr=float(min(mc)) if mc is not None and len(mc) else math.nan,
            feasible=bool(res.feasible), ccp_iterations=int(res.iterations),
            runtime_ms=float(res.runtime_ms) if timing else 0.0,
            fingerprint=fp, selected=res.selected, converged=res.converged, failure=res.failure))
    if fingerprint(channels) != fp:
        raise RuntimeError("channel realization changed while schemes were running")
    return fp, rows


def experiment_units(cfg, sweep, timing=True):
    labels = tuple(SchemeKind.parse(s).label for s in sweep.schemes)
    cells = list(sweep.cells(cfg))
    for _, cell_cfg in cells:
        if any(SchemeKind.parse(s).tag == "XHAUS" for s in labels):
            xhaus_subsets(cell_cfg.k, cell_cfg.k_prime, cell_cfg.xhaus_cap)
    return [(sid, cell_cfg, seed, labels, timing) for sid, cell_cfg in cells for seed in range(cell_cfg.n_seeds)]


def run_experiment(cfg, sweep, workers=1, timing=True, progress=None):
    """Run every scheme of ``sweep`` on every (cell, seed) pair.

    Infeasible realizations are recorded with ``feasible=False``.  With
    ``timing=False`` the runtime column is zero, which makes the output
    byte-identical across runs and worker counts.
    """
    units = experiment_units(cfg, sweep, timing)
    table = ResultTable()
    if workers <= 1:
        results = map(_run_unit, units)
    else:
        pool = ProcessPoolExecutor(max_workers=workers)
        results = pool.map(_run_unit, units, chunksize=1)
    try:
        for i, (unit, (fp, rows)) in enumerate(zip(units, results)):
            table.fingerprints[(unit[0], unit[2])] = fp
            for row in rows:
                log.info("%s seed=%d %s%s feasible=%s channels=%s", row["scenario_id"], row["seed"],
                         row["scheme"], f"-{row['metric']}" if row["metric"] else "", row["feasible"], fp)
            table.rows.extend(rows)
            if progress is not None:
                progress(i + 1, len(units))
    finally:
        if workers > 1:
            pool.shutdown()
    return table


def aggregate_rows(rows):
    """Mean and sample standard deviation per (cell, scheme) over feasible seeds."""
    groups = {}
    for row in rows:
        groups.setdefault(tuple(row[f] for f in GROUP_FIELDS), []).append(row)
    out = []
    for key, members in groups.items():
        ok = [r for r in members if r["feasible"]]
        agg = dict(zip(GROUP_FIELDS, key))
        agg.update(n_seeds=len(members), n_feasible=len(ok), feasibility_rate=len(ok) / len(members))
        for name in STAT_FIELDS:
            vals = [float(r[name]) for r in ok]
            agg[f"mean_{name}"] = statistics.fmean(vals) if vals else math.nan
            agg[f"std_{name}"] = statistics.stdev(vals) if len(vals) > 1 else math.nan
        out.append(agg)
    return out


def _fmt(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _write(path, fields, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(fields)
        for row in rows:
            writer.writerow([_fmt(row[f]) for f in fields])


def emit_csv(table, destination):
    """Write ``per_seed.csv`` and ``aggregate.csv`` into the directory ``destination``."""
    os.makedirs(destination, exist_ok=True)
    rows = table.rows if isinstance(table, ResultTable) else list(table)
    per_seed = os.path.join(destination, "per_seed.csv")
    aggregate = os.path.join(destination, "aggregate.csv")
    _write(per_seed, PER_SEED_FIELDS, rows)
    _write(aggregate, AGGREGATE_FIELDS, aggregate_rows(rows))
    return per_seed, aggregate


_INT_COLUMNS = {"seed", "K", "K_prime", "N_tx", "N_rx", "L_rx", "ccp_iterations", "n_seeds", "n_feasible"}
_TEXT_COLUMNS = {"scenario_id", "scheme", "metric"}


def read_csv(path):
    """Load a file written by :func:`emit_csv` back into typed dicts."""
    with open(path, newline="") as fh:
        out = []
        for raw in csv.DictReader(fh):
            row = {}
            for k, v in raw.items():
                if k in _TEXT_COLUMNS:
                    row[k] = v
                elif k == "feasible":
                    row[k] = v == "true"
                elif k in _INT_COLUMNS:
                    row[k] = int(v)
                else:
                    row[k] = float(v)
            out.append(row)
    return out
