"""Experiment driver: configuration, Monte Carlo loops, CSV wire format.

Each experiment kind maps a configuration to a flat list of result
records. Records are plain rows; the CSV emitted from them is the
package's external interface (the plotting package consumes nothing
else). Runs are deterministic: per-sample random streams are derived
from (seed, n, L, sample index), aggregation order is fixed, and
formatting is locale-independent, so identical configs produce
byte-identical files.

Layer-depth conventions in records: L = -1 marks rows that do not
depend on depth (closed-form references, fitted speeds, threshold
depths). bond is 1-based to match profile-plot labeling; bond = -1
marks whole-state scalars. n = 0 marks the pooled cross-size fit.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .analysis import (
    AggregatedSeries,
    delta_s_bar,
    entangling_layers,
    expressibility,
    fit_entangling_speed,
    normalized_entropy,
)
from .circuits import (
    BLOCK_KINDS,
    MODES,
    ParamVector,
    QnnSpec,
    Topology,
    run_qnn,
    sample_params,
)
from .dense import dense_bond_entropies, dense_fidelities, run_qnn_dense
from .errors import (
    ConfigError,
    CsvSchemaError,
    InsufficientDataError,
    NotConvergedError,
)
from .gf2 import verify_full_equals_reversed_linear
from .haar import haar_average, haar_max, haar_profile
from .mps import DENSE_MAX_QUBITS

EXPERIMENT_KINDS = (
    "bond-profile",
    "reupload-compare",
    "scaling-ltilde",
    "speed",
    "expressibility",
    "cnot-check",
    "haar-table",
)

BACKENDS = ("auto", "dense", "mps")

# auto picks the exact vectorized backend up to this size, the
# tensor-network engine beyond it.
AUTO_DENSE_MAX = 12

# Depth loops with an early-stop rule stop once the running mean
# clears these targets; both sit safely above the thresholds the
# derived metrics actually consume (0.9 for l_tilde, 0.5 for the
# speed-fit window), so stopping cannot change any reported value.
SPEED_STOP = 0.6

# Batch sizing for the dense backend: cap the number of amplitudes
# carried at once so temporaries stay within a few tens of MB.
_DENSE_CHUNK_AMPLITUDES = 1 << 20

CSV_HEADER = (
    "experiment,n,L,bond,metric,mean,stderr,samples,seed,chi_max,epsilon,max_discarded"
)


@dataclass(frozen=True)
class ResultRecord:
    """One aggregated scalar produced by an experiment."""

    experiment: str
    n: int
    L: int
    bond: int
    metric: str
    mean: float
    stderr: float
    samples: int
    seed: int
    chi_max: int
    epsilon: float
    max_discarded: float


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything an experiment run depends on.

    Field types double as the coercion rules for config files: int
    fields parse as int, tuple fields as comma-separated ints.
    """

    experiment: str
    n_values: tuple[int, ...] = (8,)
    l_max: int = 16
    l_values: tuple[int, ...] | None = None
    samples: int = 100
    seed: int = 1234
    feature: str = "CZZ"
    variational: str = "C2"
    topology: str = "linear"
    mode: str = "alternated"
    epsilon: float = 1e-9
    chi_max: int = 1024
    bins: int = 75
    backend: str = "auto"

    def validate(self) -> None:
        if self.experiment not in EXPERIMENT_KINDS:
            raise ConfigError(
                "experiment",
                f"unknown kind '{self.experiment}' "
                f"(expected one of {', '.join(EXPERIMENT_KINDS)})",
            )
        if not self.n_values:
            raise ConfigError("n_values", "need at least one qubit count")
        for n in self.n_values:
            if n < 2:
                raise ConfigError("n_values", f"qubit counts must be >= 2, got {n}")
        if self.l_values is not None:
            if not self.l_values:
                raise ConfigError("l_values", "explicit depth grid is empty")
            if any(l < 1 for l in self.l_values):
                raise ConfigError("l_values", "depths must be >= 1")
            if any(b <= a for a, b in zip(self.l_values, self.l_values[1:])):
                raise ConfigError("l_values", "depth grid must be strictly increasing")
        elif self.l_max < 1:
            raise ConfigError("l_max", f"must be >= 1, got {self.l_max}")
        if self.samples < 1:
            raise ConfigError("samples", f"must be >= 1, got {self.samples}")
        if self.seed < 0:
            raise ConfigError("seed", f"must be >= 0, got {self.seed}")
        for field_name in ("feature", "variational"):
            kind = getattr(self, field_name)
            if kind not in BLOCK_KINDS:
                raise ConfigError(
                    field_name,
                    f"unknown block '{kind}' (expected {', '.join(BLOCK_KINDS)})",
                )
        try:
            Topology.parse(self.topology)
        except Exception:
            raise ConfigError("topology", f"unknown topology '{self.topology}'")
        if self.mode not in MODES:
            raise ConfigError("mode", f"unknown mode '{self.mode}'")
        if not 0.0 <= self.epsilon < 1.0:
            raise ConfigError("epsilon", f"must lie in [0, 1), got {self.epsilon}")
        if self.chi_max < 1:
            raise ConfigError("chi_max", f"must be >= 1, got {self.chi_max}")
        if self.bins < 1:
            raise ConfigError("bins", f"must be >= 1, got {self.bins}")
        if self.backend not in BACKENDS:
            raise ConfigError(
                "backend",
                f"unknown backend '{self.backend}' (expected {', '.join(BACKENDS)})",
            )
        if self.backend == "dense":
            for n in self.n_values:
                if n > DENSE_MAX_QUBITS:
                    raise ConfigError(
                        "backend",
                        f"dense backend capped at n <= {DENSE_MAX_QUBITS}, got {n}",
                    )

    def depth_grid(self) -> tuple[int, ...]:
        if self.l_values is not None:
            return self.l_values
        return tuple(range(1, self.l_max + 1))

    def qnn_spec(self, n: int, layers: int, mode: str | None = None) -> QnnSpec:
        return QnnSpec(
            n=n,
            layers=layers,
            feature=self.feature,
            variational=self.variational,
            topology=Topology.parse(self.topology),
            mode=self.mode if mode is None else mode,
            epsilon=self.epsilon,
            chi_max=self.chi_max,
        )


# ----------------------------------------------------------------------
# config file parsing


_TUPLE_FIELDS = {"n_values", "l_values"}
_INT_FIELDS = {"l_max", "samples", "seed", "chi_max", "bins"}
_FLOAT_FIELDS = {"epsilon"}
_STR_FIELDS = {
    "experiment", "feature", "variational", "topology", "mode", "backend",
}
_CONFIG_FIELDS = _TUPLE_FIELDS | _INT_FIELDS | _FLOAT_FIELDS | _STR_FIELDS


def _coerce(key: str, raw: str):
    value = raw.strip()
    try:
        if key in _TUPLE_FIELDS:
            return tuple(int(tok) for tok in value.replace(",", " ").split())
        if key in _INT_FIELDS:
            return int(value)
        if key in _FLOAT_FIELDS:
            return float(value)
    except ValueError:
        raise ConfigError(key, f"cannot parse '{value}'")
    return value


def parse_config_text(text: str) -> dict:
    """Parse 'key = value' lines into config keyword arguments.

    Blank lines and '#' comments are skipped; unknown keys are errors
    (a typo must not silently fall back to a default).
    """
    out: dict = {}
    for num, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("config", f"line {num}: expected 'key = value'")
        key, _, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if key not in _CONFIG_FIELDS:
            raise ConfigError(key, f"line {num}: unknown config key")
        out[key] = _coerce(key, value)
    return out


def load_config(path: str, overrides: dict | None = None) -> ExperimentConfig:
    """Read a config file and apply CLI-style overrides on top."""
    try:
        with open(path, encoding="utf-8") as fh:
            values = parse_config_text(fh.read())
    except OSError as exc:
        raise ConfigError("config", f"cannot read '{path}': {exc}")
    if overrides:
        values.update(overrides)
    if "experiment" not in values:
        raise ConfigError("experiment", "missing (set it in the file or the CLI)")
    cfg = ExperimentConfig(**values)
    cfg.validate()
    return cfg


# ----------------------------------------------------------------------
# sampling machinery


def _worker_count() -> int:
    env = os.environ.get("QNN_THREADS")
    if env is not None:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError("QNN_THREADS", f"must be an integer, got '{env}'")
    return max(1, os.cpu_count() or 1)


def _use_dense(config: ExperimentConfig, n: int) -> bool:
    if config.backend == "dense":
        return True
    if config.backend == "mps":
        return False
    return n <= AUTO_DENSE_MAX


def _seed_seq(parts: tuple[int, ...]) -> np.random.SeedSequence:
    return np.random.SeedSequence(parts)


def _mps_bond_entropies(args) -> tuple[list[float], float]:
    """Worker: simulate one draw, return requested bond entropies."""
    spec, seed_parts, bonds = args
    pv = sample_params(spec, _seed_seq(seed_parts))
    state = run_qnn(spec, pv)
    return [state.bond_entropy(b) for b in bonds], state.discarded_total


def _map_samples(func, arg_list):
    workers = _worker_count()
    if workers == 1 or len(arg_list) < 2:
        return [func(a) for a in arg_list]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        chunk = max(1, len(arg_list) // (4 * workers))
        return list(pool.map(func, arg_list, chunksize=chunk))


def _stack_params(spec: QnnSpec, seed_parts_list) -> ParamVector:
    draws = [sample_params(spec, _seed_seq(p)) for p in seed_parts_list]
    inputs = np.stack([d.inputs for d in draws], axis=-1)
    weights = np.stack([d.weights for d in draws], axis=-1)
    return ParamVector(inputs=inputs, weights=weights)


def _dense_chunks(n: int, count: int):
    size = max(1, _DENSE_CHUNK_AMPLITUDES >> n)
    for start in range(0, count, size):
        yield start, min(start + size, count)


def sample_bond_entropies(
    config: ExperimentConfig,
    n: int,
    layers: int,
    bonds,
    mode: str | None = None,
    stream: int | None = None,
) -> tuple[np.ndarray, float]:
    """Monte Carlo bond entropies for one (n, L) cell.

    Returns (entropies of shape (samples, len(bonds)), max discarded
    weight across the batch). The per-sample streams depend only on
    (seed, n, L, i[, stream]), never on the backend, so dense and
    tensor-network runs see identical parameter draws.
    """
    bonds = list(bonds)
    spec = config.qnn_spec(n, layers, mode=mode)
    base = (config.seed, n, layers)
    parts = [
        base + ((i,) if stream is None else (i, stream))
        for i in range(config.samples)
    ]
    if _use_dense(config, n):
        out = np.empty((config.samples, len(bonds)))
        for lo, hi in _dense_chunks(n, config.samples):
            states = run_qnn_dense(spec, _stack_params(spec, parts[lo:hi]))
            out[lo:hi] = dense_bond_entropies(states, n, bonds)
        return out, 0.0
    rows = _map_samples(_mps_bond_entropies, [(spec, p, bonds) for p in parts])
    ents = np.array([r[0] for r in rows])
    max_disc = max((r[1] for r in rows), default=0.0)
    return ents, float(max_disc)


def _mps_fidelity(args) -> tuple[float, float]:
    spec, parts = args
    a = run_qnn(spec, sample_params(spec, _seed_seq(parts + (0,))))
    b = run_qnn(spec, sample_params(spec, _seed_seq(parts + (1,))))
    fid = min(1.0, abs(a.overlap(b)) ** 2)
    return fid, a.discarded_total + b.discarded_total


def sample_fidelities(
    config: ExperimentConfig, n: int, layers: int
) -> tuple[np.ndarray, float]:
    """Fidelities between independent draw pairs for one (n, L) cell."""
    spec = config.qnn_spec(n, layers)
    base = (config.seed, n, layers)
    parts = [base + (i,) for i in range(config.samples)]
    if _use_dense(config, n):
        fids = np.empty(config.samples)
        # Two state batches live at once, so halve the chunk size.
        for lo, hi in _dense_chunks(n + 1, config.samples):
            left = run_qnn_dense(
                spec, _stack_params(spec, [p + (0,) for p in parts[lo:hi]])
            )
            right = run_qnn_dense(
                spec, _stack_params(spec, [p + (1,) for p in parts[lo:hi]])
            )
            fids[lo:hi] = dense_fidelities(left, right)
        return fids, 0.0
    rows = _map_samples(_mps_fidelity, [(spec, p) for p in parts])
    fids = np.array([r[0] for r in rows])
    max_disc = max((r[1] for r in rows), default=0.0)
    return fids, float(max_disc)


def _mean_se(values: np.ndarray) -> tuple[float, float]:
    m = float(np.mean(values))
    if values.shape[0] < 2:
        return m, 0.0
    return m, float(np.std(values, ddof=1) / np.sqrt(values.shape[0]))


# ----------------------------------------------------------------------
# experiments


def _run_bond_profile(config: ExperimentConfig) -> list[ResultRecord]:
    records = []
    log2 = float(np.log(2.0))
    for n in config.n_values:
        ref = haar_profile(n)
        common = dict(
            experiment=config.experiment, n=n, seed=config.seed,
            chi_max=config.chi_max, epsilon=config.epsilon,
        )
        for b in range(n - 1):
            records.append(ResultRecord(
                L=-1, bond=b + 1, metric="haar_entropy",
                mean=float(ref.entropies[b]), stderr=0.0, samples=0,
                max_discarded=0.0, **common,
            ))
            records.append(ResultRecord(
                L=-1, bond=b + 1, metric="entropy_bound",
                mean=min(b + 1, n - 1 - b) * log2, stderr=0.0, samples=0,
                max_discarded=0.0, **common,
            ))
        for layers in config.depth_grid():
            ents, max_disc = sample_bond_entropies(
                config, n, layers, range(n - 1)
            )
            for b in range(n - 1):
                mean, se = _mean_se(ents[:, b])
                records.append(ResultRecord(
                    L=layers, bond=b + 1, metric="bond_entropy",
                    mean=mean, stderr=se, samples=config.samples,
                    max_discarded=max_disc, **common,
                ))
    return records


def _run_reupload_compare(config: ExperimentConfig) -> list[ResultRecord]:
    records = []
    for n in config.n_values:
        central = (n - 1) // 2
        common = dict(
            experiment=config.experiment, n=n, seed=config.seed,
            chi_max=config.chi_max, epsilon=config.epsilon,
            samples=config.samples,
        )
        for layers in config.depth_grid():
            # Paired draws: both layerings consume the same parameter
            # streams, so the contrast's error comes from differences.
            alt, disc_a = sample_bond_entropies(
                config, n, layers, [central], mode="alternated"
            )
            seq, disc_b = sample_bond_entropies(
                config, n, layers, [central], mode="sequential"
            )
            alt, seq = alt[:, 0], seq[:, 0]
            mean_alt, se_alt = _mean_se(alt)
            mean_seq, se_seq = _mean_se(seq)
            max_disc = max(disc_a, disc_b)
            records.append(ResultRecord(
                L=layers, bond=central + 1, metric="s_alt", mean=mean_alt,
                stderr=se_alt, max_discarded=max_disc, **common,
            ))
            records.append(ResultRecord(
                L=layers, bond=central + 1, metric="s_seq", mean=mean_seq,
                stderr=se_seq, max_discarded=max_disc, **common,
            ))
            denom = 0.5 * (mean_alt + mean_seq)
            if denom == 0.0:
                contrast, se_contrast = float("nan"), 0.0
            else:
                contrast = delta_s_bar(mean_alt, mean_seq)
                _, se_diff = _mean_se(alt - seq)
                se_contrast = se_diff / denom
            records.append(ResultRecord(
                L=layers, bond=-1, metric="delta_s_bar", mean=contrast,
                stderr=se_contrast, max_discarded=max_disc, **common,
            ))
    return records


def _run_scaling(config: ExperimentConfig) -> list[ResultRecord]:
    records = []
    for n in config.n_values:
        total_ref = haar_profile(n).total
        common = dict(
            experiment=config.experiment, n=n, seed=config.seed,
            chi_max=config.chi_max, epsilon=config.epsilon,
        )
        records.append(ResultRecord(
            L=-1, bond=-1, metric="haar_total", mean=total_ref, stderr=0.0,
            samples=0, max_discarded=0.0, **common,
        ))
        grid, means, ses = [], [], []
        max_disc_all = 0.0
        for layers in config.depth_grid():
            ents, max_disc = sample_bond_entropies(config, n, layers, range(n - 1))
            mean, se = _mean_se(ents.sum(axis=1))
            max_disc_all = max(max_disc_all, max_disc)
            records.append(ResultRecord(
                L=layers, bond=-1, metric="s_tot", mean=mean, stderr=se,
                samples=config.samples, max_discarded=max_disc, **common,
            ))
            grid.append(layers)
            means.append(mean)
            ses.append(se)
            if mean >= 0.9 * total_ref:
                break
        series = AggregatedSeries(
            l_values=np.array(grid), means=np.array(means), stderrs=np.array(ses)
        )
        try:
            depth = float(entangling_layers(series, total_ref))
        except NotConvergedError:
            depth = float("nan")
        records.append(ResultRecord(
            L=-1, bond=-1, metric="l_tilde", mean=depth, stderr=0.0,
            samples=config.samples, max_discarded=max_disc_all, **common,
        ))
    return records


def _run_speed(config: ExperimentConfig) -> list[ResultRecord]:
    records = []
    pooled_x, pooled_y, pooled_err = [], [], []
    for n in config.n_values:
        ref_max = haar_max(n)
        common = dict(
            experiment=config.experiment, seed=config.seed,
            chi_max=config.chi_max, epsilon=config.epsilon,
        )
        xs, ys, errs = [], [], []
        max_disc_all = 0.0
        for layers in config.depth_grid():
            ents, max_disc = sample_bond_entropies(config, n, layers, range(n - 1))
            # The normalized entropy is the peak of the sample-averaged
            # profile; its error bar comes from the peak bond's spread.
            profile = ents.mean(axis=0)
            peak = int(np.argmax(profile))
            mean = normalized_entropy(profile, n)
            _, se = _mean_se(ents[:, peak] / ref_max)
            max_disc_all = max(max_disc_all, max_disc)
            records.append(ResultRecord(
                n=n, L=layers, bond=-1, metric="s_tilde", mean=mean, stderr=se,
                samples=config.samples, max_discarded=max_disc, **common,
            ))
            xs.append(layers / n)
            ys.append(mean)
            errs.append(se)
            if mean > SPEED_STOP:
                break
        pooled_x += xs
        pooled_y += ys
        pooled_err += errs
        try:
            fit = fit_entangling_speed(
                np.array(xs), np.array(ys),
                np.array(errs) if all(e > 0 for e in errs) else None,
            )
            v, verr, used = fit.v_s, fit.v_s_err, fit.points_used
        except InsufficientDataError:
            v, verr, used = float("nan"), 0.0, 0
        records.append(ResultRecord(
            n=n, L=-1, bond=-1, metric="v_s", mean=v, stderr=verr,
            samples=used, max_discarded=max_disc_all, **common,
        ))
    try:
        fit = fit_entangling_speed(
            np.array(pooled_x), np.array(pooled_y),
            np.array(pooled_err) if all(e > 0 for e in pooled_err) else None,
        )
        v, verr, used = fit.v_s, fit.v_s_err, fit.points_used
    except InsufficientDataError:
        v, verr, used = float("nan"), 0.0, 0
    records.append(ResultRecord(
        experiment=config.experiment, n=0, L=-1, bond=-1, metric="v_s",
        mean=v, stderr=verr, samples=used, seed=config.seed,
        chi_max=config.chi_max, epsilon=config.epsilon, max_discarded=0.0,
    ))
    return records


def _run_expressibility(config: ExperimentConfig) -> list[ResultRecord]:
    records = []
    for n in config.n_values:
        common = dict(
            experiment=config.experiment, n=n, seed=config.seed,
            chi_max=config.chi_max, epsilon=config.epsilon,
            samples=config.samples,
        )
        for layers in config.depth_grid():
            fids, max_disc = sample_fidelities(config, n, layers)
            kl = expressibility(fids, 2**n, bins=config.bins)
            records.append(ResultRecord(
                L=layers, bond=-1, metric="expressibility", mean=kl,
                stderr=0.0, max_discarded=max_disc, **common,
            ))
    return records


def _run_cnot_check(config: ExperimentConfig) -> list[ResultRecord]:
    records = []
    for n in config.n_values:
        ok = verify_full_equals_reversed_linear(n)
        records.append(ResultRecord(
            experiment=config.experiment, n=n, L=-1, bond=-1,
            metric="cnot_identity", mean=1.0 if ok else 0.0, stderr=0.0,
            samples=0, seed=config.seed, chi_max=config.chi_max,
            epsilon=config.epsilon, max_discarded=0.0,
        ))
    return records


def _run_haar_table(config: ExperimentConfig) -> list[ResultRecord]:
    records = []
    for n in config.n_values:
        ref = haar_profile(n)
        common = dict(
            experiment=config.experiment, n=n, L=-1, seed=config.seed,
            chi_max=config.chi_max, epsilon=config.epsilon, stderr=0.0,
            samples=0, max_discarded=0.0,
        )
        for b in range(n - 1):
            records.append(ResultRecord(
                bond=b + 1, metric="haar_entropy",
                mean=float(ref.entropies[b]), **common,
            ))
        records.append(ResultRecord(
            bond=-1, metric="haar_total", mean=ref.total, **common,
        ))
        records.append(ResultRecord(
            bond=-1, metric="haar_max", mean=haar_max(n), **common,
        ))
        if n % 2 == 0:
            records.append(ResultRecord(
                bond=-1, metric="haar_average", mean=haar_average(n), **common,
            ))
    return records


_RUNNERS = {
    "bond-profile": _run_bond_profile,
    "reupload-compare": _run_reupload_compare,
    "scaling-ltilde": _run_scaling,
    "speed": _run_speed,
    "expressibility": _run_expressibility,
    "cnot-check": _run_cnot_check,
    "haar-table": _run_haar_table,
}


def run(config: ExperimentConfig) -> list[ResultRecord]:
    """Execute one experiment and return its records."""
    config.validate()
    return _RUNNERS[config.experiment](config)


def has_unconverged(records) -> bool:
    """True if any derived metric failed to reach its target."""
    return any(
        r.metric in ("l_tilde", "v_s") and np.isnan(r.mean) for r in records
    )


# ----------------------------------------------------------------------
# CSV wire format


def _fmt(x: float) -> str:
    return "%.12g" % x


def emit_csv(records, path: str) -> None:
    """Write records in the wire format: fixed header, 12 significant
    digits, '.' decimal separator, '\\n' newlines, UTF-8."""
    lines = [CSV_HEADER]
    for r in records:
        lines.append(",".join((
            r.experiment, str(r.n), str(r.L), str(r.bond), r.metric,
            _fmt(r.mean), _fmt(r.stderr), str(r.samples), str(r.seed),
            str(r.chi_max), _fmt(r.epsilon), _fmt(r.max_discarded),
        )))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def parse_csv(path: str) -> list[ResultRecord]:
    """Read a wire-format file back into records.

    The header must match CSV_HEADER exactly; every row must have 12
    fields of the right types.
    """
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0] != CSV_HEADER:
        raise CsvSchemaError(
            f"bad header: expected '{CSV_HEADER}', got '{lines[0] if lines else ''}'"
        )
    records = []
    for num, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 12:
            raise CsvSchemaError(f"line {num}: expected 12 fields, got {len(parts)}")
        try:
            records.append(ResultRecord(
                experiment=parts[0], n=int(parts[1]), L=int(parts[2]),
                bond=int(parts[3]), metric=parts[4], mean=float(parts[5]),
                stderr=float(parts[6]), samples=int(parts[7]),
                seed=int(parts[8]), chi_max=int(parts[9]),
                epsilon=float(parts[10]), max_discarded=float(parts[11]),
            ))
        except ValueError as exc:
            raise CsvSchemaError(f"line {num}: {exc}")
    return records
