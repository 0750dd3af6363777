"""Config parsing, sampling plumbing, experiment runners and the CSV
wire format."""

import math

import numpy as np
import pytest

from qnn_entropy.errors import ConfigError, CsvSchemaError
from qnn_entropy.experiments import (
    AUTO_DENSE_MAX,
    CSV_HEADER,
    ExperimentConfig,
    ResultRecord,
    _mean_se,
    _worker_count,
    emit_csv,
    has_unconverged,
    load_config,
    parse_config_text,
    parse_csv,
    run,
    sample_bond_entropies,
    sample_fidelities,
)
from qnn_entropy.haar import haar_average, haar_max, haar_profile

LOG2 = math.log(2.0)


# ----------------------------------------------------------------------
# config objects


def test_defaults():
    cfg = ExperimentConfig(experiment="bond-profile")
    cfg.validate()
    assert cfg.n_values == (8,)
    assert cfg.l_max == 16
    assert cfg.l_values is None
    assert cfg.samples == 100
    assert cfg.feature == "CZZ"
    assert cfg.variational == "C2"
    assert cfg.backend == "auto"


@pytest.mark.parametrize("field,kwargs", [
    ("experiment", dict(experiment="speedy")),
    ("n_values", dict(experiment="speed", n_values=())),
    ("n_values", dict(experiment="speed", n_values=(8, 1))),
    ("l_values", dict(experiment="speed", l_values=())),
    ("l_values", dict(experiment="speed", l_values=(2, 2))),
    ("l_values", dict(experiment="speed", l_values=(4, 2))),
    ("l_max", dict(experiment="speed", l_max=0)),
    ("samples", dict(experiment="speed", samples=0)),
    ("seed", dict(experiment="speed", seed=-1)),
    ("feature", dict(experiment="speed", feature="C4")),
    ("variational", dict(experiment="speed", variational="czz ")),
    ("topology", dict(experiment="speed", topology="ring")),
    ("mode", dict(experiment="speed", mode="both")),
    ("epsilon", dict(experiment="speed", epsilon=1.0)),
    ("epsilon", dict(experiment="speed", epsilon=-1e-9)),
    ("chi_max", dict(experiment="speed", chi_max=0)),
    ("bins", dict(experiment="speed", bins=0)),
    ("backend", dict(experiment="speed", backend="sparse")),
    ("backend", dict(experiment="speed", backend="dense", n_values=(16,))),
])
def test_validate_flags_the_right_field(field, kwargs):
    with pytest.raises(ConfigError) as info:
        ExperimentConfig(**kwargs).validate()
    assert info.value.field == field
    assert f"'{field}'" in str(info.value)


def test_depth_grid():
    cfg = ExperimentConfig(experiment="speed", l_max=4)
    assert cfg.depth_grid() == (1, 2, 3, 4)
    cfg = ExperimentConfig(experiment="speed", l_max=4, l_values=(1, 5, 9))
    assert cfg.depth_grid() == (1, 5, 9)


def test_qnn_spec_carries_config_fields():
    cfg = ExperimentConfig(
        experiment="speed", feature="C1", variational="C3",
        topology="circular", mode="sequential", epsilon=1e-7, chi_max=32,
    )
    spec = cfg.qnn_spec(6, 3)
    assert (spec.n, spec.layers) == (6, 3)
    assert (spec.feature, spec.variational) == ("C1", "C3")
    assert spec.topology.name == "CIRCULAR"
    assert spec.mode == "sequential"
    assert spec.epsilon == 1e-7
    assert spec.chi_max == 32
    # the runner that contrasts layerings overrides the mode per call
    assert cfg.qnn_spec(6, 3, mode="alternated").mode == "alternated"


# ----------------------------------------------------------------------
# config files


def test_parse_config_text():
    text = """
    # comment-only line
    experiment = bond-profile
    n-values = 8, 12 16   # hyphens and mixed separators both work
    l_max = 4
    epsilon = 1e-10
    feature = C1
    """
    values = parse_config_text(text)
    assert values["experiment"] == "bond-profile"
    assert values["n_values"] == (8, 12, 16)
    assert values["l_max"] == 4
    assert values["epsilon"] == 1e-10
    assert values["feature"] == "C1"


def test_parse_config_unknown_key_names_the_line():
    with pytest.raises(ConfigError) as info:
        parse_config_text("experiment = speed\nsample = 10\n")
    assert info.value.field == "sample"
    assert "line 2" in str(info.value)


def test_parse_config_missing_equals():
    with pytest.raises(ConfigError) as info:
        parse_config_text("experiment speed")
    assert "line 1" in str(info.value)


def test_parse_config_bad_coercion():
    with pytest.raises(ConfigError) as info:
        parse_config_text("samples = ten")
    assert info.value.field == "samples"
    with pytest.raises(ConfigError):
        parse_config_text("n_values = 8;12")


def test_load_config_with_overrides(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text(
        "experiment = haar-table\nn_values = 4\nseed = 7\n",
        encoding="utf-8",
    )
    cfg = load_config(str(path))
    assert cfg.experiment == "haar-table"
    assert cfg.n_values == (4,)
    cfg = load_config(str(path), {"n_values": (6,), "samples": 3})
    assert cfg.n_values == (6,)
    assert cfg.samples == 3
    assert cfg.seed == 7


def test_load_config_requires_experiment(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("n_values = 4\n", encoding="utf-8")
    with pytest.raises(ConfigError) as info:
        load_config(str(path))
    assert info.value.field == "experiment"


def test_load_config_missing_file():
    with pytest.raises(ConfigError) as info:
        load_config("/no/such/file.cfg")
    assert info.value.field == "config"


# ----------------------------------------------------------------------
# sampling plumbing


def test_mean_se():
    data = np.array([1.0, 2.0, 4.0, 5.0])
    mean, se = _mean_se(data)
    assert mean == pytest.approx(3.0)
    assert se == pytest.approx(np.std(data, ddof=1) / 2.0)
    mean, se = _mean_se(np.array([2.5]))
    assert (mean, se) == (2.5, 0.0)


def test_worker_count_env(monkeypatch):
    monkeypatch.setenv("QNN_THREADS", "3")
    assert _worker_count() == 3
    monkeypatch.setenv("QNN_THREADS", "0")
    assert _worker_count() == 1
    monkeypatch.setenv("QNN_THREADS", "two")
    with pytest.raises(ConfigError):
        _worker_count()
    monkeypatch.delenv("QNN_THREADS")
    assert _worker_count() >= 1


def _entropy_config(backend):
    return ExperimentConfig(
        experiment="bond-profile", n_values=(6,), samples=8, seed=42,
        backend=backend, epsilon=0.0,
    )


def test_backends_sample_the_same_streams():
    # Per-sample seeding makes the two engines see identical parameter
    # draws, so their entropies agree to numerical precision.
    bonds = range(5)
    dense, disc_d = sample_bond_entropies(_entropy_config("dense"), 6, 2, bonds)
    mps, disc_m = sample_bond_entropies(_entropy_config("mps"), 6, 2, bonds)
    assert dense.shape == (8, 5)
    assert disc_d == 0.0
    assert disc_m >= 0.0
    np.testing.assert_allclose(dense, mps, atol=1e-9)


def test_auto_backend_matches_dense_below_cutoff():
    assert AUTO_DENSE_MAX >= 6
    auto, _ = sample_bond_entropies(_entropy_config("auto"), 6, 2, [2])
    dense, _ = sample_bond_entropies(_entropy_config("dense"), 6, 2, [2])
    np.testing.assert_array_equal(auto, dense)


def test_worker_count_does_not_change_results(monkeypatch):
    cfg = _entropy_config("mps")
    monkeypatch.setenv("QNN_THREADS", "1")
    one, _ = sample_bond_entropies(cfg, 6, 2, [1, 3])
    monkeypatch.setenv("QNN_THREADS", "2")
    two, _ = sample_bond_entropies(cfg, 6, 2, [1, 3])
    np.testing.assert_array_equal(one, two)


def test_bond_subset_matches_full_sweep():
    cfg = _entropy_config("dense")
    full, _ = sample_bond_entropies(cfg, 6, 2, range(5))
    sub, _ = sample_bond_entropies(cfg, 6, 2, [0, 3])
    np.testing.assert_array_equal(sub, full[:, [0, 3]])


def test_sample_fidelities_shape_and_range():
    cfg = ExperimentConfig(
        experiment="expressibility", n_values=(4,), samples=6, seed=5,
    )
    fids, max_disc = sample_fidelities(cfg, 4, 1)
    assert fids.shape == (6,)
    assert max_disc == 0.0
    assert np.all(fids >= 0.0)
    assert np.all(fids <= 1.0 + 1e-12)


def test_sample_fidelities_deterministic():
    cfg = ExperimentConfig(
        experiment="expressibility", n_values=(4,), samples=6, seed=5,
    )
    np.testing.assert_array_equal(
        sample_fidelities(cfg, 4, 2)[0], sample_fidelities(cfg, 4, 2)[0]
    )


# ----------------------------------------------------------------------
# runners


def test_bond_profile_records():
    cfg = ExperimentConfig(
        experiment="bond-profile", n_values=(4,), l_max=2, samples=5,
        backend="dense",
    )
    records = run(cfg)
    # 3 bonds: two reference rows each, then one row per (depth, bond)
    assert len(records) == 3 * 2 + 2 * 3
    ref = haar_profile(4)
    haar_rows = [r for r in records if r.metric == "haar_entropy"]
    assert [r.bond for r in haar_rows] == [1, 2, 3]
    for row in haar_rows:
        assert row.L == -1
        assert row.samples == 0
        assert row.mean == pytest.approx(ref.entropies[row.bond - 1])
    bound_rows = [r for r in records if r.metric == "entropy_bound"]
    for row in bound_rows:
        assert row.mean == pytest.approx(
            min(row.bond, 4 - row.bond) * LOG2
        )
    ent_rows = [r for r in records if r.metric == "bond_entropy"]
    assert {(r.L, r.bond) for r in ent_rows} == {
        (l, b) for l in (1, 2) for b in (1, 2, 3)
    }
    for row in ent_rows:
        assert row.samples == 5
        assert 0.0 <= row.mean <= min(row.bond, 4 - row.bond) * LOG2 + 1e-12
        assert row.stderr >= 0.0


def test_haar_table_records():
    records = run(ExperimentConfig(experiment="haar-table", n_values=(4, 5)))
    by_n = {4: [], 5: []}
    for r in records:
        by_n[r.n].append(r)
    ref = haar_profile(4)
    metrics4 = [r.metric for r in by_n[4]]
    assert metrics4 == ["haar_entropy"] * 3 + [
        "haar_total", "haar_max", "haar_average",
    ]
    assert by_n[4][3].mean == pytest.approx(ref.total)
    assert by_n[4][4].mean == pytest.approx(haar_max(4))
    assert by_n[4][5].mean == pytest.approx(haar_average(4))
    # no average row for odd n: the half cut is not defined there
    assert "haar_average" not in [r.metric for r in by_n[5]]


def test_cnot_check_records():
    records = run(ExperimentConfig(experiment="cnot-check", n_values=(2, 5)))
    assert [r.metric for r in records] == ["cnot_identity"] * 2
    assert [r.mean for r in records] == [1.0, 1.0]


def test_reupload_layerings_coincide_at_depth_one():
    cfg = ExperimentConfig(
        experiment="reupload-compare", n_values=(4,), l_values=(1, 2),
        samples=6, backend="dense",
    )
    records = run(cfg)
    at_depth = {}
    for r in records:
        at_depth.setdefault(r.L, {})[r.metric] = r
    # a single layer is the same circuit under both layerings
    assert at_depth[1]["s_alt"].mean == pytest.approx(
        at_depth[1]["s_seq"].mean
    )
    assert at_depth[1]["delta_s_bar"].mean == pytest.approx(0.0, abs=1e-12)
    assert at_depth[1]["delta_s_bar"].stderr == pytest.approx(0.0, abs=1e-12)
    assert at_depth[1]["delta_s_bar"].bond == -1
    assert at_depth[1]["s_alt"].bond == (4 - 1) // 2 + 1
    assert at_depth[2]["delta_s_bar"].stderr >= 0.0


def test_scaling_unconverged_is_flagged():
    cfg = ExperimentConfig(
        experiment="scaling-ltilde", n_values=(6,), l_max=1, samples=4,
        backend="dense",
    )
    records = run(cfg)
    ltilde = [r for r in records if r.metric == "l_tilde"]
    assert len(ltilde) == 1
    assert math.isnan(ltilde[0].mean)
    assert has_unconverged(records)


def test_has_unconverged_ignores_other_metrics():
    rec = ResultRecord(
        experiment="bond-profile", n=4, L=1, bond=1, metric="bond_entropy",
        mean=float("nan"), stderr=0.0, samples=1, seed=0, chi_max=8,
        epsilon=0.0, max_discarded=0.0,
    )
    assert not has_unconverged([rec])


def test_run_validates_first():
    with pytest.raises(ConfigError):
        run(ExperimentConfig(experiment="nope"))


# ----------------------------------------------------------------------
# CSV wire format


def _sample_records():
    return [
        ResultRecord(
            experiment="haar-table", n=4, L=-1, bond=1,
            metric="haar_entropy", mean=0.8578317205, stderr=0.0,
            samples=0, seed=1234, chi_max=64, epsilon=1e-9,
            max_discarded=0.0,
        ),
        ResultRecord(
            experiment="speed", n=8, L=3, bond=-1, metric="v_s",
            mean=float("nan"), stderr=0.125, samples=100, seed=7,
            chi_max=1024, epsilon=0.0, max_discarded=3.5e-17,
        ),
    ]


def test_csv_round_trip(tmp_path):
    path = tmp_path / "out.csv"
    records = _sample_records()
    emit_csv(records, str(path))
    text = path.read_text(encoding="utf-8")
    assert text.startswith(CSV_HEADER + "\n")
    assert text.endswith("\n")
    back = parse_csv(str(path))
    assert len(back) == 2
    assert back[0] == records[0]
    assert math.isnan(back[1].mean)
    assert back[1].max_discarded == pytest.approx(3.5e-17)
    # emit(parse(emit(x))) is byte-stable
    path2 = tmp_path / "again.csv"
    emit_csv(back, str(path2))
    assert path2.read_text(encoding="utf-8") == text


def test_csv_formatting(tmp_path):
    path = tmp_path / "out.csv"
    emit_csv(_sample_records(), str(path))
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[1].split(",")[5] == "0.8578317205"
    assert lines[2].split(",")[5] == "nan"
    assert lines[2].split(",")[11] == "3.5e-17"


def test_parse_csv_rejects_wrong_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("experiment,n,L\nspeed,8,1\n", encoding="utf-8")
    with pytest.raises(CsvSchemaError, match="header"):
        parse_csv(str(path))
    path.write_text("", encoding="utf-8")
    with pytest.raises(CsvSchemaError):
        parse_csv(str(path))


def test_parse_csv_rejects_short_rows(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text(CSV_HEADER + "\nspeed,8,1\n", encoding="utf-8")
    with pytest.raises(CsvSchemaError, match="line 2"):
        parse_csv(str(path))


def test_parse_csv_rejects_bad_types(tmp_path):
    path = tmp_path / "bad.csv"
    row = "speed,eight,1,-1,v_s,1.0,0.1,100,7,64,0,0"
    path.write_text(CSV_HEADER + "\n" + row + "\n", encoding="utf-8")
    with pytest.raises(CsvSchemaError, match="line 2"):
        parse_csv(str(path))


def test_parse_csv_skips_blank_lines(tmp_path):
    path = tmp_path / "ok.csv"
    emit_csv(_sample_records(), str(path))
    text = path.read_text(encoding="utf-8")
    path.write_text(text + "\n\n", encoding="utf-8")
    assert len(parse_csv(str(path))) == 2
