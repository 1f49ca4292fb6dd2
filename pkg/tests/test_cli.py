import csv
import io
import json
import time

import pytest

from affine_hls.cli import (
    CSV_COLUMNS,
    ENV_OUTPUT,
    ConfigError,
    RunConfig,
    _parser,
    config_from_args,
    main,
    plan,
    records_to_csv,
    report_summary,
    run,
)

SMALL = dict(chains=["affine_hls", "affine_frac_l2"], dimensions=[1], m=64, functions=["gauss1", "box1"],
             alphas={"affine_hls": [0.5], "affine_frac_l2": [-0.25]})


def args(*argv, environ=None):
    return config_from_args(_parser().parse_args(["run", *argv]), environ or {})


# configuration ----------------------------------------------------------


def test_defaults_validate():
    cfg = RunConfig().validate()
    assert cfg.m == 256 and cfg.alphas["affine_frac_l2"] == [-0.1, -0.25, -0.4]


@pytest.mark.parametrize(
    "data, path",
    [
        ({"alphas": {"affine_frac_l2": [-0.1, 1.5]}}, "alphas.affine_frac_l2[1]"),
        ({"alphas": {"affine_hls": [0.5, 1.0]}}, "alphas.affine_hls[1]"),
        ({"chains": ["specfun", "nope"]}, "chains[1]"),
        ({"m": 100}, "m:"),
        ({"dimensions": [3]}, "dimensions[0]"),
        ({"functions": ["gauss1", "nope"]}, "functions[1]"),
        ({"formats": ["xml"]}, "formats[0]"),
        ({"bogus": 1}, "bogus:"),
        ({"alphas": {"beckner": [1.0]}}, "alphas.beckner"),
    ],
)
def test_validation_names_field(data, path):
    with pytest.raises(ConfigError) as exc:
        RunConfig.from_mapping(data).validate()
    assert str(exc.value).startswith(path)


def test_hls_range_widens_in_two_dimensions():
    RunConfig.from_mapping({"dimensions": [2], "alphas": {"affine_hls": [1.5]}}).validate()


def test_flag_parsing_and_precedence(tmp_path):
    conf = tmp_path / "c.json"
    conf.write_text(json.dumps({"m": 64, "seed": 3, "output_dir": "from-file"}))
    cfg = args("--config", str(conf), "-m", "128", "--frac-alphas=-0.1,-0.25")
    assert cfg.m == 128 and cfg.seed == 3 and cfg.output_dir == "from-file"
    assert cfg.alphas["affine_frac_l2"] == [-0.1, -0.25]
    assert cfg.alphas["affine_hls"] == [0.25, 0.5, 0.75]


def test_env_sets_output_dir_and_flag_wins():
    assert args(environ={ENV_OUTPUT: "envdir"}).output_dir == "envdir"
    assert args("--output-dir", "flagdir", environ={ENV_OUTPUT: "envdir"}).output_dir == "flagdir"


def test_unreadable_config(tmp_path):
    with pytest.raises(ConfigError, match="^config:"):
        args("--config", str(tmp_path / "missing.json"))


def test_main_exit_code_on_config_error(tmp_path, capsys):
    assert main(["run", "--frac-alphas=-0.1,1.5", "--output-dir", str(tmp_path)]) == 2
    assert "alphas.affine_frac_l2[1]" in capsys.readouterr().err


# planning ---------------------------------------------------------------


def test_plan_parameters():
    jobs = plan(RunConfig.from_mapping(dict(SMALL, chains=["specfun", "affine_hls", "affine_log_sobolev"], m=128)))
    spec = [j for j in jobs if j.chain == "specfun"]
    assert [j.value for j in spec] == [1, 2, 3, 4, 5] and {j.param for j in spec} == {"n"}
    assert {j.value for j in jobs if j.chain == "affine_log_sobolev"} == {32, 64, 128}
    assert {(j.function, j.value) for j in jobs if j.chain == "affine_hls"} == {("gauss1", 0.5), ("box1", 0.5)}


def test_plan_random_functions():
    cfg = RunConfig.from_mapping(dict(SMALL, random_functions=2, seed=9))
    names = {j.function for j in plan(cfg)}
    assert {"random1d_9_0", "random1d_9_1"} <= names


# running ----------------------------------------------------------------


def test_specfun_run_is_fast(tmp_path):
    t0 = time.time()
    assert main(["run", "--chains", "specfun", "--output-dir", str(tmp_path)]) == 0
    assert time.time() - t0 < 1.0
    assert len(list((tmp_path / "json").glob("*.json"))) == 5


def test_run_outputs(tmp_path):
    cfg = RunConfig.from_mapping(dict(SMALL, output_dir=str(tmp_path)))
    assert run(cfg, log=lambda *_: None) == 0
    files = sorted(p.name for p in (tmp_path / "json").glob("*.json"))
    assert "affine_hls__gauss1__alpha=0.5.json" in files
    doc = json.loads((tmp_path / "json" / "affine_hls__gauss1__alpha=0.5.json").read_text())
    assert doc["corpus_version"] and "timestamp" in doc and doc["seed"] == 0
    rows = list(csv.reader(io.StringIO((tmp_path / "reports.csv").read_text())))
    assert tuple(rows[0]) == CSV_COLUMNS and len(rows) == 1 + len(files)


def test_csv_is_deterministic(tmp_path):
    outs = []
    for k in range(2):
        d = tmp_path / str(k)
        run(RunConfig.from_mapping(dict(SMALL, output_dir=str(d))), log=lambda *_: None)
        outs.append((d / "reports.csv").read_bytes())
    assert outs[0] == outs[1]


def test_formats_restrict_output(tmp_path):
    run(RunConfig.from_mapping(dict(SMALL, output_dir=str(tmp_path), formats=["csv"])), log=lambda *_: None)
    assert (tmp_path / "reports.csv").exists() and not (tmp_path / "json").exists()


def test_records_to_csv_header_only():
    assert records_to_csv([]).strip() == ",".join(CSV_COLUMNS)


# summary ----------------------------------------------------------------


def test_summary_empty_directory(tmp_path):
    lines = []
    assert report_summary(tmp_path, log=lines.append) == 0
    assert lines[0].startswith("no reports")


def test_summary_table_and_corrupt_file(tmp_path):
    run(RunConfig.from_mapping(dict(SMALL, output_dir=str(tmp_path))), log=lambda *_: None)
    (tmp_path / "json" / "broken.json").write_text("{not json")
    lines = []
    assert report_summary(tmp_path, log=lines.append) == 0
    text = "\n".join(lines)
    assert "worst margin" in text and "affine_hls" in text and "2/2" in text
    assert "errors:" in text and "broken.json" in text


def test_summary_uses_env(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv(ENV_OUTPUT, str(tmp_path))
    assert main(["summary"]) == 0
    assert "no reports" in capsys.readouterr().out


def test_corpus_list(capsys):
    assert main(["corpus", "list"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0].startswith("corpus version") and any(line.startswith("gauss1") for line in out)
