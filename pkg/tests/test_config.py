#!/usr/bin/env python3
"""Test experiment config parsing, serialization and validation.

Run: python3 tests/test_config.py
"""

import os
import sys
import tempfile

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import pytest

from config import (
    ConfigError,
    ExperimentConfig,
    ModelConfig,
    load_config,
    parse_config,
    parse_nu,
    serialize_config,
    validate_config,
)

SAMPLE = """\
# bond percolation sweep
lambda = 2.5
n_list = 4, 8, 16
seeds = 3
trials = 100   # per graph
time_cap = none
out = "runs/bond"

[model]
model = bond
d = 3
p = 0.6
"""


def test_parse_sample():
    print("=" * 60)
    print("TEST: Parse a config file")
    print("=" * 60)

    cfg = parse_config(SAMPLE)
    assert cfg.lam == 2.5
    assert cfg.n_list == [4, 8, 16]
    assert cfg.trials == 100
    assert cfg.time_cap is None
    assert cfg.out == "runs/bond"
    assert cfg.model == ModelConfig(model="bond", d=3, p=0.6)
    assert cfg.model.params_string() == "d=3;p=0.6"
    print("  ✓ values, comments, quotes and the [model] block")


def test_round_trip():
    print("=" * 60)
    print("TEST: serialize then parse")
    print("=" * 60)

    configs = [
        ExperimentConfig(out="x"),
        ExperimentConfig(model=ModelConfig(model="gw", nu={0: 0.1, 3: 0.9}, conditioning="none"), out="y"),
        ExperimentConfig(model=ModelConfig(model="ri-vacant", u=0.25, kill_radius=80), n_list=[5, 20], out="z"),
    ]
    for cfg in configs:
        assert parse_config(serialize_config(cfg)) == cfg
    print("  ✓ canonical text parses back to the same config")

    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "config.txt")
        with open(path, "w") as f:
            f.write(serialize_config(configs[1]))
        assert load_config(path) == configs[1]
    print("  ✓ load_config reads the file")

    assert parse_nu("0:0.25, 2:0.75") == {0: 0.25, 2: 0.75}


def test_hash_inside_values():
    print("=" * 60)
    print("TEST: # inside quoted values")
    print("=" * 60)

    for out in ("runs/#1", "a # b", "it's#2", 'say "hi" #3'):
        cfg = ExperimentConfig(out=out)
        assert parse_config(serialize_config(cfg)).out == out
    print("  ✓ quoted values keep # through a round trip")

    cfg = parse_config('out = "runs/#7"   # trailing comment\nseeds = 2 # two\n')
    assert cfg.out == "runs/#7" and cfg.seeds == 2
    cfg = parse_config("out = runs/plain # comment\n")
    assert cfg.out == "runs/plain"
    print("  ✓ comments after a closing quote and on unquoted values are dropped")


def test_errors_carry_line_and_field():
    print("=" * 60)
    print("TEST: Config errors")
    print("=" * 60)

    with pytest.raises(ConfigError) as exc:
        parse_config("lambda = 1\nbogus = 3\n")
    assert exc.value.line == 2 and exc.value.field == "bogus"
    print(f"  ✓ unknown key: {exc.value}")

    with pytest.raises(ConfigError) as exc:
        parse_config("seeds = 2\nseeds = 3\n")
    assert exc.value.line == 2 and exc.value.field == "seeds"
    print("  ✓ duplicate key")

    with pytest.raises(ConfigError) as exc:
        parse_config("trials = many\n")
    assert exc.value.line == 1 and exc.value.field == "trials"
    print("  ✓ bad value")

    with pytest.raises(ConfigError) as exc:
        parse_config("n_list = 8, 4\n")
    assert exc.value.line == 1 and exc.value.field == "n_list"
    print("  ✓ validation failure points at the offending line")

    with pytest.raises(ConfigError) as exc:
        parse_config("[model]\nmodel = bond\np = 1.5\n")
    assert exc.value.line == 3 and exc.value.field == "p"

    with pytest.raises(ConfigError):
        parse_config("[model]\n[model]\n")
    with pytest.raises(ConfigError):
        load_config("/nonexistent/config.txt")
    print("  ✓ model keys, repeated block and missing file")


def test_validation():
    print("=" * 60)
    print("TEST: Cross-field validation")
    print("=" * 60)

    bad = [
        (ExperimentConfig(lam=-1.0), "lambda"),
        (ExperimentConfig(epsilon=1.0), "epsilon"),
        (ExperimentConfig(model=ModelConfig(model="rgg", R=0.0)), "R"),
        (ExperimentConfig(model=ModelConfig(model="gw", nu={0: 0.5, 1: 0.4})), "nu"),
        (ExperimentConfig(model=ModelConfig(model="gff", pad_factor=1)), "pad_factor"),
        (ExperimentConfig(model=ModelConfig(model="ri-occupied", kill_radius=10), n_list=[4]), "kill_radius"),
        (ExperimentConfig(model=ModelConfig(model="torus")), "model"),
    ]
    for cfg, field in bad:
        with pytest.raises(ConfigError) as exc:
            validate_config(cfg)
        assert exc.value.field == field, f"{field}: {exc.value}"
    print(f"  ✓ {len(bad)} invalid configs name their field")

    validate_config(ExperimentConfig(model=ModelConfig(model="ri-occupied", kill_radius=16), n_list=[4]))
    print("  ✓ kill radius exactly 4n accepted")


def main():
    tests = [test_parse_sample, test_round_trip, test_hash_inside_values, test_errors_carry_line_and_field, test_validation]
    failed = 0
    for t in tests:
        try:
            t()
        except AssertionError as e:
            failed += 1
            print(f"  ❌ {t.__name__} failed: {e}")
        print()
    print("=" * 60)
    print(f"{len(tests) - failed}/{len(tests)} passed")
    print("=" * 60)
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
