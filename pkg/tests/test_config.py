from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from pcfvar.config import Config, ConfigError

literals = st.sampled_from(["sqrt(3)+sqrt(2)", "2+sqrt(3)", "1+w", "-3+2*w"])


@given(
    ring=st.sampled_from(["Z", "Z[i]", "O(-3)", "Z[sqrt(2)]", "Z[1/2]"]),
    gens=st.lists(literals, max_size=3),
    node=st.one_of(st.none(), st.integers(1, 10**12)),
    time_limit=st.one_of(st.none(), st.floats(0.5, 1e4, allow_nan=False)),
    jobs=st.integers(1, 64),
    output=st.one_of(st.none(), st.just("out.jsonl")),
)
def test_round_trip(ring, gens, node, time_limit, jobs, output):
    cfg = Config(ring, gens, node, time_limit, output, jobs)
    assert Config.loads(cfg.dumps()) == cfg


def test_bare_strings_comments_and_errors():
    cfg = Config.loads("# budgets\nring = Z[sqrt(2)]\njobs = 4\n")
    assert cfg.ring == "Z[sqrt(2)]" and cfg.jobs == 4
    with pytest.raises(ConfigError):
        Config.loads("colour = blue\n")
    with pytest.raises(ConfigError):
        Config.loads("jobs = 0\n")
    with pytest.raises(ConfigError):
        Config.loads('unit_generators = "sqrt(3)"\n')


def test_env_overrides():
    cfg = Config().with_env({"PCFVAR_NODE_LIMIT": "1000", "PCFVAR_TIME_LIMIT": "2.5"})
    assert cfg.node_limit == 1000 and cfg.time_limit == 2.5
    with pytest.raises(ConfigError):
        Config().with_env({"PCFVAR_NODE_LIMIT": "lots"})
