import textwrap

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bn4d.config import DEFAULTS, ConfigError, ExperimentConfig, load_config, parse_config
from bn4d.domain import BallDomain, CustomDomain, GaussianBumps, QuadraticPotential

EXAMPLE = textwrap.dedent("""
    seed = 7

    [domain]
    radius = 2.0
    center = [0.1, 0.0, 0.0, 0.0]

    [potential]
    form = "gaussian_bumps"
    offset = 0.5
    bumps = [{amplitude = 1.0, center = [0.3, 0.0, 0.0, 0.0], width = 0.2}]

    [eps]
    value = 0.1
    grid = [0.4, 0.2]

    [quadrature]
    scheme = "qmc"
    n_points = 1024
""")


def test_defaults_build():
    cfg = ExperimentConfig.from_dict({})
    assert cfg.to_dict() == {**DEFAULTS, **cfg.to_dict()}
    assert isinstance(cfg.build_domain(), BallDomain)
    assert cfg.quadrature_spec().seed == 0


def test_parse_example():
    cfg = parse_config(EXAMPLE)
    assert cfg.seed == 7
    dom = cfg.build_domain()
    assert dom.radius == 2.0 and dom.center == (0.1, 0.0, 0.0, 0.0)
    V = cfg.build_potential()
    assert isinstance(V, GaussianBumps)
    assert V.value(np.array([0.3, 0, 0, 0])) == pytest.approx(1.5)
    q = cfg.quadrature_spec()
    assert q.scheme == "qmc" and q.n_points == 1024 and q.seed == 7


def test_round_trip_lossless():
    cfg = parse_config(EXAMPLE)
    again = ExperimentConfig.from_dict(cfg.to_dict())
    assert again.to_dict() == cfg.to_dict()
    assert again.sha256() == cfg.sha256()


def test_hash_tracks_seed():
    cfg = ExperimentConfig.from_dict({})
    assert cfg.with_seed(3).sha256() != cfg.sha256()
    assert cfg.with_seed(0).sha256() == cfg.sha256()


@given(st.floats(0.1, 10.0), st.integers(0, 2**31), st.lists(st.floats(0.01, 1.0), min_size=1, max_size=5))
def test_round_trip_property(R, seed, eps):
    grid = sorted(set(eps), reverse=True)
    d = {"seed": seed, "domain": {"radius": R}, "eps": {"grid": grid},
         "potential": {"form": "quadratic", "c0": 2.0, "A": np.eye(4).tolist()}}
    cfg = ExperimentConfig.from_dict(d)
    assert ExperimentConfig.from_dict(cfg.to_dict()).to_dict() == cfg.to_dict()
    assert isinstance(cfg.build_potential(), QuadraticPotential)


@pytest.mark.parametrize("d, location", [
    ({"domian": {}}, "domian"),
    ({"domain": {"radius": "x"}}, "domain.radius"),
    ({"domain": {"radius": -1.0}}, "domain.radius"),
    ({"domain": {"kind": "torus"}}, "domain.kind"),
    ({"domain": {"kind": "custom"}}, "domain.provider"),
    ({"bubble": {"xi": [0, 0]}}, "bubble.xi"),
    ({"eps": {"grid": [0.1, 0.2]}}, "eps.grid"),
    ({"potential": {"form": "cubic"}}, "potential.form"),
    ({"potential": {"form": "constant", "c0": 1}}, "potential.c0"),
    ({"potential": {"form": "gaussian_bumps", "bumps": [{"amplitude": 1}]}}, "potential.bumps[0]"),
    ({"quadrature": {"n_radial": 2.5}}, "quadrature.n_radial"),
    ({"quadrature": {"scheme": "nope"}}, "quadrature"),
    ({"verify": {"j": 9}}, "verify.j"),
    ({"shoot": {"bracket": [5.0, 1.0]}}, "shoot.bracket"),
    ({"seed": True}, "seed"),
])
def test_errors_carry_location(d, location):
    with pytest.raises(ConfigError) as info:
        ExperimentConfig.from_dict(d)
    assert info.value.location == location


def test_toml_syntax_error_location():
    with pytest.raises(ConfigError) as info:
        parse_config("[domain\nradius = 1\n")
    assert info.value.location.startswith("line 1")


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.toml")


def test_custom_provider(tmp_path, monkeypatch):
    (tmp_path / "mydomain.py").write_text(textwrap.dedent("""
        from bn4d.domain import BallDomain, CustomDomain

        def make():
            b = BallDomain(1.0)
            return CustomDomain(b.regular_part, b.boundary_distance, ray_exit_fn=b.ray_exit)

        def wrong():
            return 3
    """))
    monkeypatch.syspath_prepend(str(tmp_path))
    cfg = ExperimentConfig.from_dict({"domain": {"kind": "custom", "provider": "mydomain:make"}})
    assert isinstance(cfg.build_domain(), CustomDomain)
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"domain": {"kind": "custom", "provider": "mydomain:wrong"}})
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"domain": {"kind": "custom", "provider": "nomodule_xyz:make"}})
