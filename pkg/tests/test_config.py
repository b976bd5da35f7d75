import pytest
from hypothesis import given
from hypothesis import strategies as st

from psdecay.config import ScenarioConfig, parse_config, serialize
from psdecay.errors import ConfigError

BASIC = """\
# comment line
[grid]
L = 40
M = 512   ; trailing comment
N = 16

[datum]
kind = gaussian
eta0 = 1
derivative = yes

[solver]
dt = 0.001
T = 1

[scenario]
name = conservation
nu = 1, 0.5
thetas = 0.5, 1
"""


class TestParse:
    def test_values_and_types(self):
        cfg = parse_config(BASIC)
        assert cfg.name == "conservation"
        assert cfg.get("grid", "L") == 40.0 and cfg.get("grid", "M") == 512
        assert cfg.get("datum", "derivative") is True
        assert cfg.get("scenario", "nu") == (1.0, 0.5)

    def test_defaults(self):
        cfg = parse_config(BASIC)
        assert cfg.get("solver", "wraparound_budget") == 1e-6
        assert cfg.get("scenario", "dispersion") == "full"
        assert not cfg.has("solver", "wraparound_budget")

    def test_unknown_key_reports_line(self):
        text = BASIC.replace("thetas = 0.5, 1", "thetaa = 0.5, 1")
        with pytest.raises(ConfigError) as info:
            parse_config(text)
        lineno = text.splitlines().index("thetaa = 0.5, 1") + 1
        assert info.value.line == lineno and info.value.field == "thetaa"
        assert f"line {lineno}:" in str(info.value)

    def test_negative_theta_names_field(self):
        with pytest.raises(ConfigError, match="scenario.thetas: theta must be >= 0") as info:
            parse_config(BASIC.replace("thetas = 0.5, 1", "thetas = 0.5, -1"))
        assert info.value.field == "thetas"

    @pytest.mark.parametrize("old, new, fieldname", [
        ("M = 512", "M = 511", "M"),
        ("dt = 0.001", "dt = 2", "dt"),
        ("kind = gaussian", "kind = sech", "kind"),
        ("L = 40", "L = nan", "L"),
        ("name = conservation", "name = uc-identity", "t1"),
        ("eta0 = 1", "eta0 = 9", "eta0"),
    ])
    def test_rejects(self, old, new, fieldname):
        with pytest.raises(ConfigError) as info:
            parse_config(BASIC.replace(old, new))
        assert info.value.field == fieldname

    @pytest.mark.parametrize("text", [
        "L = 1\n",
        "[grid\nL = 1\n",
        "[mesh]\n",
        "[grid]\nL 1\n",
        "[grid]\n[grid]\n",
    ])
    def test_malformed(self, text):
        with pytest.raises(ConfigError):
            parse_config(text)


class TestSerialize:
    def test_round_trip(self):
        cfg = parse_config(BASIC)
        text = serialize(cfg)
        assert parse_config(text) == cfg
        assert serialize(parse_config(text)) == text

    def test_canonical_form(self):
        text = serialize(parse_config(BASIC))
        assert "derivative = true" in text and "nu = 1.0, 0.5" in text
        assert text.startswith("[grid]\nL = 40.0\n")

    @given(st.lists(st.floats(0.0, 10.0, allow_subnormal=False), min_size=1, max_size=5),
           st.floats(1e-6, 0.5))
    def test_float_round_trip(self, thetas, dt):
        cfg = parse_config(BASIC).with_value("scenario", "thetas", tuple(thetas))
        cfg = cfg.with_value("solver", "dt", dt)
        assert parse_config(serialize(cfg)) == cfg

    def test_with_value_leaves_original(self):
        cfg = parse_config(BASIC)
        other = cfg.with_value("grid", "M", 256)
        assert cfg.get("grid", "M") == 512 and other.get("grid", "M") == 256
        assert isinstance(other, ScenarioConfig) and other != cfg
