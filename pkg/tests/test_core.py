import math

import pytest
from hypothesis import given, strategies as st

from edwindow import ConfigError, ContractError, Mode, StreamItem, validate_config, window_span
from edwindow.core import EPSILON_DIVISOR


def test_sketch_config():
    cfg = validate_config(1024, 0.7)
    assert cfg.mode is Mode.SKETCH
    assert cfg.epsilon_prime == pytest.approx(0.02)


def test_small_window_falls_back_to_exact():
    cfg = validate_config(8, 0.1)
    assert cfg.mode is Mode.EXACT_FALLBACK
    assert cfg.epsilon_prime == pytest.approx(0.1 / 35)


def test_boundary_eps_equal_one_over_w():
    assert validate_config(4, 0.25).mode is Mode.EXACT_FALLBACK
    assert validate_config(4, 0.2500001).mode is Mode.SKETCH
    assert validate_config(1, 1.0).mode is Mode.EXACT_FALLBACK


@pytest.mark.parametrize("w, eps, field", [
    (5, 1.5, "epsilon"),
    (5, 0.0, "epsilon"),
    (5, -0.1, "epsilon"),
    (5, float("nan"), "epsilon"),
    (0, 0.5, "w"),
    (-3, 0.5, "w"),
    (2.5, 0.5, "w"),
    (True, 0.5, "w"),
    (5, "abc", "epsilon"),
])
def test_config_errors(w, eps, field):
    with pytest.raises(ConfigError) as info:
        validate_config(w, eps)
    assert info.value.field == field


def test_whole_stream_config():
    cfg = validate_config(None, 0.5)
    assert cfg.whole_stream and cfg.mode is Mode.SKETCH


@pytest.mark.parametrize("w", [1, 2, 3, 7, 64, 512, 4096, 2**18])
@pytest.mark.parametrize("eps", [0.01, 0.1, 0.25, 0.5, 1.0])
def test_config_grid(w, eps):
    cfg = validate_config(w, eps)
    assert cfg.epsilon_prime * EPSILON_DIVISOR == pytest.approx(eps)
    assert (cfg.mode is Mode.EXACT_FALLBACK) == (eps <= 1 / w)


@given(st.floats(min_value=1e-6, max_value=1.0))
def test_internal_accuracy_budget(eps):
    # t_hat <= (1 + e') |R'| and |R'| <= 2 ed, so the reported value is at most
    # 2 (1 + e') / ((1/2 - 2e') (1 - e')) times ed; that factor must not exceed 4 + eps
    e = eps / EPSILON_DIVISOR
    upper = 2 * (1 + e) / ((0.5 - 2 * e) * (1 - e))
    assert upper <= 4 + eps
    assert 0.5 - 2 * e > 0


def test_window_span():
    assert window_span(10, 4) == window_span(10, 4)
    s = window_span(10, 4)
    assert (s.lo, s.hi, len(s)) == (7, 10, 4)
    assert window_span(2, 4).lo == 1
    assert window_span(5, None).lo == 1
    with pytest.raises(ContractError):
        window_span(-1, 3)


def test_stream_item_validation():
    StreamItem(1, 1)
    with pytest.raises(ContractError):
        StreamItem(0, 5)
    with pytest.raises(ContractError):
        StreamItem(3, 0)
