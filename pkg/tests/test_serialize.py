"""JSON/CSV round trips and the deterministic float formatting."""

from __future__ import annotations

import json
import math

import numpy as np
import pytest

from ldpcontract.probability import Channel, ProbVector
from ldpcontract.serialize import (
    channel_from_csv,
    channel_from_json,
    channel_to_csv,
    channel_to_json,
    distribution_from_csv,
    distribution_from_json,
    distribution_to_csv,
    distribution_to_json,
    emit_json,
)


def test_emit_json_float_precision():
    text = emit_json({"x": 1.0 / 3.0})
    assert json.loads(text)["x"] == 1.0 / 3.0  # lossless 64-bit round trip


def test_emit_json_infinity_and_nan():
    assert "Infinity" in emit_json({"x": math.inf})
    with pytest.raises(ValueError):
        emit_json({"x": math.nan})


def test_emit_json_deterministic():
    payload = {"b": [1, 2.5], "a": {"c": 0.1}}
    assert emit_json(payload) == emit_json(payload)


def test_distribution_json_round_trip():
    p = ProbVector(np.array([0.1, 0.2, 0.7]))
    text = distribution_to_json(p)
    back = distribution_from_json(text)
    assert distribution_to_json(back) == text
    np.testing.assert_array_equal(back.mass, p.mass)


def test_channel_json_round_trip():
    k = Channel(np.array([[0.75, 0.25], [1.0 / 3.0, 2.0 / 3.0]]))
    text = channel_to_json(k)
    back = channel_from_json(text)
    assert channel_to_json(back) == text
    np.testing.assert_array_equal(back.rows, k.rows)


def test_distribution_csv_round_trip():
    p = ProbVector(np.array([0.25, 0.75]))
    text = distribution_to_csv(p)
    back = distribution_from_csv(text)
    assert distribution_to_csv(back) == text
    np.testing.assert_array_equal(back.mass, p.mass)


def test_channel_csv_round_trip():
    k = Channel(np.array([[0.75, 0.25], [0.25, 0.75]]))
    text = channel_to_csv(k)
    back = channel_from_csv(text)
    assert channel_to_csv(back) == text
    np.testing.assert_array_equal(back.rows, k.rows)


def test_parsers_reject_bad_input():
    with pytest.raises(Exception):
        distribution_from_json("[0.5, NaN]")
    with pytest.raises(Exception):
        distribution_from_json("[0.5, -0.5]")
    with pytest.raises(Exception):
        channel_from_json("[[0.5, 0.5], [0.5]]")  # ragged
    with pytest.raises(Exception):
        distribution_from_csv("0.5,nan\n")
