"""Tests for sesop_mg.validator."""

from __future__ import annotations

import numpy as np
import pytest

from sesop_mg.validator import check_gradient


def quadratic(x):
    return float(0.5 * np.sum(x * x) + np.sum(x))


def quadratic_grad(x):
    return x + 1.0


def test_correct_gradient_passes():
    result = check_gradient(quadratic, quadratic_grad, np.arange(6.0).reshape(2, 3))
    assert result.passed
    assert len(result.errors) == 10
    assert result.as_dict()["passed"] is True


def test_wrong_gradient_fails_and_warns(caplog):
    with caplog.at_level("WARNING"):
        result = check_gradient(quadratic, lambda x: 2.0 * x + 1.0, np.ones(4))
    assert not result.passed
    assert result.max_relative_error > 0.1
    assert "gradient check failed" in caplog.text


def test_zero_point_uses_absolute_step():
    assert check_gradient(quadratic, quadratic_grad, np.zeros(3), directions=3).passed


def test_rejects_no_directions():
    with pytest.raises(ValueError, match="directions"):
        check_gradient(quadratic, quadratic_grad, np.ones(2), directions=0)
