import xml.etree.ElementTree as ET

import numpy as np
import pytest

from lotstab.errors import DegenerateData
from lotstab.plotting import plot_loglog
from lotstab.verify import fit_holder_exponent


def test_svg_valid_and_labelled(tmp_path):
    x = np.geomspace(0.01, 0.2, 10)
    y = x ** 2
    p = plot_loglog(x, y, fit_holder_exponent(x, y), tmp_path / "a.svg", xlabel="eps", ylabel="bracket")
    text = open(p).read()
    root = ET.fromstring(text)
    assert root.tag.endswith("svg")
    assert "slope = 2.000" in text and "eps" in text


def test_svg_deterministic(tmp_path):
    x = np.geomspace(0.01, 0.2, 6)
    fit = fit_holder_exponent(x, x)
    a = plot_loglog(x, x, fit, tmp_path / "a.svg")
    b = plot_loglog(x, x, fit, tmp_path / "b.svg")
    assert open(a, "rb").read() == open(b, "rb").read()


def test_degenerate():
    with pytest.raises(DegenerateData):
        plot_loglog([1, 2, 3], [1, 2, 3], None, "x.svg")
