import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from clifford_doubling import CliffordDoubling


def test_params_roundtrip():
    est = CliffordDoubling(m=8, zeta=0.2)
    p = est.get_params()
    assert p["m"] == 8 and p["zeta"] == 0.2
    est.set_params(max_iter=2)
    assert clone(est).max_iter == 2


def test_not_fitted():
    with pytest.raises(NotFittedError):
        CliffordDoubling().score()


def test_fit_short_run():
    est = CliffordDoubling(m=6, max_iter=2).fit()
    assert est.state_.iteration == 2
    assert est.score() > 0
    assert est.report()["embeddedness"]["genus"] == 37
