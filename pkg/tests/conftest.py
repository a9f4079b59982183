import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from msglass.model import ModelSpec  # noqa: E402


def random_models(count, seed, n_species=(2, 3, 4), p_max=4, total=(3, 8)):
    """Deterministic random pure models with ``|p|`` in the closed range ``total``."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        k = int(rng.choice(n_species))
        p = rng.integers(1, p_max + 1, size=k)
        if not total[0] <= p.sum() <= total[1]:
            continue
        lam = rng.dirichlet(np.ones(k))
        if lam.min() < 0.02:
            continue
        lam[-1] = 1.0 - lam[:-1].sum()
        out.append(ModelSpec(tuple(lam), tuple(int(v) for v in p)))
    return out


@pytest.fixture(scope="session")
def model_21():
    return ModelSpec((2 / 3, 1 / 3), (2, 1), ("a", "b"))


@pytest.fixture(scope="session")
def general_models():
    return random_models(50, seed=2024)


_CRITERIA = "acceptance_criteria"


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or (rep.when != "call" and not rep.failed):
        return
    detail = dict(rep.user_properties).get("detail", "")
    if rep.failed and not detail:
        detail = str(call.excinfo.value).splitlines()[0] if call.excinfo else ""
    results = item.config.stash.setdefault(_stash_key, {})
    if rep.when == "call" or mark.args[0] not in results:
        results[mark.args[0]] = (rep.passed, mark.args[1], detail)


_stash_key = pytest.StashKey[dict]()


def pytest_terminal_summary(terminalreporter, config):
    results = config.stash.get(_stash_key, {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        ok, title, detail = results[n]
        terminalreporter.write_line(f"criterion {n:>2} {'PASS' if ok else 'FAIL'}  {title}  {detail}".rstrip())
