import numpy as np
import pytest

from logitdiag.data import Dataset, Role, VariableSpec


def make_dataset(X, y, names=None):
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    names = names or [f"x{j + 1}" for j in range(X.shape[1])]
    specs = (VariableSpec("y", Role.RESPONSE),) + tuple(
        VariableSpec(n, Role.CONTINUOUS) for n in names
    )
    return Dataset(specs, np.column_stack([np.asarray(y, dtype=float), X]))


@pytest.fixture
def intercept_only_116():
    """61 events out of 116 and no predictors."""
    y = np.array([1.0] * 61 + [0.0] * 55)
    return Dataset((VariableSpec("Y", Role.RESPONSE),), y[:, None])


@pytest.fixture
def separable_toy():
    x = np.array([0.0, 1.0] * 5)
    return make_dataset(x, x.copy())


@pytest.fixture
def moderate_ds():
    from logitdiag.validation import two_normal_spec
    from logitdiag.simulate import generate

    return generate(two_normal_spec(300, beta=(0.8, -0.6), intercept=0.3, seed=11))


_CRITERIA: dict[int, str] = {}


@pytest.fixture
def criterion(request):
    """``report(number, passed, detail)`` prints and records one acceptance line."""

    def report(number: int, passed: bool, detail: str) -> bool:
        line = f"[{'PASS' if passed else 'FAIL'}] criterion {number:>2}: {detail}"
        _CRITERIA[number] = line
        print(line)
        return passed

    return report


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for number in sorted(_CRITERIA):
            terminalreporter.write_line(_CRITERIA[number])
