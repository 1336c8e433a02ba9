import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from eigadm import eig_sym_desc, jacobi_eigh


@pytest.mark.parametrize(
    "m, expected",
    [
        (np.eye(3), [1, 1, 1]),
        (np.diag([2.0, 5.0, 1.0]), [5, 2, 1]),
        ([[2.0, 1.0], [1.0, 2.0]], [3, 1]),
    ],
)
def test_examples(m, expected):
    assert np.allclose(eig_sym_desc(m), expected, atol=1e-14)


def test_rejects_nonfinite():
    with pytest.raises(ValueError, match="non-finite"):
        eig_sym_desc([[1.0, np.nan], [np.nan, 1.0]])


def test_rejects_asymmetric():
    with pytest.raises(ValueError, match="symmetric"):
        eig_sym_desc([[1.0, 2.0], [0.0, 1.0]])


def test_batch_equals_single_calls():
    rng = np.random.default_rng(3)
    g = rng.standard_normal((50, 4, 4))
    a = g @ np.swapaxes(g, -1, -2)
    w, _ = jacobi_eigh(a)
    for k in range(50):
        assert np.array_equal(w[k], jacobi_eigh(a[k])[0])


finite = st.one_of(st.just(0.0), st.floats(1e-6, 1e3), st.floats(-1e3, -1e-6))


@settings(max_examples=200, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(1, 6)).map(lambda t: (t[0], t[0])), elements=finite))
def test_reconstruction_and_reference(x):
    m = 0.5 * (x + x.T)
    w, q = jacobi_eigh(m)
    scale = max(np.linalg.norm(m), 1e-300)
    assert np.linalg.norm(q.T @ m @ q - np.diag(w)) <= 1e-10 * scale
    assert np.allclose(q.T @ q, np.eye(len(w)), atol=1e-12)
    assert np.all(np.diff(w) <= 0)
    assert np.allclose(w, np.linalg.eigvalsh(m)[::-1], atol=1e-10 * scale)
