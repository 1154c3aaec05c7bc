import os
import subprocess
import sys

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mhsdiv import _pykernel, kernel
from mhsdiv.errors import ModulusTooLarge
from mhsdiv.mhs import ScaledStream

needs_c = pytest.mark.skipif(kernel._ckernel is None, reason="compiled kernel not built")


@needs_c
@settings(max_examples=200, deadline=None)
@given(parts=st.lists(st.integers(1, 6), min_size=1, max_size=4),
       p=st.sampled_from([2, 3, 5, 7, 11, 13, 29, 101]),
       t=st.integers(0, 2), extra=st.integers(1, 4), data=st.data())
def test_backends_agree(parts, p, t, extra, data):
    d = len(parts)
    K = min(extra + t * min(parts), 60)
    modulus = p ** K
    if modulus >= 2 ** 64:
        return
    hi = p ** (t + 1)
    if hi > 20000 or hi <= d:
        return
    start = data.draw(st.integers(d, hi - 1))
    end = data.draw(st.integers(start, hi))
    seed = [1] + [data.draw(st.integers(0, modulus - 1)) for _ in range(d)]
    tm = data.draw(st.sampled_from([0, p, modulus]))
    a, b = list(seed), list(seed)
    ha = _pykernel.scan(tuple(parts), p, t, modulus, start, end, a, tm)
    hb = kernel._ckernel.scan(tuple(parts), p, t, modulus, start, end, b, tm)
    assert a == b and ha == hb


@needs_c
def test_top_of_64_bits():
    # 3^40 is just below 2^64: exercises 128-bit products on both sides
    p, K = 3, 40
    assert p ** K < 2 ** 64 < p ** (K + 1)
    a = ScaledStream((1, 2), p, 3, K, backend="python")
    b = ScaledStream((1, 2), p, 3, K, backend="cython")
    assert a.advance_to(80, p ** K) == b.advance_to(80, p ** K)
    assert a.psum == b.psum


def test_bigint_fallback_and_refusal():
    st_ = ScaledStream((5, 5), 13, 1, 20)
    assert not st_.fast
    st_.advance_to(30)
    strict = ScaledStream((5, 5), 13, 1, 20, allow_bigint=False)
    with pytest.raises(ModulusTooLarge):
        strict.advance_to(30)


def test_empty_range():
    assert kernel.scan((2,), 7, 0, 49, 5, 5, [1, 0]) == []


def test_pure_env_switch():
    env = dict(os.environ, MHSDIV_PURE="1")
    out = subprocess.run([sys.executable, "-c", "from mhsdiv import kernel; print(kernel.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
