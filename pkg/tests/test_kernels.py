"""Parity between the compiled and pure-Python kernel backends."""

import os
import subprocess
import sys

import numpy as np
import pytest

from dpg.build import build_dpg
from dpg.graph import dpg_to_json
from dpg.kernels import available_backends, default_backend_name, get_backend
from dpg.metrics import betweenness_centrality
from helpers import random_dataset, random_ensemble, random_graph

HAVE_CYTHON = "cython" in available_backends()

pytestmark = pytest.mark.skipif(not HAVE_CYTHON, reason="compiled backend not built")


def test_both_backends_registered():
    assert set(available_backends()) == {"cython", "python"}
    assert get_backend("python").NAME == "python"
    assert get_backend("cython").NAME == "cython"


def test_unknown_backend_rejected():
    with pytest.raises(ValueError, match="backend"):
        get_backend("numba")


def test_default_prefers_compiled():
    assert default_backend_name() == "cython"


def test_env_var_forces_python_backend():
    code = (
        "import dpg.kernels as k; "
        "print(k.default_backend_name())"
    )
    env = dict(os.environ, DPG_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env,
                         capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def test_build_parity_byte_identical():
    rng = np.random.default_rng(11)
    for _ in range(20):
        m = random_ensemble(rng, int(rng.integers(1, 8)), 5, int(rng.integers(2, 5)))
        d = random_dataset(rng, int(rng.integers(5, 120)), m.features)
        a = dpg_to_json(build_dpg(m, d, backend="python"))
        b = dpg_to_json(build_dpg(m, d, backend="cython"))
        assert a == b


def test_brandes_parity_on_random_graphs():
    rng = np.random.default_rng(12)
    for _ in range(25):
        g = random_graph(rng, int(rng.integers(3, 40)), p_edge=0.2)
        for weighted in (False, True):
            a = betweenness_centrality(g, weighted=weighted, backend="python")
            b = betweenness_centrality(g, weighted=weighted, backend="cython")
            for n in g.nodes:
                assert a.scores[n.id] == pytest.approx(b.scores[n.id], abs=1e-12)


def test_raw_traverse_kernel_outputs_match():
    rng = np.random.default_rng(13)
    py = get_backend("python")
    cy = get_backend("cython")
    for _ in range(10):
        m = random_ensemble(rng, 1, 4, 3)
        d = random_dataset(rng, 30, m.features)
        from dpg.build import _compile_tree
        from dpg.model import CanonicalizationPolicy

        ct = _compile_tree(m.trees[0], CanonicalizationPolicy())
        X = np.ascontiguousarray(d.rows, dtype=np.float64)
        args = (ct.root, ct.feat, ct.thr, ct.left, ct.right,
                ct.slot_true, ct.slot_false, len(ct.slots), X)
        codes_a, order_a, starts_a = py.traverse_pairs(*args)
        codes_b, order_b, starts_b = cy.traverse_pairs(*args)
        np.testing.assert_array_equal(np.sort(codes_a), np.sort(codes_b))
        np.testing.assert_array_equal(order_a, order_b)
        np.testing.assert_array_equal(starts_a, starts_b)
