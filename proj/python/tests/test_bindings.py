import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

import qcbound

SMALL = """
[model]
family = ising
L = 6
h_x = -1.05
h_z = 0.5
[curve]
t_start = 1000
t_end = 1200
dt = 10
"""


def test_curve_summary_and_arrays():
    out = qcbound.curve(SMALL)
    s = out["summary"]
    assert s["D"] == 64
    assert s["kernel_dim"] == 1
    assert len(out["t"]) == len(out["bound"]) == 21
    assert np.all(out["bound"] <= out["t"] + 1e-9)
    assert s["C_sat"] == pytest.approx(np.mean(out["bound"]), rel=1e-12)
    assert s["C_biinv_sat"] == pytest.approx(np.mean(out["biinv"]), rel=1e-12)


def test_bi_invariant_curve_matches_direct_rounding():
    out = qcbound.curve(SMALL)
    E = out["energies"]
    for t, b in zip(out["t"], out["biinv"]):
        x = E * t
        x = x - 2 * np.pi * np.round(x / (2 * np.pi))
        assert b == pytest.approx(np.linalg.norm(x), rel=1e-9)


def test_q_matrix_properties():
    res = qcbound.qmatrix(SMALL)
    q = res["q"]
    assert np.allclose(q, q.T)
    w = np.linalg.eigvalsh(q)
    assert w.min() > -1e-10 and w.max() < 1 + 1e-10
    assert int(np.sum(w < 1e-10)) == res["kernel_dim"] == 1
    assert np.allclose(q @ res["energies"], 0, atol=1e-10)


def test_hamiltonian_is_hermitian():
    h = qcbound.hamiltonian(SMALL)
    assert h.shape == (64, 64)
    assert np.allclose(h, h.conj().T)


def cycle_type(p):
    seen, ct = set(), []
    for i in range(len(p)):
        if i in seen:
            continue
        n, j = 0, i
        while j not in seen:
            seen.add(j)
            j = p[j]
            n += 1
        ct.append(n)
    return sorted(ct)


@pytest.mark.parametrize("D", [4, 6])
def test_weingarten_inverts_gram_matrix(D):
    perms = list(itertools.permutations(range(4)))

    def compose_inv(s, t):
        inv = [0] * 4
        for i, v in enumerate(s):
            inv[v] = i
        return tuple(inv[t[i]] for i in range(4))

    G = np.array([[float(D) ** len(cycle_type(compose_inv(s, t))) for t in perms] for s in perms])
    W = np.linalg.inv(G)
    for a, s in enumerate(perms):
        for b, t in enumerate(perms):
            w = qcbound.weingarten(cycle_type(compose_inv(s, t)), D)
            assert isinstance(w, Fraction)
            assert float(w) == pytest.approx(W[a, b], rel=1e-9)


def test_haar_unitary():
    u = qcbound.haar_unitary(8, 3)
    assert np.allclose(u.conj().T @ u, np.eye(8))
    assert np.array_equal(u, qcbound.haar_unitary(8, 3))


def test_cvp_on_scaled_identity():
    basis = 2 * math.pi * np.eye(3)
    target = np.array([7.0, -3.5, 0.2])
    r = qcbound.cvp(basis, target)
    expect = np.linalg.norm(target - 2 * np.pi * np.round(target / (2 * np.pi)))
    assert r["greedy"] == pytest.approx(expect)
    assert r["rounding"] >= r["greedy"] - 1e-12


def test_errors_map_to_python_types():
    with pytest.raises(qcbound.ConfigError, match="model.famly"):
        qcbound.normalize_config("[model]\nfamly = ising\n")
    with pytest.raises(ValueError):
        qcbound.curve("[cvpbench]\ndims = 9\n")


def test_config_hash_is_stable():
    text = qcbound.normalize_config(SMALL)
    assert qcbound.config_hash(text) == qcbound.config_hash(SMALL)
    assert len(qcbound.config_hash(SMALL)) == 16
