"""Acceptance suite: one test per criterion, each printing a PASS line.

Regression baselines below were frozen from an independent straight-line
oracle run (plain numpy, outside this package) on the fixed instance
seed 42, 64x64, rank 4, density 0.05 with lam = 1/8, mu = 10, K = 3000,
eps = 1e-7; the library reproduced them bitwise before freezing.
"""

import json
import subprocess
import sys

import numpy as np
import pytest

from lrfusion import (
    AttentionParams,
    JointState,
    SingleState,
    SolverConfig,
    SyntheticSpec,
    attention_weights,
    fuse,
    fusion_gradients,
    generate,
    joint_decompose,
    joint_step,
    lmr_step,
    read_matrix_rdm,
    recovery_metrics,
    soft_threshold,
    svd,
    svt,
    write_matrix_rdm,
)

# frozen regression baselines (see module docstring)
BASELINE_ITERATIONS = 172
BASELINE_REL_ERR_L = 1.1405805856823026e-09
BASELINE_REL_ERR_S_I = 6.8873960850841589e-09
BASELINE_REL_ERR_S_T = 7.8215941129174445e-09
BASELINE_F1_S_I = 1.0
BASELINE_F1_S_T = 1.0

CHECKPOINTS = (1000, 2000, 3000, 4000)


def rng_for(seed):
    return np.random.Generator(np.random.PCG64(seed))


def _pass(name):
    print(f"ACCEPTANCE {name}: PASS")


@pytest.fixture(scope="module")
def acceptance_instance():
    return generate(SyntheticSpec(rows=64, cols=64, rank=4, density=0.05, seed=42))


@pytest.fixture(scope="module")
def recovery_run(acceptance_instance):
    cfg = SolverConfig(lam=0.125, mu=10.0, max_iters=3000, epsilon=1e-7)
    return joint_decompose(acceptance_instance.i, acceptance_instance.t, cfg)


def test_proximal_operator_correctness():
    # closed forms, exactly
    assert soft_threshold([[2.0]], 0.5)[0, 0] == 1.5
    assert soft_threshold([[-0.3]], 0.5)[0, 0] == 0.0
    assert np.array_equal(svt(np.diag([3.0, 1.0, 0.2]), 0.5), np.diag([2.5, 0.5, 0.0]))

    # singular-value law on 200 random matrices up to 128x128
    rng = rng_for(1001)
    for _ in range(200):
        m, n = int(rng.integers(1, 129)), int(rng.integers(1, 129))
        a = rng.uniform(-2, 2, size=(m, n))
        sigma = svd(a).sigma
        tau = float(rng.uniform(0, 1.1 * sigma[0])) if sigma[0] > 0 else 0.1
        out_sigma = svd(svt(a, tau)).sigma
        assert np.max(np.abs(out_sigma - np.maximum(sigma - tau, 0.0))) <= 1e-9
    _pass("proximal-operator-correctness")


def test_algorithm_fixed_point_and_symmetry():
    # zero inputs converge at the first iteration
    z = np.zeros((32, 32))
    res = joint_decompose(z, z, SolverConfig())
    assert res.converged and res.iterations_run == 1
    assert np.array_equal(res.l, z) and np.array_equal(res.s_i, z)

    # identical inputs keep both sparse blocks and multipliers bitwise equal
    cfg = SolverConfig(lam=0.2, mu=10.0, max_iters=25, epsilon=1e-300)
    for seed in range(50):
        i = rng_for(2000 + seed).uniform(-1, 1, size=(32, 32))
        state = JointState.zeros(32, 32)
        for _ in range(25):
            state = joint_step(state, i, i, cfg)
            assert state.s_i.tobytes() == state.s_t.tobytes()
            assert state.z_i.tobytes() == state.z_t.tobytes()
    _pass("algorithm-fixed-point-and-symmetry")


def test_equivalence_oracle():
    # joint on (x, x) and single with svt_tau = 1/(2*mu), iterate for iterate
    for seed in range(20):
        rng = rng_for(3000 + seed)
        m = int(rng.integers(8, 65))
        n = int(rng.integers(8, 65))
        x = rng.uniform(-1, 1, size=(m, n))
        mu = float(rng.uniform(2.0, 20.0))
        cfg = SolverConfig(lam=0.1, mu=mu, max_iters=200, epsilon=1e-300)
        joint_state = JointState.zeros(m, n)
        single_state = SingleState.zeros(m, n)
        for _ in range(200):
            joint_state = joint_step(joint_state, x, x, cfg)
            single_state = lmr_step(single_state, x, cfg, 1.0 / (2.0 * mu))
            assert np.linalg.norm(joint_state.l - single_state.l) <= 1e-12
            assert np.linalg.norm(joint_state.s_i - single_state.s) <= 1e-12
            assert np.linalg.norm(joint_state.z_i - single_state.z) <= 1e-12
    _pass("equivalence-oracle")


def test_convergence_with_shipped_defaults(acceptance_instance, recovery_run):
    runs = {0.125: recovery_run}
    runs[1.0] = joint_decompose(
        acceptance_instance.i,
        acceptance_instance.t,
        SolverConfig(lam=1.0, mu=10.0, max_iters=3000, epsilon=1e-7),
    )
    for lam, res in runs.items():
        assert res.converged, f"lam={lam} did not converge within 3000 iterations"
        assert res.iterations_run <= 3000
        assert max(res.residual_history[-1]) < 1e-7
        checkpoint_values = [
            max(res.residual_history[min(cp, res.iterations_run) - 1]) for cp in CHECKPOINTS
        ]
        assert checkpoint_values == sorted(checkpoint_values, reverse=True)
    _pass("convergence-with-shipped-defaults")


def test_recovery_regression(acceptance_instance, recovery_run):
    metrics = recovery_metrics(recovery_run, acceptance_instance)
    assert recovery_run.iterations_run == BASELINE_ITERATIONS
    assert metrics.rel_err_l == pytest.approx(BASELINE_REL_ERR_L, rel=1e-6)
    assert metrics.rel_err_s_i == pytest.approx(BASELINE_REL_ERR_S_I, rel=1e-6)
    assert metrics.rel_err_s_t == pytest.approx(BASELINE_REL_ERR_S_T, rel=1e-6)
    assert metrics.f1_s_i == pytest.approx(BASELINE_F1_S_I, rel=1e-6)
    assert metrics.f1_s_t == pytest.approx(BASELINE_F1_S_T, rel=1e-6)
    _pass("recovery-regression")


def test_fusion_contracts():
    # simplex and shift invariance at 1e-12
    rng = rng_for(4000)
    for _ in range(200):
        a, b, c = rng.uniform(-30, 30, size=3)
        shift = float(rng.uniform(-50, 50))
        base = attention_weights(a, b, c)
        assert all(w > 0 for w in base)
        assert abs(sum(base) - 1.0) <= 1e-12
        shifted = attention_weights(a + shift, b + shift, c + shift)
        assert max(abs(x - y) for x, y in zip(base, shifted)) <= 1e-12

    # saturated weights return L
    l = rng.uniform(-1, 1, size=(6, 6))
    s_i = rng.uniform(-1, 1, size=(6, 6))
    s_t = rng.uniform(-1, 1, size=(6, 6))
    l[0, 0], s_i[0, 0], s_t[0, 0] = 1.0, 0.0, 0.0
    w = np.zeros(36)
    w[0] = 48.0
    res = fuse(l, s_i, s_t, AttentionParams(w=w, b=0.0))
    assert res.scores[0] - max(res.scores[1:]) >= 40.0
    assert np.max(np.abs(res.r - l)) <= 1e-12

    # analytic gradients vs central finite differences on 20 seeded 8x8 instances
    h = 1e-6
    for seed in range(20):
        rng = rng_for(4100 + seed)
        mats = [rng.uniform(-1, 1, size=(8, 8)) for _ in range(3)]
        p = AttentionParams(w=rng.uniform(-0.3, 0.3, size=64), b=float(rng.uniform(-0.5, 0.5)))
        up = rng.uniform(-1, 1, size=(8, 8))
        grad_w, grad_b = fusion_gradients(*mats, p, up)

        def loss(w, b):
            return float(np.sum(up * fuse(*mats, AttentionParams(w=w, b=b)).r))

        fd_w = np.zeros(64)
        for idx in range(64):
            wp, wm = p.w.copy(), p.w.copy()
            wp[idx] += h
            wm[idx] -= h
            fd_w[idx] = (loss(wp, p.b) - loss(wm, p.b)) / (2 * h)
        fd_b = (loss(p.w, p.b + h) - loss(p.w, p.b - h)) / (2 * h)
        denom = np.maximum(1.0, np.maximum(np.abs(grad_w), np.abs(fd_w)))
        assert np.max(np.abs(grad_w - fd_w) / denom) <= 1e-5
        assert abs(grad_b - fd_b) / max(1.0, abs(grad_b), abs(fd_b)) <= 1e-5
    _pass("fusion-contracts")


def test_format_and_determinism(tmp_path):
    # RDM1 round trip, bitwise, on 100 random matrices
    rng = rng_for(5000)
    for k in range(100):
        m, n = int(rng.integers(1, 41)), int(rng.integers(1, 41))
        a = rng.uniform(-1, 1, size=(m, n)) * 10.0 ** rng.integers(-12, 13)
        path = tmp_path / f"m{k}.rdm"
        write_matrix_rdm(path, a)
        assert read_matrix_rdm(path).tobytes() == a.tobytes()

    # identical CLI invocations: identical manifests (minus timing) and digests
    inst = generate(SyntheticSpec(rows=16, cols=16, rank=2, density=0.1, seed=7))
    write_matrix_rdm(tmp_path / "I.rdm", inst.i)
    write_matrix_rdm(tmp_path / "T.rdm", inst.t)
    out = tmp_path / "out"
    args = [
        sys.executable, "-m", "lrfusion.cli", "joint",
        "--input-i", str(tmp_path / "I.rdm"), "--input-t", str(tmp_path / "T.rdm"),
        "--out-dir", str(out), "--lambda", "0.25", "--max-iters", "200",
    ]
    snapshots = []
    for _ in range(2):
        proc = subprocess.run(args, capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
        manifest = json.loads((out / "manifest.json").read_text())
        manifest.pop("timing")
        digests = {
            name: (out / name).read_bytes()
            for name in ("L.rdm", "S_I.rdm", "S_T.rdm", "residuals.csv")
        }
        snapshots.append((manifest, digests, proc.stdout))
    assert snapshots[0] == snapshots[1]
    _pass("format-and-determinism")
