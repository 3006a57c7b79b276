"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line. Run with ``pytest tests/test_acceptance.py -v -s``.
"""

import hashlib
import itertools
import time
from pathlib import Path

import numpy as np
import pytest

from conftest import brute_force_aggregate
from seedgrow.aggregate import aggregate_scale
from seedgrow.atnb import read_tensor, write_tensor
from seedgrow.cli import main
from seedgrow.config import PipelineConfig
from seedgrow.masks import SoftMask
from seedgrow.metrics import evaluate, iou
from seedgrow.refine import finalize, invert_mask, refine_with_background
from seedgrow.seeding import extract_seeds
from seedgrow.strategies import run_ca_sa, run_caa, run_seediff
from seedgrow.synth import (background_leak_spec, clean_spec,
                            concentrated_spec, make_synthetic_dump)


def report(name):
    print(f"\nACCEPTANCE {name}: PASS", flush=True)


def test_aggregation_matches_brute_force(tmp_path):
    dump, _ = make_synthetic_dump(tmp_path, clean_spec(rng_seed=21),
                                  mode="full", layers=4, timesteps=4)
    start = time.perf_counter()
    for kind in ("self", "cross"):
        group = [m for m in dump.raw if m.kind == kind]
        assert len(group) == 16  # 4 layers x 4 timesteps
        expected = brute_force_aggregate([m.data for m in group])
        got = aggregate_scale(group, 16)
        assert np.abs(got - expected).max() < 1e-6
    elapsed = time.perf_counter() - start
    assert elapsed < 1.0, f"aggregation took {elapsed:.3f}s"
    report(f"aggregation-oracle (1e-6, {elapsed * 1000:.0f}ms)")


def test_atnb_round_trip_1000(tmp_path):
    rng = np.random.default_rng(97)
    path = tmp_path / "t.atnb"
    start = time.perf_counter()
    for case in range(1000):
        ndim = int(rng.integers(1, 5))
        shape = tuple(int(rng.integers(1, 7)) for _ in range(ndim))
        data = rng.standard_normal(shape, dtype=np.float32)
        write_tensor(data, path)
        out = read_tensor(path)
        assert out.shape == data.shape
        assert out.tobytes() == data.tobytes(), f"case {case} not bit-exact"
    elapsed = time.perf_counter() - start
    assert elapsed < 10.0, f"round trips took {elapsed:.3f}s"
    report(f"atnb-round-trip (1000 tensors, {elapsed:.2f}s)")


def test_seeded_recovery(tmp_path):
    timings = []
    for shape in ("disk", "rectangle"):
        dump, gt = make_synthetic_dump(tmp_path / shape,
                                       clean_spec(shape, rng_seed=23))
        start = time.perf_counter()
        final = run_seediff(dump, PipelineConfig())
        score = iou(final.binary, gt)
        elapsed = time.perf_counter() - start
        assert score >= 0.99, f"{shape}: IoU {score:.4f}"
        assert elapsed < 5.0, f"{shape}: took {elapsed:.3f}s"
        timings.append(f"{shape} IoU {score:.4f} in {elapsed:.2f}s")
    report(f"seeded-recovery ({'; '.join(timings)})")


def test_ablation_ordering(tmp_path):
    config = PipelineConfig()
    cre = PipelineConfig(scale_schedule=(16,), background=False)
    ire = PipelineConfig(background=False)

    dump, gt = make_synthetic_dump(tmp_path / "conc", concentrated_spec(31))
    strat = {
        "caa": iou(run_caa(dump, config).binary, gt),
        "ca_sa": iou(run_ca_sa(dump, config).binary, gt),
        "seediff": iou(run_seediff(dump, config).binary, gt),
    }
    assert strat["seediff"] >= strat["ca_sa"] >= strat["caa"], strat

    ladders = {}
    for name, spec in (("concentrated", concentrated_spec(31)),
                       ("leak", background_leak_spec(32))):
        dump, gt = make_synthetic_dump(tmp_path / f"lad_{name}", spec)
        ladder = [
            iou(run_caa(dump, config).binary, gt),       # CAA
            iou(run_seediff(dump, cre).binary, gt),      # + CRE
            iou(run_seediff(dump, ire).binary, gt),      # + IRE
            iou(run_seediff(dump, config).binary, gt),   # + BE
        ]
        assert all(a <= b + 1e-12 for a, b in zip(ladder, ladder[1:])), \
            (name, ladder)
        ladders[name] = ladder
    assert ladders["leak"][3] > ladders["leak"][2], \
        f"background stage must strictly improve the leak fixture: " \
        f"{ladders['leak']}"
    strat_txt = " >= ".join(f"{strat[k]:.3f}" for k in ("seediff", "ca_sa", "caa"))
    report(f"ablation-ordering (strategies {strat_txt}; "
           f"leak ladder {' -> '.join(f'{v:.3f}' for v in ladders['leak'])})")


def test_identity_and_boundary_invariants():
    levels = np.array([0.0, 0.25, 0.5, 0.75, 1.0])

    # inversion is an involution: exhaustive over quantized 2x2 masks
    for combo in itertools.product(levels, repeat=4):
        mask = SoftMask(np.array(combo).reshape(2, 2))
        assert (invert_mask(invert_mask(mask)).data == mask.data).all()

    # background damping: identity at bg=0, annihilation at bg=1 (exhaustive)
    zeros, ones = SoftMask(np.zeros((2, 2))), SoftMask(np.ones((2, 2)))
    for combo in itertools.product(levels, repeat=4):
        mask = SoftMask(np.array(combo).reshape(2, 2))
        assert (refine_with_background(mask, zeros).data == mask.data).all()
        assert (refine_with_background(mask, ones).data == 0.0).all()

    # binarization boundary: exactly-beta values survive
    beta = 0.3
    below = finalize(SoftMask(np.full((64, 64), beta - 1e-9)), beta)
    at = finalize(SoftMask(np.full((64, 64), beta)), beta)
    assert below.binary.sum() == 0 and at.binary.all()
    assert (at.soft == beta).all()

    # threshold monotonicity: exhaustive on quantized 2x2 grids
    alphas = [0.2, 0.5, 0.8]
    for combo in itertools.product(levels, repeat=4):
        mask = SoftMask(np.array(combo).reshape(2, 2))
        for lo, hi in itertools.combinations(alphas, 2):
            high_set = extract_seeds(mask, hi)
            if (mask.data >= hi).any():
                assert high_set.coords <= extract_seeds(mask, lo).coords

    # randomized at 64x64
    rng = np.random.default_rng(11)
    for _ in range(20):
        data = rng.uniform(size=(64, 64))
        mask = SoftMask(data)
        assert (invert_mask(invert_mask(mask)).data == data).all()
        assert (refine_with_background(
            mask, SoftMask(np.zeros((64, 64)))).data == data).all()
        assert (refine_with_background(
            mask, SoftMask(np.ones((64, 64)))).data == 0.0).all()
        lo, hi = sorted(rng.uniform(0.05, 0.95, size=2))
        if (data >= hi).any():
            assert extract_seeds(mask, hi).coords <= \
                extract_seeds(mask, lo).coords
        exact = finalize(SoftMask(np.where(data < 0.5, 0.3, data)), beta=0.3)
        assert (exact.binary == (exact.soft > 0)).all()
        assert (exact.soft[exact.soft > 0] >= 0.3).all()
    report("identity-and-boundary-invariants (exhaustive 2x2, randomized 64x64)")


def tree_digest(root):
    digest = hashlib.sha256()
    for path in sorted(Path(root).rglob("*")):
        if path.is_file():
            digest.update(str(path.relative_to(root)).encode())
            digest.update(path.read_bytes())
    return digest.hexdigest()


def test_batch_determinism_20_dumps(tmp_path):
    shapes = ("disk", "rectangle", "two_blobs")
    dumps = []
    for i in range(20):
        out = tmp_path / f"dump{i:02d}"
        assert main(["synth", "-o", str(out), "--shape", shapes[i % 3],
                     "--seed", str(1000 + i)]) == 0
        dumps.append(str(out))
    digests = {}
    for jobs in ("1", "8"):
        out = tmp_path / f"jobs{jobs}"
        assert main(["batch"] + dumps + ["-o", str(out), "--jobs", jobs]) == 0
        digests[jobs] = tree_digest(out)
    assert digests["1"] == digests["8"], "batch output depends on --jobs"
    report(f"batch-determinism (20 dumps, digest {digests['1'][:12]})")


def test_metric_sanity():
    a = np.zeros((4, 4), dtype=np.uint8)
    a[0, 0] = 1
    b = np.zeros((4, 4), dtype=np.uint8)
    b[3, 3] = 1
    ab = a | b
    assert iou(a, a) == 1.0
    assert iou(a, b) == 0.0
    assert iou(a, ab) == 0.5

    rng = np.random.default_rng(5)
    for _ in range(50):
        pairs = []
        for _ in range(int(rng.integers(1, 10))):
            pairs.append((rng.integers(0, 2, size=(5, 5)),
                          rng.integers(0, 2, size=(5, 5)),
                          f"c{int(rng.integers(0, 4))}"))
        report_obj = evaluate(pairs)
        sums = {}
        for pred, gt, label in pairs:
            inter = int(((pred != 0) & (gt != 0)).sum())
            union = int(((pred != 0) | (gt != 0)).sum())
            i0, u0 = sums.get(label, (0, 0))
            sums[label] = (i0 + inter, u0 + union)
        per_class = {k: (i / u if u else 1.0) for k, (i, u) in sums.items()}
        assert report_obj.per_class == pytest.approx(per_class)
        assert report_obj.miou == pytest.approx(
            sum(per_class.values()) / len(per_class))
    report("metric-sanity (exact trivials, pooled-count oracle)")
