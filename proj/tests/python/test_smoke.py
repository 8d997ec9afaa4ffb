import json
import math

import pytest

import bnpmix


def set_partitions(n):
    """Block-size lists of every set partition of n labelled items."""
    def grow(prefix, k):
        if len(prefix) == n:
            sizes = [prefix.count(b) for b in range(k)]
            yield sizes
            return
        for b in range(k + 1):
            yield from grow(prefix + [b], max(k, b + 1))
    yield from grow([0], 1)


@pytest.mark.parametrize(
    "spec",
    [
        bnpmix.ProcessSpec.dp(1.3),
        bnpmix.ProcessSpec.py(0.4, 0.7),
        bnpmix.ProcessSpec.ngg(0.5, 2.0),
        bnpmix.ProcessSpec.dmp(2.0, 3),
        bnpmix.ProcessSpec.pym(0.3, 1.0, 4),
    ],
)
def test_eppf_sums_to_one_over_set_partitions(spec):
    total = sum(math.exp(bnpmix.log_eppf(spec, s, unordered=True)) for s in set_partitions(6))
    assert total == pytest.approx(1.0, abs=1e-10)


def test_dp_prior_kn_matches_stirling_closed_form():
    # P(K_n = k) = alpha^k |s(n,k)| / (alpha)_n
    n, a = 7, 1.5
    s = [[0] * (n + 1) for _ in range(n + 1)]
    s[0][0] = 1
    for m in range(1, n + 1):
        for k in range(1, m + 1):
            s[m][k] = s[m - 1][k - 1] + (m - 1) * s[m - 1][k]
    rising = math.prod(a + i for i in range(n))
    got = bnpmix.prior_kn(bnpmix.ProcessSpec.dp(a), n)
    for k in range(1, n + 1):
        assert got[k - 1] == pytest.approx(a**k * s[n][k] / rising, rel=1e-10)


def test_solver_hits_target():
    spec = bnpmix.ProcessSpec.dp(1.0)
    alpha = bnpmix.solve_param_for_ekn(spec, "alpha", 50, 10.0)
    assert bnpmix.prior_mean_kn(bnpmix.ProcessSpec.dp(alpha), 50) == pytest.approx(10.0, abs=1e-3)


def test_cnk_dp_closed_form():
    n, k, a = 20, 3, 2.0
    assert bnpmix.cnk(bnpmix.ProcessSpec.dp(a), n, k, exact=True) == pytest.approx((k + 1) * (n - k) / (n * a), rel=1e-8)


def test_wasserstein_between_diracs():
    assert bnpmix.wasserstein([1.0], [[0.0, 0.0]], [1.0], [[3.0, 4.0]], 2.0) == pytest.approx(5.0)


def test_mtm_drops_small_far_atom():
    w = [0.6, 0.3999, 0.0001]
    loc = [[0.0, 0.0], [0.01, 0.0], [5.0, 5.0]]
    out = bnpmix.mtm_apply(w, loc, c=0.5, omega=0.1)
    assert out["k_tilde"] == 1
    assert sum(out["weights"]) == pytest.approx(1.0)


def test_invalid_spec_raises():
    with pytest.raises(ValueError):
        bnpmix.ProcessSpec.py(1.5, 1.0)


def test_spec_dict_round_trip():
    spec = bnpmix.ProcessSpec.nggm(0.5, 3.0, 12)
    assert bnpmix.ProcessSpec.from_dict(spec.to_dict()) == spec


def test_sampler_smoke():
    data, labels = bnpmix.simulate_data(60, seed=3)
    assert len(data) == 60 and len(labels) == 60
    out = bnpmix.sample_posterior(data, K=6, alpha_bar=1.0, chains=2, iters=300, burnin=100, seed=5)
    assert sum(out["kn_pmf"]) == pytest.approx(1.0)
    assert 1.0 <= out["mean_kn"] <= 6.0


def test_run_experiment_writes_manifest(tmp_path):
    manifest = bnpmix.run_experiment("fig2_bottom", str(tmp_path), seed=7)
    assert manifest["experiment"] == "fig2_bottom"
    for f in manifest["files"]:
        assert (tmp_path / f["path"]).stat().st_size == f["bytes"]
    on_disk = json.loads((tmp_path / "manifest.json").read_text())
    assert on_disk["seeds"] == manifest["seeds"]
    assert "fig2_bottom" in bnpmix.experiments()
