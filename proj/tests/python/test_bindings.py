import itertools
import random

import pytest

import swiss_mwm
from conftest import EXAMPLE_BOARDS, board_set, example_tournament


def brute_force(n, edges):
    weight = {(min(u, v), max(u, v)): w for u, v, w in edges}
    best = None

    def rec(free, acc):
        nonlocal best
        if not free:
            best = acc if best is None else max(best, acc)
            return
        u = free[0]
        for v in free[1:]:
            if (u, v) in weight:
                rec([x for x in free if x not in (u, v)], acc + weight[(u, v)])

    rec(list(range(n)), 0)
    return best


def test_matching_against_brute_force():
    rng = random.Random(5)
    for _ in range(60):
        n = rng.choice([2, 4, 6, 8])
        edges = [(u, v, rng.randint(-20, 20)) for u, v in itertools.combinations(range(n), 2)]
        pairs, total = swiss_mwm.max_weight_perfect_matching(n, edges)
        assert total == brute_force(n, edges)
        assert sorted(x for p in pairs for x in p) == list(range(n))


def test_matching_errors():
    with pytest.raises(swiss_mwm.SwissError) as info:
        swiss_mwm.max_weight_perfect_matching(4, [(0, 1, 1.0)])
    assert swiss_mwm.error_code(info.value) == "NoPerfectMatching"


def test_fresh_group_pairings():
    doc = example_tournament()
    assert board_set(swiss_mwm.pair(doc)) == EXAMPLE_BOARDS[0]
    burstein = swiss_mwm.pair(doc, system="Burstein")
    assert board_set(burstein) == {("p1", "p8"), ("p2", "p7"), ("p3", "p6"), ("p4", "p5")}
    monrad = swiss_mwm.pair(doc, system="Monrad")
    assert board_set(monrad) == {("p1", "p2"), ("p3", "p4"), ("p5", "p6"), ("p7", "p8")}
    assert swiss_mwm.pair(doc, seed=9) == swiss_mwm.pair(doc, seed=9)


def test_true_strength_rejected():
    doc = example_tournament()
    doc["players"][0]["trueStrength"] = 2000
    with pytest.raises(swiss_mwm.SwissError) as info:
        swiss_mwm.pair(doc)
    assert swiss_mwm.error_code(info.value) == "ParseError"


def test_experiment_rows_and_summary():
    out = swiss_mwm.run_experiment(players=8, rounds=3, samples=4, systems="all", threads=1)
    assert len(out["rows"]) == 20
    assert [r["system"] for r in out["rows"][::4]] == list(swiss_mwm.SYSTEMS)
    assert out["csv"].splitlines()[0].startswith("sample_id,system,n,rounds,beta,seed,kendall_tau")
    assert len(out["csv"].splitlines()) == 21
    for row in out["rows"]:
        assert -1 <= row["kendall_tau"] <= 1
        assert 0 < row["ndcg"] <= 1
        assert row["acd"][0] == 8
    again = swiss_mwm.run_experiment(players=8, rounds=3, samples=4, systems="all", threads=2)
    assert again["csv"] == out["csv"]


def test_experiment_config_errors():
    with pytest.raises(swiss_mwm.SwissError) as info:
        swiss_mwm.run_experiment(players=9)
    assert swiss_mwm.error_code(info.value) == "InvalidConfig"
    with pytest.raises(swiss_mwm.SwissError):
        swiss_mwm.run_experiment(unknown_field=1)


def test_correlation_study_degenerate():
    rows = swiss_mwm.correlation_study(
        players=8,
        rounds=3,
        systems=["Dutch"],
        outerTournaments=3,
        innerReplays=10,
        threads=1,
        outcome={"eloScale": 1e-9, "drawBase": 0, "drawSlope": 0},
    )
    assert len(rows) == 3
    assert all(r["pearson"] is None for r in rows)


def test_rank_metrics():
    a = ["a", "b", "c", "d"]
    assert swiss_mwm.kendall_tau(a, a) == 1
    assert swiss_mwm.kendall_tau(a, a[::-1]) == -1
    assert swiss_mwm.spearman_rho(a, a[::-1]) == -1
    assert swiss_mwm.ndcg(a, a) == pytest.approx(1)


def test_outcome_distribution():
    w, d, b = swiss_mwm.outcome_distribution(2400, 2200)
    assert w + d + b == pytest.approx(1)
    assert abs(w - 0.63) <= 0.04 and abs(d - 0.26) <= 0.04 and abs(b - 0.11) <= 0.04
    with pytest.raises(swiss_mwm.SwissError):
        swiss_mwm.outcome_distribution(900, 1500)
