from dataclasses import replace

import pytest

from src.generators import gen_gadget, remove_edge
from src.verification import (
    CLAIMS,
    CLAIMS_BY_ID,
    ClaimStatus,
    VerifyOptions,
    proof_forcing_chain,
    run_claim,
    run_verification,
)

CHEAP = ("gadget-census-k1", "degree-facts", "k4-cover-condition")


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_forcing_chain_replays_for_every_start(k):
    report = proof_forcing_chain(gen_gadget(k))
    assert report.holds
    assert len(report.chains) == 6
    assert all(len(chain) == 6 * k + 1 for chain in report.chains)
    assert all(chain[-1] == chain[0] for chain in report.chains)
    assert report.strip[0] == "a1" and report.strip[-1] == f"a{3 * k + 1}"


def test_forcing_chain_breaks_without_the_first_spoke(gadget1):
    a1, b1 = gadget1.outer_cycle[0], gadget1.inner_cycle[0]
    report = proof_forcing_chain(replace(gadget1, graph=remove_edge(gadget1.graph, a1, b1)))
    assert not report.holds
    assert "a1 b1 a2" in report.failure


def test_claims_are_numbered_in_order():
    assert [CLAIMS_BY_ID[claim.id][0] for claim in CLAIMS] == list(range(1, len(CLAIMS) + 1))
    assert len(CLAIMS) == 11
    assert all(claim.anchor for claim in CLAIMS)


def test_cheap_claims_pass():
    report = run_verification(VerifyOptions(threads=1, only=CHEAP))
    assert report.overall
    assert [claim.id for claim in report.claims] == list(CHEAP)
    assert [claim.number for claim in report.claims] == [1, 6, 8]


def test_report_order_follows_claim_numbers_not_the_request():
    report = run_verification(VerifyOptions(threads=1, only=("degree-facts", "gadget-census-k1")))
    assert [claim.id for claim in report.claims] == ["gadget-census-k1", "degree-facts"]


def test_tiny_budget_is_reported_not_passed():
    options = VerifyOptions(node_budget=10, threads=1, only=("fig1-no-4-coloring", "k4-composite-no-4-coloring"))
    report = run_verification(options)
    assert [claim.status for claim in report.claims] == [ClaimStatus.BUDGET_EXCEEDED] * 2
    assert not report.overall
    assert report.to_dict()["overall"] == "fail"


def test_tampered_gadget_fails_the_forcing_claim():
    result = run_claim("gadget-forcing-k1", VerifyOptions(tamper_gadget=True))
    assert result.status is ClaimStatus.FAIL
    witness = result.details["witness_by_label"]
    assert all(witness[f"a{i}"] != 4 for i in range(1, 5))


def test_tampering_also_breaks_the_chain_replay():
    result = run_claim("forcing-chain-replay", VerifyOptions(tamper_gadget=True))
    assert result.status is ClaimStatus.FAIL


def test_unknown_claim_ids_are_rejected():
    with pytest.raises(ValueError):
        run_verification(VerifyOptions(only=("gadget-census-k1", "no-such-claim")))


def test_report_is_deterministic_without_times():
    options = VerifyOptions(threads=1, only=CHEAP)
    first = run_verification(options).to_dict(include_times=False)
    second = run_verification(options).to_dict(include_times=False)
    assert first == second
    assert "wall_time" not in first["claims"][0]


def test_exceptions_become_error_status(monkeypatch):
    def explode(options, opts):
        raise RuntimeError("boom")

    number, claim = CLAIMS_BY_ID["degree-facts"]
    monkeypatch.setitem(CLAIMS_BY_ID, "degree-facts", (number, replace(claim, check=explode)))
    result = run_claim("degree-facts", VerifyOptions())
    assert result.status is ClaimStatus.ERROR
    assert result.evidence == "RuntimeError: boom"


def test_format_table_lists_every_claim():
    report = run_verification(VerifyOptions(threads=1, only=CHEAP))
    table = report.format_table()
    for claim_id in CHEAP:
        assert claim_id in table
    assert table.splitlines()[-1] == "overall: PASS"


def test_parallel_run_matches_serial_run():
    serial = run_verification(VerifyOptions(threads=1, only=CHEAP))
    parallel = run_verification(VerifyOptions(threads=2, only=CHEAP))
    assert parallel.to_dict(include_times=False) == serial.to_dict(include_times=False)


@pytest.mark.slow
def test_every_claim_passes():
    report = run_verification(VerifyOptions(threads=1))
    failing = [(claim.id, claim.status.value, claim.evidence) for claim in report.claims if not claim.passed]
    assert failing == []
