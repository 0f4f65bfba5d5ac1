import json

import pytest

from linshadow.chain import build_chain_zero_to_e
from linshadow.cli import EXIT_INVALID, EXIT_OK, EXIT_UNDECIDED, main, parse_config
from linshadow.core import DomainError
from linshadow.operators import DirectSum, FiniteMatrix, Shift, identity_multiple, unweighted_shift
from linshadow.serialize import (chain_from_text, chain_to_text, format_vector, parse_vector,
                                 pseudotrajectory_from_text, pseudotrajectory_to_text, read_document)
from linshadow.shadowing import (construct_periodic_shadow, generate_pseudotrajectory,
                                 hyperbolic_splitting)
from linshadow.spaces import CoordinateVector, SequenceSpaceSpec, SumVector
from linshadow.weights import WeightSpec

L2 = SequenceSpaceSpec.ell(2.0)
L2Z = SequenceSpaceSpec.ell(2.0, index_set="Z")
B = unweighted_shift(L2)


# -----------------------------------------------------------------------------
# text documents
# -----------------------------------------------------------------------------
def test_chain_round_trip():
    ch = build_chain_zero_to_e(None, B, 2, 0.3)
    back = chain_from_text(chain_to_text(ch), B)
    assert back.delta == ch.delta
    assert all(a == b for a, b in zip(back.points, ch.points))


def test_tampered_chain_is_rejected():
    text = chain_to_text(build_chain_zero_to_e(None, B, 1, 0.5))
    bad = text.replace("point 3: ", "point 3: 9:1.0 ", 1)
    with pytest.raises(DomainError, match="hash"):
        chain_from_text(bad, B)


def test_chain_bound_to_its_operator():
    text = chain_to_text(build_chain_zero_to_e(None, B, 1, 0.5))
    with pytest.raises(DomainError):
        chain_from_text(text, Shift(WeightSpec.constant(2.0), L2))


def test_complex_and_direct_sum_vectors_round_trip():
    R1 = SequenceSpaceSpec.finite(1, real=False)
    T = DirectSum((identity_multiple(1j, R1), B))
    x = SumVector((CoordinateVector.basis(R1, 0, 0.25 - 1j), CoordinateVector.from_mapping(L2, {3: 1e-17, 9: -2.5})))
    y = parse_vector(format_vector(x), T)
    assert y.parts[0] == x.parts[0] and y.parts[1] == x.parts[1]


def test_periodic_pseudotrajectory_with_certificate_round_trips():
    C = Shift(WeightSpec.bilateral([0.5], [2.0]), L2Z)
    pt = generate_pseudotrajectory(C, None, 0.01, 0, seed=3, mode="periodic", period=4, window=(-4, 3),
                                   truncation=(-50, 49))
    cert = construct_periodic_shadow(C, hyperbolic_splitting(C), pt)
    text = pseudotrajectory_to_text(pt, cert)
    back = pseudotrajectory_from_text(text, C)
    assert back.period == 4 and back.start == 0
    assert all(a == b for a, b in zip(back.points, pt.points))
    doc = read_document(text, C)
    assert doc.certificate["point"] == cert.point
    assert float(doc.certificate["epsilon"]) == cert.epsilon


def test_foreign_documents_are_rejected():
    with pytest.raises(DomainError):
        read_document("hello\n", B)


# -----------------------------------------------------------------------------
# command line
# -----------------------------------------------------------------------------
KJ = {"index_set": "N", "p": 2.0, "source": "koethe", "koethe": {"generator": "k_pow_j"}}
HARDY = {"index_set": "N", "p": 2.0, "source": "norm"}
SHIFT = {"kind": "unilateral_shift", "weight": {"prefix": [], "origin": 1, "tail_pos": [1.0]}}


def _write(tmp_path, cfg, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return path


def _report(out):
    return json.loads((out / "report.json").read_text())


def test_missing_config_is_invalid(tmp_path):
    assert main(["classify", "--out", str(tmp_path / "o")]) == EXIT_INVALID


def test_malformed_config_is_invalid(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    assert main(["--config", str(path), "--out", str(tmp_path / "o")]) == EXIT_INVALID
    path = _write(tmp_path, {"command": "classify", "space": HARDY})
    assert main(["--config", str(path), "--out", str(tmp_path / "o")]) == EXIT_INVALID


def test_stochastic_command_needs_a_seed():
    with pytest.raises(DomainError):
        parse_config({"command": "shadow", "space": HARDY, "operator": SHIFT, "params": {}})
    cfg = parse_config({"command": "shadow", "space": HARDY, "operator": SHIFT, "params": {}}, seed=4)
    assert cfg.seed == 4


def test_classify_reports_convergent_evidence(tmp_path):
    out = tmp_path / "o"
    path = _write(tmp_path, {"command": "classify", "space": KJ, "operator": SHIFT})
    assert main(["--config", str(path), "--out", str(out)]) == EXIT_OK
    rep = _report(out)
    assert rep["result"]["chain_recurrence"] == "NotChainRecurrent"
    assert rep["exit_status"] == EXIT_OK


def test_chain_command_writes_verifiable_chains(tmp_path):
    out = tmp_path / "o"
    path = _write(tmp_path, {"command": "chain", "space": HARDY, "operator": SHIFT,
                             "params": {"delta": 0.2, "index": 2}})
    assert main(["--config", str(path), "--out", str(out)]) == EXIT_OK
    ch = chain_from_text((out / "chain_zero_to_e.txt").read_text(), B)
    assert ch.end == CoordinateVector.basis(L2, 2)


def test_undecided_classification_exits_three(tmp_path):
    space = {"index_set": "N", "p": 2.0, "source": "koethe",
             "koethe": {"generator": "numeric", "rows": [[1.0], [2.0]], "tail_row": [3.0]}}
    path = _write(tmp_path, {"command": "classify", "space": space, "operator": SHIFT})
    assert main(["--config", str(path), "--out", str(tmp_path / "o")]) == EXIT_UNDECIDED


def test_reports_are_deterministic(tmp_path):
    cfg = {"command": "shadow", "space": HARDY, "seed": 7,
           "operator": {"kind": "unilateral_shift", "weight": {"prefix": [], "origin": 1, "tail_pos": [0.5]}},
           "params": {"delta": 0.01, "horizon": 30, "window": [1, 6], "x0": {"1": 1.0}}}
    path = _write(tmp_path, cfg)
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["--config", str(path), "--out", str(a)]) == EXIT_OK
    assert main(["--config", str(path), "--out", str(b)]) == EXIT_OK
    for name in ("report.json", "pseudotrajectory.txt"):
        assert (a / name).read_bytes() == (b / name).read_bytes()
    assert _report(a)["result"]["verdict"] == "shadowed"


def test_zero_noise_shadow_uses_the_exact_orbit(tmp_path):
    cfg = {"command": "shadow", "space": HARDY, "operator": SHIFT,
           "params": {"delta": 0.01, "horizon": 10, "noise": 0, "x0": {"3": 1.0}}}
    out = tmp_path / "o"
    assert main(["--config", str(_write(tmp_path, cfg)), "--out", str(out)]) == EXIT_OK
    rep = _report(out)["result"]
    assert rep["method"] == "exact orbit" and rep["verdict"] == "shadowed"


def test_identity_drift_is_reported_not_shadowed(tmp_path):
    cfg = {"command": "shadow", "seed": 0, "space": {"index_set": "finite", "dim": 1, "p": 2.0, "source": "norm",
                                                     "real": True},
           "operator": FiniteMatrix.of([[1.0]]).to_dict(),
           "params": {"delta": 0.001, "horizon": 150, "mode": "drift", "epsilon": 0.01}}
    out = tmp_path / "o"
    assert main(["--config", str(_write(tmp_path, cfg)), "--out", str(out)]) == EXIT_OK
    assert _report(out)["result"]["verdict"] == "not shadowed"


def test_chaos_command_writes_orbit_table(tmp_path):
    cfg = {"command": "chaos", "space": HARDY,
           "operator": {"kind": "unilateral_shift", "weight": {"prefix": [], "origin": 1, "tail_pos": [2.0]}},
           "params": {"horizon": 5000, "block_recipe": {"lam": 2.0, "blocks": [[1, 40], [61, 400]]}}}
    out = tmp_path / "o"
    assert main(["--config", str(_write(tmp_path, cfg)), "--out", str(out)]) == EXIT_OK
    lines = (out / "orbit.csv").read_text().splitlines()
    assert len(lines) == 5001
    assert _report(out)["result"]["I_density"] > 0.5


def test_entire_demo_command(tmp_path):
    out = tmp_path / "o"
    path = _write(tmp_path, {"command": "demo-entire", "params": {"lam": 2.0}})
    assert main(["--config", str(path), "--out", str(out)]) == EXIT_OK
    rows = (out / "error_growth.csv").read_text().splitlines()
    assert rows[0] == "horizon,best_poly_degree,error"
    errs = [float(r.split(",")[2]) for r in rows[1:]]
    assert errs == sorted(errs)


def test_seed_flag_overrides_config(tmp_path):
    cfg = {"command": "shadow", "space": HARDY, "seed": 1,
           "operator": {"kind": "unilateral_shift", "weight": {"prefix": [], "origin": 1, "tail_pos": [0.5]}},
           "params": {"delta": 0.01, "horizon": 5, "window": [1, 3]}}
    out = tmp_path / "o"
    main(["--config", str(_write(tmp_path, cfg)), "--out", str(out), "--seed", "9"])
    assert _report(out)["seed"] == 9
