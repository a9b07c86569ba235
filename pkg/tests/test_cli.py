import json
import subprocess
import sys
from collections import Counter

import pytest

from uniformity_forge.catalog import Catalog, CatalogEntry, Provenance, Verification, has_cycle
from uniformity_forge.cli import main
from uniformity_forge.errors import ContractError
from uniformity_forge.formats import read_moa, read_qst
from uniformity_forge.shipped import SHIPPED, load, shipped_path
from uniformity_forge.states import verify_k_uniform


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_verify_pass(capsys):
    code, out, _ = run(capsys, "verify", str(shipped_path("moa_8_4_2222")), "--strength", "2")
    assert code == 0 and "PASS" in out and "MD 3" in out


def test_verify_uniform_failure_witness(capsys):
    code, _, err = run(capsys, "verify", str(shipped_path("moa_12_3_2222")), "--uniform", "2")
    assert code == 1
    assert "witness {1,2}" in err


def test_verify_truncated(tmp_path, capsys):
    bad = tmp_path / "cut.moa"
    bad.write_text("\n".join(shipped_path("moa_8_4_2222").read_text().splitlines()[:5]) + "\n")
    code, _, err = run(capsys, "verify", str(bad), "--strength", "2")
    assert code == 2 and "truncated" in err


def test_verify_scheme_and_state(capsys):
    assert run(capsys, "verify", str(shipped_path("h4")), "--scheme")[0] == 0
    code, out, _ = run(capsys, "verify", str(shipped_path("state_4_2222")), "--uniform", "2", "--json")
    assert code == 0 and json.loads(out)["passed"] is True


def test_verify_strength_failure(capsys):
    code, _, err = run(capsys, "verify", str(shipped_path("moa_8_4_2222")), "--strength", "3")
    assert code == 1 and "witness {1,2,3}" in err


def test_verify_unknown_suffix(tmp_path, capsys):
    f = tmp_path / "x.txt"
    f.write_text("1\n")
    assert run(capsys, "verify", str(f))[0] == 2


def test_construct_kron_reproduces_small_array(tmp_path, capsys):
    out = tmp_path / "k.moa"
    code, text, _ = run(capsys, "construct", "kron", "--a1", "trivial:2", "--ghm", "hadamard:4", "--out", str(out))
    assert code == 0 and "verified" in text
    assert Counter(map(tuple, read_moa(out).rows.tolist())) == Counter(
        map(tuple, load("moa_8_4_2222").rows.tolist())
    )


def test_construct_state_and_basis(tmp_path, capsys):
    state = tmp_path / "s.qst"
    code, out, _ = run(capsys, "construct", "state", "--in", str(shipped_path("moa_8_4_2222")), "-k", "2", "--out", str(state))
    # same content as the shipped state, so the catalog reuses that entry but the report names our file
    assert code == 0 and f"wrote {state}" in out
    assert verify_k_uniform(read_qst(state), 2).passed
    code, out, _ = run(capsys, "construct", "basis", "--in", str(state), "-k", "2",
                       "--out-dir", str(tmp_path / "basis"), "--json")
    report = json.loads(out)
    assert code == 0 and report["count"] == 64 and report["max_overlap"] < 1e-10
    assert len(list((tmp_path / "basis").glob("*.qst"))) == 64


def test_construct_state_rejects_redundant(capsys):
    code, _, err = run(capsys, "construct", "state", "--in", "builtin:moa_12_3_2222", "-k", "2")
    assert code == 1 and "construct state" in err and "irredundant" in err


def test_construct_chain_records_provenance(tmp_path, capsys):
    split = tmp_path / "split.moa"
    dele = tmp_path / "del.moa"
    assert run(capsys, "construct", "split", "--in", "builtin:oa_16_4x5", "--col", "1",
               "--d1", "2", "--d2", "2", "--out", str(split))[0] == 0
    assert run(capsys, "construct", "delete", "--in", str(split), "--cols", "6", "--out", str(dele))[0] == 0
    code, out, _ = run(capsys, "construct", "state", "--in", str(dele), "-k", "2", "--json")
    assert code == 0
    entry = json.loads(out)["entry"]
    cat = Catalog()
    chain = cat.ancestry(entry["id"])
    assert len(chain) == 3
    assert cat.get(chain[-1]).provenance.source == "imported"
    code, out, _ = run(capsys, "catalog", "list")
    assert "delete <-" in out and "split <-" in out


def test_construct_other_ops(tmp_path, capsys):
    eq = "builtin:state_4_2222"
    assert run(capsys, "construct", "reduce", "--in", eq, "--party", "1", "--outcome", "2", "-k", "2")[0] == 0
    assert run(capsys, "construct", "merge", "--in", eq, "--i", "1", "--j", "5", "-k", "2")[0] == 0
    assert run(capsys, "construct", "tensor", "--a", "ghz:2,3", "--b", "ghz:3,3", "-k", "1")[0] == 0
    assert run(capsys, "construct", "strength3", "--a", "even:4", "--h", "builtin:h4")[0] == 0
    code, out, _ = run(capsys, "construct", "replace", "--a1", "builtin:moa_8_4_2222", "--col", "1",
                       "--a2", "linear:2,3", "--json")
    assert code == 0 and json.loads(out)["entry"]["signature"] == "OA(8,2^7,2)"


def test_construct_no_verify(capsys):
    code, out, _ = run(capsys, "construct", "kron", "--a1", "linear:3,2", "--ghm", "ghm:3,2", "--no-verify")
    assert code == 0 and "unverified" in out


def test_construct_pm_scheme(tmp_path, capsys):
    pm = tmp_path / "h.ds"
    pm.write_text("4 4 2 3\n1 1 1 1\n1 1 -1 -1\n1 -1 1 -1\n1 -1 -1 1\n")
    code, _, _ = run(capsys, "construct", "kron", "--a1", "trivial:2", "--ghm", str(pm), "--pm")
    assert code == 0


def test_shadow_commands(capsys):
    code, out, _ = run(capsys, "shadow", "3", *["2"] * 8)
    assert code == 0 and "S_1 = -23/12" in out and "verdict EXCLUDED" in out
    code, out, _ = run(capsys, "shadow", "2", "2", "2")
    assert "NOT-EXCLUDED" in out
    code, _, err = run(capsys, "shadow", "3", "2", "2", "2")
    assert code == 2 and "odd number" in err
    code, out, _ = run(capsys, "shadow", "--scan", "9", "4", "--json")
    dims = [tuple(e["dims"]) for e in json.loads(out)["excluded"]]
    assert (3,) + (2,) * 8 in dims and (4, 3, 3, 3, 3, 3, 3, 2, 2) in dims
    assert run(capsys, "shadow")[0] == 2


def test_catalog_fresh_lists_shipped(capsys):
    code, out, _ = run(capsys, "catalog", "list", "--json")
    names = {e["provenance"]["name"] for e in json.loads(out)["entries"]}
    assert code == 0 and names == set(SHIPPED)
    assert all(e["verification"]["status"] == "verified" for e in json.loads(out)["entries"])


def test_catalog_show_and_missing(capsys):
    cat = Catalog()
    some = next(iter(cat.entries))
    code, out, _ = run(capsys, "catalog", "show", some[:6])
    assert code == 0 and some in out
    assert run(capsys, "catalog", "show", "nope")[0] == 2


def test_catalog_gc(tmp_path, capsys):
    out = tmp_path / "x.moa"
    run(capsys, "construct", "split", "--in", "builtin:moa_18_6_3x6", "--col", "1", "--d1", "3", "--d2", "2", "--out", str(out))
    out.unlink()
    code, text, _ = run(capsys, "catalog", "gc", "--json")
    assert code == 0 and len(json.loads(text)["removed"]) == 1


def _entry(eid, parents):
    return CatalogEntry(eid, "array", f"/nowhere/{eid}", eid, "sig", 2, {}, Provenance("constructed", "op", parents),
                        Verification("unverified"))


def test_catalog_rejects_missing_parent(tmp_path):
    cat = Catalog(tmp_path / "c", seed=False)
    with pytest.raises(ContractError):
        cat.add(_entry("b", ["a"]))


def test_cycle_detection():
    entries = {"a": _entry("a", ["b"]), "b": _entry("b", ["a"])}
    assert has_cycle(entries)
    assert not has_cycle({"a": _entry("a", []), "b": _entry("b", ["a"])})


def test_catalog_persists(tmp_path):
    first = Catalog(tmp_path / "c")
    second = Catalog(tmp_path / "c")
    assert set(first.entries) == set(second.entries) and len(second) == len(SHIPPED)


def test_module_entry_point(tmp_path):
    env = {"UF_CATALOG_DIR": str(tmp_path / "c"), "PATH": "/usr/bin:/bin"}
    res = subprocess.run([sys.executable, "-m", "uniformity_forge", "shadow", "2", "2", "2"],
                         capture_output=True, text=True, env=env)
    assert res.returncode == 0 and "NOT-EXCLUDED" in res.stdout
